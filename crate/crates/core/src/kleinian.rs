//! Hyperbolic toral groups `G_A = ℤ² ⋊_A ℤ` acting on the projective plane:
//! integral and diagonalized generators, word balls, pseudo-projective limits
//! and their kernel lines, the Kulkarni regions, proper discontinuity on
//! boxes, the embedding as a lattice of Sol, conjugacy of the monodromy and a
//! fundamental domain.

use std::collections::BTreeSet;

use nalgebra::{Matrix2, Matrix3, Vector2};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use crate::projective::{
    general_position_max, line_through, lines_concurrent, GeneralPosition, Kernel,
    ProjectiveLine, ProjectivePoint, PseudoProjectiveMap,
};
use crate::geometry::ProductPoint;
use crate::sol::{SolElement, SolParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KleinianError {
    #[error("matrix {0:?} has determinant {1}, expected 1")]
    NotUnimodular([i64; 4], i64),
    #[error("matrix {0:?} is not hyperbolic (|trace| = {1} <= 2)")]
    NotHyperbolic([i64; 4], i64),
    #[error("eigenbasis check failed with residual {0}")]
    Eigenbasis(f64),
    #[error("box touches the limit set (an imaginary interval contains 0)")]
    BoxTouchesLimitSet,
    #[error("box interval {0} is empty or not finite")]
    BadBox(usize),
    #[error("the diagonal eigenvalue is negative; the group is not a lattice of Sol in this form")]
    NegativeEigenvalue,
    #[error("point is not in the product of upper half-planes")]
    NotInUpperProduct,
    #[error("invalid clustering parameters: {0}")]
    BadClustering(&'static str),
}

pub type Result<T> = std::result::Result<T, KleinianError>;

/// `[[a, b], [c, d]]` stored row-major.
pub type IntMatrix2 = [i64; 4];

pub fn int_mul(x: &IntMatrix2, y: &IntMatrix2) -> IntMatrix2 {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

pub fn int_det(x: &IntMatrix2) -> i64 {
    x[0] * x[3] - x[1] * x[2]
}

pub fn int_trace(x: &IntMatrix2) -> i64 {
    x[0] + x[3]
}

/// Inverse of a determinant-one matrix.
pub fn int_inverse(x: &IntMatrix2) -> IntMatrix2 {
    [x[3], -x[1], -x[2], x[0]]
}

pub fn int_pow(x: &IntMatrix2, k: i64) -> IntMatrix2 {
    let base = if k < 0 { int_inverse(x) } else { *x };
    let mut out = [1, 0, 0, 1];
    for _ in 0..k.unsigned_abs() {
        out = int_mul(&out, &base);
    }
    out
}

fn int_apply(x: &IntMatrix2, v: [i64; 2]) -> [i64; 2] {
    [x[0] * v[0] + x[1] * v[1], x[2] * v[0] + x[3] * v[1]]
}

/// The element `[[A^k, (n, m)ᵀ], [0, 1]]` of `G_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ToralWord {
    pub k: i64,
    pub n: i64,
    pub m: i64,
}

impl ToralWord {
    pub const IDENTITY: ToralWord = ToralWord { k: 0, n: 0, m: 0 };

    pub fn new(k: i64, n: i64, m: i64) -> Self {
        Self { k, n, m }
    }

    pub fn word_length(&self) -> u64 {
        self.k.unsigned_abs() + self.n.unsigned_abs() + self.m.unsigned_abs()
    }
}

/// A hyperbolic `A ∈ SL(2, ℤ)` with its diagonalization `A P = P diag(λ, 1/λ)`,
/// `|λ| > 1`. The columns of `P` are sup-normalized eigenvectors with positive
/// leading entry; the columns of `P⁻¹` span the translation lattice of the
/// diagonalized group.
#[derive(Debug, Clone, PartialEq)]
pub struct ToralGroupSpec {
    a: IntMatrix2,
    lambda: f64,
    p: Matrix2<f64>,
    p_inv: Matrix2<f64>,
}

fn eigenvector(a: &IntMatrix2, mu: f64) -> Vector2<f64> {
    let [a0, a1, a2, a3] = a.map(|v| v as f64);
    let v = if a1 != 0.0 {
        Vector2::new(a1, mu - a0)
    } else {
        Vector2::new(mu - a3, a2)
    };
    let v = v / v.amax();
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        -v
    } else {
        v
    }
}

impl ToralGroupSpec {
    pub fn new(a: IntMatrix2) -> Result<Self> {
        let det = int_det(&a);
        if det != 1 {
            return Err(KleinianError::NotUnimodular(a, det));
        }
        let tr = int_trace(&a);
        if tr.abs() <= 2 {
            return Err(KleinianError::NotHyperbolic(a, tr));
        }
        let trf = tr as f64;
        let lambda = 0.5 * (trf + trf.signum() * (trf * trf - 4.0).sqrt());
        let (v1, v2) = (eigenvector(&a, lambda), eigenvector(&a, 1.0 / lambda));
        let p = Matrix2::from_columns(&[v1, v2]);
        let p_inv = p.try_inverse().ok_or(KleinianError::Eigenbasis(f64::INFINITY))?;
        let am = Matrix2::new(a[0] as f64, a[1] as f64, a[2] as f64, a[3] as f64);
        let residual = (am * p - p * Matrix2::new(lambda, 0.0, 0.0, 1.0 / lambda)).amax();
        if residual > 1e-12 * lambda.abs() {
            return Err(KleinianError::Eigenbasis(residual));
        }
        Ok(Self { a, lambda, p, p_inv })
    }

    pub fn a(&self) -> IntMatrix2 {
        self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eigenbasis(&self) -> Matrix2<f64> {
        self.p
    }

    /// Columns are the translation lattice of the diagonalized group.
    pub fn lattice_basis(&self) -> Matrix2<f64> {
        self.p_inv
    }

    /// `(k, v)(k', v') = (k + k', v + A^k v')`.
    pub fn compose(&self, g: &ToralWord, h: &ToralWord) -> ToralWord {
        let [dn, dm] = int_apply(&int_pow(&self.a, g.k), [h.n, h.m]);
        ToralWord::new(g.k + h.k, g.n + dn, g.m + dm)
    }

    pub fn inverse(&self, g: &ToralWord) -> ToralWord {
        let [n, m] = int_apply(&int_pow(&self.a, -g.k), [g.n, g.m]);
        ToralWord::new(-g.k, -n, -m)
    }

    pub fn integral_exact(&self, g: &ToralWord) -> [[i64; 3]; 3] {
        let ak = int_pow(&self.a, g.k);
        [[ak[0], ak[1], g.n], [ak[2], ak[3], g.m], [0, 0, 1]]
    }

    /// Translation part `P⁻¹ (n, m)` of the diagonalized element.
    pub fn translation(&self, g: &ToralWord) -> Vector2<f64> {
        self.p_inv * Vector2::new(g.n as f64, g.m as f64)
    }

    /// The conjugator `diag(P, 1)` taking diagonalized coordinates to integral ones.
    pub fn conjugator(&self) -> Matrix3<f64> {
        let p = self.p;
        Matrix3::new(p[(0, 0)], p[(0, 1)], 0.0, p[(1, 0)], p[(1, 1)], 0.0, 0.0, 0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Integral,
    Conjugated,
}

pub fn toral_element(spec: &ToralGroupSpec, g: &ToralWord, form: Form) -> Matrix3<f64> {
    match form {
        Form::Integral => {
            let e = spec.integral_exact(g);
            Matrix3::from_fn(|r, c| e[r][c] as f64)
        }
        Form::Conjugated => {
            let t = spec.translation(g);
            let up = spec.lambda.powi(g.k as i32);
            Matrix3::new(up, 0.0, t[0], 0.0, 1.0 / up, t[1], 0.0, 0.0, 1.0)
        }
    }
}

/// All `(k, n, m)` with `|k| + |n| + |m| ≤ radius`, lexicographically ordered.
pub fn word_ball(radius: u32) -> Vec<ToralWord> {
    let r = radius as i64;
    let mut out = Vec::new();
    for k in -r..=r {
        let rk = r - k.abs();
        for n in -rk..=rk {
            let rn = rk - n.abs();
            for m in -rn..=rn {
                out.push(ToralWord::new(k, n, m));
            }
        }
    }
    out
}

/// Limit of `g^j / ‖g^j‖` along `j = 2^i`, by repeated normalized squaring.
pub fn power_limit(g: &Matrix3<f64>, squarings: u32) -> Option<PseudoProjectiveMap> {
    let mut m = PseudoProjectiveMap::new(*g).ok()?;
    for _ in 0..squarings {
        let sq = m.matrix() * m.matrix();
        m = PseudoProjectiveMap::new(sq).ok()?;
    }
    Some(m)
}

pub const DEFAULT_SQUARINGS: u32 = 64;
pub const DEFAULT_CLUSTER_EPS: f64 = 1e-6;
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelLine {
    pub line: ProjectiveLine,
    /// Number of limit maps (over `g` and `g⁻¹` in the ball) with this kernel.
    pub cluster_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelPoint {
    pub point: ProjectivePoint,
    pub cluster_size: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LimitKernels {
    pub lines: Vec<KernelLine>,
    pub points: Vec<KernelPoint>,
    /// Distinct pseudo-projective limits found.
    pub clusters: usize,
}

/// Kernels of the pseudo-projective limits of `g^j` (`j → ±∞`) for every
/// nonidentity `g` in the word ball of the given radius, diagonalized form.
/// Limits closer than `cluster_eps` are merged; singular values below
/// `rank_tol` count as zero.
pub fn pseudo_limit_kernels(
    spec: &ToralGroupSpec,
    radius: u32,
    cluster_eps: f64,
    rank_tol: f64,
) -> Result<LimitKernels> {
    if !(cluster_eps > 0.0) {
        return Err(KleinianError::BadClustering("cluster_eps must be positive"));
    }
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(KleinianError::BadClustering("rank_tol must lie in (0, 1)"));
    }
    let mut clusters: Vec<(PseudoProjectiveMap, usize)> = Vec::new();
    for w in word_ball(radius) {
        if w == ToralWord::IDENTITY {
            continue;
        }
        for g in [w, spec.inverse(&w)] {
            let Some(limit) = power_limit(&toral_element(spec, &g, Form::Conjugated), DEFAULT_SQUARINGS)
            else {
                continue;
            };
            match clusters.iter_mut().find(|(c, _)| c.distance(&limit) < cluster_eps) {
                Some((_, count)) => *count += 1,
                None => clusters.push((limit, 1)),
            }
        }
    }

    let mut out = LimitKernels {
        clusters: clusters.len(),
        ..Default::default()
    };
    for (limit, count) in &clusters {
        match limit.kernel(rank_tol) {
            Kernel::Line(line) => {
                match out.lines.iter_mut().find(|k| k.line.distance(&line) < cluster_eps) {
                    Some(k) => k.cluster_size += count,
                    None => out.lines.push(KernelLine {
                        line,
                        cluster_size: *count,
                    }),
                }
            }
            Kernel::Point(point) => {
                match out.points.iter_mut().find(|k| k.point.distance(&point) < cluster_eps) {
                    Some(k) => k.cluster_size += count,
                    None => out.points.push(KernelPoint {
                        point,
                        cluster_size: *count,
                    }),
                }
            }
            Kernel::Empty => {}
        }
    }
    let key = |d: [Complex64; 3]| d.map(|c| (c.re, c.im));
    out.lines
        .sort_by(|a, b| key(a.line.dual()).partial_cmp(&key(b.line.dual())).expect("finite"));
    out.points.sort_by(|a, b| {
        key(a.point.coords())
            .partial_cmp(&key(b.point.coords()))
            .expect("finite")
    });
    Ok(out)
}

/// Where a limit line sits in the description `ℓ∞ ∪ {z1 = r z3} ∪ {z2 = r z3}`, `r ∈ ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LimitLineKind {
    AtInfinity,
    FirstPencil(f64),
    SecondPencil(f64),
}

pub fn classify_limit_line(line: &ProjectiveLine, tol: f64) -> Option<LimitLineKind> {
    let [l1, l2, l3] = line.dual();
    let small = |c: Complex64| c.norm() <= tol;
    if small(l1) && small(l2) {
        return Some(LimitLineKind::AtInfinity);
    }
    if small(l2) {
        let r = -l3 / l1;
        return (r.im.abs() <= tol).then_some(LimitLineKind::FirstPencil(r.re));
    }
    if small(l1) {
        let r = -l3 / l2;
        return (r.im.abs() <= tol).then_some(LimitLineKind::SecondPencil(r.re));
    }
    None
}

/// `{z1 = 0}`, `{z1 = z3}`, `{z2 = 0}`, `{z2 = z3}` and `{z3 = 0}`.
pub fn analytic_limit_lines() -> Vec<ProjectiveLine> {
    [
        [1.0, 0.0, 0.0],
        [1.0, 0.0, -1.0],
        [0.0, 1.0, 0.0],
        [0.0, 1.0, -1.0],
        [0.0, 0.0, 1.0],
    ]
    .iter()
    .map(|d| ProjectiveLine::real(d[0], d[1], d[2]).expect("nonzero"))
    .collect()
}

/// The four components `ℍ±×ℍ±` of the discontinuity region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Component {
    pub first_upper: bool,
    pub second_upper: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Omega(Component),
    Limit,
}

/// Tolerance for deciding that an imaginary part or `z3` vanishes.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Membership of a point (diagonalized coordinates) in the discontinuity region
/// `{z3 ≠ 0, Im(z1/z3) ≠ 0, Im(z2/z3) ≠ 0}` or its complement, the limit set.
pub fn kulkarni_membership(_spec: &ToralGroupSpec, p: &ProjectivePoint) -> Membership {
    if p.coords()[2].norm() <= MEMBERSHIP_TOL {
        return Membership::Limit;
    }
    let (w1, w2) = p.to_affine().expect("z3 ≠ 0");
    if w1.im.abs() <= MEMBERSHIP_TOL || w2.im.abs() <= MEMBERSHIP_TOL {
        return Membership::Limit;
    }
    Membership::Omega(Component {
        first_upper: w1.im > 0.0,
        second_upper: w2.im > 0.0,
    })
}

/// A closed box `[x1] × [y1] × [x2] × [y2]` in the affine chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Box4 {
    pub x1: [f64; 2],
    pub y1: [f64; 2],
    pub x2: [f64; 2],
    pub y2: [f64; 2],
}

impl Box4 {
    pub fn new(x1: [f64; 2], y1: [f64; 2], x2: [f64; 2], y2: [f64; 2]) -> Self {
        Self { x1, y1, x2, y2 }
    }

    fn intervals(&self) -> [[f64; 2]; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn validate(&self) -> Result<()> {
        for (i, iv) in self.intervals().iter().enumerate() {
            if !(iv[0].is_finite() && iv[1].is_finite() && iv[0] <= iv[1]) {
                return Err(KleinianError::BadBox(i));
            }
        }
        for iv in [self.y1, self.y2] {
            if iv[0] <= 0.0 && iv[1] >= 0.0 {
                return Err(KleinianError::BoxTouchesLimitSet);
            }
        }
        Ok(())
    }

    pub fn corners(&self) -> Vec<[f64; 4]> {
        let iv = self.intervals();
        (0..16)
            .map(|mask: usize| {
                let mut c = [0.0; 4];
                for (i, ci) in c.iter_mut().enumerate() {
                    *ci = iv[i][(mask >> i) & 1];
                }
                c
            })
            .collect()
    }
}

/// Outward rounding for interval overlap tests.
pub const OVERLAP_SLACK: f64 = 1e-12;

fn overlaps(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] <= b[1] + OVERLAP_SLACK && b[0] <= a[1] + OVERLAP_SLACK
}

fn affine_image(iv: [f64; 2], scale: f64, shift: f64) -> [f64; 2] {
    let (p, q) = (iv[0] * scale + shift, iv[1] * scale + shift);
    [p.min(q), p.max(q)]
}

/// Whether `g(box) ∩ box ≠ ∅` for the diagonalized action
/// `(z1, z2) ↦ (λ^k z1 + u, λ^{-k} z2 + v)`, which maps boxes to boxes.
pub fn box_meets(spec: &ToralGroupSpec, g: &ToralWord, b: &Box4) -> bool {
    let up = spec.lambda.powi(g.k as i32);
    let down = 1.0 / up;
    let t = spec.translation(g);
    overlaps(affine_image(b.x1, up, t[0]), b.x1)
        && overlaps(affine_image(b.y1, up, 0.0), b.y1)
        && overlaps(affine_image(b.x2, down, t[1]), b.x2)
        && overlaps(affine_image(b.y2, down, 0.0), b.y2)
}

/// The same test by pushing the corners through the 3×3 projective matrix and
/// taking the bounding box of their affine images.
pub fn box_meets_by_matrix(spec: &ToralGroupSpec, g: &ToralWord, b: &Box4) -> bool {
    let m = toral_element(spec, g, Form::Conjugated);
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    for c in b.corners() {
        let p = ProjectivePoint::affine(Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3]))
            .and_then(|p| p.apply(&m))
            .ok()
            .and_then(|p| p.to_affine());
        let Some((w1, w2)) = p else { return false };
        for (i, v) in [w1.re, w1.im, w2.re, w2.im].into_iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    b.intervals()
        .iter()
        .enumerate()
        .all(|(i, iv)| overlaps([lo[i], hi[i]], *iv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuityCount {
    pub count: usize,
    pub elements: Vec<ToralWord>,
}

/// Elements `g` of the word ball with `g(box) ∩ box ≠ ∅`.
pub fn proper_discontinuity_count(spec: &ToralGroupSpec, b: &Box4, radius: u32) -> Result<DiscontinuityCount> {
    b.validate()?;
    let elements: Vec<ToralWord> = word_ball(radius)
        .into_iter()
        .filter(|g| box_meets(spec, g, b))
        .collect();
    Ok(DiscontinuityCount {
        count: elements.len(),
        elements,
    })
}

/// Brute-force counterpart of [`proper_discontinuity_count`] through
/// [`box_meets_by_matrix`].
pub fn proper_discontinuity_brute_force(spec: &ToralGroupSpec, b: &Box4, radius: u32) -> Result<DiscontinuityCount> {
    b.validate()?;
    let elements: Vec<ToralWord> = word_ball(radius)
        .into_iter()
        .filter(|g| box_meets_by_matrix(spec, g, b))
        .collect();
    Ok(DiscontinuityCount {
        count: elements.len(),
        elements,
    })
}

/// `(k, n, m) ↦ (k ln λ, P⁻¹(n, m))`, a homomorphism into Sol in standard form.
pub fn sol_lattice_embed(spec: &ToralGroupSpec, g: &ToralWord) -> Result<SolElement> {
    if spec.lambda <= 0.0 {
        return Err(KleinianError::NegativeEigenvalue);
    }
    let t = spec.translation(g);
    Ok(SolElement::new(g.k as f64 * spec.lambda.ln(), t[0], t[1]))
}

/// Parameters under which [`sol_lattice_embed`] intertwines the actions.
pub fn embedding_params() -> SolParams {
    SolParams::standard()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IsoTarget {
    B,
    BInverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IsoResult {
    /// `U A U⁻¹ = target`, verified in integer arithmetic.
    Found { u: IntMatrix2, target: IsoTarget },
    /// No conjugator with entries in the searched range; inconclusive.
    NotFound,
    /// A conjugacy invariant differs; no conjugator exists.
    Refuted,
}

pub const DEFAULT_ISO_BOUND: i64 = 50;

fn check_hyperbolic(a: &IntMatrix2) -> Result<()> {
    let det = int_det(a);
    if det != 1 {
        return Err(KleinianError::NotUnimodular(*a, det));
    }
    if int_trace(a).abs() <= 2 {
        return Err(KleinianError::NotHyperbolic(*a, int_trace(a)));
    }
    Ok(())
}

fn verify_conjugator(u: &IntMatrix2, a: &IntMatrix2, t: &IntMatrix2) -> bool {
    int_det(u).abs() == 1 && int_mul(u, a) == int_mul(t, u)
}

/// Looks for `U ∈ GL(2, ℤ)` with entries in `[−bound, bound]` and
/// `U A U⁻¹ ∈ {B, B⁻¹}`. The top row of `U` is enumerated and the bottom row
/// solved from the linear system `U A = T U`.
pub fn lattice_iso_test(a: &IntMatrix2, b: &IntMatrix2, bound: i64) -> Result<IsoResult> {
    check_hyperbolic(a)?;
    check_hyperbolic(b)?;
    if int_trace(a) != int_trace(b) {
        return Ok(IsoResult::Refuted);
    }
    let targets = [(IsoTarget::B, *b), (IsoTarget::BInverse, int_inverse(b))];
    let id = [1, 0, 0, 1];
    for (target, t) in &targets {
        if verify_conjugator(&id, a, t) {
            return Ok(IsoResult::Found { u: id, target: *target });
        }
    }
    for p in -bound..=bound {
        for q in -bound..=bound {
            for (target, t) in &targets {
                // hyperbolic T has t[1] ≠ 0
                let (nr, ns) = (p * (a[0] - t[0]) + q * a[2], p * a[1] + q * (a[3] - t[0]));
                if nr % t[1] != 0 || ns % t[1] != 0 {
                    continue;
                }
                let (r, s) = (nr / t[1], ns / t[1]);
                if r.abs() > bound || s.abs() > bound {
                    continue;
                }
                let u = [p, q, r, s];
                if verify_conjugator(&u, a, t) {
                    return Ok(IsoResult::Found { u, target: *target });
                }
            }
        }
    }
    Ok(IsoResult::NotFound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// The element taking `z` to the representative.
    pub reduce: ToralWord,
    /// Its inverse, taking the representative back to `z`.
    pub reassemble: ToralWord,
    pub representative: ProductPoint,
}

/// Applies the diagonalized action of `g` to a point of ℍ×ℍ.
pub fn toral_act(spec: &ToralGroupSpec, g: &ToralWord, z: &ProductPoint) -> Result<ProductPoint> {
    let up = spec.lambda.powi(g.k as i32);
    let t = spec.translation(g);
    let [x1, y1, x2, y2] = z.coords();
    ProductPoint::new(up * x1 + t[0], up * y1, x2 / up + t[1], y2 / up)
        .map_err(|_| KleinianError::NotInUpperProduct)
}

/// Moves `z` into `{1 ≤ y1 < λ} × {P (x1, x2) ∈ [0, 1)²}`.
pub fn fundamental_domain_reduce(spec: &ToralGroupSpec, z: &ProductPoint) -> Result<Reduction> {
    if spec.lambda <= 0.0 {
        return Err(KleinianError::NegativeEigenvalue);
    }
    let lam = spec.lambda;
    let mut k = -(z.z1.y().ln() / lam.ln()).floor() as i64;
    // the logarithm may round across an integer
    while lam.powi(k as i32) * z.z1.y() < 1.0 {
        k += 1;
    }
    while lam.powi(k as i32) * z.z1.y() >= lam {
        k -= 1;
    }
    let scaled = toral_act(spec, &ToralWord::new(k, 0, 0), z)?;
    let coeff = spec.p * Vector2::new(scaled.z1.x(), scaled.z2.x());
    let mut nm = [coeff[0].floor() as i64, coeff[1].floor() as i64];
    let mut reduce;
    let mut representative;
    // subtracting the lattice vector can round onto the far wall; nudge once
    for _ in 0..2 {
        reduce = spec.compose(&ToralWord::new(0, -nm[0], -nm[1]), &ToralWord::new(k, 0, 0));
        representative = toral_act(spec, &reduce, z)?;
        let c = spec.p * Vector2::new(representative.z1.x(), representative.z2.x());
        let mut moved = false;
        for i in 0..2 {
            if c[i] >= 1.0 {
                nm[i] += 1;
                moved = true;
            } else if c[i] < 0.0 {
                nm[i] -= 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    reduce = spec.compose(&ToralWord::new(0, -nm[0], -nm[1]), &ToralWord::new(k, 0, 0));
    representative = toral_act(spec, &reduce, z)?;
    Ok(Reduction {
        reduce,
        reassemble: spec.inverse(&reduce),
        representative,
    })
}

/// Sorted set of words, used to compare element sets independent of order.
pub fn word_set(words: &[ToralWord]) -> BTreeSet<ToralWord> {
    words.iter().copied().collect()
}
