//! The Heisenberg group and its free action on ℂ×ℍ: orbit embeddings, the unit
//! normal, the product decomposition `Heis×ℝ ≅ ℂ×ℍ`, leaf metrics and
//! separation, integer sublattices with their fundamental boxes, and the
//! factored proper-discontinuity count.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{Matrix3, Matrix4x3, Vector3, Vector4};
use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{self, GeometryError, MetricSpec, MixedPoint, TangentVector4};
use crate::search::{grid_then_descent, GridAxis, SearchError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeisError {
    #[error("scale parameter must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("sublattice index must be at least 1")]
    BadSublattice,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub type Result<T> = std::result::Result<T, HeisError>;

/// `(a, b, c)` standing for `[[1, a, c], [0, 1, b], [0, 0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HeisElement {
    pub const IDENTITY: HeisElement = HeisElement {
        a: 0.0,
        b: 0.0,
        c: 0.0,
    };

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// `(a, b, c) * (a', b', c') = (a + a', b + b', c + c' + a b')`.
    pub fn mul(&self, h: &HeisElement) -> HeisElement {
        HeisElement {
            a: self.a + h.a,
            b: self.b + h.b,
            c: self.c + h.c + self.a * h.b,
        }
    }

    pub fn inv(&self) -> HeisElement {
        HeisElement {
            a: -self.a,
            b: -self.b,
            c: -self.c + self.a * self.b,
        }
    }

    /// `g h g⁻¹ h⁻¹`.
    pub fn commutator(&self, h: &HeisElement) -> HeisElement {
        self.mul(h).mul(&self.inv()).mul(&h.inv())
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(1.0, self.a, self.c, 0.0, 1.0, self.b, 0.0, 0.0, 1.0)
    }

    pub fn sup_distance(&self, other: &HeisElement) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

pub fn heis_mul(g: &HeisElement, h: &HeisElement) -> HeisElement {
    g.mul(h)
}

pub fn heis_inv(g: &HeisElement) -> HeisElement {
    g.inv()
}

pub fn heis_commutator(g: &HeisElement, h: &HeisElement) -> HeisElement {
    g.commutator(h)
}

/// The standard generators `m = (1,0,0)`, `n = (0,1,0)` and the central `k = (0,0,1)`.
pub fn standard_generators() -> [HeisElement; 3] {
    [
        HeisElement::new(1.0, 0.0, 0.0),
        HeisElement::new(0.0, 1.0, 0.0),
        HeisElement::new(0.0, 0.0, 1.0),
    ]
}

/// Symplectic coordinates `(p, q, t)` with the product
/// `(v, t)*(w, s) = (v + w, t + s + ω(v, w))`, `ω(v, w) = (p q' − p' q)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticElement {
    pub p: f64,
    pub q: f64,
    pub t: f64,
}

impl SymplecticElement {
    pub fn new(p: f64, q: f64, t: f64) -> Self {
        Self { p, q, t }
    }

    pub fn mul(&self, o: &SymplecticElement) -> SymplecticElement {
        SymplecticElement {
            p: self.p + o.p,
            q: self.q + o.q,
            t: self.t + o.t + symplectic_form(self.p, self.q, o.p, o.q),
        }
    }
}

pub fn symplectic_form(p: f64, q: f64, p1: f64, q1: f64) -> f64 {
    0.5 * (p * q1 - p1 * q)
}

/// `[[1, p, t + pq/2], [0, 1, q], [0, 0, 1]]`.
pub fn heis_from_symplectic(p: f64, q: f64, t: f64) -> Matrix3<f64> {
    Matrix3::new(1.0, p, t + 0.5 * p * q, 0.0, 1.0, q, 0.0, 0.0, 1.0)
}

/// `(a, b, c)·(z, w) = (z + a w + c, w + b)`.
pub fn heis_act(g: &HeisElement, m: &MixedPoint) -> MixedPoint {
    let w = m.w.to_complex();
    MixedPoint {
        z: m.z + g.a * w + g.c,
        w: geometry::UpperHalfPoint::new(m.w.x() + g.b, m.w.y()).expect("imaginary part unchanged"),
    }
}

/// Jacobian of `g ↦ g·m` in `(Re z, Im z, Re w, Im w)` against `(a, b, c)`;
/// it only depends on `w = p + q i`.
pub fn heis_leaf_jacobian(m: &MixedPoint, _g: &HeisElement) -> Matrix4x3<f64> {
    let (p, q) = (m.w.x(), m.w.y());
    Matrix4x3::new(p, 0.0, 1.0, q, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
}

/// `q e4`, the unit normal of the orbit through `m` in the Euclidean × hyperbolic metric.
pub fn heis_normal_field(m: &MixedPoint) -> TangentVector4 {
    TangentVector4::new(*m, Vector4::new(0.0, 0.0, 0.0, m.w.y()))
}

/// Integral curve of the normal field through `m`: `t ↦ (z, p + e^t q i)`.
pub fn heis_normal_curve(m: &MixedPoint, t: f64) -> MixedPoint {
    MixedPoint {
        z: m.z,
        w: geometry::UpperHalfPoint::new(m.w.x(), m.w.y() * t.exp()).expect("positive"),
    }
}

/// `Ψ_H(g, s) = g·(0, e^s i) = (a e^s i + c, b + e^s i)`.
pub fn heis_rectify(g: &HeisElement, s: f64) -> Result<MixedPoint> {
    let base = MixedPoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, s.exp()))?;
    Ok(heis_act(g, &base))
}

/// Inverse of [`heis_rectify`].
pub fn heis_rectify_inverse(m: &MixedPoint) -> (HeisElement, f64) {
    let q = m.w.y();
    (HeisElement::new(m.z.im / q, m.w.x(), m.z.re), q.ln())
}

/// Metric induced on the orbit of `(0, y0 i)` in the chart `(p, q, t) = (a, b, c)`.
pub fn heis_pullback_metric(y0: f64) -> Result<Matrix3<f64>> {
    let d = MetricSpec::HeisPullback { y0 }.diagonal(&[0.0, 0.0, 0.0])?;
    Ok(Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])))
}

/// Product distance between `Ψ_H(g, s0)` and `Ψ_H(h, s1)`.
pub fn heis_cross_leaf_distance(g: &HeisElement, s0: f64, h: &HeisElement, s1: f64) -> Result<f64> {
    Ok(geometry::mixed_distance(
        &heis_rectify(g, s0)?,
        &heis_rectify(h, s1)?,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeisSeparationEstimate {
    pub distance: f64,
    pub first: HeisElement,
    pub second: HeisElement,
    pub evaluations: usize,
}

/// Minimizes the distance between the leaves `Heis×{s0}` and `Heis×{s1}`.
/// Translations of `z` and real translations of `w` are isometries preserving
/// both leaves, so the first point is pinned at `b = c = 0`.
pub fn heis_leaf_separation_numeric(s0: f64, s1: f64, budget: usize) -> Result<HeisSeparationEstimate> {
    let objective = |v: &[f64]| {
        heis_cross_leaf_distance(
            &HeisElement::new(v[0], 0.0, 0.0),
            s0,
            &HeisElement::new(v[1], v[2], v[3]),
            s1,
        )
        .unwrap_or(f64::INFINITY)
    };
    let axes = [
        GridAxis::new(-3.0, 3.0, 13),
        GridAxis::new(-3.0, 3.0, 13),
        GridAxis::new(-5.0, 5.0, 11),
        GridAxis::new(-5.0, 5.0, 11),
    ];
    let m = grid_then_descent(objective, &axes, 1e-6, budget)?;
    Ok(HeisSeparationEstimate {
        distance: m.value,
        first: HeisElement::new(m.argmin[0], 0.0, 0.0),
        second: HeisElement::new(m.argmin[1], m.argmin[2], m.argmin[3]),
        evaluations: m.evaluations,
    })
}

/// The sublattices `{(n i, n j, n² k) : i, j, k ∈ ℤ}` of `Heis_ℤ` (`n = 1` is
/// `Heis_ℤ` itself), plus the trivial group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeisLattice {
    Trivial,
    Scaled(u32),
}

impl HeisLattice {
    pub const INTEGER: HeisLattice = HeisLattice::Scaled(1);

    pub fn validate(&self) -> Result<()> {
        match self {
            HeisLattice::Scaled(0) => Err(HeisError::BadSublattice),
            _ => Ok(()),
        }
    }

    /// Side lengths of the fundamental box `[0, n) × [0, n) × [0, n²)`.
    pub fn periods(&self) -> Option<(f64, f64)> {
        match *self {
            HeisLattice::Trivial => None,
            HeisLattice::Scaled(n) => Some((n as f64, (n as f64) * (n as f64))),
        }
    }

    /// Generators `(n,0,0)`, `(0,n,0)`, `(0,0,n²)`.
    pub fn generators(&self) -> Vec<HeisElement> {
        match self.periods() {
            None => vec![],
            Some((n, n2)) => vec![
                HeisElement::new(n, 0.0, 0.0),
                HeisElement::new(0.0, n, 0.0),
                HeisElement::new(0.0, 0.0, n2),
            ],
        }
    }

    pub fn contains(&self, g: &HeisElement) -> bool {
        match self.periods() {
            None => g.is_identity(),
            Some((n, n2)) => {
                let on = |x: f64, p: f64| (x / p).fract() == 0.0 && x.is_finite();
                on(g.a, n) && on(g.b, n) && on(g.c, n2)
            }
        }
    }
}

/// `x = p·k + r` with `k` integral and `r ∈ [0, p)`.
fn split_mod(x: f64, p: f64) -> (f64, f64) {
    let mut k = (x / p).floor();
    let mut r = x - k * p;
    // floating rounding can land exactly on the upper end
    if r >= p {
        r -= p;
        k += 1.0;
    }
    if r < 0.0 {
        r += p;
        k -= 1.0;
        if r >= p {
            r = 0.0;
        }
    }
    (k * p, r)
}

/// Writes `g = L * r` with `L` in the lattice and `r` in the fundamental box.
/// The horizontal parts are reduced first since the central part of `r`
/// depends on them.
pub fn heis_reduce(lattice: &HeisLattice, g: &HeisElement) -> (HeisElement, HeisElement) {
    let Some((n, n2)) = lattice.periods() else {
        return (HeisElement::IDENTITY, *g);
    };
    let (la, ra) = split_mod(g.a, n);
    let (lb, rb) = split_mod(g.b, n);
    let (lc, rc) = split_mod(g.c - la * rb, n2);
    (HeisElement::new(la, lb, lc), HeisElement::new(ra, rb, rc))
}

/// [`heis_reduce`] for `Heis_ℤ`, whose fundamental box is the unit cube.
pub fn heis_reduce_mod_integer_lattice(g: &HeisElement) -> (HeisElement, HeisElement) {
    heis_reduce(&HeisLattice::INTEGER, g)
}

/// An element of `Heis_ℤ` in exact integer form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntHeis {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl IntHeis {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn mul(&self, h: &IntHeis) -> IntHeis {
        IntHeis {
            a: self.a + h.a,
            b: self.b + h.b,
            c: self.c + h.c + self.a * h.b,
        }
    }

    pub fn to_element(&self) -> HeisElement {
        HeisElement::new(self.a as f64, self.b as f64, self.c as f64)
    }
}

/// All elements of word length at most `n` in the generators `(±1,0,0)`,
/// `(0,±1,0)`, `(0,0,±1)`, in lexicographic order.
pub fn heis_word_ball(n: usize) -> Vec<IntHeis> {
    let gens = [
        IntHeis::new(1, 0, 0),
        IntHeis::new(-1, 0, 0),
        IntHeis::new(0, 1, 0),
        IntHeis::new(0, -1, 0),
        IntHeis::new(0, 0, 1),
        IntHeis::new(0, 0, -1),
    ];
    let id = IntHeis::new(0, 0, 0);
    let mut seen = BTreeSet::from([id]);
    let mut queue = VecDeque::from([(id, 0usize)]);
    while let Some((g, len)) = queue.pop_front() {
        if len == n {
            continue;
        }
        for s in &gens {
            let h = g.mul(s);
            if seen.insert(h) {
                queue.push_back((h, len + 1));
            }
        }
    }
    seen.into_iter().collect()
}

/// Closed box `[a] × [b] × [c]` in the group coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisBox {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
}

impl HeisBox {
    pub fn new(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Self {
        Self { a, b, c }
    }

    pub fn unit_cube() -> Self {
        Self::new([0.0, 1.0], [0.0, 1.0], [0.0, 1.0])
    }

    pub fn contains(&self, g: &HeisElement, slack: f64) -> bool {
        let inside = |x: f64, r: [f64; 2]| x >= r[0] - slack && x <= r[1] + slack;
        inside(g.a, self.a) && inside(g.b, self.b) && inside(g.c, self.c)
    }
}

/// Outward slack for closed-interval comparisons.
const OVERLAP_SLACK: f64 = 1e-12;

fn intersect(x: [f64; 2], y: [f64; 2]) -> Option<[f64; 2]> {
    let lo = x[0].max(y[0]);
    let hi = x[1].min(y[1]);
    (lo <= hi + OVERLAP_SLACK).then_some([lo, hi.max(lo)])
}

fn shift(x: [f64; 2], by: f64) -> [f64; 2] {
    [x[0] + by, x[1] + by]
}

fn scale(x: [f64; 2], by: f64) -> [f64; 2] {
    let (p, q) = (x[0] * by, x[1] * by);
    [p.min(q), p.max(q)]
}

/// Whether `g·K ∩ K ≠ ∅` for the left action of `Heis` on itself.
///
/// `g * (a, b, c) = (a + ga, b + gb, c + gc + ga·b)`; the first two conditions
/// pick the admissible `b`, and then the central coordinates of `K` and `g·K`
/// meet iff `gc + ga·b` lands in `[−w, w]` for `w` the width of the `c`-range.
pub fn heis_box_meets(g: &HeisElement, k: &HeisBox) -> bool {
    if intersect(k.a, shift(k.a, g.a)).is_none() {
        return false;
    }
    let Some(bs) = intersect(k.b, shift(k.b, -g.b)) else {
        return false;
    };
    let w = k.c[1] - k.c[0];
    let reach = shift(scale(bs, g.a), g.c);
    intersect(reach, [-w, w]).is_some()
}

/// Whether `g·(Ψ_H(K, s)) ∩ Ψ_H(K, s) ≠ ∅`, evaluated in ℂ×ℍ coordinates.
///
/// `Ψ_H(K, s)` is `{(c + a q i, b + q i)}` with `q = e^s`; the action shifts
/// `Re z` by `ga·Re w + gc`, `Im z` by `ga·q` and `Re w` by `gb`, and keeps `Im w`.
pub fn heis_leaf_image_meets(g: &HeisElement, k: &HeisBox, s: f64) -> bool {
    let q = s.exp();
    let im_z = scale(k.a, q);
    if intersect(im_z, shift(im_z, g.a * q)).is_none() {
        return false;
    }
    // Re w of a point whose image stays in the slab
    let Some(re_w) = intersect(k.b, shift(k.b, -g.b)) else {
        return false;
    };
    // Re z = c moves by ga·Re w + gc; some c in the range must stay in it
    let moved = shift(scale(re_w, g.a), g.c);
    let w = k.c[1] - k.c[0];
    intersect(moved, [-w, w]).is_some()
}

/// Counts for the factored action `g·(x, y) = (g·x, y)` on `Heis × ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactoredCounts {
    /// `#{g : g K ∩ K ≠ ∅}` computed in the group.
    pub count_x: usize,
    /// `#{g : g (K×{y}) ∩ (K×{y}) ≠ ∅}` computed on the leaf at height `y` in ℂ×ℍ.
    pub count_xy: usize,
}

pub fn factored_proper_discontinuity_check(
    sample: &[HeisElement],
    k: &HeisBox,
    y: f64,
) -> FactoredCounts {
    FactoredCounts {
        count_x: sample.iter().filter(|g| heis_box_meets(g, k)).count(),
        count_xy: sample
            .iter()
            .filter(|g| heis_leaf_image_meets(g, k, y))
            .count(),
    }
}

/// Brute-force count of `g` for which some grid point `x` of `K` (with
/// `resolution` cells per side) has `g x ∈ K`. Exact for integral `g` and a box
/// with corners on the grid, because the intersection is then a box whose
/// corners are grid points.
pub fn brute_force_meet_count(sample: &[HeisElement], k: &HeisBox, resolution: usize) -> usize {
    let grid = |r: [f64; 2]| -> Vec<f64> {
        (0..=resolution)
            .map(|i| r[0] + (r[1] - r[0]) * i as f64 / resolution as f64)
            .collect()
    };
    let (ga, gb, gc) = (grid(k.a), grid(k.b), grid(k.c));
    sample
        .iter()
        .filter(|g| {
            ga.iter().any(|&a| {
                gb.iter().any(|&b| {
                    gc.iter()
                        .any(|&c| k.contains(&g.mul(&HeisElement::new(a, b, c)), OVERLAP_SLACK))
                })
            })
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_residual, metric_inner, pullback};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0x4e15)
    }

    fn random_element(r: &mut ChaCha8Rng) -> HeisElement {
        HeisElement::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0))
    }

    fn random_point(r: &mut ChaCha8Rng) -> MixedPoint {
        MixedPoint::new(
            Complex64::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)),
            Complex64::new(r.gen_range(-3.0..3.0), r.gen_range(-2.0f64..2.0).exp()),
        )
        .unwrap()
    }

    #[test]
    fn group_law_examples() {
        let [m, n, k] = standard_generators();
        assert_eq!(m.mul(&n), HeisElement::new(1.0, 1.0, 1.0));
        assert_eq!(heis_commutator(&m, &n), k);
        // the presentation with [m, n] = k⁴ does not match the law
        assert_ne!(heis_commutator(&m, &n), HeisElement::new(0.0, 0.0, 4.0));
    }

    #[test]
    fn group_axioms_exact_on_integers() {
        let mut r = rng();
        for _ in 0..500 {
            let el = |r: &mut ChaCha8Rng| {
                HeisElement::new(r.gen_range(-50..50) as f64, r.gen_range(-50..50) as f64, r.gen_range(-50..50) as f64)
            };
            let (g, h, k) = (el(&mut r), el(&mut r), el(&mut r));
            assert_eq!(g.mul(&h).mul(&k), g.mul(&h.mul(&k)));
            assert_eq!(g.mul(&g.inv()), HeisElement::IDENTITY);
            assert_eq!(g.inv().mul(&g), HeisElement::IDENTITY);
            let central = HeisElement::new(0.0, 0.0, k.c);
            assert_eq!(g.mul(&central), central.mul(&g));
            let comm = g.commutator(&h);
            assert_eq!(comm.a, 0.0);
            assert_eq!(comm.b, 0.0);
            assert_eq!(comm.mul(&k), k.mul(&comm));
        }
        for _ in 0..500 {
            let g = random_element(&mut r);
            assert!(g.mul(&g.inv()).sup_distance(&HeisElement::IDENTITY) < 1e-14 * 10.0);
        }
    }

    #[test]
    fn matrix_is_a_homomorphism() {
        let mut r = rng();
        for _ in 0..500 {
            let (g, h) = (random_element(&mut r), random_element(&mut r));
            assert!((g.mul(&h).matrix() - g.matrix() * h.matrix()).amax() < 1e-14);
        }
    }

    #[test]
    fn symplectic_representation() {
        assert_eq!(heis_from_symplectic(0.0, 0.0, 0.0), Matrix3::identity());
        assert_eq!(
            heis_from_symplectic(1.0, 1.0, 0.0),
            Matrix3::new(1.0, 1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0)
        );
        let mut r = rng();
        for _ in 0..500 {
            let u = SymplecticElement::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let v = SymplecticElement::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let w = u.mul(&v);
            let lhs = heis_from_symplectic(w.p, w.q, w.t);
            let rhs = heis_from_symplectic(u.p, u.q, u.t) * heis_from_symplectic(v.p, v.q, v.t);
            assert!((lhs - rhs).amax() < 1e-14 * 10.0);
        }
    }

    #[test]
    fn action_examples_axiom_and_freeness() {
        let m0 = MixedPoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(heis_act(&HeisElement::IDENTITY, &m0), m0);
        let moved = heis_act(&HeisElement::new(1.0, 0.0, 0.0), &m0);
        assert_eq!(moved.coords(), [0.0, 1.0, 0.0, 1.0]);
        let mut r = rng();
        for _ in 0..1000 {
            let (g, h, m) = (random_element(&mut r), random_element(&mut r), random_point(&mut r));
            let lhs = heis_act(&g.mul(&h), &m);
            let rhs = heis_act(&g, &heis_act(&h, &m));
            assert!(lhs.sup_distance(&rhs) < 1e-12);
            assert_eq!(heis_act(&g, &m).w.y(), m.w.y());
            assert!(heis_act(&g, &m).sup_distance(&m) > 0.0);
        }
    }

    #[test]
    fn jacobian_display_rank_and_fd() {
        let m0 = MixedPoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
        let j = heis_leaf_jacobian(&m0, &HeisElement::IDENTITY);
        assert_eq!(j, Matrix4x3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0));
        let mut r = rng();
        let h = 1e-5;
        for _ in 0..1000 {
            let (g, m) = (random_element(&mut r), random_point(&mut r));
            let j = heis_leaf_jacobian(&m, &g);
            let sv = j.singular_values();
            assert!(sv.min() / sv.max() > 1e-10);
            for col in 0..3 {
                let mut e = [0.0; 3];
                e[col] = h;
                let plus = heis_act(&HeisElement::new(g.a + e[0], g.b + e[1], g.c + e[2]), &m).coords();
                let minus = heis_act(&HeisElement::new(g.a - e[0], g.b - e[1], g.c - e[2]), &m).coords();
                for row in 0..4 {
                    assert!(((plus[row] - minus[row]) / (2.0 * h) - j[(row, col)]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn normal_field_is_unit_and_orthogonal() {
        let metric = MetricSpec::EuclideanTimesHyperbolic;
        let mut r = rng();
        for _ in 0..1000 {
            let m = random_point(&mut r);
            let x = heis_normal_field(&m);
            assert!((metric_inner(&metric, &x, &x).unwrap() - 1.0).abs() < 1e-12);
            let (p, q) = (m.w.x(), m.w.y());
            for t in [
                Vector4::new(p, q, 0.0, 0.0),
                Vector4::new(0.0, 0.0, 1.0, 0.0),
                Vector4::new(1.0, 0.0, 0.0, 0.0),
            ] {
                let v = TangentVector4::new(m, t);
                assert!(metric_inner(&metric, &x, &v).unwrap().abs() < 1e-12);
            }
            let curve = |t: f64| heis_normal_curve(&m, t).coords().to_vec();
            let res = geodesic_residual(&metric, curve, r.gen_range(-1.0..1.0), 1e-4).unwrap();
            assert!(res < 1e-6, "{res}");
        }
        let at_i = MixedPoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(heis_normal_field(&at_i).components, Vector4::new(0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn rectification_examples_round_trip_and_equivariance() {
        let m = heis_rectify(&HeisElement::IDENTITY, 0.0).unwrap();
        assert_eq!(m.coords(), [0.0, 0.0, 0.0, 1.0]);
        let m = heis_rectify(&HeisElement::new(1.0, 2.0, 3.0), 0.0).unwrap();
        assert_eq!(m.coords(), [3.0, 1.0, 2.0, 1.0]);
        let mut r = rng();
        for _ in 0..1000 {
            let (g, s) = (random_element(&mut r), r.gen_range(-2.0..2.0));
            let (back, s_back) = heis_rectify_inverse(&heis_rectify(&g, s).unwrap());
            assert!(back.sup_distance(&g) < 1e-12 && (s_back - s).abs() < 1e-12);
            let m = random_point(&mut r);
            let (h, t) = heis_rectify_inverse(&m);
            assert!(heis_rectify(&h, t).unwrap().sup_distance(&m) < 1e-12);
            let g2 = random_element(&mut r);
            let lhs = heis_rectify(&g2.mul(&g), s).unwrap();
            let rhs = heis_act(&g2, &heis_rectify(&g, s).unwrap());
            assert!(lhs.sup_distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn pullback_metric_examples_and_numeric_agreement() {
        assert_eq!(heis_pullback_metric(1.0).unwrap(), Matrix3::identity());
        let g = heis_pullback_metric(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((g - Matrix3::from_diagonal(&Vector3::new(0.5, 2.0, 1.0))).amax() < 1e-15);
        assert!(heis_pullback_metric(0.0).is_err());
        let mut r = rng();
        for _ in 0..200 {
            let s: f64 = r.gen_range(-2.0..2.0);
            let y0 = s.exp();
            let g = random_element(&mut r);
            let base = heis_rectify(&HeisElement::IDENTITY, s).unwrap();
            let m = heis_act(&g, &base);
            let j = heis_leaf_jacobian(&base, &g);
            let jac = DMatrix::from_fn(4, 3, |a, b| j[(a, b)]);
            let num = pullback(&MetricSpec::EuclideanTimesHyperbolic, &m.coords(), &jac).unwrap();
            let ana = heis_pullback_metric(y0).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    assert!((num[(a, b)] - ana[(a, b)]).abs() < 1e-10 * ana.amax().max(1.0));
                }
            }
            let expected = Matrix3::from_diagonal(&Vector3::new((2.0 * s).exp(), (-2.0 * s).exp(), 1.0));
            assert!((ana - expected).amax() < 1e-10 * expected.amax());
            assert!(ana.cholesky().is_some());
        }
    }

    #[test]
    fn leaf_separation() {
        let est = heis_leaf_separation_numeric(0.3, 0.3, 100_000).unwrap();
        assert!(est.distance < 1e-4);
        let est = heis_leaf_separation_numeric(0.0, 2f64.ln(), 100_000).unwrap();
        assert!((est.distance - 2f64.ln()).abs() < 1e-4, "{est:?}");
        // every sampled cross-leaf pair is at least |s1 − s0| apart
        let mut r = rng();
        for _ in 0..1000 {
            let (s0, s1) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let d = heis_cross_leaf_distance(&random_element(&mut r), s0, &random_element(&mut r), s1).unwrap();
            assert!(d >= (s1 - s0).abs() - 1e-12);
        }
    }

    #[test]
    fn reduction_examples() {
        let g = HeisElement::new(0.25, 0.5, 0.75);
        assert_eq!(heis_reduce_mod_integer_lattice(&g), (HeisElement::IDENTITY, g));
        let g = HeisElement::new(1.5, 2.5, 0.25);
        let (l, rep) = heis_reduce_mod_integer_lattice(&g);
        assert!(HeisLattice::INTEGER.contains(&l));
        assert!(HeisBox::new([0.0, 1.0], [0.0, 1.0], [0.0, 1.0]).contains(&rep, 0.0));
        assert!(rep.a < 1.0 && rep.b < 1.0 && rep.c < 1.0);
        assert!(l.mul(&rep).sup_distance(&g) < 1e-14);
        // rounding onto the upper end is folded back
        let (_, rep) = heis_reduce_mod_integer_lattice(&HeisElement::new(-1e-17, 0.0, 0.0));
        assert!(rep.a >= 0.0 && rep.a < 1.0);
    }

    #[test]
    fn reduction_is_coset_invariant_and_unique() {
        let mut r = rng();
        for lattice in [HeisLattice::INTEGER, HeisLattice::Scaled(2), HeisLattice::Scaled(3)] {
            let (n, n2) = lattice.periods().unwrap();
            for _ in 0..1000 {
                let g = random_element(&mut r);
                let (l, rep) = heis_reduce(&lattice, &g);
                assert!(lattice.contains(&l));
                assert!(rep.a >= 0.0 && rep.a < n && rep.b >= 0.0 && rep.b < n && rep.c >= 0.0 && rep.c < n2);
                assert!(l.mul(&rep).sup_distance(&g) < 1e-12);
                assert_eq!(heis_reduce(&lattice, &rep).0, HeisElement::IDENTITY);
                let shift = HeisElement::new(
                    n * r.gen_range(-3..=3) as f64,
                    n * r.gen_range(-3..=3) as f64,
                    n2 * r.gen_range(-3..=3) as f64,
                );
                let (_, rep2) = heis_reduce(&lattice, &shift.mul(&g));
                assert!(rep2.sup_distance(&rep) < 1e-12);
                // uniqueness: no nearby lattice element also lands in the box
                let mut hits = 0;
                for i in -2..=2 {
                    for j in -2..=2 {
                        for k in -6..=6 {
                            let m = HeisElement::new(n * i as f64, n * j as f64, n2 * k as f64);
                            let cand = m.inv().mul(&g);
                            if cand.a >= -1e-12 && cand.a < n - 1e-12
                                && cand.b >= -1e-12 && cand.b < n - 1e-12
                                && cand.c >= -1e-12 && cand.c < n2 - 1e-12
                            {
                                hits += 1;
                            }
                        }
                    }
                }
                assert!(hits <= 1);
            }
        }
        assert_eq!(heis_reduce(&HeisLattice::Trivial, &HeisElement::new(5.0, 6.0, 7.0)).1, HeisElement::new(5.0, 6.0, 7.0));
        assert!(HeisLattice::Scaled(0).validate().is_err());
    }

    #[test]
    fn word_ball_sizes() {
        assert_eq!(heis_word_ball(0), vec![IntHeis::new(0, 0, 0)]);
        assert_eq!(heis_word_ball(1).len(), 7);
        let b2 = heis_word_ball(2);
        assert!(b2.windows(2).all(|w| w[0] < w[1]));
        assert!(b2.contains(&IntHeis::new(1, 1, 1)));
    }

    #[test]
    fn factored_counts() {
        let k = HeisBox::unit_cube();
        let trivial = factored_proper_discontinuity_check(&[HeisElement::IDENTITY], &k, 0.3);
        assert_eq!(trivial, FactoredCounts { count_x: 1, count_xy: 1 });
        for n in 0..=3 {
            let sample: Vec<HeisElement> = heis_word_ball(n).iter().map(IntHeis::to_element).collect();
            for y in [-1.0, 0.0, 0.7] {
                let c = factored_proper_discontinuity_check(&sample, &k, y);
                assert_eq!(c.count_x, c.count_xy);
                assert_eq!(c.count_x, brute_force_meet_count(&sample, &k, 4));
            }
            let bigger = HeisBox::new([-0.5, 1.5], [-0.5, 1.5], [-0.5, 1.5]);
            let cb = factored_proper_discontinuity_check(&sample, &bigger, 0.0);
            assert!(cb.count_x >= factored_proper_discontinuity_check(&sample, &k, 0.0).count_x);
        }
    }
}
