//! The Sol group, its free action on ℍ×ℍ, and the geometry of the foliation
//! by orbits: normal field and flow, the rectifying charts `Ψ` and `Ψ̃`, leaf
//! metrics, leaf-preserving isometries, leaf separation and the shape operator.
//!
//! Closed-form statements are in the standard form `λ = e`, `M = I`, where the
//! group law is `((x1, y1), t1)·((x2, y2), t2) = ((x1 + e^{t1} x2, y1 + e^{-t1} y2), t1 + t2)`.

use std::f64::consts::{E, FRAC_1_SQRT_2};

use nalgebra::{DMatrix, Matrix3, Matrix4, Matrix4x3, Vector3, Vector4};
use thiserror::Error;

use crate::geometry::{
    self, covariant_derivative, cross4, GeometryError, MetricSpec, ProductPoint, TangentVector4,
    FD_STEP_FIRST,
};
use crate::linalg::symmetric_eigen3;
use crate::search::{grid_then_descent, GridAxis, SearchError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolError {
    #[error("λ must be positive and different from 1, got {0}")]
    InvalidLambda(f64),
    #[error("translation matrix is singular (ad - bc = {0})")]
    DegenerateTranslation(f64),
    #[error("base point ({0}, {1}) is not purely imaginary")]
    NotPurelyImaginary(f64, f64),
    #[error("finite differences did not settle: normal leakage {0}")]
    StepFailure(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub type Result<T> = std::result::Result<T, SolError>;

/// The base point `z0 = (i/√2, i/√2)` whose orbit is isometric to Sol.
pub fn special_point() -> ProductPoint {
    ProductPoint::new(0.0, FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2).expect("valid point")
}

/// An element `(t, x, y)` of Sol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolElement {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl SolElement {
    pub const IDENTITY: SolElement = SolElement {
        t: 0.0,
        x: 0.0,
        y: 0.0,
    };

    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    /// Inverse for the standard group law.
    pub fn inverse(&self) -> Self {
        Self {
            t: -self.t,
            x: -(-self.t).exp() * self.x,
            y: -self.t.exp() * self.y,
        }
    }

    pub fn sup_distance(&self, other: &SolElement) -> f64 {
        (self.t - other.t)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
    }
}

/// The standard Sol group law.
pub fn sol_mul(g: &SolElement, h: &SolElement) -> SolElement {
    SolElement {
        t: g.t + h.t,
        x: g.x + g.t.exp() * h.x,
        y: g.y + (-g.t).exp() * h.y,
    }
}

/// Representation parameters: the dilation base `λ` and the translation matrix
/// `M = [[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolParams {
    lambda: f64,
    m: [f64; 4],
}

impl SolParams {
    pub fn new(lambda: f64, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(lambda > 0.0) || lambda == 1.0 || !lambda.is_finite() {
            return Err(SolError::InvalidLambda(lambda));
        }
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(SolError::DegenerateTranslation(det));
        }
        Ok(Self {
            lambda,
            m: [a, b, c, d],
        })
    }

    /// `λ = e`, `M = I`.
    pub fn standard() -> Self {
        Self {
            lambda: E,
            m: [1.0, 0.0, 0.0, 1.0],
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ln_lambda(&self) -> f64 {
        self.lambda.ln()
    }

    pub fn translation_matrix(&self) -> [f64; 4] {
        self.m
    }

    pub fn det(&self) -> f64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    fn translate(&self, x: f64, y: f64) -> (f64, f64) {
        let [a, b, c, d] = self.m;
        (a * x + b * y, c * x + d * y)
    }

    fn untranslate(&self, u: f64, v: f64) -> (f64, f64) {
        let [a, b, c, d] = self.m;
        let det = self.det();
        ((d * u - b * v) / det, (a * v - c * u) / det)
    }

    fn dilation(&self, t: f64) -> (f64, f64) {
        (self.lambda.powf(t), self.lambda.powf(-t))
    }

    /// Group law transported through this representation:
    /// `rep(mul(g, h)) = rep(g)·rep(h)`. Coincides with [`sol_mul`] in standard form.
    pub fn mul(&self, g: &SolElement, h: &SolElement) -> SolElement {
        let (up, down) = self.dilation(g.t);
        let (u, v) = self.translate(h.x, h.y);
        let (dx, dy) = self.untranslate(up * u, down * v);
        SolElement {
            t: g.t + h.t,
            x: g.x + dx,
            y: g.y + dy,
        }
    }

    pub fn inverse(&self, g: &SolElement) -> SolElement {
        let (up, down) = self.dilation(-g.t);
        let (u, v) = self.translate(g.x, g.y);
        let (x, y) = self.untranslate(-up * u, -down * v);
        SolElement { t: -g.t, x, y }
    }
}

impl Default for SolParams {
    fn default() -> Self {
        Self::standard()
    }
}

/// `[[λ^t, 0, a x + b y], [0, λ^{-t}, c x + d y], [0, 0, 1]]`.
pub fn sol_matrix_rep(g: &SolElement, p: &SolParams) -> Matrix3<f64> {
    let (up, down) = p.dilation(g.t);
    let (u, v) = p.translate(g.x, g.y);
    Matrix3::new(up, 0.0, u, 0.0, down, v, 0.0, 0.0, 1.0)
}

/// `g·(z1, z2) = (λ^t z1 + a x + b y, λ^{-t} z2 + c x + d y)`.
pub fn sol_act(p: &SolParams, g: &SolElement, z: &ProductPoint) -> Result<ProductPoint> {
    let (up, down) = p.dilation(g.t);
    let (u, v) = p.translate(g.x, g.y);
    let [x1, y1, x2, y2] = z.coords();
    Ok(ProductPoint::new(
        up * x1 + u,
        up * y1,
        down * x2 + v,
        down * y2,
    )?)
}

/// The orbit map `f_z(g) = g·z`.
pub fn leaf_embed(p: &SolParams, z: &ProductPoint, g: &SolElement) -> Result<ProductPoint> {
    sol_act(p, g, z)
}

/// The left inverse of [`leaf_embed`]: the unique `g` with `g·z = w` when `w`
/// lies on the orbit of `z`.
pub fn leaf_left_inverse(p: &SolParams, z: &ProductPoint, w: &ProductPoint) -> SolElement {
    let t = (w.z1.y() / z.z1.y()).ln() / p.ln_lambda();
    let (up, down) = p.dilation(t);
    let (x, y) = p.untranslate(w.z1.x() - up * z.z1.x(), w.z2.x() - down * z.z2.x());
    SolElement { t, x, y }
}

/// Jacobian of `f_z` at `g`, columns `∂t, ∂x, ∂y`.
pub fn leaf_jacobian(p: &SolParams, z: &ProductPoint, g: &SolElement) -> Matrix4x3<f64> {
    let l = p.ln_lambda();
    let (up, down) = p.dilation(g.t);
    let [x1, y1, x2, y2] = z.coords();
    let [a, b, c, d] = p.m;
    Matrix4x3::new(
        l * up * x1,
        a,
        b,
        l * up * y1,
        0.0,
        0.0,
        -l * down * x2,
        c,
        d,
        -l * down * y2,
        0.0,
        0.0,
    )
}

/// The Euclidean normal `X = −ln λ (λ^{-t} y2 e2 + λ^t y1 e4)` of the leaf
/// through `z`, based at `f_z(g)`. It equals `(ad − bc)⁻¹` times the
/// [`cross4`] product of the Jacobian columns.
pub fn leaf_normal(p: &SolParams, z: &ProductPoint, g: &SolElement) -> Result<TangentVector4> {
    let l = p.ln_lambda();
    let (up, down) = p.dilation(g.t);
    let base = leaf_embed(p, z, g)?;
    Ok(TangentVector4::new(
        base,
        Vector4::new(0.0, -l * down * z.z2.y(), 0.0, -l * up * z.z1.y()),
    ))
}

/// Generator of the normal flow at `z`: `y1 e2 + y2 e4`, the unit normal of the
/// leaf through `z` for the half-hyperbolic product metric.
pub fn flow_generator(z: &ProductPoint) -> TangentVector4 {
    TangentVector4::new(*z, Vector4::new(0.0, z.z1.y(), 0.0, z.z2.y()))
}

/// `ψ_s(z1, z2) = (x1, e^s y1, x2, e^s y2)`.
pub fn normal_flow(z: &ProductPoint, s: f64) -> Result<ProductPoint> {
    let k = s.exp();
    let [x1, y1, x2, y2] = z.coords();
    Ok(ProductPoint::new(x1, k * y1, x2, k * y2)?)
}

/// `‖ψ_s(f_z(g)) − f_{ψ_s(z)}(g)‖∞`.
pub fn flow_equivariance_defect(
    p: &SolParams,
    z: &ProductPoint,
    g: &SolElement,
    s: f64,
) -> Result<f64> {
    let lhs = normal_flow(&leaf_embed(p, z, g)?, s)?;
    let rhs = leaf_embed(p, &normal_flow(z, s)?, g)?;
    Ok(lhs.sup_distance(&rhs))
}

/// `ψ_s∘f_z(t, x, y) = (e^t x1 + x, e^{t+s} y1, e^{-t} x2 + y, e^{-t+s} y2)` in standard form.
pub fn flowed_leaf_point(z: &ProductPoint, g: &SolElement, s: f64) -> Result<ProductPoint> {
    let [x1, y1, x2, y2] = z.coords();
    Ok(ProductPoint::new(
        g.t.exp() * x1 + g.x,
        (g.t + s).exp() * y1,
        (-g.t).exp() * x2 + g.y,
        (-g.t + s).exp() * y2,
    )?)
}

/// `Ψ(t, x, y, s) = ψ_s∘f_{z0}(t, x, y) = (x, e^{t+s}/√2, y, e^{s−t}/√2)`.
pub fn rectify(t: f64, x: f64, y: f64, s: f64) -> Result<ProductPoint> {
    let z0 = special_point();
    normal_flow(
        &leaf_embed(&SolParams::standard(), &z0, &SolElement::new(t, x, y))?,
        s,
    )
}

/// Inverse of [`rectify`]: returns `(t, x, y, s)`.
pub fn rectify_inverse(z: &ProductPoint) -> Result<[f64; 4]> {
    let [x1, y1, x2, y2] = z.coords();
    if y1 <= 0.0 || y2 <= 0.0 {
        return Err(GeometryError::NonPositiveImaginary(y1.min(y2)).into());
    }
    let t = 0.5 * (y1 / y2).ln();
    let s = 0.5 * (2.0 * y1 * y2).ln();
    Ok([t, x1, x2, s])
}

/// Jacobian of [`rectify`], columns `∂t, ∂x, ∂y, ∂s`.
pub fn rectify_jacobian(t: f64, _x: f64, _y: f64, s: f64) -> Matrix4<f64> {
    let a = (t + s).exp() * FRAC_1_SQRT_2;
    let b = (-t + s).exp() * FRAC_1_SQRT_2;
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        a, 0.0, 0.0, a, //
        0.0, 0.0, 1.0, 0.0, //
        -b, 0.0, 0.0, b,
    )
}

/// `Ψ̃(t, x, y, s) = Ψ(t, e^s x, e^s y, s)`: leaf preserving, and isometric from
/// Sol onto each leaf.
pub fn rectify_isometric(t: f64, x: f64, y: f64, s: f64) -> Result<ProductPoint> {
    let k = s.exp();
    rectify(t, k * x, k * y, s)
}

pub fn rectify_isometric_inverse(z: &ProductPoint) -> Result<[f64; 4]> {
    let [t, x, y, s] = rectify_inverse(z)?;
    let k = (-s).exp();
    Ok([t, k * x, k * y, s])
}

/// Jacobian of [`rectify_isometric`], columns `∂t, ∂x, ∂y, ∂s`.
pub fn rectify_isometric_jacobian(t: f64, x: f64, y: f64, s: f64) -> Matrix4<f64> {
    let k = s.exp();
    let a = (t + s).exp() * FRAC_1_SQRT_2;
    let b = (-t + s).exp() * FRAC_1_SQRT_2;
    Matrix4::new(
        0.0, k, 0.0, k * x, //
        a, 0.0, 0.0, a, //
        0.0, 0.0, k, k * y, //
        -b, 0.0, 0.0, b,
    )
}

/// Induced metric on the leaf through `z = (y1 i, y2 i)` in the chart
/// `(t, x, y) ↦ (x, e^t y1, y, e^{-t} y2)`.
pub fn leaf_metric(z: &ProductPoint, t: f64) -> Result<Matrix3<f64>> {
    let [x1, y1, x2, y2] = z.coords();
    if x1 != 0.0 || x2 != 0.0 {
        return Err(SolError::NotPurelyImaginary(x1, x2));
    }
    let d = MetricSpec::LeafSol { y1, y2 }.diagonal(&[t, 0.0, 0.0])?;
    Ok(Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])))
}

/// The leaf-preserving isometries
/// `(t, x, y, s) ↦ (t + t', e^{t'+s'} x + x', e^{−t'+s'} y + y', s + s')`
/// of the rectified picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafIsometry {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub s: f64,
}

impl LeafIsometry {
    pub const IDENTITY: LeafIsometry = LeafIsometry {
        t: 0.0,
        x: 0.0,
        y: 0.0,
        s: 0.0,
    };

    pub fn new(t: f64, x: f64, y: f64, s: f64) -> Self {
        Self { t, x, y, s }
    }

    pub fn apply(&self, q: [f64; 4]) -> [f64; 4] {
        [
            q[0] + self.t,
            (self.t + self.s).exp() * q[1] + self.x,
            (-self.t + self.s).exp() * q[2] + self.y,
            q[3] + self.s,
        ]
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &LeafIsometry) -> LeafIsometry {
        LeafIsometry {
            t: first.t + self.t,
            x: (self.t + self.s).exp() * first.x + self.x,
            y: (-self.t + self.s).exp() * first.y + self.y,
            s: first.s + self.s,
        }
    }

    /// The unique isometry of this family taking `from` to `to`.
    pub fn between(from: [f64; 4], to: [f64; 4]) -> LeafIsometry {
        let t = to[0] - from[0];
        let s = to[3] - from[3];
        LeafIsometry {
            t,
            s,
            x: to[1] - (t + s).exp() * from[1],
            y: to[2] - (-t + s).exp() * from[2],
        }
    }

    /// The induced map on ℍ×ℍ, conjugating through [`rectify`].
    pub fn apply_to_point(&self, z: &ProductPoint) -> Result<ProductPoint> {
        let [t, x, y, s] = self.apply(rectify_inverse(z)?);
        rectify(t, x, y, s)
    }
}

/// `(t, x, y, s) ↦ (t + t', e^{t'+s'} x + x', e^{−t'+s'} y + y', s + s')` with
/// `params = (t', x', y', s')`.
pub fn sol_product_isometry(params: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    LeafIsometry::new(params[0], params[1], params[2], params[3]).apply(q)
}

/// Separation between the leaves with flow parameters `s0` and `s1`.
pub fn leaf_separation(s0: f64, s1: f64) -> f64 {
    (s1 - s0).abs()
}

pub const DEFAULT_SEARCH_BUDGET: usize = 100_000;

/// Result of a numerical leaf-separation search. `first` and `second` are the
/// leaf coordinates of the closest pair found.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationEstimate {
    pub distance: f64,
    pub first: [f64; 3],
    pub second: [f64; 3],
    pub evaluations: usize,
}

/// Minimizes the product distance between `Ψ(t, x, y, s0)` and
/// `Ψ(t', x', y', s1)`. Horizontal translations preserve both leaves and the
/// metric, so the first point is pinned at `x = y = 0` and the search runs over
/// `t, t' ∈ [−3, 3]` and offsets `x', y' ∈ [−5, 5]`.
pub fn leaf_separation_numeric(s0: f64, s1: f64, budget: usize) -> Result<SeparationEstimate> {
    let objective = |v: &[f64]| -> f64 {
        match (rectify(v[0], 0.0, 0.0, s0), rectify(v[1], v[2], v[3], s1)) {
            (Ok(a), Ok(b)) => geometry::product_distance(&a, &b),
            _ => f64::INFINITY,
        }
    };
    let axes = [
        GridAxis::new(-3.0, 3.0, 13),
        GridAxis::new(-3.0, 3.0, 13),
        GridAxis::new(-5.0, 5.0, 11),
        GridAxis::new(-5.0, 5.0, 11),
    ];
    let m = grid_then_descent(objective, &axes, 1e-6, budget)?;
    Ok(SeparationEstimate {
        distance: m.value,
        first: [m.argmin[0], 0.0, 0.0],
        second: [m.argmin[1], m.argmin[2], m.argmin[3]],
        evaluations: m.evaluations,
    })
}

/// Shape operator of a leaf at one point, in the chart
/// `(t, x, y) ↦ (x, e^{−t−s}/√2, y, e^{t−s}/√2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeOperator {
    /// `S` in the basis `∂t, ∂x, ∂y`; column `j` is `S(∂_j)`.
    pub matrix: Matrix3<f64>,
    /// Ambient covariant derivative of the unit normal field, column `i` is `∇_{e_i} N`.
    pub covariant: Matrix4<f64>,
    /// Principal curvatures in ascending order.
    pub eigenvalues: [f64; 3],
    /// Principal directions in the chart basis, column `k` for `eigenvalues[k]`.
    pub eigenvectors: Matrix3<f64>,
    /// Largest normal component of `S(∂_j)`, a finite-difference health check.
    pub normal_leakage: f64,
}

fn leaf_chart_point(t: f64, x: f64, y: f64, s: f64) -> [f64; 4] {
    [
        x,
        (-t - s).exp() * FRAC_1_SQRT_2,
        y,
        (t - s).exp() * FRAC_1_SQRT_2,
    ]
}

/// Unit normal (half-hyperbolic metric) of the orbit through the point `c`,
/// built from the orbit tangents, oriented towards increasing imaginary parts.
fn orbit_unit_normal(c: &[f64]) -> geometry::Result<Vec<f64>> {
    let metric = MetricSpec::HalfHyperbolicProduct;
    let dt = Vector4::new(c[0], c[1], -c[2], -c[3]);
    let dx = Vector4::new(1.0, 0.0, 0.0, 0.0);
    let dy = Vector4::new(0.0, 0.0, 1.0, 0.0);
    let euclid = cross4(&dt, &dx, &dy);
    let g = metric.diagonal(c)?;
    let mut n: Vec<f64> = (0..4).map(|k| euclid[k] / g[k]).collect();
    let norm = metric.inner_at(c, &n, &n)?.sqrt();
    let sign = if n[1] + n[3] >= 0.0 { 1.0 } else { -1.0 };
    for v in n.iter_mut() {
        *v *= sign / norm;
    }
    Ok(n)
}

pub fn shape_operator(t: f64, s: f64) -> Result<ShapeOperator> {
    shape_operator_with_step(t, s, FD_STEP_FIRST)
}

/// Shape operator `v ↦ ∇_v N` by central differences of step `h`.
pub fn shape_operator_with_step(t: f64, s: f64, h: f64) -> Result<ShapeOperator> {
    let metric = MetricSpec::HalfHyperbolicProduct;
    let p = leaf_chart_point(t, 0.0, 0.0, s);
    let nabla = covariant_derivative(&metric, orbit_unit_normal, &p, h)?;
    let covariant = Matrix4::from_fn(|r, c| nabla[(r, c)]);

    // chart tangents ∂t, ∂x, ∂y
    let tangents = Matrix4x3::new(
        0.0, 1.0, 0.0, //
        -p[1], 0.0, 0.0, //
        0.0, 0.0, 1.0, //
        p[3], 0.0, 0.0,
    );
    let normal = orbit_unit_normal(&p)?;
    let g = metric.diagonal(&p)?;
    let gram = tangents.transpose() * Matrix4::from_diagonal(&Vector4::new(g[0], g[1], g[2], g[3]))
        * tangents;
    let gram_inv = gram
        .try_inverse()
        .ok_or(SolError::StepFailure(f64::INFINITY))?;

    let mut matrix = Matrix3::zeros();
    let mut leakage: f64 = 0.0;
    for j in 0..3 {
        let image = covariant * tangents.column(j);
        let img: Vec<f64> = image.iter().cloned().collect();
        leakage = leakage.max(metric.inner_at(&p, &img, &normal)?.abs());
        // metric projection onto the tangent frame
        let rhs = Vector3::from_fn(|a, _| {
            let ta: Vec<f64> = tangents.column(a).iter().cloned().collect();
            metric.inner_at(&p, &ta, &img).unwrap_or(f64::NAN)
        });
        matrix.set_column(j, &(gram_inv * rhs));
    }
    if !(leakage < 1e-6) {
        return Err(SolError::StepFailure(leakage));
    }

    // S is self-adjoint for the induced metric G; L^T S L^{-T} is symmetric for G = L L^T
    let chol = nalgebra::Cholesky::new(gram).ok_or(SolError::StepFailure(f64::INFINITY))?;
    let l = chol.l();
    let l_inv_t = l
        .transpose()
        .try_inverse()
        .ok_or(SolError::StepFailure(f64::INFINITY))?;
    let sym = l.transpose() * matrix * l_inv_t;
    let sym = 0.5 * (sym + sym.transpose());
    let (eigenvalues, sym_vectors) = symmetric_eigen3(&sym);
    let mut eigenvectors = l_inv_t * sym_vectors;
    for mut col in eigenvectors.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
    }

    Ok(ShapeOperator {
        matrix,
        covariant,
        eigenvalues,
        eigenvectors,
        normal_leakage: leakage,
    })
}

/// Numerical Jacobian of a map `R^n → ℍ×ℍ` by central differences; used by the
/// pullback checks.
pub fn numeric_jacobian<F>(f: F, at: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<ProductPoint>,
{
    let n = at.len();
    let mut jac = DMatrix::zeros(4, n);
    for i in 0..n {
        let mut a = at.to_vec();
        let mut b = at.to_vec();
        a[i] += h;
        b[i] -= h;
        let (pa, pb) = (f(&a)?.coords(), f(&b)?.coords());
        for k in 0..4 {
            jac[(k, i)] = (pa[k] - pb[k]) / (2.0 * h);
        }
    }
    Ok(jac)
}
