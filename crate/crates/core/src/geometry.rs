//! Riemannian primitives on the upper half plane ℍ, the bidisc ℍ×ℍ and the
//! mixed space ℂ×ℍ.
//!
//! Points of the four-dimensional spaces are handled in real coordinates
//! `(x1, y1, x2, y2)` for ℍ×ℍ and `(Re z, Im z, Re w, Im w)` for ℂ×ℍ. All the
//! metrics in this crate are diagonal in those coordinates, which is what
//! [`christoffel`] exploits.

use nalgebra::{DMatrix, Matrix3, Vector4};
use num_complex::Complex64;
use thiserror::Error;

/// Default step for central first differences.
pub const FD_STEP_FIRST: f64 = 1e-5;
/// Default step for central second differences.
pub const FD_STEP_SECOND: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("imaginary part must be positive, got {0}")]
    NonPositiveImaginary(f64),
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("tangent vectors are based at different points")]
    MismatchedBase,
    #[error("metric parameter must be positive, got {0}")]
    DegenerateMetric(f64),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A point of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    x: f64,
    y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if y <= 0.0 {
            return Err(GeometryError::NonPositiveImaginary(y));
        }
        Ok(Self { x, y })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// A point `(z1, z2)` of ℍ×ℍ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint {
    pub z1: UpperHalfPoint,
    pub z2: UpperHalfPoint,
}

impl ProductPoint {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        Ok(Self {
            z1: UpperHalfPoint::new(x1, y1)?,
            z2: UpperHalfPoint::new(x2, y2)?,
        })
    }

    pub fn from_complex(z1: Complex64, z2: Complex64) -> Result<Self> {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }

    pub fn from_coords(c: [f64; 4]) -> Result<Self> {
        Self::new(c[0], c[1], c[2], c[3])
    }

    /// `(x1, y1, x2, y2)`.
    pub fn coords(&self) -> [f64; 4] {
        [self.z1.x, self.z1.y, self.z2.x, self.z2.y]
    }

    pub fn sup_distance(&self, other: &ProductPoint) -> f64 {
        let (a, b) = (self.coords(), other.coords());
        a.iter()
            .zip(b.iter())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }
}

/// A point `(z, w)` of ℂ×ℍ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedPoint {
    pub z: Complex64,
    pub w: UpperHalfPoint,
}

impl MixedPoint {
    pub fn new(z: Complex64, w: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self {
            z,
            w: UpperHalfPoint::from_complex(w)?,
        })
    }

    pub fn from_coords(c: [f64; 4]) -> Result<Self> {
        Self::new(Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3]))
    }

    /// `(Re z, Im z, Re w, Im w)`.
    pub fn coords(&self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.x, self.w.y]
    }

    pub fn sup_distance(&self, other: &MixedPoint) -> f64 {
        let (a, b) = (self.coords(), other.coords());
        a.iter()
            .zip(b.iter())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePoint {
    Product(ProductPoint),
    Mixed(MixedPoint),
}

impl BasePoint {
    pub fn coords(&self) -> [f64; 4] {
        match self {
            BasePoint::Product(p) => p.coords(),
            BasePoint::Mixed(m) => m.coords(),
        }
    }
}

impl From<ProductPoint> for BasePoint {
    fn from(p: ProductPoint) -> Self {
        BasePoint::Product(p)
    }
}

impl From<MixedPoint> for BasePoint {
    fn from(m: MixedPoint) -> Self {
        BasePoint::Mixed(m)
    }
}

/// A tangent vector in the canonical frame `e1..e4` at a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector4 {
    pub base: BasePoint,
    pub components: Vector4<f64>,
}

impl TangentVector4 {
    pub fn new(base: impl Into<BasePoint>, components: Vector4<f64>) -> Self {
        Self {
            base: base.into(),
            components,
        }
    }

    /// The canonical basis vector `e_{index+1}`.
    pub fn basis(base: impl Into<BasePoint>, index: usize) -> Self {
        let mut c = Vector4::zeros();
        c[index] = 1.0;
        Self::new(base, c)
    }

    pub fn euclidean_dot(&self, other: &TangentVector4) -> f64 {
        self.components.dot(&other.components)
    }
}

/// The metrics used across the crate. All are diagonal in their coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricSpec {
    /// `(dx1² + dy1²)/(2y1²) + (dx2² + dy2²)/(2y2²)` on ℍ×ℍ.
    HalfHyperbolicProduct,
    /// `dx² + dy² + (dp² + dq²)/q²` on ℂ×ℍ.
    EuclideanTimesHyperbolic,
    /// `dt² + e^{-2t}/(2y1²) dx² + e^{2t}/(2y2²) dy²` on a Sol leaf, coordinates `(t, x, y)`.
    LeafSol { y1: f64, y2: f64 },
    /// `y0² dp² + dq²/y0² + dt²` on a Heisenberg leaf, coordinates `(p, q, t)`.
    HeisPullback { y0: f64 },
}

impl MetricSpec {
    pub fn dim(&self) -> usize {
        match self {
            MetricSpec::HalfHyperbolicProduct | MetricSpec::EuclideanTimesHyperbolic => 4,
            MetricSpec::LeafSol { .. } | MetricSpec::HeisPullback { .. } => 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MetricSpec::LeafSol { y1, y2 } => {
                for y in [y1, y2] {
                    if !(y > 0.0) || !y.is_finite() {
                        return Err(GeometryError::DegenerateMetric(y));
                    }
                }
                Ok(())
            }
            MetricSpec::HeisPullback { y0 } => {
                if !(y0 > 0.0) || !y0.is_finite() {
                    return Err(GeometryError::DegenerateMetric(y0));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn check_point(&self, coords: &[f64]) -> Result<()> {
        self.validate()?;
        if coords.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        match self {
            MetricSpec::HalfHyperbolicProduct => {
                for &y in [coords[1], coords[3]].iter() {
                    if y <= 0.0 {
                        return Err(GeometryError::NonPositiveImaginary(y));
                    }
                }
            }
            MetricSpec::EuclideanTimesHyperbolic => {
                if coords[3] <= 0.0 {
                    return Err(GeometryError::NonPositiveImaginary(coords[3]));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Diagonal entries `g_kk` at `coords`.
    pub fn diagonal(&self, coords: &[f64]) -> Result<Vec<f64>> {
        self.check_point(coords)?;
        Ok(match *self {
            MetricSpec::HalfHyperbolicProduct => {
                let a = 0.5 / (coords[1] * coords[1]);
                let b = 0.5 / (coords[3] * coords[3]);
                vec![a, a, b, b]
            }
            MetricSpec::EuclideanTimesHyperbolic => {
                let h = 1.0 / (coords[3] * coords[3]);
                vec![1.0, 1.0, h, h]
            }
            MetricSpec::LeafSol { y1, y2 } => {
                let t = coords[0];
                vec![
                    1.0,
                    (-2.0 * t).exp() / (2.0 * y1 * y1),
                    (2.0 * t).exp() / (2.0 * y2 * y2),
                ]
            }
            MetricSpec::HeisPullback { y0 } => vec![y0 * y0, 1.0 / (y0 * y0), 1.0],
        })
    }

    /// `grad[i][k] = ∂_i g_kk`.
    fn diagonal_gradient(&self, coords: &[f64]) -> Result<Vec<Vec<f64>>> {
        let d = self.dim();
        let g = self.diagonal(coords)?;
        let mut grad = vec![vec![0.0; d]; d];
        match self {
            MetricSpec::HalfHyperbolicProduct => {
                let a = -1.0 / coords[1].powi(3);
                let b = -1.0 / coords[3].powi(3);
                grad[1][0] = a;
                grad[1][1] = a;
                grad[3][2] = b;
                grad[3][3] = b;
            }
            MetricSpec::EuclideanTimesHyperbolic => {
                let h = -2.0 / coords[3].powi(3);
                grad[3][2] = h;
                grad[3][3] = h;
            }
            MetricSpec::LeafSol { .. } => {
                grad[0][1] = -2.0 * g[1];
                grad[0][2] = 2.0 * g[2];
            }
            MetricSpec::HeisPullback { .. } => {}
        }
        Ok(grad)
    }

    /// The full metric tensor at `coords`.
    pub fn tensor(&self, coords: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.diagonal(coords)?;
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(g)))
    }

    /// `g_p(u, v)` for raw component slices.
    pub fn inner_at(&self, coords: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        let g = self.diagonal(coords)?;
        if u.len() != g.len() || v.len() != g.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: g.len(),
                got: u.len().min(v.len()),
            });
        }
        Ok(g.iter()
            .zip(u.iter().zip(v.iter()))
            .map(|(gk, (a, b))| gk * a * b)
            .sum())
    }
}

/// `g_p(u, v)` for two tangent vectors at the same point of a four-dimensional space.
pub fn metric_inner(m: &MetricSpec, u: &TangentVector4, v: &TangentVector4) -> Result<f64> {
    if u.base != v.base {
        return Err(GeometryError::MismatchedBase);
    }
    let p = u.base.coords();
    m.inner_at(&p, u.components.as_slice(), v.components.as_slice())
}

/// Christoffel symbols `Γ^k_{ij}` of the Levi-Civita connection at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_{ij}` with zero-based indices.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, value: f64) {
        let d = self.dim;
        self.data[(k * d + i) * d + j] = value;
    }

    /// `Γ^k_{ij} u^i v^j` for each `k`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        acc += self.get(k, i, j) * u[i] * v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Levi-Civita Christoffel symbols, in closed form for a diagonal metric:
/// `Γ^k_{ij} = (δ_jk ∂_i g_kk + δ_ik ∂_j g_kk − δ_ij ∂_k g_ii) / (2 g_kk)`.
pub fn christoffel(m: &MetricSpec, coords: &[f64]) -> Result<Christoffel> {
    let g = m.diagonal(coords)?;
    let grad = m.diagonal_gradient(coords)?;
    let d = m.dim();
    let mut out = Christoffel::zeros(d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                if j == k {
                    s += grad[i][k];
                }
                if i == k {
                    s += grad[j][k];
                }
                if i == j {
                    s -= grad[k][i];
                }
                if s != 0.0 {
                    out.set(k, i, j, 0.5 * s / g[k]);
                }
            }
        }
    }
    Ok(out)
}

/// Sup-norm of the geodesic equation `γ̈^k + Γ^k_{ij} γ̇^i γ̇^j` along `curve` at `t`,
/// with velocity and acceleration taken by central differences of step `h`.
pub fn geodesic_residual<F>(m: &MetricSpec, curve: F, t: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    if !(h > 0.0) {
        return Err(GeometryError::BadStep(h));
    }
    let prev = curve(t - h);
    let here = curve(t);
    let next = curve(t + h);
    // the connection is only evaluated at `here`, but the stencil must stay admissible too
    m.check_point(&prev)?;
    m.check_point(&next)?;
    let gamma = christoffel(m, &here)?;
    let d = m.dim();
    let vel: Vec<f64> = (0..d).map(|k| (next[k] - prev[k]) / (2.0 * h)).collect();
    let acc: Vec<f64> = (0..d)
        .map(|k| ((next[k] - here[k]) - (here[k] - prev[k])) / (h * h))
        .collect();
    let corr = gamma.contract(&vel, &vel);
    Ok((0..d).map(|k| (acc[k] + corr[k]).abs()).fold(0.0, f64::max))
}

/// Metric speed `sqrt(g(γ̇, γ̇))` of `curve` at `t`, by a central difference of step `h`.
pub fn curve_speed<F>(m: &MetricSpec, curve: F, t: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    if !(h > 0.0) {
        return Err(GeometryError::BadStep(h));
    }
    let prev = curve(t - h);
    let next = curve(t + h);
    let here = curve(t);
    let vel: Vec<f64> = prev
        .iter()
        .zip(next.iter())
        .map(|(a, b)| (b - a) / (2.0 * h))
        .collect();
    Ok(m.inner_at(&here, &vel, &vel)?.sqrt())
}

/// Standard hyperbolic distance on ℍ (curvature −1).
pub fn hyperbolic_distance(p: &UpperHalfPoint, q: &UpperHalfPoint) -> f64 {
    let chord = (p.x - q.x).hypot(p.y - q.y);
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// Distance for the half-hyperbolic metric `(dx² + dy²)/(2y²)`, the `ρ` with
/// `cosh(√2 ρ) = 1 + (Δx² + Δy²)/(2 y_p y_q)`.
pub fn hyperbolic_distance_scaled(p: &UpperHalfPoint, q: &UpperHalfPoint) -> f64 {
    hyperbolic_distance(p, q) / std::f64::consts::SQRT_2
}

/// Distance in ℍ×ℍ for the half-hyperbolic product metric.
pub fn product_distance(p: &ProductPoint, q: &ProductPoint) -> f64 {
    hyperbolic_distance_scaled(&p.z1, &q.z1).hypot(hyperbolic_distance_scaled(&p.z2, &q.z2))
}

/// Distance in ℂ×ℍ for the Euclidean × hyperbolic product metric.
pub fn mixed_distance(p: &MixedPoint, q: &MixedPoint) -> f64 {
    (p.z - q.z).norm().hypot(hyperbolic_distance(&p.w, &q.w))
}

/// The vector `X` with `⟨X, a⟩ = det[u; v; w; a]` for every `a`.
///
/// It is Euclidean-orthogonal to `u`, `v`, `w`, alternating and trilinear.
pub fn cross4(u: &Vector4<f64>, v: &Vector4<f64>, w: &Vector4<f64>) -> Vector4<f64> {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        Matrix3::from_fn(|r, c| {
            let row = match r {
                0 => u,
                1 => v,
                _ => w,
            };
            row[cols[c]]
        })
        .determinant()
    };
    Vector4::new(-minor(0), minor(1), -minor(2), minor(3))
}

/// [`cross4`] on tangent vectors sharing a base point.
pub fn cross_r4(
    u: &TangentVector4,
    v: &TangentVector4,
    w: &TangentVector4,
) -> Result<TangentVector4> {
    if u.base != v.base || u.base != w.base {
        return Err(GeometryError::MismatchedBase);
    }
    Ok(TangentVector4 {
        base: u.base,
        components: cross4(&u.components, &v.components, &w.components),
    })
}

/// `Jᵀ G J`: the metric pulled back along a map with Jacobian `jac` (columns are
/// the images of the coordinate vectors) at the image point `coords`.
pub fn pullback(m: &MetricSpec, coords: &[f64], jac: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let g = m.tensor(coords)?;
    if jac.nrows() != g.nrows() {
        return Err(GeometryError::DimensionMismatch {
            expected: g.nrows(),
            got: jac.nrows(),
        });
    }
    Ok(jac.transpose() * g * jac)
}

/// `(∇X)^k_i = ∂_i X^k + Γ^k_{ij} X^j` for a vector field given as a closure on
/// coordinates; derivatives by central differences of step `h`. Column `i`
/// holds `∇_{∂_i} X`.
pub fn covariant_derivative<F>(m: &MetricSpec, field: F, coords: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if !(h > 0.0) {
        return Err(GeometryError::BadStep(h));
    }
    let d = m.dim();
    let gamma = christoffel(m, coords)?;
    let x0 = field(coords)?;
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        let mut plus = coords.to_vec();
        let mut minus = coords.to_vec();
        plus[i] += h;
        minus[i] -= h;
        let xp = field(&plus)?;
        let xm = field(&minus)?;
        for k in 0..d {
            let mut v = (xp[k] - xm[k]) / (2.0 * h);
            for j in 0..d {
                v += gamma.get(k, i, j) * x0[j];
            }
            out[(k, i)] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, SQRT_2};

    /// Christoffel symbols from central differences of the full tensor; independent
    /// of the closed-form diagonal path.
    fn christoffel_fd(m: &MetricSpec, p: &[f64], h: f64) -> Christoffel {
        let d = m.dim();
        let g = m.tensor(p).unwrap();
        let ginv = g.clone().try_inverse().unwrap();
        let dg: Vec<DMatrix<f64>> = (0..d)
            .map(|l| {
                let mut a = p.to_vec();
                let mut b = p.to_vec();
                a[l] += h;
                b[l] -= h;
                (m.tensor(&a).unwrap() - m.tensor(&b).unwrap()) / (2.0 * h)
            })
            .collect();
        let mut out = Christoffel::zeros(d);
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for l in 0..d {
                        s += 0.5
                            * ginv[(k, l)]
                            * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    out.set(k, i, j, s);
                }
            }
        }
        out
    }

    fn unit_product() -> ProductPoint {
        ProductPoint::new(0.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn half_hyperbolic_vertical_vector_has_norm_one_half() {
        let p = unit_product();
        let e2 = TangentVector4::basis(p, 1);
        let g = metric_inner(&MetricSpec::HalfHyperbolicProduct, &e2, &e2).unwrap();
        assert_eq!(g, 0.5);
    }

    #[test]
    fn zero_vector_pairs_to_zero() {
        let p = unit_product();
        let zero = TangentVector4::new(p, Vector4::zeros());
        let e3 = TangentVector4::basis(p, 2);
        assert_eq!(metric_inner(&MetricSpec::HalfHyperbolicProduct, &zero, &e3).unwrap(), 0.0);
        let m = MixedPoint::new(Complex64::new(0.3, 0.1), Complex64::new(0.0, 2.0)).unwrap();
        let zero = TangentVector4::new(m, Vector4::zeros());
        assert_eq!(metric_inner(&MetricSpec::EuclideanTimesHyperbolic, &zero, &zero).unwrap(), 0.0);
    }

    #[test]
    fn euclidean_times_hyperbolic_vertical_coefficient() {
        let m = MixedPoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0)).unwrap();
        let e4 = TangentVector4::basis(m, 3);
        let g = metric_inner(&MetricSpec::EuclideanTimesHyperbolic, &e4, &e4).unwrap();
        assert_eq!(g, 0.25);
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let a = TangentVector4::basis(unit_product(), 0);
        let b = TangentVector4::basis(ProductPoint::new(0.0, 2.0, 0.0, 1.0).unwrap(), 0);
        assert_eq!(
            metric_inner(&MetricSpec::HalfHyperbolicProduct, &a, &b),
            Err(GeometryError::MismatchedBase)
        );
    }

    #[test]
    fn nonpositive_imaginary_parts_are_rejected() {
        assert!(matches!(
            UpperHalfPoint::new(0.0, 0.0),
            Err(GeometryError::NonPositiveImaginary(_))
        ));
        assert!(MetricSpec::HalfHyperbolicProduct
            .diagonal(&[0.0, 1.0, 0.0, -1.0])
            .is_err());
        assert!(MetricSpec::LeafSol { y1: 0.0, y2: 1.0 }.validate().is_err());
        assert!(MetricSpec::HeisPullback { y0: -1.0 }.diagonal(&[0.0; 3]).is_err());
    }

    #[test]
    fn half_plane_christoffels_at_unit_point() {
        let g = christoffel(&MetricSpec::HalfHyperbolicProduct, &[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(g.get(1, 0, 0), 1.0);
        assert_eq!(g.get(0, 0, 1), -1.0);
        assert_eq!(g.get(0, 1, 0), -1.0);
        assert_eq!(g.get(1, 1, 1), -1.0);
        // the two factors do not couple
        assert_eq!(g.get(2, 0, 2), 0.0);
        assert_eq!(g.get(3, 2, 2), 1.0);
    }

    #[test]
    fn euclidean_factor_is_flat() {
        let g = christoffel(&MetricSpec::EuclideanTimesHyperbolic, &[0.4, -1.0, 0.2, 0.7]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.get(0, i, j), 0.0);
                assert_eq!(g.get(1, i, j), 0.0);
            }
        }
    }

    #[test]
    fn christoffels_match_finite_differences() {
        let cases: Vec<(MetricSpec, Vec<f64>)> = vec![
            (MetricSpec::HalfHyperbolicProduct, vec![0.0, 2.0, 0.0, 3.0]),
            (MetricSpec::HalfHyperbolicProduct, vec![-1.3, 0.4, 2.2, 1.7]),
            (MetricSpec::EuclideanTimesHyperbolic, vec![0.1, 0.2, -0.5, 0.8]),
            (MetricSpec::LeafSol { y1: 0.7, y2: 1.9 }, vec![0.6, 1.0, -2.0]),
            (MetricSpec::HeisPullback { y0: 0.3 }, vec![1.0, 2.0, 3.0]),
        ];
        for (m, p) in cases {
            let analytic = christoffel(&m, &p).unwrap();
            let fd = christoffel_fd(&m, &p, FD_STEP_FIRST);
            assert!(analytic.max_abs_diff(&fd) < 1e-6, "{m:?} at {p:?}");
        }
    }

    #[test]
    fn christoffels_are_invariant_under_rescaling() {
        // the half-hyperbolic product is a constant multiple of the plain hyperbolic product
        let p = [0.3, 1.4, -0.2, 0.6];
        let half = christoffel(&MetricSpec::HalfHyperbolicProduct, &p).unwrap();
        let plain = |k: usize, i: usize, j: usize| -> f64 {
            let (xo, yo) = if k < 2 { (0, 1) } else { (2, 3) };
            let y = p[yo];
            let (ii, jj) = (i, j);
            match (k == xo, ii, jj) {
                (true, a, b) if (a == xo && b == yo) || (a == yo && b == xo) => -1.0 / y,
                (false, a, b) if a == xo && b == xo => 1.0 / y,
                (false, a, b) if a == yo && b == yo => -1.0 / y,
                _ => 0.0,
            }
        };
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_relative_eq!(half.get(k, i, j), plain(k, i, j), epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn vertical_flow_curve_is_geodesic() {
        let curve = |t: f64| vec![0.0, t.exp(), 0.0, t.exp()];
        for &t in &[-2.0, -0.5, 0.0, 1.0, 2.5] {
            let r = geodesic_residual(&MetricSpec::HalfHyperbolicProduct, curve, t, FD_STEP_SECOND)
                .unwrap();
            assert!(r < 1e-6, "t={t} residual {r}");
        }
    }

    #[test]
    fn constant_curve_has_zero_residual() {
        let curve = |_t: f64| vec![0.3, 1.7, -2.0, 0.4];
        let r = geodesic_residual(&MetricSpec::HalfHyperbolicProduct, curve, 0.7, 1e-4).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn straight_line_in_flat_factor_is_geodesic() {
        let curve = |t: f64| vec![1.0 + 2.0 * t, -0.5 + 0.25 * t, 0.3, 1.2];
        // the second difference divides rounding noise by h², so use a coarse step;
        // a straight line has no truncation error to lose
        let r =
            geodesic_residual(&MetricSpec::EuclideanTimesHyperbolic, curve, 0.4, 1e-2).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn residual_rejects_curves_leaving_the_domain() {
        let curve = |t: f64| vec![0.0, t, 0.0, 1.0];
        assert!(geodesic_residual(&MetricSpec::HalfHyperbolicProduct, curve, 0.0, 1e-3).is_err());
        assert!(geodesic_residual(&MetricSpec::HalfHyperbolicProduct, curve, 2.0, 0.0).is_err());
    }

    #[test]
    fn scaled_distance_examples() {
        let o = UpperHalfPoint::new(0.0, 1.0).unwrap();
        assert_eq!(hyperbolic_distance_scaled(&o, &o), 0.0);
        let up = UpperHalfPoint::new(0.0, E).unwrap();
        assert_relative_eq!(hyperbolic_distance_scaled(&o, &up), 1.0 / SQRT_2, epsilon = 1e-15);
        let side = UpperHalfPoint::new(1.0, 1.0).unwrap();
        assert_relative_eq!(
            hyperbolic_distance_scaled(&o, &side),
            1.5f64.acosh() / SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn product_distance_examples() {
        let a = unit_product();
        assert_eq!(product_distance(&a, &a), 0.0);
        let b = ProductPoint::new(0.0, E, 0.0, E).unwrap();
        assert_relative_eq!(product_distance(&a, &b), 1.0, epsilon = 1e-15);
        let c = ProductPoint::new(0.0, E, 0.0, 1.0).unwrap();
        assert_relative_eq!(product_distance(&a, &c), 1.0 / SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn cross_of_canonical_basis() {
        let e = |i: usize| {
            let mut v = Vector4::zeros();
            v[i] = 1.0;
            v
        };
        assert_eq!(cross4(&e(0), &e(1), &e(2)), e(3));
        assert_eq!(cross4(&e(0), &e(0), &e(2)), Vector4::zeros());
    }

    #[test]
    fn cross_of_sol_leaf_jacobian_at_unit_point() {
        // columns of the orbit-map Jacobian at (i, i) for λ = e, M = I, identity element
        let dt = Vector4::new(0.0, 1.0, 0.0, -1.0);
        let dx = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let dy = Vector4::new(0.0, 0.0, 1.0, 0.0);
        assert_eq!(cross4(&dt, &dx, &dy), Vector4::new(0.0, -1.0, 0.0, -1.0));
    }

    #[test]
    fn cross_r4_needs_common_base() {
        let a = TangentVector4::basis(unit_product(), 0);
        let b = TangentVector4::basis(ProductPoint::new(0.0, 2.0, 0.0, 1.0).unwrap(), 1);
        assert!(cross_r4(&a, &a, &b).is_err());
        let c = cross_r4(&a, &TangentVector4::basis(unit_product(), 1), &TangentVector4::basis(unit_product(), 2)).unwrap();
        assert_eq!(c.components[3], 1.0);
    }
}
