//! The complex projective plane: normalized homogeneous points and dual lines,
//! pseudo-projective maps with their kernels, and the largest subset of a line
//! arrangement in general position.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectiveError {
    #[error("homogeneous coordinates are all zero")]
    ZeroVector,
    #[error("coordinates are not finite")]
    NonFinite,
    #[error("points coincide, no unique line")]
    CoincidentPoints,
}

pub type Result<T> = std::result::Result<T, ProjectiveError>;

/// Entries below this (relative to the sup norm) count as zero when picking
/// the coordinate that is made real and positive.
const LEAD_TOL: f64 = 1e-12;

fn normalize(v: [Complex64; 3]) -> Result<[Complex64; 3]> {
    if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(ProjectiveError::NonFinite);
    }
    let sup = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if sup == 0.0 {
        return Err(ProjectiveError::ZeroVector);
    }
    let lead = v
        .iter()
        .find(|c| c.norm() > LEAD_TOL * sup)
        .expect("some entry attains the sup norm");
    let phase = lead.conj() / lead.norm();
    Ok(v.map(|c| c * phase / sup))
}

fn sup_diff(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn cross(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn det3(a: &[Complex64; 3], b: &[Complex64; 3], c: &[Complex64; 3]) -> Complex64 {
    let x = cross(b, c);
    a[0] * x[0] + a[1] * x[1] + a[2] * x[2]
}

/// `[z1 : z2 : z3]`, stored with sup norm 1 and the first nonzero entry real positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    coords: [Complex64; 3],
}

impl ProjectivePoint {
    pub fn new(z1: Complex64, z2: Complex64, z3: Complex64) -> Result<Self> {
        Ok(Self {
            coords: normalize([z1, z2, z3])?,
        })
    }

    pub fn real(z1: f64, z2: f64, z3: f64) -> Result<Self> {
        Self::new(z1.into(), z2.into(), z3.into())
    }

    /// `[z1 : z2 : 1]`.
    pub fn affine(z1: Complex64, z2: Complex64) -> Result<Self> {
        Self::new(z1, z2, Complex64::new(1.0, 0.0))
    }

    pub fn coords(&self) -> [Complex64; 3] {
        self.coords
    }

    /// `(z1/z3, z2/z3)` when `z3 ≠ 0`.
    pub fn to_affine(&self) -> Option<(Complex64, Complex64)> {
        let [a, b, c] = self.coords;
        (c.norm() > LEAD_TOL).then(|| (a / c, b / c))
    }

    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        sup_diff(&self.coords, &other.coords)
    }

    pub fn apply(&self, m: &Matrix3<f64>) -> Result<ProjectivePoint> {
        let c = self.coords;
        let row = |r: usize| {
            c[0] * m[(r, 0)] + c[1] * m[(r, 1)] + c[2] * m[(r, 2)]
        };
        Self::new(row(0), row(1), row(2))
    }
}

/// The line `{l1 z1 + l2 z2 + l3 z3 = 0}` by its dual coordinates, normalized
/// like [`ProjectivePoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveLine {
    dual: [Complex64; 3],
}

impl ProjectiveLine {
    pub fn new(l1: Complex64, l2: Complex64, l3: Complex64) -> Result<Self> {
        Ok(Self {
            dual: normalize([l1, l2, l3])?,
        })
    }

    pub fn real(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        Self::new(l1.into(), l2.into(), l3.into())
    }

    pub fn dual(&self) -> [Complex64; 3] {
        self.dual
    }

    pub fn contains(&self, p: &ProjectivePoint, tol: f64) -> bool {
        let c = p.coords();
        (self.dual[0] * c[0] + self.dual[1] * c[1] + self.dual[2] * c[2]).norm() <= tol
    }

    pub fn distance(&self, other: &ProjectiveLine) -> f64 {
        sup_diff(&self.dual, &other.dual)
    }

    /// `{z3 = 0}`.
    pub fn at_infinity() -> Self {
        Self::real(0.0, 0.0, 1.0).expect("nonzero")
    }
}

pub fn line_through(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<ProjectiveLine> {
    let l = cross(&p.coords(), &q.coords());
    if l.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12 {
        return Err(ProjectiveError::CoincidentPoints);
    }
    ProjectiveLine::new(l[0], l[1], l[2])
}

/// Tolerance on the determinant of three normalized dual vectors.
pub const CONCURRENCY_TOL: f64 = 1e-9;

pub fn lines_concurrent(a: &ProjectiveLine, b: &ProjectiveLine, c: &ProjectiveLine) -> bool {
    det3(&a.dual, &b.dual, &c.dual).norm() <= CONCURRENCY_TOL
}

/// The common point of two distinct lines.
pub fn intersection(a: &ProjectiveLine, b: &ProjectiveLine) -> Result<ProjectivePoint> {
    let p = cross(&a.dual, &b.dual);
    if p.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12 {
        return Err(ProjectiveError::CoincidentPoints);
    }
    ProjectivePoint::new(p[0], p[1], p[2])
}

/// Kernel of a pseudo-projective map, projectivized.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Empty,
    Point(ProjectivePoint),
    Line(ProjectiveLine),
}

/// A nonzero real 3×3 matrix up to scale, stored with sup norm 1 and the first
/// non-negligible entry (row-major) positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoProjectiveMap {
    matrix: Matrix3<f64>,
}

impl PseudoProjectiveMap {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(ProjectiveError::NonFinite);
        }
        let sup = m.amax();
        if sup == 0.0 {
            return Err(ProjectiveError::ZeroVector);
        }
        let mut scaled = m / sup;
        let lead = scaled
            .transpose()
            .iter()
            .copied()
            .find(|v| v.abs() > LEAD_TOL)
            .expect("sup entry is 1");
        if lead < 0.0 {
            scaled = -scaled;
        }
        Ok(Self { matrix: scaled })
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn distance(&self, other: &PseudoProjectiveMap) -> f64 {
        (self.matrix - other.matrix).amax()
    }

    /// Numerical kernel: singular values below `rank_tol` (the largest is about 1).
    pub fn kernel(&self, rank_tol: f64) -> Kernel {
        let svd = self.matrix.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let small: Vec<usize> = (0..3).filter(|&i| svd.singular_values[i] < rank_tol).collect();
        let big: Vec<usize> = (0..3).filter(|&i| svd.singular_values[i] >= rank_tol).collect();
        match small.len() {
            0 => Kernel::Empty,
            // the kernel is the orthogonal complement of the single row direction
            2 => {
                let r: Vector3<f64> = v_t.row(big[0]).transpose();
                Kernel::Line(ProjectiveLine::real(r[0], r[1], r[2]).expect("unit row"))
            }
            1 => {
                let r: Vector3<f64> = v_t.row(small[0]).transpose();
                Kernel::Point(ProjectivePoint::real(r[0], r[1], r[2]).expect("unit row"))
            }
            _ => Kernel::Empty,
        }
    }
}

/// Largest subset of lines with no three concurrent.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPosition {
    pub size: usize,
    /// Indices into the input, ascending.
    pub witness: Vec<usize>,
    /// An upper bound on the answer; equals `size` when the result is certified.
    pub upper_bound: usize,
    /// Whether `size` is known to be optimal.
    pub exact: bool,
}

/// Sets up to this size are searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 20;

struct Arrangement<'a> {
    lines: &'a [ProjectiveLine],
}

impl Arrangement<'_> {
    fn fits(&self, chosen: &[usize], cand: usize) -> bool {
        for (i, &a) in chosen.iter().enumerate() {
            for &b in &chosen[i + 1..] {
                if lines_concurrent(&self.lines[a], &self.lines[b], &self.lines[cand]) {
                    return false;
                }
            }
        }
        true
    }

    fn exhaustive(&self, next: usize, chosen: &mut Vec<usize>, best: &mut Vec<usize>) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        if chosen.len() + (self.lines.len() - next) <= best.len() {
            return;
        }
        for cand in next..self.lines.len() {
            if self.fits(chosen, cand) {
                chosen.push(cand);
                self.exhaustive(cand + 1, chosen, best);
                chosen.pop();
            }
        }
    }

    fn greedy(&self) -> Vec<usize> {
        let mut chosen = Vec::new();
        for cand in 0..self.lines.len() {
            if self.fits(&chosen, cand) {
                chosen.push(cand);
            }
        }
        chosen
    }

    /// Improves a solution by removing one line and inserting two, until stuck.
    fn local_search(&self, mut chosen: Vec<usize>) -> Vec<usize> {
        'improve: loop {
            for drop in 0..chosen.len() {
                let rest: Vec<usize> = chosen.iter().copied().filter(|&c| c != chosen[drop]).collect();
                let free: Vec<usize> = (0..self.lines.len())
                    .filter(|c| !chosen.contains(c) && self.fits(&rest, *c))
                    .collect();
                for (i, &a) in free.iter().enumerate() {
                    let mut with_a = rest.clone();
                    with_a.push(a);
                    for &b in &free[i + 1..] {
                        if self.fits(&with_a, b) {
                            with_a.push(b);
                            with_a.sort_unstable();
                            chosen = with_a;
                            continue 'improve;
                        }
                    }
                }
            }
            return chosen;
        }
    }

    /// A general-position subset meets each pencil in at most two lines, so
    /// covering the lines by pencils bounds the answer by `Σ min(2, |pencil|)`.
    fn pencil_bound(&self) -> usize {
        let n = self.lines.len();
        let mut left: Vec<usize> = (0..n).collect();
        let mut bound = 0;
        while !left.is_empty() {
            let mut best: Vec<usize> = vec![left[0]];
            for (i, &a) in left.iter().enumerate() {
                for &b in &left[i + 1..] {
                    let Ok(p) = intersection(&self.lines[a], &self.lines[b]) else {
                        continue;
                    };
                    let through: Vec<usize> = left
                        .iter()
                        .copied()
                        .filter(|&c| self.lines[c].contains(&p, CONCURRENCY_TOL))
                        .collect();
                    if through.len() > best.len() {
                        best = through;
                    }
                }
            }
            bound += best.len().min(2);
            left.retain(|c| !best.contains(c));
        }
        bound
    }
}

pub fn general_position_max(lines: &[ProjectiveLine]) -> GeneralPosition {
    let arr = Arrangement { lines };
    if lines.len() <= EXHAUSTIVE_LIMIT {
        let mut best = Vec::new();
        arr.exhaustive(0, &mut Vec::new(), &mut best);
        return GeneralPosition {
            size: best.len(),
            upper_bound: best.len(),
            witness: best,
            exact: true,
        };
    }
    let witness = arr.local_search(arr.greedy());
    let upper_bound = arr.pencil_bound().max(witness.len());
    GeneralPosition {
        size: witness.len(),
        exact: upper_bound == witness.len(),
        upper_bound,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(a: f64, b: f64, c: f64) -> ProjectiveLine {
        ProjectiveLine::real(a, b, c).unwrap()
    }

    #[test]
    fn normalization() {
        let p = ProjectivePoint::new(Complex64::new(0.0, 2.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(p.coords()[0], Complex64::new(1.0, 0.0));
        assert!((p.coords()[2] - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!(ProjectivePoint::real(0.0, 0.0, 0.0).is_err());
        let q = ProjectivePoint::real(-2.0, 4.0, 0.0).unwrap();
        assert_eq!(q, ProjectivePoint::real(1.0, -2.0, 0.0).unwrap());
    }

    #[test]
    fn line_through_axes_points() {
        let l = line_through(&ProjectivePoint::real(1.0, 0.0, 0.0).unwrap(), &ProjectivePoint::real(0.0, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(l, ProjectiveLine::at_infinity());
        let p = ProjectivePoint::real(1.0, 2.0, 3.0).unwrap();
        assert_eq!(line_through(&p, &p), Err(ProjectiveError::CoincidentPoints));
    }

    #[test]
    fn concurrency() {
        assert!(lines_concurrent(&line(1.0, 0.0, 0.0), &line(1.0, 0.0, -1.0), &line(0.0, 0.0, 1.0)));
        assert!(!lines_concurrent(&line(1.0, 0.0, 0.0), &line(0.0, 1.0, 0.0), &line(0.0, 0.0, 1.0)));
        let p = intersection(&line(1.0, 0.0, 0.0), &line(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p, ProjectivePoint::real(0.0, 1.0, 0.0).unwrap());
    }

    #[test]
    fn kernels_of_degenerate_maps() {
        let m = PseudoProjectiveMap::new(Matrix3::from_diagonal(&Vector3::new(5.0, 0.0, 0.0))).unwrap();
        assert_eq!(m.kernel(1e-8), Kernel::Line(line(1.0, 0.0, 0.0)));
        let t = PseudoProjectiveMap::new(Matrix3::new(0.0, 0.0, 3.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(t.kernel(1e-8), Kernel::Line(ProjectiveLine::at_infinity()));
        let r2 = PseudoProjectiveMap::new(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0))).unwrap();
        assert_eq!(r2.kernel(1e-8), Kernel::Point(ProjectivePoint::real(0.0, 0.0, 1.0).unwrap()));
        assert_eq!(PseudoProjectiveMap::new(Matrix3::identity()).unwrap().kernel(1e-8), Kernel::Empty);
        assert!(PseudoProjectiveMap::new(Matrix3::zeros()).is_err());
    }

    #[test]
    fn general_position_examples() {
        let five = [
            line(1.0, 0.0, 0.0),
            line(1.0, 0.0, -1.0),
            line(0.0, 1.0, 0.0),
            line(0.0, 1.0, -1.0),
            line(0.0, 0.0, 1.0),
        ];
        let gp = general_position_max(&five);
        assert_eq!(gp.size, 4);
        assert_eq!(gp.witness, vec![0, 1, 2, 3]);
        assert!(gp.exact);
        assert_eq!(general_position_max(&five[..2]).size, 2);
        let pencil: Vec<ProjectiveLine> = (0..5).map(|k| line(1.0, k as f64, 0.0)).collect();
        assert_eq!(general_position_max(&pencil).size, 2);
    }

    #[test]
    fn large_arrangement_is_certified() {
        // two pencils through [0:1:0] and [1:0:0] sharing the line at infinity
        let mut lines = vec![ProjectiveLine::at_infinity()];
        for r in -12..=12 {
            lines.push(line(1.0, 0.0, -(r as f64) * 0.37));
            lines.push(line(0.0, 1.0, -(r as f64) * 0.61));
        }
        let gp = general_position_max(&lines);
        assert_eq!((gp.size, gp.upper_bound, gp.exact), (4, 4, true));
        let w: Vec<ProjectiveLine> = gp.witness.iter().map(|&i| lines[i]).collect();
        assert_eq!(general_position_max(&w).size, 4);
    }

    #[test]
    fn generic_lines_are_all_in_general_position() {
        let lines: Vec<ProjectiveLine> = (0..24)
            .map(|k| {
                let t = k as f64 * 0.7;
                line(t.cos(), t.sin(), 1.0 + 0.1 * k as f64)
            })
            .collect();
        let gp = general_position_max(&lines);
        assert_eq!(gp.size, 24);
        assert!(gp.exact);
    }
}
