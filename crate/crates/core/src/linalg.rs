//! Small dense helpers that nalgebra does not provide in the shape we need.

use nalgebra::{Matrix3, SymmetricEigen};

/// Eigenvalues of a symmetric 3×3 matrix in ascending order, by the
/// trigonometric solution of the characteristic cubic.
pub fn symmetric_eigenvalues3(a: &Matrix3<f64>) -> [f64; 3] {
    let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let q = a.trace() / 3.0;
    if p1 == 0.0 {
        let mut d = [a[(0, 0)], a[(1, 1)], a[(2, 2)]];
        d.sort_by(f64::total_cmp);
        return d;
    }
    let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = (a - Matrix3::identity() * q) / p;
    let r = (0.5 * b.determinant()).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

/// Closed-form eigenvalues with matching unit eigenvectors (columns, same order).
/// Eigenvectors come from nalgebra's symmetric solver, reordered to match.
pub fn symmetric_eigen3(a: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let values = symmetric_eigenvalues3(a);
    let eig = SymmetricEigen::new(*a);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vectors = Matrix3::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}
