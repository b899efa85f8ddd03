//! Finite-difference shape operator of the leaves: the spectrum is the same
//! at every point.

use solfold::sol::shape_operator;

fn main() {
    for t in [-1.0, 0.0, 1.0] {
        for s in [-1.0, 0.0, 1.0] {
            let so = shape_operator(t, s).unwrap();
            let [a, b, c] = so.eigenvalues;
            println!(
                "t={t:4.1} s={s:4.1}: curvatures ({a:+.8}, {b:+.8}, {c:+.8}), normal leakage {:.1e}",
                so.normal_leakage
            );
        }
    }
    let so = shape_operator(0.3, -0.2).unwrap();
    println!("principal directions (columns) at t=0.3, s=-0.2:{:.4}", so.eigenvectors);
}
