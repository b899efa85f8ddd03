//! Induced metric on the leaf through `(y1 i, y2 i)`, compared with a
//! numerical pullback; at `y1 = y2 = 1/√2` it is the Sol metric.

use nalgebra::DMatrix;
use solfold::geometry::{pullback, MetricSpec, ProductPoint};
use solfold::sol::{leaf_embed, leaf_jacobian, leaf_metric, special_point, SolElement, SolParams};

fn main() {
    let p = SolParams::standard();
    for (y1, y2) in [(1.0, 1.0), (0.5, 3.0)] {
        let z = ProductPoint::new(0.0, y1, 0.0, y2).unwrap();
        for t in [-1.0, 0.0, 1.0] {
            let g = SolElement::new(t, 0.2, -0.4);
            let j = leaf_jacobian(&p, &z, &g);
            let jac = DMatrix::from_fn(4, 3, |r, c| j[(r, c)]);
            let numeric = pullback(&MetricSpec::HalfHyperbolicProduct, &leaf_embed(&p, &z, &g).unwrap().coords(), &jac).unwrap();
            let closed = leaf_metric(&z, t).unwrap();
            let diff = (0..3).map(|i| (numeric[(i, i)] - closed[(i, i)]).abs()).fold(0.0, f64::max);
            println!(
                "y=({y1}, {y2}) t={t:4.1}: diag({:.6}, {:.6}, {:.6})  |numeric - closed| = {diff:.1e}",
                closed[(0, 0)], closed[(1, 1)], closed[(2, 2)]
            );
        }
    }
    let g = leaf_metric(&special_point(), 0.7).unwrap();
    println!(
        "at z0, t=0.7: diag({:.6}, {:.6}, {:.6}) vs Sol diag(1, e^-1.4, e^1.4) = (1, {:.6}, {:.6})",
        g[(0, 0)], g[(1, 1)], g[(2, 2)], (-1.4f64).exp(), 1.4f64.exp()
    );
}
