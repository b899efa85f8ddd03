//! The normal flow moves a point of ℍ×ℍ along a unit-speed geodesic that
//! crosses every leaf orthogonally.

use solfold::geometry::{curve_speed, geodesic_residual, MetricSpec, ProductPoint, FD_STEP_FIRST, FD_STEP_SECOND};
use solfold::sol::{flow_equivariance_defect, normal_flow, rectify_inverse, SolElement, SolParams};

fn main() {
    let z = ProductPoint::new(0.3, 1.0, -0.7, 2.0).unwrap();
    let metric = MetricSpec::HalfHyperbolicProduct;
    let curve = |s: f64| normal_flow(&z, s).unwrap().coords().to_vec();

    println!("    s   leaf s    speed      geodesic residual");
    for i in -4..=4 {
        let s = 0.5 * i as f64;
        let p = normal_flow(&z, s).unwrap();
        let leaf = rectify_inverse(&p).unwrap()[3];
        let v = curve_speed(&metric, curve, s, FD_STEP_FIRST).unwrap();
        let r = geodesic_residual(&metric, curve, s, FD_STEP_SECOND).unwrap();
        println!("{s:5.1} {leaf:8.4} {v:12.10} {r:10.2e}");
    }

    let g = SolElement::new(0.4, 1.0, -2.0);
    let d = flow_equivariance_defect(&SolParams::standard(), &z, &g, 1.3).unwrap();
    println!("flow vs leaf map defect: {d:.2e}");
}
