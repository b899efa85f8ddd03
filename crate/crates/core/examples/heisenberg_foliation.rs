//! Heis acting on ℂ×ℍ: orbits, the rectification, the induced metric and the
//! reduction to the fundamental cube.

use num_complex::Complex64;
use solfold::geometry::MixedPoint;
use solfold::heisenberg::{
    factored_proper_discontinuity_check, heis_act, heis_pullback_metric, heis_rectify,
    heis_rectify_inverse, heis_reduce_mod_integer_lattice, heis_word_ball, standard_generators,
    HeisBox, HeisElement,
};

fn main() {
    let [m, n, k] = standard_generators();
    let c = m.commutator(&n);
    println!("[m, n] = ({}, {}, {}), k = ({}, {}, {})", c.a, c.b, c.c, k.a, k.b, k.c);

    let p = MixedPoint::new(Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)).unwrap();
    let g = HeisElement::new(1.5, -2.0, 0.75);
    let gp = heis_act(&g, &p);
    println!("g·p = {:?} (Im w kept: {})", gp.coords(), gp.w.y() == p.w.y());

    let (h, s) = heis_rectify_inverse(&p);
    println!("p = Ψ_H(({:.4}, {:.4}, {:.4}), {s:.4}); back: {:?}", h.a, h.b, h.c, heis_rectify(&h, s).unwrap().coords());
    println!("induced metric at s = ln 2: {:?}", heis_pullback_metric(2.0).unwrap().diagonal().as_slice());

    let (lat, rep) = heis_reduce_mod_integer_lattice(&HeisElement::new(3.7, -1.2, 10.4));
    println!("(3.7, -1.2, 10.4) = ({}, {}, {}) * ({:.4}, {:.4}, {:.4})", lat.a, lat.b, lat.c, rep.a, rep.b, rep.c);

    for r in 0..=4 {
        let sample: Vec<HeisElement> = heis_word_ball(r).iter().map(|w| w.to_element()).collect();
        let counts = factored_proper_discontinuity_check(&sample, &HeisBox::unit_cube(), 0.0);
        println!("N={r}: {} words, {} meet the unit cube", sample.len(), counts.count_x);
    }
}
