//! Conjugacy of hyperbolic matrices in GL(2, ℤ), which decides isomorphism of
//! the corresponding toral groups.

use solfold::kleinian::{int_inverse, int_mul, lattice_iso_test, DEFAULT_ISO_BOUND};

fn main() {
    let a = [2, 1, 1, 1];
    let u = [1, 1, 0, 1];
    let conj = int_mul(&int_mul(&u, &a), &int_inverse(&u));
    for (name, b) in [
        ("A", a),
        ("A^-1", int_inverse(&a)),
        ("U A U^-1", conj),
        ("[[3,2],[1,1]]", [3, 2, 1, 1]),
        ("[[5,2],[2,1]]", [5, 2, 2, 1]),
    ] {
        println!("{name:>14} {b:?}: {:?}", lattice_iso_test(&a, &b, DEFAULT_ISO_BOUND).unwrap());
    }
}
