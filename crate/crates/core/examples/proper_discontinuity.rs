//! Elements of a toral group moving a small box in ℍ×ℍ onto itself, for
//! growing word balls.

use solfold::kleinian::{proper_discontinuity_brute_force, proper_discontinuity_count, Box4, ToralGroupSpec};

fn main() {
    let spec = ToralGroupSpec::new([2, 1, 1, 1]).unwrap();
    for b in [
        Box4::new([0.0, 0.1], [1.0, 1.1], [0.0, 0.1], [1.0, 1.1]),
        Box4::new([-2.0, 2.0], [0.5, 3.0], [-2.0, 2.0], [0.5, 3.0]),
    ] {
        println!("box {b:?}");
        for n in [2, 4, 6, 8, 10, 12] {
            let c = proper_discontinuity_count(&spec, &b, n).unwrap();
            let brute = proper_discontinuity_brute_force(&spec, &b, n).unwrap();
            println!("  N={n:2}: {} elements (brute force {})", c.count, brute.count);
        }
    }
}
