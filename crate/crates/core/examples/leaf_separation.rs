//! Numerical distance between two leaves, for both foliations, against `|s1 − s0|`.

use solfold::heisenberg::heis_leaf_separation_numeric;
use solfold::sol::{leaf_separation, leaf_separation_numeric, DEFAULT_SEARCH_BUDGET};

fn main() {
    for (s0, s1) in [(0.0, 0.5), (0.0, 1.0), (0.0, 2.0), (-1.0, 1.0)] {
        let sol = leaf_separation_numeric(s0, s1, DEFAULT_SEARCH_BUDGET).unwrap();
        let heis = heis_leaf_separation_numeric(s0, s1, DEFAULT_SEARCH_BUDGET).unwrap();
        println!(
            "s0={s0:+.1} s1={s1:+.1}: exact {:.6}  Sol {:.9} ({} evals)  Heis {:.9} ({} evals)",
            leaf_separation(s0, s1),
            sol.distance,
            sol.evaluations,
            heis.distance,
            heis.evaluations
        );
    }
}
