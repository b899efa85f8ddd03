//! Leaf-preserving reduction of ℍ+×ℍ+ and ℂ×ℍ modulo lattices, plus the
//! structural notes that go with it.

use solfold::heisenberg::HeisLattice;
use solfold::kleinian::ToralGroupSpec;
use solfold::output::to_json;
use solfold::quotient::{heis_quotient_check, sol_quotient_check, structural_notes, SolGroup};

fn main() {
    let spec = ToralGroupSpec::new([3, 2, 1, 1]).unwrap();
    let sol = sol_quotient_check(&SolGroup::Toral(spec.clone()), 500, 1).unwrap();
    print!("{}", to_json(&sol));
    let heis = heis_quotient_check(&HeisLattice::Scaled(2), 500, 1);
    print!("{}", to_json(&heis));
    for note in structural_notes(&spec) {
        println!("[{}] {}", note.status, note.statement);
    }
}
