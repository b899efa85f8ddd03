//! Kernel lines of the pseudo-projective limits of a hyperbolic toral group and
//! the largest subset of them in general position.

use solfold::kleinian::{classify_limit_line, pseudo_limit_kernels, ToralGroupSpec, DEFAULT_CLUSTER_EPS, DEFAULT_RANK_TOL};
use solfold::projective::general_position_max;

fn main() {
    let spec = ToralGroupSpec::new([2, 1, 1, 1]).unwrap();
    println!("lambda = {:.12}", spec.lambda());
    let kernels = pseudo_limit_kernels(&spec, 5, DEFAULT_CLUSTER_EPS, DEFAULT_RANK_TOL).unwrap();
    println!("{} distinct limits, {} kernel lines, {} kernel points", kernels.clusters, kernels.lines.len(), kernels.points.len());
    let mut kinds = std::collections::BTreeMap::new();
    for l in &kernels.lines {
        let kind = match classify_limit_line(&l.line, 1e-8) {
            Some(k) => format!("{k:?}").split('(').next().unwrap().to_string(),
            None => "unclassified".into(),
        };
        *kinds.entry(kind).or_insert(0) += 1;
    }
    println!("by kind: {kinds:?}");
    let lines: Vec<_> = kernels.lines.iter().map(|l| l.line).collect();
    let gp = general_position_max(&lines);
    println!("general position: {} (upper bound {}, exact {})", gp.size, gp.upper_bound, gp.exact);
    for &i in &gp.witness {
        println!("  {:?}", classify_limit_line(&lines[i], 1e-8));
    }
}
