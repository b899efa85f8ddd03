//! Acceptance criteria AC1–AC13. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use solfold::heisenberg::HeisElement;
use solfold::kleinian::ToralGroupSpec;
use solfold::quotient::{sol_quotient_check, SolGroup};
use solfold::suites::{self, SuiteConfig};

const SEED: u64 = 20240607;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn timed<F: FnOnce() -> Outcome>(f: F, limit_s: f64) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let el = start.elapsed();
    if !within(el, limit_s) {
        out.pass = false;
    }
    out.detail = format!("{}; {:.2}s (limit {limit_s}s)", out.detail, el.as_secs_f64());
    out
}

fn cfg() -> SuiteConfig {
    SuiteConfig {
        seed: SEED,
        ..SuiteConfig::default()
    }
}

fn ac1() -> Outcome {
    timed(
        || match suites::equivariance_defect(&cfg(), 10_000) {
            Ok(d) => Outcome {
                pass: d < 1e-12,
                detail: format!("max defect {d:.3e} over 10^4 samples (< 1e-12)"),
            },
            Err(e) => Outcome { pass: false, detail: e.to_string() },
        },
        5.0,
    )
}

fn ac2() -> Outcome {
    timed(
        || match suites::flow_geodesy(&cfg(), 1_000) {
            Ok((geo, speed)) => Outcome {
                pass: geo < 1e-6 && speed < 1e-10,
                detail: format!("geodesic residual {geo:.3e} (< 1e-6), speed defect {speed:.3e} (< 1e-10)"),
            },
            Err(e) => Outcome { pass: false, detail: e.to_string() },
        },
        5.0,
    )
}

fn ac3() -> Outcome {
    match suites::leaf_metric_defects(&cfg(), 1_000) {
        Ok((numeric, special)) => Outcome {
            pass: numeric < 1e-10 && special < 1e-12,
            detail: format!("pullback {numeric:.3e} (< 1e-10), at z0 {special:.3e} (< 1e-12)"),
        },
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn ac4() -> Outcome {
    timed(
        || match suites::principal_curvature_defect() {
            Ok(d) => Outcome {
                pass: d < 1e-6,
                detail: format!("max deviation from {{-1, -1, 0}} {d:.3e} on 5x5 grid (< 1e-6)"),
            },
            Err(e) => Outcome { pass: false, detail: e.to_string() },
        },
        10.0,
    )
}

fn ac5() -> Outcome {
    timed(
        || match (suites::sol_separation_defect(), suites::heis_separation_defect()) {
            (Ok(s), Ok(h)) => Outcome {
                pass: s < 1e-4 && h < 1e-4,
                detail: format!("Sol {s:.3e}, Heis {h:.3e} (< 1e-4)"),
            },
            (a, b) => Outcome {
                pass: false,
                detail: format!("{:?} {:?}", a.err(), b.err()),
            },
        },
        60.0,
    )
}

fn ac6() -> Outcome {
    let rt = suites::rectification_round_trip(&cfg(), 10_000);
    let spec = ToralGroupSpec::new([2, 1, 1, 1]).expect("hyperbolic");
    let q = sol_quotient_check(&SolGroup::Toral(spec), 1_000, SEED);
    match (rt, q) {
        (Ok(rt), Ok(q)) => Outcome {
            pass: rt < 1e-12 && q.leaf_residual < 1e-10,
            detail: format!(
                "round trip {rt:.3e} (< 1e-12), lattice leaf preservation {:.3e} (< 1e-10)",
                q.leaf_residual
            ),
        },
        (a, b) => Outcome {
            pass: false,
            detail: format!("{:?} {:?}", a.err(), b.err()),
        },
    }
}

fn ac7() -> Outcome {
    let c = cfg();
    let (group, action, fixed) = suites::heis_axiom_defects(&c, 1_000);
    let rel = suites::heis_min_relative_singular_value(&c, 1_000);
    let (rt, metric) = match suites::heis_rectification_defects(&c, 1_000) {
        Ok(v) => v,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let [m, n, _] = solfold::heisenberg::standard_generators();
    let comm = m.commutator(&n);
    let reduction = suites::heis_reduction_failures(&c, 1_000);
    Outcome {
        pass: group < 1e-14
            && action < 1e-14
            && fixed == 0
            && rel > 1e-10
            && rt < 1e-12
            && metric < 1e-10
            && comm == HeisElement::new(0.0, 0.0, 1.0)
            && reduction == 0,
        detail: format!(
            "axioms {group:.1e}/{action:.1e}, fixed points {fixed}, min sigma3/sigma1 {rel:.3e}, \
             round trip {rt:.3e}, metric {metric:.3e}, commutator ({}, {}, {}), reduction failures {reduction}",
            comm.a, comm.b, comm.c
        ),
    }
}

fn ac8() -> Outcome {
    let mismatch = suites::factored_discontinuity_mismatch();
    Outcome {
        pass: mismatch == 0,
        detail: format!("count mismatches over N <= 4: {mismatch}"),
    }
}

fn ac9() -> Outcome {
    timed(
        || {
            let mut pass = true;
            let mut detail = Vec::new();
            for a in [[2, 1, 1, 1], [3, 2, 1, 1]] {
                let spec = ToralGroupSpec::new(a).expect("hyperbolic");
                match suites::limit_line_summary(&spec, 8) {
                    Ok((unclassified, size, exact, lines)) => {
                        pass &= unclassified == 0 && size == 4 && exact;
                        detail.push(format!(
                            "A={a:?}: {lines} lines, {unclassified} unclassified, general position {size} (exact {exact})"
                        ));
                    }
                    Err(e) => {
                        pass = false;
                        detail.push(e.to_string());
                    }
                }
            }
            Outcome { pass, detail: detail.join("; ") }
        },
        60.0,
    )
}

fn ac10() -> Outcome {
    timed(
        || {
            let spec = ToralGroupSpec::new([2, 1, 1, 1]).expect("hyperbolic");
            let b = suites::test_box();
            let counts = (
                solfold::kleinian::proper_discontinuity_count(&spec, &b, 6).map(|c| c.count),
                solfold::kleinian::proper_discontinuity_count(&spec, &b, 12).map(|c| c.count),
            );
            match (suites::discontinuity_instability(&spec), counts) {
                (Ok(diff), (Ok(c6), Ok(c12))) => Outcome {
                    pass: diff == 0,
                    detail: format!("count N=6 {c6}, N=12 {c12}, set differences incl. brute force {diff}"),
                },
                (e, _) => Outcome {
                    pass: false,
                    detail: format!("{:?}", e.err()),
                },
            }
        },
        60.0,
    )
}

fn ac11() -> Outcome {
    let spec = ToralGroupSpec::new([2, 1, 1, 1]).expect("hyperbolic");
    let failures = suites::semidirect_failures(&spec);
    match suites::embedding_disagreement(&cfg(), &spec, 1_000) {
        Ok(d) => Outcome {
            pass: d < 1e-10 && failures == 0,
            detail: format!("projective vs Sol action {d:.3e} (< 1e-10), integer relation failures {failures}"),
        },
        Err(e) => Outcome { pass: false, detail: e },
    }
}

fn ac12() -> Outcome {
    let c = cfg();
    let failures: usize = [[2, 1, 1, 1], [3, 2, 1, 1]]
        .iter()
        .map(|a| suites::iso_failures(&c, a))
        .sum();
    Outcome {
        pass: failures == 0,
        detail: format!("(A, A), (A, A^-1), conjugates found and verified; trace-distinct refuted; failures {failures}"),
    }
}

fn ac13() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = dir.path().join("run.cfg");
    std::fs::write(&config, "suite = all\nseed = 7\nsamples = 100\nA = 3,2,1,1\n").expect("write config");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_solfold"))
            .arg("verify")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .expect("spawn solfold");
        (status.code(), std::fs::read(&out).unwrap_or_default())
    };
    let (c1, r1) = run("a.json");
    let (c2, r2) = run("b.json");
    Outcome {
        pass: !r1.is_empty() && r1 == r2 && c1 == c2,
        detail: format!("exit codes {c1:?}/{c2:?}, {} bytes, identical {}", r1.len(), r1 == r2),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("AC1 flow equivariance", ac1),
        ("AC2 flow geodesy", ac2),
        ("AC3 leaf metric", ac3),
        ("AC4 principal curvatures", ac4),
        ("AC5 leaf separation", ac5),
        ("AC6 rectifications", ac6),
        ("AC7 Heisenberg suite", ac7),
        ("AC8 factored proper discontinuity", ac8),
        ("AC9 limit-set combinatorics", ac9),
        ("AC10 proper discontinuity", ac10),
        ("AC11 lattice embedding", ac11),
        ("AC12 lattice isomorphism", ac12),
        ("AC13 CLI determinism", ac13),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of 13 passed", 13 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
