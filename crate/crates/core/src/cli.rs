//! `solfold <verify|export|report>`.
//!
//! Every option can also come from a flat `key = value` file given with
//! `--config`; flags on the command line win. Exit status: 0 when everything
//! passes, 1 when a check fails, 2 for an invalid configuration or an I/O
//! problem. Failures are described by a one-line JSON record on stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::geometry::ProductPoint;
use crate::kleinian::{
    classify_limit_line, fundamental_domain_reduce, pseudo_limit_kernels, toral_act, word_ball,
    IntMatrix2, LimitLineKind, ToralGroupSpec, DEFAULT_CLUSTER_EPS, DEFAULT_RANK_TOL,
};
use crate::output::{self, ser17, ser17_slice, Cell, Table};
use crate::quotient::{structural_notes, StructuralNote};
use crate::sol::{leaf_metric, normal_flow};
use crate::suites::{run_suite, Check, Report, Suite, SuiteConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "solfold", version, about = "Sol and Heisenberg foliations and toral Kleinian groups")]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and write a JSON or CSV report.
    Verify(VerifyArgs),
    /// Export curves, metric grids, limit sets, orbits or the fundamental domain.
    Export {
        #[command(subcommand)]
        kind: ExportKind,
    },
    /// Render a saved report (or a fresh run) as text, CSV or JSON.
    Report(ReportArgs),
}

// Values are kept as strings so that a bad value can be reported with its
// field name, whichever source it came from.
#[derive(Debug, Args, Default, Clone)]
pub struct CommonArgs {
    /// Random seed.
    #[arg(long)]
    pub seed: Option<String>,
    /// Integer matrix `a,b,c,d` for `[[a, b], [c, d]]`.
    #[arg(long = "A", value_name = "a,b,c,d", allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Word-ball radius.
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args, Clone)]
pub struct VerifyArgs {
    /// sol, heis, kleinian, quotient or all.
    #[arg(long)]
    pub suite: Option<String>,
    /// Thresholds are divided by this factor; values below 1 loosen them.
    #[arg(long = "tol-scale")]
    pub tol_scale: Option<String>,
    /// `λ > 0, λ ≠ 1` for the Sol action in the equivariance check.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Overrides every per-check sample count.
    #[arg(long)]
    pub samples: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum ExportKind {
    /// Normal-flow curve `s ↦ ψ_s(z)` as CSV `s,x1,y1,x2,y2`.
    Flow {
        /// Start point `x1,y1,x2,y2`.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// `start:end:step`.
        #[arg(long = "s-range", allow_hyphen_values = true)]
        s_range: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Induced leaf metric on a grid of `(y1, y2, t)`.
    LeafMetric {
        /// `start:end:step` for `t`.
        #[arg(long = "t-range", allow_hyphen_values = true)]
        t_range: Option<String>,
        /// Comma-separated imaginary parts used for both `y1` and `y2`.
        #[arg(long)]
        heights: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Kernel lines of the pseudo-projective limits, as JSON.
    LimitSet {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Orbit of a base point under the word ball, in the affine chart.
    Orbit {
        /// Base point `z1,z2` with entries like `i`, `2i`, `0.5+1.5i`.
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fundamental domain of the toral group on ℍ+×ℍ+, as JSON.
    Domain {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args, Clone)]
pub struct ReportArgs {
    /// A report written by `verify --format json`; when absent a fresh suite is run.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Suite for a fresh run.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long = "tol-scale")]
    pub tol_scale: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// A failure that ends the run, printed as a JSON record on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failed_checks: Vec<String>,
}

impl ErrorRecord {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        Self {
            error: "invalid_config".into(),
            field: Some(field.into()),
            message: message.into(),
            failed_checks: vec![],
        }
    }

    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self {
            error: "io".into(),
            field: Some("out".into()),
            message: format!("{}: {err}", path.display()),
            failed_checks: vec![],
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.error == "check_failed" {
            EXIT_CHECK_FAILED
        } else {
            EXIT_INVALID
        }
    }
}

type CliResult<T> = std::result::Result<T, ErrorRecord>;

/// Parsed `key = value` file. Blank lines and `#` comments are skipped; keys
/// use the long flag names (`A`, `N`, `seed`, `tol-scale`, ...).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub values: BTreeMap<String, String>,
}

const CONFIG_KEYS: &[&str] = &[
    "suite", "seed", "tol-scale", "lambda", "samples", "A", "N", "out", "format", "z", "s-range",
    "t-range", "heights", "base", "input",
];

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ErrorRecord::invalid("config", format!("line {}: expected key = value", i + 1)));
            };
            let key = k.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(ErrorRecord::invalid(&key, format!("line {}: unknown key", i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| ErrorRecord::invalid("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Resolves each field from the flag first, then the config file.
struct Resolver<'a> {
    file: &'a ConfigFile,
}

impl Resolver<'_> {
    fn raw(&self, key: &str, flag: &Option<String>) -> Option<String> {
        flag.clone().or_else(|| self.file.get(key).map(str::to_string))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, flag: &Option<String>, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key, flag) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|e| ErrorRecord::invalid(key, format!("`{v}`: {e}"))),
        }
    }

    fn path(&self, key: &str, flag: &Option<PathBuf>) -> Option<PathBuf> {
        flag.clone().or_else(|| self.file.get(key).map(PathBuf::from))
    }

    fn matrix(&self, flag: &Option<String>) -> CliResult<IntMatrix2> {
        match self.raw("A", flag) {
            None => Ok([2, 1, 1, 1]),
            Some(v) => parse_matrix(&v),
        }
    }

    fn format(&self, flag: &Option<String>, default: Format) -> CliResult<Format> {
        match self.raw("format", flag) {
            None => Ok(default),
            Some(v) => Format::from_str(&v, true)
                .map_err(|_| ErrorRecord::invalid("format", format!("`{v}`: expected json, csv or text"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn parse_matrix(v: &str) -> CliResult<IntMatrix2> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(ErrorRecord::invalid("A", format!("`{v}`: expected four integers a,b,c,d")));
    }
    let mut m = [0i64; 4];
    for (slot, p) in m.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| ErrorRecord::invalid("A", format!("`{v}`: `{p}` is not an integer")))?;
    }
    ToralGroupSpec::new(m).map_err(|e| ErrorRecord::invalid("A", e.to_string()))?;
    Ok(m)
}

/// `start:end:step` with inclusive end (up to rounding).
pub fn parse_range(field: &str, v: &str) -> CliResult<Vec<f64>> {
    let bad = |msg: &str| ErrorRecord::invalid(field, format!("`{v}`: {msg}"));
    let parts: Vec<f64> = v
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("expected start:end:step"))?;
    let [start, end, step] = parts[..] else {
        return Err(bad("expected start:end:step"));
    };
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() || end < start {
        return Err(bad("need finite start <= end and step > 0"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(bad("too many points"));
    }
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

fn parse_floats(field: &str, v: &str, len: Option<usize>) -> CliResult<Vec<f64>> {
    let xs: Vec<f64> = v
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ErrorRecord::invalid(field, format!("`{v}`: expected comma-separated numbers")))?;
    if let Some(n) = len {
        if xs.len() != n {
            return Err(ErrorRecord::invalid(field, format!("`{v}`: expected {n} numbers")));
        }
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(ErrorRecord::invalid(field, format!("`{v}`: values must be finite")));
    }
    Ok(xs)
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` and `i`.
pub fn parse_complex(field: &str, v: &str) -> CliResult<(f64, f64)> {
    let s: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || ErrorRecord::invalid(field, format!("`{v}`: expected a complex number like 0.5+2i"));
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().map(|re| (re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not the leading one or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    Ok((re.parse().map_err(|_| bad())?, im))
}

fn write_output(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| ErrorRecord::io(path, e)),
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                // a closed pipe downstream is not an error of ours
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(ErrorRecord {
                    error: "io".into(),
                    field: Some("out".into()),
                    message: format!("stdout: {e}"),
                    failed_checks: vec![],
                }),
                _ => Ok(()),
            }
        }
    }
}

fn suite_config(
    r: &Resolver,
    common: &CommonArgs,
    tol_scale: &Option<String>,
    lambda: &Option<String>,
    samples: &Option<String>,
) -> CliResult<SuiteConfig> {
    let d = SuiteConfig::default();
    let cfg = SuiteConfig {
        seed: r.parse("seed", &common.seed, d.seed)?,
        tol_scale: r.parse("tol-scale", tol_scale, d.tol_scale)?,
        samples: match r.raw("samples", samples) {
            None => None,
            Some(_) => Some(r.parse("samples", samples, 0usize)?),
        },
        a: r.matrix(&common.a)?,
        lambda: r.parse("lambda", lambda, d.lambda)?,
        radius: r.parse("N", &common.n, d.radius)?,
    };
    if !(cfg.tol_scale > 0.0 && cfg.tol_scale.is_finite()) {
        return Err(ErrorRecord::invalid("tol-scale", "must be positive and finite"));
    }
    if cfg.samples == Some(0) {
        return Err(ErrorRecord::invalid("samples", "must be at least 1"));
    }
    if !(cfg.lambda > 0.0 && cfg.lambda != 1.0 && cfg.lambda.is_finite()) {
        return Err(ErrorRecord::invalid("lambda", "must be positive, finite and different from 1"));
    }
    Ok(cfg)
}

fn render_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => output::to_json(report),
        Format::Csv => {
            let mut t = Table::new(&["suite", "seed", "name", "residual", "threshold", "pass", "paper_ref"]);
            for c in &report.checks {
                t.push(vec![
                    Cell::Text(report.suite.clone()),
                    Cell::Text(report.seed.to_string()),
                    Cell::Text(c.name.clone()),
                    Cell::Float(c.residual),
                    Cell::Float(c.threshold),
                    Cell::Bool(c.pass),
                    Cell::Text(c.paper_ref.clone()),
                ]);
            }
            t.to_csv()
        }
        Format::Text => {
            let mut s = format!("suite {} (seed {})\n", report.suite, report.seed);
            for c in &report.checks {
                s.push_str(&format!(
                    "{} {:<40} residual {} threshold {}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    output::fmt17(c.residual),
                    output::fmt17(c.threshold),
                ));
            }
            let failed = report.failures().len();
            s.push_str(&format!("{} checks, {} failed\n", report.checks.len(), failed));
            s
        }
    }
}

fn check_outcome(report: &Report) -> CliResult<()> {
    let failed: Vec<String> = report.failures().iter().map(|c| c.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(ErrorRecord {
            error: "check_failed".into(),
            field: None,
            message: format!("{} of {} checks failed", failed.len(), report.checks.len()),
            failed_checks: failed,
        })
    }
}

fn verify(r: &Resolver, args: &VerifyArgs) -> CliResult<()> {
    let suite: Suite = r.parse("suite", &args.suite, Suite::All)?;
    let cfg = suite_config(r, &args.common, &args.tol_scale, &args.lambda, &args.samples)?;
    let format = r.format(&args.common.format, Format::Json)?;
    let report = run_suite(suite, &cfg);
    write_output(&r.path("out", &args.common.out), &render_report(&report, format))?;
    check_outcome(&report)
}

/// Loose mirror of [`Report`] for reading saved reports, where floats may be `null`.
#[derive(Debug, serde::Deserialize)]
struct SavedReport {
    suite: String,
    seed: u64,
    checks: Vec<SavedCheck>,
}

#[derive(Debug, serde::Deserialize)]
struct SavedCheck {
    name: String,
    residual: Option<f64>,
    threshold: Option<f64>,
    pass: bool,
    paper_ref: String,
}

fn report(r: &Resolver, args: &ReportArgs) -> CliResult<()> {
    let format = r.format(&args.common.format, Format::Text)?;
    let report = match r.path("input", &args.input) {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| ErrorRecord::invalid("input", format!("{}: {e}", path.display())))?;
            let saved: SavedReport = serde_json::from_str(&text)
                .map_err(|e| ErrorRecord::invalid("input", format!("{}: {e}", path.display())))?;
            Report {
                suite: saved.suite,
                seed: saved.seed,
                checks: saved
                    .checks
                    .into_iter()
                    .map(|c| Check {
                        name: c.name,
                        residual: c.residual.unwrap_or(f64::NAN),
                        threshold: c.threshold.unwrap_or(f64::NAN),
                        pass: c.pass,
                        paper_ref: c.paper_ref,
                    })
                    .collect(),
            }
        }
        None => {
            let suite: Suite = r.parse("suite", &args.suite, Suite::All)?;
            let cfg = suite_config(r, &args.common, &args.tol_scale, &args.lambda, &args.samples)?;
            run_suite(suite, &cfg)
        }
    };
    write_output(&r.path("out", &args.common.out), &render_report(&report, format))?;
    check_outcome(&report)
}

fn table_output(t: &Table, format: Format) -> String {
    match format {
        Format::Json => t.to_json(),
        _ => t.to_csv(),
    }
}

fn export_flow(r: &Resolver, z: &Option<String>, s_range: &Option<String>, common: &CommonArgs) -> CliResult<()> {
    let start = parse_floats("z", &r.raw("z", z).unwrap_or_else(|| "0,1,0,1".into()), Some(4))?;
    let z = ProductPoint::from_coords([start[0], start[1], start[2], start[3]])
        .map_err(|e| ErrorRecord::invalid("z", e.to_string()))?;
    let range = parse_range("s-range", &r.raw("s-range", s_range).unwrap_or_else(|| "-2:2:0.1".into()))?;
    let mut t = Table::new(&["s", "x1", "y1", "x2", "y2"]);
    for s in range {
        let p = normal_flow(&z, s).map_err(|e| ErrorRecord::invalid("s-range", e.to_string()))?;
        let [x1, y1, x2, y2] = p.coords();
        t.push([s, x1, y1, x2, y2].map(Cell::Float).to_vec());
    }
    write_output(&r.path("out", &common.out), &table_output(&t, r.format(&common.format, Format::Csv)?))
}

fn export_leaf_metric(
    r: &Resolver,
    t_range: &Option<String>,
    heights: &Option<String>,
    common: &CommonArgs,
) -> CliResult<()> {
    let ts = parse_range("t-range", &r.raw("t-range", t_range).unwrap_or_else(|| "-1:1:0.5".into()))?;
    let ys = parse_floats(
        "heights",
        &r.raw("heights", heights).unwrap_or_else(|| "0.7071067811865476,1,2".into()),
        None,
    )?;
    let mut t = Table::new(&["y1", "y2", "t", "g_tt", "g_xx", "g_yy"]);
    for &y1 in &ys {
        for &y2 in &ys {
            let z = ProductPoint::new(0.0, y1, 0.0, y2).map_err(|e| ErrorRecord::invalid("heights", e.to_string()))?;
            for &tt in &ts {
                let g = leaf_metric(&z, tt).map_err(|e| ErrorRecord::invalid("heights", e.to_string()))?;
                t.push([y1, y2, tt, g[(0, 0)], g[(1, 1)], g[(2, 2)]].map(Cell::Float).to_vec());
            }
        }
    }
    write_output(&r.path("out", &common.out), &table_output(&t, r.format(&common.format, Format::Csv)?))
}

#[derive(Debug, Serialize)]
struct LimitSetExport {
    matrix: IntMatrix2,
    #[serde(serialize_with = "ser17")]
    lambda: f64,
    radius: u32,
    clusters: usize,
    lines: Vec<LineExport>,
    points: Vec<PointExport>,
}

#[derive(Debug, Serialize)]
struct LineExport {
    /// `[re, im]` of each dual coordinate.
    dual: [[output::F17; 2]; 3],
    cluster_size: usize,
    kind: String,
    #[serde(serialize_with = "ser17_opt")]
    parameter: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PointExport {
    coords: [[output::F17; 2]; 3],
    cluster_size: usize,
}

fn ser17_opt<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser17(v, s),
        None => s.serialize_none(),
    }
}

fn complex_pairs(c: [num_complex::Complex64; 3]) -> [[output::F17; 2]; 3] {
    c.map(|z| [output::F17(z.re), output::F17(z.im)])
}

fn export_limit_set(r: &Resolver, common: &CommonArgs) -> CliResult<()> {
    let a = r.matrix(&common.a)?;
    let radius: u32 = r.parse("N", &common.n, 8)?;
    let spec = ToralGroupSpec::new(a).map_err(|e| ErrorRecord::invalid("A", e.to_string()))?;
    let kernels = pseudo_limit_kernels(&spec, radius, DEFAULT_CLUSTER_EPS, DEFAULT_RANK_TOL)
        .map_err(|e| ErrorRecord::invalid("N", e.to_string()))?;
    let export = LimitSetExport {
        matrix: a,
        lambda: spec.lambda(),
        radius,
        clusters: kernels.clusters,
        lines: kernels
            .lines
            .iter()
            .map(|l| {
                let (kind, parameter) = match classify_limit_line(&l.line, 1e-8) {
                    Some(LimitLineKind::AtInfinity) => ("at_infinity", None),
                    Some(LimitLineKind::FirstPencil(r)) => ("first_pencil", Some(r)),
                    Some(LimitLineKind::SecondPencil(r)) => ("second_pencil", Some(r)),
                    None => ("unclassified", None),
                };
                LineExport {
                    dual: complex_pairs(l.line.dual()),
                    cluster_size: l.cluster_size,
                    kind: kind.into(),
                    parameter,
                }
            })
            .collect(),
        points: kernels
            .points
            .iter()
            .map(|p| PointExport {
                coords: complex_pairs(p.point.coords()),
                cluster_size: p.cluster_size,
            })
            .collect(),
    };
    write_output(&r.path("out", &common.out), &output::to_json(&export))
}

fn export_orbit(r: &Resolver, base: &Option<String>, common: &CommonArgs) -> CliResult<()> {
    let a = r.matrix(&common.a)?;
    let radius: u32 = r.parse("N", &common.n, 4)?;
    let spec = ToralGroupSpec::new(a).map_err(|e| ErrorRecord::invalid("A", e.to_string()))?;
    let raw = r.raw("base", base).unwrap_or_else(|| "i,i".into());
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err(ErrorRecord::invalid("base", format!("`{raw}`: expected two complex numbers z1,z2")));
    }
    let (x1, y1) = parse_complex("base", parts[0])?;
    let (x2, y2) = parse_complex("base", parts[1])?;
    let z = ProductPoint::new(x1, y1, x2, y2)
        .map_err(|_| ErrorRecord::invalid("base", format!("`{raw}`: imaginary parts must be positive")))?;
    let mut t = Table::new(&["k", "n", "m", "x1", "y1", "x2", "y2"]);
    for g in word_ball(radius) {
        let p = toral_act(&spec, &g, &z).map_err(|e| ErrorRecord::invalid("base", e.to_string()))?;
        let [px1, py1, px2, py2] = p.coords();
        t.push(vec![
            Cell::Int(g.k),
            Cell::Int(g.n),
            Cell::Int(g.m),
            Cell::Float(px1),
            Cell::Float(py1),
            Cell::Float(px2),
            Cell::Float(py2),
        ]);
    }
    write_output(&r.path("out", &common.out), &table_output(&t, r.format(&common.format, Format::Csv)?))
}

#[derive(Debug, Serialize)]
struct DomainExport {
    matrix: IntMatrix2,
    #[serde(serialize_with = "ser17")]
    lambda: f64,
    /// `{1 ≤ Im z1 < λ}` and `P (Re z1, Re z2) ∈ [0, 1)²`, the rest free.
    description: String,
    #[serde(serialize_with = "ser17_slice")]
    eigenbasis: Vec<f64>,
    #[serde(serialize_with = "ser17_slice")]
    lattice_basis: Vec<f64>,
    #[serde(serialize_with = "ser17_slice")]
    im_z1_range: Vec<f64>,
    components: usize,
    /// A sample point, its representative and the reducing element.
    sample: DomainSample,
    notes: Vec<StructuralNote>,
}

#[derive(Debug, Serialize)]
struct DomainSample {
    #[serde(serialize_with = "ser17_slice")]
    point: Vec<f64>,
    #[serde(serialize_with = "ser17_slice")]
    representative: Vec<f64>,
    reduce: [i64; 3],
}

fn export_domain(r: &Resolver, common: &CommonArgs) -> CliResult<()> {
    let a = r.matrix(&common.a)?;
    let spec = ToralGroupSpec::new(a).map_err(|e| ErrorRecord::invalid("A", e.to_string()))?;
    let z = ProductPoint::new(2.5, 7.0, -1.25, 0.3).expect("upper half-planes");
    let red = fundamental_domain_reduce(&spec, &z).map_err(|e| ErrorRecord::invalid("A", e.to_string()))?;
    let row_major = |m: nalgebra::Matrix2<f64>| vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
    let export = DomainExport {
        matrix: a,
        lambda: spec.lambda(),
        description: "1 <= Im z1 < lambda, P (Re z1, Re z2) in [0, 1)^2, Im z2 > 0 free; \
                      the leaf parameter is a free real factor"
            .into(),
        eigenbasis: row_major(spec.eigenbasis()),
        lattice_basis: row_major(spec.lattice_basis()),
        im_z1_range: vec![1.0, spec.lambda()],
        components: 4,
        sample: DomainSample {
            point: z.coords().to_vec(),
            representative: red.representative.coords().to_vec(),
            reduce: [red.reduce.k, red.reduce.n, red.reduce.m],
        },
        notes: structural_notes(&spec),
    };
    write_output(&r.path("out", &common.out), &output::to_json(&export))
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let r = Resolver { file: &file };
    match &cli.command {
        Command::Verify(args) => verify(&r, args),
        Command::Report(args) => report(&r, args),
        Command::Export { kind } => match kind {
            ExportKind::Flow { z, s_range, common } => export_flow(&r, z, s_range, common),
            ExportKind::LeafMetric { t_range, heights, common } => export_leaf_metric(&r, t_range, heights, common),
            ExportKind::LimitSet { common } => export_limit_set(&r, common),
            ExportKind::Orbit { base, common } => export_orbit(&r, base, common),
            ExportKind::Domain { common } => export_domain(&r, common),
        },
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_PASS;
            }
            let rec = ErrorRecord {
                error: "invalid_config".into(),
                field: e
                    .get(clap::error::ContextKind::InvalidArg)
                    .map(|a| a.to_string()),
                message: e.kind().to_string(),
                failed_checks: vec![],
            };
            eprint!("{e}");
            eprintln!("{}", serde_json::to_string(&rec).expect("serializable"));
            return EXIT_INVALID;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_PASS,
        Err(rec) => {
            eprintln!("{}", serde_json::to_string(&rec).expect("serializable"));
            rec.exit_code()
        }
    }
}
