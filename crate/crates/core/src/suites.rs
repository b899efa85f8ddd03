//! Verification suites: each check reduces a property to one residual and a
//! threshold. The command-line front end and the acceptance tests both run
//! these.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::{
    self, curve_speed, geodesic_residual, product_distance, pullback, MetricSpec, MixedPoint,
    ProductPoint, FD_STEP_FIRST, FD_STEP_SECOND,
};
use crate::heisenberg::{
    self, brute_force_meet_count, factored_proper_discontinuity_check, heis_act, heis_leaf_jacobian,
    heis_leaf_separation_numeric, heis_normal_curve, heis_pullback_metric, heis_rectify,
    heis_rectify_inverse, heis_reduce, heis_word_ball, standard_generators, HeisBox, HeisElement,
    HeisLattice,
};
use crate::kleinian::{
    self, classify_limit_line, int_inverse, int_mul, lattice_iso_test, proper_discontinuity_brute_force,
    proper_discontinuity_count, pseudo_limit_kernels, sol_lattice_embed, toral_element, word_ball,
    word_set, Box4, Form, IntMatrix2, IsoResult, ToralGroupSpec, ToralWord, DEFAULT_CLUSTER_EPS,
    DEFAULT_ISO_BOUND, DEFAULT_RANK_TOL,
};
use crate::output::ser17;
use crate::projective::{general_position_max, ProjectivePoint};
use crate::quotient::{heis_quotient_check, sol_quotient_check, SolGroup};
use crate::sol::{
    self, flow_equivariance_defect, leaf_embed, leaf_jacobian, leaf_metric, leaf_separation_numeric,
    normal_flow, rectify, rectify_inverse, rectify_isometric, rectify_isometric_inverse,
    rectify_isometric_jacobian, shape_operator, sol_act, LeafIsometry, SolElement, SolParams,
    DEFAULT_SEARCH_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Sol,
    Heis,
    Kleinian,
    Quotient,
    All,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Sol, Suite::Heis, Suite::Kleinian, Suite::Quotient];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Sol => "sol",
            Suite::Heis => "heis",
            Suite::Kleinian => "kleinian",
            Suite::Quotient => "quotient",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sol" => Ok(Suite::Sol),
            "heis" => Ok(Suite::Heis),
            "kleinian" => Ok(Suite::Kleinian),
            "quotient" => Ok(Suite::Quotient),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite `{s}` (expected sol, heis, kleinian, quotient or all)")),
        }
    }
}

/// Parameters shared by all suites.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Thresholds are divided by this, so values below 1 loosen them.
    pub tol_scale: f64,
    /// Overrides every per-check sample count.
    pub samples: Option<usize>,
    pub a: IntMatrix2,
    /// `λ` of the Sol action in the equivariance check.
    pub lambda: f64,
    /// Word-ball radius for the limit-set checks.
    pub radius: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol_scale: 1.0,
            samples: None,
            a: [2, 1, 1, 1],
            lambda: std::f64::consts::E,
            radius: 8,
        }
    }
}

impl SuiteConfig {
    fn count(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "ser17")]
    pub residual: f64,
    #[serde(serialize_with = "ser17")]
    pub threshold: f64,
    pub pass: bool,
    pub paper_ref: String,
}

impl Check {
    /// Passes when `residual ≤ threshold`; a NaN residual fails.
    pub fn new(name: &str, residual: f64, threshold: f64, paper_ref: &str) -> Self {
        Self {
            name: name.into(),
            residual,
            threshold,
            pass: residual <= threshold,
            paper_ref: paper_ref.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

struct Recorder<'a> {
    cfg: &'a SuiteConfig,
    checks: Vec<Check>,
}

impl Recorder<'_> {
    fn push(&mut self, name: &str, residual: f64, threshold: f64, paper_ref: &str) {
        self.checks
            .push(Check::new(name, residual, threshold / self.cfg.tol_scale, paper_ref));
    }

    /// A failed computation is recorded as a NaN residual rather than aborting the suite.
    fn push_result<E>(&mut self, name: &str, residual: Result<f64, E>, threshold: f64, paper_ref: &str) {
        self.push(name, residual.unwrap_or(f64::NAN), threshold, paper_ref);
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Report {
    let mut rec = Recorder { cfg, checks: Vec::new() };
    let selected: Vec<Suite> = match suite {
        Suite::All => Suite::ALL.to_vec(),
        s => vec![s],
    };
    for s in selected {
        match s {
            Suite::Sol => sol_checks(&mut rec),
            Suite::Heis => heis_checks(&mut rec),
            Suite::Kleinian => kleinian_checks(&mut rec),
            Suite::Quotient => quotient_checks(&mut rec),
            Suite::All => unreachable!(),
        }
    }
    Report {
        suite: suite.name().into(),
        seed: cfg.seed,
        checks: rec.checks,
    }
}

fn random_upper(rng: &mut ChaCha8Rng) -> ProductPoint {
    ProductPoint::new(
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-2.0f64..2.0).exp(),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-2.0f64..2.0).exp(),
    )
    .expect("positive imaginary parts")
}

fn random_sol(rng: &mut ChaCha8Rng) -> SolElement {
    SolElement::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
    )
}

/// Separation pairs `(s0, s1)`.
pub const SEPARATION_PAIRS: [(f64, f64); 4] = [(0.0, 0.5), (0.0, 1.0), (0.0, 2.0), (-1.0, 1.0)];

pub fn equivariance_defect(cfg: &SuiteConfig, samples: usize) -> Result<f64, sol::SolError> {
    let mut rng = cfg.rng(1);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let params = loop {
            let m: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            if (m[0] * m[3] - m[1] * m[2]).abs() > 0.1 {
                break SolParams::new(cfg.lambda, m[0], m[1], m[2], m[3])?;
            }
        };
        let z = random_upper(&mut rng);
        let g = random_sol(&mut rng);
        let s = rng.gen_range(-2.0..2.0);
        worst = worst.max(flow_equivariance_defect(&params, &z, &g, s)?);
    }
    Ok(worst)
}

/// Largest geodesic residual and speed defect of the normal-flow curves.
pub fn flow_geodesy(cfg: &SuiteConfig, samples: usize) -> Result<(f64, f64), geometry::GeometryError> {
    let mut rng = cfg.rng(2);
    let metric = MetricSpec::HalfHyperbolicProduct;
    let (mut geo, mut speed) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let z = ProductPoint::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-1.0f64..1.0).exp(),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-1.0f64..1.0).exp(),
        )?;
        let t = rng.gen_range(-1.0..1.0);
        let curve = |s: f64| normal_flow(&z, s).map(|p| p.coords().to_vec()).unwrap_or_default();
        geo = geo.max(geodesic_residual(&metric, curve, t, FD_STEP_SECOND)?);
        speed = speed.max((curve_speed(&metric, curve, t, FD_STEP_FIRST)? - 1.0).abs());
    }
    Ok((geo, speed))
}

/// Pullback through the leaf map against the closed form, and the closed form
/// at `z0 = (i/√2, i/√2)` against the Sol metric.
pub fn leaf_metric_defects(cfg: &SuiteConfig, samples: usize) -> Result<(f64, f64), sol::SolError> {
    let mut rng = cfg.rng(3);
    let params = SolParams::standard();
    let metric = MetricSpec::HalfHyperbolicProduct;
    let (mut numeric, mut special) = (0.0f64, 0.0f64);
    let z0 = sol::special_point();
    for _ in 0..samples {
        let z = ProductPoint::new(0.0, rng.gen_range(-1.0f64..1.0).exp(), 0.0, rng.gen_range(-1.0f64..1.0).exp())?;
        let g = SolElement::new(rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let image = leaf_embed(&params, &z, &g)?;
        let j = leaf_jacobian(&params, &z, &g);
        let jac = DMatrix::from_fn(4, 3, |r, c| j[(r, c)]);
        let pulled = pullback(&metric, &image.coords(), &jac)?;
        let closed = leaf_metric(&z, g.t)?;
        let diff = (0..3)
            .flat_map(|r| (0..3).map(move |c| (r, c)))
            .map(|(r, c)| (pulled[(r, c)] - closed[(r, c)]).abs())
            .fold(0.0, f64::max);
        numeric = numeric.max(diff);
        let sol_metric = Matrix3::from_diagonal(&Vector3::new(1.0, (-2.0 * g.t).exp(), (2.0 * g.t).exp()));
        special = special.max((leaf_metric(&z0, g.t)? - sol_metric).amax());
    }
    Ok((numeric, special))
}

/// The metric pulled back through `Ψ̃` on a leaf, against the Sol metric.
pub fn isometric_rectification_defect(cfg: &SuiteConfig, samples: usize) -> Result<f64, sol::SolError> {
    let mut rng = cfg.rng(4);
    let metric = MetricSpec::HalfHyperbolicProduct;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
        let image = rectify_isometric(q[0], q[1], q[2], q[3])?;
        let j = rectify_isometric_jacobian(q[0], q[1], q[2], q[3]);
        let jac = DMatrix::from_fn(4, 3, |r, c| j[(r, c)]);
        let pulled = pullback(&metric, &image.coords(), &jac)?;
        let expected = [1.0, (-2.0 * q[0]).exp(), (2.0 * q[0]).exp()];
        for r in 0..3 {
            for c in 0..3 {
                let e = if r == c { expected[r] } else { 0.0 };
                worst = worst.max((pulled[(r, c)] - e).abs() / expected[r].max(expected[c]).max(1.0));
            }
        }
    }
    Ok(worst)
}

/// Round trips through `Ψ` and `Ψ̃`.
pub fn rectification_round_trip(cfg: &SuiteConfig, samples: usize) -> Result<f64, sol::SolError> {
    let mut rng = cfg.rng(5);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let back = rectify_inverse(&rectify(q[0], q[1], q[2], q[3])?)?;
        let back_iso = rectify_isometric_inverse(&rectify_isometric(q[0], q[1], q[2], q[3])?)?;
        for k in 0..4 {
            worst = worst.max((back[k] - q[k]).abs()).max((back_iso[k] - q[k]).abs());
        }
        let z = random_upper(&mut rng);
        let r = rectify_inverse(&z)?;
        let z_back = rectify(r[0], r[1], r[2], r[3])?;
        worst = worst.max(z_back.sup_distance(&z) / z.coords().iter().fold(1.0f64, |m, c| m.max(c.abs())));
    }
    Ok(worst)
}

/// Relative distance defect of the leaf isometries transported through `Ψ`.
pub fn leaf_isometry_defect(cfg: &SuiteConfig, samples: usize) -> Result<f64, sol::SolError> {
    let mut rng = cfg.rng(6);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let iso = LeafIsometry::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.0..1.0),
        );
        let p = random_upper(&mut rng);
        let q = random_upper(&mut rng);
        let before = product_distance(&p, &q);
        let after = product_distance(&iso.apply_to_point(&p)?, &iso.apply_to_point(&q)?);
        worst = worst.max((after - before).abs() / before.max(1.0));
    }
    Ok(worst)
}

/// Largest deviation of the principal curvatures from `{−1, −1, 0}` on a 5×5 grid.
pub fn principal_curvature_defect() -> Result<f64, sol::SolError> {
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let t = -1.0 + 0.5 * i as f64;
            let s = -1.0 + 0.5 * j as f64;
            let so = shape_operator(t, s)?;
            for (ev, want) in so.eigenvalues.iter().zip([-1.0, -1.0, 0.0]) {
                worst = worst.max((ev - want).abs());
            }
        }
    }
    Ok(worst)
}

pub fn sol_separation_defect() -> Result<f64, sol::SolError> {
    let mut worst = 0.0f64;
    for (s0, s1) in SEPARATION_PAIRS {
        let est = leaf_separation_numeric(s0, s1, DEFAULT_SEARCH_BUDGET)?;
        worst = worst.max((est.distance - (s1 - s0).abs()).abs());
    }
    Ok(worst)
}

pub fn heis_separation_defect() -> Result<f64, heisenberg::HeisError> {
    let mut worst = 0.0f64;
    for (s0, s1) in SEPARATION_PAIRS {
        let est = heis_leaf_separation_numeric(s0, s1, DEFAULT_SEARCH_BUDGET)?;
        worst = worst.max((est.distance - (s1 - s0).abs()).abs());
    }
    Ok(worst)
}

fn sol_checks(rec: &mut Recorder) {
    let cfg = rec.cfg;
    rec.push_result(
        "sol.flow_equivariance",
        equivariance_defect(cfg, cfg.count(10_000)),
        1e-12,
        "normal flow commutes with the leaf maps",
    );
    match flow_geodesy(cfg, cfg.count(1_000)) {
        Ok((geo, speed)) => {
            rec.push("sol.flow_geodesic", geo, 1e-6, "normal flow lines are geodesics");
            rec.push("sol.flow_unit_speed", speed, 1e-10, "normal flow lines have unit speed");
        }
        Err(_) => {
            rec.push("sol.flow_geodesic", f64::NAN, 1e-6, "normal flow lines are geodesics");
            rec.push("sol.flow_unit_speed", f64::NAN, 1e-10, "normal flow lines have unit speed");
        }
    }
    match leaf_metric_defects(cfg, cfg.count(1_000)) {
        Ok((numeric, special)) => {
            rec.push("sol.leaf_metric_pullback", numeric, 1e-10, "induced metric on a leaf");
            rec.push("sol.leaf_metric_special_point", special, 1e-12, "leaf through z0 carries the Sol metric");
        }
        Err(_) => {
            rec.push("sol.leaf_metric_pullback", f64::NAN, 1e-10, "induced metric on a leaf");
            rec.push("sol.leaf_metric_special_point", f64::NAN, 1e-12, "leaf through z0 carries the Sol metric");
        }
    }
    rec.push_result(
        "sol.isometric_rectification_metric",
        isometric_rectification_defect(cfg, cfg.count(1_000)),
        1e-10,
        "isometric rectification pulls back the Sol metric",
    );
    rec.push_result(
        "sol.rectification_round_trip",
        rectification_round_trip(cfg, cfg.count(10_000)),
        1e-12,
        "global rectification of the foliation",
    );
    rec.push_result(
        "sol.leaf_isometries",
        leaf_isometry_defect(cfg, cfg.count(1_000)),
        1e-10,
        "leaf isometries extend to the product",
    );
    rec.push_result(
        "sol.principal_curvatures",
        principal_curvature_defect(),
        1e-6,
        "principal curvatures of each leaf are -1, -1, 0",
    );
    rec.push_result(
        "sol.leaf_separation",
        sol_separation_defect(),
        1e-4,
        "distance between leaves s0 and s1 is |s1 - s0|",
    );
}

fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-256i32..=256) as f64 / 64.0
}

fn dyadic_heis(rng: &mut ChaCha8Rng) -> HeisElement {
    HeisElement::new(dyadic(rng), dyadic(rng), dyadic(rng))
}

fn dyadic_mixed(rng: &mut ChaCha8Rng) -> MixedPoint {
    MixedPoint::from_coords([dyadic(rng), dyadic(rng), dyadic(rng), (rng.gen_range(1..=256) as f64) / 64.0])
        .expect("positive imaginary part")
}

/// Group and action axioms on dyadic samples, where floating arithmetic is exact.
pub fn heis_axiom_defects(cfg: &SuiteConfig, samples: usize) -> (f64, f64, usize) {
    let mut rng = cfg.rng(11);
    let (mut group, mut action, mut fixed) = (0.0f64, 0.0f64, 0);
    let id = HeisElement::IDENTITY;
    for _ in 0..samples {
        let (g, h, k) = (dyadic_heis(&mut rng), dyadic_heis(&mut rng), dyadic_heis(&mut rng));
        group = group
            .max(g.mul(&h).mul(&k).sup_distance(&g.mul(&h.mul(&k))))
            .max(g.mul(&g.inv()).sup_distance(&id))
            .max(g.inv().mul(&g).sup_distance(&id))
            .max(g.mul(&id).sup_distance(&g))
            .max(id.mul(&g).sup_distance(&g));
        let m = dyadic_mixed(&mut rng);
        action = action
            .max(heis_act(&g.mul(&h), &m).sup_distance(&heis_act(&g, &heis_act(&h, &m))))
            .max(heis_act(&id, &m).sup_distance(&m));
        if !g.is_identity() && heis_act(&g, &m) == m {
            fixed += 1;
        }
    }
    (group, action, fixed)
}

/// Smallest singular value of the orbit-map Jacobian relative to the largest.
pub fn heis_min_relative_singular_value(cfg: &SuiteConfig, samples: usize) -> f64 {
    let mut rng = cfg.rng(12);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let m = MixedPoint::from_coords([
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-3.0f64..3.0).exp(),
        ])
        .expect("positive");
        let j = heis_leaf_jacobian(&m, &HeisElement::IDENTITY);
        let sv = j.singular_values();
        worst = worst.min(sv.min() / sv.max());
    }
    worst
}

pub fn heis_rectification_defects(cfg: &SuiteConfig, samples: usize) -> Result<(f64, f64), heisenberg::HeisError> {
    let mut rng = cfg.rng(13);
    let (mut round_trip, mut metric) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let g = HeisElement::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let s = rng.gen_range(-2.0..2.0);
        let m = heis_rectify(&g, s)?;
        let (g2, s2) = heis_rectify_inverse(&m);
        round_trip = round_trip.max(g2.sup_distance(&g)).max((s2 - s).abs());

        let base = heis_rectify(&HeisElement::IDENTITY, s)?;
        let j = heis_leaf_jacobian(&base, &g);
        let jac = DMatrix::from_fn(4, 3, |r, c| j[(r, c)]);
        let pulled = pullback(&MetricSpec::EuclideanTimesHyperbolic, &heis_act(&g, &base).coords(), &jac)?;
        let closed = heis_pullback_metric(s.exp())?;
        for r in 0..3 {
            for c in 0..3 {
                metric = metric.max((pulled[(r, c)] - closed[(r, c)]).abs());
            }
        }
    }
    Ok((round_trip, metric))
}

/// Geodesic residual and speed defect of the normal curves in ℂ×ℍ.
pub fn heis_normal_geodesy(cfg: &SuiteConfig, samples: usize) -> Result<(f64, f64), geometry::GeometryError> {
    let mut rng = cfg.rng(14);
    let metric = MetricSpec::EuclideanTimesHyperbolic;
    let (mut geo, mut speed) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let m = MixedPoint::from_coords([
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-1.0f64..1.0).exp(),
        ])?;
        let t = rng.gen_range(-1.0..1.0);
        let curve = |s: f64| heis_normal_curve(&m, s).coords().to_vec();
        geo = geo.max(geodesic_residual(&metric, curve, t, FD_STEP_SECOND)?);
        speed = speed.max((curve_speed(&metric, curve, t, FD_STEP_FIRST)? - 1.0).abs());
    }
    Ok((geo, speed))
}

/// Samples whose reduction to the fundamental cube fails to be unique or
/// fails to reassemble exactly (up to rounding `1e-12`).
pub fn heis_reduction_failures(cfg: &SuiteConfig, samples: usize) -> usize {
    let mut rng = cfg.rng(15);
    let lattice = HeisLattice::INTEGER;
    let mut failures = 0;
    for _ in 0..samples {
        let g = HeisElement::new(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        let (l, r) = heis_reduce(&lattice, &g);
        let half_open = |e: &HeisElement| {
            (0.0..1.0).contains(&e.a) && (0.0..1.0).contains(&e.b) && (0.0..1.0).contains(&e.c)
        };
        let mut ok = lattice.contains(&l) && half_open(&r) && l.mul(&r).sup_distance(&g) <= 1e-12;
        // any other coset representative δ⁻¹ r, δ ≠ 1, must leave the cube
        for d in heis_word_ball(3) {
            let delta = d.to_element();
            if delta.is_identity() {
                continue;
            }
            if half_open(&delta.inv().mul(&r)) {
                ok = false;
            }
        }
        if !ok {
            failures += 1;
        }
    }
    failures
}

/// `Σ |count_X − count_XY| + |count_X − brute force|` over word balls `N ≤ 4`
/// and several leaf heights.
pub fn factored_discontinuity_mismatch() -> usize {
    let cube = HeisBox::unit_cube();
    let mut mismatch = 0;
    for n in 0..=4 {
        let sample: Vec<HeisElement> = heis_word_ball(n).iter().map(|g| g.to_element()).collect();
        let brute = brute_force_meet_count(&sample, &cube, 4);
        for y in [-1.0, 0.0, 0.7] {
            let c = factored_proper_discontinuity_check(&sample, &cube, y);
            mismatch += c.count_x.abs_diff(c.count_xy) + c.count_x.abs_diff(brute);
        }
    }
    mismatch
}

fn heis_checks(rec: &mut Recorder) {
    let cfg = rec.cfg;
    let (group, action, fixed) = heis_axiom_defects(cfg, cfg.count(1_000));
    rec.push("heis.group_axioms", group, 1e-14, "group law of Heis");
    rec.push("heis.action_axioms", action, 1e-14, "Heis acts on C x H");
    rec.push("heis.free_action", fixed as f64, 0.0, "the action is free");
    let rel = heis_min_relative_singular_value(cfg, cfg.count(1_000));
    // rank 3 means the third singular value stays away from zero
    rec.push("heis.jacobian_rank", 1.0 / rel, 1e8, "the orbit map has rank 3");
    match heis_rectification_defects(cfg, cfg.count(1_000)) {
        Ok((rt, metric)) => {
            rec.push("heis.rectification_round_trip", rt, 1e-12, "rectification of the Heis foliation");
            rec.push("heis.pullback_metric", metric, 1e-10, "induced metric on a Heis leaf");
        }
        Err(_) => {
            rec.push("heis.rectification_round_trip", f64::NAN, 1e-12, "rectification of the Heis foliation");
            rec.push("heis.pullback_metric", f64::NAN, 1e-10, "induced metric on a Heis leaf");
        }
    }
    match heis_normal_geodesy(cfg, cfg.count(1_000)) {
        Ok((geo, speed)) => {
            rec.push("heis.normal_geodesic", geo, 1e-6, "normal curves are geodesics");
            rec.push("heis.normal_unit_speed", speed, 1e-10, "normal curves have unit speed");
        }
        Err(_) => {
            rec.push("heis.normal_geodesic", f64::NAN, 1e-6, "normal curves are geodesics");
            rec.push("heis.normal_unit_speed", f64::NAN, 1e-10, "normal curves have unit speed");
        }
    }
    let [m, n, k] = standard_generators();
    rec.push(
        "heis.commutator",
        m.commutator(&n).sup_distance(&k),
        0.0,
        "commutator of the standard generators is central",
    );
    rec.push(
        "heis.reduction_unique",
        heis_reduction_failures(cfg, cfg.count(1_000)) as f64,
        0.0,
        "the unit cube is a fundamental region",
    );
    rec.push(
        "heis.factored_discontinuity",
        factored_discontinuity_mismatch() as f64,
        0.0,
        "the factored action is properly discontinuous",
    );
    rec.push_result(
        "heis.leaf_separation",
        heis_separation_defect(),
        1e-4,
        "distance between Heis leaves s0 and s1 is |s1 - s0|",
    );
}

/// Number of kernel lines outside the two pencils plus the line at infinity,
/// and the general-position result for the lines found.
pub fn limit_line_summary(spec: &ToralGroupSpec, radius: u32) -> Result<(usize, usize, bool, usize), kleinian::KleinianError> {
    let kernels = pseudo_limit_kernels(spec, radius, DEFAULT_CLUSTER_EPS, DEFAULT_RANK_TOL)?;
    let unclassified = kernels
        .lines
        .iter()
        .filter(|l| classify_limit_line(&l.line, 1e-8).is_none())
        .count();
    let lines: Vec<_> = kernels.lines.iter().map(|l| l.line).collect();
    let gp = general_position_max(&lines);
    Ok((unclassified, gp.size, gp.exact, lines.len()))
}

/// The test box `x ∈ [0, 0.1]², y ∈ [1, 1.1]²`.
pub fn test_box() -> Box4 {
    Box4::new([0.0, 0.1], [1.0, 1.1], [0.0, 0.1], [1.0, 1.1])
}

/// `|c6 − c12| + |c12 − brute force|`, counting elements in symmetric differences.
pub fn discontinuity_instability(spec: &ToralGroupSpec) -> Result<usize, kleinian::KleinianError> {
    let b = test_box();
    let c6 = proper_discontinuity_count(spec, &b, 6)?;
    let c12 = proper_discontinuity_count(spec, &b, 12)?;
    let brute = proper_discontinuity_brute_force(spec, &b, 12)?;
    let (s6, s12, sb) = (word_set(&c6.elements), word_set(&c12.elements), word_set(&brute.elements));
    Ok(s6.symmetric_difference(&s12).count() + s12.symmetric_difference(&sb).count())
}

/// Relative disagreement between the projective action of the diagonalized
/// group and the Sol action of the embedded lattice.
pub fn embedding_disagreement(cfg: &SuiteConfig, spec: &ToralGroupSpec, samples: usize) -> Result<f64, String> {
    let mut rng = cfg.rng(21);
    let words = word_ball(3);
    let params = kleinian::embedding_params();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g = words[rng.gen_range(0..words.len())];
        let z = random_upper(&mut rng);
        let [x1, y1, x2, y2] = z.coords();
        let p = ProjectivePoint::affine(Complex64::new(x1, y1), Complex64::new(x2, y2)).map_err(|e| e.to_string())?;
        let image = p
            .apply(&toral_element(spec, &g, Form::Conjugated))
            .map_err(|e| e.to_string())?;
        let (w1, w2) = image.to_affine().ok_or("image at infinity")?;
        let sol = sol_act(&params, &sol_lattice_embed(spec, &g).map_err(|e| e.to_string())?, &z)
            .map_err(|e| e.to_string())?;
        let [a1, b1, a2, b2] = sol.coords();
        let scale = sol.coords().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let d = [w1.re - a1, w1.im - b1, w2.re - a2, w2.im - b2]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        worst = worst.max(d / scale);
    }
    Ok(worst)
}

fn int3_mul(x: &[[i64; 3]; 3], y: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    std::array::from_fn(|r| std::array::from_fn(|c| (0..3).map(|k| x[r][k] * y[k][c]).sum()))
}

/// Failures, in integer arithmetic, of the homomorphism property of the
/// integral form and of `t v t⁻¹ = A v`.
pub fn semidirect_failures(spec: &ToralGroupSpec) -> usize {
    let ball = word_ball(2);
    let mut failures = 0;
    for g in &ball {
        for h in &ball {
            let lhs = spec.integral_exact(&spec.compose(g, h));
            if lhs != int3_mul(&spec.integral_exact(g), &spec.integral_exact(h)) {
                failures += 1;
            }
        }
    }
    let t = ToralWord::new(1, 0, 0);
    let a = spec.a();
    for (n, m) in [(1, 0), (0, 1), (2, -3)] {
        let v = ToralWord::new(0, n, m);
        let conj = spec.compose(&spec.compose(&t, &v), &spec.inverse(&t));
        let av = ToralWord::new(0, a[0] * n + a[1] * m, a[2] * n + a[3] * m);
        if conj != av {
            failures += 1;
        }
    }
    failures
}

/// Failures of the isomorphism test on pairs with known answers: `(A, A)`,
/// `(A, A⁻¹)` and `(A, U A U⁻¹)` must be found with a verified conjugator,
/// and a trace-distinct pair must be refuted.
pub fn iso_failures(cfg: &SuiteConfig, a: &IntMatrix2) -> usize {
    let mut rng = cfg.rng(22);
    let verified = |b: &IntMatrix2| match lattice_iso_test(a, b, DEFAULT_ISO_BOUND) {
        Ok(IsoResult::Found { u, target }) => {
            let t = match target {
                kleinian::IsoTarget::B => *b,
                kleinian::IsoTarget::BInverse => int_inverse(b),
            };
            kleinian::int_det(&u).abs() == 1 && int_mul(&u, a) == int_mul(&t, &u)
        }
        _ => false,
    };
    let mut failures = 0;
    if !verified(a) {
        failures += 1;
    }
    if !verified(&int_inverse(a)) {
        failures += 1;
    }
    // elementary conjugators keep entries small
    for _ in 0..5 {
        let e = rng.gen_range(-2i64..=2);
        let u = if rng.gen_bool(0.5) { [1, e, 0, 1] } else { [1, 0, e, 1] };
        let b = int_mul(&int_mul(&u, a), &int_inverse(&u));
        if !verified(&b) {
            failures += 1;
        }
    }
    let tr = kleinian::int_trace(a);
    let other: IntMatrix2 = [tr.abs() + 1, 1, -1, 0];
    if !matches!(lattice_iso_test(a, &other, DEFAULT_ISO_BOUND), Ok(IsoResult::Refuted)) {
        failures += 1;
    }
    failures
}

fn kleinian_checks(rec: &mut Recorder) {
    let cfg = rec.cfg;
    let spec = match ToralGroupSpec::new(cfg.a) {
        Ok(s) => s,
        Err(_) => {
            rec.push("kleinian.spec", f64::NAN, 0.0, "A is a hyperbolic element of SL(2, Z)");
            return;
        }
    };
    match limit_line_summary(&spec, cfg.radius) {
        Ok((unclassified, size, exact, _)) => {
            rec.push(
                "kleinian.limit_lines_classified",
                unclassified as f64,
                0.0,
                "limit set is the line at infinity plus two pencils",
            );
            let defect = size.abs_diff(4) as f64 + if exact { 0.0 } else { 1.0 };
            rec.push("kleinian.general_position", defect, 0.0, "exactly four lines in general position");
        }
        Err(_) => {
            rec.push("kleinian.limit_lines_classified", f64::NAN, 0.0, "limit set is the line at infinity plus two pencils");
            rec.push("kleinian.general_position", f64::NAN, 0.0, "exactly four lines in general position");
        }
    }
    rec.push_result(
        "kleinian.proper_discontinuity",
        discontinuity_instability(&spec).map(|c| c as f64),
        0.0,
        "finitely many elements move the test box onto itself",
    );
    rec.push_result(
        "kleinian.lattice_embedding",
        embedding_disagreement(cfg, &spec, cfg.count(1_000)),
        1e-10,
        "the group is a lattice of Sol",
    );
    rec.push(
        "kleinian.semidirect_relation",
        semidirect_failures(&spec) as f64,
        0.0,
        "semidirect product relation t v t^-1 = A v",
    );
    rec.push(
        "kleinian.lattice_isomorphism",
        iso_failures(cfg, &cfg.a) as f64,
        0.0,
        "isomorphic iff A is conjugate in GL(2, Z) to B or B^-1",
    );
}

fn quotient_checks(rec: &mut Recorder) {
    let cfg = rec.cfg;
    let samples = cfg.count(1_000);
    match ToralGroupSpec::new(cfg.a)
        .map_err(|e| e.to_string())
        .and_then(|spec| sol_quotient_check(&SolGroup::Toral(spec), samples, cfg.seed).map_err(|e| e.to_string()))
    {
        Ok(r) => {
            rec.push("quotient.sol_leaf_preservation", r.leaf_residual, 1e-10, "the group preserves the leaves");
            rec.push("quotient.sol_orbit_invariance", r.orbit_residual, 1e-10, "fundamental-domain representatives are orbit invariant");
            rec.push("quotient.sol_reassembly", r.reassembly_residual, 1e-10, "representatives reassemble the point");
            rec.push("quotient.sol_relation", r.relation_residual, 1e-12, "lattice relation holds in Sol");
            rec.push("quotient.sol_exact_relations", r.exact_relation_failures as f64, 0.0, "lattice relations in integer arithmetic");
            rec.push(
                "quotient.component_count",
                r.component_count.abs_diff(4) as f64,
                0.0,
                "four invariant components",
            );
        }
        Err(_) => rec.push("quotient.sol", f64::NAN, 0.0, "the group preserves the leaves"),
    }
    let h = heis_quotient_check(&HeisLattice::INTEGER, samples, cfg.seed);
    rec.push("quotient.heis_leaf_invariance", h.leaf_residual, 0.0, "the lattice preserves Im w");
    rec.push("quotient.heis_orbit_invariance", h.orbit_residual, 1e-12, "cube representatives are orbit invariant");
    rec.push("quotient.heis_reassembly", h.reassembly_residual, 1e-12, "cube representatives reassemble the point");
    let commutator = h
        .commutator
        .map(|c| HeisElement::new(c[0], c[1], c[2]).sup_distance(&HeisElement::new(0.0, 0.0, 1.0)))
        .unwrap_or(f64::NAN);
    rec.push("quotient.heis_commutator", commutator, 0.0, "commutator of the lattice generators is (0, 0, 1)");
    rec.push(
        "quotient.heis_exact_relations",
        h.exact_relation_failures as f64,
        0.0,
        "lattice relations in exact arithmetic",
    );
}
