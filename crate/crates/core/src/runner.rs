//! Configuration-driven workflows behind the `twng` binary.
//!
//! Every command produces a [`RunReport`] plus a set of named text artifacts; both
//! are pure functions of the configuration (threads and output directory aside), so
//! repeated runs write byte-identical files.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::barriers::{self, BarrierParams, Lemma31Barrier, Slab};
use crate::config::{Command, RunConfig, StrategySpec};
use crate::domain::DiscreteDomain;
use crate::dpp::{self, GameParams, SolveOptions, SolveReport, ValueField};
use crate::error::{Error, Result};
use crate::game::{self, AwayFromMidpoint, Coupling, Strategy};
use crate::reference::{self, ENVELOPE_TOL};
use crate::stats;
use crate::walks::{self, CylinderConfig, Orientation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Informational checks are reported but do not affect the exit code.
    pub hard: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Command,
    pub base_seed: u64,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub measurements: BTreeMap<String, Value>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    /// All hard checks passed.
    pub pass: bool,
    /// Seconds; kept out of `report.json` so the file is reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

impl RunReport {
    fn new(command: Command, config: &RunConfig) -> Self {
        RunReport {
            command,
            base_seed: config.base_seed,
            config: config.clone(),
            checks: Vec::new(),
            measurements: BTreeMap::new(),
            artifacts: Vec::new(),
            pass: true,
            wall_time: 0.0,
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.push_check(name, pass, true, detail);
    }

    fn info(&mut self, name: &str, pass: bool, detail: String) {
        self.push_check(name, pass, false, detail);
    }

    fn push_check(&mut self, name: &str, pass: bool, hard: bool, detail: String) {
        assert!(self.checks.iter().all(|c| c.name != name), "check {name} declared twice");
        self.pass &= pass || !hard;
        self.checks.push(Check { name: name.into(), pass, hard, detail });
    }

    fn measure(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("measurements are serialisable");
        self.measurements.insert(name.into(), v);
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.hard && !c.pass)
    }
}

/// Command-line overrides on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub record: bool,
}

pub const DEFAULT_OUT: &str = "twng-out";

/// Named text outputs of a workflow.
type Artifacts = Vec<(&'static str, String)>;

/// Loads `config_path`, runs `command` and writes all outputs.
pub fn run(command: Command, config_path: &Path, opts: &RunOptions) -> Result<(RunReport, PathBuf)> {
    let mut cfg = RunConfig::load(config_path)?;
    if let Some(s) = opts.seed {
        cfg.base_seed = s;
    }
    if let Some(t) = opts.threads {
        cfg.threads = Some(t);
    }
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|p| cfg.base_dir.join(p)))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let report = run_config(command, &cfg, opts.record)?;
    let report = emit_report(report, &out)?;
    Ok((report, out))
}

/// Runs `command` for an already loaded configuration, without writing anything.
pub fn run_config(command: Command, cfg: &RunConfig, record: bool) -> Result<(RunReport, Artifacts)> {
    cfg.validate(command)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot build a pool of {:?} threads: {e}", cfg.threads)))?;
    let clock = Instant::now();
    let mut report = RunReport::new(command, cfg);
    let artifacts = pool.install(|| match command {
        Command::Solve => solve(cfg, &mut report),
        Command::Play => play(cfg, &mut report, record),
        Command::Cylinder => cylinder(cfg, &mut report),
        Command::Linewalk => linewalk(cfg, &mut report, false),
        Command::VerifyAppendixC => linewalk(cfg, &mut report, true),
        Command::VerifyConvergence => verify_convergence(cfg, &mut report),
        Command::VerifyLipschitz => verify_lipschitz(cfg, &mut report),
        Command::VerifyBarriers => verify_barriers(cfg, &mut report),
        Command::VerifyCoupling => verify_coupling(cfg, &mut report),
    })?;
    report.wall_time = clock.elapsed().as_secs_f64();
    Ok((report, artifacts))
}

/// Writes the artifacts and `report.json` under `dir` (created on demand).
pub fn emit_report((mut report, artifacts): (RunReport, Artifacts), dir: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    report.artifacts = artifacts.iter().map(|(name, _)| name.to_string()).collect();
    report.artifacts.push("report.json".into());
    for (name, body) in &artifacts {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    let path = dir.join("report.json");
    let mut body = serde_json::to_string_pretty(&report).expect("report is serialisable");
    body.push('\n');
    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(report)
}

/// `index,x1,…,xn,region,value`.
pub fn field_csv(field: &ValueField) -> String {
    let d = field.domain();
    let mut out = String::from("index");
    for k in 1..=d.dim() {
        let _ = write!(out, ",x{k}");
    }
    out.push_str(",region,value\n");
    for i in 0..d.len() {
        let _ = write!(out, "{i}");
        for c in d.point(i) {
            let _ = write!(out, ",{c}");
        }
        let _ = writeln!(out, ",{},{}", d.region(i).as_str(), field.value(i));
    }
    out
}

/// `quantity,value` table of the scalar measurements.
fn measurements_csv(report: &RunReport) -> String {
    let mut out = String::from("quantity,value\n");
    for (k, v) in &report.measurements {
        if let Some(x) = v.as_f64() {
            let _ = writeln!(out, "{k},{x}");
        } else if let Some(b) = v.as_bool() {
            let _ = writeln!(out, "{k},{b}");
        }
    }
    out
}

fn grid(cfg: &RunConfig, cmd: Command, eps: f64) -> Result<Arc<DiscreteDomain>> {
    let spec = cfg.domain_spec(cmd)?.clone();
    let h = cfg.params.h_for(eps)?;
    Ok(Arc::new(DiscreteDomain::build(spec, h, eps)?))
}

fn solve_field(
    cfg: &RunConfig,
    cmd: Command,
    domain: Arc<DiscreteDomain>,
    opts: SolveOptions,
) -> Result<(ValueField, SolveReport, GameParams)> {
    let params = GameParams::for_domain(cfg.params.p, &domain)?;
    let data = cfg.boundary_spec(cmd)?.field(domain, cfg.params.p, &cfg.base_dir)?;
    let (u, rep) = dpp::solve_from_field(data, &params, opts)?;
    Ok((u, rep, params))
}

fn record_solve(report: &mut RunReport, u: &ValueField, rep: &SolveReport, params: &GameParams) {
    report.measure("alpha", params.alpha);
    report.measure("beta", params.beta);
    report.measure("points", u.domain().len());
    report.measure("interior_points", u.domain().interior_points().len());
    report.measure("iterations", rep.iterations);
    report.measure("final_residual", rep.final_residual);
    report.measure("monotone_violations", rep.monotone_violations);
    report.check(
        "monotone_iteration",
        rep.monotone_violations == 0,
        format!("{} sweeps decreased a value by more than {:e}", rep.monotone_violations, dpp::MONOTONE_SLACK),
    );
    report.check(
        "bounds",
        dpp::check_bounds(u),
        format!("|u| ≤ sup|F| = {} up to {:e}", u.boundary_sup_abs(), dpp::BOUNDS_SLACK),
    );
}

/// Plane-type data is compared against its envelope, which needs a tighter solve.
fn envelope_options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions { tol: cfg.tol.min(ENVELOPE_TOL), max_iter: cfg.max_iter }
}

fn solve(cfg: &RunConfig, report: &mut RunReport) -> Result<Artifacts> {
    let cmd = Command::Solve;
    let domain = grid(cfg, cmd, cfg.params.eps()?)?;
    let n = domain.dim();
    let env = cfg.boundary_spec(cmd)?.envelope(n)?;
    let opts = if env.is_some() { envelope_options(cfg) } else { cfg.solve_options() };
    report.measure("tol_used", opts.tol);
    let (u, rep, params) = solve_field(cfg, cmd, domain, opts)?;
    record_solve(report, &u, &rep, &params);
    if let Some(env) = env {
        let ok = reference::plane_envelope_check(&u, &env)?;
        report.check(
            "plane_envelope",
            ok,
            format!("|u − ν·x − b| ≤ δ = {} up to {:e}", env.delta, reference::ENVELOPE_SLACK),
        );
    }
    if let Some(r) = cfg.boundary_spec(cmd)?.reference(cfg.params.p, n)? {
        let d = u.domain();
        let err = d
            .interior_points()
            .iter()
            .map(|&i| (u.value(i) - r.value(d.point(i))).abs())
            .fold(0.0, f64::max);
        report.measure("sup_error_vs_reference", err);
    }
    let stats = measurements_csv(report);
    Ok(vec![("field.csv", field_csv(&u)), ("stats.csv", stats)])
}

fn strategy(spec: &StrategySpec, u: &Arc<ValueField>, maximize: bool) -> Strategy {
    match spec {
        StrategySpec::Greedy => game::greedy_strategy(u.clone(), maximize),
        StrategySpec::Pull { target } => Strategy::PullToward(target.clone()),
        StrategySpec::Away { from } => Strategy::AwayFrom(from.clone()),
        StrategySpec::Noop => Strategy::Noop,
    }
}

fn play(cfg: &RunConfig, report: &mut RunReport, record: bool) -> Result<Artifacts> {
    let cmd = Command::Play;
    let spec = cfg.play_spec()?;
    let domain = grid(cfg, cmd, cfg.params.eps()?)?;
    let (u, rep, params) = solve_field(cfg, cmd, domain.clone(), cfg.solve_options())?;
    record_solve(report, &u, &rep, &params);
    let start = domain
        .nearest_point(&spec.start, 0.5 * domain.h())
        .filter(|&i| domain.is_interior(i))
        .ok_or_else(|| Error::Config(format!("play.start {:?} is not an interior lattice point", spec.start)))?;
    let u = Arc::new(u);
    let s_i = strategy(&spec.player_i, &u, true);
    let s_ii = strategy(&spec.player_ii, &u, false);
    let keep = if record { spec.record } else { 0 };
    let (est, transcripts) =
        game::estimate_value_recorded(&domain, start, &s_i, &s_ii, &u, &params, cfg.trials, cfg.base_seed, keep)?;
    let value = u.value(start);
    report.measure("start_point", domain.point(start));
    report.measure("dpp_value", value);
    report.measure("mc_mean", est.mean);
    report.measure("mc_stderr", est.stderr);
    report.measure("mean_steps", est.mean_steps);
    report.measure("trials", est.trials);
    if spec.player_i == StrategySpec::Greedy && spec.player_ii == StrategySpec::Greedy {
        let gap = (est.mean - value).abs();
        report.check(
            "game_value_matches_dpp",
            gap <= 4.0 * est.stderr,
            format!("|MC − u| = {gap:.3e}, 4·stderr = {:.3e}", 4.0 * est.stderr),
        );
        let closed = game::single_round_expectation(&u, &params, start, &s_i, &s_ii)?;
        let tu = dpp::dpp_value_at(&u, &params, start)?;
        report.measure("single_round_expectation", closed);
        report.check(
            "single_round_closed_form",
            (closed - tu).abs() <= 1e-12,
            format!("|E[one round] − T(u)| = {:.3e}", (closed - tu).abs()),
        );
    }
    let mut out = vec![("field.csv", field_csv(&u)), ("stats.csv", measurements_csv(report))];
    if record {
        out.push(("transcripts.csv", game::transcripts_csv(&domain, &transcripts)));
    }
    Ok(out)
}

fn cylinder(cfg: &RunConfig, report: &mut RunReport) -> Result<Artifacts> {
    let spec = cfg.cylinder_spec()?;
    let params = GameParams::new(cfg.params.p, spec.n, cfg.params.eps()?)?;
    let mut t0s = spec.t0.clone();
    t0s.sort_by(f64::total_cmp);
    let mut csv = String::from("t0,height,trials,p_bottom,p_bottom_ci95,p_top,p_side,mean_steps\n");
    let mut fail = Vec::new();
    for &t0 in &t0s {
        let c = CylinderConfig::with_start(spec.r, t0, &params)?;
        let s = walks::cylinder_study(&c, cfg.trials, cfg.base_seed)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            t0, s.height, s.trials, s.p_bottom.mean, s.p_bottom.ci95, s.p_top, s.p_side, s.mean_steps.mean
        );
        fail.push(1.0 - s.p_bottom.mean);
    }
    let increasing = fail.windows(2).all(|w| w[1] > w[0]);
    let (intercept, slope) = stats::linear_fit(&t0s, &fail);
    report.measure("t0", &t0s);
    report.measure("one_minus_p_bottom", &fail);
    report.measure("fitted_slope", slope);
    report.measure("fitted_intercept", intercept);
    report.check(
        "exit_probability_increasing",
        increasing,
        format!("1 − P(bottom) = {fail:?} at t0 = {t0s:?}"),
    );
    report.check(
        "slope_positive_finite",
        slope > 0.0 && slope.is_finite(),
        format!("least-squares slope {slope}"),
    );
    Ok(vec![("stats.csv", csv)])
}

fn linewalk(cfg: &RunConfig, report: &mut RunReport, verify: bool) -> Result<Artifacts> {
    let cmd = if verify { Command::VerifyAppendixC } else { Command::Linewalk };
    let t0 = cfg.line_spec(cmd)?.t0;
    let eps = cfg.params.eps()?;
    let s = walks::estimate_line_stats(t0, eps, cfg.trials, cfg.base_seed)?;
    report.measure("p_bottom", s.p_bottom.mean);
    report.measure("p_bottom_ci95", s.p_bottom.ci95);
    report.measure("bottom_bound", s.bottom_bound);
    report.measure("mean_tau", s.mean_tau.mean);
    report.measure("mean_tau_ci95", s.mean_tau.ci95);
    report.measure("second_moment_increment", s.second_moment_increment.mean);
    report.measure("second_moment_increment_ci95", s.second_moment_increment.ci95);
    report.measure("first_moment_increment", s.first_moment_increment.mean);
    report.measure("corrected_tau_bound", s.corrected_tau_bound);
    report.measure("literal_tau_bound", s.literal_tau_bound);
    report.measure("max_overshoot", s.max_overshoot);
    report.measure("trials", s.trials);
    if verify {
        let lo = s.bottom_bound - 3.0 * s.p_bottom.ci95;
        report.check(
            "bottom_probability",
            s.p_bottom.mean >= lo,
            format!("P(t_τ ≤ 0) = {} ≥ {} − 3·ci = {lo}", s.p_bottom.mean, s.bottom_bound),
        );
        let target = eps * eps / 3.0;
        let gap = (s.second_moment_increment.mean - target).abs();
        report.check(
            "second_moment_increment",
            gap <= 3.0 * s.second_moment_increment.ci95,
            format!(
                "|{} − ε²/3| = {gap:.3e}, 3·ci = {:.3e}",
                s.second_moment_increment.mean,
                3.0 * s.second_moment_increment.ci95
            ),
        );
        report.check(
            "expected_exit_time",
            s.corrected_bound_holds,
            format!("E[τ] = {} ≤ 3(t0 + 4ε)/ε² = {}", s.mean_tau.mean, s.corrected_tau_bound),
        );
        report.info(
            "expected_exit_time_literal",
            s.literal_bound_holds,
            format!("E[τ] = {} against (t0 + 4ε)/ε² = {}", s.mean_tau.mean, s.literal_tau_bound),
        );
    }
    Ok(vec![("stats.csv", measurements_csv(report))])
}

fn verify_convergence(cfg: &RunConfig, report: &mut RunReport) -> Result<Artifacts> {
    let cmd = Command::VerifyConvergence;
    let spec = cfg.convergence_spec()?;
    let domain = cfg.domain_spec(cmd)?;
    let n = domain.dim();
    let p = cfg.params.p;
    let boundary = cfg.boundary_spec(cmd)?;
    let reference = boundary
        .reference(p, n)?
        .ok_or_else(|| Error::Config("verify-convergence needs a plane, constant or radial boundary".into()))?;
    if let (reference::ReferenceSolution::Radial { center, .. }, Some(c)) = (&reference, &spec.certify) {
        let pts = reference::ring_points(center, c.r_lo, c.r_hi, c.rings, c.angles);
        let cert = reference::certify_reference(&reference, &pts, c.h, p, c.tol)?;
        report.measure("certificate", cert);
        report.check(
            "reference_certified",
            cert.certified,
            format!(
                "extrapolated residual {:.3e} ≤ {:e}, h-ratio {:.3}",
                cert.max_extrapolated, c.tol, cert.ratio
            ),
        );
    } else if matches!(reference, reference::ReferenceSolution::Radial { .. }) {
        return Err(Error::Config("a radial reference needs a convergence.certify section".into()));
    }
    let eps_list = cfg.params.eps_list.as_ref().expect("validated");
    let h_ratio = cfg.params.h_ratio.expect("validated");
    let (conv, fields) =
        reference::convergence_study(domain, &reference, eps_list, h_ratio, p, cfg.solve_options(), &spec.scan)?;
    report.measure("rows", &conv.rows);
    report.measure("gradient_spread", conv.gradient_spread);
    report.check(
        "bounds",
        conv.rows.iter().all(|r| r.bounds_ok),
        "check_bounds on every solved field".into(),
    );
    let first = conv.rows[0].sup_error;
    let last = conv.rows.last().unwrap().sup_error;
    report.check(
        "sup_error_improves",
        conv.endpoint_improved,
        format!("sup error {first:.3e} at ε = {} → {last:.3e} at ε = {}", eps_list[0], eps_list.last().unwrap()),
    );
    report.info("sup_error_monotone", conv.monotone, "sup error non-increasing along the ε list".into());
    report.check(
        "uniform_lipschitz",
        conv.gradient_spread <= spec.lipschitz_spread,
        format!("relative spread of scan maxima {:.3} ≤ {}", conv.gradient_spread, spec.lipschitz_spread),
    );
    if let Some(pair) = &spec.pairing {
        let phi = reference::bump(pair.center.clone(), pair.radius, pair.direction.clone());
        let mut errs = Vec::new();
        for f in &fields {
            let (a, b) = reference::weak_gradient_pairing(f, &phi, &pair.center, pair.radius, &reference)?;
            errs.push((a - b).abs());
        }
        let decreasing = errs.windows(2).all(|w| w[1] <= w[0]);
        report.measure("pairing_errors", &errs);
        report.info("pairing_decreases", decreasing, format!("|⟨D_h u − Du, φ⟩| = {errs:?}"));
    }
    let finest = fields.last().expect("non-empty ε list");
    Ok(vec![("field.csv", field_csv(finest)), ("stats.csv", conv.to_csv())])
}

fn verify_lipschitz(cfg: &RunConfig, report: &mut RunReport) -> Result<Artifacts> {
    let cmd = Command::VerifyLipschitz;
    let spec = cfg.lipschitz_spec()?;
    let domain = grid(cfg, cmd, cfg.params.eps()?)?;
    let boundary = cfg.boundary_spec(cmd)?;
    let env = boundary
        .envelope(domain.dim())?
        .ok_or_else(|| Error::Config("verify-lipschitz needs a plane or plane-perturbed boundary".into()))?;
    let opts = envelope_options(cfg);
    report.measure("tol_used", opts.tol);
    let (u, rep, params) = solve_field(cfg, cmd, domain, opts)?;
    record_solve(report, &u, &rep, &params);
    let inside = reference::plane_envelope_check(&u, &env)?;
    report.check(
        "plane_envelope",
        inside,
        format!("|u − ν·x − b| ≤ δ = {} up to {:e}", env.delta, reference::ENVELOPE_SLACK),
    );
    let guarded = reference::improved_lipschitz_check(&u, &env, &spec.center, spec.radius, spec.guard_c)?;
    let bare = reference::improved_lipschitz_check(&u, &env, &spec.center, spec.radius, 0.0)?;
    report.measure("excess_slope", guarded.excess_slope);
    report.measure("threshold", guarded.threshold);
    report.measure("max_slope", guarded.max_slope);
    report.measure("measured_constant", guarded.measured_constant);
    report.measure("pairs", guarded.pairs);
    report.measure("excess_slope_guard0", bare.excess_slope);
    report.measure("threshold_guard0", bare.threshold);
    report.check(
        "improved_lipschitz",
        guarded.pass,
        format!(
            "excess slope {:.4} ≤ |ν| + Cδ = {:.4} (C = {})",
            guarded.excess_slope, guarded.threshold, spec.guard_c
        ),
    );
    report.info(
        "improved_lipschitz_guard0_fails",
        !bare.pass,
        format!("with C = 0: excess slope {:.4} against {:.4}", bare.excess_slope, bare.threshold),
    );
    let stats = measurements_csv(report);
    Ok(vec![("field.csv", field_csv(&u)), ("stats.csv", stats)])
}

fn verify_barriers(cfg: &RunConfig, report: &mut RunReport) -> Result<Artifacts> {
    let spec = cfg.barrier_spec()?;
    let eps = cfg.params.eps()?;
    let p = cfg.params.p;
    let height = spec.r + spec.t0;
    let bp = BarrierParams::new(spec.nu_mag, spec.delta, spec.c, spec.r, spec.big_r, p, spec.n)
        .map_err(|e| Error::Config(e.to_string()))?;
    let seed = cfg.base_seed;
    let slab = Slab::for_cylinder(spec.r, height, eps);
    let f = |z: &[f64], t: f64| barriers::plane_barrier(z, t, &bp).expect("validated barrier");
    let rc = barriers::residual_convergence(&f, spec.n, spec.r, height, p, &slab, spec.residual_h, spec.residual_points, seed)?;
    report.measure("residual", rc);
    report.check(
        "residual_second_order",
        (3.5..=4.5).contains(&rc.ratio),
        format!("rms residual ratio h → h/2 = {:.3}", rc.ratio),
    );
    let bc = barriers::check_plane_barrier_boundary(&bp, height, spec.samples, seed)?;
    report.measure("boundary", &bc);
    report.measure("minimal_c", bc.minimal_c);
    report.check(
        "boundary_conditions",
        bc.side_margin >= -1e-12 && bc.top_margin >= -1e-12 && bc.bottom_min >= -1e-12,
        format!(
            "margins: side {:.4}, top {:.4}, bottom min {:.4}; C ≥ {:.3} needed",
            bc.side_margin, bc.top_margin, bc.bottom_min, bc.minimal_c
        ),
    );
    report.check(
        "origin_zero",
        bc.origin_value.abs() <= 1e-12,
        format!("ū(0, 0) = {:e}", bc.origin_value),
    );
    let dc = barriers::plane_barrier_derivatives(&bp, height, spec.samples, seed)?;
    report.measure("derivatives", dc);
    report.check(
        "t_derivative_bound",
        dc.pass,
        format!(
            "|∂_t ū| ≤ 2|ν| + {:.4} δ (analytic {:.4})",
            dc.fitted_dt_constant, dc.analytic_dt_constant
        ),
    );
    let mut out = Vec::new();
    if let Some(m) = &spec.martingale {
        let params = GameParams::new(p, spec.n, eps)?;
        let cyl = CylinderConfig::with_start(spec.r, spec.t0, &params)?;
        let g = Lemma31Barrier::new(spec.r, height, eps, spec.big_r, p, spec.n)?;
        let v = |z: &[f64], t: f64| g.value(z, t);
        let c_sup = walks::fit_correction(&cyl, &f, Orientation::Super)?;
        let c_sub = walks::fit_correction(&cyl, &v, Orientation::Sub)?;
        let sup = walks::martingale_diagnostic(&cyl, &f, Orientation::Super, c_sup, m.trials, seed, m.min_occupancy)?;
        let sub = walks::martingale_diagnostic(&cyl, &v, Orientation::Sub, c_sub, m.trials, seed.wrapping_add(1), m.min_occupancy)?;
        report.measure("supermartingale_correction", c_sup);
        report.measure("submartingale_correction", c_sub);
        report.measure("supermartingale_max_violation", sup.max_violation);
        report.measure("submartingale_max_violation", sub.max_violation);
        report.check(
            "supermartingale",
            sup.pass,
            format!("ū − Cjε³, C = {c_sup:.3e}: {} bins judged, worst excess {:.3e}", sup.occupied_bins, sup.max_violation),
        );
        report.check(
            "submartingale",
            sub.pass,
            format!("v̄ + Cjε³, C = {c_sub:.3e}: {} bins judged, worst excess {:.3e}", sub.occupied_bins, sub.max_violation),
        );
        let mut csv = String::from("orientation,");
        csv.push_str(sup.to_csv().lines().next().unwrap_or_default());
        csv.push('\n');
        for (name, rep) in [("super", &sup), ("sub", &sub)] {
            for line in rep.to_csv().lines().skip(1) {
                let _ = writeln!(csv, "{name},{line}");
            }
        }
        out.push(("stats.csv", csv));
    } else {
        out.push(("stats.csv", measurements_csv(report)));
    }
    Ok(out)
}

fn verify_coupling(cfg: &RunConfig, report: &mut RunReport) -> Result<Artifacts> {
    let cmd = Command::VerifyCoupling;
    let spec = cfg.coupling_spec()?;
    let domain = cfg.domain_spec(cmd)?;
    let params = GameParams::new(cfg.params.p, domain.dim(), cfg.params.eps()?)?;
    let c = Coupling::new(domain, spec.x.clone(), spec.y.clone(), spec.r, params)?;
    let s = game::coupling_study(&c, &AwayFromMidpoint, spec.runs, cfg.base_seed)?;
    report.measure("runs", s.runs);
    report.measure("c1", s.c1);
    report.measure("c2", s.c2);
    report.measure("c3", s.c3);
    report.measure("failure_probability", s.failure.mean);
    report.measure("failure_ci95", s.failure.ci95);
    report.measure("fitted_constant", s.fitted_constant);
    report.measure("worst_c1_error_per_step", s.worst_c1_error_per_step);
    report.check(
        "cancellation_exact",
        s.worst_c1_error_per_step <= 1e-9,
        format!("max |x_τ − z − Σh| / steps = {:.3e} over {} C1 stops", s.worst_c1_error_per_step, s.c1),
    );
    report.check(
        "shared_draws",
        s.draws_identical,
        "both trajectories consumed the same draw log".into(),
    );
    Ok(vec![("stats.csv", measurements_csv(report))])
}

/// Exit status for a finished run or an error: 0 pass, 1 failure, 2 configuration.
pub fn exit_code(result: &Result<RunReport>) -> i32 {
    match result {
        Ok(r) if r.pass => 0,
        Ok(_) => 1,
        Err(e) if is_config_error(e) => 2,
        Err(_) => 1,
    }
}

pub fn is_config_error(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::Parameter(_))
}
