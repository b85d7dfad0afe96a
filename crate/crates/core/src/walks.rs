//! Auxiliary random walks: the `(n+1)`-dimensional cylinder walk and the
//! varying-step line walk, plus the binned martingale diagnostic run on top of
//! the cylinder walk.
//!
//! Draw order per cylinder step: coin `U < α`; on heads one uniform for the new
//! height `t + ε(2U − 1)`; on tails a ball sample (see [`rng::fill_uniform_in_ball`]).
//! Per line step: a sign bit, then `s = εU`.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dpp::GameParams;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng;
use crate::stats::{Estimate, Moments};
use crate::vecmath;

pub const DEFAULT_WALK_CAP: u64 = 1_000_000_000;

/// Cylinder `B_r(0) × (0, height)` with the walk started at `(0, t0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderConfig {
    pub r: f64,
    pub t0: f64,
    pub height: f64,
    pub eps: f64,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl CylinderConfig {
    /// Geometry of a coupled pair at distance `|x − z|` from the midpoint:
    /// `t0 = |x − z| + ε`, `height = r + t0`.
    pub fn for_pair(r: f64, dist_xz: f64, params: &GameParams) -> Result<Self> {
        Self::with_start(r, dist_xz + params.eps, params)
    }

    /// Explicit start height; `height = r + t0`.
    pub fn with_start(r: f64, t0: f64, params: &GameParams) -> Result<Self> {
        let cfg = CylinderConfig {
            r,
            t0,
            height: r + t0,
            eps: params.eps,
            n: params.n,
            alpha: params.alpha,
            beta: params.beta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > self.eps && self.eps > 0.0) {
            return Err(Error::Config(format!(
                "cylinder needs r > ε > 0, got r = {}, ε = {}",
                self.r, self.eps
            )));
        }
        if !(self.t0 > 0.0 && self.t0 < self.height) {
            return Err(Error::Config(format!(
                "start height must satisfy 0 < t0 < height, got t0 = {}, height = {}",
                self.t0, self.height
            )));
        }
        if self.n == 0 {
            return Err(Error::Config("cylinder base dimension must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitFace {
    Bottom,
    Top,
    Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkOutcome {
    pub exit_face: ExitFace,
    pub zeta: Vec<f64>,
    pub t: f64,
    pub steps: u64,
}

/// Cylinder walk driving `visit(ζ, t, ζ', t')` once per step.
fn cylinder_walk_with(
    cfg: &CylinderConfig,
    seed: u64,
    cap: u64,
    mut visit: impl FnMut(&[f64], f64, &[f64], f64),
) -> Result<WalkOutcome> {
    let mut rng = rng::rng_from_seed(seed);
    let mut zeta = vec![0.0; cfg.n];
    let mut next = vec![0.0; cfg.n];
    let mut h = vec![0.0; cfg.n];
    let mut t = cfg.t0;
    let r2 = cfg.r * cfg.r;
    let mut steps = 0u64;
    loop {
        if steps >= cap {
            return Err(Error::Runaway { cap, seed });
        }
        steps += 1;
        if rng.random::<f64>() < cfg.alpha {
            let nt = t + cfg.eps * (2.0 * rng.random::<f64>() - 1.0);
            visit(&zeta, t, &zeta, nt);
            t = nt;
            if t <= 0.0 {
                return Ok(WalkOutcome { exit_face: ExitFace::Bottom, zeta, t, steps });
            }
            if t >= cfg.height {
                return Ok(WalkOutcome { exit_face: ExitFace::Top, zeta, t, steps });
            }
        } else {
            rng::fill_uniform_in_ball(&mut rng, cfg.eps, &mut h);
            for ((n, z), d) in next.iter_mut().zip(&zeta).zip(&h) {
                *n = z + d;
            }
            visit(&zeta, t, &next, t);
            std::mem::swap(&mut zeta, &mut next);
            if vecmath::dot(&zeta, &zeta) >= r2 {
                return Ok(WalkOutcome { exit_face: ExitFace::Side, zeta, t, steps });
            }
        }
    }
}

pub fn run_cylinder_walk(cfg: &CylinderConfig, seed: u64) -> Result<WalkOutcome> {
    cfg.validate()?;
    cylinder_walk_with(cfg, seed, DEFAULT_WALK_CAP, |_, _, _, _| {})
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderStats {
    pub t0: f64,
    pub height: f64,
    pub trials: u64,
    pub p_bottom: Estimate,
    pub p_top: f64,
    pub p_side: f64,
    pub mean_steps: Estimate,
}

/// Exit-face frequencies over `trials` seeded walks.
pub fn cylinder_study(cfg: &CylinderConfig, trials: u64, base_seed: u64) -> Result<CylinderStats> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::Parameter("cylinder study needs at least one trial".into()));
    }
    let out: Vec<Result<WalkOutcome>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let seed = rng::trial_seed(base_seed, k);
            cylinder_walk_with(cfg, seed, DEFAULT_WALK_CAP, |_, _, _, _| {})
                .map_err(|e| Error::Trial { trial: k, seed, source: Box::new(e) })
        })
        .collect();
    let mut bottom = Moments::default();
    let mut steps = Moments::default();
    let mut faces = [0u64; 3];
    for o in out {
        let o = o?;
        faces[o.exit_face as usize] += 1;
        bottom.push(if o.exit_face == ExitFace::Bottom { 1.0 } else { 0.0 });
        steps.push(o.steps as f64);
    }
    let n = trials as f64;
    Ok(CylinderStats {
        t0: cfg.t0,
        height: cfg.height,
        trials,
        p_bottom: bottom.summary(),
        p_top: faces[ExitFace::Top as usize] as f64 / n,
        p_side: faces[ExitFace::Side as usize] as f64 / n,
        mean_steps: steps.summary(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineOutcome {
    pub exit_low: bool,
    pub steps: u64,
    pub t_exit: f64,
}

fn line_walk_with(t0: f64, eps: f64, seed: u64, cap: u64, mut visit: impl FnMut(f64, f64)) -> Result<LineOutcome> {
    let mut rng = rng::rng_from_seed(seed);
    let mut t = t0;
    let mut steps = 0u64;
    while t > 0.0 && t < 1.0 {
        if steps >= cap {
            return Err(Error::Runaway { cap, seed });
        }
        let up = rng.random::<bool>();
        let s = eps * rng.random::<f64>();
        let nt = if up { t + s } else { t - s };
        visit(t, nt);
        t = nt;
        steps += 1;
    }
    Ok(LineOutcome { exit_low: t <= 0.0, steps, t_exit: t })
}

fn check_line(t0: f64, eps: f64) -> Result<()> {
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::Config(format!("line walk needs 0 < t0 < 1, got {t0}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("line walk needs ε > 0, got {eps}")));
    }
    Ok(())
}

/// Walk on `(0, 1)` from `t0` moving `±εU` with a fair sign, until exit.
pub fn line_walk(t0: f64, eps: f64, seed: u64) -> Result<LineOutcome> {
    check_line(t0, eps)?;
    line_walk_with(t0, eps, seed, DEFAULT_WALK_CAP, |_, _| {})
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineWalkStats {
    pub t0: f64,
    pub eps: f64,
    pub trials: u64,
    pub p_bottom: Estimate,
    pub mean_tau: Estimate,
    /// Per-step `t_{j+1}² − t_j²`, pooled over all steps.
    pub second_moment_increment: Estimate,
    /// Per-step `t_{j+1} − t_j`, pooled over all steps.
    pub first_moment_increment: Estimate,
    /// `1 − (t0 + ε)`.
    pub bottom_bound: f64,
    /// `3 (t0 + 4ε) / ε²`, from the increment `ε²/3`.
    pub corrected_tau_bound: f64,
    /// `(t0 + 4ε) / ε²`, from an increment of `ε²/4`.
    pub literal_tau_bound: f64,
    pub corrected_bound_holds: bool,
    pub literal_bound_holds: bool,
    /// Largest overshoot past either end over all trials.
    pub max_overshoot: f64,
}

pub fn estimate_line_stats(t0: f64, eps: f64, trials: u64, base_seed: u64) -> Result<LineWalkStats> {
    check_line(t0, eps)?;
    if trials < 1000 {
        return Err(Error::Parameter(format!("line statistics need ≥ 1000 trials, got {trials}")));
    }
    let out: Vec<Result<(LineOutcome, Moments, Moments)>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let seed = rng::trial_seed(base_seed, k);
            let mut m1 = Moments::default();
            let mut m2 = Moments::default();
            let o = line_walk_with(t0, eps, seed, DEFAULT_WALK_CAP, |a, b| {
                m1.push(b - a);
                m2.push(b * b - a * a);
            })
            .map_err(|e| Error::Trial { trial: k, seed, source: Box::new(e) })?;
            Ok((o, m1, m2))
        })
        .collect();
    let mut low = Moments::default();
    let mut tau = Moments::default();
    let mut m1 = Moments::default();
    let mut m2 = Moments::default();
    let mut overshoot: f64 = 0.0;
    for r in out {
        let (o, a, b) = r?;
        low.push(if o.exit_low { 1.0 } else { 0.0 });
        tau.push(o.steps as f64);
        m1.merge(&a);
        m2.merge(&b);
        overshoot = overshoot.max(if o.exit_low { -o.t_exit } else { o.t_exit - 1.0 });
    }
    let mean_tau = tau.summary();
    let corrected = 3.0 * (t0 + 4.0 * eps) / (eps * eps);
    let literal = (t0 + 4.0 * eps) / (eps * eps);
    Ok(LineWalkStats {
        t0,
        eps,
        trials,
        p_bottom: low.summary(),
        mean_tau,
        second_moment_increment: m2.summary(),
        first_moment_increment: m1.summary(),
        bottom_bound: 1.0 - (t0 + eps),
        corrected_tau_bound: corrected,
        literal_tau_bound: literal,
        corrected_bound_holds: mean_tau.mean <= corrected,
        literal_bound_holds: mean_tau.mean <= literal,
        max_overshoot: overshoot,
    })
}

// ---------------------------------------------------------------------------
// Martingale diagnostics.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `f + C j ε³` should be a submartingale.
    Sub,
    /// `f − C j ε³` should be a supermartingale.
    Super,
}

pub const DIAGNOSTIC_BINS: usize = 16;

/// `E[f(next)] − f` for one cylinder step from `(ζ, t)`, by Gauss quadrature:
/// `α·mean_{[t−ε, t+ε]} f(ζ, ·) + β·mean_{B_ε(ζ)} f(·, t) − f(ζ, t)`.
pub fn one_step_defect(
    f: &dyn Fn(&[f64], f64) -> f64,
    zeta: &[f64],
    t: f64,
    eps: f64,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let m = 12;
    let line = quadrature::interval_mean(|s| f(zeta, s), t - eps, t + eps, m, 2);
    let ball = quadrature::ball_mean(|y| f(y, t), zeta, eps, m)?;
    Ok(alpha * line + beta * ball - f(zeta, t))
}

/// Smallest `C` with `∓ defect ≤ C ε³` over a 33 × 33 grid of cylinder states
/// (radial coordinate along the first axis).
pub fn fit_correction(
    cfg: &CylinderConfig,
    f: &dyn Fn(&[f64], f64) -> f64,
    orientation: Orientation,
) -> Result<f64> {
    let k = 33;
    let mut worst: f64 = 0.0;
    let mut zeta = vec![0.0; cfg.n];
    for a in 0..k {
        zeta[0] = cfg.r * (a as f64 + 0.5) / k as f64;
        for b in 0..k {
            let t = cfg.height * (b as f64 + 0.5) / k as f64;
            let d = one_step_defect(f, &zeta, t, cfg.eps, cfg.alpha, cfg.beta)?;
            worst = worst.max(match orientation {
                Orientation::Super => d,
                Orientation::Sub => -d,
            });
        }
    }
    Ok(worst / cfg.eps.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub bin_center_r: f64,
    pub bin_center_t: f64,
    pub count: u64,
    pub mean_increment: f64,
    pub ci: f64,
    /// How far the corrected increment lies on the wrong side beyond `3·ci`.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    pub orientation: Orientation,
    pub correction: f64,
    pub eps: f64,
    pub trials: u64,
    pub samples: u64,
    pub occupied_bins: usize,
    pub max_violation: f64,
    pub pass: bool,
    pub bins: Vec<BinRow>,
}

impl MartingaleReport {
    /// `bin_center_r,bin_center_t,count,mean_increment,ci`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center_r,bin_center_t,count,mean_increment,ci\n");
        for b in &self.bins {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                b.bin_center_r, b.bin_center_t, b.count, b.mean_increment, b.ci
            );
        }
        out
    }
}

/// Bins visited states by `(|ζ|, t)` on a 16 × 16 grid, averages the increments
/// `f(next) − f(current)` per bin and checks the corrected increment against zero
/// within three 95% half-widths. Bins with fewer than `min_occupancy` samples are
/// reported but not judged.
#[allow(clippy::too_many_arguments)]
pub fn martingale_diagnostic(
    cfg: &CylinderConfig,
    f: &(dyn Fn(&[f64], f64) -> f64 + Sync),
    orientation: Orientation,
    correction: f64,
    trials: u64,
    base_seed: u64,
    min_occupancy: u64,
) -> Result<MartingaleReport> {
    cfg.validate()?;
    let nb = DIAGNOSTIC_BINS;
    let per_trial: Vec<Result<Vec<Moments>>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let seed = rng::trial_seed(base_seed, k);
            let mut bins = vec![Moments::default(); nb * nb];
            let mut f_cur = f(&vec![0.0; cfg.n], cfg.t0);
            cylinder_walk_with(cfg, seed, DEFAULT_WALK_CAP, |z, t, nz, nt| {
                let rad = vecmath::norm(z);
                let a = ((rad / cfg.r * nb as f64) as usize).min(nb - 1);
                let b = ((t / cfg.height * nb as f64) as usize).min(nb - 1);
                let f_next = f(nz, nt);
                bins[a * nb + b].push(f_next - f_cur);
                f_cur = f_next;
            })
            .map_err(|e| Error::Trial { trial: k, seed, source: Box::new(e) })?;
            Ok(bins)
        })
        .collect();
    let mut bins = vec![Moments::default(); nb * nb];
    for r in per_trial {
        for (acc, m) in bins.iter_mut().zip(r?) {
            acc.merge(&m);
        }
    }
    let shift = correction * cfg.eps.powi(3);
    let mut rows = Vec::with_capacity(nb * nb);
    let mut occupied = 0;
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for a in 0..nb {
        for b in 0..nb {
            let m = &bins[a * nb + b];
            samples += m.count;
            let ci = m.ci95();
            let wrong_side = match orientation {
                Orientation::Super => m.mean - shift,
                Orientation::Sub => -(m.mean + shift),
            };
            let violation = if m.count >= min_occupancy.max(2) {
                occupied += 1;
                (wrong_side - 3.0 * ci).max(0.0)
            } else {
                0.0
            };
            worst = worst.max(violation);
            rows.push(BinRow {
                bin_center_r: cfg.r * (a as f64 + 0.5) / nb as f64,
                bin_center_t: cfg.height * (b as f64 + 0.5) / nb as f64,
                count: m.count,
                mean_increment: m.mean,
                ci,
                violation,
            });
        }
    }
    if occupied == 0 {
        return Err(Error::Statistics(format!(
            "no bin reached {min_occupancy} samples after {trials} trials; increase the trial count"
        )));
    }
    Ok(MartingaleReport {
        orientation,
        correction,
        eps: cfg.eps,
        trials,
        samples,
        occupied_bins: occupied,
        max_violation: worst,
        pass: worst == 0.0,
        bins: rows,
    })
}
