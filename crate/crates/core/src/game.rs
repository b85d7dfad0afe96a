//! Simulation of the random-step-size tug-of-war with noise.
//!
//! Two position models live here. Value-estimation games run on the lattice of a
//! [`DiscreteDomain`]: tug-of-war moves pick a point of the open grid ball
//! `B_t(x)` and noise moves are uniform over the grid points of `B_ε(x)`, so a
//! round with greedy players is an unbiased sample of the discrete operator `T`.
//! The cancellation coupling runs on exact continuum vectors, since the identity
//! it demonstrates is destroyed by rounding to a lattice.
//!
//! Draw order within a lattice round: coin `U < α`; on heads the step bound
//! `t = ε·(1 − U) ∈ (0, ε]` followed by the mover bit (true = Player I); on tails
//! a uniform table index.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{DiscreteDomain, DomainSpec};
use crate::dpp::{GameParams, ValueField};
use crate::error::{Error, Result};
use crate::rng::{self, TrialRng};
use crate::stats::{Estimate, Moments};
use crate::vecmath;

/// Default hard cap on rounds per game.
pub const DEFAULT_ROUND_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum Coin {
    Noise = 0,
    PlayerI = 1,
    PlayerII = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub coin: Coin,
    pub step_bound: f64,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub start: usize,
    /// Empty unless the game was recorded; `steps` is always set.
    pub rounds: Vec<Round>,
    pub steps: u64,
    pub exit: usize,
    pub payoff: f64,
    pub seed: u64,
}

/// Lattice strategies. Every rule picks among the table prefix of `B_t(x)`, ties
/// going to the earliest table entry (the current point first, then by distance
/// and point index).
#[derive(Debug, Clone)]
pub enum Strategy {
    GreedyMax(Arc<ValueField>),
    GreedyMin(Arc<ValueField>),
    PullToward(Vec<f64>),
    AwayFrom(Vec<f64>),
    Noop,
}

pub fn greedy_strategy(field: Arc<ValueField>, maximize: bool) -> Strategy {
    if maximize {
        Strategy::GreedyMax(field)
    } else {
        Strategy::GreedyMin(field)
    }
}

pub fn pull_strategy(z: Vec<f64>) -> Strategy {
    Strategy::PullToward(z)
}

impl Strategy {
    /// Table position (into the prefix `candidates`) of the chosen point.
    fn pick(&self, domain: &DiscreteDomain, candidates: &[u32]) -> usize {
        // Only a strictly better score replaces the incumbent, so ties keep the earlier entry.
        let argbest = |score: &dyn Fn(usize) -> f64, larger: bool| {
            let mut best = 0;
            let mut best_s = score(candidates[0] as usize);
            for (k, &j) in candidates.iter().enumerate().skip(1) {
                let s = score(j as usize);
                if (larger && s > best_s) || (!larger && s < best_s) {
                    best = k;
                    best_s = s;
                }
            }
            best
        };
        match self {
            Strategy::GreedyMax(f) => argbest(&|j| f.value(j), true),
            Strategy::GreedyMin(f) => argbest(&|j| f.value(j), false),
            Strategy::PullToward(z) => argbest(&|j| vecmath::dist(domain.point(j), z), false),
            Strategy::AwayFrom(z) => argbest(&|j| vecmath::dist(domain.point(j), z), true),
            Strategy::Noop => 0,
        }
    }

    fn check(&self, domain: &DiscreteDomain) -> Result<()> {
        match self {
            Strategy::GreedyMax(f) | Strategy::GreedyMin(f) => {
                if f.domain().len() != domain.len() || f.domain().eps() != domain.eps() {
                    return Err(Error::Usage("greedy strategy field lives on another domain".into()));
                }
            }
            Strategy::PullToward(z) | Strategy::AwayFrom(z) => {
                if z.len() != domain.dim() {
                    return Err(Error::Usage("strategy target has the wrong dimension".into()));
                }
            }
            Strategy::Noop => {}
        }
        Ok(())
    }

    /// Move of this strategy from interior point `i` with revealed bound `t`.
    pub fn choose(&self, domain: &DiscreteDomain, i: usize, t: f64) -> Result<usize> {
        let idx = domain.neighbor_indices(i)?;
        let len = domain.prefix_len(t.min(domain.eps()));
        if len == 0 {
            return Err(Error::Protocol(format!("empty ball B_{t} at point {i}")));
        }
        let j = idx[self.pick(domain, &idx[..len])] as usize;
        let d = vecmath::dist(domain.point(i), domain.point(j));
        if !(d < t) {
            return Err(Error::Protocol(format!(
                "move from {i} to {j} has length {d} ≥ step bound {t}"
            )));
        }
        Ok(j)
    }
}

fn validate_game(
    domain: &DiscreteDomain,
    start: usize,
    players: [&Strategy; 2],
    payoff: &ValueField,
    params: &GameParams,
) -> Result<()> {
    if start >= domain.len() || !domain.is_interior(start) {
        return Err(Error::Domain(format!("start point {start} is not interior")));
    }
    if payoff.domain().len() != domain.len() {
        return Err(Error::Usage("payoff field lives on another domain".into()));
    }
    if params.n != domain.dim() || params.eps != domain.eps() {
        return Err(Error::Usage("game parameters do not match the domain".into()));
    }
    for s in players {
        s.check(domain)?;
    }
    Ok(())
}

/// One game from `start`; payoff is read from the strip entries of `payoff`.
pub fn play_game(
    domain: &DiscreteDomain,
    start: usize,
    s_i: &Strategy,
    s_ii: &Strategy,
    payoff: &ValueField,
    params: &GameParams,
    seed: u64,
) -> Result<GameTranscript> {
    validate_game(domain, start, [s_i, s_ii], payoff, params)?;
    run_game(domain, start, [s_i, s_ii], payoff, params, seed, true, DEFAULT_ROUND_CAP)
}

#[allow(clippy::too_many_arguments)]
fn run_game(
    domain: &DiscreteDomain,
    start: usize,
    players: [&Strategy; 2],
    payoff: &ValueField,
    params: &GameParams,
    seed: u64,
    record: bool,
    cap: u64,
) -> Result<GameTranscript> {
    let mut rng = rng::rng_from_seed(seed);
    let eps = params.eps;
    let population = domain.ball_population();
    let mut x = start;
    let mut rounds = Vec::new();
    let mut steps = 0u64;
    while domain.is_interior(x) {
        if steps >= cap {
            return Err(Error::Runaway { cap, seed });
        }
        let (coin, bound, next) = if rng.random::<f64>() < params.alpha {
            let t = eps * rng::open_unit(&mut rng);
            let first = rng.random::<bool>();
            let (coin, who) = if first { (Coin::PlayerI, 0) } else { (Coin::PlayerII, 1) };
            (coin, t, players[who].choose(domain, x, t)?)
        } else {
            let k = rng.random_range(0..population);
            (Coin::Noise, eps, domain.neighbor_indices(x)?[k] as usize)
        };
        steps += 1;
        x = next;
        if record {
            rounds.push(Round { coin, step_bound: bound, position: x });
        }
    }
    Ok(GameTranscript {
        start,
        rounds,
        steps,
        exit: x,
        payoff: payoff.value(x),
        seed,
    })
}

/// Expected value of `u` after one round from interior point `i`, over coin, step
/// bound, mover and noise, with the given strategies. With both players greedy on
/// `u` this is `T(u)(x_i)`.
pub fn single_round_expectation(
    u: &ValueField,
    params: &GameParams,
    i: usize,
    s_i: &Strategy,
    s_ii: &Strategy,
) -> Result<f64> {
    let domain = &**u.domain();
    let idx = domain.neighbor_indices(i)?;
    let layers = domain.layers();
    let eps = domain.eps();
    // For t ∈ (d_k, d_{k+1}] the open ball holds layers 0..=k.
    let mut tug = 0.0;
    for (k, &(d, end)) in layers.iter().enumerate() {
        let next = layers.get(k + 1).map_or(eps, |l| l.0);
        let w = (next - d) / eps;
        let a = idx[s_i.pick(domain, &idx[..end])] as usize;
        let b = idx[s_ii.pick(domain, &idx[..end])] as usize;
        tug += w * 0.5 * (u.value(a) + u.value(b));
    }
    let noise = idx.iter().map(|&j| u.value(j as usize)).sum::<f64>() / idx.len() as f64;
    Ok(params.alpha * tug + params.beta * noise)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub base_seed: u64,
    pub mean_steps: f64,
}

/// Monte Carlo estimate of the game value from `start`. Trial `k` uses seed
/// `trial_seed(base_seed, k)`; the reduction runs in trial order.
#[allow(clippy::too_many_arguments)]
pub fn estimate_value(
    domain: &DiscreteDomain,
    start: usize,
    s_i: &Strategy,
    s_ii: &Strategy,
    payoff: &ValueField,
    params: &GameParams,
    trials: u64,
    base_seed: u64,
) -> Result<ValueEstimate> {
    let (est, _) = estimate_value_recorded(domain, start, s_i, s_ii, payoff, params, trials, base_seed, 0)?;
    Ok(est)
}

/// As [`estimate_value`], also returning full transcripts of the first `record` trials.
#[allow(clippy::too_many_arguments)]
pub fn estimate_value_recorded(
    domain: &DiscreteDomain,
    start: usize,
    s_i: &Strategy,
    s_ii: &Strategy,
    payoff: &ValueField,
    params: &GameParams,
    trials: u64,
    base_seed: u64,
    record: usize,
) -> Result<(ValueEstimate, Vec<GameTranscript>)> {
    if trials < 2 {
        return Err(Error::Parameter(format!("need at least 2 trials, got {trials}")));
    }
    validate_game(domain, start, [s_i, s_ii], payoff, params)?;
    let results: Vec<Result<GameTranscript>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let seed = rng::trial_seed(base_seed, k);
            let rec = (k as usize) < record;
            run_game(domain, start, [s_i, s_ii], payoff, params, seed, rec, DEFAULT_ROUND_CAP).map_err(
                |e| Error::Trial { trial: k, seed, source: Box::new(e) },
            )
        })
        .collect();
    let mut pay = Moments::default();
    let mut steps = Moments::default();
    let mut kept = Vec::new();
    for (k, r) in results.into_iter().enumerate() {
        let t = r?;
        pay.push(t.payoff);
        steps.push(t.steps as f64);
        if k < record {
            kept.push(t);
        }
    }
    Ok((
        ValueEstimate {
            mean: pay.mean,
            stderr: pay.stderr(),
            trials,
            base_seed,
            mean_steps: steps.mean,
        },
        kept,
    ))
}

/// Line-oriented CSV of transcripts: `trial,round,coin,step_bound,point,x1..xn`.
/// Round 0 is the start position.
pub fn transcripts_csv(domain: &DiscreteDomain, transcripts: &[GameTranscript]) -> String {
    let mut out = String::from("trial,round,coin,step_bound,point");
    for d in 0..domain.dim() {
        let _ = write!(out, ",x{}", d + 1);
    }
    out.push('\n');
    let line = |out: &mut String, trial: usize, round: usize, coin: i32, bound: f64, j: usize| {
        let _ = write!(out, "{trial},{round},{coin},{bound},{j}");
        for c in domain.point(j) {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    };
    for (k, t) in transcripts.iter().enumerate() {
        line(&mut out, k, 0, -1, 0.0, t.start);
        for (r, round) in t.rounds.iter().enumerate() {
            line(&mut out, k, r + 1, round.coin as i32, round.step_bound, round.position);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitTimeStudy {
    pub mean_exit_steps: f64,
    pub stderr: f64,
    pub trials: u64,
    /// Per-round increments of `|x_k − z|²`, pooled over all rounds.
    pub drift: Estimate,
    /// `C(n)` such that the mean increment is `≤ C(n) ε²` at the upper 95% limit.
    pub drift_constant: f64,
}

/// Exit times with Player II pulling toward `z` and Player I stepping away from it.
pub fn exit_time_study(
    domain: &DiscreteDomain,
    start: usize,
    z: &[f64],
    params: &GameParams,
    trials: u64,
    base_seed: u64,
) -> Result<ExitTimeStudy> {
    if trials < 100 {
        return Err(Error::Parameter(format!("exit-time study needs ≥ 100 trials, got {trials}")));
    }
    let away = Strategy::AwayFrom(z.to_vec());
    let pull = Strategy::PullToward(z.to_vec());
    let zero = ValueField::from_fn(Arc::new(domain.clone()), |_| 0.0)?;
    validate_game(domain, start, [&away, &pull], &zero, params)?;
    let per_trial: Vec<Result<(u64, Moments)>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let seed = rng::trial_seed(base_seed, k);
            let t = run_game(domain, start, [&away, &pull], &zero, params, seed, true, DEFAULT_ROUND_CAP)
                .map_err(|e| Error::Trial { trial: k, seed, source: Box::new(e) })?;
            let mut m = Moments::default();
            let mut prev = vecmath::dist(domain.point(start), z).powi(2);
            for r in &t.rounds {
                let cur = vecmath::dist(domain.point(r.position), z).powi(2);
                m.push(cur - prev);
                prev = cur;
            }
            Ok((t.steps, m))
        })
        .collect();
    let mut steps = Moments::default();
    let mut drift = Moments::default();
    for r in per_trial {
        let (s, m) = r?;
        steps.push(s as f64);
        drift.merge(&m);
    }
    let drift = drift.summary();
    let eps2 = params.eps * params.eps;
    Ok(ExitTimeStudy {
        mean_exit_steps: steps.mean,
        stderr: steps.stderr(),
        trials,
        drift,
        drift_constant: (drift.mean + drift.ci95) / eps2,
    })
}

// ---------------------------------------------------------------------------
// Continuum cancellation coupling.

/// Opponent of the cancelling player in a coupled run. Returns a displacement,
/// which must be strictly shorter than `t`.
pub trait Adversary: Sync {
    fn step(&self, position: &[f64], z: &[f64], t: f64) -> Vec<f64>;
}

/// Steps (almost) the full revealed bound straight away from `z`.
#[derive(Debug, Clone, Copy, Default)]
pub struct AwayFromMidpoint;

impl Adversary for AwayFromMidpoint {
    fn step(&self, position: &[f64], z: &[f64], t: f64) -> Vec<f64> {
        let mut dir = vecmath::sub(position, z);
        let len = vecmath::norm(&dir);
        if len == 0.0 {
            dir = vec![0.0; position.len()];
            dir[0] = 1.0;
        } else {
            dir.iter_mut().for_each(|c| *c /= len);
        }
        vecmath::scale(&dir, t * (1.0 - 1e-9))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopCause {
    C1,
    C2,
    C3,
}

/// Shared stopping bookkeeping: `Σ ε_j a_j` with `a_j = +1` when the adversary wins
/// the toss, `−1` when the canceller wins, `0` on noise rounds; and `Σ h_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingMonitor {
    pub signed_budget: f64,
    pub noise_displacement: Vec<f64>,
    pub rounds: u64,
}

/// One recorded random draw; both coupled trajectories must log identical draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Draw {
    Tug { step_bound: f64, adversary_wins: bool },
    Noise { h: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumRound {
    pub coin: Coin,
    pub step_bound: f64,
    pub position: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumTranscript {
    pub start: Vec<f64>,
    pub rounds: Vec<ContinuumRound>,
    pub draws: Vec<Draw>,
    pub monitor: StoppingMonitor,
    pub stop: StopCause,
    /// `|x_τ − z − Σ h_j|`.
    pub cancellation_error: f64,
}

impl ContinuumTranscript {
    pub fn final_position(&self) -> &[f64] {
        self.rounds.last().map_or(&self.start, |r| &r.position)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledRun {
    pub x: ContinuumTranscript,
    pub y: ContinuumTranscript,
    pub stop: StopCause,
    pub seed: u64,
}

impl CoupledRun {
    pub fn draws_match(&self) -> bool {
        self.x.draws == self.y.draws && self.x.monitor == self.y.monitor
    }
}

/// Geometry of a coupled run.
#[derive(Debug, Clone)]
pub struct Coupling {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub r: f64,
    pub params: GameParams,
}

impl Coupling {
    /// Validates `x ≠ y`, interior starts and `B_{4r}(z) ⊂ Ω`.
    pub fn new(spec: &DomainSpec, x: Vec<f64>, y: Vec<f64>, r: f64, params: GameParams) -> Result<Self> {
        let n = spec.dim();
        if x.len() != n || y.len() != n || params.n != n {
            return Err(Error::Config("coupling points and parameters must match the domain dimension".into()));
        }
        if x == y {
            return Err(Error::Config("coupled starts must differ (x = y)".into()));
        }
        if !(r > 0.0) {
            return Err(Error::Config(format!("radius r must be > 0, got {r}")));
        }
        if !spec.contains(&x) || !spec.contains(&y) {
            return Err(Error::Config("coupled starts must lie in the domain".into()));
        }
        let z = vecmath::midpoint(&x, &y);
        let sd = spec.signed_distance(&z);
        if sd > -4.0 * r {
            return Err(Error::Config(format!(
                "B_4r(z) must lie inside the domain: distance from z to the boundary is {}, 4r = {}",
                -sd,
                4.0 * r
            )));
        }
        Ok(Coupling { x, y, z, r, params })
    }
}

/// Canceller bookkeeping: `V` is the uncancelled adversary displacement and
/// `remaining` the part of `z − start` still to travel along `e`.
struct Canceller {
    e: Vec<f64>,
    v: Vec<f64>,
    remaining: f64,
}

impl Canceller {
    fn new(start: &[f64], z: &[f64]) -> Self {
        let d = vecmath::sub(z, start);
        let len = vecmath::norm(&d);
        Canceller {
            e: vecmath::scale(&d, 1.0 / len),
            v: vec![0.0; start.len()],
            remaining: len,
        }
    }

    fn done(&self) -> bool {
        self.remaining == 0.0 && self.v.iter().all(|c| *c == 0.0)
    }

    /// Displacement of length ≤ `rho` reducing `|V| + remaining` by at least
    /// `rho` unless everything is cancelled.
    fn step(&mut self, rho: f64) -> Vec<f64> {
        let vn = vecmath::norm(&self.v);
        if vn >= rho {
            let mv = vecmath::scale(&self.v, -rho / vn);
            vecmath::add_assign(&mut self.v, &mv);
            return mv;
        }
        // Undo V entirely and spend the rest of the radius along e.
        let ev = vecmath::dot(&self.e, &self.v);
        let disc = (ev * ev - vn * vn + rho * rho).max(0.0);
        let lambda = (ev + disc.sqrt()).min(self.remaining);
        let mv: Vec<f64> = self
            .v
            .iter()
            .zip(&self.e)
            .map(|(v, e)| -v + lambda * e)
            .collect();
        self.v.iter_mut().for_each(|c| *c = 0.0);
        self.remaining = if lambda >= self.remaining { 0.0 } else { self.remaining - lambda };
        mv
    }
}

/// Shrunken canceller radius `(1 − 2^{−k−1}) t` after `k` completed rounds.
fn shrunken(k: u64, t: f64) -> f64 {
    let f = if k >= 1023 { 1.0 } else { 1.0 - (-(k as f64) - 1.0).exp2() };
    f * t
}

fn one_trajectory(
    cfg: &Coupling,
    from_x: bool,
    adversary: &dyn Adversary,
    seed: u64,
    cap: u64,
) -> Result<ContinuumTranscript> {
    let start = if from_x { &cfg.x } else { &cfg.y };
    let (adv_coin, can_coin) = if from_x {
        (Coin::PlayerI, Coin::PlayerII)
    } else {
        (Coin::PlayerII, Coin::PlayerI)
    };
    let n = start.len();
    let eps = cfg.params.eps;
    let c1 = -vecmath::dist(start, &cfg.z) - eps;
    let mut rng: TrialRng = rng::rng_from_seed(seed);
    let mut pos = start.clone();
    let mut can = Canceller::new(start, &cfg.z);
    let mut mon = StoppingMonitor {
        signed_budget: 0.0,
        noise_displacement: vec![0.0; n],
        rounds: 0,
    };
    let mut rounds = Vec::new();
    let mut draws = Vec::new();
    let stop = loop {
        if mon.rounds >= cap {
            return Err(Error::Runaway { cap, seed });
        }
        let k = mon.rounds;
        if rng.random::<f64>() < cfg.params.alpha {
            let t = eps * rng::open_unit(&mut rng);
            let adversary_wins = rng.random::<bool>();
            draws.push(Draw::Tug { step_bound: t, adversary_wins });
            let (coin, mv) = if adversary_wins {
                mon.signed_budget += t;
                let mv = adversary.step(&pos, &cfg.z, t);
                if vecmath::norm(&mv) >= t {
                    return Err(Error::Protocol(format!(
                        "adversary step of length {} ≥ bound {t}",
                        vecmath::norm(&mv)
                    )));
                }
                vecmath::add_assign(&mut can.v, &mv);
                (adv_coin, mv)
            } else {
                mon.signed_budget -= t;
                let rho = shrunken(k, t);
                let mv = can.step(rho);
                // ρ < t in exact arithmetic; for very late rounds the factor rounds to 1.
                if vecmath::norm(&mv) > rho * (1.0 + 1e-12) {
                    return Err(Error::Protocol(format!(
                        "cancelling step of length {} exceeds radius {rho}",
                        vecmath::norm(&mv)
                    )));
                }
                (can_coin, mv)
            };
            vecmath::add_assign(&mut pos, &mv);
            rounds.push(ContinuumRound { coin, step_bound: t, position: pos.clone() });
        } else {
            let h = rng::uniform_in_ball(&mut rng, n, eps);
            vecmath::add_assign(&mut pos, &h);
            vecmath::add_assign(&mut mon.noise_displacement, &h);
            rounds.push(ContinuumRound { coin: Coin::Noise, step_bound: eps, position: pos.clone() });
            draws.push(Draw::Noise { h });
        }
        mon.rounds += 1;
        if mon.signed_budget < c1 {
            break StopCause::C1;
        }
        if mon.signed_budget >= cfg.r {
            break StopCause::C2;
        }
        if vecmath::norm(&mon.noise_displacement) > cfg.r {
            break StopCause::C3;
        }
    };
    if stop == StopCause::C1 && !can.done() {
        return Err(Error::Protocol(format!(
            "C1 reached with uncancelled displacement (|V| = {}, remaining {})",
            vecmath::norm(&can.v),
            can.remaining
        )));
    }
    let target = vecmath::add(&cfg.z, &mon.noise_displacement);
    let cancellation_error = vecmath::dist(&pos, &target);
    Ok(ContinuumTranscript {
        start: start.clone(),
        rounds,
        draws,
        monitor: mon,
        stop,
        cancellation_error,
    })
}

/// Two continuum trajectories from `x` and `y` driven by identical draws: from `x`
/// Player II cancels against an adversarial Player I, from `y` the roles swap. Each
/// trajectory owns a generator seeded with `seed`, and its draw log is kept for
/// comparison.
pub fn coupled_cancellation_run(cfg: &Coupling, adversary: &dyn Adversary, seed: u64) -> Result<CoupledRun> {
    let x = one_trajectory(cfg, true, adversary, seed, DEFAULT_ROUND_CAP)?;
    let y = one_trajectory(cfg, false, adversary, seed, DEFAULT_ROUND_CAP)?;
    if x.stop != y.stop {
        return Err(Error::Protocol("coupled trajectories stopped for different causes".into()));
    }
    let stop = x.stop;
    Ok(CoupledRun { x, y, stop, seed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingStudy {
    pub runs: u64,
    pub c1: u64,
    pub c2: u64,
    pub c3: u64,
    /// Worst `|x_τ − z − Σh| / steps` over C1 stops of both trajectories.
    pub worst_c1_error_per_step: f64,
    pub draws_identical: bool,
    /// `1 − P(C1)` with its 95% half-width.
    pub failure: Estimate,
    /// `(1 − P(C1)) / (|x − y| + ε)`.
    pub fitted_constant: f64,
}

/// Runs `runs` seeded coupled runs and aggregates the stopping statistics.
pub fn coupling_study(cfg: &Coupling, adversary: &dyn Adversary, runs: u64, base_seed: u64) -> Result<CouplingStudy> {
    if runs == 0 {
        return Err(Error::Parameter("coupling study needs at least one run".into()));
    }
    let results: Vec<Result<(StopCause, f64, bool)>> = (0..runs)
        .into_par_iter()
        .map(|k| {
            let seed = rng::trial_seed(base_seed, k);
            let run = coupled_cancellation_run(cfg, adversary, seed)
                .map_err(|e| Error::Trial { trial: k, seed, source: Box::new(e) })?;
            let err = if run.stop == StopCause::C1 {
                let steps = run.x.monitor.rounds.max(1) as f64;
                run.x.cancellation_error.max(run.y.cancellation_error) / steps
            } else {
                0.0
            };
            Ok((run.stop, err, run.draws_match()))
        })
        .collect();
    let mut counts = [0u64; 3];
    let mut worst: f64 = 0.0;
    let mut same = true;
    let mut fail = Moments::default();
    for r in results {
        let (stop, err, m) = r?;
        counts[stop as usize] += 1;
        worst = worst.max(err);
        same &= m;
        fail.push(if stop == StopCause::C1 { 0.0 } else { 1.0 });
    }
    let failure = fail.summary();
    let scale = vecmath::dist(&cfg.x, &cfg.y) + cfg.params.eps;
    Ok(CouplingStudy {
        runs,
        c1: counts[0],
        c2: counts[1],
        c3: counts[2],
        worst_c1_error_per_step: worst,
        draws_identical: same,
        failure,
        fitted_constant: failure.mean / scale,
    })
}
