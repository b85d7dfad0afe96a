//! JSON run configuration for the `twng` binary.
//!
//! One document per run. Sections not used by the selected command are ignored;
//! unknown keys are rejected everywhere so typos surface as configuration errors.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::domain::{DiscreteDomain, DomainSpec};
use crate::dpp::{SolveOptions, ValueField, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::reference::{self, ReferenceSolution, ScanBall};
use crate::vecmath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Play,
    Cylinder,
    Linewalk,
    VerifyConvergence,
    VerifyLipschitz,
    #[serde(rename = "verify-appendixC")]
    #[value(name = "verify-appendixC")]
    VerifyAppendixC,
    VerifyBarriers,
    VerifyCoupling,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Play => "play",
            Command::Cylinder => "cylinder",
            Command::Linewalk => "linewalk",
            Command::VerifyConvergence => "verify-convergence",
            Command::VerifyLipschitz => "verify-lipschitz",
            Command::VerifyAppendixC => "verify-appendixC",
            Command::VerifyBarriers => "verify-barriers",
            Command::VerifyCoupling => "verify-coupling",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Grid spacing as a fraction of ε; used when `h` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_ratio: Option<f64>,
}

impl ParamsSpec {
    pub fn eps(&self) -> Result<f64> {
        self.eps.ok_or_else(|| Error::Config("params.eps is required for this command".into()))
    }

    pub fn h_for(&self, eps: f64) -> Result<f64> {
        match (self.h, self.h_ratio) {
            (Some(h), _) => Ok(h),
            (None, Some(k)) => Ok(eps * k),
            (None, None) => Err(Error::Config("one of params.h or params.h_ratio is required".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// `sin(10 x₁)`
    #[serde(rename = "sin10x1")]
    Sin10X1,
    /// `sin(10 x₂)`
    #[serde(rename = "sin10x2")]
    Sin10X2,
    /// `1 + sin(10 x₂)`
    #[serde(rename = "one_plus_sin10x2")]
    OnePlusSin10X2,
}

impl Perturbation {
    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Perturbation::Sin10X1 => (10.0 * x[0]).sin(),
            Perturbation::Sin10X2 => (10.0 * x[1]).sin(),
            Perturbation::OnePlusSin10X2 => 1.0 + (10.0 * x[1]).sin(),
        }
    }

    /// `sup |g|`, so that `|δ g| ≤ δ · sup_abs`.
    pub fn sup_abs(self) -> f64 {
        match self {
            Perturbation::OnePlusSin10X2 => 2.0,
            _ => 1.0,
        }
    }

    fn min_dim(self) -> usize {
        match self {
            Perturbation::Sin10X1 => 1,
            _ => 2,
        }
    }
}

pub type BoundaryFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundarySpec {
    Plane {
        nu: Vec<f64>,
        #[serde(default)]
        b: f64,
    },
    PlanePerturbed {
        nu: Vec<f64>,
        #[serde(default)]
        b: f64,
        delta: f64,
        perturbation: Perturbation,
    },
    /// `|x − center|^κ` with `κ = (p − n)/(p − 1)`.
    Radial {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    Constant {
        c: f64,
    },
    /// `x₁² − x₂²`.
    Saddle,
    /// CSV rows `x1,…,xn,value`, matched to strip points within `h/2`.
    Table {
        path: PathBuf,
    },
}

impl BoundarySpec {
    fn check_dim(&self, n: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("boundary.{what} must have {n} components")));
        match self {
            BoundarySpec::Plane { nu, .. } if nu.len() != n => bad("nu"),
            BoundarySpec::PlanePerturbed { nu, .. } if nu.len() != n => bad("nu"),
            BoundarySpec::PlanePerturbed { perturbation, .. } if perturbation.min_dim() > n => {
                Err(Error::Config(format!("perturbation needs dimension ≥ {}", perturbation.min_dim())))
            }
            BoundarySpec::PlanePerturbed { delta, .. } if !(*delta >= 0.0) => {
                Err(Error::Config(format!("boundary.delta must be ≥ 0, got {delta}")))
            }
            BoundarySpec::Radial { center: Some(c) } if c.len() != n => bad("center"),
            BoundarySpec::Saddle if n < 2 => Err(Error::Config("saddle boundary needs n ≥ 2".into())),
            _ => Ok(()),
        }
    }

    /// Closed-form payoff; `None` for table data.
    pub fn function(&self, p: f64, n: usize) -> Result<Option<BoundaryFn>> {
        self.check_dim(n)?;
        Ok(Some(match self.clone() {
            BoundarySpec::Plane { nu, b } => Box::new(move |x: &[f64]| vecmath::dot(&nu, x) + b),
            BoundarySpec::PlanePerturbed { nu, b, delta, perturbation } => {
                Box::new(move |x: &[f64]| vecmath::dot(&nu, x) + b + delta * perturbation.eval(x))
            }
            BoundarySpec::Radial { .. } => {
                let r = self.reference(p, n)?.expect("radial boundary has a reference");
                Box::new(move |x: &[f64]| r.value(x))
            }
            BoundarySpec::Constant { c } => Box::new(move |_: &[f64]| c),
            BoundarySpec::Saddle => Box::new(|x: &[f64]| x[0] * x[0] - x[1] * x[1]),
            BoundarySpec::Table { .. } => return Ok(None),
        }))
    }

    /// Exact solution whose trace is this boundary data, where one is known.
    pub fn reference(&self, p: f64, n: usize) -> Result<Option<ReferenceSolution>> {
        self.check_dim(n)?;
        Ok(match self {
            BoundarySpec::Plane { nu, b } => Some(ReferenceSolution::affine(nu.clone(), *b)),
            BoundarySpec::Constant { c } => Some(ReferenceSolution::affine(vec![0.0; n], *c)),
            BoundarySpec::Radial { center } => Some(reference::radial_reference_at(
                p,
                n,
                center.clone().unwrap_or_else(|| vec![0.0; n]),
            )?),
            _ => None,
        })
    }

    /// `(ν, b, δ)` when the data lies within `δ` of a plane by construction.
    pub fn envelope(&self, n: usize) -> Result<Option<reference::PlaneEnvelope>> {
        self.check_dim(n)?;
        Ok(match self {
            BoundarySpec::Plane { nu, b } => Some(reference::PlaneEnvelope { nu: nu.clone(), b: *b, delta: 0.0 }),
            BoundarySpec::PlanePerturbed { nu, b, delta, perturbation } => Some(reference::PlaneEnvelope {
                nu: nu.clone(),
                b: *b,
                delta: delta * perturbation.sup_abs(),
            }),
            _ => None,
        })
    }

    /// Field carrying this payoff on the strip (interior entries are placeholders).
    pub fn field(&self, domain: Arc<DiscreteDomain>, p: f64, base_dir: &Path) -> Result<ValueField> {
        let n = domain.dim();
        if let Some(f) = self.function(p, n)? {
            return ValueField::from_boundary(domain, f, 0.0);
        }
        let BoundarySpec::Table { path } = self else { unreachable!() };
        let path = base_dir.join(path);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut values = vec![f64::NAN; domain.len()];
        let tol = 0.5 * domain.h();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let row = match parsed {
                Ok(row) => row,
                // A non-numeric first line is a header.
                Err(_) if line_no == 0 => continue,
                Err(e) => {
                    return Err(Error::Config(format!("{}:{}: {e}", path.display(), line_no + 1)));
                }
            };
            if row.len() != n + 1 {
                return Err(Error::Config(format!(
                    "{}:{}: expected {} columns, found {}",
                    path.display(),
                    line_no + 1,
                    n + 1,
                    row.len()
                )));
            }
            let Some(i) = domain.nearest_point(&row[..n], tol) else {
                return Err(Error::Config(format!(
                    "{}:{}: no lattice point within h/2 of {:?}",
                    path.display(),
                    line_no + 1,
                    &row[..n]
                )));
            };
            if domain.is_interior(i) {
                return Err(Error::Config(format!(
                    "{}:{}: {:?} is an interior point, not a strip point",
                    path.display(),
                    line_no + 1,
                    &row[..n]
                )));
            }
            values[i] = row[n];
        }
        for (i, v) in values.iter_mut().enumerate() {
            if domain.is_interior(i) {
                *v = 0.0;
            } else if v.is_nan() {
                return Err(Error::Config(format!(
                    "{}: no value for strip point {:?}",
                    path.display(),
                    domain.point(i)
                )));
            }
        }
        ValueField::with_values(domain, values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StrategySpec {
    /// Greedy on the solved field: Player I maximises, Player II minimises.
    Greedy,
    Pull { target: Vec<f64> },
    Away { from: Vec<f64> },
    Noop,
}

fn greedy() -> StrategySpec {
    StrategySpec::Greedy
}

fn default_record() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaySpec {
    pub start: Vec<f64>,
    #[serde(default = "greedy")]
    pub player_i: StrategySpec,
    #[serde(default = "greedy")]
    pub player_ii: StrategySpec,
    /// Transcripts kept when `--record` is given.
    #[serde(default = "default_record")]
    pub record: usize,
}

fn default_n() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderSpec {
    pub r: f64,
    pub t0: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub t0: f64,
}

fn default_certify_rings() -> usize {
    8
}
fn default_certify_angles() -> usize {
    16
}
fn default_certify_h() -> f64 {
    1e-3
}
fn default_certify_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySpec {
    pub r_lo: f64,
    pub r_hi: f64,
    #[serde(default = "default_certify_rings")]
    pub rings: usize,
    #[serde(default = "default_certify_angles")]
    pub angles: usize,
    #[serde(default = "default_certify_h")]
    pub h: f64,
    #[serde(default = "default_certify_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    pub direction: Vec<f64>,
}

fn default_spread() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub scan: ScanBall,
    /// Radii (around the reference centre) on which the radial reference is certified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<PairingSpec>,
    /// Allowed relative spread of the Lipschitz scan maxima across ε.
    #[serde(default = "default_spread")]
    pub lipschitz_spread: f64,
}

fn default_guard() -> f64 {
    50.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default = "default_guard")]
    pub guard_c: f64,
}

fn one() -> f64 {
    1.0
}
fn default_c() -> f64 {
    2.5
}
fn default_big_r() -> f64 {
    2.0
}
fn default_t0() -> f64 {
    0.1
}
fn default_samples() -> usize {
    1000
}
fn default_points() -> usize {
    100
}
fn default_fd_h() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartingaleSpec {
    pub trials: u64,
    #[serde(default = "default_occupancy")]
    pub min_occupancy: u64,
}

fn default_occupancy() -> u64 {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSpec {
    #[serde(default = "one")]
    pub nu_mag: f64,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "default_big_r")]
    pub big_r: f64,
    /// Start height `|x − z| + ε`; the cylinder is `B_r × (0, r + t0)`.
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_points")]
    pub residual_points: usize,
    #[serde(default = "default_fd_h")]
    pub residual_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub martingale: Option<MartingaleSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub r: f64,
    pub runs: u64,
}

fn default_trials() -> u64 {
    10_000
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must agree with the command given on the command line, if present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    pub params: ParamsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundarySpec>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Output directory; not echoed, so reports do not depend on where they are written.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    /// Worker threads; not echoed, results do not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub play: Option<PlaySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cylinder: Option<CylinderSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linewalk: Option<LineSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<LipschitzSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barriers: Option<BarrierSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingSpec>,
    /// Directory of the config file; relative paths inside it resolve against this.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn need<'a, T>(section: &'a Option<T>, name: &str, cmd: Command) -> Result<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| Error::Config(format!("command {} needs a \"{name}\" section", cmd.as_str())))
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { tol: self.tol, max_iter: self.max_iter }
    }

    pub fn domain_spec(&self, cmd: Command) -> Result<&DomainSpec> {
        need(&self.domain, "domain", cmd)
    }

    pub fn boundary_spec(&self, cmd: Command) -> Result<&BoundarySpec> {
        need(&self.boundary, "boundary", cmd)
    }

    pub fn play_spec(&self) -> Result<&PlaySpec> {
        need(&self.play, "play", Command::Play)
    }
    pub fn cylinder_spec(&self) -> Result<&CylinderSpec> {
        need(&self.cylinder, "cylinder", Command::Cylinder)
    }
    pub fn line_spec(&self, cmd: Command) -> Result<&LineSpec> {
        need(&self.linewalk, "linewalk", cmd)
    }
    pub fn convergence_spec(&self) -> Result<&ConvergenceSpec> {
        need(&self.convergence, "convergence", Command::VerifyConvergence)
    }
    pub fn lipschitz_spec(&self) -> Result<&LipschitzSpec> {
        need(&self.lipschitz, "lipschitz", Command::VerifyLipschitz)
    }
    pub fn barrier_spec(&self) -> Result<&BarrierSpec> {
        need(&self.barriers, "barriers", Command::VerifyBarriers)
    }
    pub fn coupling_spec(&self) -> Result<&CouplingSpec> {
        need(&self.coupling, "coupling", Command::VerifyCoupling)
    }

    /// Cheap structural validation for `cmd`; deeper preconditions are checked by
    /// the modules the values feed.
    pub fn validate(&self, cmd: Command) -> Result<()> {
        if let Some(c) = self.command {
            if c != cmd {
                return Err(Error::Config(format!(
                    "config is for command {}, but {} was requested",
                    c.as_str(),
                    cmd.as_str()
                )));
            }
        }
        if !(self.params.p > 2.0 && self.params.p.is_finite()) {
            return Err(Error::Config(format!("params.p must satisfy 2 < p < ∞, got {}", self.params.p)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be ≥ 1".into()));
        }
        let needs_grid = matches!(
            cmd,
            Command::Solve | Command::Play | Command::VerifyConvergence | Command::VerifyLipschitz
        );
        if needs_grid {
            let spec = self.domain_spec(cmd)?;
            spec.validate()?;
            let b = self.boundary_spec(cmd)?;
            b.check_dim(spec.dim())?;
            if let BoundarySpec::Table { path } = b {
                let full = self.base_dir.join(path);
                if !full.is_file() {
                    return Err(Error::Config(format!("boundary table {} does not exist", full.display())));
                }
            }
        }
        match cmd {
            Command::VerifyConvergence => {
                let list = self
                    .params
                    .eps_list
                    .as_ref()
                    .ok_or_else(|| Error::Config("params.eps_list is required for verify-convergence".into()))?;
                if list.len() < 2 {
                    return Err(Error::Config("params.eps_list needs at least two values".into()));
                }
                if self.params.h_ratio.is_none() {
                    return Err(Error::Config("params.h_ratio is required for verify-convergence".into()));
                }
                self.convergence_spec()?;
            }
            Command::Play => {
                self.play_spec()?;
            }
            Command::Cylinder => {
                let c = self.cylinder_spec()?;
                if c.t0.len() < 2 {
                    return Err(Error::Config("cylinder.t0 needs at least two start heights".into()));
                }
            }
            Command::Linewalk | Command::VerifyAppendixC => {
                self.line_spec(cmd)?;
            }
            Command::VerifyLipschitz => {
                self.lipschitz_spec()?;
            }
            Command::VerifyBarriers => {
                self.barrier_spec()?;
            }
            Command::VerifyCoupling => {
                self.domain_spec(cmd)?.validate()?;
                self.coupling_spec()?;
            }
            Command::Solve => {}
        }
        if matches!(cmd, Command::Solve | Command::Play | Command::VerifyLipschitz | Command::Linewalk
            | Command::VerifyAppendixC | Command::Cylinder | Command::VerifyBarriers | Command::VerifyCoupling)
        {
            self.params.eps()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVE: &str = r#"{
        "command": "solve",
        "domain": {"shape": "box", "lo": [0, 0], "hi": [1, 1]},
        "params": {"p": 4, "eps": 0.125, "h": 0.03125},
        "boundary": {"kind": "plane", "nu": [1, 0]}
    }"#;

    #[test]
    fn minimal_solve_config_parses_with_defaults() {
        let cfg = RunConfig::parse(SOLVE, "inline").unwrap();
        cfg.validate(Command::Solve).unwrap();
        assert_eq!(cfg.tol, DEFAULT_TOL);
        assert_eq!(cfg.base_seed, 0);
        assert_eq!(cfg.params.h_for(0.125).unwrap(), 0.03125);
        let f = cfg.boundary.unwrap().function(4.0, 2).unwrap().unwrap();
        assert_eq!(f(&[0.3, 0.9]), 0.3);
    }

    #[test]
    fn unknown_keys_and_command_mismatch_are_config_errors() {
        let typo = SOLVE.replace("\"params\"", "\"parms\"");
        let err = RunConfig::parse(&typo, "inline").unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("parms")), "{err}");
        let cfg = RunConfig::parse(SOLVE, "inline").unwrap();
        assert!(matches!(cfg.validate(Command::Play), Err(Error::Config(_))));
    }

    #[test]
    fn command_names_round_trip() {
        for c in [Command::VerifyAppendixC, Command::VerifyConvergence, Command::Linewalk] {
            let s = serde_json::to_string(&c).unwrap();
            assert_eq!(s, format!("\"{}\"", c.as_str()));
        }
    }

    #[test]
    fn perturbed_envelope_and_table_boundary() {
        let b: BoundarySpec = serde_json::from_str(
            r#"{"kind": "plane-perturbed", "nu": [1, 0], "delta": 0.01, "perturbation": "sin10x1"}"#,
        )
        .unwrap();
        let env = b.envelope(2).unwrap().unwrap();
        assert_eq!(env.delta, 0.01);
        assert!(b.reference(4.0, 2).unwrap().is_none());

        let d = Arc::new(DiscreteDomain::build(DomainSpec::unit_square(), 0.5, 0.5).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let mut csv = String::from("x1,x2,value\n");
        for i in d.strip_points() {
            let x = d.point(i);
            csv.push_str(&format!("{},{},{}\n", x[0], x[1], x[0] + 2.0 * x[1]));
        }
        std::fs::write(dir.path().join("f.csv"), &csv).unwrap();
        let t = BoundarySpec::Table { path: "f.csv".into() };
        let f = t.field(d.clone(), 4.0, dir.path()).unwrap();
        for (i, v) in f.boundary_values() {
            assert_eq!(v, d.point(i)[0] + 2.0 * d.point(i)[1]);
        }
        // Dropping a row leaves a strip point uncovered.
        let short: String = csv.lines().take(3).map(|l| format!("{l}\n")).collect();
        std::fs::write(dir.path().join("g.csv"), short).unwrap();
        let g = BoundarySpec::Table { path: "g.csv".into() };
        assert!(matches!(g.field(d, 4.0, dir.path()), Err(Error::Config(_))));
    }
}
