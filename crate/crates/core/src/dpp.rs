//! The mean-value operator `T`, its monotone fixed-point iteration and the
//! analytic checks every solved field must pass.
//!
//! On the lattice, `sup_{B_t(x)} u` is piecewise constant in `t` with breakpoints
//! at the distinct neighbour distances `0 = d_0 < d_1 < … < d_L < ε`. With `M_k`
//! the running maximum over layers `0..=k`,
//!
//! ```text
//! (1/ε) ∫_0^ε sup_{B_t(x)} u dt = (1/ε) Σ_k M_k (d_{k+1} − d_k),   d_{L+1} := ε
//! ```
//!
//! and likewise for the infimum. The noise term is the plain average over the
//! lattice points of the open ball `B_ε(x)`, centre included.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::DiscreteDomain;
use crate::error::{Error, Result};
use crate::vecmath;

/// Per-sweep slack before a decrease counts as a monotonicity violation.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Slack used by [`check_comparison`].
pub const COMPARISON_SLACK: f64 = 1e-10;
/// Slack used by [`check_bounds`].
pub const BOUNDS_SLACK: f64 = 1e-10;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Coin probabilities of the game: tug-of-war with `α`, noise with `β = 1 − α`.
pub fn alpha_beta(p: f64, n: usize) -> Result<(f64, f64)> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("exponent must satisfy 2 < p < ∞, got {p}")));
    }
    if n < 2 {
        return Err(Error::Parameter(format!("dimension must be at least 2, got {n}")));
    }
    let alpha = (p - 2.0) / (n as f64 + p);
    Ok((alpha, 1.0 - alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub p: f64,
    pub n: usize,
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GameParams {
    pub fn new(p: f64, n: usize, eps: f64) -> Result<Self> {
        let (alpha, beta) = alpha_beta(p, n)?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Parameter(format!("step bound must be > 0, got {eps}")));
        }
        Ok(GameParams { p, n, eps, alpha, beta })
    }

    /// Parameters matching a discrete domain's dimension and step bound.
    pub fn for_domain(p: f64, domain: &DiscreteDomain) -> Result<Self> {
        Self::new(p, domain.dim(), domain.eps())
    }

    fn check_domain(&self, domain: &DiscreteDomain) -> Result<()> {
        if self.n != domain.dim() || self.eps != domain.eps() {
            return Err(Error::Usage(format!(
                "game parameters (n = {}, ε = {}) do not match the domain (n = {}, ε = {})",
                self.n,
                self.eps,
                domain.dim(),
                domain.eps()
            )));
        }
        Ok(())
    }
}

/// Values on every point of a discrete domain; strip entries hold the payoff `F`.
#[derive(Debug, Clone)]
pub struct ValueField {
    domain: Arc<DiscreteDomain>,
    values: Vec<f64>,
}

impl ValueField {
    /// Field equal to `f` everywhere (strip and interior).
    pub fn from_fn(domain: Arc<DiscreteDomain>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..domain.len()).map(|i| f(domain.point(i))).collect();
        Self::with_values(domain, values)
    }

    /// Boundary data `f` on the strip and the constant `interior` elsewhere.
    pub fn from_boundary(
        domain: Arc<DiscreteDomain>,
        f: impl Fn(&[f64]) -> f64,
        interior: f64,
    ) -> Result<Self> {
        let values = (0..domain.len())
            .map(|i| if domain.is_interior(i) { interior } else { f(domain.point(i)) })
            .collect();
        Self::with_values(domain, values)
    }

    pub fn with_values(domain: Arc<DiscreteDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Usage(format!(
                "value array has {} entries, domain has {} points",
                values.len(),
                domain.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite value {} at point {i} ({:?})",
                values[i],
                domain.point(i)
            )));
        }
        Ok(ValueField { domain, values })
    }

    pub fn domain(&self) -> &Arc<DiscreteDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Overwrite an interior value; strip values are payoff data and stay fixed.
    pub fn set_interior(&mut self, i: usize, v: f64) -> Result<()> {
        if !self.domain.is_interior(i) {
            return Err(Error::Domain(format!("point {i} is on the strip; payoff values are fixed")));
        }
        if !v.is_finite() {
            return Err(Error::Domain(format!("non-finite value {v}")));
        }
        self.values[i] = v;
        Ok(())
    }

    pub fn boundary_values(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.domain.strip_points().map(|i| (i, self.values[i]))
    }

    pub fn boundary_sup_abs(&self) -> f64 {
        self.boundary_values().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    pub fn boundary_inf(&self) -> f64 {
        self.boundary_values().map(|(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn same_domain(&self, other: &ValueField) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain)
            || (self.domain.len() == other.domain.len()
                && self.domain.h() == other.domain.h()
                && self.domain.eps() == other.domain.eps()
                && self.domain.spec() == other.domain.spec())
    }
}

fn require_interior(domain: &DiscreteDomain, i: usize) -> Result<()> {
    if i >= domain.len() || !domain.is_interior(i) {
        return Err(Error::Domain(format!("point {i} is not an interior point")));
    }
    Ok(())
}

/// `((1/ε)∫_0^ε sup_{B_t(x_i)} u dt, (1/ε)∫_0^ε inf_{B_t(x_i)} u dt)`, exact on the lattice.
pub fn averaged_extrema(field: &ValueField, i: usize) -> Result<(f64, f64)> {
    require_interior(&field.domain, i)?;
    Ok(layered_extrema(field, i))
}

fn layered_extrema(field: &ValueField, i: usize) -> (f64, f64) {
    let (ds, di) = layered_increments(field, i);
    (field.values[i] + ds, field.values[i] + di)
}

/// Averaged extrema minus `u(x_i)`, summed as `Σ_k (M_k − M_{k−1})(1 − d_k/ε)`.
///
/// Layer 0 is the centre alone, so both running extrema start at `u(x_i)` and a
/// constant field produces exactly zero.
fn layered_increments(field: &ValueField, i: usize) -> (f64, f64) {
    let domain = &*field.domain;
    let idx = domain
        .neighbor_indices(i)
        .expect("caller guarantees an interior point");
    let layers = domain.layers();
    let eps = domain.eps();
    let u = &field.values;
    let centre = u[i];
    let mut run_max = centre;
    let mut run_min = centre;
    let mut sup_inc = 0.0;
    let mut inf_inc = 0.0;
    let mut start = layers[0].1;
    for &(d, end) in &layers[1..] {
        let (prev_max, prev_min) = (run_max, run_min);
        for &j in &idx[start..end] {
            let v = u[j as usize];
            run_max = run_max.max(v);
            run_min = run_min.min(v);
        }
        start = end;
        let weight = 1.0 - d / eps;
        sup_inc += (run_max - prev_max) * weight;
        inf_inc += (run_min - prev_min) * weight;
    }
    (sup_inc, inf_inc)
}

/// Ball mean minus `u(x_i)`.
fn ball_mean_increment(field: &ValueField, i: usize) -> f64 {
    let idx = field.domain.neighbor_indices(i).expect("interior point");
    let centre = field.values[i];
    idx.iter().map(|&j| field.values[j as usize] - centre).sum::<f64>() / idx.len() as f64
}

/// `T(u)` at interior point `i`.
pub fn dpp_value_at(field: &ValueField, params: &GameParams, i: usize) -> Result<f64> {
    require_interior(&field.domain, i)?;
    Ok(dpp_point(field, params, i))
}

fn dpp_point(field: &ValueField, params: &GameParams, i: usize) -> f64 {
    // Written relative to u(x_i) so that T fixes constants bit-exactly.
    let (ds, di) = layered_increments(field, i);
    field.values[i] + 0.5 * params.alpha * (ds + di) + params.beta * ball_mean_increment(field, i)
}

fn sweep(field: &ValueField, params: &GameParams) -> Vec<f64> {
    field
        .domain
        .interior_points()
        .par_iter()
        .map(|&i| dpp_point(field, params, i))
        .collect()
}

/// One Jacobi application of `T`; strip values are copied unchanged.
pub fn dpp_apply(field: &ValueField, params: &GameParams) -> Result<ValueField> {
    params.check_domain(&field.domain)?;
    let updated = sweep(field, params);
    let mut out = field.clone();
    for (&i, v) in field.domain.interior_points().iter().zip(updated) {
        out.values[i] = v;
    }
    Ok(out)
}

/// `sup_{interior} |u − T(u)|`.
pub fn residual(field: &ValueField, params: &GameParams) -> Result<f64> {
    params.check_domain(&field.domain)?;
    let updated = sweep(field, params);
    Ok(field
        .domain
        .interior_points()
        .iter()
        .zip(updated)
        .map(|(&i, v)| (field.values[i] - v).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub monotone_violations: usize,
    /// Wall-clock seconds; excluded from serialised reports to keep them reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

/// Iterate `u_{j+1} = T(u_j)` from `u_0 ≡ inf F` on the interior until the sup-norm
/// change drops below `tol`.
///
/// `boundary` supplies the payoff on strip points; interior values are ignored.
pub fn solve_dpp(
    domain: Arc<DiscreteDomain>,
    boundary: impl Fn(&[f64]) -> f64,
    params: &GameParams,
    opts: SolveOptions,
) -> Result<(ValueField, SolveReport)> {
    let start = ValueField::from_boundary(domain, boundary, 0.0)?;
    solve_from_field(start, params, opts)
}

/// Same as [`solve_dpp`] with the payoff read from the strip entries of `data`.
pub fn solve_from_field(
    data: ValueField,
    params: &GameParams,
    opts: SolveOptions,
) -> Result<(ValueField, SolveReport)> {
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be > 0, got {}", opts.tol)));
    }
    params.check_domain(&data.domain)?;
    let clock = Instant::now();
    let mut field = data;
    let floor = field.boundary_inf();
    for &i in field.domain.interior_points() {
        field.values[i] = floor;
    }
    let interior: Vec<usize> = field.domain.interior_points().to_vec();
    let mut report = SolveReport {
        iterations: 0,
        final_residual: f64::INFINITY,
        monotone_violations: 0,
        wall_time: 0.0,
    };
    while report.iterations < opts.max_iter {
        let updated = sweep(&field, params);
        let mut change: f64 = 0.0;
        for (&i, v) in interior.iter().zip(updated) {
            let old = field.values[i];
            if v < old - MONOTONE_SLACK {
                report.monotone_violations += 1;
            }
            change = change.max((v - old).abs());
            field.values[i] = v;
        }
        report.iterations += 1;
        report.final_residual = change;
        if change < opts.tol {
            break;
        }
    }
    report.wall_time = clock.elapsed().as_secs_f64();
    if report.final_residual >= opts.tol {
        return Err(Error::NonConvergence(report));
    }
    Ok((field, report))
}

/// `|u| ≤ sup_strip |F|` everywhere, up to [`BOUNDS_SLACK`].
pub fn check_bounds(field: &ValueField) -> bool {
    let bound = field.boundary_sup_abs() + BOUNDS_SLACK;
    field.values.iter().all(|v| v.abs() <= bound)
}

/// Whether `f1 ≤ f2` pointwise (up to [`COMPARISON_SLACK`]) for two solved fields
/// with ordered boundary data.
pub fn check_comparison(f1: &ValueField, f2: &ValueField) -> Result<bool> {
    if !f1.same_domain(f2) {
        return Err(Error::Usage("comparison requires fields on the same domain".into()));
    }
    if let Some((i, a)) = f1
        .boundary_values()
        .find(|&(i, a)| a > f2.values[i] + COMPARISON_SLACK)
    {
        return Err(Error::Usage(format!(
            "boundary data not ordered at strip point {i}: {a} > {}",
            f2.values[i]
        )));
    }
    Ok(f1
        .values
        .iter()
        .zip(&f2.values)
        .all(|(a, b)| *a <= b + COMPARISON_SLACK))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzScan {
    pub max_ratio: f64,
    pub pair: (usize, usize),
    pub pairs_examined: usize,
}

/// Largest difference quotient over interior pairs in `B_r(center)` separated by at
/// least `min_separation`.
pub fn lipschitz_scan(
    field: &ValueField,
    center: &[f64],
    r: f64,
    min_separation: f64,
) -> Result<LipschitzScan> {
    let domain = &*field.domain;
    if center.len() != domain.dim() {
        return Err(Error::Query("scan centre has the wrong dimension".into()));
    }
    if domain.spec().signed_distance(center) > -r {
        return Err(Error::Query(format!(
            "scan ball B_{r}({center:?}) is not contained in the domain"
        )));
    }
    if min_separation < domain.h() * (1.0 - 1e-12) {
        return Err(Error::Query(format!(
            "minimum separation {min_separation} is below the grid spacing {}",
            domain.h()
        )));
    }
    let pts: Vec<usize> = domain
        .interior_points()
        .iter()
        .copied()
        .filter(|&i| vecmath::dist(domain.point(i), center) < r)
        .collect();
    let mut best: Option<LipschitzScan> = None;
    let mut examined = 0usize;
    for (a, &i) in pts.iter().enumerate() {
        for &j in &pts[a + 1..] {
            let d = vecmath::dist(domain.point(i), domain.point(j));
            if d < min_separation {
                continue;
            }
            examined += 1;
            let ratio = (field.values[i] - field.values[j]).abs() / d;
            if best.is_none_or(|b| ratio > b.max_ratio) {
                best = Some(LipschitzScan {
                    max_ratio: ratio,
                    pair: (i, j),
                    pairs_examined: 0,
                });
            }
        }
    }
    best.map(|mut b| {
        b.pairs_examined = examined;
        b
    })
    .ok_or_else(|| Error::Query("no qualifying point pair in the scan ball".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use approx::assert_relative_eq;

    fn square(h: f64, eps: f64) -> Arc<DiscreteDomain> {
        Arc::new(DiscreteDomain::build(DomainSpec::unit_square(), h, eps).unwrap())
    }

    /// Fine-step midpoint quadrature of `(1/ε)∫_0^ε sup/inf_{B_t} u dt`.
    fn quadrature_extrema(field: &ValueField, i: usize, steps: usize) -> (f64, f64) {
        let d = field.domain();
        let eps = d.eps();
        let (mut s, mut m) = (0.0, 0.0);
        for k in 0..steps {
            let t = (k as f64 + 0.5) * eps / steps as f64;
            let ball: Vec<f64> = (0..d.len())
                .filter(|&j| vecmath::dist(d.point(i), d.point(j)) < t)
                .map(|j| field.value(j))
                .collect();
            s += ball.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            m += ball.iter().cloned().fold(f64::INFINITY, f64::min);
        }
        (s / steps as f64, m / steps as f64)
    }

    #[test]
    fn alpha_beta_values() {
        let (a, b) = alpha_beta(4.0, 2).unwrap();
        assert_relative_eq!(a, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(b, 2.0 / 3.0, epsilon = 1e-15);
        let (a, b) = alpha_beta(3.0, 2).unwrap();
        assert_relative_eq!(a, 0.2, epsilon = 1e-15);
        assert_relative_eq!(b, 0.8, epsilon = 1e-15);
        assert_eq!(a + b, 1.0);
        for (p, n) in [(2.5, 2), (3.7, 3), (10.0, 5)] {
            let (_, b) = alpha_beta(p, n).unwrap();
            assert_relative_eq!(b, (n as f64 + 2.0) / (p + n as f64), epsilon = 1e-15);
        }
        assert!(alpha_beta(2.0, 2).is_err());
        assert!(alpha_beta(1.5, 2).is_err());
    }

    #[test]
    fn constant_field_is_fixed() {
        let d = square(1.0 / 16.0, 0.25);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let f = ValueField::from_fn(d.clone(), |_| 3.5).unwrap();
        for &i in d.interior_points() {
            let (s, m) = averaged_extrema(&f, i).unwrap();
            assert_relative_eq!(s, 3.5, epsilon = 1e-14);
            assert_relative_eq!(m, 3.5, epsilon = 1e-14);
        }
        assert!(residual(&f, &params).unwrap() < 1e-14);
    }

    #[test]
    fn layered_integral_hand_example() {
        // h = 0.1, ε = 0.25: layers at 0, 0.1, 0.2 (the unit-lattice example scaled).
        let d = square(0.1, 0.25);
        let c = d.index_of_lattice(&[5, 5]).unwrap();
        let field = ValueField::from_fn(d.clone(), |x| {
            let dx = x[0] - 0.5;
            let dy = x[1] - 0.5;
            let r = (dx * dx + dy * dy).sqrt();
            // 0 at the centre, ±1 on the first layer, ±2 beyond.
            let layer = if r < 0.05 { 0.0 } else if r < 0.15 { 1.0 } else { 2.0 };
            if dx > 1e-9 || (dx.abs() < 1e-9 && dy > 0.0) { layer } else { -layer }
        })
        .unwrap();
        let (s, m) = averaged_extrema(&field, c).unwrap();
        assert_relative_eq!(s, 0.8, epsilon = 1e-12);
        assert_relative_eq!(m, -0.8, epsilon = 1e-12);
        let (qs, qm) = quadrature_extrema(&field, c, 20_000);
        assert_relative_eq!(s, qs, epsilon = 1e-3);
        assert_relative_eq!(m, qm, epsilon = 1e-3);
    }

    #[test]
    fn spike_update_matches_hand_computation() {
        let d = square(0.1, 0.25);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let c = d.index_of_lattice(&[5, 5]).unwrap();
        let field = ValueField::from_fn(d.clone(), |x| {
            if (x[0] - 0.5).abs() < 1e-9 && (x[1] - 0.5).abs() < 1e-9 { 1.0 } else { 0.0 }
        })
        .unwrap();
        assert_eq!(d.ball_population(), 21);
        let expected = (1.0 / 6.0) * (1.0 + 0.1 / 0.25) + (2.0 / 3.0) / 21.0;
        assert_relative_eq!(expected, 0.265_079_365_079, epsilon = 1e-11);
        let next = dpp_apply(&field, &params).unwrap();
        assert_relative_eq!(next.value(c), expected, epsilon = 1e-14);
        // Quadrature oracle for the tug-of-war part.
        let (qs, qm) = quadrature_extrema(&field, c, 20_000);
        assert_relative_eq!(
            0.5 * params.alpha * (qs + qm) + params.beta / 21.0,
            expected,
            epsilon = 1e-4
        );
        let res = residual(&field, &params).unwrap();
        assert!(res >= 1.0 - expected - 1e-14);
        assert_relative_eq!(1.0 - expected, 0.734_920_634_920, epsilon = 1e-11);
    }

    #[test]
    fn affine_field_is_fixed_and_extrema_are_symmetric() {
        let d = square(1.0 / 32.0, 1.0 / 8.0);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let f = ValueField::from_fn(d.clone(), |x| 0.3 * x[0] - 1.7 * x[1] + 0.25).unwrap();
        for &i in d.interior_points() {
            let (s, m) = averaged_extrema(&f, i).unwrap();
            assert!((s + m - 2.0 * f.value(i)).abs() < 1e-13);
        }
        assert!(residual(&f, &params).unwrap() <= 1e-12);
    }

    #[test]
    fn non_interior_queries_fail() {
        let d = square(0.25, 0.5);
        let f = ValueField::from_fn(d.clone(), |_| 0.0).unwrap();
        let strip = d.strip_points().next().unwrap();
        assert!(averaged_extrema(&f, strip).is_err());
        let mut g = f.clone();
        assert!(g.set_interior(strip, 1.0).is_err());
    }

    #[test]
    fn constant_boundary_converges_immediately() {
        let d = square(1.0 / 16.0, 0.25);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let (u, rep) = solve_dpp(d, |_| 5.0, &params, SolveOptions::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(u.values().iter().all(|&v| v == 5.0));
    }

    #[test]
    fn non_convergence_carries_report() {
        let d = square(1.0 / 16.0, 0.25);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let err = solve_dpp(d, |x| x[0], &params, SolveOptions { tol: 1e-12, max_iter: 3 }).unwrap_err();
        match err {
            Error::NonConvergence(rep) => {
                assert_eq!(rep.iterations, 3);
                assert!(rep.final_residual >= 1e-12);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn params_must_match_domain() {
        let d = square(1.0 / 16.0, 0.25);
        let params = GameParams::new(4.0, 2, 0.125).unwrap();
        assert!(solve_dpp(d, |_| 0.0, &params, SolveOptions::default()).is_err());
    }

    #[test]
    fn plane_solution_bounds_and_scan() {
        let d = square(1.0 / 16.0, 0.125);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let (u, rep) = solve_dpp(d.clone(), |x| x[0], &params, SolveOptions { tol: 1e-12, max_iter: 200_000 }).unwrap();
        assert_eq!(rep.monotone_violations, 0);
        assert!(check_bounds(&u));
        for &i in d.interior_points() {
            assert!((u.value(i) - d.point(i)[0]).abs() < 1e-9);
        }
        let scan = lipschitz_scan(&u, &[0.5, 0.5], 0.3, 1.0 / 16.0).unwrap();
        assert!(scan.max_ratio <= 1.0 + 1e-8);
        assert!(scan.max_ratio >= 1.0 - 1e-8);
        let mut bad = u.clone();
        let i = d.interior_points()[0];
        bad.set_interior(i, 2.0 * u.boundary_sup_abs()).unwrap();
        assert!(!check_bounds(&bad));
    }

    #[test]
    fn lipschitz_scan_errors() {
        let d = square(1.0 / 16.0, 0.125);
        let f = ValueField::from_fn(d, |_| 1.0).unwrap();
        assert!(lipschitz_scan(&f, &[0.5, 0.5], 0.6, 0.1).is_err());
        assert!(lipschitz_scan(&f, &[0.5, 0.5], 0.2, 0.01).is_err());
        assert!(lipschitz_scan(&f, &[0.5, 0.5], 0.05, 0.2).is_err());
        assert_eq!(lipschitz_scan(&f, &[0.5, 0.5], 0.3, 0.1).unwrap().max_ratio, 0.0);
    }

    #[test]
    fn comparison_translation_and_mismatch() {
        let d = square(1.0 / 16.0, 0.125);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let opts = SolveOptions { tol: 1e-11, max_iter: 200_000 };
        let g = |x: &[f64]| x[0] * x[0] - x[1] * x[1];
        let (u1, _) = solve_dpp(d.clone(), g, &params, opts).unwrap();
        let (u2, _) = solve_dpp(d.clone(), |x| g(x) + 1.0, &params, opts).unwrap();
        for i in 0..d.len() {
            assert!((u2.value(i) - u1.value(i) - 1.0).abs() < 1e-8);
        }
        assert!(check_comparison(&u1, &u2).unwrap());
        assert!(check_comparison(&u1, &u1).unwrap());
        assert!(check_comparison(&u2, &u1).is_err());
        let other = square(1.0 / 16.0, 0.25);
        let w = ValueField::from_fn(other, |_| 0.0).unwrap();
        assert!(check_comparison(&u1, &w).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small() -> (Arc<DiscreteDomain>, GameParams) {
            let d = square(0.125, 0.25);
            let p = GameParams::for_domain(3.5, &d).unwrap();
            (d, p)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn operator_is_monotone(vals in proptest::collection::vec(-5.0f64..5.0, 64), bumps in proptest::collection::vec(0.0f64..2.0, 64)) {
                let (d, params) = small();
                let n = d.len();
                let u: Vec<f64> = (0..n).map(|i| vals[i % vals.len()]).collect();
                let v: Vec<f64> = (0..n).map(|i| u[i] + bumps[(i * 7) % bumps.len()]).collect();
                let fu = dpp_apply(&ValueField::with_values(d.clone(), u).unwrap(), &params).unwrap();
                let fv = dpp_apply(&ValueField::with_values(d.clone(), v).unwrap(), &params).unwrap();
                for i in 0..n {
                    prop_assert!(fu.value(i) <= fv.value(i) + 1e-12);
                }
            }

            #[test]
            fn shift_commutes_and_stays_in_hull(vals in proptest::collection::vec(-5.0f64..5.0, 64), c in -3.0f64..3.0) {
                let (d, params) = small();
                let n = d.len();
                let u: Vec<f64> = (0..n).map(|i| vals[(i * 13) % vals.len()]).collect();
                let shifted: Vec<f64> = u.iter().map(|v| v + c).collect();
                let field = ValueField::with_values(d.clone(), u).unwrap();
                let tu = dpp_apply(&field, &params).unwrap();
                let tv = dpp_apply(&ValueField::with_values(d.clone(), shifted).unwrap(), &params).unwrap();
                for &i in d.interior_points() {
                    prop_assert!((tv.value(i) - tu.value(i) - c).abs() < 1e-12);
                    let ball: Vec<f64> = d.neighbor_indices(i).unwrap().iter().map(|&j| field.value(j as usize)).collect();
                    let lo = ball.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = ball.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    prop_assert!(lo - 1e-12 <= tu.value(i) && tu.value(i) <= hi + 1e-12);
                }
            }
        }
    }
}
