//! Exact reference solutions and the studies that compare solved fields with them.
//!
//! The radial reference `|x − c|^κ`, `κ = (p − n)/(p − 1)`, is a standard
//! p-harmonic function away from its centre. Nothing here takes that on faith:
//! [`certify_reference`] checks it against the finite-difference normalised
//! p-Laplacian before any study consumes it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::domain::{DiscreteDomain, DomainSpec};
use crate::dpp::{self, GameParams, SolveOptions, ValueField};
use crate::error::{Error, Result};
use crate::vecmath;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceSolution {
    Affine { nu: Vec<f64>, b: f64 },
    Radial { p: f64, n: usize, kappa: f64, center: Vec<f64> },
}

impl ReferenceSolution {
    pub fn affine(nu: Vec<f64>, b: f64) -> Self {
        ReferenceSolution::Affine { nu, b }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            ReferenceSolution::Affine { nu, b } => vecmath::dot(nu, x) + b,
            ReferenceSolution::Radial { kappa, center, .. } => vecmath::dist(x, center).powf(*kappa),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ReferenceSolution::Affine { nu, .. } => nu.clone(),
            ReferenceSolution::Radial { kappa, center, .. } => {
                let d = vecmath::sub(x, center);
                let r = vecmath::norm(&d);
                vecmath::scale(&d, kappa * r.powf(kappa - 2.0))
            }
        }
    }
}

/// `|x|^κ` with `κ = (p − n)/(p − 1)`.
pub fn radial_reference(p: f64, n: usize) -> Result<ReferenceSolution> {
    radial_reference_at(p, n, vec![0.0; n])
}

pub fn radial_reference_at(p: f64, n: usize, center: Vec<f64>) -> Result<ReferenceSolution> {
    if !(p > 2.0 && p.is_finite()) || n < 2 {
        return Err(Error::Parameter(format!("radial reference needs 2 < p < ∞ and n ≥ 2, got p = {p}, n = {n}")));
    }
    if p == n as f64 {
        return Err(Error::Parameter(format!(
            "p = n = {n} gives the logarithmic solution, which is not supported"
        )));
    }
    if center.len() != n {
        return Err(Error::Parameter("centre has the wrong dimension".into()));
    }
    Ok(ReferenceSolution::Radial {
        p,
        n,
        kappa: (p - n as f64) / (p - 1.0),
        center,
    })
}

/// Central-difference normalised p-Laplacian `Δu + (p−2) ⟨D²u g, g⟩`, `g = Du/|Du|`.
pub fn p_laplacian_residual(u: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64, p: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("stencil width must be > 0, got {h}")));
    }
    let n = x.len();
    let mut y = x.to_vec();
    let mut at = |offs: &[(usize, f64)]| {
        y.copy_from_slice(x);
        for &(i, s) in offs {
            y[i] += s;
        }
        u(&y)
    };
    let u0 = at(&[]);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n * n];
    for i in 0..n {
        let up = at(&[(i, h)]);
        let down = at(&[(i, -h)]);
        grad[i] = (up - down) / (2.0 * h);
        hess[i * n + i] = (up - 2.0 * u0 + down) / (h * h);
        for j in 0..i {
            let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)])
                + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            hess[i * n + j] = v;
            hess[j * n + i] = v;
        }
    }
    let g = vecmath::norm(&grad);
    if g <= 10.0 * h {
        return Err(Error::Domain(format!(
            "degenerate gradient |Du| = {g:.3e} ≤ 10h at {x:?}"
        )));
    }
    let dir = vecmath::scale(&grad, 1.0 / g);
    let mut quad = 0.0;
    let mut trace = 0.0;
    for i in 0..n {
        trace += hess[i * n + i];
        for j in 0..n {
            quad += dir[i] * hess[i * n + j] * dir[j];
        }
    }
    Ok(trace + (p - 2.0) * quad)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualCertificate {
    pub points: usize,
    pub h: f64,
    pub max_abs_h: f64,
    pub max_abs_half: f64,
    /// RMS residual ratio between `h` and `h/2`.
    pub ratio: f64,
    /// Max of the Richardson combination `(4 R(h/2) − R(h)) / 3`.
    pub max_extrapolated: f64,
    pub tol: f64,
    pub certified: bool,
}

/// Certifies `reference` as p-harmonic at `points`: the residual must shrink at
/// second order between `h` and `h/2` (RMS ratio in `[3.5, 4.5]`, unless it already
/// vanishes to `tol` at `h`) and the extrapolated residual must stay below `tol`.
pub fn certify_reference(
    reference: &ReferenceSolution,
    points: &[Vec<f64>],
    h: f64,
    p: f64,
    tol: f64,
) -> Result<ResidualCertificate> {
    if points.is_empty() {
        return Err(Error::Parameter("no certification points".into()));
    }
    let u = |x: &[f64]| reference.value(x);
    let (mut s1, mut s2) = (0.0, 0.0);
    let (mut m1, mut m2, mut mx): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for x in points {
        let a = p_laplacian_residual(&u, x, h, p)?;
        let b = p_laplacian_residual(&u, x, 0.5 * h, p)?;
        s1 += a * a;
        s2 += b * b;
        m1 = m1.max(a.abs());
        m2 = m2.max(b.abs());
        mx = mx.max(((4.0 * b - a) / 3.0).abs());
    }
    let ratio = if s2 > 0.0 { (s1 / s2).sqrt() } else { f64::NAN };
    let second_order = m1 <= tol || (3.5..=4.5).contains(&ratio);
    Ok(ResidualCertificate {
        points: points.len(),
        h,
        max_abs_h: m1,
        max_abs_half: m2,
        ratio,
        max_extrapolated: mx,
        tol,
        certified: second_order && mx <= tol,
    })
}

/// Deterministic certification points: `rings × angles` points on circles between
/// radii `r_lo` and `r_hi` (first two coordinates; others at the centre).
pub fn ring_points(center: &[f64], r_lo: f64, r_hi: f64, rings: usize, angles: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(rings * angles);
    for a in 0..rings {
        let r = if rings == 1 { r_lo } else { r_lo + (r_hi - r_lo) * a as f64 / (rings - 1) as f64 };
        for b in 0..angles {
            let th = 2.0 * std::f64::consts::PI * (b as f64 + 0.5) / angles as f64;
            let mut x = center.to_vec();
            x[0] += r * th.cos();
            x[1] += r * th.sin();
            out.push(x);
        }
    }
    out
}

/// Ball over which Lipschitz quotients are scanned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub min_separation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub h: f64,
    pub sup_error: f64,
    pub max_gradient: f64,
    pub iterations: usize,
    pub final_residual: f64,
    pub bounds_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// `sup_error` non-increasing along the list.
    pub monotone: bool,
    /// Last row strictly better than the first.
    pub endpoint_improved: bool,
    /// `(max − min) / min` of the `max_gradient` column.
    pub gradient_spread: f64,
}

impl ConvergenceReport {
    /// `eps,h,sup_error,max_gradient,iterations,final_residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,h,sup_error,max_gradient,iterations,final_residual\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.eps, r.h, r.sup_error, r.max_gradient, r.iterations, r.final_residual
            ));
        }
        out
    }
}

/// Solves the DPP with `F = reference` on the strip of `spec` at `(h, ε)`.
pub fn solve_reference(
    spec: &DomainSpec,
    reference: &ReferenceSolution,
    eps: f64,
    h: f64,
    p: f64,
    opts: SolveOptions,
) -> Result<(ValueField, dpp::SolveReport)> {
    let domain = Arc::new(DiscreteDomain::build(spec.clone(), h, eps)?);
    let params = GameParams::for_domain(p, &domain)?;
    dpp::solve_dpp(domain, |x| reference.value(x), &params, opts)
}

/// Per-ε sup error against `reference` and Lipschitz scan maximum, with the solved
/// fields returned in list order.
pub fn convergence_study(
    spec: &DomainSpec,
    reference: &ReferenceSolution,
    eps_list: &[f64],
    h_ratio: f64,
    p: f64,
    opts: SolveOptions,
    scan: &ScanBall,
) -> Result<(ConvergenceReport, Vec<ValueField>)> {
    if eps_list.is_empty() {
        return Err(Error::Parameter("empty ε list".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("ε list must be strictly descending".into()));
    }
    if !(h_ratio > 0.0 && h_ratio <= 1.0) {
        return Err(Error::Parameter(format!("h/ε must lie in (0, 1], got {h_ratio}")));
    }
    let solved: Vec<Result<(ConvergenceRow, ValueField)>> = eps_list
        .par_iter()
        .map(|&eps| {
            let h = eps * h_ratio;
            let (field, rep) = solve_reference(spec, reference, eps, h, p, opts)?;
            let d = field.domain();
            let sup_error = d
                .interior_points()
                .iter()
                .map(|&i| (field.value(i) - reference.value(d.point(i))).abs())
                .fold(0.0, f64::max);
            let lip = dpp::lipschitz_scan(&field, &scan.center, scan.radius, scan.min_separation)?;
            let row = ConvergenceRow {
                eps,
                h,
                sup_error,
                max_gradient: lip.max_ratio,
                iterations: rep.iterations,
                final_residual: rep.final_residual,
                bounds_ok: dpp::check_bounds(&field),
            };
            Ok((row, field))
        })
        .collect();
    let mut rows = Vec::new();
    let mut fields = Vec::new();
    for s in solved {
        let (r, f) = s?;
        rows.push(r);
        fields.push(f);
    }
    let monotone = rows.windows(2).all(|w| w[1].sup_error <= w[0].sup_error);
    let endpoint_improved = rows.last().unwrap().sup_error < rows[0].sup_error;
    let gmax = rows.iter().map(|r| r.max_gradient).fold(f64::MIN, f64::max);
    let gmin = rows.iter().map(|r| r.max_gradient).fold(f64::MAX, f64::min);
    Ok((
        ConvergenceReport {
            rows,
            monotone,
            endpoint_improved,
            gradient_spread: (gmax - gmin) / gmin,
        },
        fields,
    ))
}

/// Smooth bump `w · (1 − |x − c|²/ρ²)₊²`.
pub fn bump(center: Vec<f64>, radius: f64, direction: Vec<f64>) -> impl Fn(&[f64]) -> Vec<f64> + Sync {
    move |x: &[f64]| {
        let s = 1.0 - vecmath::dist(x, &center).powi(2) / (radius * radius);
        let w = if s > 0.0 { s * s } else { 0.0 };
        vecmath::scale(&direction, w)
    }
}

/// `(Σ ⟨D_h u, φ⟩ hⁿ, Σ ⟨Du_ref, φ⟩ hⁿ)` over interior points of the support ball,
/// with `D_h` the centred lattice difference.
pub fn weak_gradient_pairing(
    field: &ValueField,
    test_fn: &dyn Fn(&[f64]) -> Vec<f64>,
    support_center: &[f64],
    support_radius: f64,
    reference: &ReferenceSolution,
) -> Result<(f64, f64)> {
    let d = field.domain();
    let sd = d.spec().signed_distance(support_center);
    if sd > -(support_radius + d.eps()) {
        return Err(Error::Domain(format!(
            "test-function support B_{support_radius}({support_center:?}) is within ε of the strip"
        )));
    }
    let h = d.h();
    let vol = h.powi(d.dim() as i32);
    let (mut pf, mut pr) = (0.0, 0.0);
    for &i in d.interior_points() {
        let x = d.point(i);
        if vecmath::dist(x, support_center) >= support_radius {
            continue;
        }
        let phi = test_fn(x);
        let k = d.lattice_index(i);
        let mut key = k.to_vec();
        for (axis, phi_a) in phi.iter().enumerate() {
            key[axis] = k[axis] + 1;
            let up = d.index_of_lattice(&key);
            key[axis] = k[axis] - 1;
            let down = d.index_of_lattice(&key);
            key[axis] = k[axis];
            let (Some(up), Some(down)) = (up, down) else {
                return Err(Error::Domain(format!("lattice neighbour missing at point {i}")));
            };
            pf += (field.value(up) - field.value(down)) / (2.0 * h) * phi_a * vol;
        }
        pr += vecmath::dot(&reference.gradient(x), &phi) * vol;
    }
    Ok((pf, pr))
}

/// Plane `ν·x + b` with allowed deviation `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneEnvelope {
    pub nu: Vec<f64>,
    pub b: f64,
    pub delta: f64,
}

impl PlaneEnvelope {
    fn plane(&self, x: &[f64]) -> f64 {
        vecmath::dot(&self.nu, x) + self.b
    }

    fn check_hypothesis(&self, field: &ValueField) -> Result<()> {
        if !(self.delta >= 0.0) {
            return Err(Error::Usage(format!("envelope deviation must be ≥ 0, got {}", self.delta)));
        }
        let d = field.domain();
        if self.nu.len() != d.dim() {
            return Err(Error::Usage("envelope slope has the wrong dimension".into()));
        }
        for (i, f) in field.boundary_values() {
            let dev = (f - self.plane(d.point(i))).abs();
            if dev > self.delta + 1e-12 {
                return Err(Error::Usage(format!(
                    "boundary data leaves the envelope at strip point {i} ({:?}): |F − plane| = {dev} > δ = {}",
                    d.point(i),
                    self.delta
                )));
            }
        }
        Ok(())
    }
}

/// Slack for envelope comparisons. The fixed-point error is a few hundred times the
/// stopping residual on fine lattices, so envelope studies solve at [`ENVELOPE_TOL`].
pub const ENVELOPE_SLACK: f64 = 1e-8;
pub const ENVELOPE_TOL: f64 = 1e-12;

/// `ν·x + b − δ ≤ u ≤ ν·x + b + δ` everywhere (up to [`ENVELOPE_SLACK`]), after
/// checking that the boundary data obeys the same envelope.
pub fn plane_envelope_check(field: &ValueField, env: &PlaneEnvelope) -> Result<bool> {
    env.check_hypothesis(field)?;
    let d = field.domain();
    Ok((0..d.len()).all(|i| {
        let dev = (field.value(i) - env.plane(d.point(i))).abs();
        dev <= env.delta + ENVELOPE_SLACK
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovedLipschitzReport {
    pub guard_c: f64,
    /// `max (|u(x) − u(y)| − (5|ν| + guardC·δ) ε) / |x − y|`.
    pub excess_slope: f64,
    /// `|ν| + guardC·δ`.
    pub threshold: f64,
    pub pass: bool,
    pub worst_pair: (usize, usize),
    pub pairs: usize,
    /// `max |u(x) − u(y)| / |x − y|` over the same pairs.
    pub max_slope: f64,
    /// `(max_slope − |ν|) / δ`: the δ-coefficient the data actually needs.
    pub measured_constant: f64,
}

/// Scans pairs with `|x − y| ≥ 10ε` in `B_r(center)` against the improved estimate
/// `|u(x) − u(y)| ≤ (|ν| + Cδ)|x − y| + (5|ν| + Cδ) ε` with `C = guard_c`.
pub fn improved_lipschitz_check(
    field: &ValueField,
    env: &PlaneEnvelope,
    center: &[f64],
    r: f64,
    guard_c: f64,
) -> Result<ImprovedLipschitzReport> {
    env.check_hypothesis(field)?;
    let d = field.domain();
    if d.spec().signed_distance(center) > -r {
        return Err(Error::Query(format!("scan ball B_{r}({center:?}) is not inside the domain")));
    }
    let eps = d.eps();
    let nu = vecmath::norm(&env.nu);
    let offset = (5.0 * nu + guard_c * env.delta) * eps;
    let pts: Vec<usize> = d
        .interior_points()
        .iter()
        .copied()
        .filter(|&i| vecmath::dist(d.point(i), center) < r)
        .collect();
    let min_sep = 10.0 * eps;
    // Per-row maxima in parallel, reduced in row order.
    let rows: Vec<(f64, f64, (usize, usize), usize)> = pts
        .par_iter()
        .enumerate()
        .map(|(a, &i)| {
            let mut best = (f64::NEG_INFINITY, 0.0, (i, i), 0usize);
            for &j in &pts[a + 1..] {
                let dist = vecmath::dist(d.point(i), d.point(j));
                if dist < min_sep {
                    continue;
                }
                best.3 += 1;
                let diff = (field.value(i) - field.value(j)).abs();
                let ex = (diff - offset) / dist;
                if ex > best.0 {
                    best.0 = ex;
                    best.2 = (i, j);
                }
                best.1 = f64::max(best.1, diff / dist);
            }
            best
        })
        .collect();
    let mut excess = f64::NEG_INFINITY;
    let mut worst = (0, 0);
    let mut pairs = 0;
    let mut max_slope: f64 = 0.0;
    for (ex, sl, pair, cnt) in rows {
        pairs += cnt;
        max_slope = max_slope.max(sl);
        if cnt > 0 && ex > excess {
            excess = ex;
            worst = pair;
        }
    }
    if pairs == 0 {
        return Err(Error::Query(format!(
            "no pair with |x − y| ≥ 10ε = {min_sep} inside B_{r}({center:?})"
        )));
    }
    let threshold = nu + guard_c * env.delta;
    let measured = if env.delta > 0.0 { (max_slope - nu) / env.delta } else { 0.0 };
    Ok(ImprovedLipschitzReport {
        guard_c,
        excess_slope: excess,
        threshold,
        pass: excess <= threshold,
        worst_pair: worst,
        pairs,
        max_slope,
        measured_constant: measured,
    })
}
