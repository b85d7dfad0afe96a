//! Explicit barrier functions for the cylinder walk.
//!
//! Both barriers are built from the profile `ρ(ζ, t)^{1−n}` with
//!
//! ```text
//! ρ(ζ, t)² = |ζ|² + (s(t) + R)²,   s(t) = √3 t / √(p − 2),
//! ```
//!
//! which solves `(p−2)/3 ∂_tt v + Δ_ζ v = 0` away from its pole at
//! `(0, −R√(p−2)/√3)`: after the change of variable `τ = s(t)` it is the
//! fundamental solution of the `(n+1)`-dimensional Laplacian. (For `n = 1` the
//! profile is `log ρ`.)

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::vecmath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams {
    pub nu_mag: f64,
    pub delta: f64,
    /// Barrier constant `C > 2`.
    pub c: f64,
    /// Plane offset; the barrier itself does not depend on it.
    pub b: f64,
    pub r: f64,
    pub big_r: f64,
    pub p: f64,
    pub n: usize,
}

impl BarrierParams {
    pub fn new(nu_mag: f64, delta: f64, c: f64, r: f64, big_r: f64, p: f64, n: usize) -> Result<Self> {
        let bp = BarrierParams { nu_mag, delta, c, b: 0.0, r, big_r, p, n };
        bp.validate()?;
        Ok(bp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 2.0) {
            return Err(Error::Parameter(format!("barrier constant must exceed 2, got {}", self.c)));
        }
        if !(self.r > 0.0 && self.big_r >= 2.0 * self.r) {
            return Err(Error::Parameter(format!(
                "need r > 0 and R ≥ 2r, got r = {}, R = {}",
                self.r, self.big_r
            )));
        }
        if !(self.p > 2.0 && self.p.is_finite()) {
            return Err(Error::Parameter(format!("need 2 < p < ∞, got {}", self.p)));
        }
        if self.n == 0 || !(self.nu_mag >= 0.0) || !(self.delta >= 0.0) {
            return Err(Error::Parameter("need n ≥ 1, |ν| ≥ 0 and δ ≥ 0".into()));
        }
        Ok(())
    }

    /// Scaled height `√3 t / √(p − 2)`.
    pub fn s(&self, t: f64) -> f64 {
        scaled_height(self.p, t)
    }

    pub fn rho(&self, zeta: &[f64], t: f64) -> f64 {
        rho(self.p, self.big_r, zeta, t)
    }

    /// `[R^{1−n} − ρ^{1−n}] / [r^{1−n} − R^{1−n}]`.
    pub fn bracket(&self, zeta: &[f64], t: f64) -> Result<f64> {
        let rho = self.rho(zeta, t);
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("barrier pole at ζ = {zeta:?}, t = {t}")));
        }
        let k = 1.0 - self.n as f64;
        Ok((self.big_r.powf(k) - rho.powf(k)) / (self.r.powf(k) - self.big_r.powf(k)))
    }
}

fn scaled_height(p: f64, t: f64) -> f64 {
    3f64.sqrt() * t / (p - 2.0).sqrt()
}

fn rho(p: f64, big_r: f64, zeta: &[f64], t: f64) -> f64 {
    let a = scaled_height(p, t) + big_r;
    (vecmath::dot(zeta, zeta) + a * a).sqrt()
}

/// Region `B_radius(0) × [t_lo, t_hi]` on which a barrier is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub radius: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Slab {
    /// `B_{2r} × [−ε, height + ε]`.
    pub fn for_cylinder(r: f64, height: f64, eps: f64) -> Self {
        Slab { radius: 2.0 * r, t_lo: -eps, t_hi: height + eps }
    }

    pub fn contains(&self, zeta: &[f64], t: f64) -> bool {
        vecmath::norm(zeta) <= self.radius && t >= self.t_lo && t <= self.t_hi
    }
}

/// `ū(ζ, t) = 2|ν| t + Cδ [R^{1−n} − ρ^{1−n}] / [r^{1−n} − R^{1−n}]`.
pub fn plane_barrier(zeta: &[f64], t: f64, bp: &BarrierParams) -> Result<f64> {
    Ok(2.0 * bp.nu_mag * t + bp.c * bp.delta * bp.bracket(zeta, t)?)
}

/// Logarithmic variant for a one-dimensional base:
/// `cδ [log ρ − log R] / [log r − log R] + 2|ν| t`.
pub fn barrier_1d(zeta: f64, t: f64, bp: &BarrierParams) -> Result<f64> {
    let rho = bp.rho(&[zeta], t);
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("barrier pole at ζ = {zeta}, t = {t}")));
    }
    let frac = (rho.ln() - bp.big_r.ln()) / (bp.r.ln() - bp.big_r.ln());
    Ok(bp.c * bp.delta * frac + 2.0 * bp.nu_mag * t)
}

/// Central-difference `(p−2)/3 f_tt + Δ_ζ f` at `(ζ, t)`.
pub fn barrier_pde_residual(
    f: &dyn Fn(&[f64], f64) -> f64,
    zeta: &[f64],
    t: f64,
    h: f64,
    p: f64,
    slab: &Slab,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("stencil width must be > 0, got {h}")));
    }
    let reach = vecmath::norm(zeta) + h;
    if reach > slab.radius || t - h < slab.t_lo || t + h > slab.t_hi {
        return Err(Error::Domain(format!(
            "stencil of width {h} at ζ = {zeta:?}, t = {t} leaves the slab"
        )));
    }
    let f0 = f(zeta, t);
    let h2 = h * h;
    let ftt = (f(zeta, t + h) - 2.0 * f0 + f(zeta, t - h)) / h2;
    let mut lap = 0.0;
    let mut y = zeta.to_vec();
    for i in 0..zeta.len() {
        y[i] = zeta[i] + h;
        let up = f(&y, t);
        y[i] = zeta[i] - h;
        let down = f(&y, t);
        y[i] = zeta[i];
        lap += (up - 2.0 * f0 + down) / h2;
    }
    Ok((p - 2.0) / 3.0 * ftt + lap)
}

/// Barrier for the hitting estimate of the cancellation coupling:
///
/// ```text
/// v̄(ζ, t) = [ρ^{1−n} − ρ*^{1−n}] / [ρ₀^{1−n} − ρ*^{1−n}]
/// ```
///
/// with `ρ*` the minimum of `ρ` over the sides and top of `B_r × (0, height)` and
/// `ρ₀` the maximum over the disc `B_{r/2} × {−ε}`, so that `v̄ ≤ 0` on sides and
/// top and `v̄ ≥ 1` on that disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Barrier {
    pub r: f64,
    pub height: f64,
    pub eps: f64,
    pub big_r: f64,
    pub p: f64,
    pub n: usize,
    pub rho_star: f64,
    pub rho_0: f64,
}

impl Lemma31Barrier {
    /// Builds the barrier and verifies its sign conditions on 2000 seeded samples.
    pub fn new(r: f64, height: f64, eps: f64, big_r: f64, p: f64, n: usize) -> Result<Self> {
        if !(r > 0.0 && height > 0.0 && eps > 0.0 && big_r > 0.0 && p > 2.0 && n >= 2) {
            return Err(Error::Geometry(format!(
                "invalid geometry r = {r}, height = {height}, ε = {eps}, R = {big_r}, p = {p}, n = {n}"
            )));
        }
        let s = |t: f64| scaled_height(p, t);
        if s(-eps) + big_r <= 0.0 {
            return Err(Error::Geometry(format!(
                "profile pole at t = {} lies inside the slab",
                -big_r / s(1.0)
            )));
        }
        let rho_star = (r * r + big_r * big_r).sqrt().min(s(height) + big_r);
        let a = s(-eps) + big_r;
        let rho_0 = (0.25 * r * r + a * a).sqrt();
        if rho_0 >= rho_star {
            return Err(Error::Geometry(format!(
                "bottom disc is not separated from sides/top: ρ₀ = {rho_0} ≥ ρ* = {rho_star}"
            )));
        }
        let g = Lemma31Barrier { r, height, eps, big_r, p, n, rho_star, rho_0 };
        g.validate_signs(2000)?;
        Ok(g)
    }

    pub fn value(&self, zeta: &[f64], t: f64) -> f64 {
        let k = 1.0 - self.n as f64;
        let rho = rho(self.p, self.big_r, zeta, t);
        (rho.powf(k) - self.rho_star.powf(k)) / (self.rho_0.powf(k) - self.rho_star.powf(k))
    }

    fn validate_signs(&self, samples: usize) -> Result<()> {
        let mut rng = rng::rng_from_seed(0x5EED_B0B0);
        let tol = 1e-12;
        for k in 0..samples {
            let (zeta, t, want_le_zero) = match k % 3 {
                0 => (sphere_point(&mut rng, self.n, self.r), self.height * rng.random::<f64>(), true),
                1 => (rng::uniform_in_ball(&mut rng, self.n, self.r), self.height, true),
                _ => (rng::uniform_in_ball(&mut rng, self.n, 0.5 * self.r), -self.eps, false),
            };
            let v = self.value(&zeta, t);
            let bad = if want_le_zero { v > tol } else { v < 1.0 - tol };
            if bad {
                return Err(Error::Geometry(format!(
                    "sign condition fails at ζ = {zeta:?}, t = {t}: v̄ = {v}"
                )));
            }
        }
        Ok(())
    }
}

pub fn lemma31_barrier(zeta: &[f64], t: f64, g: &Lemma31Barrier) -> f64 {
    g.value(zeta, t)
}

fn sphere_point<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let g = rng::uniform_in_ball(rng, n, 1.0);
        let len = vecmath::norm(&g);
        if len > 1e-3 {
            return vecmath::scale(&g, radius / len);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub samples: usize,
    /// Minimum of `ū − (2|ν|t + 2δ)` over side samples.
    pub side_margin: f64,
    /// Minimum of `ū − (2|ν| height + 2δ)` over top samples.
    pub top_margin: f64,
    /// Minimum of `ū` over bottom samples.
    pub bottom_min: f64,
    pub origin_value: f64,
    pub pass: bool,
    /// Sample with the most negative margin, `(ζ, t)`.
    pub worst_point: (Vec<f64>, f64),
    /// Smallest `C` for which the sampled side and top conditions hold.
    pub minimal_c: f64,
}

/// Samples the side, top and bottom of `B_r × [0, height]` (`samples` points in
/// total, seeded) and checks `ū ≥ 2|ν|t + 2δ` on the sides, `ū ≥ 2|ν| height + 2δ`
/// on the top, `ū ≥ 0` on the bottom and `ū(0, 0) = 0`.
pub fn check_plane_barrier_boundary(bp: &BarrierParams, height: f64, samples: usize, seed: u64) -> Result<BoundaryCheck> {
    bp.validate()?;
    let mut rng = rng::rng_from_seed(seed);
    let mut side: f64 = f64::INFINITY;
    let mut top: f64 = f64::INFINITY;
    let mut bottom: f64 = f64::INFINITY;
    let mut worst = (f64::INFINITY, (vec![0.0; bp.n], 0.0));
    let mut min_bracket: f64 = f64::INFINITY;
    for k in 0..samples {
        let (zeta, t) = match k % 3 {
            0 => (sphere_point(&mut rng, bp.n, bp.r), height * rng.random::<f64>()),
            1 => (rng::uniform_in_ball(&mut rng, bp.n, bp.r), height),
            _ => (rng::uniform_in_ball(&mut rng, bp.n, bp.r), 0.0),
        };
        let u = plane_barrier(&zeta, t, bp)?;
        let margin = match k % 3 {
            0 | 1 => {
                min_bracket = min_bracket.min(bp.bracket(&zeta, t)?);
                let m = u - (2.0 * bp.nu_mag * t + 2.0 * bp.delta);
                if k % 3 == 0 {
                    side = side.min(m);
                } else {
                    top = top.min(m);
                }
                m
            }
            _ => {
                bottom = bottom.min(u);
                u
            }
        };
        if margin < worst.0 {
            worst = (margin, (zeta, t));
        }
    }
    let origin = plane_barrier(&vec![0.0; bp.n], 0.0, bp)?;
    let pass = side >= -1e-12 && top >= -1e-12 && bottom >= -1e-12 && origin.abs() <= 1e-12;
    Ok(BoundaryCheck {
        samples,
        side_margin: side,
        top_margin: top,
        bottom_min: bottom,
        origin_value: origin,
        pass,
        worst_point: worst.1,
        minimal_c: 2.0 / min_bracket,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub samples: usize,
    pub max_dt: f64,
    /// `max (|∂_t ū| − 2|ν|) / δ` over the samples.
    pub fitted_dt_constant: f64,
    /// `C (n−1) √3/√(p−2) R^{−n} / (r^{1−n} − R^{1−n})`, valid for `t ≥ 0`.
    pub analytic_dt_constant: f64,
    /// `max |D³ū[v,v,v]| / δ` over sampled points and directions.
    pub fitted_d3_constant: f64,
    pub pass: bool,
}

/// Finite-difference derivative bounds of `ū` over `B_r × [0, height]`.
pub fn plane_barrier_derivatives(bp: &BarrierParams, height: f64, samples: usize, seed: u64) -> Result<DerivativeCheck> {
    bp.validate()?;
    let mut rng = rng::rng_from_seed(seed);
    let n = bp.n;
    let hd = 1e-5;
    let h3 = 1e-2;
    let mut max_dt: f64 = 0.0;
    let mut max_d3: f64 = 0.0;
    let f = |z: &[f64], t: f64| plane_barrier(z, t, bp);
    for _ in 0..samples {
        let zeta = rng::uniform_in_ball(&mut rng, n, bp.r);
        let t = 2.0 * h3 + (height - 4.0 * h3) * rng.random::<f64>();
        let dt = (f(&zeta, t + hd)? - f(&zeta, t - hd)?) / (2.0 * hd);
        max_dt = max_dt.max(dt.abs());
        // Third directional derivative along a random unit vector of R^{n+1}.
        let dir = sphere_point(&mut rng, n + 1, 1.0);
        let at = |s: f64| -> Result<f64> {
            let z: Vec<f64> = zeta.iter().zip(&dir).map(|(a, d)| a + s * d).collect();
            f(&z, t + s * dir[n])
        };
        let d3 = (at(2.0 * h3)? - 2.0 * at(h3)? + 2.0 * at(-h3)? - at(-2.0 * h3)?) / (2.0 * h3.powi(3));
        max_d3 = max_d3.max(d3.abs());
    }
    let k = 1.0 - n as f64;
    let analytic = bp.c * (n as f64 - 1.0) * 3f64.sqrt() / (bp.p - 2.0).sqrt() * bp.big_r.powi(-(n as i32))
        / (bp.r.powf(k) - bp.big_r.powf(k));
    let (fit_dt, fit_d3) = if bp.delta > 0.0 {
        ((max_dt - 2.0 * bp.nu_mag).max(0.0) / bp.delta, max_d3 / bp.delta)
    } else {
        (0.0, 0.0)
    };
    Ok(DerivativeCheck {
        samples,
        max_dt,
        fitted_dt_constant: fit_dt,
        analytic_dt_constant: analytic,
        fitted_d3_constant: fit_d3,
        pass: fit_dt <= analytic * (1.0 + 1e-6) + 1e-6,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualConvergence {
    pub points: usize,
    pub h: f64,
    pub rms_h: f64,
    pub rms_half: f64,
    /// `rms(h) / rms(h/2)`; `≈ 4` for a second-order-consistent exact solution.
    pub ratio: f64,
    /// Points whose own ratio lies in `[3.5, 4.5]`; individual ratios are
    /// sensitive to rounding once the truncation error nears `1e-8`.
    pub points_in_band: usize,
    pub max_abs_h: f64,
}

/// Residual of `f` at `points` seeded samples of `B_r × (0, height)`, at `h` and `h/2`.
#[allow(clippy::too_many_arguments)]
pub fn residual_convergence(
    f: &dyn Fn(&[f64], f64) -> f64,
    n: usize,
    r: f64,
    height: f64,
    p: f64,
    slab: &Slab,
    h: f64,
    points: usize,
    seed: u64,
) -> Result<ResidualConvergence> {
    let mut rng = rng::rng_from_seed(seed);
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut in_band = 0;
    let mut max_abs: f64 = 0.0;
    for _ in 0..points {
        let zeta = rng::uniform_in_ball(&mut rng, n, r);
        let t = height * rng::open_unit(&mut rng).min(1.0 - 1e-9);
        let a = barrier_pde_residual(f, &zeta, t, h, p, slab)?;
        let b = barrier_pde_residual(f, &zeta, t, 0.5 * h, p, slab)?;
        s1 += a * a;
        s2 += b * b;
        max_abs = max_abs.max(a.abs());
        if (3.5..=4.5).contains(&(a / b)) {
            in_band += 1;
        }
    }
    let rms_h = (s1 / points as f64).sqrt();
    let rms_half = (s2 / points as f64).sqrt();
    Ok(ResidualConvergence {
        points,
        h,
        rms_h,
        rms_half,
        ratio: rms_h / rms_half,
        points_in_band: in_band,
        max_abs_h: max_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_bp(nu: f64, delta: f64) -> BarrierParams {
        BarrierParams::new(nu, delta, 2.5, 1.0, 2.0, 4.0, 2).unwrap()
    }

    #[test]
    fn barrier_vanishes_at_origin_and_for_zero_data() {
        let bp = default_bp(1.0, 0.3);
        assert!(plane_barrier(&[0.0, 0.0], 0.0, &bp).unwrap().abs() <= 1e-15);
        let zero = default_bp(0.0, 0.0);
        assert_eq!(plane_barrier(&[0.4, -0.2], 0.7, &zero).unwrap(), 0.0);
        assert!(BarrierParams::new(1.0, 0.1, 2.0, 1.0, 2.0, 4.0, 2).is_err());
        assert!(BarrierParams::new(1.0, 0.1, 3.0, 1.0, 1.5, 4.0, 2).is_err());
    }

    #[test]
    fn residual_of_simple_functions() {
        let slab = Slab::for_cylinder(1.0, 1.0, 0.1);
        let aff = |_: &[f64], t: f64| 3.0 * t - 1.0;
        assert!(barrier_pde_residual(&aff, &[0.1, 0.2], 0.5, 1e-3, 4.0, &slab).unwrap().abs() < 1e-8);
        let sq = |z: &[f64], _: f64| vecmath::dot(z, z);
        let r = barrier_pde_residual(&sq, &[0.1, 0.2], 0.5, 1e-2, 4.0, &slab).unwrap();
        assert_relative_eq!(r, 4.0, epsilon = 1e-10);
        assert!(barrier_pde_residual(&sq, &[1.995, 0.0], 0.5, 1e-2, 4.0, &slab).is_err());
    }

    #[test]
    fn plane_barrier_is_second_order_consistent() {
        let bp = default_bp(1.0, 1.0);
        let f = |z: &[f64], t: f64| plane_barrier(z, t, &bp).unwrap();
        let slab = Slab::for_cylinder(1.0, 1.1, 0.05);
        let rc = residual_convergence(&f, 2, 1.0, 1.1, 4.0, &slab, 2e-3, 50, 3).unwrap();
        assert!((3.5..=4.5).contains(&rc.ratio), "{rc:?}");
    }

    #[test]
    fn analytic_t_derivative_matches_fd() {
        let bp = default_bp(0.7, 0.4);
        let (z, t) = ([0.3, -0.2], 0.6);
        let k = bp.s(1.0);
        let rho = bp.rho(&z, t);
        let a = bp.s(t) + bp.big_r;
        let exact = 2.0 * 0.7 + 2.5 * 0.4 * k * rho.powi(-3) * a / (1.0 - 0.5);
        let fd = (plane_barrier(&z, t + 1e-6, &bp).unwrap() - plane_barrier(&z, t - 1e-6, &bp).unwrap()) / 2e-6;
        assert_relative_eq!(fd, exact, epsilon = 1e-8);
        let d = plane_barrier_derivatives(&bp, 1.1, 200, 1).unwrap();
        assert!(d.pass, "{d:?}");
    }

    #[test]
    fn one_dimensional_barrier() {
        let bp = BarrierParams { n: 1, ..default_bp(0.5, 0.2) };
        assert!(barrier_1d(0.0, 0.0, &bp).unwrap().abs() < 1e-15);
        let flat = BarrierParams { delta: 0.0, ..bp };
        assert_relative_eq!(barrier_1d(0.3, 0.8, &flat).unwrap(), 0.8, epsilon = 1e-15);
        // |∂_t ū| ≤ 3|ν| + Cδ over the slab, with C the fitted constant.
        let mut fitted: f64 = 0.0;
        for i in 0..40 {
            for j in 0..40 {
                let z = -1.0 + 2.0 * i as f64 / 39.0;
                let t = -0.05 + 1.2 * j as f64 / 39.0;
                let d = (barrier_1d(z, t + 1e-6, &bp).unwrap() - barrier_1d(z, t - 1e-6, &bp).unwrap()) / 2e-6;
                fitted = fitted.max((d.abs() - 3.0 * 0.5).max(0.0) / 0.2);
            }
        }
        assert!(fitted.is_finite());
        // The log profile is harmonic for the transformed operator in 1 + 1 dimensions.
        let f = |z: &[f64], t: f64| barrier_1d(z[0], t, &bp).unwrap();
        let slab = Slab::for_cylinder(1.0, 1.1, 0.05);
        let a = barrier_pde_residual(&f, &[0.3], 0.4, 2e-3, 4.0, &slab).unwrap();
        let b = barrier_pde_residual(&f, &[0.3], 0.4, 1e-3, 4.0, &slab).unwrap();
        assert!((3.5..=4.5).contains(&(a / b)), "{a} {b}");
    }

    #[test]
    fn lemma31_barrier_signs_and_normalisation() {
        let g = Lemma31Barrier::new(1.0, 1.15, 0.1, 2.0, 4.0, 2).unwrap();
        assert!(g.value(&[1.0, 0.0], 0.0) <= 1e-12);
        assert!(g.value(&[0.0, 0.0], 1.15) <= 1e-12);
        // ρ = ρ₀ on the rim of the bottom disc.
        assert_relative_eq!(g.value(&[0.5, 0.0], -0.1), 1.0, epsilon = 1e-12);
        assert!(g.value(&[0.0, 0.0], -0.1) >= 1.0);
        // Separation fails when the disc reaches the sides.
        assert!(matches!(Lemma31Barrier::new(1.0, 1.15, 0.9, 0.3, 4.0, 2), Err(Error::Geometry(_))));
    }

    #[test]
    fn lemma31_barrier_residual_is_second_order() {
        let g = Lemma31Barrier::new(1.0, 1.15, 0.1, 2.0, 4.0, 2).unwrap();
        let f = |z: &[f64], t: f64| g.value(z, t);
        let slab = Slab::for_cylinder(1.0, 1.15, 0.1);
        let rc = residual_convergence(&f, 2, 1.0, 1.15, 4.0, &slab, 2e-3, 50, 9).unwrap();
        assert!((3.5..=4.5).contains(&rc.ratio), "{rc:?}");
    }

    #[test]
    fn shipped_geometry_misses_the_side_condition() {
        // With C = 2.5 and R = 2r the bracket on the side is far below 2/C.
        let bp = default_bp(1.0, 0.1);
        let chk = check_plane_barrier_boundary(&bp, 1.1, 300, 2).unwrap();
        assert!(chk.bottom_min >= 0.0);
        assert!(chk.origin_value.abs() <= 1e-12);
        assert!(chk.side_margin < 0.0);
        assert!(chk.minimal_c > 2.5);
        let fixed = BarrierParams { c: chk.minimal_c * 1.01, ..bp };
        assert!(check_plane_barrier_boundary(&fixed, 1.1, 300, 2).unwrap().pass);
    }
}
