//! Gauss–Legendre rules and ball averages used as deterministic oracles.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_m`).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_m(x), p0 = P_{m-1}(x)
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(1/(b − a)) ∫_a^b f` by an `m`-point Gauss rule on each of `panels` panels.
pub fn interval_mean(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(m);
    let width = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * width;
        for (xi, wi) in x.iter().zip(&w) {
            acc += wi * f(lo + 0.5 * width * (xi + 1.0));
        }
    }
    acc * 0.5 / panels as f64
}

/// Mean of `f` over the ball `B_radius(center)` in dimension 1, 2 or 3.
pub fn ball_mean(f: impl Fn(&[f64]) -> f64, center: &[f64], radius: f64, m: usize) -> Result<f64> {
    let (x, w) = gauss_legendre(m);
    match center.len() {
        1 => Ok(interval_mean(|s| f(&[s]), center[0] - radius, center[0] + radius, m, 1)),
        2 => {
            // Radial Gauss rule in r (weight r dr), equispaced angles (exact for trig polys).
            let angles = 2 * m;
            let mut acc = 0.0;
            let mut p = [0.0; 2];
            for (xi, wi) in x.iter().zip(&w) {
                let r = 0.5 * radius * (xi + 1.0);
                let wr = 0.5 * radius * wi * r;
                for k in 0..angles {
                    let th = 2.0 * PI * (k as f64 + 0.5) / angles as f64;
                    p[0] = center[0] + r * th.cos();
                    p[1] = center[1] + r * th.sin();
                    acc += wr * f(&p) * (2.0 * PI / angles as f64);
                }
            }
            Ok(acc / (PI * radius * radius))
        }
        3 => {
            let angles = 2 * m;
            let mut acc = 0.0;
            let mut p = [0.0; 3];
            for (xi, wi) in x.iter().zip(&w) {
                let r = 0.5 * radius * (xi + 1.0);
                let wr = 0.5 * radius * wi * r * r;
                for (ci, wc) in x.iter().zip(&w) {
                    let sin_t = (1.0 - ci * ci).sqrt();
                    for k in 0..angles {
                        let ph = 2.0 * PI * (k as f64 + 0.5) / angles as f64;
                        p[0] = center[0] + r * sin_t * ph.cos();
                        p[1] = center[1] + r * sin_t * ph.sin();
                        p[2] = center[2] + r * ci;
                        acc += wr * wc * f(&p) * (2.0 * PI / angles as f64);
                    }
                }
            }
            Ok(acc / (4.0 / 3.0 * PI * radius.powi(3)))
        }
        n => Err(Error::Parameter(format!(
            "ball quadrature supports dimensions 1 to 3, got {n}"
        ))),
    }
}
