use proptest::prelude::*;
use std::sync::Arc;

use twng_core::dpp::{self, GameParams, SolveOptions, ValueField};
use twng_core::game::{self, AwayFromMidpoint, Coupling, StopCause, Strategy};
use twng_core::reference::{self, PlaneEnvelope};
use twng_core::walks::{self, CylinderConfig};
use twng_core::{DiscreteDomain, DomainSpec};

fn square(h: f64, eps: f64) -> Arc<DiscreteDomain> {
    Arc::new(DiscreteDomain::build(DomainSpec::unit_square(), h, eps).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ordered_data_gives_ordered_solutions(a in -1.0f64..1.0, b in -1.0f64..1.0, bump in 0.0f64..0.5, k in 1.0f64..8.0) {
        let d = square(0.125, 0.25);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let f1 = move |x: &[f64]| a * x[0] + b * x[1] * x[1];
        let f2 = move |x: &[f64]| f1(x) + bump * (1.0 + (k * x[0]).sin());
        let (u1, _) = dpp::solve_dpp(d.clone(), f1, &params, SolveOptions::default()).unwrap();
        let (u2, _) = dpp::solve_dpp(d, f2, &params, SolveOptions::default()).unwrap();
        prop_assert!(dpp::check_comparison(&u1, &u2).unwrap());
        prop_assert!(dpp::check_bounds(&u1) && dpp::check_bounds(&u2));
    }

    #[test]
    fn planes_are_fixed_points(nu0 in -2.0f64..2.0, nu1 in -2.0f64..2.0, b in -1.0f64..1.0, p in 2.5f64..10.0) {
        let d = square(1.0 / 32.0, 0.125);
        let params = GameParams::for_domain(p, &d).unwrap();
        let u = ValueField::from_fn(d.clone(), |x| nu0 * x[0] + nu1 * x[1] + b).unwrap();
        let tu = dpp::dpp_apply(&u, &params).unwrap();
        for &i in d.interior_points() {
            prop_assert!((tu.value(i) - u.value(i)).abs() <= 1e-12);
        }
    }

    #[test]
    fn envelope_verdicts_are_shift_invariant(c in -2.0f64..2.0, delta in 0.0f64..0.05) {
        let d = square(1.0 / 16.0, 1.0 / 16.0);
        let params = GameParams::for_domain(4.0, &d).unwrap();
        let opts = SolveOptions { tol: reference::ENVELOPE_TOL, ..SolveOptions::default() };
        let f = move |x: &[f64]| x[0] + delta * (10.0 * x[0]).sin();
        let (u, _) = dpp::solve_dpp(d.clone(), f, &params, opts).unwrap();
        let (v, _) = dpp::solve_dpp(d, move |x| f(x) + c, &params, opts).unwrap();
        let e0 = PlaneEnvelope { nu: vec![1.0, 0.0], b: 0.0, delta };
        let e1 = PlaneEnvelope { b: c, ..e0.clone() };
        prop_assert_eq!(reference::plane_envelope_check(&u, &e0).unwrap(), reference::plane_envelope_check(&v, &e1).unwrap());
        let r0 = reference::improved_lipschitz_check(&u, &e0, &[0.5, 0.5], 0.45, 0.0).unwrap();
        let r1 = reference::improved_lipschitz_check(&v, &e1, &[0.5, 0.5], 0.45, 0.0).unwrap();
        prop_assert_eq!(r0.pass, r1.pass);
        prop_assert!((r0.excess_slope - r1.excess_slope).abs() < 1e-6);
    }

    #[test]
    fn seeded_runs_replay_exactly(seed in any::<u64>(), t0 in 0.05f64..0.95) {
        prop_assert_eq!(walks::line_walk(t0, 0.05, seed).unwrap(), walks::line_walk(t0, 0.05, seed).unwrap());
        let params = GameParams::new(4.0, 2, 0.1).unwrap();
        let cfg = CylinderConfig::with_start(0.5, 0.2, &params).unwrap();
        prop_assert_eq!(walks::run_cylinder_walk(&cfg, seed).unwrap(), walks::run_cylinder_walk(&cfg, seed).unwrap());
        let d = square(0.125, 0.25);
        let gp = GameParams::for_domain(4.0, &d).unwrap();
        let payoff = ValueField::from_fn(d.clone(), |x| x[0]).unwrap();
        let start = d.nearest_point(&[0.5, 0.5], 1e-9).unwrap();
        let s = Strategy::PullToward(vec![0.0, 0.0]);
        let a = game::play_game(&d, start, &s, &Strategy::Noop, &payoff, &gp, seed).unwrap();
        let b = game::play_game(&d, start, &s, &Strategy::Noop, &payoff, &gp, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cancellation_is_exact_on_every_c1_stop(seed in any::<u64>()) {
        let params = GameParams::new(4.0, 2, 0.1).unwrap();
        let cfg = Coupling::new(&DomainSpec::ball(vec![0.0, 0.0], 1.0), vec![-0.025, 0.0], vec![0.025, 0.0], 0.2, params).unwrap();
        let run = game::coupled_cancellation_run(&cfg, &AwayFromMidpoint, seed).unwrap();
        prop_assert!(run.draws_match());
        if run.stop == StopCause::C1 {
            let steps = run.x.monitor.rounds.max(1) as f64;
            prop_assert!(run.x.cancellation_error <= 1e-9 * steps);
            prop_assert!(run.y.cancellation_error <= 1e-9 * steps);
        }
    }

    #[test]
    fn cylinder_overshoot_is_below_eps(seed in any::<u64>(), t0 in 0.05f64..0.5) {
        let params = GameParams::new(4.0, 2, 0.05).unwrap();
        let cfg = CylinderConfig::with_start(1.0, t0, &params).unwrap();
        let o = walks::run_cylinder_walk(&cfg, seed).unwrap();
        prop_assert!(o.t > -cfg.eps && o.t < cfg.height + cfg.eps);
        prop_assert!(twng_core::vecmath::norm(&o.zeta) < cfg.r + cfg.eps);
    }

    #[test]
    fn radial_residual_decays_at_second_order(r in 0.3f64..1.2, th in 0.0f64..std::f64::consts::TAU, p in 3.0f64..8.0) {
        let u = reference::radial_reference(p, 2).unwrap();
        let x = [r * th.cos(), r * th.sin()];
        let f = |y: &[f64]| u.value(y);
        let a = reference::p_laplacian_residual(&f, &x, 2e-3, p).unwrap();
        let b = reference::p_laplacian_residual(&f, &x, 1e-3, p).unwrap();
        // Richardson-extrapolated residual vanishes to truncation order h⁴.
        prop_assert!(((4.0 * b - a) / 3.0).abs() < 1e-6, "{} {}", a, b);
    }
}
