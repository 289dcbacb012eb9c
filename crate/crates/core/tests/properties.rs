use flc_sldo_core::controllers::{
    flc_bndo_control, flc_control, flc_sldo_control, flci_control, ControllerGains, ControllerState, Variant,
};
use flc_sldo_core::disturbance::DisturbanceProfile;
use flc_sldo_core::integrate::{step, Scheme};
use flc_sldo_core::plant::{plant_derivatives, PlantModel, PlantState};
use flc_sldo_core::t2nfs::{adapt, forward, AdaptStep, T2nfsInit, T2nfsParams, SIGMA_FLOOR};
use flc_sldo_core::{smoothed_sign, Error};
use proptest::prelude::*;

fn params_with(f: &[f64], q: f64, type1: bool) -> T2nfsParams {
    let mut p = T2nfsParams::from_init(&T2nfsInit {
        type1,
        ..T2nfsInit::default()
    })
    .unwrap();
    p.set_consequents(f).unwrap();
    p.set_q(q);
    p
}

proptest! {
    #[test]
    fn firing_is_normalized(
        f in prop::collection::vec(-2.0f64..2.0, 9),
        q in 0.0f64..=1.0,
        xi1 in -6.0f64..6.0,
        xi2 in -6.0f64..6.0,
    ) {
        let fs = forward(&params_with(&f, q, false), xi1, xi2).unwrap();
        let sl: f64 = fs.w_norm_lower.iter().sum();
        let su: f64 = fs.w_norm_upper.iter().sum();
        prop_assert!((sl - 1.0).abs() < 1e-12);
        prop_assert!((su - 1.0).abs() < 1e-12);
        prop_assert!(fs.w_norm_lower.iter().chain(&fs.w_norm_upper).all(|w| *w > 0.0 && *w <= 1.0));
    }

    #[test]
    fn output_within_consequent_range(
        f in prop::collection::vec(-2.0f64..2.0, 9),
        q in 0.0f64..=1.0,
        xi1 in -6.0f64..6.0,
        xi2 in -6.0f64..6.0,
    ) {
        let fs = forward(&params_with(&f, q, false), xi1, xi2).unwrap();
        let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(fs.tau_n >= lo - 1e-12 && fs.tau_n <= hi + 1e-12);
    }

    #[test]
    fn spreads_stay_above_floor(
        seq in prop::collection::vec((-4.0f64..4.0, -4.0f64..4.0, -50.0f64..50.0), 1..300),
        alpha in 0.0f64..20.0,
    ) {
        let mut p = params_with(&[0.3, -0.1, 0.2, 0.0, 0.5, -0.4, 0.1, 0.2, -0.3], 0.5, false);
        p.set_alpha(alpha);
        for (xi1, xi2, s) in seq {
            let Ok(fs) = forward(&p, xi1, xi2) else { break };
            let step = AdaptStep { xi: [xi1, xi2], xi_rate: [0.0, 0.0], s, delta: 0.05, dt: 1e-2 };
            match adapt(&p, &fs, &step) {
                Ok((next, _)) => p = next,
                Err(Error::NonFinite { .. }) => break,
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
            prop_assert!(p.min_sigma() >= SIGMA_FLOOR);
        }
    }

    #[test]
    fn disturbance_is_deterministic(t in -10.0f64..100.0) {
        let p = DisturbanceProfile::three_phase();
        prop_assert_eq!(p.eval(t).to_bits(), p.eval(t).to_bits());
    }

    #[test]
    fn derivatives_affine_in_input(
        x1 in -3.0f64..3.0, x2 in -3.0f64..3.0, d in -1.0f64..1.0,
        u1 in -50.0f64..50.0, u2 in -50.0f64..50.0,
    ) {
        let m = PlantModel::Benchmark;
        let x = PlantState::new(x1, x2);
        let a = plant_derivatives(x, u1, d, &m).unwrap();
        let b = plant_derivatives(x, u2, d, &m).unwrap();
        let c = plant_derivatives(x, 0.5 * (u1 + u2), d, &m).unwrap();
        prop_assert!((a.0 + b.0 - 2.0 * c.0).abs() < 1e-12);
        prop_assert!((a.1 + b.1 - 2.0 * c.1).abs() < 1e-10);
    }

    #[test]
    fn euler_matches_geometric_sequence(lambda in 0.1f64..10.0, n in 1usize..500) {
        let dt = 1e-3;
        let mut y = [1.0];
        for _ in 0..n {
            y = step(Scheme::Euler, 0.0, y, dt, |_, y| Ok([-lambda * y[0]])).unwrap();
        }
        let exact = (1.0 - lambda * dt).powi(n as i32);
        prop_assert!((y[0] / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rk4_matches_exponential(lambda in 0.1f64..10.0, n in 1usize..2000) {
        let dt = 1e-3;
        prop_assume!(lambda * dt <= 0.01);
        let mut y = [1.0];
        for _ in 0..n {
            y = step(Scheme::Rk4, 0.0, y, dt, |_, y| Ok([-lambda * y[0]])).unwrap();
        }
        prop_assert!((y[0] - (-lambda * dt * n as f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn laws_agree_without_estimates(x1 in -3.0f64..3.0, x2 in -3.0f64..3.0) {
        let g = ControllerGains::BENCHMARK;
        let m = PlantModel::Benchmark;
        let x = PlantState::new(x1, x2);
        let u = flc_control(x, &g, &m).unwrap();
        prop_assert_eq!(flc_bndo_control(x, 0.0, &g, &m).unwrap(), u);
        prop_assert_eq!(flc_sldo_control(x, 0.0, 0.0, &g, &m).unwrap(), u);
        let (ui, _) = flci_control(x, ControllerState::new(Variant::FlcI), &g, &m, 1e-3).unwrap();
        prop_assert_eq!(ui, u);
    }

    #[test]
    fn bndo_law_linear_in_estimate(
        x1 in -3.0f64..3.0, x2 in -3.0f64..3.0, d1 in -2.0f64..2.0, d2 in -2.0f64..2.0,
    ) {
        let g = ControllerGains::BENCHMARK;
        let m = PlantModel::Benchmark;
        let x = PlantState::new(x1, x2);
        let diff = flc_bndo_control(x, d1, &g, &m).unwrap() - flc_bndo_control(x, d2, &g, &m).unwrap();
        prop_assert!((diff + g.k2() * (d1 - d2)).abs() < 1e-12);
    }

    #[test]
    fn smoothed_sign_is_odd_and_bounded(s in -1e6f64..1e6, delta in 1e-3f64..1.0) {
        let v = smoothed_sign(s, delta);
        prop_assert!(v.abs() < 1.0);
        prop_assert_eq!(v, -smoothed_sign(-s, delta));
    }
}
