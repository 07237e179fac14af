mod common;

use gradcs::harness::{gen_piecewise_signal, relative_error, SignalSpec};
use gradcs::rng::stream;
use gradcs::sampling::{low_frequency_mask, measure, uniform_mask, uniform_mask_2d};
use gradcs::solver::{reconstruct, reconstruct_tv_1d, reconstruct_tv_2d, residual, SolverConfig};
use gradcs::transforms::{Signal, C64};
use rand::Rng;

#[test]
fn matches_lp_oracle_on_small_real_instances() {
    let cfg = SolverConfig {
        max_outer: 20000,
        ..Default::default()
    };
    for seed in 0..12 {
        let n = [16, 24, 32][seed as usize % 3];
        let x = common::unit_tv_signal(n, seed);
        let mask = common::symmetric_mask(n, n / 4, seed);
        let meas = measure(&x, &mask, 0.0, 0).unwrap();
        let (opt, _) = common::tv_lp_1d(&meas);
        let out = reconstruct_tv_1d(&meas, &cfg).unwrap();
        assert!(
            out.final_residual <= 1e-6,
            "seed {seed}: residual {}",
            out.final_residual
        );
        assert!(
            (out.final_tv - opt).abs() <= 1e-4,
            "seed {seed}: {} vs {opt}",
            out.final_tv
        );
        assert!(opt <= 1.0 + 1e-8);
    }
}

#[test]
fn matches_socp_oracle_in_2d() {
    let cfg = SolverConfig {
        max_outer: 20000,
        ..Default::default()
    };
    for seed in 0..2 {
        let n = 16;
        let x = gen_piecewise_signal(&SignalSpec::phantom(n), seed)
            .unwrap()
            .signal;
        let mask = uniform_mask_2d(n, 100, seed).unwrap();
        let meas = measure(&x, &mask, 0.0, 0).unwrap();
        let opt = common::tv_socp_2d(&meas);
        let out = reconstruct_tv_2d(&meas, &cfg).unwrap();
        let scale = x.tv_norm();
        assert!(out.final_residual <= 1e-6 * x.norm() * 16.0);
        assert!(
            (out.final_tv - opt).abs() <= 1e-4 * scale,
            "seed {seed}: {} vs {opt}",
            out.final_tv
        );
    }
}

#[test]
fn low_frequency_exact_recovery() {
    let spec = SignalSpec::custom(512, 4, 1.0 / 32.0);
    let x = gen_piecewise_signal(&spec, 7).unwrap().signal;
    let mask = low_frequency_mask(512, 32, 129, 0).unwrap();
    assert_eq!(mask.len(), 129);
    let out = reconstruct(
        &measure(&x, &mask, 0.0, 0).unwrap(),
        &SolverConfig::default(),
    )
    .unwrap();
    assert!(relative_error(&x, &out.signal).unwrap() < 1e-4);
}

#[test]
fn phantom_from_partial_fourier_data() {
    let n = 64;
    let x = gen_piecewise_signal(&SignalSpec::phantom(n), 3)
        .unwrap()
        .signal;
    let m = (0.35 * (n * n) as f64).round() as usize;
    let mask = uniform_mask_2d(n, m, 3).unwrap();
    let meas = measure(&x, &mask, 0.0, 0).unwrap();
    let out = reconstruct(
        &meas,
        &SolverConfig {
            max_outer: 300,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(relative_error(&x, &out.signal).unwrap() < 0.5);
    // the Bregman data residual decreases across outer iterations
    let res: Vec<f64> = out.history.iter().map(|h| h.residual).collect();
    assert!(
        res.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)),
        "residual not monotone"
    );
}

#[test]
fn noisy_data_stops_inside_the_noise_ball() {
    let x = gen_piecewise_signal(&SignalSpec::coarse(256), 1)
        .unwrap()
        .signal;
    let mask = uniform_mask(256, 40, 1).unwrap();
    for delta in [0.05, 0.5, 2.0] {
        let meas = measure(&x, &mask, delta, 4).unwrap();
        let out = reconstruct(
            &meas,
            &SolverConfig {
                max_outer: 20000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(out.converged);
        assert!(out.final_residual <= meas.noise_radius() * (1.0 + 1e-8));
        assert!(out.final_tv <= x.tv_norm() * (1.0 + 1e-6));
    }
}

#[test]
fn noisy_solve_matches_socp_oracle() {
    let cfg = SolverConfig {
        max_outer: 50000,
        ..Default::default()
    };
    for seed in 0..4 {
        let n = 32;
        let x = common::unit_tv_signal(n, seed);
        let mask = uniform_mask(n, 10, seed).unwrap();
        let meas = measure(&x, &mask, 0.02 * x.norm(), seed).unwrap();
        let opt = common::tv_socp_1d(&meas, meas.noise_radius());
        let out = reconstruct(&meas, &cfg).unwrap();
        assert!(out.converged);
        assert!(
            (out.final_tv - opt).abs() <= 1e-4,
            "seed {seed}: {} vs {opt}",
            out.final_tv
        );
    }
}

#[test]
fn converged_output_is_feasible_and_no_rougher_than_truth() {
    let cfg = SolverConfig::default();
    for seed in 0..5 {
        let x = gen_piecewise_signal(&SignalSpec::coarse(256), seed)
            .unwrap()
            .signal;
        let mask = uniform_mask(256, 60, seed).unwrap();
        let meas = measure(&x, &mask, 0.0, 0).unwrap();
        let out = reconstruct(&meas, &cfg).unwrap();
        if out.converged {
            let y_norm: f64 = meas.y().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!(residual(&meas, &out.signal).unwrap() <= 1e-6 * y_norm);
            assert!(out.final_tv <= x.tv_norm() * (1.0 + 1e-6));
        }
    }
}

#[test]
fn deterministic_output() {
    let x = gen_piecewise_signal(&SignalSpec::coarse(128), 2)
        .unwrap()
        .signal;
    let meas = measure(&x, &uniform_mask(128, 30, 2).unwrap(), 0.01, 2).unwrap();
    let cfg = SolverConfig::default();
    assert_eq!(
        reconstruct(&meas, &cfg).unwrap(),
        reconstruct(&meas, &cfg).unwrap()
    );
}

#[test]
fn complex_signals_are_supported() {
    let n = 128;
    let mut rng = stream(5, "complex", 0);
    let mut values = vec![C64::new(0.0, 0.0); n];
    let mut level = C64::new(0.0, 0.0);
    for (j, v) in values.iter_mut().enumerate() {
        if j % 32 == 5 {
            level = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        *v = level;
    }
    let x = Signal::D1(gradcs::transforms::Signal1D::new(values).unwrap());
    let meas = measure(&x, &uniform_mask(n, 40, 5).unwrap(), 0.0, 0).unwrap();
    let out = reconstruct(&meas, &SolverConfig::default()).unwrap();
    assert!(relative_error(&x, &out.signal).unwrap() < 1e-3);
}
