use gradcs::harness::{
    emit_report, format_csv, gen_piecewise_signal, gradient_relative_error, parse_csv,
    perturb_to_snr, relative_error, run_recovery_rates, run_robustness, run_stability_comparison,
    NoiseKind, RecoveryRatesConfig, ReportFormat, RobustnessConfig, SignalSpec, StabilityConfig,
    THREADS_ENV, UNIFORM_TAG, VARIABLE_TAG,
};
use gradcs::solver::SolverConfig;

fn small_recovery() -> RecoveryRatesConfig {
    RecoveryRatesConfig {
        signal: SignalSpec::coarse(128),
        fractions: vec![0.1, 0.3],
        trials: 3,
        seed: 11,
        solver: SolverConfig {
            max_outer: 300,
            ..Default::default()
        },
        keep_signals: true,
    }
}

fn small_stability() -> StabilityConfig {
    StabilityConfig {
        signal: SignalSpec::coarse(128),
        snr_db: vec![14.0, 20.0, 26.0],
        trials: 3,
        seed: 5,
        solver: SolverConfig {
            max_outer: 300,
            ..Default::default()
        },
        keep_signals: true,
        ..Default::default()
    }
}

#[test]
fn reports_are_reproducible_and_thread_count_invariant() {
    std::env::set_var(THREADS_ENV, "1");
    let serial = run_recovery_rates(&small_recovery()).unwrap();
    std::env::set_var(THREADS_ENV, "4");
    let parallel = run_recovery_rates(&small_recovery()).unwrap();
    std::env::remove_var(THREADS_ENV);
    let again = run_recovery_rates(&small_recovery()).unwrap();
    assert_eq!(format_csv(&serial), format_csv(&parallel));
    assert_eq!(format_csv(&serial), format_csv(&again));
    assert_eq!(serial.recons, parallel.recons);
    assert_eq!(serial.rows.len(), 6);
}

#[test]
fn stored_signals_reproduce_reported_errors() {
    let report = run_stability_comparison(&small_stability()).unwrap();
    let truth = report.truth.as_ref().unwrap();
    assert_eq!(report.recons.len(), report.rows.len());
    for (row, recon) in report.rows.iter().zip(&report.recons) {
        assert!((relative_error(truth, recon).unwrap() - row.rel_err).abs() <= 1e-12);
        assert!((gradient_relative_error(truth, recon).unwrap() - row.grad_rel_err).abs() <= 1e-12);
    }
    assert_eq!(
        report.schemes(),
        vec![UNIFORM_TAG.to_string(), VARIABLE_TAG.to_string()]
    );
    let expected = gen_piecewise_signal(
        &SignalSpec::coarse(128),
        gradcs::rng::derive_u64(5, "signal", 0),
    )
    .unwrap()
    .signal;
    assert_eq!(truth, &expected);
}

#[test]
fn error_shrinks_with_perturbation() {
    let report = run_stability_comparison(&small_stability()).unwrap();
    for scheme in [UNIFORM_TAG, VARIABLE_TAG] {
        let cells = report.scheme_cells(scheme);
        assert_eq!(cells.len(), 3);
        assert!(
            cells
                .windows(2)
                .all(|w| w[1].mean_rel_err < w[0].mean_rel_err),
            "{scheme}: {cells:?}"
        );
    }
}

#[test]
fn perturbation_hits_requested_snr() {
    let x = gen_piecewise_signal(&SignalSpec::coarse(256), 3)
        .unwrap()
        .signal;
    for kind in [NoiseKind::Gaussian, NoiseKind::Uniform] {
        for snr in [5.0, 20.0, 40.0] {
            let y = perturb_to_snr(&x, snr, kind, 9).unwrap();
            let achieved = 10.0 * (1.0 / relative_error(&x, &y).unwrap()).log10();
            assert!((achieved - snr).abs() < 1e-9);
            assert!(y.values().iter().all(|v| v.im == 0.0));
        }
    }
    assert_eq!(
        perturb_to_snr(&x, f64::INFINITY, NoiseKind::Gaussian, 0).unwrap(),
        x
    );
    assert!(perturb_to_snr(&x, f64::NAN, NoiseKind::Gaussian, 0).is_err());
}

#[test]
fn robustness_degrades_gracefully() {
    let cfg = RobustnessConfig {
        signal: SignalSpec::coarse(256),
        fraction: 0.2,
        snr_db: vec![f64::INFINITY, 10.0, 20.0, 30.0],
        trials: 2,
        seed: 3,
        solver: SolverConfig {
            max_outer: 1000,
            ..Default::default()
        },
        keep_signals: false,
    };
    let cells = run_robustness(&cfg).unwrap().cells();
    assert_eq!(cells.len(), 4);
    assert!(
        cells[0].mean_rel_err < 1e-4,
        "noiseless {}",
        cells[0].mean_rel_err
    );
    assert!(
        cells[1].mean_rel_err > cells[2].mean_rel_err
            && cells[2].mean_rel_err > cells[3].mean_rel_err
    );
    // 10 dB more SNR means 10x less noise; error should follow within a factor of 3
    for w in cells[1..].windows(2) {
        let ratio = w[0].mean_rel_err / w[1].mean_rel_err;
        assert!((10.0 / 3.0..=30.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn reports_emit_to_disk() {
    let report = run_recovery_rates(&RecoveryRatesConfig {
        keep_signals: false,
        ..small_recovery()
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("recovery.csv");
    let svg = dir.path().join("recovery.svg");
    emit_report(&report, ReportFormat::Csv, &csv).unwrap();
    emit_report(&report, ReportFormat::Svg, &svg).unwrap();
    assert_eq!(
        parse_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap(),
        report.rows
    );
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<polyline"));
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(run_recovery_rates(&RecoveryRatesConfig {
        trials: 0,
        ..small_recovery()
    })
    .is_err());
    assert!(run_stability_comparison(&StabilityConfig {
        trials: 0,
        ..small_stability()
    })
    .is_err());
    let bad_solver = RecoveryRatesConfig {
        solver: SolverConfig {
            lambda: -1.0,
            ..Default::default()
        },
        ..small_recovery()
    };
    assert!(run_recovery_rates(&bad_solver).is_err());
}

#[test]
fn gradient_gap_is_small_next_to_signal_gap() {
    let report = run_stability_comparison(&StabilityConfig {
        trials: 4,
        ..Default::default()
    })
    .unwrap();
    let (uni, var) = (
        report.scheme_cells(UNIFORM_TAG),
        report.scheme_cells(VARIABLE_TAG),
    );
    let gap = |f: fn(&gradcs::harness::Cell) -> f64| -> f64 {
        uni.iter().zip(&var).map(|(u, v)| (f(u) - f(v)).abs()).sum()
    };
    let signal_gap = gap(|c| c.mean_rel_err);
    let gradient_gap = gap(|c| c.mean_grad_rel_err);
    assert!(
        gradient_gap < 0.5 * signal_gap,
        "gradient gap {gradient_gap}, signal gap {signal_gap}"
    );
}

#[test]
fn doubling_noise_at_most_triples_error() {
    let base = 20.0;
    let doubled = base - 10.0 * 2f64.log10();
    let cfg = RobustnessConfig {
        signal: SignalSpec::coarse(256),
        fraction: 0.2,
        snr_db: vec![base, doubled],
        trials: 3,
        seed: 8,
        solver: SolverConfig {
            max_outer: 1000,
            ..Default::default()
        },
        keep_signals: false,
    };
    let cells = run_robustness(&cfg).unwrap().cells();
    let ratio = cells[1].mean_rel_err / cells[0].mean_rel_err;
    assert!(ratio > 1.0 && ratio <= 3.0, "ratio {ratio}");
}
