mod common;

use std::f64::consts::PI;

use gradcs::analysis::{
    build_l, build_l_tilde, candes_plan_conditions, certificate_weights, dual_certificate,
    fourier_haar_coherence, l_tilde_sample_size, poincare_gap, rip_check, SupportSet,
};
use gradcs::rng::stream;
use gradcs::sampling::{bernoulli_mask, uniform_mask, Indices};
use gradcs::transforms::{frequencies, inverse_haar_1d, Signal, Signal1D, Signal2D, C64};
use nalgebra::DMatrix;
use rand::Rng;

#[test]
fn l_matches_identity_bound_at_twice_separation() {
    for band in [32usize, 64] {
        for s in [2usize, 4, 8] {
            let n = 2 * band * s;
            let sup = SupportSet::equispaced(n, s, 3, 2 * band).unwrap();
            let l = build_l(&sup, band).unwrap();
            assert!(l.distance_to_identity() <= 6.253e-3);
            assert!(l.factorization_error < 1e-10);
        }
    }
}

#[test]
fn l_at_random_separated_supports() {
    // random positions with gap at least 2N/M rather than exact equispacing
    for seed in 0..20 {
        let band = 32;
        let n = 512;
        let sup = common::random_support(n, 4, 2 * n / band, seed);
        let l = build_l(&sup, band).unwrap();
        assert!(
            l.distance_to_identity() <= 6.253e-3,
            "seed {seed}: {}",
            l.distance_to_identity()
        );
    }
}

#[test]
fn l_tilde_monte_carlo() {
    let (n, band) = (512, 64);
    let q = l_tilde_sample_size(4, 0.05) / band as f64;
    assert!(q < 1.0);
    let mut pass = 0;
    for seed in 0..100 {
        let sup = common::random_support(n, 4, 2 * n / band, seed);
        let mask = bernoulli_mask(n, band, q, seed).unwrap();
        let r = build_l_tilde(&sup, band, &mask).unwrap();
        if r.norm <= 1.25 && r.inverse_norm.is_some_and(|v| v <= 4.0 / 3.0) {
            pass += 1;
        }
    }
    assert!(pass >= 95, "{pass}/100");
}

#[test]
fn certificate_full_band() {
    let (n, band) = (512, 64);
    let bound = (1.0 - 0.92 * ((band * band - 1) as f64) / (n * n) as f64).max(0.99993);
    for seed in 0..10 {
        let sup = common::random_support(n, 4, 2 * n / band, seed);
        let mask = bernoulli_mask(n, band, 1.0, seed).unwrap();
        let cert = dual_certificate(&sup, &common::random_signs(seed, 4), band, &mask).unwrap();
        let d = &cert.diagnostics;
        assert!(d.interpolation_error <= 1e-8);
        assert!(d.derivative_error <= 1e-6 * band as f64);
        assert!(d.max_off_support < 1.0 && d.max_off_support <= bound);
        assert!(certificate_weights(&cert).reproduction_error <= 1e-8);
    }
}

#[test]
fn sampling_conditions_monte_carlo() {
    let n = 512;
    let mut pass = 0;
    for seed in 0..50 {
        let sup = common::random_support(n, 4, 1, seed);
        let mask = uniform_mask(n, 100, seed).unwrap();
        let r = candes_plan_conditions(&mask, &sup, 0, None).unwrap();
        if r.get("(i)").unwrap().pass && r.get("(ii)").unwrap().pass {
            pass += 1;
        }
        assert!(r.get("(iii)").is_none());
    }
    assert!(pass >= 45, "{pass}/50");
}

#[test]
fn certificate_conditions_reported() {
    let (n, band) = (256, 16);
    let sup = common::random_support(n, 3, 2 * n / band, 7);
    let mask = bernoulli_mask(n, band, 1.0, 7).unwrap();
    let cert = dual_certificate(&sup, &common::random_signs(7, 3), band, &mask).unwrap();
    let r = candes_plan_conditions(&mask, &sup, 0, Some(&cert)).unwrap();
    assert!(r.get("(iii)").unwrap().pass);
    assert!(r.get("(iv)").unwrap().pass);
    assert!(r.get("(v)").is_some());
    let other = SupportSet::new(n, vec![1]).unwrap();
    assert!(candes_plan_conditions(&mask, &other, 0, Some(&cert)).is_err());
}

fn sampled_operator(n: usize, rows: &[i64]) -> DMatrix<C64> {
    let m = rows.len() as f64;
    DMatrix::from_fn(rows.len(), n, |r, j| {
        C64::from_polar(1.0, 2.0 * PI * rows[r] as f64 * (j + 1) as f64 / n as f64) / m.sqrt()
    })
}

fn eig_range_by_svd(u: &DMatrix<C64>, cols: &[usize]) -> (f64, f64) {
    let sub = u.select_columns(cols);
    let sv = sub.singular_values();
    (sv.min().powi(2), sv.max().powi(2))
}

#[test]
fn weak_rip_matches_direct_enumeration() {
    let n = 16;
    let mask = uniform_mask(n, 12, 3).unwrap();
    let Indices::D1(rows) = mask.indices() else {
        unreachable!()
    };
    let sup = SupportSet::new(n, vec![2, 9]).unwrap();
    let report = candes_plan_conditions(&mask, &sup, 2, None).unwrap();
    let u = sampled_operator(n, rows);
    let mut worst = 0.0f64;
    let rest: Vec<usize> = (0..n).filter(|&i| i != 1 && i != 8).collect();
    for a in 0..rest.len() {
        for b in a + 1..rest.len() {
            let mut cols = vec![1, 8, rest[a], rest[b]];
            cols.sort_unstable();
            let (lo, hi) = eig_range_by_svd(&u, &cols);
            worst = worst.max((1.0 - lo).max(hi - 1.0));
        }
    }
    assert!((report.get("(vi)").unwrap().value - worst).abs() < 1e-10);
}

#[test]
fn rip_on_fourier_haar_composition() {
    let n = 16;
    let haar: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            inverse_haar_1d(&Signal1D::new(e).unwrap())
                .unwrap()
                .into_values()
        })
        .collect();
    let rows: Vec<i64> = frequencies(n).collect();
    let f = sampled_operator(n, &rows);
    let h = DMatrix::from_fn(n, n, |r, c| haar[c][r]);
    let u = f * h;
    let report = rip_check(&u, 2, 1e-9).unwrap();
    assert!(report.holds);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in 0..n {
        for b in a + 1..n {
            let (l, h) = eig_range_by_svd(&u, &[a, b]);
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    assert!((report.min_eigenvalue - lo).abs() < 1e-10);
    assert!((report.max_eigenvalue - hi).abs() < 1e-10);

    // a sampled composition is no longer an isometry
    let sub: Vec<i64> = rows.iter().copied().filter(|k| k % 2 == 0).collect();
    let report = rip_check(
        &(sampled_operator(n, &sub) * DMatrix::from_fn(n, n, |r, c| haar[c][r])),
        2,
        0.1,
    )
    .unwrap();
    assert!(!report.holds);
}

#[test]
fn coherence_bound_across_sizes() {
    for n in [4usize, 16, 64, 256, 1024] {
        let c = fourier_haar_coherence(n).unwrap();
        for (v, k) in c.iter().zip(frequencies(n)) {
            if k == 0 {
                assert!((v - 1.0).abs() < 1e-12);
            } else {
                assert!(*v <= 3.0 * (2.0 * PI).sqrt() / (k.abs() as f64).sqrt());
            }
        }
    }
}

#[test]
fn poincare_random_real_signals() {
    let mut rng = stream(11, "poincare", 0);
    for _ in 0..200 {
        let v: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(poincare_gap(&Signal::D1(Signal1D::from_real(&v).unwrap())).holds);
        let z = Signal2D::from_fn(16, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0)).unwrap();
        assert!(poincare_gap(&Signal::D2(z)).holds);
    }
}
