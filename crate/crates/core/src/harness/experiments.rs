//! Experiment drivers: exact-recovery rates against sampling level, the
//! uniform versus variable-density stability comparison, and robustness to
//! measurement noise.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use rayon::ThreadPool;

use super::report::{ExperimentReport, TrialRow};
use super::{
    gen_piecewise_signal, gradient_relative_error, noise_norm_for_snr, perturb_to_snr,
    relative_error, NoiseKind, SignalSpec,
};
use crate::error::{Error, Result};
use crate::rng::{derive_u64, stream};
use crate::sampling::{
    measure, power_law_pmf_1d, uniform_mask, Indices, MeasurementSet, SamplingMask, SamplingScheme,
};
use crate::solver::{reconstruct, SolverConfig};
use crate::transforms::{l2_norm, min_frequency, Signal};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "GRADCS_THREADS";

/// Pool sized by `GRADCS_THREADS` (rayon's default when unset or zero).
pub fn thread_pool() -> Result<ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidParameter(format!("{THREADS_ENV}='{v}' is not a count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

fn trial_index(cell: usize, trial: usize) -> u64 {
    ((cell as u64) << 32) | trial as u64
}

fn solve_row(
    truth: &Signal,
    meas: &MeasurementSet,
    solver: &SolverConfig,
    key: (&str, f64, f64, usize),
) -> Result<(TrialRow, Signal)> {
    let out = reconstruct(meas, solver)?;
    let row = TrialRow {
        scheme: key.0.to_string(),
        fraction_or_m: key.1,
        snr_db: key.2,
        trial: key.3,
        rel_err: relative_error(truth, &out.signal)?,
        grad_rel_err: gradient_relative_error(truth, &out.signal)?,
        residual: out.final_residual,
        iters: out.outer_iterations,
        converged: out.converged,
    };
    Ok((row, out.signal))
}

fn finish(
    name: &str,
    truth: Signal,
    results: Vec<Result<(TrialRow, Signal)>>,
    keep: bool,
) -> Result<ExperimentReport> {
    let mut rows = Vec::with_capacity(results.len());
    let mut recons = Vec::new();
    for r in results {
        let (row, recon) = r?;
        rows.push(row);
        if keep {
            recons.push(recon);
        }
    }
    Ok(ExperimentReport {
        name: name.to_string(),
        rows,
        truth: Some(truth),
        recons,
    })
}

/// `round(fraction * N)`.
pub fn count_for_fraction(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryRatesConfig {
    pub signal: SignalSpec,
    pub fractions: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    pub keep_signals: bool,
}

impl Default for RecoveryRatesConfig {
    fn default() -> Self {
        RecoveryRatesConfig {
            signal: SignalSpec::coarse(512),
            fractions: vec![0.039, 0.07, 0.09, 0.10],
            trials: 5,
            seed: 2024,
            solver: SolverConfig::default(),
            keep_signals: false,
        }
    }
}

/// One fixed coarse signal sampled uniformly at random (zero adjoined) at
/// each fraction, `trials` masks per fraction, noiseless solves.
pub fn run_recovery_rates(cfg: &RecoveryRatesConfig) -> Result<ExperimentReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n = cfg.signal.n;
    let truth = gen_piecewise_signal(&cfg.signal, derive_u64(cfg.seed, "signal", 0))?.signal;
    let jobs: Vec<(usize, usize)> = (0..cfg.fractions.len())
        .flat_map(|f| (0..cfg.trials).map(move |t| (f, t)))
        .collect();
    let results = thread_pool()?.install(|| {
        jobs.par_iter()
            .map(|&(f, t)| {
                let fraction = cfg.fractions[f];
                let m = count_for_fraction(n, fraction);
                let mask = uniform_mask(
                    n,
                    m,
                    derive_u64(cfg.seed, "recovery-mask", trial_index(f, t)),
                )?;
                let meas = measure(&truth, &mask, 0.0, 0)?;
                solve_row(
                    &truth,
                    &meas,
                    &cfg.solver,
                    ("uniform", fraction, f64::INFINITY, t),
                )
            })
            .collect::<Vec<_>>()
    });
    finish("recovery", truth, results, cfg.keep_signals)
}

/// Uniform draws of `ceil(m/2)` distinct frequencies with zero adjoined,
/// then power-law draws (repeats discarded) until `target` distinct
/// frequencies are held.
pub fn uniform_power_law_mask(
    n: usize,
    m: usize,
    target: usize,
    seed: u64,
) -> Result<SamplingMask> {
    if target > n {
        return Err(Error::InvalidParameter(format!(
            "cannot hold {target} distinct frequencies of {n}"
        )));
    }
    let base = uniform_mask(n, m.div_ceil(2), derive_u64(seed, "uniform-half", 0))?;
    let Indices::D1(mut ks) = base.indices().clone() else {
        unreachable!("1D mask")
    };
    let lo = min_frequency(n);
    let dist = WeightedIndex::new(power_law_pmf_1d(n)).expect("positive weights");
    let mut rng = stream(seed, "powerlaw-fill", 0);
    let mut held = vec![false; n];
    for &k in &ks {
        held[(k - lo) as usize] = true;
    }
    while ks.len() < target {
        let i = dist.sample(&mut rng);
        if !held[i] {
            held[i] = true;
            ks.push(lo + i as i64);
        }
    }
    let scheme = SamplingScheme::Union(vec![SamplingScheme::Uniform, SamplingScheme::PowerLaw1D]);
    SamplingMask::new(n, Indices::D1(ks), m, true, scheme, seed)
}

pub const UNIFORM_TAG: &str = "uniform";
pub const VARIABLE_TAG: &str = "uniform+powerlaw";

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityConfig {
    pub signal: SignalSpec,
    pub fraction: f64,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub noise: NoiseKind,
    pub solver: SolverConfig,
    pub keep_signals: bool,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            signal: SignalSpec::coarse(512),
            fraction: 0.15,
            snr_db: (0..8).map(|i| 14.0 + 3.0 * i as f64).collect(),
            trials: 10,
            seed: 2024,
            noise: NoiseKind::Gaussian,
            solver: SolverConfig::default(),
            keep_signals: false,
        }
    }
}

/// For each trial, one perturbation direction `h` and one mask per scheme
/// are drawn; at every SNR the perturbed signal `x + h` is measured exactly
/// on each mask and reconstructed with `delta = 0`. Errors are against `x`.
/// `m = ceil(fraction * N)` distinct frequencies for both schemes.
pub fn run_stability_comparison(cfg: &StabilityConfig) -> Result<ExperimentReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n = cfg.signal.n;
    let m = (cfg.fraction * n as f64 - 1e-9).ceil() as usize;
    let truth = gen_piecewise_signal(&cfg.signal, derive_u64(cfg.seed, "signal", 0))?.signal;
    let masks: Vec<(SamplingMask, SamplingMask)> = (0..cfg.trials)
        .map(|t| {
            let uniform = uniform_mask(n, m, derive_u64(cfg.seed, "stability-uniform", t as u64))?;
            let target = uniform.distinct_count();
            let variable = uniform_power_law_mask(
                n,
                m,
                target,
                derive_u64(cfg.seed, "stability-variable", t as u64),
            )?;
            Ok((uniform, variable))
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize, usize)> = (0..2)
        .flat_map(|s| {
            (0..cfg.snr_db.len()).flat_map(move |i| (0..cfg.trials).map(move |t| (s, i, t)))
        })
        .collect();
    let results = thread_pool()?.install(|| {
        jobs.par_iter()
            .map(|&(s, i, t)| {
                let snr = cfg.snr_db[i];
                let perturbed = perturb_to_snr(
                    &truth,
                    snr,
                    cfg.noise,
                    derive_u64(cfg.seed, "stability-h", t as u64),
                )?;
                let (mask, tag) = if s == 0 {
                    (&masks[t].0, UNIFORM_TAG)
                } else {
                    (&masks[t].1, VARIABLE_TAG)
                };
                let meas = measure(&perturbed, mask, 0.0, 0)?;
                solve_row(&truth, &meas, &cfg.solver, (tag, cfg.fraction, snr, t))
            })
            .collect::<Vec<_>>()
    });
    finish("stability", truth, results, cfg.keep_signals)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessConfig {
    pub signal: SignalSpec,
    pub fraction: f64,
    /// Measurement SNRs; `inf` is the noiseless row.
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    pub keep_signals: bool,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        let mut snr_db = vec![f64::INFINITY];
        snr_db.extend((1..=7).map(|i| 5.0 * i as f64));
        RobustnessConfig {
            signal: SignalSpec::coarse(512),
            fraction: 0.10,
            snr_db,
            trials: 5,
            seed: 2024,
            solver: SolverConfig::default(),
            keep_signals: false,
        }
    }
}

/// `y = P_Ω A x + e` with `10 log10(||P_Ω A x|| / ||e||)` set by the SNR and
/// the solver radius `sqrt(m) delta = ||e||`. One uniform mask and one noise
/// direction per trial.
pub fn run_robustness(cfg: &RobustnessConfig) -> Result<ExperimentReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n = cfg.signal.n;
    let m = count_for_fraction(n, cfg.fraction);
    let truth = gen_piecewise_signal(&cfg.signal, derive_u64(cfg.seed, "signal", 0))?.signal;
    let jobs: Vec<(usize, usize)> = (0..cfg.snr_db.len())
        .flat_map(|i| (0..cfg.trials).map(move |t| (i, t)))
        .collect();
    let results = thread_pool()?.install(|| {
        jobs.par_iter()
            .map(|&(i, t)| {
                let snr = cfg.snr_db[i];
                let mask = uniform_mask(n, m, derive_u64(cfg.seed, "robustness-mask", t as u64))?;
                let clean = measure(&truth, &mask, 0.0, 0)?;
                let delta = if snr.is_finite() {
                    noise_norm_for_snr(l2_norm(clean.y()), snr) / (mask.m() as f64).sqrt()
                } else {
                    0.0
                };
                let meas = measure(
                    &truth,
                    &mask,
                    delta,
                    derive_u64(cfg.seed, "robustness-noise", t as u64),
                )?;
                solve_row(
                    &truth,
                    &meas,
                    &cfg.solver,
                    (UNIFORM_TAG, cfg.fraction, snr, t),
                )
            })
            .collect::<Vec<_>>()
    });
    finish("robustness", truth, results, cfg.keep_signals)
}
