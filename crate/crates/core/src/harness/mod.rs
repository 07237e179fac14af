//! Test signals, perturbations, error metrics and the experiment drivers.

mod experiments;
mod report;

pub use experiments::{
    count_for_fraction, run_recovery_rates, run_robustness, run_stability_comparison, thread_pool,
    uniform_power_law_mask, RecoveryRatesConfig, RobustnessConfig, StabilityConfig, THREADS_ENV,
    UNIFORM_TAG, VARIABLE_TAG,
};
pub use report::{
    emit_report, format_csv, format_svg, parse_csv, Cell, ExperimentReport, ReportFormat, TrialRow,
    CSV_HEADER, EXACT_THRESHOLD,
};

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::analysis::SupportSet;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::transforms::{l2_norm, Signal, Signal1D, Signal2D, C64};

#[derive(Debug, Clone, PartialEq)]
pub enum SignalKind {
    /// A few well-separated jumps.
    Coarse,
    /// Many closely spaced jumps.
    Fine,
    /// 2D rectangles and discs on a zero background.
    Phantom,
    Custom,
}

/// How segment levels are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Heights {
    /// Levels drawn in `[-amplitude, amplitude]` (complex: in the disc),
    /// neighbouring levels differing by at least `amplitude / 4`.
    Seeded { amplitude: f64, complex: bool },
    /// Explicit segment levels, one per jump; neighbours must differ.
    Levels(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub dim: usize,
    pub n: usize,
    /// Number of gradient jumps (1D) or of shapes (2D phantom).
    pub jumps: usize,
    /// Target minimum separation as a fraction of `N`.
    pub min_sep: f64,
    pub heights: Heights,
    pub kind: SignalKind,
}

impl SignalSpec {
    /// 8 jumps at least `N/16` apart.
    pub fn coarse(n: usize) -> SignalSpec {
        SignalSpec {
            dim: 1,
            n,
            jumps: 8,
            min_sep: 1.0 / 16.0,
            heights: Heights::Seeded {
                amplitude: 1.0,
                complex: false,
            },
            kind: SignalKind::Coarse,
        }
    }

    /// 16 jumps at least `N/128` apart.
    pub fn fine(n: usize) -> SignalSpec {
        SignalSpec {
            dim: 1,
            n,
            jumps: 16,
            min_sep: 1.0 / 128.0,
            heights: Heights::Seeded {
                amplitude: 1.0,
                complex: false,
            },
            kind: SignalKind::Fine,
        }
    }

    /// `n x n` phantom with six shapes.
    pub fn phantom(n: usize) -> SignalSpec {
        SignalSpec {
            dim: 2,
            n,
            jumps: 6,
            min_sep: 0.0,
            heights: Heights::Seeded {
                amplitude: 1.0,
                complex: false,
            },
            kind: SignalKind::Phantom,
        }
    }

    pub fn custom(n: usize, jumps: usize, min_sep: f64) -> SignalSpec {
        SignalSpec {
            dim: 1,
            n,
            jumps,
            min_sep,
            heights: Heights::Seeded {
                amplitude: 1.0,
                complex: false,
            },
            kind: SignalKind::Custom,
        }
    }

    /// Smallest gap in samples, `ceil(min_sep * N)` and at least one.
    pub fn gap(&self) -> usize {
        ((self.min_sep * self.n as f64 - 1e-9).ceil() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSize(format!("N = {} is below 2", self.n)));
        }
        if self.jumps == 0 {
            return Err(Error::InvalidParameter(
                "at least one jump is needed".into(),
            ));
        }
        if !(self.min_sep >= 0.0 && self.min_sep <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "min_sep {} outside [0, 1]",
                self.min_sep
            )));
        }
        match self.dim {
            1 => {
                let jumps = self.jumps.max(2);
                if jumps * self.gap() > self.n {
                    return Err(Error::InfeasibleSeparation {
                        jumps,
                        gap: self.gap(),
                        n: self.n,
                    });
                }
            }
            2 => {
                if self.n < 8 {
                    return Err(Error::InvalidSize(format!(
                        "phantoms need N >= 8, got {}",
                        self.n
                    )));
                }
            }
            d => {
                return Err(Error::InvalidParameter(format!(
                    "unsupported dimension {d}"
                )))
            }
        }
        if let Heights::Levels(levels) = &self.heights {
            if self.dim == 1 && levels.len() != self.jumps.max(2) {
                return Err(Error::mismatch(self.jumps.max(2), levels.len()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSignal {
    pub signal: Signal,
    /// 1-based positions of the nonzero entries of the gradient
    /// (row-major for 2D).
    pub support: Vec<usize>,
}

impl GeneratedSignal {
    /// Gradient support as a [`SupportSet`] (1D signals).
    pub fn support_set(&self) -> Result<SupportSet> {
        if self.signal.dim() != 1 {
            return Err(Error::InvalidParameter(
                "support sets are one-dimensional".into(),
            ));
        }
        SupportSet::new(self.signal.n(), self.support.clone())
    }
}

/// 1-based indices where the gradient is nonzero.
pub fn gradient_support(x: &Signal) -> Vec<usize> {
    let scale = x.values().iter().fold(0.0f64, |a, v| a.max(v.norm()));
    x.gradient()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.norm() > 1e-12 * scale)
        .map(|(i, _)| i + 1)
        .collect()
}

fn draw_level(rng: &mut impl Rng, amplitude: f64, complex: bool) -> C64 {
    if complex {
        let r = amplitude * rng.random::<f64>().sqrt();
        C64::from_polar(r, rng.random_range(0.0..2.0 * PI))
    } else {
        C64::new(rng.random_range(-amplitude..=amplitude), 0.0)
    }
}

fn seeded_levels(rng: &mut impl Rng, count: usize, amplitude: f64, complex: bool) -> Vec<C64> {
    let min_step = amplitude / 4.0;
    let mut levels: Vec<C64> = Vec::with_capacity(count);
    while levels.len() < count {
        let v = draw_level(rng, amplitude, complex);
        let last_ok = levels.last().is_none_or(|p| (v - p).norm() >= min_step);
        let wrap_ok = levels.len() + 1 < count || (v - levels[0]).norm() >= min_step;
        if last_ok && wrap_ok {
            levels.push(v);
        }
    }
    levels
}

fn piecewise_1d(spec: &SignalSpec, seed: u64) -> Result<GeneratedSignal> {
    let n = spec.n;
    let jumps = spec.jumps.max(2);
    let gap = spec.gap();
    let mut rng = stream(seed, "signal", 0);
    // first gap is exactly the minimum so the separation is attained
    let slack = n - jumps * gap;
    let mut cuts: Vec<usize> = (0..jumps - 2)
        .map(|_| rng.random_range(0..=slack))
        .collect();
    cuts.push(0);
    cuts.push(slack);
    cuts.sort_unstable();
    let mut gaps = vec![gap];
    gaps.extend(cuts.windows(2).map(|w| gap + w[1] - w[0]));
    let start = rng.random_range(0..n);
    let mut positions = Vec::with_capacity(jumps);
    let mut t = start;
    for g in &gaps {
        positions.push(t);
        t = (t + g) % n;
    }
    let levels = match &spec.heights {
        Heights::Seeded { amplitude, complex } => {
            seeded_levels(&mut rng, jumps, *amplitude, *complex)
        }
        Heights::Levels(v) => {
            let wrap = v.iter().zip(v.iter().cycle().skip(1));
            if wrap.take(jumps).any(|(a, b)| (a - b).norm() == 0.0) {
                return Err(Error::InvalidParameter(
                    "neighbouring levels must differ".into(),
                ));
            }
            v.clone()
        }
    };
    // segment k runs from just after jump k to jump k+1 (0-based sample
    // positions, jump at p separates samples p and p+1)
    let mut values = vec![C64::new(0.0, 0.0); n];
    for k in 0..jumps {
        let mut j = (positions[k] + 1) % n;
        let end = (positions[(k + 1) % jumps] + 1) % n;
        loop {
            values[j] = levels[k];
            j = (j + 1) % n;
            if j == end {
                break;
            }
        }
    }
    let signal = Signal::D1(Signal1D::new(values)?);
    let support = gradient_support(&signal);
    debug_assert_eq!(support.len(), jumps);
    Ok(GeneratedSignal { signal, support })
}

fn phantom_2d(spec: &SignalSpec, seed: u64) -> Result<GeneratedSignal> {
    let n = spec.n;
    let mut rng = stream(seed, "phantom", 0);
    let (amplitude, complex) = match &spec.heights {
        Heights::Seeded { amplitude, complex } => (*amplitude, *complex),
        Heights::Levels(_) => (1.0, false),
    };
    let explicit = match &spec.heights {
        Heights::Levels(v) => Some(v.clone()),
        Heights::Seeded { .. } => None,
    };
    let mut values = vec![C64::new(0.0, 0.0); n * n];
    let nf = n as f64;
    for shape in 0..spec.jumps {
        let level = match &explicit {
            Some(v) => v[shape % v.len()],
            None => {
                let v = draw_level(&mut rng, amplitude, complex);
                if v.norm() < amplitude / 4.0 {
                    v + C64::new(amplitude / 4.0 * v.re.signum(), 0.0)
                } else {
                    v
                }
            }
        };
        let cr = rng.random_range(0.2..0.8) * nf;
        let cc = rng.random_range(0.2..0.8) * nf;
        let size = rng.random_range(0.08..0.25) * nf;
        let disc = shape % 2 == 1;
        for r in 0..n {
            for c in 0..n {
                let (dr, dc) = (r as f64 - cr, c as f64 - cc);
                let inside = if disc {
                    dr * dr + dc * dc <= size * size
                } else {
                    dr.abs() <= size && dc.abs() <= 0.6 * size
                };
                if inside {
                    values[r * n + c] += level;
                }
            }
        }
    }
    let signal = Signal::D2(Signal2D::new(n, values)?);
    let support = gradient_support(&signal);
    Ok(GeneratedSignal { signal, support })
}

/// Piecewise-constant test signal with exactly `jumps` gradient jumps whose
/// wrap-around separation is at least `min_sep` (1D; a single jump is
/// promoted to two since periodic signals cannot have one), or a phantom of
/// overlapping shapes (2D).
pub fn gen_piecewise_signal(spec: &SignalSpec, seed: u64) -> Result<GeneratedSignal> {
    spec.validate()?;
    match spec.dim {
        1 => piecewise_1d(spec, seed),
        _ => phantom_2d(spec, seed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    #[default]
    Gaussian,
    Uniform,
}

/// Noise vector of the given length and exact norm. Real when `real` is set.
pub fn scaled_noise(len: usize, norm: f64, real: bool, kind: NoiseKind, seed: u64) -> Vec<C64> {
    let mut rng = stream(seed, "perturb", 0);
    let mut draw = || -> f64 {
        match kind {
            NoiseKind::Gaussian => rng.sample(StandardNormal),
            NoiseKind::Uniform => rng.random_range(-1.0..1.0),
        }
    };
    let mut e: Vec<C64> = (0..len)
        .map(|_| {
            let re = draw();
            let im = if real { 0.0 } else { draw() };
            C64::new(re, im)
        })
        .collect();
    let scale = norm / l2_norm(&e);
    e.iter_mut().for_each(|v| *v *= scale);
    e
}

/// Norm of a perturbation at `snr_db` below a signal of norm `norm`:
/// `10 log10(||x|| / ||e||) = snr_db`.
pub fn noise_norm_for_snr(norm: f64, snr_db: f64) -> f64 {
    norm * 10f64.powf(-snr_db / 10.0)
}

/// `x + e` with `10 log10(||x|| / ||e||) = snr_db`. Real signals get real
/// noise; an infinite SNR returns `x` unchanged.
pub fn perturb_to_snr(x: &Signal, snr_db: f64, kind: NoiseKind, seed: u64) -> Result<Signal> {
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    if snr_db.is_nan() {
        return Err(Error::InvalidParameter("SNR is NaN".into()));
    }
    if snr_db == f64::INFINITY {
        return Ok(x.clone());
    }
    let real = x.values().iter().all(|v| v.im == 0.0);
    let e = scaled_noise(
        x.values().len(),
        noise_norm_for_snr(norm, snr_db),
        real,
        kind,
        seed,
    );
    x.with_values(x.values().iter().zip(&e).map(|(a, b)| a + b).collect())
}

fn check_pair(truth: &Signal, recon: &Signal) -> Result<()> {
    if !truth.same_shape(recon) {
        return Err(Error::mismatch(
            format!("dim={} n={}", truth.dim(), truth.n()),
            format!("dim={} n={}", recon.dim(), recon.n()),
        ));
    }
    Ok(())
}

fn relative_distance(a: &[C64], b: &[C64]) -> Result<f64> {
    let denom = l2_norm(b);
    if denom == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let diff: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    Ok(l2_norm(&diff) / denom)
}

/// `||R - I|| / ||I||`.
pub fn relative_error(truth: &Signal, recon: &Signal) -> Result<f64> {
    check_pair(truth, recon)?;
    relative_distance(recon.values(), truth.values())
}

/// `||D(R - I)|| / ||D I||`.
pub fn gradient_relative_error(truth: &Signal, recon: &Signal) -> Result<f64> {
    check_pair(truth, recon)?;
    relative_distance(&recon.gradient(), &truth.gradient())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::min_separation;

    #[test]
    fn single_jump_promoted_to_two() {
        let spec = SignalSpec::custom(64, 1, 0.1);
        let g = gen_piecewise_signal(&spec, 4).unwrap();
        assert_eq!(g.support.len(), 2);
        let tv = g.signal.tv_norm();
        let v = g.signal.values();
        let step = (v[g.support[0] - 1] - v[g.support[0] % 64]).norm();
        assert!((tv - 2.0 * step).abs() < 1e-12);
    }

    #[test]
    fn separation_and_support() {
        let spec = SignalSpec::custom(512, 4, 1.0 / 32.0);
        for seed in 0..20 {
            let g = gen_piecewise_signal(&spec, seed).unwrap();
            let sup = g.support_set().unwrap();
            assert_eq!(sup.len(), 4);
            assert!((min_separation(&sup) - 1.0 / 32.0).abs() < 1e-12);
        }
        let spec = SignalSpec::custom(64, 5, 0.25);
        assert!(matches!(
            gen_piecewise_signal(&spec, 0),
            Err(Error::InfeasibleSeparation { .. })
        ));
    }

    #[test]
    fn presets_and_determinism() {
        for spec in [
            SignalSpec::coarse(512),
            SignalSpec::fine(512),
            SignalSpec::phantom(32),
        ] {
            let a = gen_piecewise_signal(&spec, 9).unwrap();
            assert_eq!(a, gen_piecewise_signal(&spec, 9).unwrap());
            assert_ne!(a, gen_piecewise_signal(&spec, 10).unwrap());
            if spec.dim == 1 {
                assert_eq!(a.support.len(), spec.jumps);
            } else {
                assert!(!a.support.is_empty());
            }
        }
    }

    #[test]
    fn explicit_levels() {
        let mut spec = SignalSpec::custom(16, 2, 0.25);
        spec.heights = Heights::Levels(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        let g = gen_piecewise_signal(&spec, 0).unwrap();
        assert!((g.signal.tv_norm() - 4.0).abs() < 1e-12);
        spec.heights = Heights::Levels(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(gen_piecewise_signal(&spec, 0).is_err());
    }

    #[test]
    fn snr_scaling() {
        let x = gen_piecewise_signal(&SignalSpec::coarse(128), 1)
            .unwrap()
            .signal;
        let y = perturb_to_snr(&x, 20.0, NoiseKind::Gaussian, 3).unwrap();
        let e: Vec<C64> = y
            .values()
            .iter()
            .zip(x.values())
            .map(|(a, b)| a - b)
            .collect();
        assert!((l2_norm(&e) - x.norm() * 1e-2).abs() < 1e-12 * x.norm());
        assert!(y.values().iter().all(|v| v.im == 0.0));
        let z = perturb_to_snr(&x, 20.0, NoiseKind::Uniform, 4).unwrap();
        assert_ne!(y, z);
        assert_eq!(
            perturb_to_snr(&x, f64::INFINITY, NoiseKind::Gaussian, 3).unwrap(),
            x
        );
        assert!(
            perturb_to_snr(&Signal::zeros(1, 8).unwrap(), 10.0, NoiseKind::Gaussian, 0).is_err()
        );
    }

    #[test]
    fn error_metrics() {
        let x = gen_piecewise_signal(&SignalSpec::coarse(64), 2)
            .unwrap()
            .signal;
        let zero = Signal::zeros(1, 64).unwrap();
        let twice = x
            .with_values(x.values().iter().map(|v| v * 2.0).collect())
            .unwrap();
        assert_eq!(relative_error(&x, &x).unwrap(), 0.0);
        assert!((relative_error(&x, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!((relative_error(&x, &twice).unwrap() - 1.0).abs() < 1e-15);
        assert!((gradient_relative_error(&x, &twice).unwrap() - 1.0).abs() < 1e-15);
        assert!(relative_error(&x, &Signal::zeros(1, 32).unwrap()).is_err());
        assert!(relative_error(&zero, &x).is_err());
    }
}
