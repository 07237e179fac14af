//! Squared Fejér kernel, its Fourier coefficients and the interpolation
//! matrices `L` and `L~` built from it.
//!
//! Kernel arguments are in cycles: grid points `t_j, t_k` enter as
//! `K_M((t_j - t_k) / N)`, and `K_M(u) = (1/M) sum_{|l| <= 2M} g_M(l) e^{-2 pi i u l}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{smallest_singular_value, spectral_norm, SupportSet};
use crate::error::{Error, Result};
use crate::sampling::{Indices, SamplingMask, SamplingScheme};
use crate::transforms::C64;

/// `g_M(j)` for `j in {-2M, ..., 2M}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerCoefficients {
    band: usize,
    values: Vec<f64>,
}

impl FejerCoefficients {
    pub fn band(&self) -> usize {
        self.band
    }

    /// `g_M(j)`, zero outside `|j| <= 2M`.
    pub fn get(&self, j: i64) -> f64 {
        let edge = 2 * self.band as i64;
        if j.abs() > edge {
            0.0
        } else {
            self.values[(j + edge) as usize]
        }
    }

    /// Values ordered from `j = -2M` to `2M`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// `g_M(j) = (1/M) sum_{k=max(j-M,-M)}^{min(j+M,M)} (1 - |k/M|)(1 - |j/M - k/M|)`.
pub fn fejer_coeffs(band: usize) -> Result<FejerCoefficients> {
    if band < 1 {
        return Err(Error::InvalidParameter("M must be >= 1".into()));
    }
    let m = band as i64;
    let mf = band as f64;
    let values = (-2 * m..=2 * m)
        .map(|j| {
            let lo = (j - m).max(-m);
            let hi = (j + m).min(m);
            (lo..=hi)
                .map(|k| (1.0 - (k as f64 / mf).abs()) * (1.0 - ((j - k) as f64 / mf).abs()))
                .sum::<f64>()
                / mf
        })
        .collect();
    Ok(FejerCoefficients { band, values })
}

/// `sin(pi M u) / (M sin(pi u))` and its first two derivatives in `u`.
/// The derivatives use the equivalent cosine sum
/// `(1/M) sum_{k=0}^{M-1} cos(pi (2k - M + 1) u)`, which has no singularity.
fn dirichlet(u: f64, band: usize) -> (f64, f64, f64) {
    let mf = band as f64;
    let s0 = (PI * u).sin();
    let f = if s0.abs() > 1e-6 {
        (PI * mf * u).sin() / (mf * s0)
    } else {
        // limit at integers: (-1)^{n (M - 1)}
        let n = u.round() as i64;
        if (n * (band as i64 - 1)).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let (mut d1, mut d2) = (0.0, 0.0);
    for k in 0..band {
        let c = PI * (2.0 * k as f64 - mf + 1.0);
        d1 -= c * (c * u).sin();
        d2 -= c * c * (c * u).cos();
    }
    (f, d1 / mf, d2 / mf)
}

/// `K_M(u) = (sin(pi M u) / (M sin(pi u)))^4`, with `K_M(n) = 1` at integers.
pub fn fejer_kernel(u: f64, band: usize) -> f64 {
    dirichlet(u, band).0.powi(4)
}

/// `K_M'(u)`.
pub fn fejer_kernel_d1(u: f64, band: usize) -> f64 {
    let (f, d1, _) = dirichlet(u, band);
    4.0 * f.powi(3) * d1
}

/// `K_M''(u)`; at `u = 0` this is `-4 pi^2 (M^2 - 1) / 3`.
pub fn fejer_kernel_d2(u: f64, band: usize) -> f64 {
    let (f, d1, d2) = dirichlet(u, band);
    12.0 * f * f * d1 * d1 + 4.0 * f.powi(3) * d2
}

/// The matrix `L_{jk} = K_M((t_j - t_k)/N)` and the error of its
/// factorization `(1/M) P_Δ A* V A P_Δ`.
#[derive(Debug, Clone)]
pub struct InterpolationMatrix {
    pub matrix: DMatrix<C64>,
    pub factorization_error: f64,
}

impl InterpolationMatrix {
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    /// `||L^{-1}||`, or `None` when `L` is numerically singular.
    pub fn inverse_norm(&self) -> Option<f64> {
        inverse_norm(&self.matrix)
    }

    /// `||L - I||`.
    pub fn distance_to_identity(&self) -> f64 {
        let s = self.matrix.nrows();
        spectral_norm(&(&self.matrix - DMatrix::<C64>::identity(s, s)))
    }
}

fn inverse_norm(m: &DMatrix<C64>) -> Option<f64> {
    let smallest = smallest_singular_value(m);
    if smallest <= 1e-12 * spectral_norm(m).max(1.0) {
        None
    } else {
        Some(1.0 / smallest)
    }
}

fn phase(t: f64, l: i64, n: usize) -> C64 {
    C64::from_polar(1.0, -2.0 * PI * t * l as f64 / n as f64)
}

pub fn build_l(support: &SupportSet, band: usize) -> Result<InterpolationMatrix> {
    let g = fejer_coeffs(band)?;
    let n = support.n();
    let t = support.indices();
    let s = t.len();
    let matrix = DMatrix::from_fn(s, s, |j, k| {
        C64::new(
            fejer_kernel((t[j] as f64 - t[k] as f64) / n as f64, band),
            0.0,
        )
    });
    // (1/M) P_Δ A* V A P_Δ assembled entrywise over the in-range band
    let edge = 2 * band as i64;
    let lo = crate::transforms::min_frequency(n).max(-edge);
    let hi = crate::transforms::max_frequency(n).min(edge);
    let factored = DMatrix::from_fn(s, s, |j, k| {
        (lo..=hi)
            .map(|l| phase(t[j] as f64, l, n) * phase(t[k] as f64, l, n).conj() * g.get(l))
            .sum::<C64>()
            / band as f64
    });
    let factorization_error = (&matrix - &factored)
        .iter()
        .fold(0.0f64, |a, v| a.max(v.norm()));
    Ok(InterpolationMatrix {
        matrix,
        factorization_error,
    })
}

/// `L~ = (1/m) P_Δ A* V P_Ω A P_Δ` with `m = qM`, plus its operator norms.
#[derive(Debug, Clone)]
pub struct LTildeReport {
    pub matrix: DMatrix<C64>,
    pub q: f64,
    pub m: f64,
    pub norm: f64,
    pub inverse_norm: Option<f64>,
}

impl LTildeReport {
    pub fn invertible(&self) -> bool {
        self.inverse_norm.is_some()
    }
}

/// Checks that a mask is 1D, matches `N` and lies inside `{-2M, ..., 2M}`;
/// returns its frequency list.
pub(crate) fn band_indices(mask: &SamplingMask, n: usize, band: usize) -> Result<&[i64]> {
    let Indices::D1(ks) = mask.indices() else {
        return Err(Error::InvalidParameter(
            "band-limited analysis needs a 1D mask".into(),
        ));
    };
    if mask.n() != n {
        return Err(Error::mismatch(n, mask.n()));
    }
    let edge = 2 * band as i64;
    if ks.iter().any(|k| k.abs() > edge) {
        return Err(Error::InvalidParameter(format!(
            "mask leaves the band {{-{edge}, ..., {edge}}}"
        )));
    }
    Ok(ks)
}

/// Bernoulli probability of a mask: the scheme's `q` when it was drawn with
/// this band, otherwise the fraction of the band it covers.
pub(crate) fn band_fraction(mask: &SamplingMask, band: usize) -> f64 {
    match mask.scheme() {
        SamplingScheme::Bernoulli { q, band: b } if *b == band => *q,
        _ => mask.distinct_count() as f64 / (4 * band + 1) as f64,
    }
}

/// Constant in the sample-size requirement `m >= C s log(s / eps)` for `L~`.
pub const SAMPLE_SIZE_CONSTANT: f64 = 3.0;

/// `C s log(s / eps)`, the expected Bernoulli count `m = qM` needed for the
/// norm bounds on `L~` to hold with probability `1 - eps`.
pub fn l_tilde_sample_size(s: usize, eps: f64) -> f64 {
    SAMPLE_SIZE_CONSTANT * s as f64 * (s as f64 / eps).ln()
}

pub fn build_l_tilde(
    support: &SupportSet,
    band: usize,
    mask: &SamplingMask,
) -> Result<LTildeReport> {
    let g = fejer_coeffs(band)?;
    let n = support.n();
    let ks = band_indices(mask, n, band)?;
    let q = band_fraction(mask, band);
    let m = q * band as f64;
    let t = support.indices();
    let s = t.len();
    let matrix = DMatrix::from_fn(s, s, |j, k| {
        ks.iter()
            .map(|&l| phase(t[j] as f64, l, n) * phase(t[k] as f64, l, n).conj() * g.get(l))
            .sum::<C64>()
            / m
    });
    let norm = spectral_norm(&matrix);
    let inverse_norm = inverse_norm(&matrix);
    Ok(LTildeReport {
        matrix,
        q,
        m,
        norm,
        inverse_norm,
    })
}
