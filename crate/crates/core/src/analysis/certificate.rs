//! Dual certificates by squared Fejér kernel interpolation.
//!
//! With the mask-restricted kernel
//! `K̄(u) = (1/M) sum_{l in Ω} g_M(l) e^{-2 pi i u l}`, the polynomial
//! `Q(t) = sum_k alpha_k K̄((t - t_k)/N) + beta_k K̄'((t - t_k)/N)` is fitted so
//! that `Q(t_k) = sign_k` and `Q'(t_k) = 0`. Off the support `|Q|` should stay
//! below one, and `Q` is the vector `A* P_Ω w` for explicit weights `w`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::fejer::{band_fraction, band_indices, fejer_coeffs, fejer_kernel_d2, FejerCoefficients};
use super::SupportSet;
use crate::error::{Error, Result};
use crate::sampling::SamplingMask;
use crate::transforms::C64;

/// Bound on `sqrt(||alpha||^2 + |K''(0)| ||beta||^2)` is `COEFFICIENT_CONSTANT * 2 sqrt(s) / q`.
pub const COEFFICIENT_CONSTANT: f64 = 1.568;

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateDiagnostics {
    /// `max_k |Q(t_k) - sign_k|`.
    pub interpolation_error: f64,
    /// `max_k |Q'(t_k)|`, derivative in cycles.
    pub derivative_error: f64,
    /// `max_{j not in Δ} |Q(j)|` over the grid.
    pub max_off_support: f64,
    pub coefficient_norm: f64,
    pub coefficient_bound: f64,
    pub condition_number: f64,
}

#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub support: SupportSet,
    pub signs: Vec<C64>,
    pub band: usize,
    pub q: f64,
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    pub mask: SamplingMask,
    pub diagnostics: CertificateDiagnostics,
    frequencies: Vec<i64>,
    coefficients: FejerCoefficients,
}

/// Masked kernel and its first two derivatives at `u`.
fn masked_kernel(freqs: &[i64], g: &FejerCoefficients, u: f64) -> [C64; 3] {
    let mut out = [C64::new(0.0, 0.0); 3];
    for &l in freqs {
        let w = 2.0 * PI * l as f64;
        let e = C64::from_polar(g.get(l), -w * u);
        out[0] += e;
        out[1] += e * C64::new(0.0, -w);
        out[2] -= e * (w * w);
    }
    let scale = g.band() as f64;
    out.map(|v| v / scale)
}

impl DualCertificate {
    /// `Q` and `Q'` at grid position `t` (any real), derivative in cycles.
    pub fn evaluate(&self, t: f64) -> (C64, C64) {
        let n = self.support.n() as f64;
        let mut q = C64::new(0.0, 0.0);
        let mut dq = C64::new(0.0, 0.0);
        for (k, &tk) in self.support.indices().iter().enumerate() {
            let [k0, k1, k2] =
                masked_kernel(&self.frequencies, &self.coefficients, (t - tk as f64) / n);
            q += self.alpha[k] * k0 + self.beta[k] * k1;
            dq += self.alpha[k] * k1 + self.beta[k] * k2;
        }
        (q, dq)
    }

    /// `Q(j)` for `j = 1, ..., N`.
    pub fn grid_values(&self) -> Vec<C64> {
        (1..=self.support.n())
            .map(|j| self.evaluate(j as f64).0)
            .collect()
    }

    /// Distinct in-band frequencies the kernel is built from.
    pub fn frequencies(&self) -> &[i64] {
        &self.frequencies
    }
}

pub fn dual_certificate(
    support: &SupportSet,
    signs: &[C64],
    band: usize,
    mask: &SamplingMask,
) -> Result<DualCertificate> {
    let s = support.len();
    if signs.len() != s {
        return Err(Error::mismatch(s, signs.len()));
    }
    if signs.iter().any(|v| (v.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidParameter(
            "signs must have unit modulus".into(),
        ));
    }
    let g = fejer_coeffs(band)?;
    let n = support.n();
    let mut frequencies = band_indices(mask, n, band)?.to_vec();
    frequencies.sort_unstable();
    frequencies.dedup();
    let q = band_fraction(mask, band);

    // beta is solved for in units of 1 / sqrt(|K''(0)|) to balance the blocks
    let curvature = fejer_kernel_d2(0.0, band).abs();
    let c = if curvature > 0.0 {
        curvature.sqrt()
    } else {
        1.0
    };
    let t = support.indices();
    let mut system = DMatrix::<C64>::zeros(2 * s, 2 * s);
    for j in 0..s {
        for k in 0..s {
            let u = (t[j] as f64 - t[k] as f64) / n as f64;
            let [k0, k1, k2] = masked_kernel(&frequencies, &g, u);
            system[(j, k)] = k0;
            system[(j, s + k)] = k1 / c;
            system[(s + j, k)] = k1 / c;
            system[(s + j, s + k)] = k2 / (c * c);
        }
    }
    let sv = system.singular_values();
    let condition_number = sv.max() / sv.min();
    if !condition_number.is_finite() || condition_number > 1e12 {
        return Err(Error::SingularSystem {
            condition: condition_number,
        });
    }
    let mut rhs = DVector::<C64>::zeros(2 * s);
    for (j, sign) in signs.iter().enumerate() {
        rhs[j] = *sign;
    }
    let sol = system.lu().solve(&rhs).ok_or(Error::SingularSystem {
        condition: condition_number,
    })?;
    let alpha: Vec<C64> = (0..s).map(|k| sol[k]).collect();
    // Q'(t_j) row was divided by c, so the true beta is sol / c
    let beta: Vec<C64> = (0..s).map(|k| sol[s + k] / c).collect();

    let mut cert = DualCertificate {
        support: support.clone(),
        signs: signs.to_vec(),
        band,
        q,
        alpha,
        beta,
        mask: mask.clone(),
        diagnostics: CertificateDiagnostics {
            interpolation_error: 0.0,
            derivative_error: 0.0,
            max_off_support: 0.0,
            coefficient_norm: 0.0,
            coefficient_bound: 2.0 * (s as f64).sqrt() * COEFFICIENT_CONSTANT / q,
            condition_number,
        },
        frequencies,
        coefficients: g,
    };
    let mut interp = 0.0f64;
    let mut deriv = 0.0f64;
    for (k, &tk) in t.iter().enumerate() {
        let (v, dv) = cert.evaluate(tk as f64);
        interp = interp.max((v - signs[k]).norm());
        deriv = deriv.max(dv.norm());
    }
    let off = cert
        .grid_values()
        .iter()
        .enumerate()
        .filter(|(j, _)| !support.contains(j + 1))
        .fold(0.0f64, |a, (_, v)| a.max(v.norm()));
    let coef = (cert.alpha.iter().map(|a| a.norm_sqr()).sum::<f64>()
        + curvature * cert.beta.iter().map(|b| b.norm_sqr()).sum::<f64>())
    .sqrt();
    cert.diagnostics.interpolation_error = interp;
    cert.diagnostics.derivative_error = deriv;
    cert.diagnostics.max_off_support = off;
    cert.diagnostics.coefficient_norm = coef;
    Ok(cert)
}

/// Weights `w` on the mask with `A* P_Ω w = Q` on the grid.
#[derive(Debug, Clone)]
pub struct CertificateWeights {
    pub frequencies: Vec<i64>,
    pub w: Vec<C64>,
    pub norm: f64,
    /// `c2 sqrt(s) / sqrt(m)` with `m = qM`.
    pub bound: f64,
    /// `max_j |(A* P_Ω w)_j - Q(j)|`.
    pub reproduction_error: f64,
}

impl CertificateWeights {
    pub fn bound_ratio(&self) -> f64 {
        self.norm / self.bound
    }
}

/// Constant in `||w||_2 <= c2 sqrt(s/m)` obtained from `||L~|| <= 5/4`,
/// `||g_M||_inf <= 1` and the coefficient bound: `c2 = 2 * 1.568 * sqrt(35)`.
pub fn weight_bound_constant() -> f64 {
    2.0 * COEFFICIENT_CONSTANT * 35f64.sqrt()
}

pub fn certificate_weights(cert: &DualCertificate) -> CertificateWeights {
    let n = cert.support.n();
    let t = cert.support.indices();
    let m_scale = cert.band as f64;
    let w: Vec<C64> = cert
        .frequencies
        .iter()
        .map(|&l| {
            let mut a = C64::new(0.0, 0.0);
            let mut b = C64::new(0.0, 0.0);
            for (k, &tk) in t.iter().enumerate() {
                let e = C64::from_polar(1.0, 2.0 * PI * tk as f64 * l as f64 / n as f64);
                a += cert.alpha[k] * e;
                b += cert.beta[k] * e;
            }
            (a - C64::new(0.0, 2.0 * PI * l as f64) * b) * (cert.coefficients.get(l) / m_scale)
        })
        .collect();
    let q_grid = cert.grid_values();
    let reproduction_error = (1..=n)
        .map(|j| {
            let rho: C64 = cert
                .frequencies
                .iter()
                .zip(&w)
                .map(|(&l, wl)| {
                    wl * C64::from_polar(1.0, -2.0 * PI * (j as f64) * l as f64 / n as f64)
                })
                .sum();
            (rho - q_grid[j - 1]).norm()
        })
        .fold(0.0, f64::max);
    let norm = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let m = cert.q * cert.band as f64;
    let bound = weight_bound_constant() * (t.len() as f64 / m).sqrt();
    CertificateWeights {
        frequencies: cert.frequencies.clone(),
        w,
        norm,
        bound,
        reproduction_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::bernoulli_mask;

    #[test]
    fn single_spike() {
        let support = SupportSet::new(128, vec![40]).unwrap();
        let mask = bernoulli_mask(128, 8, 1.0, 0).unwrap();
        let cert = dual_certificate(&support, &[C64::new(1.0, 0.0)], 8, &mask).unwrap();
        assert!(cert.diagnostics.interpolation_error < 1e-12);
        assert!(cert.diagnostics.max_off_support < 1.0);
        let w = certificate_weights(&cert);
        assert!(w.norm.is_finite() && w.bound_ratio().is_finite());
        assert!(w.reproduction_error < 1e-10);
    }

    #[test]
    fn rejects_bad_signs() {
        let support = SupportSet::new(128, vec![40, 90]).unwrap();
        let mask = bernoulli_mask(128, 8, 1.0, 0).unwrap();
        let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(dual_certificate(&support, &zero, 8, &mask).is_err());
        assert!(dual_certificate(&support, &[C64::new(1.0, 0.0)], 8, &mask).is_err());
    }

    #[test]
    fn complex_signs_interpolated() {
        let support = SupportSet::new(256, vec![5, 60, 101, 180]).unwrap();
        let signs: Vec<C64> = [0.3, 1.9, -2.2, 3.0]
            .iter()
            .map(|&p| C64::from_polar(1.0, p))
            .collect();
        let mask = bernoulli_mask(256, 16, 1.0, 0).unwrap();
        let cert = dual_certificate(&support, &signs, 16, &mask).unwrap();
        assert!(cert.diagnostics.interpolation_error < 1e-10);
        assert!(cert.diagnostics.derivative_error < 1e-8 * 16.0);
        assert!(cert.diagnostics.max_off_support < 1.0);
        assert!(cert.diagnostics.coefficient_norm <= cert.diagnostics.coefficient_bound);
        assert!(certificate_weights(&cert).reproduction_error < 1e-10);
    }
}
