//! Diagnostics behind the recovery guarantees: minimum separation, the
//! squared Fejér kernel and interpolation matrices, dual certificates,
//! Fourier/Haar coherence, restricted isometry checks and the Poincaré ratio.

mod certificate;
mod conditions;
mod fejer;
mod poincare;

pub use certificate::{certificate_weights, dual_certificate, CertificateWeights, DualCertificate};
pub use conditions::{
    candes_plan_conditions, fourier_haar_coherence, rip_check, stability_threshold, ConditionEntry,
    ConditionReport, RipReport, MAX_RIP_COLUMNS, MAX_RIP_ORDER, MAX_WEAK_RIP_N,
};
pub use fejer::{
    build_l, build_l_tilde, fejer_coeffs, fejer_kernel, fejer_kernel_d1, fejer_kernel_d2,
    l_tilde_sample_size, FejerCoefficients, InterpolationMatrix, LTildeReport,
    SAMPLE_SIZE_CONSTANT,
};
pub use poincare::{poincare_gap, PoincareReport};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::transforms::C64;

/// Sorted positions `t_1 < ... < t_s` in `{1, ..., N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    n: usize,
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter(
                "support must contain at least one index".into(),
            ));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "support indices must be strictly increasing".into(),
            ));
        }
        if indices[0] < 1 || *indices.last().expect("nonempty") > n {
            return Err(Error::InvalidParameter(format!(
                "support index outside 1..={n}"
            )));
        }
        Ok(SupportSet { n, indices })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        SupportSet::new(n, indices)
    }

    /// `s` points `step` apart starting at `first`.
    pub fn equispaced(n: usize, s: usize, first: usize, step: usize) -> Result<Self> {
        SupportSet::new(n, (0..s).map(|k| first + k * step).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.indices.binary_search(&t).is_ok()
    }
}

/// Smallest wrap-around gap between consecutive support points, over `N`.
pub fn min_separation(support: &SupportSet) -> f64 {
    let t = support.indices();
    let n = support.n();
    let wrap = t[0] + n - t[t.len() - 1];
    let gap = t.windows(2).map(|w| w[1] - w[0]).fold(wrap, usize::min);
    gap as f64 / n as f64
}

/// Largest singular value.
pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Smallest singular value.
pub(crate) fn smallest_singular_value(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().min()
}
