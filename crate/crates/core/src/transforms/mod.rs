//! Linear operators on 1D and 2D complex signals: the non-unitary DFT,
//! periodic finite differences, orthonormal Haar transforms, and the
//! total-variation seminorm built on them.
//!
//! Signals follow a 1-indexed data model; entry `j` of that model lives at
//! `values[j - 1]`. Spectra are stored in natural FFT order: storage
//! position `p` holds frequency `k = p` for `p <= ceil(N/2)` and `k = p - N`
//! otherwise, which is a bijection onto `{-floor(N/2)+1, ..., ceil(N/2)}`.

mod fourier;
mod gradient;
mod haar;

pub use fourier::{dft_1d, dft_2d, idft_1d, idft_2d, Dft1, Dft2};
pub use gradient::{
    adjoint_gradient_1d, adjoint_gradient_2d, grad1, grad1_adj, grad2, grad2_adj, gradient_1d,
    gradient_2d, gradient_2d_parts, gradient_multiplier, tv_norm_1d, tv_norm_2d, GradientField2D,
};
pub use haar::{
    haar2_forward_in_place, haar2_inverse_in_place, haar_1d, haar_2d, haar_forward_in_place,
    haar_inverse_in_place, inverse_haar_1d, inverse_haar_2d,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Smallest frequency index `-floor(N/2) + 1`.
pub fn min_frequency(n: usize) -> i64 {
    -((n / 2) as i64) + 1
}

/// Largest frequency index `ceil(N/2)`.
pub fn max_frequency(n: usize) -> i64 {
    n.div_ceil(2) as i64
}

pub fn frequency_in_range(n: usize, k: i64) -> bool {
    (min_frequency(n)..=max_frequency(n)).contains(&k)
}

/// Storage position of frequency `k` (any integer, reduced mod N).
pub fn frequency_position(n: usize, k: i64) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Frequency stored at position `p`.
pub fn position_frequency(n: usize, p: usize) -> i64 {
    if (p as i64) <= max_frequency(n) {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

/// Frequencies in ascending order, `-floor(N/2)+1 ..= ceil(N/2)`.
pub fn frequencies(n: usize) -> impl Iterator<Item = i64> {
    min_frequency(n)..=max_frequency(n)
}

fn check_values(values: &[C64]) -> Result<()> {
    if values
        .iter()
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::InvalidParameter(
            "signal has non-finite entries".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    values: Vec<C64>,
}

impl Signal1D {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSize(format!(
                "1D signal needs N >= 2, got {}",
                values.len()
            )));
        }
        check_values(&values)?;
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Entry `j` of the 1-indexed model (`1 <= j <= N`).
    pub fn get(&self, j: usize) -> C64 {
        self.values[j - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal2D {
    n: usize,
    values: Vec<C64>,
}

impl Signal2D {
    /// Builds an `n x n` signal from row-major values.
    pub fn new(n: usize, values: Vec<C64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!(
                "2D signal needs N >= 2, got {n}"
            )));
        }
        if values.len() != n * n {
            return Err(Error::mismatch(n * n, values.len()));
        }
        check_values(&values)?;
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut values = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                values.push(f(r, c));
            }
        }
        Self::new(n, values)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![C64::new(0.0, 0.0); n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Zero-based (row, column) access.
    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.values[r * self.n + c]
    }
}

/// A signal of either dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    D1(Signal1D),
    D2(Signal2D),
}

impl Signal {
    pub fn dim(&self) -> usize {
        match self {
            Signal::D1(_) => 1,
            Signal::D2(_) => 2,
        }
    }

    /// Side length N.
    pub fn n(&self) -> usize {
        match self {
            Signal::D1(s) => s.len(),
            Signal::D2(s) => s.n(),
        }
    }

    pub fn values(&self) -> &[C64] {
        match self {
            Signal::D1(s) => s.values(),
            Signal::D2(s) => s.values(),
        }
    }

    /// Rebuilds a signal of the same shape around new values.
    pub fn with_values(&self, values: Vec<C64>) -> Result<Signal> {
        match self {
            Signal::D1(_) => Ok(Signal::D1(Signal1D::new(values)?)),
            Signal::D2(s) => Ok(Signal::D2(Signal2D::new(s.n(), values)?)),
        }
    }

    pub fn zeros(dim: usize, n: usize) -> Result<Signal> {
        match dim {
            1 => Ok(Signal::D1(Signal1D::zeros(n)?)),
            2 => Ok(Signal::D2(Signal2D::zeros(n)?)),
            d => Err(Error::InvalidParameter(format!(
                "unsupported dimension {d}"
            ))),
        }
    }

    pub fn norm(&self) -> f64 {
        l2_norm(self.values())
    }

    pub fn tv_norm(&self) -> f64 {
        match self {
            Signal::D1(s) => tv_norm_1d(s),
            Signal::D2(s) => tv_norm_2d(s),
        }
    }

    /// Periodic gradient `D x` as a flat vector (1D `D`, or `D1 x + i D2 x`).
    pub fn gradient(&self) -> Vec<C64> {
        match self {
            Signal::D1(s) => grad1(s.values()),
            Signal::D2(s) => grad2(s.n(), s.values()),
        }
    }

    /// Non-unitary DFT as a flat vector in storage order.
    pub fn spectrum(&self) -> Vec<C64> {
        match self {
            Signal::D1(s) => dft_1d(s).into_coefficients(),
            Signal::D2(s) => dft_2d(s).into_coefficients(),
        }
    }

    pub fn same_shape(&self, other: &Signal) -> bool {
        self.dim() == other.dim() && self.n() == other.n()
    }
}

impl From<Signal1D> for Signal {
    fn from(s: Signal1D) -> Self {
        Signal::D1(s)
    }
}

impl From<Signal2D> for Signal {
    fn from(s: Signal2D) -> Self {
        Signal::D2(s)
    }
}

/// Spectrum of a length-N signal in natural FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    coefficients: Vec<C64>,
}

impl Spectrum1D {
    pub fn from_storage(coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::InvalidSize("spectrum needs N >= 2".into()));
        }
        Ok(Self { coefficients })
    }

    /// Builds a spectrum from values listed in ascending frequency order.
    pub fn from_ordered(ordered: &[C64]) -> Result<Self> {
        let n = ordered.len();
        let mut coefficients = vec![C64::new(0.0, 0.0); n];
        for (v, k) in ordered.iter().zip(frequencies(n)) {
            coefficients[frequency_position(n, k)] = *v;
        }
        Self::from_storage(coefficients)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Coefficient at frequency `k`; panics when `k` is outside the range.
    pub fn at(&self, k: i64) -> C64 {
        let n = self.len();
        assert!(
            frequency_in_range(n, k),
            "frequency {k} outside range for N={n}"
        );
        self.coefficients[frequency_position(n, k)]
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<C64> {
        self.coefficients
    }

    pub fn to_ordered(&self) -> Vec<C64> {
        frequencies(self.len()).map(|k| self.at(k)).collect()
    }
}

/// Spectrum of an N x N signal; storage is row-major over positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    n: usize,
    coefficients: Vec<C64>,
}

impl Spectrum2D {
    pub fn from_storage(n: usize, coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.len() != n * n {
            return Err(Error::mismatch(n * n, coefficients.len()));
        }
        Ok(Self { n, coefficients })
    }

    pub fn from_ordered(n: usize, ordered: &[C64]) -> Result<Self> {
        if ordered.len() != n * n {
            return Err(Error::mismatch(n * n, ordered.len()));
        }
        let mut coefficients = vec![C64::new(0.0, 0.0); n * n];
        let mut it = ordered.iter();
        for k1 in frequencies(n) {
            for k2 in frequencies(n) {
                let p = frequency_position(n, k1) * n + frequency_position(n, k2);
                coefficients[p] = *it.next().expect("length checked");
            }
        }
        Self::from_storage(n, coefficients)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn at(&self, k1: i64, k2: i64) -> C64 {
        let n = self.n;
        assert!(frequency_in_range(n, k1) && frequency_in_range(n, k2));
        self.coefficients[frequency_position(n, k1) * n + frequency_position(n, k2)]
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<C64> {
        self.coefficients
    }

    pub fn to_ordered(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for k1 in frequencies(self.n) {
            for k2 in frequencies(self.n) {
                out.push(self.at(k1, k2));
            }
        }
        out
    }
}

pub fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn l1_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}
