use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{Signal1D, Signal2D, Spectrum1D, Spectrum2D, C64};

/// Planned 1D transform `(A x)_k = sum_{j=1}^N x_j exp(2 pi i k j / N)`.
///
/// The exponent carries a `+` sign and the sum runs over 1-based `j`, so
/// `A` is an unnormalized backward FFT followed by the phase `exp(2 pi i k / N)`.
#[derive(Clone)]
pub struct Dft1 {
    n: usize,
    backward: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
    phase: Vec<C64>,
}

impl std::fmt::Debug for Dft1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft1").field("n", &self.n).finish()
    }
}

impl Dft1 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let phase = (0..n)
            .map(|p| C64::from_polar(1.0, 2.0 * PI * p as f64 / n as f64))
            .collect();
        Self {
            n,
            backward: planner.plan_fft_inverse(n),
            forward: planner.plan_fft_forward(n),
            phase,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place `A`.
    pub fn apply(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.backward.process(buf);
        for (v, ph) in buf.iter_mut().zip(&self.phase) {
            *v *= ph;
        }
    }

    /// In-place `A^{-1} = A^* / N`.
    pub fn apply_inverse(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.n);
        for (v, ph) in buf.iter_mut().zip(&self.phase) {
            *v *= ph.conj();
        }
        self.forward.process(buf);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// In-place adjoint `A^*` (equal to `N A^{-1}`).
    pub fn apply_adjoint(&self, buf: &mut [C64]) {
        self.apply_inverse(buf);
        let n = self.n as f64;
        for v in buf.iter_mut() {
            *v *= n;
        }
    }
}

/// Planned 2D transform, applied separably along rows and columns.
#[derive(Debug, Clone)]
pub struct Dft2 {
    line: Dft1,
}

impl Dft2 {
    pub fn new(n: usize) -> Self {
        Self { line: Dft1::new(n) }
    }

    pub fn n(&self) -> usize {
        self.line.n
    }

    fn separable(&self, buf: &mut [C64], f: impl Fn(&Dft1, &mut [C64])) {
        let n = self.line.n;
        debug_assert_eq!(buf.len(), n * n);
        for row in buf.chunks_exact_mut(n) {
            f(&self.line, row);
        }
        let mut col = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = buf[r * n + c];
            }
            f(&self.line, &mut col);
            for r in 0..n {
                buf[r * n + c] = col[r];
            }
        }
    }

    pub fn apply(&self, buf: &mut [C64]) {
        self.separable(buf, |d, v| d.apply(v));
    }

    pub fn apply_inverse(&self, buf: &mut [C64]) {
        self.separable(buf, |d, v| d.apply_inverse(v));
    }

    pub fn apply_adjoint(&self, buf: &mut [C64]) {
        self.separable(buf, |d, v| d.apply_adjoint(v));
    }
}

pub fn dft_1d(x: &Signal1D) -> Spectrum1D {
    let mut buf = x.values().to_vec();
    Dft1::new(x.len()).apply(&mut buf);
    Spectrum1D::from_storage(buf).expect("length preserved")
}

pub fn idft_1d(y: &Spectrum1D) -> Signal1D {
    let mut buf = y.coefficients().to_vec();
    Dft1::new(y.len()).apply_inverse(&mut buf);
    Signal1D::new(buf).expect("length preserved")
}

pub fn dft_2d(x: &Signal2D) -> Spectrum2D {
    let mut buf = x.values().to_vec();
    Dft2::new(x.n()).apply(&mut buf);
    Spectrum2D::from_storage(x.n(), buf).expect("length preserved")
}

pub fn idft_2d(y: &Spectrum2D) -> Signal2D {
    let mut buf = y.coefficients().to_vec();
    Dft2::new(y.n()).apply_inverse(&mut buf);
    Signal2D::new(y.n(), buf).expect("length preserved")
}
