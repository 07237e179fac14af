//! Discrete Poincaré inequality for mean-zero signals.

use crate::transforms::{l2_norm, Signal, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareReport {
    pub dim: usize,
    pub mean: C64,
    /// `||z - mean||_2`.
    pub centered_norm: f64,
    /// `||z - mean||_TV`.
    pub tv: f64,
    /// `||z~|| / (sqrt(N) ||z~||_TV)` in 1D and `||z~|| / ||z~||_TV` in 2D.
    pub ratio: f64,
    /// The inequality is stated for real 2D grids; complex input is flagged.
    pub real: bool,
    pub holds: bool,
}

/// Ratio of the centred l2 norm to the TV seminorm, scaled so that the
/// inequality reads `ratio <= 1`. Constant signals give `0/0`, reported as 0.
pub fn poincare_gap(z: &Signal) -> PoincareReport {
    let values = z.values();
    let total = values.len() as f64;
    let mean = values.iter().sum::<C64>() / total;
    let centered: Vec<C64> = values.iter().map(|v| v - mean).collect();
    let centered_norm = l2_norm(&centered);
    let tv = z.with_values(centered).expect("same shape").tv_norm();
    let scale = match z.dim() {
        1 => (z.n() as f64).sqrt(),
        _ => 1.0,
    };
    let ratio = if tv > 0.0 {
        centered_norm / (scale * tv)
    } else if centered_norm > 1e-12 * (1.0 + l2_norm(values)) {
        f64::INFINITY
    } else {
        0.0
    };
    let real = values.iter().all(|v| v.im == 0.0);
    PoincareReport {
        dim: z.dim(),
        mean,
        centered_norm,
        tv,
        ratio,
        real,
        holds: ratio <= 1.0 + 1e-12,
    }
}
