//! Orthonormal discrete Haar transforms for `N = 2^J`.
//!
//! 1D coefficients follow the dilation ordering
//! `Phi, Psi_{0,0}, Psi_{1,0}, Psi_{1,1}, ..., Psi_{J-1,2^{J-1}-1}`, so the
//! scaling coefficient sits at index 0 and scale `j` occupies `2^j..2^{j+1}`.
//!
//! In 2D the scaling coefficient sits at `(0, 0)` and, for scale `j` with
//! `s = 2^j` and shift `(k1, k2)`, the three wavelets sit at
//! `(s + k1, k2)` for `Psi(t1) Phi(t2)`, `(k1, s + k2)` for `Phi(t1) Psi(t2)`
//! and `(s + k1, s + k2)` for `Psi(t1) Psi(t2)`. Here `t1` runs along rows.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{Signal1D, Signal2D, C64};
use crate::error::{Error, Result};

fn check_power_of_two(n: usize) -> Result<()> {
    if n.is_power_of_two() && n >= 2 {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

// One analysis step on `len` entries spaced `stride` apart.
fn analysis_step(buf: &mut [C64], offset: usize, stride: usize, len: usize, scratch: &mut [C64]) {
    let half = len / 2;
    for i in 0..half {
        let a = buf[offset + 2 * i * stride];
        let b = buf[offset + (2 * i + 1) * stride];
        scratch[i] = (a + b) * FRAC_1_SQRT_2;
        scratch[half + i] = (a - b) * FRAC_1_SQRT_2;
    }
    for i in 0..len {
        buf[offset + i * stride] = scratch[i];
    }
}

fn synthesis_step(buf: &mut [C64], offset: usize, stride: usize, len: usize, scratch: &mut [C64]) {
    let half = len / 2;
    for i in 0..half {
        let s = buf[offset + i * stride];
        let d = buf[offset + (half + i) * stride];
        scratch[2 * i] = (s + d) * FRAC_1_SQRT_2;
        scratch[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
    }
    for i in 0..len {
        buf[offset + i * stride] = scratch[i];
    }
}

pub fn haar_forward_in_place(buf: &mut [C64]) -> Result<()> {
    let n = buf.len();
    check_power_of_two(n)?;
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    let mut len = n;
    while len > 1 {
        analysis_step(buf, 0, 1, len, &mut scratch);
        len /= 2;
    }
    Ok(())
}

pub fn haar_inverse_in_place(buf: &mut [C64]) -> Result<()> {
    let n = buf.len();
    check_power_of_two(n)?;
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    let mut len = 2;
    while len <= n {
        synthesis_step(buf, 0, 1, len, &mut scratch);
        len *= 2;
    }
    Ok(())
}

pub fn haar2_forward_in_place(n: usize, buf: &mut [C64]) -> Result<()> {
    check_power_of_two(n)?;
    if buf.len() != n * n {
        return Err(Error::mismatch(n * n, buf.len()));
    }
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    let mut len = n;
    while len > 1 {
        for c in 0..len {
            analysis_step(buf, c, n, len, &mut scratch);
        }
        for r in 0..len {
            analysis_step(buf, r * n, 1, len, &mut scratch);
        }
        len /= 2;
    }
    Ok(())
}

pub fn haar2_inverse_in_place(n: usize, buf: &mut [C64]) -> Result<()> {
    check_power_of_two(n)?;
    if buf.len() != n * n {
        return Err(Error::mismatch(n * n, buf.len()));
    }
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    let mut len = 2;
    while len <= n {
        for r in 0..len {
            synthesis_step(buf, r * n, 1, len, &mut scratch);
        }
        for c in 0..len {
            synthesis_step(buf, c, n, len, &mut scratch);
        }
        len *= 2;
    }
    Ok(())
}

/// Haar coefficients `(<x, H_j>)_j`.
pub fn haar_1d(x: &Signal1D) -> Result<Signal1D> {
    let mut buf = x.values().to_vec();
    haar_forward_in_place(&mut buf)?;
    Signal1D::new(buf)
}

pub fn inverse_haar_1d(c: &Signal1D) -> Result<Signal1D> {
    let mut buf = c.values().to_vec();
    haar_inverse_in_place(&mut buf)?;
    Signal1D::new(buf)
}

pub fn haar_2d(x: &Signal2D) -> Result<Signal2D> {
    let mut buf = x.values().to_vec();
    haar2_forward_in_place(x.n(), &mut buf)?;
    Signal2D::new(x.n(), buf)
}

pub fn inverse_haar_2d(c: &Signal2D) -> Result<Signal2D> {
    let mut buf = c.values().to_vec();
    haar2_inverse_in_place(c.n(), &mut buf)?;
    Signal2D::new(c.n(), buf)
}
