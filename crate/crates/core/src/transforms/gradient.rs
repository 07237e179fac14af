use std::f64::consts::PI;

use super::{l1_norm, Signal1D, Signal2D, C64};

/// `(D z)_j = z_j - z_{j+1}` with `z_{N+1} = z_1`.
pub fn grad1(z: &[C64]) -> Vec<C64> {
    let n = z.len();
    (0..n).map(|j| z[j] - z[(j + 1) % n]).collect()
}

/// Adjoint of [`grad1`]: `(D^* g)_j = g_j - g_{j-1}`.
pub fn grad1_adj(g: &[C64]) -> Vec<C64> {
    let n = g.len();
    (0..n).map(|j| g[j] - g[(j + n - 1) % n]).collect()
}

/// Vertical and horizontal periodic differences of a row-major `n x n` grid:
/// `(D1 x)_{j,k} = x_{j+1,k} - x_{j,k}` and `(D2 x)_{j,k} = x_{j,k+1} - x_{j,k}`.
fn parts(n: usize, x: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let mut d1 = vec![C64::new(0.0, 0.0); n * n];
    let mut d2 = vec![C64::new(0.0, 0.0); n * n];
    for r in 0..n {
        let rn = (r + 1) % n;
        for c in 0..n {
            let cn = (c + 1) % n;
            let v = x[r * n + c];
            d1[r * n + c] = x[rn * n + c] - v;
            d2[r * n + c] = x[r * n + cn] - v;
        }
    }
    (d1, d2)
}

/// `D x = D1 x + i D2 x` on a row-major `n x n` grid.
pub fn grad2(n: usize, x: &[C64]) -> Vec<C64> {
    let (d1, d2) = parts(n, x);
    d1.iter().zip(&d2).map(|(a, b)| a + C64::i() * b).collect()
}

/// Adjoint of [`grad2`]: `D^* g = D1^* g - i D2^* g`.
pub fn grad2_adj(n: usize, g: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for r in 0..n {
        let rp = (r + n - 1) % n;
        for c in 0..n {
            let cp = (c + n - 1) % n;
            let v = g[r * n + c];
            let d1a = g[rp * n + c] - v;
            let d2a = g[r * n + cp] - v;
            out[r * n + c] = d1a - C64::i() * d2a;
        }
    }
    out
}

/// Fourier multiplier of the 1D gradient: `(A D z)_k = v_k (A z)_k` with
/// `v_k = 1 - exp(-2 pi i k / N)`.
pub fn gradient_multiplier(n: usize, k: i64) -> C64 {
    C64::new(1.0, 0.0) - C64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)
}

pub fn gradient_1d(x: &Signal1D) -> Signal1D {
    Signal1D::new(grad1(x.values())).expect("length preserved")
}

pub fn adjoint_gradient_1d(g: &Signal1D) -> Signal1D {
    Signal1D::new(grad1_adj(g.values())).expect("length preserved")
}

/// Complex gradient field `D1 x + i D2 x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField2D {
    n: usize,
    values: Vec<C64>,
}

impl GradientField2D {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.values[r * self.n + c]
    }
}

pub fn gradient_2d(x: &Signal2D) -> GradientField2D {
    GradientField2D {
        n: x.n(),
        values: grad2(x.n(), x.values()),
    }
}

/// The two real-direction components `(D1 x, D2 x)` separately.
pub fn gradient_2d_parts(x: &Signal2D) -> (Signal2D, Signal2D) {
    let (d1, d2) = parts(x.n(), x.values());
    (
        Signal2D::new(x.n(), d1).expect("shape preserved"),
        Signal2D::new(x.n(), d2).expect("shape preserved"),
    )
}

pub fn adjoint_gradient_2d(g: &GradientField2D) -> Signal2D {
    Signal2D::new(g.n, grad2_adj(g.n, &g.values)).expect("shape preserved")
}

/// `||D x||_1` with the periodic 1D gradient.
pub fn tv_norm_1d(x: &Signal1D) -> f64 {
    l1_norm(&grad1(x.values()))
}

/// `||D1 x + i D2 x||_1`; for real grids this is the isotropic TV.
pub fn tv_norm_2d(x: &Signal2D) -> f64 {
    l1_norm(&grad2(x.n(), x.values()))
}
