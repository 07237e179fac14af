//! Coherence, restricted isometry checks and the sampling conditions used
//! for uniform random sampling.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use super::certificate::{certificate_weights, DualCertificate};
use super::SupportSet;
use crate::error::{Error, Result};
use crate::sampling::{Indices, SamplingMask};
use crate::transforms::{haar_inverse_in_place, Dft1, C64};

/// `max_j |<psi_k, H_j>|` for every frequency, ascending from
/// `-floor(N/2)+1`, where `psi_k = N^{-1/2} (e^{2 pi i k j / N})_j` and `H_j`
/// runs over the orthonormal Haar basis.
pub fn fourier_haar_coherence(n: usize) -> Result<Vec<f64>> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::NotPowerOfTwo(n));
    }
    let dft = Dft1::new(n);
    let mut best = vec![0.0f64; n];
    let scale = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        let mut h = vec![C64::new(0.0, 0.0); n];
        h[j] = C64::new(1.0, 0.0);
        haar_inverse_in_place(&mut h)?;
        // <psi_k, H> = N^{-1/2} (A H)_k for real H
        dft.apply(&mut h);
        for (b, v) in best.iter_mut().zip(&h) {
            *b = b.max(v.norm() * scale);
        }
    }
    let lo = crate::transforms::min_frequency(n);
    Ok((0..n)
        .map(|i| best[crate::transforms::frequency_position(n, lo + i as i64)])
        .collect())
}

pub const MAX_RIP_COLUMNS: usize = 24;
pub const MAX_RIP_ORDER: usize = 4;

/// Extreme eigenvalues of `U_S* U_S` over the enumerated supports.
#[derive(Debug, Clone, PartialEq)]
pub struct RipReport {
    pub order: usize,
    pub delta: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub worst_support: Vec<usize>,
    pub holds: bool,
    pub supports_checked: usize,
}

impl RipReport {
    /// `max_eig / min_eig`; infinite when some support is rank deficient.
    pub fn ratio(&self) -> f64 {
        if self.min_eigenvalue <= 0.0 {
            f64::INFINITY
        } else {
            self.max_eigenvalue / self.min_eigenvalue
        }
    }

    /// `max(|lambda - 1|)` over all supports.
    pub fn worst_deviation(&self) -> f64 {
        (1.0 - self.min_eigenvalue).max(self.max_eigenvalue - 1.0)
    }
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Extreme eigenvalues of the Gram matrix restricted to each support.
fn scan_supports(
    gram: &DMatrix<C64>,
    supports: impl IntoIterator<Item = Vec<usize>>,
    delta: f64,
    order: usize,
) -> RipReport {
    let mut report = RipReport {
        order,
        delta,
        min_eigenvalue: f64::INFINITY,
        max_eigenvalue: f64::NEG_INFINITY,
        worst_support: Vec::new(),
        holds: true,
        supports_checked: 0,
    };
    let mut worst = f64::NEG_INFINITY;
    for support in supports {
        let sub = DMatrix::from_fn(support.len(), support.len(), |a, b| {
            gram[(support[a], support[b])]
        });
        let eig = sub.symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        report.min_eigenvalue = report.min_eigenvalue.min(lo);
        report.max_eigenvalue = report.max_eigenvalue.max(hi);
        let dev = (1.0 - lo).max(hi - 1.0);
        if dev > worst {
            worst = dev;
            report.worst_support = support;
        }
        report.supports_checked += 1;
    }
    report.holds = report.min_eigenvalue >= 1.0 - delta && report.max_eigenvalue <= 1.0 + delta;
    report
}

/// Exhaustive check of `(1 - delta)|z|^2 <= |U z|^2 <= (1 + delta)|z|^2` over
/// all `order`-sparse supports. Columns of supports of smaller size are
/// covered by eigenvalue interlacing.
pub fn rip_check(u: &DMatrix<C64>, order: usize, delta: f64) -> Result<RipReport> {
    let cols = u.ncols();
    if cols > MAX_RIP_COLUMNS || order > MAX_RIP_ORDER || order == 0 || order > cols {
        return Err(Error::InvalidSize(format!(
            "exhaustive RIP check needs 1 <= s <= min({MAX_RIP_ORDER}, columns) and at most {MAX_RIP_COLUMNS} columns (got {cols} columns, s = {order})"
        )));
    }
    let gram = u.adjoint() * u;
    let mut supports = Vec::new();
    combinations(cols, order, |c| supports.push(c.to_vec()));
    Ok(scan_supports(&gram, supports, delta, order))
}

/// One labelled check: `value <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionEntry {
    pub label: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn push(&mut self, label: &str, value: f64, threshold: f64) {
        self.entries.push(ConditionEntry {
            label: label.to_string(),
            value,
            threshold,
            pass: value.is_finite() && value <= threshold,
        });
    }

    pub fn get(&self, label: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{} {:.6e} {:.6e} {}",
                e.label,
                e.value,
                e.threshold,
                if e.pass { "PASS" } else { "FAIL" }
            )?;
        }
        for n in &self.notes {
            writeln!(f, "# {n}")?;
        }
        Ok(())
    }
}

/// Largest `N` for which the weak RIP part is enumerated.
pub const MAX_WEAK_RIP_N: usize = 32;

/// Sampling conditions for `U = A` with rows `Γ` (the mask, repeats kept) and
/// columns `Λ = Δ`, using `U_{Γ,Λ} = m^{-1/2} P_Γ A P_Λ` with `m` the row count:
///
/// * `(i)`   `||(U_{Γ,Λ}* U_{Γ,Λ})^{-1}|| <= 2`
/// * `(ii)`  `m^{-1/2} max_{i not in Λ} ||U_{Γ,Λ}* P_Γ A e_i|| <= 1`
/// * `(iii)`-`(v)` from a supplied Fejér certificate: off-support `|ρ|`,
///   on-support interpolation error and `||w||` against `c2 sqrt(s/m)`
/// * `(vi)`  weak RIP of `m^{-1/2} P_Γ A` on supports `Δ ∪ T`, `|T| <= r`,
///   with `delta = 1/4`, enumerated when `N` is small
pub fn candes_plan_conditions(
    mask: &SamplingMask,
    support: &SupportSet,
    r: usize,
    certificate: Option<&DualCertificate>,
) -> Result<ConditionReport> {
    let Indices::D1(rows) = mask.indices() else {
        return Err(Error::InvalidParameter(
            "sampling conditions are computed for 1D masks".into(),
        ));
    };
    let n = support.n();
    if mask.n() != n {
        return Err(Error::mismatch(n, mask.n()));
    }
    let m = rows.len() as f64;
    // Gram matrix G = A* P_Γ A restricted as needed; G_{a,b} = sum_l e^{2 pi i l (b - a)/N}
    let gram_entry = |a: usize, b: usize| -> C64 {
        rows.iter()
            .map(|&l| C64::from_polar(1.0, 2.0 * PI * l as f64 * (b as f64 - a as f64) / n as f64))
            .sum()
    };
    let t = support.indices();
    let s = t.len();
    let mut report = ConditionReport::default();

    let local = DMatrix::from_fn(s, s, |a, b| gram_entry(t[a], t[b]) / m);
    let smallest = super::smallest_singular_value(&local);
    let cond_i = if smallest > 0.0 {
        1.0 / smallest
    } else {
        f64::INFINITY
    };
    report.push("(i)", cond_i, 2.0);

    let mut cond_ii = 0.0f64;
    for i in (1..=n).filter(|i| !support.contains(*i)) {
        let col: f64 = t
            .iter()
            .map(|&a| gram_entry(a, i).norm_sqr())
            .sum::<f64>()
            .sqrt();
        cond_ii = cond_ii.max(col / m);
    }
    report.push("(ii)", cond_ii, 1.0);

    match certificate {
        Some(cert) => {
            if cert.support != *support {
                return Err(Error::InvalidParameter(
                    "certificate was built for a different support".into(),
                ));
            }
            let weights = certificate_weights(cert);
            report.push(
                "(iii)",
                cert.diagnostics.max_off_support,
                stability_threshold(cert.band, n),
            );
            let on: f64 = t
                .iter()
                .zip(&cert.signs)
                .map(|(&tk, sign)| (cert.evaluate(tk as f64).0 - sign).norm_sqr())
                .sum::<f64>()
                .sqrt();
            report.push("(iv)", on, 1e-8);
            report.push("(v)", weights.norm, weights.bound);
            report.notes.push(
                "(iii)-(v) use the supplied Fejér certificate; (iv) threshold is numerical zero"
                    .into(),
            );
        }
        None => report
            .notes
            .push("(iii)-(v) skipped: no certificate supplied".into()),
    }

    if n <= MAX_WEAK_RIP_N && r >= 1 {
        let gram = DMatrix::from_fn(n, n, |a, b| gram_entry(a + 1, b + 1) / m);
        let base: Vec<usize> = t.iter().map(|&x| x - 1).collect();
        let rest: Vec<usize> = (0..n).filter(|i| !base.contains(i)).collect();
        let take = r.min(rest.len());
        let mut supports = Vec::new();
        combinations(rest.len(), take, |c| {
            let mut sup = base.clone();
            sup.extend(c.iter().map(|&i| rest[i]));
            sup.sort_unstable();
            supports.push(sup);
        });
        let weak = scan_supports(&gram, supports, 0.25, s + take);
        report.push("(vi)", weak.worst_deviation(), 0.25);
        report.notes.push(format!(
            "(vi) enumerated {} supports of size {}",
            weak.supports_checked,
            s + take
        ));
    } else {
        report.notes.push(format!(
            "(vi) skipped: enumeration limited to N <= {MAX_WEAK_RIP_N}"
        ));
    }
    Ok(report)
}

/// `max{1 - 0.92 (M^2 - 1)/N^2, 0.99993}`.
pub fn stability_threshold(band: usize, n: usize) -> f64 {
    let m = band as f64;
    (1.0 - 0.92 * (m * m - 1.0) / (n * n) as f64).max(0.99993)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{uniform_mask, SamplingScheme};
    use crate::transforms::Signal1D;

    #[test]
    fn coherence_two_point() {
        // H = {(1,1)/sqrt2, (1,-1)/sqrt2}; psi_0 = (1,1)/sqrt2, psi_1 = (-1, 1)/sqrt2
        let c = fourier_haar_coherence(2).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-15);
        assert!((c[1] - 1.0).abs() < 1e-15);
        assert!(fourier_haar_coherence(12).is_err());
    }

    #[test]
    fn coherence_matches_dense_inner_products() {
        let n = 16;
        let fast = fourier_haar_coherence(n).unwrap();
        let basis: Vec<Vec<C64>> = (0..n)
            .map(|j| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                crate::transforms::inverse_haar_1d(&Signal1D::new(e).unwrap())
                    .unwrap()
                    .into_values()
            })
            .collect();
        for (i, k) in crate::transforms::frequencies(n).enumerate() {
            let best = basis
                .iter()
                .map(|h| {
                    h.iter()
                        .enumerate()
                        .map(|(t, v)| {
                            C64::from_polar(1.0, 2.0 * PI * k as f64 * (t + 1) as f64 / n as f64)
                                * v.conj()
                        })
                        .sum::<C64>()
                        .norm()
                        / (n as f64).sqrt()
                })
                .fold(0.0, f64::max);
            assert!((best - fast[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rip_identity_and_duplicate_column() {
        let eye = DMatrix::<C64>::identity(10, 10);
        let r = rip_check(&eye, 3, 0.01).unwrap();
        assert!(r.holds && (r.ratio() - 1.0).abs() < 1e-12);
        let mut dup = DMatrix::<C64>::identity(6, 6);
        dup.set_column(1, &dup.column(0).clone_owned());
        let r = rip_check(&dup, 2, 0.99).unwrap();
        assert!(!r.holds);
        assert!(r.min_eigenvalue.abs() < 1e-12);
        assert!(rip_check(&DMatrix::<C64>::identity(30, 30), 2, 0.1).is_err());
        assert!(rip_check(&eye, 5, 0.1).is_err());
    }

    #[test]
    fn combinations_count() {
        let mut count = 0;
        combinations(24, 4, |_| count += 1);
        assert_eq!(count, 10626);
    }

    #[test]
    fn full_sampling_condition_values() {
        let mask = uniform_mask(64, 64, 0).unwrap();
        let support = SupportSet::new(64, vec![3, 17, 40]).unwrap();
        let report = candes_plan_conditions(&mask, &support, 0, None).unwrap();
        assert!((report.get("(i)").unwrap().value - 1.0).abs() < 1e-10);
        assert!(report.get("(ii)").unwrap().value < 1e-10);
        assert!(report.all_pass());
        assert_eq!(*mask.scheme(), SamplingScheme::Uniform);
    }
}
