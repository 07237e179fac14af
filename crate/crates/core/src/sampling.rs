//! Frequency sampling schemes and simulated measurements.
//!
//! A [`SamplingMask`] is a multiset of signed frequency indices. Schemes that
//! draw without replacement (uniform, low-frequency band) produce sets; the
//! i.i.d. schemes (power law, multilevel) keep repeated draws, which become
//! repeated measurement rows.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{derive_u64, stream, StreamRng};
use crate::transforms::{
    frequency_in_range, frequency_position, max_frequency, min_frequency, Signal, C64,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SamplingScheme {
    Uniform,
    PowerLaw1D,
    PowerLaw2D,
    /// Uniform draws from the band `{-2M, ..., 2M}`.
    LowFrequency {
        band: usize,
    },
    /// Full low-frequency block plus i.i.d. draws with level weights
    /// `exp(-(b l / L)^a)`.
    Multilevel {
        levels: usize,
        a: f64,
        b: f64,
        radius: usize,
    },
    /// Each index of `{-2M, ..., 2M}` kept independently with probability `q`.
    Bernoulli {
        q: f64,
        band: usize,
    },
    Union(Vec<SamplingScheme>),
}

impl SamplingScheme {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            SamplingScheme::LowFrequency { band } if *band < 1 => bad("band M must be >= 1".into()),
            SamplingScheme::Multilevel { levels, a, b, .. } => {
                if *levels < 1 {
                    bad("levels must be >= 1".into())
                } else if !(*a > 0.0 && *b > 0.0) {
                    bad(format!(
                        "multilevel exponents must be positive (a={a}, b={b})"
                    ))
                } else {
                    Ok(())
                }
            }
            SamplingScheme::Bernoulli { q, band } => {
                if !(*q > 0.0 && *q <= 1.0) {
                    bad(format!("q must lie in (0, 1], got {q}"))
                } else if *band < 1 {
                    bad("band M must be >= 1".into())
                } else {
                    Ok(())
                }
            }
            SamplingScheme::Union(parts) => {
                if parts.is_empty() {
                    return bad("union of no schemes".into());
                }
                parts.iter().try_for_each(|p| p.validate())
            }
            _ => Ok(()),
        }
    }

    /// Whether masks from this scheme always contain the zero frequency.
    pub fn includes_zero(&self) -> bool {
        match self {
            SamplingScheme::Uniform
            | SamplingScheme::LowFrequency { .. }
            | SamplingScheme::Multilevel { .. } => true,
            SamplingScheme::Union(parts) => parts.iter().any(|p| p.includes_zero()),
            _ => false,
        }
    }
}

impl fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingScheme::Uniform => write!(f, "uniform"),
            SamplingScheme::PowerLaw1D => write!(f, "powerlaw1d"),
            SamplingScheme::PowerLaw2D => write!(f, "powerlaw2d"),
            SamplingScheme::LowFrequency { band } => write!(f, "lowfreq(M={band})"),
            SamplingScheme::Multilevel {
                levels,
                a,
                b,
                radius,
            } => {
                write!(f, "multilevel(L={levels};a={a};b={b};r={radius})")
            }
            SamplingScheme::Bernoulli { q, band } => write!(f, "bernoulli(q={q};M={band})"),
            SamplingScheme::Union(parts) => {
                write!(f, "union(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn scheme_params(body: &str) -> Result<Vec<(&str, &str)>> {
    body.split(';')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::InvalidParameter(format!("bad scheme parameter '{kv}'")))
        })
        .collect()
}

fn param<T: FromStr>(params: &[(&str, &str)], key: &str) -> Result<Option<T>> {
    match params.iter().find(|(k, _)| *k == key) {
        None => Ok(None),
        Some((_, v)) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParameter(format!("bad value '{v}' for {key}"))),
    }
}

fn required<T: FromStr>(params: &[(&str, &str)], key: &str) -> Result<T> {
    param(params, key)?.ok_or_else(|| Error::InvalidParameter(format!("missing parameter {key}")))
}

impl FromStr for SamplingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, body) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => {
                return Err(Error::InvalidParameter(format!(
                    "unbalanced scheme tag '{s}'"
                )))
            }
            None => (s, None),
        };
        let params = match (name, body) {
            ("union", _) | (_, None) => Vec::new(),
            (_, Some(b)) => scheme_params(b)?,
        };
        let scheme = match name {
            "uniform" => SamplingScheme::Uniform,
            "powerlaw1d" => SamplingScheme::PowerLaw1D,
            "powerlaw2d" => SamplingScheme::PowerLaw2D,
            "lowfreq" => SamplingScheme::LowFrequency {
                band: required(&params, "M")?,
            },
            "multilevel" => SamplingScheme::Multilevel {
                levels: param(&params, "L")?.unwrap_or(25),
                a: param(&params, "a")?.unwrap_or(2.2),
                b: param(&params, "b")?.unwrap_or(6.5),
                radius: param(&params, "r")?.unwrap_or(5),
            },
            "bernoulli" => SamplingScheme::Bernoulli {
                q: required(&params, "q")?,
                band: required(&params, "M")?,
            },
            "union" => {
                let body =
                    body.ok_or_else(|| Error::InvalidParameter("union needs parts".into()))?;
                SamplingScheme::Union(
                    split_top_level(body, '|')
                        .into_iter()
                        .map(str::parse)
                        .collect::<Result<_>>()?,
                )
            }
            other => return Err(Error::InvalidParameter(format!("unknown scheme '{other}'"))),
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// Drawn frequency indices, in draw order, duplicates kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Indices {
    D1(Vec<i64>),
    D2(Vec<(i64, i64)>),
}

impl Indices {
    pub fn len(&self) -> usize {
        match self {
            Indices::D1(v) => v.len(),
            Indices::D2(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Indices::D1(_) => 1,
            Indices::D2(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    n: usize,
    indices: Indices,
    m: usize,
    includes_zero: bool,
    scheme: SamplingScheme,
    seed: u64,
}

impl SamplingMask {
    /// Assembles a mask, checking that every index is in range and that the
    /// zero frequency is present when `includes_zero` is set.
    pub fn new(
        n: usize,
        indices: Indices,
        m: usize,
        includes_zero: bool,
        scheme: SamplingScheme,
        seed: u64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("N = {n} is below 2")));
        }
        let in_range = match &indices {
            Indices::D1(v) => v.iter().all(|&k| frequency_in_range(n, k)),
            Indices::D2(v) => v
                .iter()
                .all(|&(a, b)| frequency_in_range(n, a) && frequency_in_range(n, b)),
        };
        if !in_range {
            return Err(Error::InvalidParameter(format!(
                "mask index outside the spectrum range of N = {n}"
            )));
        }
        let has_zero = match &indices {
            Indices::D1(v) => v.contains(&0),
            Indices::D2(v) => v.contains(&(0, 0)),
        };
        if includes_zero && !has_zero {
            return Err(Error::InvalidParameter(
                "mask flagged as containing 0 but it does not".into(),
            ));
        }
        Ok(SamplingMask {
            n,
            indices,
            m,
            includes_zero,
            scheme,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.indices.dim()
    }

    pub fn indices(&self) -> &Indices {
        &self.indices
    }

    /// Declared draw count `m` used in the noise radius `sqrt(m) * delta`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of measurement rows, counting multiplicity.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn includes_zero(&self) -> bool {
        self.includes_zero
    }

    pub fn scheme(&self) -> &SamplingScheme {
        &self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Storage positions of the rows in the flattened spectrum, with repeats.
    pub fn positions(&self) -> Vec<usize> {
        let n = self.n;
        match &self.indices {
            Indices::D1(v) => v.iter().map(|&k| frequency_position(n, k)).collect(),
            Indices::D2(v) => v
                .iter()
                .map(|&(a, b)| frequency_position(n, a) * n + frequency_position(n, b))
                .collect(),
        }
    }

    /// Row count per storage position (length `N` or `N^2`).
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.n.pow(self.dim() as u32)];
        for p in self.positions() {
            counts[p] += 1;
        }
        counts
    }

    /// Deduplicated storage positions, ascending.
    pub fn distinct_positions(&self) -> Vec<usize> {
        let mut p = self.positions();
        p.sort_unstable();
        p.dedup();
        p
    }

    pub fn distinct_count(&self) -> usize {
        self.distinct_positions().len()
    }
}

fn check_m(m: usize, available: usize) -> Result<()> {
    if m > available {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {m} distinct indices from {available}"
        )));
    }
    Ok(())
}

fn grid_index(n: usize, i: usize) -> (i64, i64) {
    let lo = min_frequency(n);
    (lo + (i / n) as i64, lo + (i % n) as i64)
}

fn insert_sorted<T: Ord + Copy>(v: &mut Vec<T>, x: T) {
    if let Err(i) = v.binary_search(&x) {
        v.insert(i, x);
    }
}

/// `m` distinct frequencies drawn uniformly without replacement, then 0
/// adjoined. Indices are listed in ascending order.
pub fn uniform_mask(n: usize, m: usize, seed: u64) -> Result<SamplingMask> {
    check_m(m, n)?;
    let mut rng = stream(seed, "uniform", 0);
    let lo = min_frequency(n);
    let mut ks: Vec<i64> = rand::seq::index::sample(&mut rng, n, m)
        .into_iter()
        .map(|i| lo + i as i64)
        .collect();
    ks.sort_unstable();
    insert_sorted(&mut ks, 0);
    SamplingMask::new(n, Indices::D1(ks), m, true, SamplingScheme::Uniform, seed)
}

/// 2D analogue of [`uniform_mask`] over the `N x N` frequency grid.
pub fn uniform_mask_2d(n: usize, m: usize, seed: u64) -> Result<SamplingMask> {
    check_m(m, n * n)?;
    let mut rng = stream(seed, "uniform2d", 0);
    let mut ks: Vec<(i64, i64)> = rand::seq::index::sample(&mut rng, n * n, m)
        .into_iter()
        .map(|i| grid_index(n, i))
        .collect();
    ks.sort_unstable();
    insert_sorted(&mut ks, (0, 0));
    SamplingMask::new(n, Indices::D2(ks), m, true, SamplingScheme::Uniform, seed)
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Probabilities `p(k) ∝ 1 / max(1, |k|)` over the ascending frequency range.
pub fn power_law_pmf_1d(n: usize) -> Vec<f64> {
    normalize(
        (min_frequency(n)..=max_frequency(n))
            .map(|k| 1.0 / (k.abs().max(1) as f64))
            .collect(),
    )
}

/// Probabilities `p(k1, k2) ∝ 1 / max(1, k1^2 + k2^2)`, row-major over the
/// ascending frequency grid.
pub fn power_law_pmf_2d(n: usize) -> Vec<f64> {
    normalize(
        (0..n * n)
            .map(|i| {
                let (a, b) = grid_index(n, i);
                1.0 / ((a * a + b * b).max(1) as f64)
            })
            .collect(),
    )
}

fn iid_draws(rng: &mut StreamRng, pmf: &[f64], m: usize) -> Vec<usize> {
    let dist = WeightedIndex::new(pmf).expect("probabilities are positive and finite");
    (0..m).map(|_| dist.sample(rng)).collect()
}

pub fn power_law_mask_1d(n: usize, m: usize, seed: u64) -> Result<SamplingMask> {
    if n < 4 || m < 1 {
        return Err(Error::InvalidParameter(format!(
            "power law needs N >= 4 and m >= 1 (N={n}, m={m})"
        )));
    }
    let mut rng = stream(seed, "powerlaw1d", 0);
    let lo = min_frequency(n);
    let ks = iid_draws(&mut rng, &power_law_pmf_1d(n), m)
        .into_iter()
        .map(|i| lo + i as i64)
        .collect();
    SamplingMask::new(
        n,
        Indices::D1(ks),
        m,
        false,
        SamplingScheme::PowerLaw1D,
        seed,
    )
}

pub fn power_law_mask_2d(n: usize, m: usize, seed: u64) -> Result<SamplingMask> {
    if n < 4 || m < 1 {
        return Err(Error::InvalidParameter(format!(
            "power law needs N >= 4 and m >= 1 (N={n}, m={m})"
        )));
    }
    let mut rng = stream(seed, "powerlaw2d", 0);
    let ks = iid_draws(&mut rng, &power_law_pmf_2d(n), m)
        .into_iter()
        .map(|i| grid_index(n, i))
        .collect();
    SamplingMask::new(
        n,
        Indices::D2(ks),
        m,
        false,
        SamplingScheme::PowerLaw2D,
        seed,
    )
}

fn check_band(n: usize, band: usize) -> Result<()> {
    let edge = 2 * band as i64;
    if band < 1 || -edge < min_frequency(n) || edge > max_frequency(n) {
        return Err(Error::InvalidParameter(format!(
            "band {{-{edge}, ..., {edge}}} does not fit the spectrum of N = {n}"
        )));
    }
    Ok(())
}

/// `m` distinct draws from `{-2M, ..., 2M}` plus 0; `m = 4M + 1` gives the
/// whole band.
pub fn low_frequency_mask(n: usize, band: usize, m: usize, seed: u64) -> Result<SamplingMask> {
    check_band(n, band)?;
    let width = 4 * band + 1;
    check_m(m, width)?;
    let mut rng = stream(seed, "lowfreq", 0);
    let lo = -2 * band as i64;
    let mut ks: Vec<i64> = rand::seq::index::sample(&mut rng, width, m)
        .into_iter()
        .map(|i| lo + i as i64)
        .collect();
    ks.sort_unstable();
    insert_sorted(&mut ks, 0);
    SamplingMask::new(
        n,
        Indices::D1(ks),
        m,
        true,
        SamplingScheme::LowFrequency { band },
        seed,
    )
}

/// Weight `exp(-(b l / L)^a)` of level `l`.
pub fn level_weight(levels: usize, a: f64, b: f64, level: usize) -> f64 {
    (-(b * level as f64 / levels as f64).powf(a)).exp()
}

/// Level of frequency `(k1, k2)`: the spectrum is cut into `levels` annuli of
/// equal radial width by Euclidean magnitude, numbered from 1 at the centre.
pub fn level_of(n: usize, levels: usize, k1: i64, k2: i64) -> usize {
    let r_max = std::f64::consts::SQRT_2 * (n / 2).max(1) as f64;
    let width = r_max / levels as f64;
    let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
    ((r / width).ceil() as usize).clamp(1, levels)
}

/// Per-index draw probabilities of the multilevel scheme, row-major over the
/// ascending frequency grid.
pub fn multilevel_pmf(n: usize, levels: usize, a: f64, b: f64) -> Vec<f64> {
    let weights: Vec<f64> = (1..=levels)
        .map(|l| level_weight(levels, a, b, l))
        .collect();
    normalize(
        (0..n * n)
            .map(|i| {
                let (k1, k2) = grid_index(n, i);
                weights[level_of(n, levels, k1, k2) - 1]
            })
            .collect(),
    )
}

/// Every index with `max(|k1|, |k2|) <= radius`, followed by `m` i.i.d. draws
/// from [`multilevel_pmf`].
pub fn multilevel_mask(
    n: usize,
    m: usize,
    levels: usize,
    a: f64,
    b: f64,
    radius: usize,
    seed: u64,
) -> Result<SamplingMask> {
    let scheme = SamplingScheme::Multilevel {
        levels,
        a,
        b,
        radius,
    };
    scheme.validate()?;
    let r = radius as i64;
    let mut ks: Vec<(i64, i64)> = (-r..=r)
        .flat_map(|a| (-r..=r).map(move |b| (a, b)))
        .filter(|&(a, b)| frequency_in_range(n, a) && frequency_in_range(n, b))
        .collect();
    let mut rng = stream(seed, "multilevel", 0);
    ks.extend(
        iid_draws(&mut rng, &multilevel_pmf(n, levels, a, b), m)
            .into_iter()
            .map(|i| grid_index(n, i)),
    );
    SamplingMask::new(n, Indices::D2(ks), m, true, scheme, seed)
}

/// Each index of `{-2M, ..., 2M}` kept independently with probability `q`.
/// The declared `m` is the number of kept indices.
pub fn bernoulli_mask(n: usize, band: usize, q: f64, seed: u64) -> Result<SamplingMask> {
    let scheme = SamplingScheme::Bernoulli { q, band };
    scheme.validate()?;
    check_band(n, band)?;
    let mut rng = stream(seed, "bernoulli", 0);
    let edge = 2 * band as i64;
    let ks: Vec<i64> = (-edge..=edge).filter(|_| rng.random_bool(q)).collect();
    let m = ks.len();
    SamplingMask::new(n, Indices::D1(ks), m, false, scheme, seed)
}

/// Multiset union; the declared `m` is the sum of the parts.
pub fn union_mask(parts: &[SamplingMask], seed: u64) -> Result<SamplingMask> {
    let first = parts.first().ok_or(Error::EmptyMask)?;
    let n = first.n();
    let mut indices = first.indices().clone();
    for p in &parts[1..] {
        if p.n() != n || p.dim() != first.dim() {
            return Err(Error::mismatch(
                format!("dim={} n={n}", first.dim()),
                format!("dim={} n={}", p.dim(), p.n()),
            ));
        }
        match (&mut indices, p.indices()) {
            (Indices::D1(a), Indices::D1(b)) => a.extend_from_slice(b),
            (Indices::D2(a), Indices::D2(b)) => a.extend_from_slice(b),
            _ => unreachable!("dimensions checked above"),
        }
    }
    let scheme = SamplingScheme::Union(parts.iter().map(|p| p.scheme().clone()).collect());
    let m = parts.iter().map(|p| p.m()).sum();
    let zero = parts.iter().any(|p| p.includes_zero());
    SamplingMask::new(n, indices, m, zero, scheme, seed)
}

/// Draws a mask for any scheme. `m` is the per-scheme draw count (ignored by
/// Bernoulli); each part of a union gets `m` draws from its own sub-seed.
pub fn generate(
    scheme: &SamplingScheme,
    dim: usize,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<SamplingMask> {
    scheme.validate()?;
    let need = |d: usize| {
        if d == dim {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "scheme {scheme} is {d}-dimensional, requested dim={dim}"
            )))
        }
    };
    match scheme {
        SamplingScheme::Uniform => match dim {
            1 => uniform_mask(n, m, seed),
            2 => uniform_mask_2d(n, m, seed),
            d => Err(Error::InvalidParameter(format!(
                "unsupported dimension {d}"
            ))),
        },
        SamplingScheme::PowerLaw1D => need(1).and_then(|_| power_law_mask_1d(n, m, seed)),
        SamplingScheme::PowerLaw2D => need(2).and_then(|_| power_law_mask_2d(n, m, seed)),
        SamplingScheme::LowFrequency { band } => {
            need(1).and_then(|_| low_frequency_mask(n, *band, m, seed))
        }
        SamplingScheme::Multilevel {
            levels,
            a,
            b,
            radius,
        } => need(2).and_then(|_| multilevel_mask(n, m, *levels, *a, *b, *radius, seed)),
        SamplingScheme::Bernoulli { q, band } => {
            need(1).and_then(|_| bernoulli_mask(n, *band, *q, seed))
        }
        SamplingScheme::Union(parts) => {
            let masks = parts
                .iter()
                .enumerate()
                .map(|(i, p)| generate(p, dim, n, m, derive_u64(seed, "union", i as u64)))
                .collect::<Result<Vec<_>>>()?;
            union_mask(&masks, seed)
        }
    }
}

/// Observed Fourier samples `y` on a mask, with noise level `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    mask: SamplingMask,
    y: Vec<C64>,
    delta: f64,
}

impl MeasurementSet {
    pub fn new(mask: SamplingMask, y: Vec<C64>, delta: f64) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        if y.len() != mask.len() {
            return Err(Error::mismatch(mask.len(), y.len()));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be a finite nonnegative number, got {delta}"
            )));
        }
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "measurements contain non-finite values".into(),
            ));
        }
        Ok(MeasurementSet { mask, y, delta })
    }

    pub fn mask(&self) -> &SamplingMask {
        &self.mask
    }

    pub fn y(&self) -> &[C64] {
        &self.y
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Radius `sqrt(m) * delta` of the feasible data ball.
    pub fn noise_radius(&self) -> f64 {
        (self.mask.m() as f64).sqrt() * self.delta
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        MeasurementSet::new(self.mask.clone(), self.y.clone(), delta)
    }
}

/// Samples `P_Ω A x` on the mask and adds complex Gaussian noise rescaled to
/// norm exactly `sqrt(m) * delta`.
pub fn measure(x: &Signal, mask: &SamplingMask, delta: f64, seed: u64) -> Result<MeasurementSet> {
    if x.dim() != mask.dim() || x.n() != mask.n() {
        return Err(Error::mismatch(
            format!("dim={} n={}", mask.dim(), mask.n()),
            format!("dim={} n={}", x.dim(), x.n()),
        ));
    }
    let spectrum = x.spectrum();
    let mut y: Vec<C64> = mask.positions().iter().map(|&p| spectrum[p]).collect();
    let radius = (mask.m() as f64).sqrt() * delta;
    if radius > 0.0 {
        let mut rng = stream(seed, "noise", 0);
        let eta: Vec<C64> = (0..y.len())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let scale = radius / crate::transforms::l2_norm(&eta);
        y.iter_mut().zip(&eta).for_each(|(v, e)| *v += e * scale);
    }
    MeasurementSet::new(mask.clone(), y, delta)
}
