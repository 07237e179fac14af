//! Plain-text file formats for signals, spectra, masks, measurements,
//! configuration and reconstruction metrics.
//!
//! Every file is UTF-8 with a single header line of `key=value` fields
//! followed by one record per line. Floats are written in Rust's shortest
//! round-trip form, so reading back a written file is lossless.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sampling::{Indices, MeasurementSet, SamplingMask, SamplingScheme};
use crate::solver::{ReconResult, SolverConfig};
use crate::transforms::{frequencies, frequency_position, Signal, Signal1D, Signal2D, C64};

const SIGNAL_MAGIC: &str = "gradcs-signal";
const MASK_MAGIC: &str = "gradcs-mask";
const MEAS_MAGIC: &str = "gradcs-meas";
const VERSION: &str = "v1";

/// Header fields after the magic word and version.
#[derive(Debug, Clone, Default, PartialEq)]
struct Header {
    fields: BTreeMap<String, String>,
}

impl Header {
    fn parse(line: &str, magic: &str) -> Result<Header> {
        let mut words = line.split_whitespace();
        if words.next() != Some(magic) {
            return Err(Error::parse(1, format!("expected '{magic}' header")));
        }
        if words.next() != Some(VERSION) {
            return Err(Error::parse(
                1,
                format!("unsupported version, expected {VERSION}"),
            ));
        }
        let mut fields = BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("header field '{w}' is not key=value")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        Ok(Header { fields })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .fields
            .get(key)
            .ok_or_else(|| Error::parse(1, format!("header lacks '{key}'")))?;
        raw.parse()
            .map_err(|_| Error::parse(1, format!("bad value '{raw}' for '{key}'")))
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.fields.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }
}

fn split_header(text: &str) -> Result<(&str, impl Iterator<Item = (usize, &str)>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    Ok((header, lines.filter(|(_, l)| !l.is_empty())))
}

fn parse_num<T: FromStr>(line: usize, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("cannot parse '{}'", raw.trim())))
}

fn parse_fields<const K: usize>(line: usize, text: &str) -> Result<[&str; K]> {
    let parts: Vec<&str> = text.split(',').collect();
    parts
        .try_into()
        .map_err(|_| Error::parse(line, format!("expected {K} comma-separated fields")))
}

fn parse_complex(line: usize, re: &str, im: &str) -> Result<C64> {
    Ok(C64::new(parse_num(line, re)?, parse_num(line, im)?))
}

fn push_complex(out: &mut String, v: C64) {
    let _ = writeln!(out, "{},{}", v.re, v.im);
}

pub fn format_signal(x: &Signal) -> String {
    let mut out = format!("{SIGNAL_MAGIC} {VERSION} dim={} n={}\n", x.dim(), x.n());
    for &v in x.values() {
        push_complex(&mut out, v);
    }
    out
}

fn read_values<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    expected: usize,
) -> Result<Vec<C64>> {
    let mut values = Vec::with_capacity(expected);
    for (no, l) in lines {
        let [re, im] = parse_fields::<2>(no, l)?;
        values.push(parse_complex(no, re, im)?);
    }
    if values.len() != expected {
        return Err(Error::parse(
            0,
            format!("expected {expected} values, found {}", values.len()),
        ));
    }
    Ok(values)
}

pub fn parse_signal(text: &str) -> Result<Signal> {
    let (header, lines) = split_header(text)?;
    let h = Header::parse(header, SIGNAL_MAGIC)?;
    if h.fields.get("kind").is_some_and(|k| k != "signal") {
        return Err(Error::parse(1, "file holds a spectrum, not a signal"));
    }
    let dim: usize = h.get("dim")?;
    let n: usize = h.get("n")?;
    match dim {
        1 => Ok(Signal::D1(Signal1D::new(read_values(lines, n)?)?)),
        2 => Ok(Signal::D2(Signal2D::new(n, read_values(lines, n * n)?)?)),
        d => Err(Error::parse(1, format!("unsupported dimension {d}"))),
    }
}

/// Spectrum in storage order written with frequencies ascending
/// (row-major over `(k1, k2)` in 2D).
pub fn format_spectrum(dim: usize, n: usize, storage: &[C64]) -> Result<String> {
    let total = if dim == 1 { n } else { n * n };
    if storage.len() != total {
        return Err(Error::mismatch(total, storage.len()));
    }
    let mut out = format!("{SIGNAL_MAGIC} {VERSION} dim={dim} n={n} kind=spectrum\n");
    let ks: Vec<i64> = frequencies(n).collect();
    if dim == 1 {
        for &k in &ks {
            push_complex(&mut out, storage[frequency_position(n, k)]);
        }
    } else {
        for &k1 in &ks {
            for &k2 in &ks {
                push_complex(
                    &mut out,
                    storage[frequency_position(n, k1) * n + frequency_position(n, k2)],
                );
            }
        }
    }
    Ok(out)
}

/// Returns `(dim, n, storage-order coefficients)`.
pub fn parse_spectrum(text: &str) -> Result<(usize, usize, Vec<C64>)> {
    let (header, lines) = split_header(text)?;
    let h = Header::parse(header, SIGNAL_MAGIC)?;
    if h.get::<String>("kind")? != "spectrum" {
        return Err(Error::parse(1, "file does not hold a spectrum"));
    }
    let dim: usize = h.get("dim")?;
    let n: usize = h.get("n")?;
    let total = match dim {
        1 => n,
        2 => n * n,
        d => return Err(Error::parse(1, format!("unsupported dimension {d}"))),
    };
    let ordered = read_values(lines, total)?;
    let ks: Vec<i64> = frequencies(n).collect();
    let mut storage = vec![C64::new(0.0, 0.0); total];
    if dim == 1 {
        for (v, &k) in ordered.iter().zip(&ks) {
            storage[frequency_position(n, k)] = *v;
        }
    } else {
        for (i, &k1) in ks.iter().enumerate() {
            for (j, &k2) in ks.iter().enumerate() {
                storage[frequency_position(n, k1) * n + frequency_position(n, k2)] =
                    ordered[i * n + j];
            }
        }
    }
    Ok((dim, n, storage))
}

fn mask_header(mask: &SamplingMask) -> String {
    format!(
        "dim={} n={} m={} scheme={} seed={}",
        mask.dim(),
        mask.n(),
        mask.m(),
        mask.scheme(),
        mask.seed()
    )
}

fn push_index(out: &mut String, indices: &Indices, i: usize) {
    match indices {
        Indices::D1(v) => {
            let _ = write!(out, "{}", v[i]);
        }
        Indices::D2(v) => {
            let _ = write!(out, "{},{}", v[i].0, v[i].1);
        }
    }
}

pub fn format_mask(mask: &SamplingMask) -> String {
    let mut out = format!("{MASK_MAGIC} {VERSION} {}\n", mask_header(mask));
    for i in 0..mask.len() {
        push_index(&mut out, mask.indices(), i);
        out.push('\n');
    }
    out
}

struct MaskMeta {
    dim: usize,
    n: usize,
    m: usize,
    scheme: SamplingScheme,
    seed: u64,
}

fn mask_meta(h: &Header) -> Result<MaskMeta> {
    let scheme: String = h.get("scheme")?;
    Ok(MaskMeta {
        dim: h.get("dim")?,
        n: h.get("n")?,
        m: h.get("m")?,
        scheme: scheme
            .parse()
            .map_err(|e: Error| Error::parse(1, e.to_string()))?,
        seed: h.get_or("seed", 0)?,
    })
}

fn build_mask(meta: MaskMeta, indices: Indices) -> Result<SamplingMask> {
    if indices.dim() != meta.dim {
        return Err(Error::parse(
            1,
            format!("dim={} but indices are {}D", meta.dim, indices.dim()),
        ));
    }
    let has_zero = match &indices {
        Indices::D1(v) => v.contains(&0),
        Indices::D2(v) => v.contains(&(0, 0)),
    };
    let includes_zero = meta.scheme.includes_zero() && has_zero;
    SamplingMask::new(
        meta.n,
        indices,
        meta.m,
        includes_zero,
        meta.scheme,
        meta.seed,
    )
}

pub fn parse_mask(text: &str) -> Result<SamplingMask> {
    let (header, lines) = split_header(text)?;
    let meta = mask_meta(&Header::parse(header, MASK_MAGIC)?)?;
    let indices = if meta.dim == 1 {
        Indices::D1(
            lines
                .map(|(no, l)| parse_num(no, l))
                .collect::<Result<_>>()?,
        )
    } else {
        Indices::D2(
            lines
                .map(|(no, l)| {
                    let [a, b] = parse_fields::<2>(no, l)?;
                    Ok((parse_num(no, a)?, parse_num(no, b)?))
                })
                .collect::<Result<_>>()?,
        )
    };
    build_mask(meta, indices)
}

pub fn format_measurements(meas: &MeasurementSet) -> String {
    let mask = meas.mask();
    let mut out = format!(
        "{MEAS_MAGIC} {VERSION} {} delta={}\n",
        mask_header(mask),
        meas.delta()
    );
    for (i, v) in meas.y().iter().enumerate() {
        push_index(&mut out, mask.indices(), i);
        let _ = writeln!(out, ",{},{}", v.re, v.im);
    }
    out
}

pub fn parse_measurements(text: &str) -> Result<MeasurementSet> {
    let (header, lines) = split_header(text)?;
    let h = Header::parse(header, MEAS_MAGIC)?;
    let meta = mask_meta(&h)?;
    let delta: f64 = h.get("delta")?;
    let mut y = Vec::new();
    let indices = if meta.dim == 1 {
        let mut ks = Vec::new();
        for (no, l) in lines {
            let [k, re, im] = parse_fields::<3>(no, l)?;
            ks.push(parse_num(no, k)?);
            y.push(parse_complex(no, re, im)?);
        }
        Indices::D1(ks)
    } else {
        let mut ks = Vec::new();
        for (no, l) in lines {
            let [a, b, re, im] = parse_fields::<4>(no, l)?;
            ks.push((parse_num(no, a)?, parse_num(no, b)?));
            y.push(parse_complex(no, re, im)?);
        }
        Indices::D2(ks)
    };
    MeasurementSet::new(build_mask(meta, indices)?, y, delta)
}

/// Flat `key=value` configuration; `#` starts a comment, blank lines are
/// ignored and later keys override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("'{line}' is not key=value")))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(Error::parse(i + 1, "empty key"));
            }
            values.insert(key.to_string(), v.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::parse(&fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidParameter(format!("bad value '{raw}' for '{key}'"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Solver settings, falling back to [`SolverConfig::default`].
    pub fn solver(&self) -> Result<SolverConfig> {
        let d = SolverConfig::default();
        let cfg = SolverConfig {
            lambda: self.get_or("lambda", d.lambda)?,
            mu: self.get_or("mu", d.mu)?,
            max_outer: self.get_or("max_outer", d.max_outer)?,
            max_inner: self.get_or("max_inner", d.max_inner)?,
            tol_rel: self.get_or("tol_rel", d.tol_rel)?,
            tol_feas: self.get_or("tol_feas", d.tol_feas)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Solver keys understood by [`Config::solver`].
pub const SOLVER_KEYS: [&str; 6] = [
    "lambda",
    "mu",
    "max_outer",
    "max_inner",
    "tol_rel",
    "tol_feas",
];

pub fn format_metrics(result: &ReconResult) -> String {
    format!(
        "outer_iterations={} final_residual={} final_tv={} converged={}\n",
        result.outer_iterations, result.final_residual, result.final_tv, result.converged
    )
}

/// `(outer_iterations, final_residual, final_tv, converged)` from a metrics line.
pub fn parse_metrics(text: &str) -> Result<(usize, f64, f64, bool)> {
    let mut fields = BTreeMap::new();
    for w in text.split_whitespace() {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("'{w}' is not key=value")))?;
        fields.insert(k.to_string(), v.to_string());
    }
    let h = Header { fields };
    Ok((
        h.get("outer_iterations")?,
        h.get("final_residual")?,
        h.get("final_tv")?,
        h.get("converged")?,
    ))
}

pub fn metrics_path(signal_path: &Path) -> PathBuf {
    let mut s = signal_path.as_os_str().to_owned();
    s.push(".metrics");
    PathBuf::from(s)
}

pub fn write_signal(path: &Path, x: &Signal) -> Result<()> {
    Ok(fs::write(path, format_signal(x))?)
}

pub fn read_signal(path: &Path) -> Result<Signal> {
    parse_signal(&fs::read_to_string(path)?)
}

pub fn write_mask(path: &Path, mask: &SamplingMask) -> Result<()> {
    Ok(fs::write(path, format_mask(mask))?)
}

pub fn read_mask(path: &Path) -> Result<SamplingMask> {
    parse_mask(&fs::read_to_string(path)?)
}

pub fn write_measurements(path: &Path, meas: &MeasurementSet) -> Result<()> {
    Ok(fs::write(path, format_measurements(meas))?)
}

pub fn read_measurements(path: &Path) -> Result<MeasurementSet> {
    parse_measurements(&fs::read_to_string(path)?)
}

/// Writes the reconstructed signal and a `<path>.metrics` sidecar.
pub fn write_recon(path: &Path, result: &ReconResult) -> Result<()> {
    write_signal(path, &result.signal)?;
    Ok(fs::write(metrics_path(path), format_metrics(result))?)
}
