use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gradcs::analysis::{
    build_l, build_l_tilde, candes_plan_conditions, dual_certificate, min_separation,
    stability_threshold,
};
use gradcs::harness::{
    format_csv, format_svg, gen_piecewise_signal, gradient_support, run_recovery_rates,
    run_robustness, run_stability_comparison, ExperimentReport, NoiseKind, RecoveryRatesConfig,
    RobustnessConfig, SignalSpec, StabilityConfig,
};
use gradcs::io::{
    format_mask, format_measurements, format_signal, parse_mask, parse_measurements, parse_signal,
    write_recon, Config,
};
use gradcs::sampling::{bernoulli_mask, generate, measure, SamplingMask, SamplingScheme};
use gradcs::solver::reconstruct;
use gradcs::transforms::{Signal, C64};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

/// Total-variation recovery of gradient-sparse signals from partial Fourier data.
#[derive(Parser)]
#[command(name = "gradcs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a piecewise-constant test signal (1D) or phantom (2D).
    GenSignal(Common),
    /// Draw a sampling mask.
    GenMask(Common),
    /// Sample a signal's spectrum on a mask, optionally adding noise.
    Measure {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        signal: Option<PathBuf>,
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Reconstruct a signal from measurements; writes `<out>.metrics` alongside.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        measurements: Option<PathBuf>,
    },
    /// Separation, interpolation-operator and sampling-condition report for a 1D signal.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        signal: Option<PathBuf>,
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Run `recovery`, `stability` or `robustness` and emit CSV or SVG.
    Experiment {
        #[command(flatten)]
        common: Common,
        name: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// `key=value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    scheme: Option<String>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra configuration entry, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

enum Failure {
    Validation(String),
    NotConverged(String),
}

impl From<gradcs::Error> for Failure {
    fn from(e: gradcs::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

impl Common {
    fn config(&self) -> Result<Config, Failure> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| invalid(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            cfg.set(k.trim(), v.trim());
        }
        if let Some(v) = self.n {
            cfg.set("n", v);
        }
        if let Some(v) = self.m {
            cfg.set("m", v);
        }
        if let Some(v) = self.seed {
            cfg.set("seed", v);
        }
        if let Some(v) = self.delta {
            cfg.set("delta", v);
        }
        if let Some(v) = &self.scheme {
            cfg.set("scheme", v);
        }
        if let Some(v) = &self.out {
            cfg.set("out", v.display());
        }
        Ok(cfg)
    }
}

fn path_from(cfg: &Config, flag: &Option<PathBuf>, key: &str) -> Result<PathBuf, Failure> {
    flag.clone()
        .or_else(|| cfg.get_str(key).map(PathBuf::from))
        .ok_or_else(|| invalid(format!("missing --{key}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit(cfg: &Config, text: &str) -> Outcome {
    match cfg.get_str("out") {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("{p}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn signal_spec(cfg: &Config) -> Result<SignalSpec, Failure> {
    let kind = cfg.get_str("kind").unwrap_or("coarse");
    let default_n = if kind == "phantom" { 64 } else { 512 };
    let n = cfg.get_or("n", default_n)?;
    let spec = match kind {
        "coarse" => SignalSpec::coarse(n),
        "fine" => SignalSpec::fine(n),
        "phantom" => SignalSpec::phantom(n),
        "custom" => {
            let jumps = cfg
                .get("jumps")?
                .ok_or_else(|| invalid("custom signals need jumps"))?;
            let min_sep = cfg
                .get("min_sep")?
                .ok_or_else(|| invalid("custom signals need min_sep"))?;
            SignalSpec::custom(n, jumps, min_sep)
        }
        other => return Err(invalid(format!("unknown signal kind '{other}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

fn gen_signal(common: &Common) -> Outcome {
    let cfg = common.config()?;
    let g = gen_piecewise_signal(&signal_spec(&cfg)?, cfg.get_or("seed", 0)?)?;
    emit(&cfg, &format_signal(&g.signal))?;
    if cfg.contains("out") {
        let support: Vec<String> = g.support.iter().map(ToString::to_string).collect();
        println!("support {}", support.join(" "));
    }
    Ok(())
}

fn gen_mask(common: &Common) -> Outcome {
    let cfg = common.config()?;
    let scheme: SamplingScheme = cfg.get_str("scheme").unwrap_or("uniform").parse()?;
    let n = cfg.get("n")?.ok_or_else(|| invalid("missing --n"))?;
    let m = cfg.get("m")?.ok_or_else(|| invalid("missing --m"))?;
    let mask = generate(&scheme, cfg.get_or("dim", 1)?, n, m, cfg.get_or("seed", 0)?)?;
    emit(&cfg, &format_mask(&mask))
}

fn measure_cmd(common: &Common, signal: &Option<PathBuf>, mask: &Option<PathBuf>) -> Outcome {
    let cfg = common.config()?;
    let x = parse_signal(&read(&path_from(&cfg, signal, "signal")?)?)?;
    let mask = parse_mask(&read(&path_from(&cfg, mask, "mask")?)?)?;
    let meas = measure(&x, &mask, cfg.get_or("delta", 0.0)?, cfg.get_or("seed", 0)?)?;
    emit(&cfg, &format_measurements(&meas))
}

fn reconstruct_cmd(common: &Common, measurements: &Option<PathBuf>) -> Outcome {
    let cfg = common.config()?;
    let mut meas = parse_measurements(&read(&path_from(&cfg, measurements, "measurements")?)?)?;
    if let Some(delta) = cfg.get("delta")? {
        meas = meas.with_delta(delta)?;
    }
    let out = reconstruct(&meas, &cfg.solver()?)?;
    match cfg.get_str("out") {
        Some(p) => write_recon(Path::new(p), &out)?,
        None => print!("{}", format_signal(&out.signal)),
    }
    eprintln!(
        "iterations {} residual {:.3e} tv {:.6e} converged {}",
        out.outer_iterations, out.final_residual, out.final_tv, out.converged
    );
    if out.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "no convergence within {} outer iterations",
            out.outer_iterations
        )))
    }
}

/// Unit phases of the gradient on its support.
fn gradient_signs(x: &Signal, support: &[usize]) -> Vec<C64> {
    let g = x.gradient();
    support
        .iter()
        .map(|&t| g[t - 1] / g[t - 1].norm())
        .collect()
}

fn certify(common: &Common, signal: &Option<PathBuf>, mask_path: &Option<PathBuf>) -> Outcome {
    let cfg = common.config()?;
    let x = match path_from(&cfg, signal, "signal") {
        Ok(p) => parse_signal(&read(&p)?)?,
        Err(_) => gen_piecewise_signal(&signal_spec(&cfg)?, cfg.get_or("seed", 0)?)?.signal,
    };
    if x.dim() != 1 {
        return Err(invalid("certify works on 1D signals"));
    }
    let n = x.n();
    let positions = gradient_support(&x);
    if positions.is_empty() {
        return Err(invalid("signal is constant; nothing to certify"));
    }
    let support = gradcs::analysis::SupportSet::new(n, positions.clone())?;
    let nu = min_separation(&support);
    let default_band = ((2.0 / nu).ceil() as usize).min((n - 1) / 4).max(1);
    let band: usize = cfg.get_or("band", default_band)?;
    let mask: SamplingMask = match mask_path
        .clone()
        .or_else(|| cfg.get_str("mask").map(PathBuf::from))
    {
        Some(p) => parse_mask(&read(&p)?)?,
        None => bernoulli_mask(n, band, 1.0, cfg.get_or("seed", 0)?)?,
    };

    let l = build_l(&support, band)?;
    let lt = build_l_tilde(&support, band, &mask)?;
    let cert = dual_certificate(&support, &gradient_signs(&x, &positions), band, &mask)?;
    let mut report =
        candes_plan_conditions(&mask, &support, cfg.get_or("rip_order", 0)?, Some(&cert))?;
    let mut head = gradcs::analysis::ConditionReport::default();
    head.push("sep_ratio", 1.0 / (band as f64 * nu), 1.0);
    head.push("L_minus_I", l.distance_to_identity(), 6.253e-3);
    head.push("Ltilde_norm", lt.norm, 1.25);
    head.push(
        "Ltilde_inverse_norm",
        lt.inverse_norm.unwrap_or(f64::INFINITY),
        4.0 / 3.0,
    );
    head.push("interpolation", cert.diagnostics.interpolation_error, 1e-8);
    head.push(
        "off_support",
        cert.diagnostics.max_off_support,
        stability_threshold(band, n),
    );
    head.entries.append(&mut report.entries);
    head.notes.append(&mut report.notes);
    head.notes.push(format!(
        "N={n} s={} M={band} nu_min={nu:.6} rows={}",
        support.len(),
        mask.len()
    ));
    emit(&cfg, &head.to_string())
}

fn list(cfg: &Config, key: &str) -> Result<Option<Vec<f64>>, Failure> {
    cfg.get_str(key)
        .map(|raw| {
            raw.split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| invalid(format!("bad number '{v}' in {key}")))
                })
                .collect()
        })
        .transpose()
}

fn experiment(common: &Common, name: &Option<String>) -> Outcome {
    let cfg = common.config()?;
    let name = name
        .clone()
        .or_else(|| cfg.get_str("experiment").map(str::to_string))
        .ok_or_else(|| invalid("name an experiment: recovery, stability or robustness"))?;
    let solver = cfg.solver()?;
    let n = cfg.get_or("n", 512)?;
    let seed = cfg.get_or("seed", 2024)?;
    let report: ExperimentReport = match name.as_str() {
        "recovery" => {
            let d = RecoveryRatesConfig::default();
            run_recovery_rates(&RecoveryRatesConfig {
                signal: SignalSpec::coarse(n),
                fractions: list(&cfg, "fractions")?.unwrap_or(d.fractions),
                trials: cfg.get_or("trials", d.trials)?,
                seed,
                solver,
                keep_signals: false,
            })?
        }
        "stability" => {
            let d = StabilityConfig::default();
            let noise = match cfg.get_str("noise").unwrap_or("gaussian") {
                "gaussian" => NoiseKind::Gaussian,
                "uniform" => NoiseKind::Uniform,
                other => return Err(invalid(format!("unknown noise model '{other}'"))),
            };
            run_stability_comparison(&StabilityConfig {
                signal: SignalSpec::coarse(n),
                fraction: cfg.get_or("fraction", d.fraction)?,
                snr_db: list(&cfg, "snr_db")?.unwrap_or(d.snr_db),
                trials: cfg.get_or("trials", d.trials)?,
                seed,
                noise,
                solver,
                keep_signals: false,
            })?
        }
        "robustness" => {
            let d = RobustnessConfig::default();
            run_robustness(&RobustnessConfig {
                signal: SignalSpec::coarse(n),
                fraction: cfg.get_or("fraction", d.fraction)?,
                snr_db: list(&cfg, "snr_db")?.unwrap_or(d.snr_db),
                trials: cfg.get_or("trials", d.trials)?,
                seed,
                solver,
                keep_signals: false,
            })?
        }
        other => return Err(invalid(format!("unknown experiment '{other}'"))),
    };
    let svg = match cfg.get_str("format") {
        Some("svg") => true,
        Some("csv") => false,
        Some(other) => return Err(invalid(format!("unknown format '{other}'"))),
        None => cfg.get_str("out").is_some_and(|p| p.ends_with(".svg")),
    };
    let text = if svg {
        format_svg(&report)
    } else {
        format_csv(&report)
    };
    emit(&cfg, &text)?;
    if cfg.contains("out") {
        println!(
            "scheme fraction_or_m snr_db trials mean_rel_err mean_grad_rel_err exact converged"
        );
        for c in report.cells() {
            println!(
                "{} {} {} {} {:.4e} {:.4e} {} {}",
                c.scheme,
                c.fraction_or_m,
                c.snr_db,
                c.trials,
                c.mean_rel_err,
                c.mean_grad_rel_err,
                c.exact,
                c.converged
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::GenSignal(c) => gen_signal(c),
        Command::GenMask(c) => gen_mask(c),
        Command::Measure {
            common,
            signal,
            mask,
        } => measure_cmd(common, signal, mask),
        Command::Reconstruct {
            common,
            measurements,
        } => reconstruct_cmd(common, measurements),
        Command::Certify {
            common,
            signal,
            mask,
        } => certify(common, signal, mask),
        Command::Experiment { common, name } => experiment(common, name),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::NotConverged(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
    }
}
