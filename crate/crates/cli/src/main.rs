use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tfse_cli::config::RunConfig;
use tfse_cli::verify::{self, Check};
use tfse_cli::{Axis, BesovInput};
use tfse_core::besov::BesovSpec;
use tfse_core::freq::RadialProfile;

/// Kernels, decay sweeps and dispersive-estimate checks for the
/// time-fractional Schrödinger equation.
#[derive(Parser)]
#[command(name = "tfse", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write outputs into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Slope tolerance of the fitted exponents.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Args, Default)]
struct SpecFlags {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mittag-Leffler function E_α(z).
    Ml {
        #[arg(long)]
        alpha: f64,
        /// `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Bessel function J_ν(x).
    Bessel {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        x: f64,
    },
    /// Radial profile of the band kernel K_t^N, or of the full kernel without --N.
    Kernel {
        #[command(flatten)]
        spec: SpecFlags,
        #[arg(long)]
        t: f64,
        #[arg(long = "N")]
        nn: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 101)]
        x_points: usize,
    },
    /// sup_x |K_t^N(x)| over the configured (t, N) grid.
    Sweep {
        #[command(flatten)]
        spec: SpecFlags,
    },
    /// Power-law fits of a sweep CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Axis::T)]
        by: Axis,
    },
    /// Homogeneous Besov norm with its per-band table.
    Besov {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        /// Radial profile CSV (`r,re,im`); without it a Gaussian is used.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        /// Print the band table as CSV instead of the JSON document.
        #[arg(long)]
        csv: bool,
    },
    /// Run one check and write its JSON report; exit 0 iff it passes.
    Verify {
        #[arg(long, value_enum)]
        check: Check,
        #[command(flatten)]
        spec: SpecFlags,
        /// Mode frequency for the ode check.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Log-log columns and fitted lines from a sweep CSV.
    Plotdata {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Axis::T)]
        by: Axis,
    },
    /// Print the effective configuration as TOML.
    Config,
}

/// Exit statuses: a failed check is 1, any error 2.
const CHECK_FAILED: u8 = 1;
const ERROR: u8 = 2;

fn load_config(common: &Common, spec: Option<&SpecFlags>) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    if let Some(k) = common.threads {
        cfg.threads = Some(k);
    }
    if let Some(t) = common.tol {
        cfg.tolerances.slope = t;
    }
    if let Some(s) = spec {
        cfg.spec.n = s.n.unwrap_or(cfg.spec.n);
        cfg.spec.alpha = s.alpha.unwrap_or(cfg.spec.alpha);
        cfg.spec.beta = s.beta.unwrap_or(cfg.spec.beta);
    }
    cfg.validate()?;
    if let Some(k) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().context("configuring the thread pool")?;
    }
    Ok(cfg)
}

/// Writes `text` to `dir/name`, or to stdout without a directory.
fn emit(dir: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
            let path = d.join(name);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    let common = &cli.common;
    match &cli.cmd {
        Cmd::Ml { alpha, z } => {
            let cfg = load_config(common, None)?;
            emit(cfg.out.as_deref(), "ml.csv", &tfse_cli::ml(*alpha, tfse_cli::parse_complex(z)?)?)?;
        }
        Cmd::Bessel { nu, x } => {
            let cfg = load_config(common, None)?;
            emit(cfg.out.as_deref(), "bessel.csv", &tfse_cli::bessel(*nu, *x)?)?;
        }
        Cmd::Kernel { spec, t, nn, x_min, x_max, x_points } => {
            let cfg = load_config(common, Some(spec))?;
            let xs = tfse_cli::x_range(*x_min, *x_max, *x_points)?;
            let (text, failed) = tfse_cli::kernel(cfg.kernel_spec()?, *t, *nn, &xs)?;
            emit(cfg.out.as_deref(), "kernel.csv", &text)?;
            if failed > 0 {
                eprintln!("{failed} of {} cells failed", xs.len());
            }
            if failed == xs.len() {
                bail!("every kernel cell failed");
            }
        }
        Cmd::Sweep { spec } => {
            let cfg = load_config(common, Some(spec))?;
            let (text, records) = tfse_cli::sweep(&cfg)?;
            emit(cfg.out.as_deref(), "sweep.csv", &text)?;
            let failed = records.iter().filter(|r| !r.ok()).count();
            if failed > 0 {
                eprintln!("{failed} of {} cells failed", records.len());
            }
            if failed == records.len() {
                bail!("every sweep cell failed");
            }
        }
        Cmd::Fit { input, by } => {
            let cfg = load_config(common, None)?;
            emit(cfg.out.as_deref(), "fit.json", &json(&tfse_cli::fit(&read(input)?, *by)?)?)?;
        }
        Cmd::Besov { s, p, q, input, n, width, csv } => {
            let cfg = load_config(common, None)?;
            let spec = BesovSpec::with_range(*s, *p, *q, cfg.grid.j_min, cfg.grid.j_max)?;
            let source = match input {
                Some(path) => BesovInput::Profile(RadialProfile::read_csv(std::io::BufReader::new(
                    std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?,
                ))?),
                None => BesovInput::Gaussian { n: *n, width: *width },
            };
            let norm = tfse_cli::besov(&source, &spec)?;
            if let Some(w) = &norm.warning {
                eprintln!("warning: {w}");
            }
            if *csv {
                emit(cfg.out.as_deref(), "besov.csv", &tfse_cli::besov_csv(&norm)?)?;
            } else {
                emit(cfg.out.as_deref(), "besov.json", &json(&norm)?)?;
            }
        }
        Cmd::Verify { check, spec, lambda } => {
            let mut cfg = load_config(common, Some(spec))?;
            if let Some(l) = lambda {
                cfg.ode.lambda = vec![*l];
            }
            let doc = verify::run(&cfg, *check)?;
            let name = format!("verify-{}.json", serde_json::to_value(check)?.as_str().unwrap_or("check"));
            emit(cfg.out.as_deref(), &name, &json(&doc)?)?;
            eprintln!("{name}: {}", if doc.pass { "PASS" } else { "FAIL" });
            if !doc.pass {
                return Ok(CHECK_FAILED);
            }
        }
        Cmd::Plotdata { input, by } => {
            let cfg = load_config(common, None)?;
            let (data, lines) = tfse_cli::plotdata(&read(input)?, *by)?;
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            emit(Some(&dir), &format!("{stem}_loglog.csv"), &data)?;
            emit(Some(&dir), &format!("{stem}_fit.csv"), &lines)?;
        }
        Cmd::Config => {
            let cfg = load_config(common, None)?;
            emit(None, "", &cfg.to_toml()?)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", verify::error_record(&e));
            ExitCode::from(ERROR)
        }
    }
}
