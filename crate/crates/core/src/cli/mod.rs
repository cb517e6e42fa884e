//! The `torusblocks` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
//! errors and 3 when a numerical computation does not converge or loses
//! track of a branch.

pub mod cache;
pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::trace::Orientation;
use commands::{Check, Outcome, TraceRequest};
use config::{Backend, FileConfig, Format, Overrides, RunConfig, CACHE_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "torusblocks", version, about = "Modular data of sl2 conformal blocks on the torus")]
pub struct Cli {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Cache directory; defaults to $TORUSBLOCKS_CACHE.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Level {
    /// κ: one value, a list `4,6` or an inclusive range `4..12`.
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub p: Option<i64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// S and T on the block basis, with their relations.
    Smatrix {
        #[command(flatten)]
        level: Level,
        #[arg(long, value_enum)]
        backend: Option<Backend>,
        /// Also compare with Kirillov's matrices.
        #[arg(long)]
        kirillov: bool,
    },
    /// The Macdonald polynomial P_n^(k), at formal q or at q = e^(πi/κ).
    Macdonald {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: i64,
        /// Evaluate at q^x = q^M.
        #[arg(long)]
        eval: Option<i64>,
        #[arg(long)]
        kappa: Option<i64>,
    },
    /// Trace functions ψ^(k) and Ψ^(k).
    Trace {
        #[arg(long)]
        k: i64,
        /// Integer or RE,IM.
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, conflicts_with = "kappa")]
        q_modulus: Option<f64>,
        #[arg(long, conflicts_with = "kappa", allow_hyphen_values = true)]
        q_arg: Option<f64>,
        #[arg(long)]
        kappa: Option<i64>,
        /// Use q^-1 = e^(-πi/κ) instead of q.
        #[arg(long)]
        inverse: bool,
        /// Compare with a truncated Verma-module trace.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 300)]
        depth: usize,
    },
    /// Run one verification battery.
    Verify {
        #[arg(value_enum)]
        check: CheckName,
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i64>,
        /// λ as RE,IM.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// τ as RE,IM.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// tanh-sinh quadrature level.
        #[arg(long = "level")]
        level_quadrature: Option<u32>,
    },
    /// All exact identities for the given levels; `--full` adds the numerical checks.
    Report {
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        full: bool,
    },
    /// Inspect or fill the result cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        #[command(flatten)]
        level: Level,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CheckName {
    Relations,
    Kirillov,
    Identities,
    Kzb,
    Properties,
    Stokes,
    Theta,
    Stransform,
    Vanishing,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CacheAction {
    List,
    Clear,
    Warm,
}

impl From<CheckName> for Check {
    fn from(c: CheckName) -> Self {
        match c {
            CheckName::Relations => Check::Relations,
            CheckName::Kirillov => Check::Kirillov,
            CheckName::Identities => Check::Identities,
            CheckName::Kzb => Check::Kzb,
            CheckName::Properties => Check::Properties,
            CheckName::Stokes => Check::Stokes,
            CheckName::Theta => Check::Theta,
            CheckName::Stransform => Check::Stransform,
            CheckName::Vanishing => Check::Vanishing,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Convergence(_) | Error::Branch(_) => EXIT_NUMERICAL,
        Error::Invalid(_) | Error::Range(_) | Error::Pole(_) | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

fn overrides(cli: &Cli) -> Overrides {
    let mut o = Overrides { format: cli.format, cache_dir: cli.cache_dir.clone(), ..Default::default() };
    let level = |o: &mut Overrides, l: &Level| {
        o.kappa = l.kappa.clone();
        o.p = l.p;
    };
    match &cli.command {
        Command::Smatrix { level: l, backend, .. } => {
            level(&mut o, l);
            o.backend = *backend;
        }
        Command::Macdonald { kappa, .. } | Command::Trace { kappa, .. } => o.kappa = kappa.map(|k| k.to_string()),
        Command::Verify { level: l, k, n, lambda, tau, level_quadrature, .. } => {
            level(&mut o, l);
            o.k = *k;
            o.n = *n;
            o.lambda = lambda.clone();
            o.tau = tau.clone();
            o.level = *level_quadrature;
        }
        Command::Report { level: l, .. } | Command::Cache { level: l, .. } => level(&mut o, l),
    }
    o
}

/// Resolves the configuration and runs the command.
pub fn execute(cli: &Cli) -> crate::Result<(RunConfig, Outcome)> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let env_cache = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let cfg = RunConfig::resolve(overrides(cli), file, env_cache)?;
    let out = match &cli.command {
        Command::Smatrix { kirillov, .. } => commands::smatrix(&cfg, *kirillov)?,
        Command::Macdonald { n, k, eval, .. } => commands::macdonald(&cfg, *n, *k, *eval)?,
        Command::Trace { k, nu, mu, q_modulus, q_arg, inverse, oracle, depth, .. } => {
            let req = TraceRequest {
                k: *k,
                nu: nu.clone(),
                mu: mu.clone(),
                q_modulus: *q_modulus,
                q_arg: *q_arg,
                orientation: if *inverse { Orientation::QInverse } else { Orientation::Q },
                oracle: *oracle,
                depth: *depth,
            };
            commands::trace(&cfg, &req)?
        }
        Command::Verify { check, .. } => commands::verify(&cfg, (*check).into())?,
        Command::Report { full, .. } => commands::report(&cfg, *full)?,
        Command::Cache { action, .. } => {
            let a = match action {
                CacheAction::List => "list",
                CacheAction::Clear => "clear",
                CacheAction::Warm => "warm",
            };
            commands::cache_command(&cfg, a)?
        }
    };
    Ok((cfg, out))
}

/// Renders an outcome in the requested format.
pub fn render(out: &Outcome, format: Format) -> crate::Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.json)?;
            s.push('\n');
            Ok(s)
        }
        Format::Pretty => {
            let mut s = out.pretty.clone();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            Ok(s)
        }
        Format::Csv => out
            .csv
            .clone()
            .ok_or_else(|| Error::Invalid("csv output is only available for matrices".into())),
    }
}

/// Parses `argv`, runs the command, writes its output and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute(&cli).and_then(|(cfg, out)| {
        let text = render(&out, cfg.format)?;
        match &cli.output {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(out.pass)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
