//! Batch front-end: ε-profiles, energy classification scans and potential
//! gradients, written as CSV (and SVG for profiles).

pub mod commands;
pub mod config;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Arg, ArgMatches, Command};

pub use commands::{cmd_classify, cmd_gradient, cmd_profile};
pub use config::{RawConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] sl2_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(sl2_core::Error::WrongStratum(_)) => 4,
            CliError::Numerical(_) | CliError::Io { .. } => 3,
        }
    }
}

pub fn command() -> Command {
    let keyed = |cmd: Command| {
        config::KEYS.iter().fold(cmd.arg(Arg::new("config").long("config").value_name("FILE").help("`key = value` config file")), |cmd, (k, help)| {
            cmd.arg(Arg::new(*k).long(*k).alias(k.replace('_', "-")).value_name("VALUE").allow_negative_numbers(true).help(*help))
        })
    };
    Command::new("sl2")
        .about("Lyapunov exponents, acceleration and energy classification for SL(2,C) cocycles")
        .subcommand_required(true)
        .subcommand(keyed(Command::new("profile").about("L(α, A_ε) over a range of ε")))
        .subcommand(keyed(Command::new("classify").about("classify Schrödinger energies")))
        .subcommand(keyed(Command::new("gradient").about("gradient of L on an affine stratum")))
}

/// Config file first, then `--key value` overrides.
pub fn raw_config(m: &ArgMatches) -> Result<RawConfig, CliError> {
    let mut raw = match m.get_one::<String>("config") {
        Some(p) => RawConfig::read(Path::new(p))?,
        None => RawConfig::default(),
    };
    for (k, _) in config::KEYS {
        if let Some(v) = m.get_one::<String>(k) {
            raw.set(k, v).map_err(CliError::Config)?;
        }
    }
    Ok(raw)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let written = match path {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    written.map_err(|source| CliError::Io {
        path: path.map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    })
}

/// Run a subcommand on a parsed config, writing its outputs.
pub fn run(name: &str, cfg: &RunConfig) -> Result<(), CliError> {
    let work = || -> Result<(), CliError> {
        match name {
            "profile" => {
                let (csv, svg) = cmd_profile(cfg)?;
                emit(cfg.out.as_deref(), &csv)?;
                if let (Some(path), Some(svg)) = (cfg.svg.as_deref(), svg) {
                    emit(Some(path), &svg)?;
                }
                Ok(())
            }
            "classify" => emit(cfg.out.as_deref(), &cmd_classify(cfg)?),
            "gradient" => emit(cfg.out.as_deref(), &cmd_gradient(cfg)?),
            other => Err(CliError::Config(format!("unknown command `{other}`"))),
        }
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("`threads`: {e}")))?
            .install(work),
        None => work(),
    }
}
