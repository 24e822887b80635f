//! Run configuration: command-line flags layered over an optional
//! `key = value` file.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

pub const DEFAULT_COST: f64 = 1.0;
pub const DEFAULT_DRAWS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand. Every flag can also be set in the
/// config file under the same name, with or without the leading dashes.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Electoral cost of both candidates (overridden by --a1/--a2)
    #[arg(long, value_parser = parse_number)]
    pub a: Option<f64>,
    /// Electoral cost of candidate 1
    #[arg(long, value_parser = parse_number)]
    pub a1: Option<f64>,
    /// Electoral cost of candidate 2
    #[arg(long, value_parser = parse_number)]
    pub a2: Option<f64>,
    /// Organizational cost of adjusting, in (0, 1/2)
    #[arg(long, value_parser = parse_number)]
    pub phi: Option<f64>,
    /// Ex-ante platform of candidate 1
    #[arg(long, value_parser = parse_number)]
    pub x1: Option<f64>,
    /// Ex-ante platform of candidate 2
    #[arg(long, value_parser = parse_number)]
    pub x2: Option<f64>,
    /// Realized median voter
    #[arg(long, value_parser = parse_number)]
    pub m: Option<f64>,
    /// Use the equilibrium platforms instead of --x1/--x2
    #[arg(long)]
    pub at_equilibrium: bool,
    /// Monte Carlo draws (sweep adds simulated columns only when set)
    #[arg(long)]
    pub draws: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads: 0 for every core, 1 for sequential
    #[arg(long)]
    pub workers: Option<usize>,
    /// Points of the grid used by brute-force checks
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-distance of the centrist profile (1/2 - e, 1/2 + e)
    #[arg(long, value_parser = parse_number)]
    pub epsilon: Option<f64>,
    /// Comma-separated electoral costs for sweep
    #[arg(long, value_delimiter = ',', value_parser = parse_number)]
    pub a_list: Option<Vec<f64>>,
    /// Comma-separated organizational costs for sweep
    #[arg(long, value_delimiter = ',', value_parser = parse_number)]
    pub phi_list: Option<Vec<f64>>,
    /// Add a deliberately broken fixture to verify
    #[arg(long)]
    pub inject_perturbed: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Read defaults from a key = value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration, echoed in every JSON document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub a1: f64,
    pub a2: f64,
    pub phi: Option<f64>,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub m: Option<f64>,
    pub at_equilibrium: bool,
    pub draws: Option<u64>,
    pub seed: u64,
    pub workers: usize,
    pub grid: usize,
    pub epsilon: Option<f64>,
    pub a_list: Vec<f64>,
    pub phi_list: Vec<f64>,
    pub inject_perturbed: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub config: Option<PathBuf>,
}

/// A finite decimal or a ratio such as `1/3`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("not a number: {s}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("not a number: {s}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator: {s}"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("not a number: {s}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not a finite number: {s}"))
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("not a boolean: {other}")),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_number).collect()
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("not a non-negative integer: {s}"))
}

/// Parse config file text into flags. Blank lines and `#` comments are
/// skipped; keys use the flag names.
pub fn parse_config_text(text: &str) -> Result<Flags, CliError> {
    let mut f = Flags::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Invalid(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        let bad = |e: String| CliError::Invalid(format!("config line {} ({key}): {e}", n + 1));
        match key.as_str() {
            "a" => f.a = Some(parse_number(value).map_err(bad)?),
            "a1" => f.a1 = Some(parse_number(value).map_err(bad)?),
            "a2" => f.a2 = Some(parse_number(value).map_err(bad)?),
            "phi" => f.phi = Some(parse_number(value).map_err(bad)?),
            "x1" => f.x1 = Some(parse_number(value).map_err(bad)?),
            "x2" => f.x2 = Some(parse_number(value).map_err(bad)?),
            "m" => f.m = Some(parse_number(value).map_err(bad)?),
            "at-equilibrium" => f.at_equilibrium = parse_bool(value).map_err(bad)?,
            "draws" => f.draws = Some(parse_int(value).map_err(bad)?),
            "seed" => f.seed = Some(parse_int(value).map_err(bad)?),
            "workers" => f.workers = Some(parse_int(value).map_err(bad)?),
            "grid" => f.grid = Some(parse_int(value).map_err(bad)?),
            "epsilon" => f.epsilon = Some(parse_number(value).map_err(bad)?),
            "a-list" => f.a_list = Some(parse_list(value).map_err(bad)?),
            "phi-list" => f.phi_list = Some(parse_list(value).map_err(bad)?),
            "inject-perturbed" => f.inject_perturbed = parse_bool(value).map_err(bad)?,
            "format" => {
                f.format = Some(Format::from_str(value, true).map_err(|_| bad(format!("unknown format {value}")))?)
            }
            "out" => f.out = Some(PathBuf::from(value)),
            "config" => return Err(bad("config files cannot include other config files".into())),
            other => return Err(CliError::Invalid(format!("config line {}: unknown key {other}", n + 1))),
        }
    }
    Ok(f)
}

/// Electoral costs after applying `--a`, then `--a1`/`--a2`.
fn apply_costs(costs: &mut [Option<f64>; 2], f: &Flags) {
    if let Some(a) = f.a {
        *costs = [Some(a), Some(a)];
    }
    if let Some(a1) = f.a1 {
        costs[0] = Some(a1);
    }
    if let Some(a2) = f.a2 {
        costs[1] = Some(a2);
    }
}

impl RunConfig {
    /// Layer `flags` over the config file they name, then fill defaults.
    pub fn resolve(command: &str, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
                parse_config_text(&text)?
            }
            None => Flags::default(),
        };
        let mut costs = [None, None];
        apply_costs(&mut costs, &file);
        apply_costs(&mut costs, flags);

        let mut draws = flags.draws.or(file.draws);
        if command == "simulate" {
            draws = draws.or(Some(DEFAULT_DRAWS));
        }
        let cfg = RunConfig {
            command: command.to_string(),
            a1: costs[0].unwrap_or(DEFAULT_COST),
            a2: costs[1].unwrap_or(DEFAULT_COST),
            phi: flags.phi.or(file.phi),
            x1: flags.x1.or(file.x1),
            x2: flags.x2.or(file.x2),
            m: flags.m.or(file.m),
            at_equilibrium: flags.at_equilibrium || file.at_equilibrium,
            draws,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            workers: flags.workers.or(file.workers).unwrap_or(0),
            grid: flags.grid.or(file.grid).unwrap_or(DEFAULT_GRID),
            epsilon: flags.epsilon.or(file.epsilon),
            a_list: flags.a_list.clone().or(file.a_list).unwrap_or_default(),
            phi_list: flags.phi_list.clone().or(file.phi_list).unwrap_or_default(),
            inject_perturbed: flags.inject_perturbed || file.inject_perturbed,
            format: flags.format.or(file.format).unwrap_or(Format::Json),
            out: flags.out.clone().or(file.out),
            config: flags.config.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.x1.is_some() != self.x2.is_some() {
            return Err(CliError::Invalid("--x1 and --x2 must be given together".into()));
        }
        if self.at_equilibrium && self.x1.is_some() {
            return Err(CliError::Invalid("--at-equilibrium conflicts with --x1/--x2".into()));
        }
        if self.draws == Some(0) {
            return Err(CliError::Invalid("--draws must be positive".into()));
        }
        if self.grid < 2 {
            return Err(CliError::Invalid(format!("--grid needs at least 2 points, got {}", self.grid)));
        }
        Ok(())
    }

    pub fn require_phi(&self) -> Result<f64, CliError> {
        self.phi.ok_or_else(|| CliError::Invalid(format!("{} needs --phi", self.command)))
    }

    pub fn params(&self) -> Result<flipflop::GameParams, CliError> {
        Ok(flipflop::GameParams::new(self.a1, self.a2, self.require_phi()?)?)
    }
}
