//! Run settings shared by all subcommands: a flat TOML file overlaid by
//! command-line flags.

use clap::{Args, ValueEnum};
use qanneal::schedules::{Family, OnlpFormula};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Tfim,
    Lrk,
    Disordered,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: qanneal::error::Error| e.to_string())
}

fn parse_formula(s: &str) -> Result<OnlpFormula, String> {
    s.parse().map_err(|e: qanneal::error::Error| e.to_string())
}

/// Every knob a subcommand may read. Unset fields fall back to the config
/// file, then to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// TOML file with the same keys as the long flags (underscores for dashes).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelName>,

    /// Schedule family; a comma-separated list for `disordered`.
    #[arg(long, value_delimiter = ',', value_parser = parse_family)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<Family>>,

    /// System size(s), comma-separated.
    #[arg(long = "L", value_delimiter = ',')]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<usize>>,

    /// Total duration(s), comma-separated.
    #[arg(long = "T", value_delimiter = ',')]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,

    /// RNG seed; disorder seeds as a comma-separated list for `disordered`.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<Vec<u64>>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    #[serde(skip_serializing)]
    pub threads: Option<usize>,

    /// Integration tolerance.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    /// Output file (stdout when absent).
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,

    /// Continue an interrupted sweep in --out.
    #[arg(long)]
    #[serde(skip_serializing, default)]
    pub resume: bool,

    #[arg(long, value_parser = parse_formula)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onlp_formula: Option<OnlpFormula>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub naqo_prefactor_scale: Option<f64>,

    /// Record per-cell wall time (output is then not reproducible).
    #[arg(long)]
    #[serde(default)]
    pub timing: bool,

    /// Number of schedule samples.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    /// CRAB restarts.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,

    /// CRAB basis size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,

    /// Nelder-Mead evaluation budget per coefficient.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evals_per_dim: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_j: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_prime: Option<f64>,

    /// Effective exponent of the disordered-chain ansatz.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_eff: Option<f64>,

    /// Gap-minimum position for the ansatz (scanned when absent).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_star: Option<f64>,

    /// Sweep CSV to analyse.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,

    /// Fit window as two durations, e.g. `--window 10,1000`.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<f64>>,

    /// Per-mode excitation dump for `evolve`.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub modes_out: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl Settings {
    /// Flags first, then the file named by `--config`.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let file = load_file(&path)?;
        overlay!(self, file; model, family, l, t, alpha, beta, seed, threads, tol, out, onlp_formula,
            naqo_prefactor_scale, samples, restarts, m_max, evals_per_dim, delta_j, j_prime, beta_eff, g_star,
            input, window, modes_out);
        self.resume |= file.resume;
        self.timing |= file.timing;
        Ok(self)
    }

    pub fn model(&self) -> ModelName {
        self.model.unwrap_or(ModelName::Tfim)
    }

    pub fn sizes(&self) -> Result<&[usize], CliError> {
        match self.l.as_deref() {
            Some(l) if !l.is_empty() => Ok(l),
            _ => Err(CliError::Usage("--L is required".into())),
        }
    }

    pub fn durations(&self) -> Result<&[f64], CliError> {
        match self.t.as_deref() {
            Some(t) if !t.is_empty() => Ok(t),
            _ => Err(CliError::Usage("--T is required".into())),
        }
    }

    pub fn single_size(&self) -> Result<usize, CliError> {
        match self.sizes()? {
            [l] => Ok(*l),
            _ => Err(CliError::Usage("this command takes a single --L".into())),
        }
    }

    pub fn single_duration(&self) -> Result<f64, CliError> {
        match self.durations()? {
            [t] => Ok(*t),
            _ => Err(CliError::Usage("this command takes a single --T".into())),
        }
    }

    pub fn single_family(&self) -> Result<Family, CliError> {
        match self.family.as_deref() {
            Some([f]) => Ok(*f),
            Some(_) => Err(CliError::Usage("this command takes a single --family".into())),
            None => Err(CliError::Usage("--family is required".into())),
        }
    }

    pub fn single_seed(&self) -> Result<u64, CliError> {
        match self.seed.as_deref() {
            None => Ok(0),
            Some([s]) => Ok(*s),
            Some(_) => Err(CliError::Usage("this command takes a single --seed".into())),
        }
    }

    /// (alpha, beta) for the Kitaev chain.
    pub fn lrk_exponents(&self) -> Result<(f64, f64), CliError> {
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(CliError::Usage("--model lrk needs --alpha and --beta".into())),
        }
    }

    /// JSON form written into output headers.
    pub fn provenance(&self) -> String {
        serde_json::to_string(self).expect("settings serialise")
    }
}

fn load_file(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("reading config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}
