use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CliError;

pub const OUT_ENV: &str = "SEMISPEC_OUT";

/// A discretization together with its trust partner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisConfig {
    /// Hermite basis of size `n`, checked against size `partner_n`
    /// (default `2n`).
    Hermite {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partner_n: Option<usize>,
    },
    /// Chebyshev collocation on `[-l, l]` with `n` points, checked against
    /// `2n`; doubled while the retained values are not yet stable.
    Chebyshev { l: f64, n: usize },
}

impl BasisConfig {
    pub const DEFAULT_HERMITE_N: usize = 400;
    pub const DEFAULT_CHEBYSHEV_L: f64 = 8.0;
    pub const DEFAULT_CHEBYSHEV_N: usize = 128;

    pub fn name(&self) -> &'static str {
        match self {
            BasisConfig::Hermite { .. } => "hermite",
            BasisConfig::Chebyshev { .. } => "chebyshev",
        }
    }
}

impl FromStr for BasisConfig {
    type Err = String;

    /// `hermite`, `hermite:N`, `hermite:N:PARTNER`, `chebyshev`,
    /// `chebyshev:N` or `chebyshev:L:N`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let uint = |t: &str| t.parse::<usize>().map_err(|_| format!("bad size '{t}' in basis '{s}'"));
        let real = |t: &str| t.parse::<f64>().map_err(|_| format!("bad half-width '{t}' in basis '{s}'"));
        match parts.as_slice() {
            ["hermite"] => Ok(Self::Hermite { n: Self::DEFAULT_HERMITE_N, partner_n: None }),
            ["hermite", n] => Ok(Self::Hermite { n: uint(n)?, partner_n: None }),
            ["hermite", n, m] => Ok(Self::Hermite { n: uint(n)?, partner_n: Some(uint(m)?) }),
            ["chebyshev"] => Ok(Self::Chebyshev { l: Self::DEFAULT_CHEBYSHEV_L, n: Self::DEFAULT_CHEBYSHEV_N }),
            ["chebyshev", n] => Ok(Self::Chebyshev { l: Self::DEFAULT_CHEBYSHEV_L, n: uint(n)? }),
            ["chebyshev", l, n] => Ok(Self::Chebyshev { l: real(l)?, n: uint(n)? }),
            _ => Err(format!("unknown basis '{s}' (expected hermite[:N[:PARTNER]] or chebyshev[[:L]:N])")),
        }
    }
}

fn default_basis() -> Vec<BasisConfig> {
    vec![BasisConfig::Hermite { n: BasisConfig::DEFAULT_HERMITE_N, partner_n: None }]
}
fn default_disc_radius() -> f64 {
    0.5
}
fn default_k_use() -> usize {
    5
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("semispec-out")
}
fn default_box() -> f64 {
    4.0
}
fn default_step() -> f64 {
    0.02
}
fn default_seeds() -> usize {
    32
}
fn default_match_tol() -> f64 {
    crate::linalg::DEFAULT_MATCH_TOL
}
fn default_cone_eps0() -> f64 {
    0.25
}
fn default_cone_margin() -> f64 {
    0.1
}
fn default_max_chebyshev_n() -> usize {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub symbol_text: String,
    pub h_list: Vec<f64>,
    #[serde(default = "default_basis")]
    pub basis: Vec<BasisConfig>,
    #[serde(default = "default_disc_radius")]
    pub disc_radius: f64,
    #[serde(default = "default_k_use")]
    pub k_use: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub strict: bool,
    /// Recorded for provenance; the pipeline itself is deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_box")]
    pub box_halfwidth: f64,
    #[serde(default = "default_step")]
    pub grid_step: f64,
    #[serde(default = "default_seeds")]
    pub seeds_per_axis: usize,
    #[serde(default = "default_match_tol")]
    pub match_tol: f64,
    #[serde(default = "default_cone_eps0")]
    pub cone_eps0: f64,
    #[serde(default = "default_cone_margin")]
    pub cone_margin: f64,
    #[serde(default = "default_max_chebyshev_n")]
    pub max_chebyshev_n: usize,
}

impl RunConfig {
    pub fn new(symbol_text: impl Into<String>, h_list: Vec<f64>) -> Self {
        Self {
            symbol_text: symbol_text.into(),
            h_list,
            basis: default_basis(),
            disc_radius: default_disc_radius(),
            k_use: default_k_use(),
            out_dir: default_out_dir(),
            strict: false,
            seed: 0,
            box_halfwidth: default_box(),
            grid_step: default_step(),
            seeds_per_axis: default_seeds(),
            match_tol: default_match_tol(),
            cone_eps0: default_cone_eps0(),
            cone_margin: default_cone_margin(),
            max_chebyshev_n: default_max_chebyshev_n(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.h_list.is_empty() {
            return bad("h_list must not be empty".into());
        }
        if self.h_list.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return bad(format!("every h must be positive, got {:?}", self.h_list));
        }
        if self.h_list.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("h_list must be strictly decreasing, got {:?}", self.h_list));
        }
        if !(self.disc_radius > 0.0) {
            return bad(format!("disc_radius must be positive, got {}", self.disc_radius));
        }
        if self.k_use < 3 {
            return bad(format!("k_use must be at least 3, got {}", self.k_use));
        }
        if self.basis.is_empty() {
            return bad("at least one basis is required".into());
        }
        if !(self.match_tol > 0.0) {
            return bad(format!("match_tol must be positive, got {}", self.match_tol));
        }
        for b in &self.basis {
            match *b {
                BasisConfig::Hermite { n, partner_n } => {
                    if partner_n.is_some_and(|m| m <= n) {
                        return bad(format!("hermite partner size must exceed {n}"));
                    }
                }
                BasisConfig::Chebyshev { l, n } => {
                    if !(l > 0.0) || n < 8 {
                        return bad(format!("chebyshev needs L > 0 and N >= 8, got L={l}, N={n}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Explicit flag, then the environment, then the configured directory.
pub fn resolve_out_dir(flag: Option<&Path>, configured: &Path) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => configured.to_path_buf(),
    }
}
