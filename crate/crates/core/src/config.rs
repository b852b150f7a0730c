//! Run configuration: defaults, a flat `key = value` file format and
//! per-key overrides shared with the command line.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};

/// A selectable check family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    GaussNorm,
    Stickelberger,
    BetaMap,
    WeilCongruence,
    WeilConstruction,
    NormDefect,
    NormCommutation,
    RestrictionSurjectivity,
    ThetaBernoulli,
    ThetaCoherence,
    LambdaMu,
    CokerOrder,
    MinimalPoly,
    Irregular,
}

impl CheckKind {
    pub const ALL: [CheckKind; 14] = [
        CheckKind::GaussNorm,
        CheckKind::Stickelberger,
        CheckKind::BetaMap,
        CheckKind::WeilCongruence,
        CheckKind::WeilConstruction,
        CheckKind::NormDefect,
        CheckKind::NormCommutation,
        CheckKind::RestrictionSurjectivity,
        CheckKind::ThetaBernoulli,
        CheckKind::ThetaCoherence,
        CheckKind::LambdaMu,
        CheckKind::CokerOrder,
        CheckKind::MinimalPoly,
        CheckKind::Irregular,
    ];

    /// Checks about Gauss sums, Stickelberger and Weil values.
    pub fn tower_suite() -> BTreeSet<CheckKind> {
        CheckKind::ALL[..8].iter().copied().collect()
    }

    /// Checks about θ-series and Bernoulli numbers.
    pub fn iwasawa_suite() -> BTreeSet<CheckKind> {
        CheckKind::ALL[8..].iter().copied().collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::GaussNorm => "gauss_norm",
            CheckKind::Stickelberger => "stickelberger",
            CheckKind::BetaMap => "beta_map",
            CheckKind::WeilCongruence => "weil_congruence",
            CheckKind::WeilConstruction => "weil_construction",
            CheckKind::NormDefect => "norm_defect",
            CheckKind::NormCommutation => "norm_commutation",
            CheckKind::RestrictionSurjectivity => "restriction_surjectivity",
            CheckKind::ThetaBernoulli => "theta_bernoulli",
            CheckKind::ThetaCoherence => "theta_coherence",
            CheckKind::LambdaMu => "lambda_mu",
            CheckKind::CokerOrder => "coker_order",
            CheckKind::MinimalPoly => "minimal_poly",
            CheckKind::Irregular => "irregular",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown check `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub primes: Vec<u64>,
    pub n_max: u32,
    pub l_max: u64,
    /// Largest `t` in the sampled generators `t - σ_t`.
    pub delta_t_max: u64,
    /// Exponents `j` of `ψ = ω^j`; empty means every valid one.
    pub psi: Vec<i64>,
    /// p-adic precision `N`.
    pub precision: u32,
    /// Starting l-adic precision `M` for valuations.
    pub hensel: u32,
    pub seed: u64,
    pub q_max: u64,
    /// Coefficient bound for the generator search.
    pub height: u32,
    pub checks: BTreeSet<CheckKind>,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            primes: vec![3, 5, 7],
            n_max: 1,
            l_max: 200,
            delta_t_max: 12,
            psi: Vec::new(),
            precision: 4,
            hensel: 6,
            seed: 0,
            q_max: 10_000_000,
            height: 32,
            checks: CheckKind::tower_suite(),
            output: None,
            csv: None,
            cache_dir: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl RunConfig {
    /// Recognised keys, shared by the config file and the command line.
    pub const KEYS: [&'static str; 14] = [
        "p", "n-max", "l-max", "delta-t-max", "psi", "N", "M", "seed", "q-max", "height",
        "checks", "output", "csv", "cache-dir",
    ];

    /// Sets one key; later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.primes = parse_list(key, value)?,
            "n-max" => self.n_max = parse(key, value)?,
            "l-max" => self.l_max = parse(key, value)?,
            "delta-t-max" => self.delta_t_max = parse(key, value)?,
            "psi" => self.psi = parse_list(key, value)?,
            "N" => self.precision = parse(key, value)?,
            "M" => self.hensel = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "q-max" => self.q_max = parse(key, value)?,
            "height" => self.height = parse(key, value)?,
            "checks" => {
                self.checks = match value.trim() {
                    "all" => CheckKind::ALL.into_iter().collect(),
                    "tower" => CheckKind::tower_suite(),
                    "iwasawa" => CheckKind::iwasawa_suite(),
                    v => parse_list(key, v)?.into_iter().collect(),
                }
            }
            "output" => self.output = Some(PathBuf::from(value.trim())),
            "csv" => self.csv = Some(PathBuf::from(value.trim())),
            "cache-dir" => self.cache_dir = Some(PathBuf::from(value.trim())),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        self.apply_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for &p in &self.primes {
            if p < 3 || !crate::arith::is_prime(p) {
                return Err(Error::Config(format!("p = {p} is not an odd prime")));
            }
        }
        let positive = [
            ("l-max", self.l_max),
            ("N", self.precision as u64),
            ("M", self.hensel as u64),
            ("q-max", self.q_max),
            ("height", self.height as u64),
        ];
        for (k, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{k} must be positive")));
            }
        }
        if self.delta_t_max < 2 {
            return Err(Error::Config("delta-t-max must be at least 2".into()));
        }
        Ok(())
    }

    /// The fields that determine results; paths are left out so that the
    /// same run written to different files hashes identically.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "primes": self.primes,
            "n_max": self.n_max,
            "l_max": self.l_max,
            "delta_t_max": self.delta_t_max,
            "psi": self.psi,
            "N": self.precision,
            "M": self.hensel,
            "seed": self.seed,
            "q_max": self.q_max,
            "height": self.height,
            "checks": self.checks.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
        })
    }
}
