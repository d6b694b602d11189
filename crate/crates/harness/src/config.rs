//! Run configuration: a TOML file with a subcommand, a seed, an output
//! directory and a `[parameters]` table specific to the subcommand.
//!
//! ```toml
//! subcommand = "simulate"
//! seed = 0
//! output_dir = "out"
//!
//! [parameters]
//! alpha = 1.0
//! gamma = 1.0
//! N = 64
//! dt = 1e-3
//! T = 0.5
//! ```
//!
//! Every key not listed below is rejected, and all of them are reported at
//! once. A `[provenance]` table is written by every run into its manifest and
//! ignored on load, so manifests load back as configs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nlskdv_core::estimates::{CounterexampleFamily, MultiplierKind, DYADIC_SWEEP};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subcommand {
    Simulate,
    Scaling,
    Lemmas,
    Multipliers,
    Picard,
    Norms,
}

impl Subcommand {
    pub const ALL: [Subcommand; 6] = [
        Self::Simulate,
        Self::Scaling,
        Self::Lemmas,
        Self::Multipliers,
        Self::Picard,
        Self::Norms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Scaling => "scaling",
            Self::Lemmas => "lemmas",
            Self::Multipliers => "multipliers",
            Self::Picard => "picard",
            Self::Norms => "norms",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown subcommand {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    #[serde(rename = "N")]
    pub num_modes: i64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dealias: bool,
    pub record_every: i64,
    /// Drop every nonlinear term.
    pub linear: bool,
    /// Scale of the built-in smooth initial profile.
    pub amplitude: f64,
    /// Largest relative drift of M, Q, E accepted by the verdict.
    pub drift_tol: f64,
}

impl Default for SimulateParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            gamma: 1.0,
            num_modes: 64,
            dt: 1e-3,
            t_final: 0.5,
            dealias: true,
            record_every: 10,
            linear: false,
            amplitude: 1.0,
            drift_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingParams {
    pub family: String,
    pub k: f64,
    pub s: f64,
    pub b: f64,
    #[serde(rename = "N")]
    pub sizes: Vec<i64>,
    pub tolerance: f64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            family: "UV2".into(),
            k: 2.0,
            s: 0.0,
            b: 0.5,
            sizes: DYADIC_SWEEP.to_vec(),
            tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmasParams {
    pub theta: f64,
    pub theta_tilde: f64,
    /// `a` runs over `2^a_min_exp, …, 2^a_max_exp`.
    pub a_min_exp: i64,
    pub a_max_exp: i64,
    pub cubic_e: f64,
    pub cubic_f: f64,
    pub cubic_g: f64,
    pub cubic_theta: f64,
    pub cubic_range: i64,
    pub linear_theta: f64,
    pub linear_n1: Vec<i64>,
    pub dyadic_n: Vec<i64>,
    pub epsilon: f64,
    pub tolerance: f64,
}

impl Default for LemmasParams {
    fn default() -> Self {
        Self {
            theta: 0.9,
            theta_tilde: 0.9,
            a_min_exp: 4,
            a_max_exp: 14,
            cubic_e: 0.0,
            cubic_f: 0.0,
            cubic_g: 0.0,
            cubic_theta: 0.5,
            cubic_range: 1_000_000,
            linear_theta: 0.6,
            linear_n1: vec![1024, 2048, 4096, 8192, 16384],
            dyadic_n: vec![128, 256, 512, 1024],
            epsilon: 0.3,
            tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultipliersParams {
    pub kinds: Vec<String>,
    pub k: f64,
    pub s: f64,
    pub one_minus: f64,
    pub truncation: i64,
    pub small_threshold: i64,
}

impl Default for MultipliersParams {
    fn default() -> Self {
        Self {
            kinds: MultiplierKind::ALL.iter().map(|k| k.name().to_string()).collect(),
            k: 1.0,
            s: 1.0,
            one_minus: 0.9,
            truncation: 256,
            small_threshold: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PicardParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    #[serde(rename = "N")]
    pub num_modes: i64,
    pub amplitude: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub num_time_samples: i64,
    pub k: f64,
    pub s: f64,
    pub max_iters: i64,
    pub tol: f64,
    pub dealias: bool,
    pub cross_tol: f64,
}

impl Default for PicardParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            num_modes: 64,
            amplitude: 1e-3,
            t_final: 0.1,
            num_time_samples: 32,
            k: 1.0,
            s: 1.0,
            max_iters: 50,
            tol: 1e-12,
            dealias: true,
            cross_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormsParams {
    pub members: i64,
    pub modes_per_member: i64,
    /// Each entry is one ensemble drawn from `[-r, r]`.
    pub mode_ranges: Vec<i64>,
    pub max_offset: i64,
    pub dilations: Vec<i64>,
    /// Largest accepted ratio between the ensemble maxima of one family.
    pub spread_tol: f64,
}

impl Default for NormsParams {
    fn default() -> Self {
        Self {
            members: 50,
            modes_per_member: 8,
            mode_ranges: vec![8, 16],
            max_offset: 2,
            dilations: vec![1, 2],
            spread_tol: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parameters {
    Simulate(SimulateParams),
    Scaling(ScalingParams),
    Lemmas(LemmasParams),
    Multipliers(MultipliersParams),
    Picard(PicardParams),
    Norms(NormsParams),
}

impl Parameters {
    pub fn defaults(sub: Subcommand) -> Self {
        match sub {
            Subcommand::Simulate => Self::Simulate(Default::default()),
            Subcommand::Scaling => Self::Scaling(Default::default()),
            Subcommand::Lemmas => Self::Lemmas(Default::default()),
            Subcommand::Multipliers => Self::Multipliers(Default::default()),
            Subcommand::Picard => Self::Picard(Default::default()),
            Subcommand::Norms => Self::Norms(Default::default()),
        }
    }

    pub fn subcommand(&self) -> Subcommand {
        match self {
            Self::Simulate(_) => Subcommand::Simulate,
            Self::Scaling(_) => Subcommand::Scaling,
            Self::Lemmas(_) => Subcommand::Lemmas,
            Self::Multipliers(_) => Subcommand::Multipliers,
            Self::Picard(_) => Subcommand::Picard,
            Self::Norms(_) => Subcommand::Norms,
        }
    }

    /// Resolved parameters as a TOML table (every key present).
    pub fn to_table(&self) -> Table {
        let v = match self {
            Self::Simulate(p) => Value::try_from(p),
            Self::Scaling(p) => Value::try_from(p),
            Self::Lemmas(p) => Value::try_from(p),
            Self::Multipliers(p) => Value::try_from(p),
            Self::Picard(p) => Value::try_from(p),
            Self::Norms(p) => Value::try_from(p),
        };
        match v.expect("parameter structs serialize") {
            Value::Table(t) => t,
            _ => unreachable!("parameter structs serialize to tables"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub parameters: Parameters,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn defaults(sub: Subcommand) -> Self {
        Self {
            subcommand: sub,
            parameters: Parameters::defaults(sub),
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }

    /// Canonical TOML text of the resolved config.
    pub fn to_toml(&self) -> String {
        let mut t = Table::new();
        t.insert("subcommand".into(), Value::String(self.subcommand.name().into()));
        t.insert("seed".into(), Value::Integer(self.seed as i64));
        t.insert(
            "output_dir".into(),
            Value::String(self.output_dir.to_string_lossy().into_owned()),
        );
        t.insert("parameters".into(), Value::Table(self.parameters.to_table()));
        toml::to_string(&t).expect("config serializes")
    }
}

const TOP_KEYS: [&str; 5] = ["subcommand", "seed", "output_dir", "parameters", "provenance"];

fn known_parameter_keys(sub: Subcommand) -> Vec<String> {
    Parameters::defaults(sub).to_table().keys().cloned().collect()
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    if !path.exists() {
        return Err(HarnessError::MissingFile(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Parses and validates config text; `origin` names the source in errors.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig> {
    let parse_err = |message: String| HarnessError::Parse {
        path: origin.to_string(),
        message,
    };
    let table: Table = text.parse().map_err(|e: toml::de::Error| parse_err(e.message().to_string()))?;

    let sub = match table.get("subcommand") {
        Some(Value::String(s)) => s.parse::<Subcommand>().map_err(|e| HarnessError::range("subcommand", s, &e))?,
        Some(other) => return Err(parse_err(format!("subcommand must be a string, got {other}"))),
        None => return Err(parse_err("missing key `subcommand`".into())),
    };

    let mut unknown: Vec<String> = table
        .keys()
        .filter(|k| !TOP_KEYS.contains(&k.as_str()))
        .cloned()
        .collect();
    let params = match table.get("parameters") {
        Some(Value::Table(t)) => t.clone(),
        Some(_) => return Err(parse_err("`parameters` must be a table".into())),
        None => Table::new(),
    };
    let known = known_parameter_keys(sub);
    unknown.extend(
        params
            .keys()
            .filter(|k| !known.contains(k))
            .map(|k| format!("parameters.{k}")),
    );
    if !unknown.is_empty() {
        return Err(HarnessError::UnknownKeys(unknown));
    }
    if let Some(p) = table.get("provenance") {
        if !p.is_table() {
            return Err(parse_err("`provenance` must be a table".into()));
        }
    }

    let seed = match table.get("seed") {
        Some(Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(Value::Integer(i)) => return Err(HarnessError::range("seed", i, "must be nonnegative")),
        Some(other) => return Err(parse_err(format!("seed must be an integer, got {other}"))),
        None => 0,
    };
    let output_dir = match table.get("output_dir") {
        Some(Value::String(s)) => PathBuf::from(s),
        Some(other) => return Err(parse_err(format!("output_dir must be a string, got {other}"))),
        None => PathBuf::from("out"),
    };

    fn typed<T: DeserializeOwned>(t: Table, origin: &str) -> Result<T> {
        Value::Table(t).try_into().map_err(|e: toml::de::Error| HarnessError::Parse {
            path: origin.to_string(),
            message: format!("in [parameters]: {}", e.message()),
        })
    }
    let parameters = match sub {
        Subcommand::Simulate => Parameters::Simulate(typed(params, origin)?),
        Subcommand::Scaling => Parameters::Scaling(typed(params, origin)?),
        Subcommand::Lemmas => Parameters::Lemmas(typed(params, origin)?),
        Subcommand::Multipliers => Parameters::Multipliers(typed(params, origin)?),
        Subcommand::Picard => Parameters::Picard(typed(params, origin)?),
        Subcommand::Norms => Parameters::Norms(typed(params, origin)?),
    };
    let cfg = RunConfig {
        subcommand: sub,
        parameters,
        seed,
        output_dir,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn positive(key: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(HarnessError::range(key, x, "must be positive and finite"))
    }
}

fn finite(key: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(HarnessError::range(key, x, "must be finite"))
    }
}

fn at_least(key: &str, x: i64, min: i64) -> Result<()> {
    if x >= min {
        Ok(())
    } else {
        Err(HarnessError::range(key, x, &format!("must be at least {min}")))
    }
}

fn even_grid(key: &str, n: i64) -> Result<()> {
    if n >= 4 && n % 2 == 0 {
        Ok(())
    } else {
        Err(HarnessError::range(key, n, "must be even and at least 4"))
    }
}

/// Range checks that do not depend on running a module.
pub fn validate(cfg: &RunConfig) -> Result<()> {
    match &cfg.parameters {
        Parameters::Simulate(p) => {
            for (k, x) in [("alpha", p.alpha), ("beta", p.beta), ("gamma", p.gamma), ("amplitude", p.amplitude)] {
                finite(k, x)?;
            }
            even_grid("N", p.num_modes)?;
            positive("dt", p.dt)?;
            positive("T", p.t_final)?;
            if p.t_final < p.dt {
                return Err(HarnessError::range("T", p.t_final, "must be at least dt"));
            }
            at_least("record_every", p.record_every, 1)?;
            positive("drift_tol", p.drift_tol)?;
        }
        Parameters::Scaling(p) => {
            p.family
                .parse::<CounterexampleFamily>()
                .map_err(|e| HarnessError::range("family", &p.family, &e.to_string()))?;
            for (k, x) in [("k", p.k), ("s", p.s), ("b", p.b)] {
                finite(k, x)?;
            }
            positive("tolerance", p.tolerance)?;
            if p.sizes.len() < 4 {
                return Err(HarnessError::range("N", format!("{:?}", p.sizes), "needs at least 4 sizes"));
            }
            if p.sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(HarnessError::range("N", format!("{:?}", p.sizes), "must be strictly increasing"));
            }
            for &n in &p.sizes {
                if n < 8 || n % 2 != 0 || n > 1 << 20 {
                    return Err(HarnessError::range("N", n, "each size must be even and in [8, 2^20]"));
                }
            }
        }
        Parameters::Lemmas(p) => {
            positive("theta", p.theta)?;
            positive("theta_tilde", p.theta_tilde)?;
            at_least("a_min_exp", p.a_min_exp, 0)?;
            if p.a_max_exp < p.a_min_exp + 3 || p.a_max_exp > 40 {
                return Err(HarnessError::range("a_max_exp", p.a_max_exp, "must be in [a_min_exp + 3, 40]"));
            }
            for (k, x) in [("cubic_e", p.cubic_e), ("cubic_f", p.cubic_f), ("cubic_g", p.cubic_g)] {
                finite(k, x)?;
            }
            positive("cubic_theta", p.cubic_theta)?;
            positive("linear_theta", p.linear_theta)?;
            if !(1..=10_000_000).contains(&p.cubic_range) {
                return Err(HarnessError::range("cubic_range", p.cubic_range, "must be in [1, 10^7]"));
            }
            if p.linear_n1.len() < 4 || p.linear_n1.iter().any(|&n| n <= 0 || n > 1 << 24) {
                return Err(HarnessError::range(
                    "linear_n1",
                    format!("{:?}", p.linear_n1),
                    "needs at least 4 values in [1, 2^24]",
                ));
            }
            if p.dyadic_n.is_empty() || p.dyadic_n.iter().any(|&n| n <= 100 || n > 1 << 14) {
                return Err(HarnessError::range(
                    "dyadic_n",
                    format!("{:?}", p.dyadic_n),
                    "values must lie in (100, 2^14]",
                ));
            }
            if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
                return Err(HarnessError::range("epsilon", p.epsilon, "must lie in (0, 1)"));
            }
            positive("tolerance", p.tolerance)?;
        }
        Parameters::Multipliers(p) => {
            if p.kinds.is_empty() {
                return Err(HarnessError::range("kinds", "[]", "must name at least one kind"));
            }
            for k in &p.kinds {
                k.parse::<MultiplierKind>()
                    .map_err(|e| HarnessError::range("kinds", k, &e.to_string()))?;
            }
            finite("k", p.k)?;
            finite("s", p.s)?;
            if !(p.one_minus > 2.0 / 3.0 && p.one_minus <= 1.0) {
                return Err(HarnessError::range("one_minus", p.one_minus, "must lie in (2/3, 1]"));
            }
            if !(64..=1 << 15).contains(&p.truncation) {
                return Err(HarnessError::range("truncation", p.truncation, "must be in [64, 2^15]"));
            }
            at_least("small_threshold", p.small_threshold, 0)?;
        }
        Parameters::Picard(p) => {
            for (k, x) in [("alpha", p.alpha), ("beta", p.beta), ("gamma", p.gamma), ("amplitude", p.amplitude)] {
                finite(k, x)?;
            }
            even_grid("N", p.num_modes)?;
            positive("T", p.t_final)?;
            at_least("num_time_samples", p.num_time_samples, 16)?;
            finite("k", p.k)?;
            finite("s", p.s)?;
            at_least("max_iters", p.max_iters, 1)?;
            positive("tol", p.tol)?;
            positive("cross_tol", p.cross_tol)?;
        }
        Parameters::Norms(p) => {
            at_least("members", p.members, 1)?;
            at_least("modes_per_member", p.modes_per_member, 1)?;
            if p.mode_ranges.is_empty() || p.mode_ranges.iter().any(|&r| !(1..=64).contains(&r)) {
                return Err(HarnessError::range(
                    "mode_ranges",
                    format!("{:?}", p.mode_ranges),
                    "values must lie in [1, 64]",
                ));
            }
            at_least("max_offset", p.max_offset, 0)?;
            if p.dilations.is_empty() || p.dilations.iter().any(|d| !(1..=64).contains(d)) {
                return Err(HarnessError::range(
                    "dilations",
                    format!("{:?}", p.dilations),
                    "values must lie in [1, 64]",
                ));
            }
            if !(p.spread_tol >= 1.0 && p.spread_tol.is_finite()) {
                return Err(HarnessError::range("spread_tol", p.spread_tol, "must be finite and at least 1"));
            }
        }
    }
    Ok(())
}
