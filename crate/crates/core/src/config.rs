//! Run configuration shared by the command line and the library entry points.
//!
//! A configuration is assembled from an optional JSON file and command-line
//! overrides, then resolved into a [`RunConfig`] with every default filled
//! in. The resolved form is what gets echoed into outputs; feeding an echo
//! back in as a config file reproduces it byte for byte.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coupling::{sample_w, RateConvention};
use crate::engine::sample_s0;
use crate::error::{Error, Result};
use crate::state::{LeakKind, ModelSpec, PotentialList};

pub const DEFAULT_EXTINCTION_BUDGET: u64 = 100_000_000;
pub const DEFAULT_CAP: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    Extinction,
    Occupancy,
    Ladder,
    Coupling,
    AuxOccupancy,
    Cn,
    Oracle,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Simulate,
        Experiment::Extinction,
        Experiment::Occupancy,
        Experiment::Ladder,
        Experiment::Coupling,
        Experiment::AuxOccupancy,
        Experiment::Cn,
        Experiment::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Extinction => "extinction",
            Experiment::Occupancy => "occupancy",
            Experiment::Ladder => "ladder",
            Experiment::Coupling => "coupling",
            Experiment::AuxOccupancy => "aux-occupancy",
            Experiment::Cn => "cn",
            Experiment::Oracle => "oracle",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!(
                "format: expected `json` or `csv`, got `{other}`"
            ))),
        }
    }
}

/// How each replica's initial list is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitSpec {
    Ladder,
    /// Random list with at least `floor(sqrt N)` positive neurons.
    S0,
    /// Random partial ladder.
    W,
    Explicit(PotentialList),
}

impl InitSpec {
    /// Initial list for an `n`-neuron network.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<PotentialList> {
        match self {
            InitSpec::Ladder => PotentialList::ladder(n),
            InitSpec::S0 => sample_s0(n, rng),
            InitSpec::W => sample_w(n, rng),
            InitSpec::Explicit(u) => {
                if u.n() != n {
                    return Err(Error::SizeMismatch(u.n(), n));
                }
                Ok(u.clone())
            }
        }
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::Ladder => f.write_str("ladder"),
            InitSpec::S0 => f.write_str("s0"),
            InitSpec::W => f.write_str("w"),
            InitSpec::Explicit(u) => {
                let parts: Vec<String> = u.as_slice().iter().map(u64::to_string).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for InitSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ladder" => return Ok(InitSpec::Ladder),
            "s0" | "s0_random" => return Ok(InitSpec::S0),
            "w" => return Ok(InitSpec::W),
            _ => {}
        }
        let list = s.strip_prefix("explicit:").ok_or_else(|| {
            Error::Config(format!(
                "init: expected `ladder`, `s0`, `w` or `explicit:<list>`, got `{s}`"
            ))
        })?;
        let values = list
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("init: `{x}` is not a potential")))
            })
            .collect::<Result<Vec<u64>>>()?;
        let u = PotentialList::new(values).map_err(|e| Error::Config(format!("init: {e}")))?;
        Ok(InitSpec::Explicit(u))
    }
}

impl Serialize for InitSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InitSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Partial configuration, as read from a file or collected from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub experiment: Option<Experiment>,
    pub n: Option<usize>,
    pub model: Option<LeakKind>,
    pub base: Option<f64>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub init: Option<InitSpec>,
    pub horizon: Option<f64>,
    pub jump_budget: Option<u64>,
    pub convention: Option<RateConvention>,
    pub cap: Option<u64>,
    pub t: Option<f64>,
    pub burn_in: Option<f64>,
    pub run_time: Option<f64>,
    pub marginal: Option<bool>,
    pub allow_censored: Option<bool>,
    pub format: Option<OutputFormat>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub log: Option<PathBuf>,
}

impl ConfigLayer {
    /// Values set in `top` win.
    pub fn overlay(self, top: ConfigLayer) -> ConfigLayer {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigLayer { $($f: top.$f.or(self.$f)),* } };
        }
        pick!(
            experiment,
            n,
            model,
            base,
            seed,
            replicas,
            init,
            horizon,
            jump_budget,
            convention,
            cap,
            t,
            burn_in,
            run_time,
            marginal,
            allow_censored,
            format,
            workers,
            out,
            log
        )
    }
}

/// Reads a JSON config file. Unknown keys are rejected by name.
pub fn load_config(path: &Path) -> Result<ConfigLayer> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ConfigLayer> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Fully resolved configuration.
///
/// `workers`, `out` and `log` only affect scheduling and where files go, so
/// they are left out of the echo; outputs do not depend on them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub model: LeakKind,
    pub base: f64,
    pub seed: Option<u64>,
    pub replicas: usize,
    pub init: InitSpec,
    pub horizon: Option<f64>,
    pub jump_budget: Option<u64>,
    pub convention: RateConvention,
    pub cap: u64,
    pub t: f64,
    pub burn_in: f64,
    pub run_time: f64,
    pub marginal: bool,
    pub allow_censored: bool,
    pub format: OutputFormat,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub log: Option<PathBuf>,
}

fn bad(key: &str, msg: impl fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

impl RunConfig {
    /// Defaults for `experiment` on an `n`-neuron reset network with base `e`.
    pub fn new(experiment: Experiment, n: usize, seed: u64) -> Self {
        ConfigLayer {
            experiment: Some(experiment),
            n: Some(n),
            seed: Some(seed),
            ..Default::default()
        }
        .resolve()
        .expect("defaults are valid")
    }

    pub fn resolve_layer(layer: ConfigLayer) -> Result<Self> {
        layer.resolve()
    }

    pub fn spec(&self) -> Result<ModelSpec> {
        ModelSpec::new(self.n, self.model, self.base)
    }

    /// Seed, which every experiment except the oracle requires.
    pub fn master_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| bad("seed", "missing; every stochastic run needs an explicit seed"))
    }

    /// JSON echo embedded in outputs.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn echo_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(bad("n", Error::TooFewNeurons(self.n)));
        }
        if !self.base.is_finite() || self.base <= 1.0 {
            return Err(bad("base", Error::InvalidBase(self.base)));
        }
        if self.replicas < 1 {
            return Err(bad("replicas", "must be at least 1"));
        }
        if self.workers < 1 {
            return Err(bad("workers", "must be at least 1"));
        }
        if let InitSpec::Explicit(u) = &self.init {
            if u.n() != self.n {
                return Err(bad(
                    "init",
                    format!("list has {} entries but n = {}", u.n(), self.n),
                ));
            }
            if u.is_null() {
                return Err(bad("init", "the null list is a trap"));
            }
        }
        if self.experiment != Experiment::Oracle {
            self.master_seed()?;
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) {
                return Err(bad("horizon", "must be positive"));
            }
        }
        if !(self.t > 0.0) {
            return Err(bad("t", "must be positive"));
        }
        if !(self.burn_in > 0.0 && self.run_time > self.burn_in) {
            return Err(bad("run_time", "need run_time > burn_in > 0"));
        }
        if self.experiment == Experiment::Oracle
            && (!(2..=3).contains(&self.n) || self.cap < self.n as u64)
        {
            return Err(bad("n", Error::OracleRange { n: self.n, cap: self.cap }));
        }
        Ok(())
    }
}

impl ConfigLayer {
    pub fn resolve(self) -> Result<RunConfig> {
        let experiment = self
            .experiment
            .ok_or_else(|| bad("experiment", "missing"))?;
        let n = self.n.ok_or_else(|| bad("n", "missing"))?;
        let default_init = match experiment {
            Experiment::Occupancy | Experiment::Ladder | Experiment::AuxOccupancy => InitSpec::S0,
            Experiment::Coupling => InitSpec::W,
            _ => InitSpec::Ladder,
        };
        let default_budget = match experiment {
            Experiment::Extinction | Experiment::Cn => Some(DEFAULT_EXTINCTION_BUDGET),
            _ => None,
        };
        let cfg = RunConfig {
            experiment,
            n,
            model: self.model.unwrap_or(LeakKind::Reset),
            base: self.base.unwrap_or(std::f64::consts::E),
            seed: self.seed,
            replicas: self.replicas.unwrap_or(1),
            init: self.init.unwrap_or(default_init),
            horizon: self.horizon,
            jump_budget: self.jump_budget.or(default_budget),
            convention: self.convention.unwrap_or(RateConvention::MarginalPreserving),
            cap: self.cap.unwrap_or(DEFAULT_CAP),
            t: self.t.unwrap_or(1.0),
            burn_in: self.burn_in.unwrap_or(1.0),
            run_time: self.run_time.unwrap_or(10.0),
            marginal: self.marginal.unwrap_or(false),
            allow_censored: self.allow_censored.unwrap_or(false),
            format: self.format.unwrap_or_default(),
            workers: self.workers.unwrap_or(1),
            out: self.out,
            log: self.log,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let text = r#"{"experiment":"extinction","n":2,"model":"reset","seed":42,"replicas":10,"init":"explicit:1,0"}"#;
        let cfg = parse_config(text).unwrap().resolve().unwrap();
        let echo = cfg.echo();
        let again = parse_config(&echo).unwrap().resolve().unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.echo(), echo);
    }

    #[test]
    fn missing_seed_is_rejected() {
        let err = parse_config(r#"{"experiment":"extinction","n":2}"#)
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
        // the oracle is deterministic
        parse_config(r#"{"experiment":"oracle","n":3}"#)
            .unwrap()
            .resolve()
            .unwrap();
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config(r#"{"n":2,"sede":1}"#).unwrap_err();
        assert!(err.to_string().contains("sede"), "{err}");
    }

    #[test]
    fn init_without_zero_is_rejected() {
        let err = parse_config(r#"{"init":"explicit:1,2,3"}"#).unwrap_err();
        assert!(err.to_string().contains("min"), "{err}");
        let err = "explicit:1,2,3".parse::<InitSpec>().unwrap_err();
        assert!(err.to_string().contains("zero"), "{err}");
    }

    #[test]
    fn init_strings() {
        for s in ["ladder", "s0", "w", "explicit:0,1,2,7"] {
            assert_eq!(s.parse::<InitSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config(r#"{"experiment":"extinction","n":2,"seed":1,"replicas":5}"#).unwrap();
        let flags = ConfigLayer {
            replicas: Some(9),
            ..Default::default()
        };
        let cfg = file.overlay(flags).resolve().unwrap();
        assert_eq!(cfg.replicas, 9);
        assert_eq!(cfg.seed, Some(1));
    }

    #[test]
    fn workers_are_not_echoed() {
        let mut a = RunConfig::new(Experiment::Extinction, 3, 7);
        let mut b = a.clone();
        a.workers = 1;
        b.workers = 4;
        assert_eq!(a.echo(), b.echo());
        assert!(!a.echo().contains("workers"));
    }

    #[test]
    fn mismatched_init_length() {
        let err = parse_config(r#"{"experiment":"simulate","n":3,"seed":1,"init":"explicit:0,1"}"#)
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("init"), "{err}");
    }
}
