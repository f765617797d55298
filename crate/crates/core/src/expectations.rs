//! Versioned acceptance expectations and the metrics they are checked against.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::Outcome;

/// The expectations file shipped with the crate.
pub const BUILTIN: &str = include_str!("../expectations.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|x - value| <= tolerance`.
    Approx,
    /// `x >= value - tolerance`.
    AtLeast,
    /// `x <= value + tolerance`.
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceUnit {
    #[default]
    Absolute,
    /// Multiples of the standard error reported with the measurement.
    Se,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub metric: String,
    pub relation: Relation,
    pub value: f64,
    #[serde(default)]
    pub tolerance: f64,
    #[serde(default)]
    pub tolerance_unit: ToleranceUnit,
    pub provenance: String,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub observed: f64,
    pub se: Option<f64>,
    pub allowed: f64,
}

impl Expectation {
    pub fn check(&self, observed: f64, se: Option<f64>) -> Result<Verdict> {
        let allowed = match self.tolerance_unit {
            ToleranceUnit::Absolute => self.tolerance,
            ToleranceUnit::Se => {
                let se = se.ok_or_else(|| {
                    Error::Config(format!("metric `{}` has no standard error", self.metric))
                })?;
                self.tolerance * se
            }
        };
        let pass = match self.relation {
            Relation::Approx => (observed - self.value).abs() <= allowed,
            Relation::AtLeast => observed >= self.value - allowed,
            Relation::AtMost => observed <= self.value + allowed,
        };
        Ok(Verdict {
            pass,
            observed,
            se,
            allowed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub schema_version: u32,
    pub criteria: BTreeMap<String, Expectation>,
}

impl Expectations {
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN).expect("bundled expectations parse")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("expectations: {e}")))
    }

    pub fn get(&self, id: &str) -> Result<&Expectation> {
        self.criteria
            .get(id)
            .ok_or_else(|| Error::Config(format!("no expectation with id `{id}`")))
    }
}

impl Outcome {
    /// Named scalar from the outcome, with its standard error when defined.
    pub fn metric(&self, name: &str) -> Option<(f64, Option<f64>)> {
        let ext = match self {
            Outcome::Extinction(r) => Some(&r.aggregates),
            Outcome::Cn(r) => Some(&r.aggregates),
            _ => None,
        };
        if let Some(a) = ext {
            match name {
                "tau_mean" => return a.tau.map(|m| (m.mean, Some(m.se))),
                "ks_exp1" => return a.ks_exp1.map(|d| (d, None)),
                "ks_exp1_c" => return a.ks_exp1_c.map(|d| (d, None)),
                "c" => return a.c.as_ref().map(|c| (c.value, None)),
                "c_lower99" => return a.c.as_ref().map(|c| (c.lower99, None)),
                "c_bound_margin" => return a.c.as_ref().map(|c| (c.lower99 - a.c_bound, None)),
                "mean_over_c" => return a.mean_over_c.map(|x| (x, None)),
                "censored" => return Some((a.censored as f64, None)),
                _ => {}
            }
        }
        match (self, name) {
            (Outcome::Occupancy(r), "w_given_survival") => {
                Some((r.conditional.estimate, Some(r.conditional.se)))
            }
            (Outcome::Occupancy(r), "survivors") => Some((r.survivors as f64, None)),
            (Outcome::Ladder(r), "ladder_fraction") => {
                Some((r.fraction.estimate, Some(r.fraction.se)))
            }
            (Outcome::Coupling(r), "nc_before_leak") => {
                Some((r.before_leak.estimate, Some(r.before_leak.se)))
            }
            (Outcome::Coupling(r), "median_t_nc") => r.median_t_nc.map(|m| (m, None)),
            (Outcome::Coupling(r), "e1_violations") => Some((r.e1_violations as f64, None)),
            (Outcome::CouplingMarginal(r), "marginal_ks_ratio") => {
                Some((r.ks / r.critical99, None))
            }
            (Outcome::AuxOccupancy(r), "aux_w_occupation") => {
                Some((r.occupation.mean, Some(r.occupation.se)))
            }
            (Outcome::AuxOccupancy(r), "null_visits") => Some((r.null_visits as f64, None)),
            (Outcome::Oracle(r), "cap_relative_change") => {
                Some((r.checks.cap_relative_change, None))
            }
            _ => None,
        }
    }
}
