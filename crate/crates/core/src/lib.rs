//! Exact stochastic simulation of finite networks of spiking neurons with
//! leakage, plus an exact small-network oracle and the statistics used to
//! study their trapping times.

pub mod cli;
pub mod config;
pub mod coupling;
pub mod engine;
pub mod error;
pub mod expectations;
pub mod experiments;
pub mod format;
pub mod oracle;
pub mod output;
pub mod rng;
pub mod state;
pub mod stats;

pub use config::{Experiment, InitSpec, RunConfig};
pub use coupling::{simulate_coupled, CoupledState, CouplingOutcome, RateConvention};
pub use engine::{simulate, Process, SimOptions, StopCondition, StopReason, TrajectorySummary};
pub use error::{Error, Result};
pub use oracle::{closed_form_n2, OracleModel};
pub use rng::{derive_stream, RngStream};
pub use state::{LeakKind, ModelSpec, PotentialList, SetFlags, SetKind};
