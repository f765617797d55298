//! Replica ensembles and their summaries.
//!
//! Replica `i` always draws from `derive_stream(seed, i)`: the initial list
//! from child stream 1 (and 2 for the second copy of a coupled pair), the
//! dynamics from the main stream. Records are merged in replica order, and
//! every aggregate is a pure function of the records.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, RunConfig};
use crate::coupling::{
    sample_w, simulate_coupled, CouplingStop, CouplingStopReason, CouplingTarget,
};
use crate::engine::{simulate, Process, SimOptions, StopCondition, StopReason};
use crate::error::{Error, Result};
use crate::oracle::{oracle_report, OracleReport};
use crate::rng::{derive_stream, RngStream, DERIVATION_RULE};
use crate::state::{isqrt_ceil, ModelSpec, SetKind};
use crate::stats::{
    c_level, estimate_c, ks_exp1, ks_exp1_scaled, ks_two_sample, ks_two_sample_critical99,
    mean_se, order_quantile, proportion, MeanEstimate, Proportion, QuantileEstimate,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Replica index reserved for the bootstrap stream.
const BOOTSTRAP_STREAM: u64 = u64::MAX;

/// Runs `f(0), ..., f(replicas - 1)` on `workers` threads and returns the
/// results in replica order. The first error aborts the run.
pub fn run_replicas<T, F>(replicas: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("workers: {e}")))?;
    pool.install(|| (0..replicas as u64).into_par_iter().map(&f).collect())
}

/// Lower bound `(N - 1 + e^(N-2)) / (N - 1)^3` on `c`.
pub fn c_lower_bound(n: usize) -> f64 {
    let m = (n - 1) as f64;
    (m + (n as f64 - 2.0).exp()) / (m * m * m)
}

/// Horizon `N^-1/4 + N^-2 + e^-(N - N^1/4) + e^-(N - N^1/2)` for ladder hitting.
pub fn ladder_horizon(n: usize) -> f64 {
    let x = n as f64;
    x.powf(-0.25) + x.powi(-2) + (-(x - x.powf(0.25))).exp() + (-(x - x.sqrt())).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub replica: u64,
    pub tau: Option<f64>,
    pub jumps: u64,
    pub z_spike: u64,
    pub z_leak: u64,
    pub stop_reason: StopReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    pub p: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionAggregates {
    pub replicas: usize,
    pub absorbed: usize,
    pub censored: usize,
    /// Over absorbed replicas only.
    pub tau: Option<MeanEstimate>,
    pub quantiles: Vec<QuantilePoint>,
    /// `P(tau > c) = e^-1` estimate, when at least 100 replicas absorbed.
    pub c: Option<QuantileEstimate>,
    pub c_bound: f64,
    /// KS distance of `tau / mean` to Exp(1).
    pub ks_exp1: Option<f64>,
    /// KS distance of `tau / c` to Exp(1).
    pub ks_exp1_c: Option<f64>,
    pub mean_over_c: Option<f64>,
}

impl ExtinctionAggregates {
    pub fn compute(records: &[ReplicaRecord], n: usize, seed: u64) -> Result<Self> {
        let taus: Vec<f64> = records.iter().filter_map(|r| r.tau).collect();
        let tau = (taus.len() >= 2).then(|| mean_se(&taus)).transpose()?;
        let quantiles = if taus.is_empty() {
            Vec::new()
        } else {
            [0.1, 0.25, 0.5, 0.75, 0.9, c_level()]
                .into_iter()
                .map(|p| {
                    Ok(QuantilePoint {
                        p,
                        value: order_quantile(&taus, p)?,
                    })
                })
                .collect::<Result<_>>()?
        };
        let c = if taus.len() >= crate::stats::MIN_C_SAMPLES {
            let mut rng = derive_stream(seed, BOOTSTRAP_STREAM).rng();
            Some(estimate_c(&taus, &mut rng)?)
        } else {
            None
        };
        let positive = taus.len() >= 2 && taus.iter().all(|&x| x > 0.0);
        Ok(Self {
            replicas: records.len(),
            absorbed: taus.len(),
            censored: records.len() - taus.len(),
            quantiles,
            c_bound: c_lower_bound(n),
            ks_exp1: positive.then(|| ks_exp1(&taus)).transpose()?,
            ks_exp1_c: match (&c, positive) {
                (Some(c), true) => Some(ks_exp1_scaled(&taus, c.value)?),
                _ => None,
            },
            mean_over_c: match (&tau, &c) {
                (Some(m), Some(c)) => Some(m.mean / c.value),
                _ => None,
            },
            tau,
            c,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionResult {
    pub records: Vec<ReplicaRecord>,
    pub aggregates: ExtinctionAggregates,
}

impl ExtinctionResult {
    pub fn taus(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.tau).collect()
    }
}

fn init_stream(stream: &RngStream, copy: u64) -> crate::rng::SimRng {
    stream.child(copy).rng()
}

/// Independent trapping times from `cfg.init`.
///
/// Without `allow_censored`, the first replica to exhaust the jump budget
/// aborts the whole run.
pub fn extinction_ensemble(cfg: &RunConfig) -> Result<ExtinctionResult> {
    let spec = cfg.spec()?;
    let seed = cfg.master_seed()?;
    let stop = StopCondition {
        horizon: cfg.horizon,
        jump_budget: cfg.jump_budget,
        target: None,
    };
    let opts = SimOptions::default();
    let records = run_replicas(cfg.replicas, cfg.workers, |i| {
        let stream = derive_stream(seed, i);
        let u0 = cfg.init.draw(spec.n, &mut init_stream(&stream, 1))?;
        let mut rng = stream.rng();
        let s = simulate(&u0, &spec, &stop, &opts, &mut rng)?;
        if s.stop_reason == StopReason::Budget && !cfg.allow_censored {
            return Err(Error::Censored {
                replica: i,
                budget: cfg.jump_budget.unwrap_or(0),
            });
        }
        Ok(ReplicaRecord {
            replica: i,
            tau: s.tau,
            jumps: s.jumps,
            z_spike: s.z_spike,
            z_leak: s.z_leak,
            stop_reason: s.stop_reason,
        })
    })?;
    let aggregates = ExtinctionAggregates::compute(&records, spec.n, seed)?;
    Ok(ExtinctionResult {
        records,
        aggregates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnResult {
    pub records: Vec<ReplicaRecord>,
    pub aggregates: ExtinctionAggregates,
    pub bound: f64,
    /// One-sided 0.99 bootstrap lower bound on `c` is at least `bound`.
    pub bound_holds: bool,
}

/// Extinction ensemble reported as an estimate of `c` against its lower bound.
pub fn cn_estimate(cfg: &RunConfig) -> Result<CnResult> {
    let ext = extinction_ensemble(cfg)?;
    let c = ext.aggregates.c.clone().ok_or(Error::TooFewSamples {
        need: crate::stats::MIN_C_SAMPLES,
        got: ext.aggregates.absorbed,
    })?;
    let bound = c_lower_bound(cfg.n);
    Ok(CnResult {
        bound_holds: c.lower99 >= bound,
        bound,
        records: ext.records,
        aggregates: ext.aggregates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyRecord {
    pub replica: u64,
    pub survived: bool,
    pub in_w: bool,
    pub jumps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyResult {
    pub t: f64,
    pub records: Vec<OccupancyRecord>,
    pub survivors: usize,
    /// Fraction of survivors whose state at `t` is in W.
    pub conditional: Proportion,
}

impl OccupancyResult {
    pub fn from_records(t: f64, records: Vec<OccupancyRecord>) -> Result<Self> {
        let survivors = records.iter().filter(|r| r.survived).count();
        if survivors == 0 {
            return Err(Error::NoSurvivors(t));
        }
        let hits = records.iter().filter(|r| r.survived && r.in_w).count();
        Ok(Self {
            t,
            survivors,
            conditional: proportion(hits, survivors)?,
            records,
        })
    }
}

/// `P(state at t in W | tau > t)` by filtering surviving replicas.
pub fn occupancy(cfg: &RunConfig) -> Result<OccupancyResult> {
    let spec = cfg.spec()?;
    let seed = cfg.master_seed()?;
    let stop = StopCondition::absorbed().with_horizon(cfg.t);
    let opts = SimOptions::default();
    let records = run_replicas(cfg.replicas, cfg.workers, |i| {
        let stream = derive_stream(seed, i);
        let u0 = cfg.init.draw(spec.n, &mut init_stream(&stream, 1))?;
        let s = simulate(&u0, &spec, &stop, &opts, &mut stream.rng())?;
        let survived = s.stop_reason == StopReason::Horizon;
        Ok(OccupancyRecord {
            replica: i,
            survived,
            in_w: survived && SetKind::W.contains(&s.final_state),
            jumps: s.jumps,
        })
    })?;
    OccupancyResult::from_records(cfg.t, records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRecord {
    pub replica: u64,
    /// First entrance into the ladder set, if before the horizon.
    pub hit_time: Option<f64>,
    pub jumps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderResult {
    pub t_prime: f64,
    pub horizon: f64,
    pub records: Vec<LadderRecord>,
    /// Fraction of replicas in the ladder set by `t_prime`.
    pub fraction: Proportion,
}

impl LadderResult {
    pub fn from_records(n: usize, records: Vec<LadderRecord>) -> Result<Self> {
        let t_prime = ladder_horizon(n);
        let hits = records
            .iter()
            .filter(|r| r.hit_time.is_some_and(|t| t <= t_prime))
            .count();
        Ok(Self {
            t_prime,
            horizon: 2.0 * t_prime,
            fraction: proportion(hits, records.len())?,
            records,
        })
    }
}

/// First hitting times of the ladder set, censored at twice the horizon.
pub fn ladder_hitting(cfg: &RunConfig) -> Result<LadderResult> {
    let spec = cfg.spec()?;
    let seed = cfg.master_seed()?;
    let stop = StopCondition::absorbed()
        .with_horizon(2.0 * ladder_horizon(spec.n))
        .with_target(SetKind::L);
    let opts = SimOptions::default();
    let records = run_replicas(cfg.replicas, cfg.workers, |i| {
        let stream = derive_stream(seed, i);
        let u0 = cfg.init.draw(spec.n, &mut init_stream(&stream, 1))?;
        let s = simulate(&u0, &spec, &stop, &opts, &mut stream.rng())?;
        Ok(LadderRecord {
            replica: i,
            hit_time: (s.stop_reason == StopReason::Target).then_some(s.time),
            jumps: s.jumps,
        })
    })?;
    LadderResult::from_records(spec.n, records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRecord {
    pub replica: u64,
    pub n_c: Option<u64>,
    /// Unknown when no leak happened before the run stopped.
    pub n_dagger: Option<u64>,
    pub t_nc: Option<f64>,
    pub e1: bool,
    pub ladder_at_window: Option<bool>,
    pub jumps: u64,
    pub stop_reason: CouplingStopReason,
}

impl CouplingRecord {
    pub fn coalesced_before_leak(&self) -> bool {
        match (self.n_c, self.n_dagger) {
            (Some(c), Some(d)) => c < d,
            (Some(_), None) => true,
            (None, _) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingResult {
    /// Number of initial jumps covered by the top-rank event window.
    pub window: u64,
    pub records: Vec<CouplingRecord>,
    pub coalesced: usize,
    pub before_leak: Proportion,
    pub median_t_nc: Option<f64>,
    pub e1_count: usize,
    /// Runs where the window event occurred but coalescence came later.
    pub e1_violations: usize,
}

impl CouplingResult {
    pub fn from_records(n: usize, records: Vec<CouplingRecord>) -> Result<Self> {
        let window = 2 * isqrt_ceil(n) as u64;
        let t_nc: Vec<f64> = records.iter().filter_map(|r| r.t_nc).collect();
        let before = records.iter().filter(|r| r.coalesced_before_leak()).count();
        let e1: Vec<&CouplingRecord> = records.iter().filter(|r| r.e1).collect();
        Ok(Self {
            window,
            coalesced: t_nc.len(),
            before_leak: proportion(before, records.len())?,
            median_t_nc: (!t_nc.is_empty())
                .then(|| order_quantile(&t_nc, 0.5))
                .transpose()?,
            e1_count: e1.len(),
            e1_violations: e1
                .iter()
                .filter(|r| !r.n_c.is_some_and(|c| c <= window))
                .count(),
            records,
        })
    }
}

/// Coupled runs from random pairs of partial ladders, stopped at coalescence.
pub fn coupling_stats(cfg: &RunConfig) -> Result<CouplingResult> {
    let spec = cfg.spec()?;
    let seed = cfg.master_seed()?;
    let mut stop = CouplingStop::new(CouplingTarget::Coalesced);
    stop.jump_budget = cfg.jump_budget;
    stop.horizon = cfg.horizon;
    let records = run_replicas(cfg.replicas, cfg.workers, |i| {
        let stream = derive_stream(seed, i);
        let u0 = sample_w(spec.n, &mut init_stream(&stream, 1))?;
        let v0 = sample_w(spec.n, &mut init_stream(&stream, 2))?;
        let o = simulate_coupled(&u0, &v0, &spec, cfg.convention, &stop, &mut stream.rng())?;
        if !o.e1_bound_holds() {
            return Err(Error::Invariant(format!(
                "replica {i}: top-rank window occurred but n_c = {:?}",
                o.n_c
            )));
        }
        Ok(CouplingRecord {
            replica: i,
            n_c: o.n_c,
            n_dagger: o.n_dagger,
            t_nc: o.t_nc,
            e1: o.e1_occurred,
            ladder_at_window: o.ladder_at_window,
            jumps: o.jumps,
            stop_reason: o.stop_reason,
        })
    })?;
    CouplingResult::from_records(spec.n, records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalRecord {
    pub replica: u64,
    pub coupled_hit: f64,
    pub standalone_hit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalResult {
    pub records: Vec<MarginalRecord>,
    pub ks: f64,
    pub critical99: f64,
    pub below_critical: bool,
}

impl MarginalResult {
    pub fn from_records(records: Vec<MarginalRecord>) -> Result<Self> {
        let a: Vec<f64> = records.iter().map(|r| r.coupled_hit).collect();
        let b: Vec<f64> = records.iter().map(|r| r.standalone_hit).collect();
        let ks = ks_two_sample(&a, &b)?;
        let critical99 = ks_two_sample_critical99(a.len(), b.len());
        Ok(Self {
            records,
            ks,
            critical99,
            below_critical: ks < critical99,
        })
    }
}

/// Ladder-hitting time of the first copy of a coupled pair against the
/// same start simulated on its own. Both start from the same random partial
/// ladder; the two samples are compared with a two-sample KS test.
pub fn coupling_marginal(cfg: &RunConfig) -> Result<MarginalResult> {
    let spec = cfg.spec()?;
    let seed = cfg.master_seed()?;
    let mut stop = CouplingStop::new(CouplingTarget::FirstCopyHits(SetKind::L));
    stop.jump_budget = cfg.jump_budget;
    let single = StopCondition {
        horizon: None,
        jump_budget: cfg.jump_budget,
        target: Some(SetKind::L),
    };
    let opts = SimOptions::default();
    let records = run_replicas(cfg.replicas, cfg.workers, |i| {
        let stream = derive_stream(seed, i);
        let u0 = sample_w(spec.n, &mut init_stream(&stream, 1))?;
        let v0 = sample_w(spec.n, &mut init_stream(&stream, 2))?;
        let o = simulate_coupled(&u0, &v0, &spec, cfg.convention, &stop, &mut stream.rng())?;
        let s = simulate(&u0, &spec, &single, &opts, &mut stream.child(3).rng())?;
        let (Some(coupled_hit), StopReason::Target) = (o.first_copy_hit, s.stop_reason) else {
            return Err(Error::Invariant(format!(
                "replica {i}: ladder not reached (coupled {:?}, single {:?})",
                o.stop_reason, s.stop_reason
            )));
        };
        Ok(MarginalRecord {
            replica: i,
            coupled_hit,
            standalone_hit: s.time,
        })
    })?;
    MarginalResult::from_records(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxRecord {
    pub replica: u64,
    /// Fraction of `[burn_in, run_time]` spent in W.
    pub occupation: f64,
    pub jumps: u64,
    pub null_visits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxResult {
    pub burn_in: f64,
    pub run_time: f64,
    pub records: Vec<AuxRecord>,
    pub occupation: MeanEstimate,
    pub null_visits: u64,
}

impl AuxResult {
    pub fn from_records(burn_in: f64, run_time: f64, records: Vec<AuxRecord>) -> Result<Self> {
        let occ: Vec<f64> = records.iter().map(|r| r.occupation).collect();
        let occupation = if occ.len() >= 2 {
            mean_se(&occ)?
        } else {
            MeanEstimate {
                count: occ.len(),
                mean: occ.first().copied().unwrap_or(f64::NAN),
                se: f64::NAN,
                ci99: [f64::NAN, f64::NAN],
            }
        };
        Ok(Self {
            burn_in,
            run_time,
            null_visits: records.iter().map(|r| r.null_visits).sum(),
            occupation,
            records,
        })
    }
}

/// Time spent in W by one auxiliary trajectory over `[burn_in, run_time]`,
/// as a fraction of `run_time - burn_in`.
pub fn aux_trajectory<R: rand::Rng + ?Sized>(
    u0: &crate::state::PotentialList,
    spec: &ModelSpec,
    burn_in: f64,
    run_time: f64,
    rng: &mut R,
) -> Result<(f64, u64, u64)> {
    let mut proc = Process::new(u0.clone(), *spec, true)?;
    let mut in_w = SetKind::W.contains(proc.state());
    let mut occupied = 0.0;
    let mut null_visits = 0;
    loop {
        let jump = proc.peek(rng)?;
        let start = proc.time();
        let end = (start + jump.holding).min(run_time);
        if in_w && end > burn_in {
            occupied += end - start.max(burn_in);
        }
        if start + jump.holding >= run_time {
            break;
        }
        proc.apply(jump);
        if proc.state().is_null() {
            null_visits += 1;
        }
        in_w = SetKind::W.contains(proc.state());
    }
    Ok((occupied / (run_time - burn_in), proc.jumps(), null_visits))
}

/// Time-average occupation of W by the auxiliary process.
pub fn aux_occupancy(cfg: &RunConfig) -> Result<AuxResult> {
    let spec = cfg.spec()?;
    let seed = cfg.master_seed()?;
    let records = run_replicas(cfg.replicas, cfg.workers, |i| {
        let stream = derive_stream(seed, i);
        let u0 = cfg.init.draw(spec.n, &mut init_stream(&stream, 1))?;
        let (occupation, jumps, null_visits) =
            aux_trajectory(&u0, &spec, cfg.burn_in, cfg.run_time, &mut stream.rng())?;
        Ok(AuxRecord {
            replica: i,
            occupation,
            jumps,
            null_visits,
        })
    })?;
    AuxResult::from_records(cfg.burn_in, cfg.run_time, records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRecord {
    pub replica: u64,
    pub tau: Option<f64>,
    pub time: f64,
    pub jumps: u64,
    pub z_spike: u64,
    pub z_leak: u64,
    pub stop_reason: StopReason,
    pub final_state: crate::state::PotentialList,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub records: Vec<SimulateRecord>,
    /// Event log of replica 0, when requested.
    #[serde(skip)]
    pub events: Option<Vec<crate::engine::EventRecord>>,
}

/// Plain trajectories; replica 0 keeps its event log if `log_first` is set.
pub fn simulate_runs(cfg: &RunConfig, log_first: bool) -> Result<SimulateResult> {
    let spec = cfg.spec()?;
    let seed = cfg.master_seed()?;
    let stop = StopCondition {
        horizon: cfg.horizon,
        jump_budget: cfg.jump_budget,
        target: None,
    };
    let out = run_replicas(cfg.replicas, cfg.workers, |i| {
        let stream = derive_stream(seed, i);
        let u0 = cfg.init.draw(spec.n, &mut init_stream(&stream, 1))?;
        let opts = SimOptions {
            log_events: log_first && i == 0,
            ..Default::default()
        };
        let s = simulate(&u0, &spec, &stop, &opts, &mut stream.rng())?;
        Ok((
            SimulateRecord {
                replica: i,
                tau: s.tau,
                time: s.time,
                jumps: s.jumps,
                z_spike: s.z_spike,
                z_leak: s.z_leak,
                stop_reason: s.stop_reason,
                final_state: s.final_state,
            },
            s.events,
        ))
    })?;
    let mut events = None;
    let mut records = Vec::with_capacity(out.len());
    for (r, ev) in out {
        if ev.is_some() {
            events = ev;
        }
        records.push(r);
    }
    Ok(SimulateResult { records, events })
}

/// Result of any experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Simulate(SimulateResult),
    Extinction(ExtinctionResult),
    Cn(CnResult),
    Occupancy(OccupancyResult),
    Ladder(LadderResult),
    Coupling(CouplingResult),
    CouplingMarginal(MarginalResult),
    AuxOccupancy(AuxResult),
    Oracle(OracleReport),
}

/// Dispatches on `cfg.experiment`.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    Ok(match cfg.experiment {
        Experiment::Simulate => Outcome::Simulate(simulate_runs(cfg, cfg.log.is_some())?),
        Experiment::Extinction => Outcome::Extinction(extinction_ensemble(cfg)?),
        Experiment::Cn => Outcome::Cn(cn_estimate(cfg)?),
        Experiment::Occupancy => Outcome::Occupancy(occupancy(cfg)?),
        Experiment::Ladder => Outcome::Ladder(ladder_hitting(cfg)?),
        Experiment::Coupling if cfg.marginal => Outcome::CouplingMarginal(coupling_marginal(cfg)?),
        Experiment::Coupling => Outcome::Coupling(coupling_stats(cfg)?),
        Experiment::AuxOccupancy => Outcome::AuxOccupancy(aux_occupancy(cfg)?),
        Experiment::Oracle => Outcome::Oracle(oracle_report(&cfg.spec()?, cfg.cap)?),
    })
}

/// Everything written to a JSON output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub rng_rule: &'static str,
    pub config: &'a RunConfig,
    pub result: &'a Outcome,
}

impl<'a> Report<'a> {
    pub fn new(config: &'a RunConfig, result: &'a Outcome) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            rng_rule: DERIVATION_RULE,
            config,
            result,
        }
    }
}
