//! Exact event-driven simulation of the two leaky spiking networks.
//!
//! Every jump draws one exponential holding time from the total rate and then
//! picks the event proportionally to its rate (direct method). Spike rates are
//! handled in max-shifted form: with `m` the largest potential, the scaled
//! total is `s = sum base^(u(b) - m) + leaks * base^-m`, and the holding time
//! is `exp(ln E - m ln base - ln s)` for a unit exponential `E`.
//!
//! In auxiliary mode the single transition into the null list (the leak of
//! the last positive neuron under reset, or of the last positive neuron at
//! potential 1 under decrement) is removed from the leak total.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::state::{isqrt_floor, LeakKind, ModelSpec, PotentialList, SetFlags, SetKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Spike,
    Leak,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Spike => "spike",
            EventKind::Leak => "leak",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub neuron: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub holding: f64,
    pub event: Event,
}

/// Largest table of `base^-k` kept in memory.
const MAX_TABLE: usize = 1 << 16;

/// Rate evaluation for one model, with `base^-k` tabulated up to underflow.
#[derive(Debug, Clone)]
pub struct RateKernel {
    spec: ModelSpec,
    ln_base: f64,
    inv_pow: Vec<f64>,
}

impl RateKernel {
    pub fn new(spec: ModelSpec) -> Self {
        let ln_base = spec.ln_base();
        let mut inv_pow = Vec::new();
        for k in 0..MAX_TABLE {
            let v = (-(k as f64) * ln_base).exp();
            inv_pow.push(v);
            if v == 0.0 {
                break;
            }
        }
        Self {
            spec,
            ln_base,
            inv_pow,
        }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// `base^-d`.
    #[inline]
    pub fn inv_pow(&self, d: u64) -> f64 {
        match self.inv_pow.get(d as usize) {
            Some(&v) => v,
            None => self.inv_pow_slow(d),
        }
    }

    #[cold]
    fn inv_pow_slow(&self, d: u64) -> f64 {
        if self.inv_pow.last() == Some(&0.0) {
            0.0
        } else {
            (-(d as f64) * self.ln_base).exp()
        }
    }

    /// Draws the next holding time and event from `u`.
    pub fn next_event<R: Rng + ?Sized>(
        &self,
        u: &PotentialList,
        aux: bool,
        rng: &mut R,
    ) -> Result<Jump> {
        let p = u.as_slice();
        let mut m = 0;
        let mut argmax = 0;
        let mut positives = 0usize;
        for (b, &x) in p.iter().enumerate() {
            if x > m {
                m = x;
                argmax = b;
            }
            positives += usize::from(x > 0);
        }
        if m == 0 {
            return Err(Error::TrapState);
        }
        let spike_scaled: f64 = p
            .iter()
            .filter(|&&x| x > 0)
            .map(|&x| self.inv_pow(m - x))
            .sum();
        let forbidden = aux
            && positives == 1
            && match self.spec.leak {
                LeakKind::Reset => true,
                LeakKind::Decrement => m == 1,
            };
        let leaks = positives - usize::from(forbidden);
        let unit = self.inv_pow(m);
        let leak_scaled = leaks as f64 * unit;
        let total = spike_scaled + leak_scaled;
        if !(total > 0.0) {
            return Err(Error::NoAllowedTransition(p.to_vec()));
        }

        let e: f64 = Exp1.sample(rng);
        let holding = if unit >= f64::MIN_POSITIVE {
            e * unit / total
        } else {
            (e.ln() - m as f64 * self.ln_base - total.ln()).exp()
        };

        let x = rng.random::<f64>() * total;
        let event = if x < spike_scaled || leaks == 0 {
            // the top neuron's interval comes first: it carries most of the mass
            let mut acc = 1.0;
            let mut chosen = argmax;
            if x >= acc {
                for (b, &pb) in p.iter().enumerate() {
                    if pb > 0 && b != argmax {
                        acc += self.inv_pow(m - pb);
                        chosen = b;
                        if x < acc {
                            break;
                        }
                    }
                }
            }
            Event {
                neuron: chosen,
                kind: EventKind::Spike,
            }
        } else {
            let r = ((x - spike_scaled) / leak_scaled).clamp(0.0, 1.0);
            let k = ((r * leaks as f64) as usize).min(leaks - 1);
            let neuron = p
                .iter()
                .enumerate()
                .filter(|(_, &pb)| pb > 0)
                .nth(k)
                .map(|(b, _)| b)
                .expect("k-th positive neuron exists");
            Event {
                neuron,
                kind: EventKind::Leak,
            }
        };
        Ok(Jump { holding, event })
    }
}

/// One draw of the next holding time and event. Builds a fresh [`RateKernel`];
/// loops should construct the kernel once instead.
pub fn next_event<R: Rng + ?Sized>(
    u: &PotentialList,
    spec: &ModelSpec,
    aux: bool,
    rng: &mut R,
) -> Result<Jump> {
    RateKernel::new(*spec).next_event(u, aux, rng)
}

/// A single trajectory being stepped jump by jump.
#[derive(Debug, Clone)]
pub struct Process {
    kernel: RateKernel,
    aux: bool,
    state: PotentialList,
    time: f64,
    jumps: u64,
    z_spike: u64,
    z_leak: u64,
}

impl Process {
    pub fn new(u0: PotentialList, spec: ModelSpec, aux: bool) -> Result<Self> {
        if u0.n() != spec.n {
            return Err(Error::SizeMismatch(u0.n(), spec.n));
        }
        if aux && u0.is_null() {
            return Err(Error::TrapState);
        }
        Ok(Self {
            kernel: RateKernel::new(spec),
            aux,
            state: u0,
            time: 0.0,
            jumps: 0,
            z_spike: 0,
            z_leak: 0,
        })
    }

    pub fn state(&self) -> &PotentialList {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn jumps(&self) -> u64 {
        self.jumps
    }

    pub fn counts(&self) -> (u64, u64) {
        (self.z_spike, self.z_leak)
    }

    pub fn is_absorbed(&self) -> bool {
        self.state.is_null()
    }

    /// Draws the next jump without applying it.
    pub fn peek<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Jump> {
        self.kernel.next_event(&self.state, self.aux, rng)
    }

    /// Applies a jump previously drawn by [`Process::peek`] (or forced by a caller).
    pub fn apply(&mut self, jump: Jump) {
        match jump.event.kind {
            EventKind::Spike => {
                self.state.spike_in_place(jump.event.neuron);
                self.z_spike += 1;
            }
            EventKind::Leak => {
                self.state.leak_in_place(jump.event.neuron, self.kernel.spec.leak);
                self.z_leak += 1;
            }
        }
        self.time += jump.holding;
        self.jumps += 1;
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Jump> {
        let jump = self.peek(rng)?;
        self.apply(jump);
        Ok(jump)
    }
}

/// When a run ends. Reaching the null list always ends a non-auxiliary run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StopCondition {
    pub horizon: Option<f64>,
    pub jump_budget: Option<u64>,
    pub target: Option<SetKind>,
}

impl StopCondition {
    pub fn absorbed() -> Self {
        Self::default()
    }

    pub fn with_horizon(mut self, t: f64) -> Self {
        self.horizon = Some(t);
        self
    }

    pub fn with_budget(mut self, jumps: u64) -> Self {
        self.jump_budget = Some(jumps);
        self
    }

    pub fn with_target(mut self, set: SetKind) -> Self {
        self.target = Some(set);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Absorbed,
    Horizon,
    Budget,
    Target,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Absorbed => "absorbed",
            StopReason::Horizon => "horizon",
            StopReason::Budget => "budget",
            StopReason::Target => "target",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Run the auxiliary dynamics with transitions into the null list removed.
    pub aux: bool,
    /// Sets whose first-entry times are recorded.
    pub record: Vec<SetKind>,
    /// Keep the full event log.
    pub log_events: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// 1-based jump index.
    pub index: u64,
    pub time: f64,
    pub neuron: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub stop_reason: StopReason,
    /// Trapping time; present iff the run was absorbed.
    pub tau: Option<f64>,
    /// Model time at which the run stopped.
    pub time: f64,
    pub jumps: u64,
    pub z_spike: u64,
    pub z_leak: u64,
    pub hit_times: BTreeMap<SetKind, f64>,
    pub final_state: PotentialList,
    pub events: Option<Vec<EventRecord>>,
}

/// Runs one trajectory from `u0` until the stop condition fires.
pub fn simulate<R: Rng + ?Sized>(
    u0: &PotentialList,
    spec: &ModelSpec,
    stop: &StopCondition,
    opts: &SimOptions,
    rng: &mut R,
) -> Result<TrajectorySummary> {
    if u0.is_null() {
        return Err(Error::TrapState);
    }
    if opts.aux && stop.horizon.is_none() && stop.jump_budget.is_none() {
        return Err(Error::UnboundedRun(
            "auxiliary runs never absorb; set a horizon or a jump budget",
        ));
    }
    let mut proc = Process::new(u0.clone(), *spec, opts.aux)?;
    let mut hit_times = BTreeMap::new();
    let mut events = opts.log_events.then(Vec::new);

    let record_hits = |u: &PotentialList, t: f64, hits: &mut BTreeMap<SetKind, f64>| {
        if opts.record.iter().all(|k| hits.contains_key(k)) {
            return;
        }
        let flags = SetFlags::of(u);
        for &k in &opts.record {
            if flags.get(k) {
                hits.entry(k).or_insert(t);
            }
        }
    };
    record_hits(proc.state(), 0.0, &mut hit_times);

    let reason = loop {
        if let Some(target) = stop.target {
            if target.contains(proc.state()) {
                break StopReason::Target;
            }
        }
        if let Some(budget) = stop.jump_budget {
            if proc.jumps() >= budget {
                break StopReason::Budget;
            }
        }
        let jump = match proc.peek(rng) {
            Ok(j) => j,
            Err(Error::TrapState) => break StopReason::Absorbed,
            Err(e) => return Err(e),
        };
        if let Some(h) = stop.horizon {
            if proc.time() + jump.holding >= h {
                proc.time = h;
                break StopReason::Horizon;
            }
        }
        proc.apply(jump);
        if let Some(ev) = events.as_mut() {
            ev.push(EventRecord {
                index: proc.jumps(),
                time: proc.time(),
                neuron: jump.event.neuron,
                kind: jump.event.kind,
            });
        }
        if !opts.record.is_empty() {
            let t = proc.time();
            record_hits(proc.state(), t, &mut hit_times);
        }
    };

    Ok(TrajectorySummary {
        stop_reason: reason,
        tau: (reason == StopReason::Absorbed).then_some(proc.time()),
        time: proc.time(),
        jumps: proc.jumps(),
        z_spike: proc.z_spike,
        z_leak: proc.z_leak,
        hit_times,
        final_state: proc.state,
        events,
    })
}

/// Draws an initial list with at least `floor(sqrt n)` positive neurons.
///
/// The number of positive neurons is uniform on `floor(sqrt n) ..= n-1`, the
/// positive neurons are a uniform subset and each gets a potential uniform on
/// `1 ..= n`.
pub fn sample_s0<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PotentialList> {
    if n < 2 {
        return Err(Error::TooFewNeurons(n));
    }
    let k = rng.random_range(isqrt_floor(n)..n);
    let mut p = vec![0u64; n];
    for a in index::sample(rng, n, k) {
        p[a] = rng.random_range(1..=n as u64);
    }
    PotentialList::new(p)
}

/// Writes an event log as CSV with header `n,time,neuron,kind`.
pub fn write_event_log<W: Write>(events: &[EventRecord], mut out: W) -> Result<()> {
    writeln!(out, "n,time,neuron,kind")?;
    for e in events {
        writeln!(
            out,
            "{},{},{},{}",
            e.index,
            sig17(e.time),
            e.neuron,
            e.kind.as_str()
        )?;
    }
    Ok(())
}
