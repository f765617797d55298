//! Rank-matched coupling of two copies of the reset or decrement process.
//!
//! At every jump both lists are ranked (ascending potential, ties by index)
//! and rank `j` of one copy is paired with rank `j` of the other. Three kinds
//! of coupled events exist per rank: a joint spike of both rank-`j` neurons, a
//! solo spike of the higher of the two, and a joint leak.
//!
//! Two conventions for the solo rate are provided. `MarginalPreserving` uses
//! `base^max - base^min * 1{min > 0}`, so each copy on its own follows the
//! single-network law exactly. `PaperLiteral` uses `base^|u_j - v_j|`, which
//! does not preserve the marginals (for potentials (3, 1) the leader spikes
//! at `e^2 + e` instead of `e^3`).

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::engine::RateKernel;
use crate::error::{Error, Result};
use crate::state::{isqrt_ceil, ModelSpec, PotentialList, SetKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateConvention {
    PaperLiteral,
    MarginalPreserving,
}

impl std::str::FromStr for RateConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_literal" | "paper-literal" => Ok(Self::PaperLiteral),
            "marginal_preserving" | "marginal-preserving" => Ok(Self::MarginalPreserving),
            other => Err(Error::Config(format!(
                "convention: expected `paper_literal` or `marginal_preserving`, got `{other}`"
            ))),
        }
    }
}

impl RateConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PaperLiteral => "paper_literal",
            Self::MarginalPreserving => "marginal_preserving",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoupledKind {
    /// Both rank-`j` neurons spike.
    Joint,
    /// Only the higher rank-`j` neuron spikes.
    Solo,
    /// Both rank-`j` neurons leak.
    Leak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoupledEvent {
    /// 0-based rank; `n - 1` is the top.
    pub rank: usize,
    pub kind: CoupledKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoupledState {
    pub u: PotentialList,
    pub v: PotentialList,
}

impl CoupledState {
    pub fn new(u: PotentialList, v: PotentialList) -> Result<Self> {
        if u.n() != v.n() {
            return Err(Error::SizeMismatch(u.n(), v.n()));
        }
        Ok(Self { u, v })
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    /// True iff the two lists are permutations of each other.
    pub fn is_coalesced(&self) -> bool {
        is_coalesced(&self.u, &self.v)
    }

    fn apply(&mut self, ev: CoupledEvent, ru: &[usize], rv: &[usize], spec: &ModelSpec) {
        let a = ru[ev.rank];
        let b = rv[ev.rank];
        match ev.kind {
            CoupledKind::Joint => {
                self.u.spike_in_place(a);
                self.v.spike_in_place(b);
            }
            CoupledKind::Solo => {
                if self.u.as_slice()[a] > self.v.as_slice()[b] {
                    self.u.spike_in_place(a);
                } else {
                    self.v.spike_in_place(b);
                }
            }
            CoupledKind::Leak => {
                self.u.leak_in_place(a, spec.leak);
                self.v.leak_in_place(b, spec.leak);
            }
        }
    }
}

/// Multiset equality of two potential lists.
pub fn is_coalesced(u: &PotentialList, v: &PotentialList) -> bool {
    u.n() == v.n() && u.sorted() == v.sorted()
}

fn ranks(u: &PotentialList, out: &mut Vec<usize>) {
    let p = u.as_slice();
    out.clear();
    out.extend(0..p.len());
    out.sort_by_key(|&a| p[a]);
}

/// Scaled rates `rate * base^-shift` for every non-trivial coupled event.
fn scaled_events(
    x: &CoupledState,
    ru: &[usize],
    rv: &[usize],
    kernel: &RateKernel,
    convention: RateConvention,
    out: &mut Vec<(CoupledEvent, f64)>,
) -> u64 {
    let pu = x.u.as_slice();
    let pv = x.v.as_slice();
    let shift = x.u.max_potential().max(x.v.max_potential());
    out.clear();
    for j in 0..ru.len() {
        let a = pu[ru[j]];
        let b = pv[rv[j]];
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo > 0 {
            out.push((
                CoupledEvent {
                    rank: j,
                    kind: CoupledKind::Joint,
                },
                kernel.inv_pow(shift - lo),
            ));
        }
        if lo != hi {
            let w = match convention {
                RateConvention::PaperLiteral => kernel.inv_pow(shift - (hi - lo)),
                RateConvention::MarginalPreserving => {
                    let top = kernel.inv_pow(shift - hi);
                    if lo > 0 {
                        top - kernel.inv_pow(shift - lo)
                    } else {
                        top
                    }
                }
            };
            if w > 0.0 {
                out.push((
                    CoupledEvent {
                        rank: j,
                        kind: CoupledKind::Solo,
                    },
                    w,
                ));
            }
        }
        if hi > 0 {
            out.push((
                CoupledEvent {
                    rank: j,
                    kind: CoupledKind::Leak,
                },
                kernel.inv_pow(shift),
            ));
        }
    }
    shift
}

/// Coupled events with their rates. Zero-rate and no-op events are omitted.
pub fn coupled_rates(
    x: &CoupledState,
    spec: &ModelSpec,
    convention: RateConvention,
) -> Result<Vec<(CoupledEvent, f64)>> {
    if x.u.is_null() || x.v.is_null() {
        return Err(Error::TrapState);
    }
    let kernel = RateKernel::new(*spec);
    let (mut ru, mut rv) = (Vec::new(), Vec::new());
    ranks(&x.u, &mut ru);
    ranks(&x.v, &mut rv);
    let mut ev = Vec::new();
    let shift = scaled_events(x, &ru, &rv, &kernel, convention, &mut ev);
    let scale = shift as f64 * spec.ln_base();
    Ok(ev
        .into_iter()
        .map(|(e, w)| (e, (w.ln() + scale).exp()))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingTarget {
    /// Run until both the coalescence index and the first-leak index are
    /// known and the first `2 ceil(sqrt N)` jumps have been seen.
    Resolved,
    /// As `Resolved`, but the first-leak index may stay unknown once the
    /// pair has coalesced.
    Coalesced,
    /// Run until the first copy enters the given set.
    FirstCopyHits(SetKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingStop {
    pub target: CouplingTarget,
    pub jump_budget: Option<u64>,
    pub horizon: Option<f64>,
}

impl CouplingStop {
    pub fn new(target: CouplingTarget) -> Self {
        Self {
            target,
            jump_budget: None,
            horizon: None,
        }
    }

    pub fn with_budget(mut self, jumps: u64) -> Self {
        self.jump_budget = Some(jumps);
        self
    }

    pub fn with_horizon(mut self, t: f64) -> Self {
        self.horizon = Some(t);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingStopReason {
    Target,
    /// Both copies reached the null list.
    Absorbed,
    Budget,
    Horizon,
}

impl CouplingStopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Target => "target",
            Self::Absorbed => "absorbed",
            Self::Budget => "budget",
            Self::Horizon => "horizon",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingOutcome {
    /// Jump index of coalescence (0 if the start pair is already coalesced).
    pub n_c: Option<u64>,
    /// Jump index of the first leak.
    pub n_dagger: Option<u64>,
    /// Model time of coalescence.
    pub t_nc: Option<f64>,
    /// The first `2 ceil(sqrt N)` jumps were all top-rank spikes.
    pub e1_occurred: bool,
    /// Both copies were ladders right after jump `2 ceil(sqrt N)`.
    pub ladder_at_window: Option<bool>,
    /// First time the first copy entered the target set, for `FirstCopyHits`.
    pub first_copy_hit: Option<f64>,
    pub jumps: u64,
    pub time: f64,
    pub stop_reason: CouplingStopReason,
    pub final_state: CoupledState,
}

impl CouplingOutcome {
    /// `n_c <= 2 ceil(sqrt N)` whenever the top-rank event window occurred.
    pub fn e1_bound_holds(&self) -> bool {
        let window = 2 * isqrt_ceil(self.final_state.n()) as u64;
        !self.e1_occurred || self.n_c.is_some_and(|c| c <= window)
    }

    /// Coalescence strictly before the first leak.
    pub fn coalesced_before_leak(&self) -> bool {
        match (self.n_c, self.n_dagger) {
            (Some(c), Some(d)) => c < d,
            (Some(_), None) => true,
            (None, _) => false,
        }
    }
}

/// Evolves the coupled pair from `(u0, v0)`.
///
/// A copy that reaches the null list stays there while the other one keeps
/// moving with its own marginal rates; the run ends when both are null.
pub fn simulate_coupled<R: Rng + ?Sized>(
    u0: &PotentialList,
    v0: &PotentialList,
    spec: &ModelSpec,
    convention: RateConvention,
    stop: &CouplingStop,
    rng: &mut R,
) -> Result<CouplingOutcome> {
    if u0.n() != spec.n || v0.n() != spec.n {
        return Err(Error::SizeMismatch(u0.n(), v0.n()));
    }
    if u0.is_null() || v0.is_null() {
        return Err(Error::TrapState);
    }
    let n = spec.n;
    let window = 2 * isqrt_ceil(n) as u64;
    let kernel = RateKernel::new(*spec);
    let ln_base = spec.ln_base();
    let mut x = CoupledState::new(u0.clone(), v0.clone())?;
    let (mut ru, mut rv) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut events = Vec::with_capacity(3 * n);

    let mut time = 0.0;
    let mut jumps = 0u64;
    let mut n_c = x.is_coalesced().then_some(0);
    let mut t_nc = n_c.map(|_| 0.0);
    let mut n_dagger = None;
    let mut e1 = true;
    let mut ladder_at_window = None;
    let mut first_copy_hit = match stop.target {
        CouplingTarget::FirstCopyHits(set) if set.contains(&x.u) => Some(0.0),
        _ => None,
    };

    let reason = loop {
        let window_seen = jumps >= window;
        let done = match stop.target {
            CouplingTarget::Resolved => window_seen && n_c.is_some() && n_dagger.is_some(),
            CouplingTarget::Coalesced => window_seen && n_c.is_some(),
            CouplingTarget::FirstCopyHits(_) => first_copy_hit.is_some(),
        };
        if done {
            break CouplingStopReason::Target;
        }
        if x.u.is_null() && x.v.is_null() {
            break CouplingStopReason::Absorbed;
        }
        if stop.jump_budget.is_some_and(|b| jumps >= b) {
            break CouplingStopReason::Budget;
        }

        ranks(&x.u, &mut ru);
        ranks(&x.v, &mut rv);
        let shift = scaled_events(&x, &ru, &rv, &kernel, convention, &mut events);
        let total: f64 = events.iter().map(|(_, w)| w).sum();
        if !(total > 0.0) {
            return Err(Error::NoAllowedTransition(x.u.as_slice().to_vec()));
        }
        let e: f64 = Exp1.sample(rng);
        let holding = (e.ln() - shift as f64 * ln_base - total.ln()).exp();
        if stop.horizon.is_some_and(|h| time + holding >= h) {
            time = stop.horizon.expect("checked");
            break CouplingStopReason::Horizon;
        }
        let mut r = rng.random::<f64>() * total;
        let mut chosen = events[events.len() - 1].0;
        for &(ev, w) in &events {
            if r < w {
                chosen = ev;
                break;
            }
            r -= w;
        }

        x.apply(chosen, &ru, &rv, spec);
        time += holding;
        jumps += 1;

        if jumps <= window && (chosen.rank != n - 1 || chosen.kind == CoupledKind::Leak) {
            e1 = false;
        }
        if jumps == window {
            let set = SetKind::L;
            ladder_at_window = Some(set.contains(&x.u) && set.contains(&x.v));
        }
        if n_dagger.is_none() && chosen.kind == CoupledKind::Leak {
            n_dagger = Some(jumps);
        }
        if n_c.is_none() && x.is_coalesced() {
            n_c = Some(jumps);
            t_nc = Some(time);
        }
        if let CouplingTarget::FirstCopyHits(set) = stop.target {
            if first_copy_hit.is_none() && set.contains(&x.u) {
                first_copy_hit = Some(time);
            }
        }
    };

    Ok(CouplingOutcome {
        n_c,
        n_dagger,
        t_nc,
        e1_occurred: e1 && jumps >= window,
        ladder_at_window,
        first_copy_hit,
        jumps,
        time,
        stop_reason: reason,
        final_state: x,
    })
}

/// Draws a list in the partial-ladder set: a ladder whose values above
/// `N - floor(sqrt N)` are replaced by distinct values drawn from
/// `N - floor(sqrt N) + 1 ..= N + floor(sqrt N)`, with neuron labels shuffled.
pub fn sample_w<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PotentialList> {
    use rand::seq::{index, SliceRandom};

    if n < 2 {
        return Err(Error::TooFewNeurons(n));
    }
    let r = crate::state::isqrt_floor(n);
    let keep = n - r + 1; // values 0 ..= n - r
    let lo = (n - r + 1) as u64;
    let width = 2 * r;
    let mut values: Vec<u64> = (0..keep as u64).collect();
    let extra = r - 1;
    values.extend(
        index::sample(rng, width, extra)
            .into_iter()
            .map(|k| lo + k as u64),
    );
    values.shuffle(rng);
    PotentialList::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use crate::state::LeakKind;
    use std::f64::consts::E;

    fn pl(v: &[u64]) -> PotentialList {
        PotentialList::new(v.to_vec()).unwrap()
    }

    fn rate_of(ev: &[(CoupledEvent, f64)], rank: usize, kind: CoupledKind) -> Option<f64> {
        ev.iter()
            .find(|(e, _)| e.rank == rank && e.kind == kind)
            .map(|(_, r)| *r)
    }

    #[test]
    fn literal_rates() {
        let spec = ModelSpec::natural(2, LeakKind::Reset).unwrap();
        let x = CoupledState::new(pl(&[0, 3]), pl(&[0, 1])).unwrap();
        let ev = coupled_rates(&x, &spec, RateConvention::PaperLiteral).unwrap();
        assert!((rate_of(&ev, 1, CoupledKind::Solo).unwrap() - E * E).abs() < 1e-12);
        assert!((rate_of(&ev, 1, CoupledKind::Joint).unwrap() - E).abs() < 1e-12);
        assert!((rate_of(&ev, 1, CoupledKind::Leak).unwrap() - 1.0).abs() < 1e-12);
        // rank 0 pairs two zeros: nothing happens there
        assert!(ev.iter().all(|(e, _)| e.rank == 1));
    }

    #[test]
    fn marginal_rates() {
        let spec = ModelSpec::natural(2, LeakKind::Reset).unwrap();
        let x = CoupledState::new(pl(&[0, 3]), pl(&[0, 1])).unwrap();
        let ev = coupled_rates(&x, &spec, RateConvention::MarginalPreserving).unwrap();
        let solo = rate_of(&ev, 1, CoupledKind::Solo).unwrap();
        let joint = rate_of(&ev, 1, CoupledKind::Joint).unwrap();
        assert!((solo - (E.powi(3) - E)).abs() < 1e-10);
        assert!((solo - 17.367).abs() < 1e-3);
        assert!((joint - E).abs() < 1e-12);
        assert!((solo + joint - E.powi(3)).abs() < 1e-10);
    }

    #[test]
    fn symmetric_pair_has_no_solo() {
        let spec = ModelSpec::natural(2, LeakKind::Reset).unwrap();
        let x = CoupledState::new(pl(&[0, 2]), pl(&[0, 2])).unwrap();
        for conv in [RateConvention::PaperLiteral, RateConvention::MarginalPreserving] {
            let ev = coupled_rates(&x, &spec, conv).unwrap();
            assert!(rate_of(&ev, 1, CoupledKind::Solo).is_none());
            assert!((rate_of(&ev, 1, CoupledKind::Joint).unwrap() - E * E).abs() < 1e-12);
            assert_eq!(rate_of(&ev, 1, CoupledKind::Leak), Some(1.0));
        }
    }

    #[test]
    fn marginal_rates_sum_per_neuron() {
        // every neuron of either copy spikes at base^potential in total
        let spec = ModelSpec::natural(5, LeakKind::Decrement).unwrap();
        let x = CoupledState::new(pl(&[0, 4, 1, 1, 6]), pl(&[2, 0, 0, 3, 5])).unwrap();
        let ev = coupled_rates(&x, &spec, RateConvention::MarginalPreserving).unwrap();
        let mut ru = Vec::new();
        let mut rv = Vec::new();
        ranks(&x.u, &mut ru);
        ranks(&x.v, &mut rv);
        for j in 0..5 {
            let a = x.u.as_slice()[ru[j]];
            let b = x.v.as_slice()[rv[j]];
            let joint = rate_of(&ev, j, CoupledKind::Joint).unwrap_or(0.0);
            let solo = rate_of(&ev, j, CoupledKind::Solo).unwrap_or(0.0);
            let u_rate = joint + if a > b { solo } else { 0.0 };
            let v_rate = joint + if b > a { solo } else { 0.0 };
            let want = |p: u64| if p > 0 { E.powi(p as i32) } else { 0.0 };
            assert!((u_rate - want(a)).abs() < 1e-9 * want(a).max(1.0));
            assert!((v_rate - want(b)).abs() < 1e-9 * want(b).max(1.0));
        }
    }

    #[test]
    fn coalescence_check() {
        assert!(is_coalesced(&pl(&[0, 2, 1]), &pl(&[1, 0, 2])));
        assert!(!is_coalesced(&pl(&[0, 2, 2]), &pl(&[0, 1, 2])));
    }

    #[test]
    fn already_coalesced_start() {
        let spec = ModelSpec::natural(4, LeakKind::Reset).unwrap();
        let mut rng = derive_stream(1, 0).rng();
        let o = simulate_coupled(
            &pl(&[0, 1, 2, 3]),
            &pl(&[3, 2, 1, 0]),
            &spec,
            RateConvention::MarginalPreserving,
            &CouplingStop::new(CouplingTarget::Coalesced).with_budget(1000),
            &mut rng,
        )
        .unwrap();
        assert_eq!(o.n_c, Some(0));
        assert_eq!(o.t_nc, Some(0.0));
    }

    #[test]
    fn coalescence_is_permanent() {
        let spec = ModelSpec::natural(6, LeakKind::Reset).unwrap();
        for conv in [RateConvention::PaperLiteral, RateConvention::MarginalPreserving] {
            for r in 0..200 {
                let mut rng = derive_stream(11, r).rng();
                let u = sample_w(6, &mut rng).unwrap();
                let v = sample_w(6, &mut rng).unwrap();
                let mut budget = 0;
                let mut coalesced_at = None;
                // re-run with growing budgets: once coalesced, every later prefix stays coalesced
                while budget < 60 {
                    budget += 3;
                    let mut rr = derive_stream(12, r).rng();
                    let o = simulate_coupled(
                        &u,
                        &v,
                        &spec,
                        conv,
                        &CouplingStop::new(CouplingTarget::Resolved).with_budget(budget),
                        &mut rr,
                    )
                    .unwrap();
                    let now = o.final_state.is_coalesced();
                    if let Some(c) = coalesced_at {
                        if o.jumps >= c {
                            assert!(now, "coalescence lost ({conv:?}, replica {r})");
                        }
                    } else if let Some(c) = o.n_c {
                        coalesced_at = Some(c);
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_w_lists_are_in_w() {
        let mut rng = derive_stream(5, 0).rng();
        for n in [2, 3, 4, 5, 9, 16, 25] {
            for _ in 0..500 {
                assert!(sample_w(n, &mut rng).unwrap().classify().in_w, "n = {n}");
            }
        }
    }

    #[test]
    fn e1_window_bound() {
        let spec = ModelSpec::natural(9, LeakKind::Reset).unwrap();
        let mut seen = 0;
        for r in 0..300 {
            let mut rng = derive_stream(8, r).rng();
            let u = sample_w(9, &mut rng).unwrap();
            let v = sample_w(9, &mut rng).unwrap();
            let o = simulate_coupled(
                &u,
                &v,
                &spec,
                RateConvention::MarginalPreserving,
                &CouplingStop::new(CouplingTarget::Coalesced).with_budget(100_000),
                &mut rng,
            )
            .unwrap();
            assert!(o.e1_bound_holds());
            if o.e1_occurred {
                seen += 1;
                assert_eq!(o.ladder_at_window, Some(true));
            }
        }
        assert!(seen > 0);
    }
}
