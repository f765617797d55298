//! Membrane-potential lists, the spike and leak maps, rank orders and the
//! set classifiers.
//!
//! Neurons are indexed from 0. A valid list has at least two entries and its
//! minimum is 0; every map here preserves that.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer square root, rounded down.
pub fn isqrt_floor(n: usize) -> usize {
    n.isqrt()
}

/// Integer square root, rounded up.
pub fn isqrt_ceil(n: usize) -> usize {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeakKind {
    /// A leak resets the neuron to 0.
    Reset,
    /// A leak lowers a positive neuron by one unit.
    Decrement,
}

impl LeakKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LeakKind::Reset => "reset",
            LeakKind::Decrement => "decrement",
        }
    }
}

impl fmt::Display for LeakKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LeakKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reset" => Ok(LeakKind::Reset),
            "decrement" => Ok(LeakKind::Decrement),
            other => Err(Error::Config(format!(
                "model: expected `reset` or `decrement`, got `{other}`"
            ))),
        }
    }
}

/// Network size, leak mechanism and the base of the exponential spike rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n: usize,
    pub leak: LeakKind,
    pub base: f64,
}

impl ModelSpec {
    pub fn new(n: usize, leak: LeakKind, base: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewNeurons(n));
        }
        if !base.is_finite() || base <= 1.0 {
            return Err(Error::InvalidBase(base));
        }
        Ok(Self { n, leak, base })
    }

    /// Model with the natural base `e`.
    pub fn natural(n: usize, leak: LeakKind) -> Result<Self> {
        Self::new(n, leak, std::f64::consts::E)
    }

    pub fn ln_base(&self) -> f64 {
        self.base.ln()
    }
}

/// A list of membrane potentials whose minimum is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PotentialList(Vec<u64>);

impl TryFrom<Vec<u64>> for PotentialList {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PotentialList> for Vec<u64> {
    fn from(u: PotentialList) -> Self {
        u.0
    }
}

impl fmt::Display for PotentialList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl PotentialList {
    pub fn new(potentials: Vec<u64>) -> Result<Self> {
        if potentials.len() < 2 {
            return Err(Error::TooFewNeurons(potentials.len()));
        }
        let min = *potentials.iter().min().expect("non-empty");
        if min != 0 {
            return Err(Error::NoZeroEntry(min));
        }
        Ok(Self(potentials))
    }

    /// The all-zero list, absorbing for both models.
    pub fn null(n: usize) -> Result<Self> {
        Self::new(vec![0; n])
    }

    /// The ladder `(0, 1, ..., n-1)`.
    pub fn ladder(n: usize) -> Result<Self> {
        Self::new((0..n as u64).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, a: usize) -> Option<u64> {
        self.0.get(a).copied()
    }

    pub fn is_null(&self) -> bool {
        self.0.iter().all(|&p| p == 0)
    }

    pub fn max_potential(&self) -> u64 {
        *self.0.iter().max().expect("non-empty")
    }

    /// Potentials in ascending order.
    pub fn sorted(&self) -> Vec<u64> {
        let mut s = self.0.clone();
        s.sort_unstable();
        s
    }

    fn check_index(&self, a: usize) -> Result<()> {
        if a >= self.n() {
            return Err(Error::NeuronOutOfRange { index: a, n: self.n() });
        }
        Ok(())
    }

    /// Spike of neuron `a`: it resets to 0 and every other neuron gains one unit.
    pub fn apply_spike(&self, a: usize) -> Result<Self> {
        self.check_index(a)?;
        if self.0[a] == 0 {
            return Err(Error::SilentSpike(a));
        }
        let mut out = self.clone();
        out.spike_in_place(a);
        Ok(out)
    }

    /// Leak of neuron `a`. A leak of a silent neuron returns the list unchanged.
    pub fn apply_leak(&self, a: usize, kind: LeakKind) -> Result<Self> {
        self.check_index(a)?;
        let mut out = self.clone();
        out.leak_in_place(a, kind);
        Ok(out)
    }

    pub(crate) fn spike_in_place(&mut self, a: usize) {
        for p in self.0.iter_mut() {
            *p += 1;
        }
        self.0[a] = 0;
    }

    pub(crate) fn leak_in_place(&mut self, a: usize, kind: LeakKind) {
        let p = &mut self.0[a];
        match kind {
            LeakKind::Reset => *p = 0,
            LeakKind::Decrement => *p = p.saturating_sub(1),
        }
    }

    /// Neurons sorted by ascending potential, ties broken by index.
    pub fn rank_order(&self) -> RankOrder {
        let mut order: Vec<usize> = (0..self.n()).collect();
        // stable sort keeps lower indices first among equal potentials
        order.sort_by_key(|&a| self.0[a]);
        RankOrder(order)
    }

    /// Number of neurons whose leak changes the state; with unit leak clocks
    /// this is also the total effective leak rate. Identical for both kinds.
    pub fn effective_leak_count(&self) -> usize {
        self.0.iter().filter(|&&p| p > 0).count()
    }

    /// Spike rates in max-shifted form.
    pub fn spike_weights(&self, base: f64) -> SpikeWeights {
        let shift = self.max_potential();
        let ln_base = base.ln();
        let scaled: Vec<f64> = self
            .0
            .iter()
            .map(|&p| {
                if p == 0 {
                    0.0
                } else {
                    (-((shift - p) as f64) * ln_base).exp()
                }
            })
            .collect();
        let scaled_sum = scaled.iter().sum();
        SpikeWeights {
            shift,
            ln_base,
            scaled,
            scaled_sum,
        }
    }

    pub fn classify(&self) -> SetFlags {
        SetFlags::of(self)
    }

    /// Neuron indices `(a, b)` with `u(a) = u(b)` exist.
    pub fn has_repeats(&self) -> bool {
        let s = self.sorted();
        s.windows(2).any(|w| w[0] == w[1])
    }
}

/// Permutation of neuron indices, ascending by potential with index tie-break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOrder(Vec<usize>);

impl RankOrder {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Neuron at rank `j` (0-based, so rank 0 holds a zero potential).
    pub fn neuron(&self, j: usize) -> usize {
        self.0[j]
    }

    /// Neuron with the greatest potential (largest index among ties).
    pub fn top(&self) -> usize {
        *self.0.last().expect("non-empty")
    }
}

/// Spike rates `base^u(b)` for positive neurons, stored as
/// `base^shift * scaled[b]` so the total never overflows.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeWeights {
    pub shift: u64,
    pub ln_base: f64,
    pub scaled: Vec<f64>,
    pub scaled_sum: f64,
}

impl SpikeWeights {
    /// Total spike rate; may be `inf` for very large shifts.
    pub fn total(&self) -> f64 {
        if self.scaled_sum == 0.0 {
            return 0.0;
        }
        (self.ln_total()).exp()
    }

    pub fn ln_total(&self) -> f64 {
        self.shift as f64 * self.ln_base + self.scaled_sum.ln()
    }

    /// Rate of neuron `b`; may be `inf` for very large potentials.
    pub fn weight(&self, b: usize) -> f64 {
        if self.scaled[b] == 0.0 {
            0.0
        } else {
            (self.shift as f64 * self.ln_base + self.scaled[b].ln()).exp()
        }
    }

    pub fn probability(&self, b: usize) -> f64 {
        if self.scaled_sum == 0.0 {
            0.0
        } else {
            self.scaled[b] / self.scaled_sum
        }
    }
}

/// The named subsets of the state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetKind {
    /// At least `floor(sqrt N)` positive neurons.
    S0,
    /// At most `sqrt N` silent neurons.
    S1,
    /// At least `ceil(sqrt N)` distinct positive potentials.
    S2,
    /// Sorted potentials dominate `0, 1, ..., N-1`.
    S3,
    /// All distinct and containing `1, ..., N - floor(sqrt N)`.
    W,
    /// Exactly `{0, ..., N-1}`.
    L,
}

impl SetKind {
    pub const ALL: [SetKind; 6] = [
        SetKind::S0,
        SetKind::S1,
        SetKind::S2,
        SetKind::S3,
        SetKind::W,
        SetKind::L,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SetKind::S0 => "S0",
            SetKind::S1 => "S1",
            SetKind::S2 => "S2",
            SetKind::S3 => "S3",
            SetKind::W => "W",
            SetKind::L => "L",
        }
    }

    /// Membership test without computing every flag.
    pub fn contains(self, u: &PotentialList) -> bool {
        let n = u.n();
        let p = u.as_slice();
        match self {
            SetKind::S0 => u.effective_leak_count() >= isqrt_floor(n),
            SetKind::S1 => {
                let zeros = p.iter().filter(|&&x| x == 0).count();
                // zeros <= sqrt(n)  <=>  zeros^2 <= n
                zeros * zeros <= n
            }
            SetKind::S2 => {
                let s = u.sorted();
                distinct_positive(&s) >= isqrt_ceil(n)
            }
            SetKind::S3 => dominates_ladder(&u.sorted()),
            SetKind::W => in_w_unsorted(p).unwrap_or_else(|| in_w(&u.sorted())),
            SetKind::L => is_ladder_unsorted(p).unwrap_or_else(|| is_ladder(&u.sorted())),
        }
    }
}

impl std::str::FromStr for SetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SetKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown set `{s}`")))
    }
}

fn distinct_positive(sorted: &[u64]) -> usize {
    let mut count = 0;
    let mut prev = 0;
    for &x in sorted {
        if x > 0 && x != prev {
            count += 1;
        }
        prev = x;
    }
    count
}

fn dominates_ladder(sorted: &[u64]) -> bool {
    sorted.iter().enumerate().all(|(j, &x)| x >= j as u64)
}

fn in_w(sorted: &[u64]) -> bool {
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let n = sorted.len();
    let top = (n - isqrt_floor(n)) as u64;
    // distinct with min 0: the values 1..=top are present iff sorted[j] == j for j <= top
    (1..=top).all(|v| sorted.get(v as usize) == Some(&v))
}

/// `None` when the list is too long for the bitmask.
fn in_w_unsorted(p: &[u64]) -> Option<bool> {
    let n = p.len();
    if n > 128 {
        return None;
    }
    let top = (n - isqrt_floor(n)) as u64;
    let mut seen = 0u128;
    let mut low = 0;
    for (a, &x) in p.iter().enumerate() {
        if x <= top {
            let bit = 1u128 << x;
            if seen & bit != 0 {
                return Some(false);
            }
            seen |= bit;
            low += 1;
        } else if p[..a].contains(&x) {
            return Some(false);
        }
    }
    Some(low == top + 1)
}

fn is_ladder_unsorted(p: &[u64]) -> Option<bool> {
    let n = p.len();
    if n > 128 {
        return None;
    }
    let mut seen = 0u128;
    for &x in p {
        if x >= n as u64 || seen & (1u128 << x) != 0 {
            return Some(false);
        }
        seen |= 1u128 << x;
    }
    Some(true)
}

fn is_ladder(sorted: &[u64]) -> bool {
    sorted.iter().enumerate().all(|(j, &x)| x == j as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SetFlags {
    pub is_null: bool,
    pub in_s0: bool,
    pub in_s1: bool,
    pub in_s2: bool,
    pub in_s3: bool,
    pub in_w: bool,
    pub in_l: bool,
}

impl SetFlags {
    pub fn of(u: &PotentialList) -> Self {
        let n = u.n();
        let s = u.sorted();
        let zeros = s.iter().take_while(|&&x| x == 0).count();
        Self {
            is_null: zeros == n,
            in_s0: n - zeros >= isqrt_floor(n),
            in_s1: zeros * zeros <= n,
            in_s2: distinct_positive(&s) >= isqrt_ceil(n),
            in_s3: dominates_ladder(&s),
            in_w: in_w(&s),
            in_l: is_ladder(&s),
        }
    }

    pub fn get(&self, kind: SetKind) -> bool {
        match kind {
            SetKind::S0 => self.in_s0,
            SetKind::S1 => self.in_s1,
            SetKind::S2 => self.in_s2,
            SetKind::S3 => self.in_s3,
            SetKind::W => self.in_w,
            SetKind::L => self.in_l,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(v: &[u64]) -> PotentialList {
        PotentialList::new(v.to_vec()).unwrap()
    }

    #[test]
    fn spike_map() {
        assert_eq!(pl(&[0, 3, 1]).apply_spike(1).unwrap(), pl(&[1, 0, 2]));
        assert_eq!(pl(&[0, 1]).apply_spike(1).unwrap(), pl(&[1, 0]));
    }

    #[test]
    fn spike_rejects_silent_and_out_of_range() {
        assert_eq!(pl(&[0, 3, 1]).apply_spike(0), Err(Error::SilentSpike(0)));
        assert_eq!(
            pl(&[0, 3, 1]).apply_spike(3),
            Err(Error::NeuronOutOfRange { index: 3, n: 3 })
        );
    }

    #[test]
    fn max_rank_spikes_reach_ladder() {
        let mut u = pl(&[0, 5, 2]);
        for _ in 0..2 {
            let top = u.rank_order().top();
            u = u.apply_spike(top).unwrap();
        }
        assert_eq!(u, pl(&[2, 1, 0]));
        assert!(u.classify().in_l);
    }

    #[test]
    fn leak_maps() {
        let u = pl(&[0, 3, 1]);
        assert_eq!(u.apply_leak(1, LeakKind::Reset).unwrap(), pl(&[0, 0, 1]));
        assert_eq!(u.apply_leak(1, LeakKind::Decrement).unwrap(), pl(&[0, 2, 1]));
        assert_eq!(u.apply_leak(0, LeakKind::Reset).unwrap(), u);
        assert_eq!(u.apply_leak(0, LeakKind::Decrement).unwrap(), u);
        assert!(u.apply_leak(7, LeakKind::Reset).is_err());
    }

    #[test]
    fn rank_order_ties() {
        assert_eq!(pl(&[2, 0, 2]).rank_order().as_slice(), &[1, 0, 2]);
        assert_eq!(pl(&[3, 0, 2, 1]).rank_order().as_slice(), &[1, 3, 2, 0]);
        assert_eq!(pl(&[0, 0, 0]).rank_order().as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn weights() {
        let e = std::f64::consts::E;
        let w = pl(&[0, 1]).spike_weights(e);
        assert_eq!(w.weight(0), 0.0);
        assert!((w.weight(1) - e).abs() < 1e-12);
        assert!((w.total() - e).abs() < 1e-12);

        let w = pl(&[0, 1, 2]).spike_weights(e);
        assert_eq!(w.shift, 2);
        assert!((w.scaled_sum - (1.0 / e + 1.0)).abs() < 1e-15);
        assert!((w.total() - (e + e * e)).abs() < 1e-12);
        assert!((w.total() - 10.1073).abs() < 1e-4);

        assert_eq!(pl(&[0, 0]).spike_weights(3.0).total(), 0.0);
    }

    #[test]
    fn weights_do_not_overflow() {
        let w = pl(&[0, 10_000, 9_999]).spike_weights(std::f64::consts::E);
        assert!(w.ln_total().is_finite());
        assert!((w.ln_total() - (10_000.0 + (1.0 + (-1.0f64).exp()).ln())).abs() < 1e-9);
        assert!((w.probability(1) - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn leak_counts() {
        assert_eq!(pl(&[0, 3, 1]).effective_leak_count(), 2);
        assert_eq!(pl(&[0, 0, 0]).effective_leak_count(), 0);
        assert_eq!(PotentialList::ladder(9).unwrap().effective_leak_count(), 8);
    }

    #[test]
    fn classify_examples() {
        let f = pl(&[0, 1, 2, 7]).classify();
        assert!(f.in_w && !f.in_l);
        let f = pl(&[0, 1, 1, 3]).classify();
        assert!(!f.in_w && f.in_s2);
        let f = pl(&[3, 0, 2, 1]).classify();
        assert!(f.in_l && f.in_w && f.in_s3);
        assert!(PotentialList::ladder(10).unwrap().classify().in_s3);
        let f = PotentialList::null(4).unwrap().classify();
        assert!(f.is_null && !f.in_s0 && !f.in_s1 && !f.in_s2 && !f.in_s3);
    }

    #[test]
    fn w_needs_top_of_index_range() {
        // N = 9: I_9 = {1..6}
        assert!(pl(&[0, 1, 2, 3, 4, 5, 6, 10, 20]).classify().in_w);
        assert!(!pl(&[0, 1, 2, 3, 4, 5, 7, 10, 20]).classify().in_w);
    }

    #[test]
    fn literal_s_sets_do_not_nest() {
        // S3 but fewer than ceil(sqrt 5) = 3 distinct positives
        let f = pl(&[0, 5, 5, 5, 5]).classify();
        assert!(f.in_s3 && !f.in_s2);
        // S2 with 6 silent neurons > sqrt 9
        let f = pl(&[0, 0, 0, 0, 0, 0, 1, 2, 3]).classify();
        assert!(f.in_s2 && !f.in_s1);
    }

    #[test]
    fn contains_matches_flags() {
        for v in [
            vec![0, 1, 2, 7],
            vec![0, 0, 3, 3],
            vec![2, 0, 1, 3],
            vec![0, 0, 0, 0],
        ] {
            let u = pl(&v);
            let f = u.classify();
            for k in SetKind::ALL {
                assert_eq!(k.contains(&u), f.get(k), "{u} {k:?}");
            }
        }
    }

    #[test]
    fn sqrt_helpers() {
        assert_eq!(isqrt_floor(2), 1);
        assert_eq!(isqrt_ceil(2), 2);
        assert_eq!(isqrt_floor(16), 4);
        assert_eq!(isqrt_ceil(16), 4);
        assert_eq!(isqrt_ceil(17), 5);
    }

    #[test]
    fn invalid_construction() {
        assert_eq!(PotentialList::new(vec![1, 2, 3]), Err(Error::NoZeroEntry(1)));
        assert_eq!(PotentialList::new(vec![0]), Err(Error::TooFewNeurons(1)));
        assert!(ModelSpec::new(3, LeakKind::Reset, 1.0).is_err());
        assert!(ModelSpec::new(1, LeakKind::Reset, 2.0).is_err());
    }
}
