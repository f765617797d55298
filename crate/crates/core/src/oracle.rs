//! Exact answers for n = 2 and n = 3.
//!
//! The chain is lumped over permutations: a state is the ascending list of
//! potentials, which is exact because both dynamics commute with relabelling.
//! Potentials are truncated at `cap`; a spike that would push a neuron past
//! `cap` leaves it at `cap`, so total rates are untouched.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{LeakKind, ModelSpec, PotentialList};

/// Above this many expected uniformized steps survival switches to
/// scaling and squaring.
const UNIFORMIZATION_MAX_STEPS: f64 = 600.0;

#[derive(Debug, Clone)]
pub struct OracleModel {
    spec: ModelSpec,
    cap: u64,
    states: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
    /// Off-diagonal rates per source state, merged per target.
    rows: Vec<Vec<(usize, f64)>>,
    exit: Vec<f64>,
    absorbing: usize,
}

impl OracleModel {
    pub fn build(spec: &ModelSpec, cap: u64) -> Result<Self> {
        let n = spec.n;
        if !(2..=3).contains(&n) || cap < n as u64 {
            return Err(Error::OracleRange { n, cap });
        }
        let mut states = Vec::new();
        match n {
            2 => states.extend((0..=cap).map(|k| vec![0, k])),
            _ => {
                for a in 0..=cap {
                    for b in a..=cap {
                        states.push(vec![0, a, b]);
                    }
                }
            }
        }
        let index: HashMap<Vec<u64>, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let absorbing = index[&vec![0; n]];

        let mut rows = Vec::with_capacity(states.len());
        let mut exit = Vec::with_capacity(states.len());
        for s in &states {
            let mut row: BTreeMap<usize, f64> = BTreeMap::new();
            for a in 0..n {
                if s[a] == 0 {
                    continue;
                }
                let mut t = s.clone();
                for (b, p) in t.iter_mut().enumerate() {
                    *p = if b == a { 0 } else { (*p + 1).min(cap) };
                }
                t.sort_unstable();
                *row.entry(index[&t]).or_default() += spec.base.powf(s[a] as f64);

                let mut t = s.clone();
                t[a] = match spec.leak {
                    LeakKind::Reset => 0,
                    LeakKind::Decrement => t[a] - 1,
                };
                t.sort_unstable();
                *row.entry(index[&t]).or_default() += 1.0;
            }
            let me = index[s];
            // permutation self-loops do not move the lumped chain
            row.remove(&me);
            exit.push(row.values().sum());
            rows.push(row.into_iter().collect());
        }
        Ok(Self {
            spec: *spec,
            cap,
            states,
            index,
            rows,
            exit,
            absorbing,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Sorted states in lexicographic order.
    pub fn states(&self) -> &[Vec<u64>] {
        &self.states
    }

    pub fn absorbing_index(&self) -> usize {
        self.absorbing
    }

    /// Off-diagonal generator entries of row `i`.
    pub fn rates(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn exit_rate(&self, i: usize) -> f64 {
        self.exit[i]
    }

    pub fn index_of(&self, u: &PotentialList) -> Result<usize> {
        if u.n() != self.spec.n {
            return Err(Error::SizeMismatch(u.n(), self.spec.n));
        }
        self.index
            .get(&u.sorted())
            .copied()
            .ok_or_else(|| Error::OutsideWindow(u.as_slice().to_vec()))
    }

    /// Dense generator; rows sum to zero.
    pub fn generator(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut q = DMatrix::zeros(m, m);
        for i in 0..m {
            for &(j, r) in &self.rows[i] {
                q[(i, j)] = r;
            }
            q[(i, i)] = -self.exit[i];
        }
        q
    }

    /// Expected trapping time from every state (0 at the absorbing state).
    ///
    /// Solved on the embedded jump chain, `(I - P) t = 1 / q`, which keeps
    /// every coefficient in [0, 1] however large the rates get.
    pub fn mean_absorption(&self) -> Result<Vec<f64>> {
        let m = self.len();
        let transient: Vec<usize> = (0..m).filter(|&i| i != self.absorbing).collect();
        let mut pos = vec![usize::MAX; m];
        for (k, &i) in transient.iter().enumerate() {
            pos[i] = k;
        }
        let t = transient.len();
        let mut a = DMatrix::<f64>::identity(t, t);
        let mut rhs = DVector::<f64>::zeros(t);
        for (k, &i) in transient.iter().enumerate() {
            let q = self.exit[i];
            rhs[k] = 1.0 / q;
            for &(j, r) in &self.rows[i] {
                if j != self.absorbing {
                    a[(k, pos[j])] -= r / q;
                }
            }
        }
        let lu = a.clone().lu();
        let mut x = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("restricted generator".into()))?;
        for _ in 0..2 {
            let r = &rhs - &a * &x;
            if let Some(dx) = lu.solve(&r) {
                x += dx;
            }
        }
        let mut out = vec![0.0; m];
        for (k, &i) in transient.iter().enumerate() {
            out[i] = x[k];
        }
        Ok(out)
    }

    pub fn mean_from(&self, u0: &PotentialList) -> Result<f64> {
        let i = self.index_of(u0)?;
        Ok(self.mean_absorption()?[i])
    }

    /// `P(tau > t)` from `u0`.
    pub fn survival(&self, u0: &PotentialList, t: f64) -> Result<f64> {
        let i = self.index_of(u0)?;
        if i == self.absorbing {
            return Ok(0.0);
        }
        if t <= 0.0 {
            return Ok(1.0);
        }
        if self.uniformization_rate() * t <= UNIFORMIZATION_MAX_STEPS {
            self.survival_uniformized(u0, t)
        } else {
            self.survival_squaring(u0, t)
        }
    }

    pub fn survival_curve(&self, u0: &PotentialList, ts: &[f64]) -> Result<Vec<f64>> {
        ts.iter().map(|&t| self.survival(u0, t)).collect()
    }

    fn uniformization_rate(&self) -> f64 {
        self.exit.iter().cloned().fold(0.0, f64::max)
    }

    /// Survival by uniformization, truncating the Poisson sum once the
    /// neglected mass is below 1e-13. Only practical while `Lambda t` is
    /// moderate.
    pub fn survival_uniformized(&self, u0: &PotentialList, t: f64) -> Result<f64> {
        let i0 = self.index_of(u0)?;
        if i0 == self.absorbing {
            return Ok(0.0);
        }
        let lambda = self.uniformization_rate();
        let lt = lambda * t;
        if lt > 700.0 {
            return Err(Error::Config(format!(
                "uniformization needs Lambda t <= 700, got {lt:.3e}"
            )));
        }
        let m = self.len();
        let mut v = vec![0.0; m];
        v[i0] = 1.0;
        let mut w = (-lt).exp();
        let mut acc_w = w;
        let mut s = w * (1.0 - v[self.absorbing]);
        let mut k = 0u64;
        while 1.0 - acc_w > 1e-13 || (k as f64) < lt {
            let mut next = vec![0.0; m];
            for (a, &va) in v.iter().enumerate() {
                if va == 0.0 {
                    continue;
                }
                next[a] += va * (1.0 - self.exit[a] / lambda);
                for &(b, r) in &self.rows[a] {
                    next[b] += va * r / lambda;
                }
            }
            v = next;
            k += 1;
            w *= lt / k as f64;
            acc_w += w;
            s += w * (1.0 - v[self.absorbing]);
        }
        Ok(s)
    }

    /// `exp(hQ) - I`, by a Taylor series at a step small enough that
    /// `||sQ|| <= 1/2`, then doubled with `A <- 2A + A^2`.
    pub fn increment(&self, h: f64) -> DMatrix<f64> {
        let q = self.generator();
        let norm = 2.0 * self.uniformization_rate() * h;
        let mut squarings = 0u32;
        let mut s = h;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
            s = h / 2f64.powi(squarings as i32);
        }
        let sq = &q * s;
        let mut term = sq.clone();
        let mut a = sq.clone();
        for j in 2..=20 {
            term = &term * &sq / j as f64;
            a += &term;
        }
        for _ in 0..squarings {
            let a2 = &a * &a;
            a = a * 2.0 + a2;
        }
        a
    }

    /// Survival from the increment matrix, `1 - [exp(tQ)]_{u0, null}`.
    pub fn survival_squaring(&self, u0: &PotentialList, t: f64) -> Result<f64> {
        let i0 = self.index_of(u0)?;
        if i0 == self.absorbing {
            return Ok(0.0);
        }
        let a = self.increment(t);
        Ok((1.0 - a[(i0, self.absorbing)]).clamp(0.0, 1.0))
    }

    /// `int_0^inf P(tau > t) dt` by composite Simpson on panels of width
    /// `h`, stopping once the survival drops below 1e-14.
    pub fn integrated_survival(&self, u0: &PotentialList, h: f64) -> Result<f64> {
        let i0 = self.index_of(u0)?;
        if i0 == self.absorbing {
            return Ok(0.0);
        }
        let half = self.increment(h / 2.0) + DMatrix::identity(self.len(), self.len());
        let full = &half * &half;
        let abs = self.absorbing;
        let alive = |p: &nalgebra::RowDVector<f64>| -> f64 {
            p.iter().enumerate().filter(|&(i, _)| i != abs).map(|(_, x)| x).sum()
        };
        let mut p = nalgebra::RowDVector::<f64>::zeros(self.len());
        p[i0] = 1.0;
        let mut total = 0.0;
        let mut s0 = 1.0;
        while s0 >= 1e-14 {
            let mid = &p * &half;
            let end = &p * &full;
            let s_end = alive(&end);
            total += h / 6.0 * (s0 + 4.0 * alive(&mid) + s_end);
            if total.is_nan() || s_end > s0 + 1e-12 {
                return Err(Error::Singular("survival propagation diverged".into()));
            }
            p = end;
            s0 = s_end;
        }
        Ok(total)
    }
}

/// Expected trapping time of the two-neuron chain from `(0, k)`, from the
/// one-step recursion. Exact, no truncation.
pub fn closed_form_n2(spec: &ModelSpec, k: u64) -> Result<f64> {
    if spec.n != 2 || k == 0 {
        return Err(Error::Config(format!(
            "closed form needs n = 2 and k >= 1, got n = {}, k = {k}",
            spec.n
        )));
    }
    let e1 = 1.0;
    let b = spec.base;
    match spec.leak {
        LeakKind::Reset => {
            let bk = b.powf(k as f64);
            Ok(1.0 / (bk + 1.0) + bk / (bk + 1.0) * e1)
        }
        LeakKind::Decrement => {
            let mut prev = e1;
            for j in 2..=k {
                let bj = b.powf(j as f64);
                prev = (1.0 + bj * e1 + prev) / (bj + 1.0);
            }
            Ok(prev)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleChecks {
    /// Relative change of the ladder mean when the cap is doubled.
    pub cap_relative_change: f64,
    pub cap_converged: bool,
    /// n = 2 only: closed form and linear solve agree to 1e-10 for every
    /// `k <= min(cap, 15)`.
    pub closed_form_agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub leak_kind: LeakKind,
    pub base: f64,
    pub cap: u64,
    pub means: BTreeMap<String, f64>,
    pub checks: OracleChecks,
}

pub const CAP_TOLERANCE: f64 = 1e-8;
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;

pub fn oracle_report(spec: &ModelSpec, cap: u64) -> Result<OracleReport> {
    let model = OracleModel::build(spec, cap)?;
    let means = model.mean_absorption()?;
    let ladder = PotentialList::ladder(spec.n)?;
    let base_mean = means[model.index_of(&ladder)?];
    let wide = OracleModel::build(spec, 2 * cap)?;
    let wide_mean = wide.mean_from(&ladder)?;
    let change = ((wide_mean - base_mean) / wide_mean).abs();

    let closed_form_agree = (spec.n == 2).then(|| {
        (1..=cap.min(15)).all(|k| {
            let exact = closed_form_n2(spec, k).expect("n = 2");
            let solved = means[model.index[&vec![0, k]]];
            ((solved - exact) / exact).abs() <= CLOSED_FORM_TOLERANCE
        })
    });

    Ok(OracleReport {
        n: spec.n,
        leak_kind: spec.leak,
        base: spec.base,
        cap,
        means: model
            .states
            .iter()
            .zip(&means)
            .map(|(s, &m)| {
                let label = PotentialList::new(s.clone()).expect("sorted state").to_string();
                (label, m)
            })
            .collect(),
        checks: OracleChecks {
            cap_relative_change: change,
            cap_converged: change < CAP_TOLERANCE,
            closed_form_agree,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn pl(v: &[u64]) -> PotentialList {
        PotentialList::new(v.to_vec()).unwrap()
    }

    fn spec(n: usize, leak: LeakKind, base: f64) -> ModelSpec {
        ModelSpec::new(n, leak, base).unwrap()
    }

    #[test]
    fn range_guard() {
        let s = spec(4, LeakKind::Reset, E);
        assert!(OracleModel::build(&s, 20).is_err());
        let s = spec(3, LeakKind::Reset, E);
        assert!(OracleModel::build(&s, 2).is_err());
    }

    #[test]
    fn n2_enumeration_and_rates() {
        let s = spec(2, LeakKind::Reset, E);
        let m = OracleModel::build(&s, 20).unwrap();
        assert_eq!(m.len(), 21);
        assert_eq!(m.absorbing_index(), 0);
        // (0,3): spike lands on (0,1), leak on (0,0)
        let r = m.rates(3);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], (0, 1.0));
        assert_eq!(r[1].0, 1);
        assert!((r[1].1 - E.powi(3)).abs() < 1e-12);

        let s = spec(2, LeakKind::Decrement, E);
        let m = OracleModel::build(&s, 20).unwrap();
        let r = m.rates(3);
        assert_eq!(r[0].0, 1);
        assert_eq!(r[1], (2, 1.0));
        assert!((r[0].1 - E.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn generator_rows_sum_to_zero() {
        for leak in [LeakKind::Reset, LeakKind::Decrement] {
            let m = OracleModel::build(&spec(3, leak, E), 12).unwrap();
            let q = m.generator();
            for i in 0..m.len() {
                let row: f64 = q.row(i).iter().sum();
                assert!(row.abs() <= 1e-9 * m.exit_rate(i).max(1.0));
                for j in 0..m.len() {
                    if i != j {
                        assert!(q[(i, j)] >= 0.0);
                    }
                }
            }
            assert!(q.row(m.absorbing_index()).iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn transitions_follow_the_maps() {
        let s = spec(3, LeakKind::Decrement, E);
        let m = OracleModel::build(&s, 10).unwrap();
        for (i, st) in m.states().iter().enumerate() {
            let u = PotentialList::new(st.clone()).unwrap();
            for a in 0..3 {
                if st[a] == 0 {
                    continue;
                }
                let mut spiked = u.apply_spike(a).unwrap().sorted();
                for p in &mut spiked {
                    *p = (*p).min(10);
                }
                let j = m.index[&spiked];
                assert!(j == i || m.rates(i).iter().any(|&(t, _)| t == j));
                let leaked = u.apply_leak(a, s.leak).unwrap().sorted();
                let j = m.index[&leaked];
                assert!(m.rates(i).iter().any(|&(t, _)| t == j));
            }
        }
    }

    #[test]
    fn n2_means() {
        let s = spec(2, LeakKind::Reset, E);
        let m = OracleModel::build(&s, 20).unwrap();
        assert!((m.mean_from(&pl(&[0, 1])).unwrap() - 1.0).abs() < 1e-12);
        assert!((closed_form_n2(&s, 3).unwrap() - 1.0).abs() < 1e-15);

        let s = spec(2, LeakKind::Decrement, E);
        let m = OracleModel::build(&s, 20).unwrap();
        let want = 1.0 + 1.0 / (E * E + 1.0);
        assert!((m.mean_from(&pl(&[2, 0])).unwrap() - want).abs() < 1e-12);
        assert!((closed_form_n2(&s, 2).unwrap() - 1.11920).abs() < 1e-5);
    }

    #[test]
    fn closed_form_matches_solve() {
        for leak in [LeakKind::Reset, LeakKind::Decrement] {
            for base in [E, 2.0, 3.0] {
                let s = spec(2, leak, base);
                let m = OracleModel::build(&s, 20).unwrap();
                let means = m.mean_absorption().unwrap();
                for k in 1..=15u64 {
                    let exact = closed_form_n2(&s, k).unwrap();
                    let rel = ((means[k as usize] - exact) / exact).abs();
                    assert!(rel < 1e-10, "{leak} base {base} k {k}: {rel:e}");
                }
            }
        }
    }

    #[test]
    fn decrement_means_peak_at_two() {
        // E_k - 1 = E_{k-1} / (b^k + 1): above 1, largest at k = 2, then back towards 1
        let s = spec(2, LeakKind::Decrement, E);
        let e2 = closed_form_n2(&s, 2).unwrap();
        let mut prev = 1.0;
        for k in 2..=30 {
            let e = closed_form_n2(&s, k).unwrap();
            assert!(e > 1.0 && e <= e2);
            assert!((e - 1.0 - prev / (E.powi(k as i32) + 1.0)).abs() < 1e-15);
            prev = e;
        }
        assert!(closed_form_n2(&s, 3).unwrap() < e2);
    }

    #[test]
    fn cap_doubling_converges() {
        for leak in [LeakKind::Reset, LeakKind::Decrement] {
            let r = oracle_report(&spec(3, leak, E), 20).unwrap();
            assert!(r.checks.cap_converged, "{leak}: {:e}", r.checks.cap_relative_change);
        }
    }

    #[test]
    fn n3_known_means() {
        let m = OracleModel::build(&spec(3, LeakKind::Reset, E), 20).unwrap();
        assert!((m.mean_from(&pl(&[0, 1, 2])).unwrap() - 3.414536).abs() < 1e-5);
        let m = OracleModel::build(&spec(3, LeakKind::Decrement, E), 20).unwrap();
        assert!((m.mean_from(&pl(&[0, 1, 2])).unwrap() - 8.229929).abs() < 1e-5);
    }

    #[test]
    fn survival_edges() {
        let m = OracleModel::build(&spec(3, LeakKind::Reset, E), 12).unwrap();
        assert_eq!(m.survival(&pl(&[0, 1, 2]), 0.0).unwrap(), 1.0);
        assert_eq!(m.survival(&pl(&[0, 0, 0]), 0.0).unwrap(), 0.0);
        assert_eq!(m.survival(&pl(&[0, 0, 0]), 3.0).unwrap(), 0.0);
        assert!(m.survival(&pl(&[0, 1, 13]), 1.0).is_err());
    }

    #[test]
    fn squaring_agrees_with_uniformization() {
        for leak in [LeakKind::Reset, LeakKind::Decrement] {
            let m = OracleModel::build(&spec(3, leak, E), 5).unwrap();
            for t in [0.05, 0.3, 1.0, 1.8] {
                let u = pl(&[0, 1, 2]);
                let a = m.survival_uniformized(&u, t).unwrap();
                let b = m.survival_squaring(&u, t).unwrap();
                assert!((a - b).abs() < 1e-10, "{leak} t {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn survival_decreases() {
        let m = OracleModel::build(&spec(3, LeakKind::Reset, E), 20).unwrap();
        let ts = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
        let s = m.survival_curve(&pl(&[0, 1, 2]), &ts).unwrap();
        assert!(s.windows(2).all(|w| w[1] < w[0]));
        assert!(s.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn integrated_survival_is_the_mean() {
        for (n, leak, cap) in [
            (2, LeakKind::Reset, 20),
            (2, LeakKind::Decrement, 20),
            (3, LeakKind::Reset, 20),
            (3, LeakKind::Decrement, 20),
        ] {
            let m = OracleModel::build(&spec(n, leak, E), cap).unwrap();
            let u = PotentialList::ladder(n).unwrap();
            let mean = m.mean_from(&u).unwrap();
            let area = m.integrated_survival(&u, 0.02).unwrap();
            assert!(((area - mean) / mean).abs() < 1e-6, "{n} {leak}: {area} vs {mean}");
        }
    }

    #[test]
    fn n2_reset_quantile_is_one() {
        let m = OracleModel::build(&spec(2, LeakKind::Reset, E), 20).unwrap();
        let u = pl(&[0, 1]);
        let target = (-1.0f64).exp();
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if m.survival(&u, mid).unwrap() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c = 0.5 * (lo + hi);
        assert!((c - 1.0).abs() < 1e-8, "{c}");
        assert!((m.integrated_survival(&u, 0.02).unwrap() - 1.0).abs() < 1e-8);
    }
}
