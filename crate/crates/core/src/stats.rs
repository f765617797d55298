//! Estimators used by the ensemble experiments.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 0.99 normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Quantile level defining `c`: `P(tau > c) = e^-1`.
pub fn c_level() -> f64 {
    1.0 - (-1.0f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean (sample standard deviation / sqrt(count)).
    pub se: f64,
    pub ci99: [f64; 2],
}

pub fn mean_se(xs: &[f64]) -> Result<MeanEstimate> {
    if xs.len() < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    Ok(MeanEstimate {
        count: xs.len(),
        mean,
        se,
        ci99: [mean - Z99 * se, mean + Z99 * se],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: usize,
    pub trials: usize,
    pub estimate: f64,
    pub se: f64,
    /// Normal-approximation 0.99 interval, clipped to [0, 1].
    pub ci99: [f64; 2],
}

pub fn proportion(hits: usize, trials: usize) -> Result<Proportion> {
    if trials == 0 {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let p = hits as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    Ok(Proportion {
        hits,
        trials,
        estimate: p,
        se,
        ci99: [(p - Z99 * se).max(0.0), (p + Z99 * se).min(1.0)],
    })
}

fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// The `ceil(p R)`-th order statistic (1-based) of `xs`.
pub fn order_quantile(xs: &[f64], p: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    Ok(quantile_sorted(&sorted_copy(xs), p))
}

fn quantile_sorted(s: &[f64], p: f64) -> f64 {
    let r = s.len();
    let k = ((p * r as f64).ceil() as usize).clamp(1, r);
    s[k - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileEstimate {
    pub p: f64,
    pub value: f64,
    pub resamples: usize,
    /// Two-sided 0.99 percentile bootstrap interval.
    pub ci99: [f64; 2],
    /// One-sided 0.99 lower bootstrap bound.
    pub lower99: f64,
}

pub const MIN_C_SAMPLES: usize = 100;

/// `p`-quantile with a percentile bootstrap.
pub fn estimate_quantile<R: Rng + ?Sized>(
    xs: &[f64],
    p: f64,
    resamples: usize,
    rng: &mut R,
) -> Result<QuantileEstimate> {
    if xs.len() < MIN_C_SAMPLES {
        return Err(Error::TooFewSamples {
            need: MIN_C_SAMPLES,
            got: xs.len(),
        });
    }
    let s = sorted_copy(xs);
    let value = quantile_sorted(&s, p);
    let r = s.len();
    let k = ((p * r as f64).ceil() as usize).clamp(1, r);
    let mut boot = Vec::with_capacity(resamples);
    // s is sorted, so the k-th smallest resampled index gives the k-th value
    let mut draw = vec![0usize; r];
    for _ in 0..resamples {
        for d in draw.iter_mut() {
            *d = rng.random_range(0..r);
        }
        let (_, idx, _) = draw.select_nth_unstable(k - 1);
        boot.push(s[*idx]);
    }
    boot.sort_by(f64::total_cmp);
    Ok(QuantileEstimate {
        p,
        value,
        resamples,
        ci99: [quantile_sorted(&boot, 0.005), quantile_sorted(&boot, 0.995)],
        lower99: quantile_sorted(&boot, 0.01),
    })
}

/// Estimate of `c` with `P(tau > c) = e^-1`, with 1000 bootstrap resamples.
pub fn estimate_c<R: Rng + ?Sized>(xs: &[f64], rng: &mut R) -> Result<QuantileEstimate> {
    estimate_quantile(xs, c_level(), 1000, rng)
}

fn check_positive(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::NonPositiveSample);
    }
    Ok(())
}

/// Kolmogorov-Smirnov distance between `xs / scale` and Exp(1).
pub fn ks_exp1_scaled(xs: &[f64], scale: f64) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: xs.len(),
        });
    }
    check_positive(xs)?;
    let s = sorted_copy(xs);
    let r = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in s.iter().enumerate() {
        let f = 1.0 - (-x / scale).exp();
        d = d.max(f - i as f64 / r).max((i + 1) as f64 / r - f);
    }
    Ok(d)
}

/// Kolmogorov-Smirnov distance to Exp(1) after dividing by the sample mean.
pub fn ks_exp1(xs: &[f64]) -> Result<f64> {
    check_positive(xs)?;
    let mean = xs.iter().sum::<f64>() / xs.len().max(1) as f64;
    ks_exp1_scaled(xs, mean)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let (a, b) = (sorted_copy(a), sorted_copy(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic 0.01-level critical value of the two-sample statistic.
pub fn ks_two_sample_critical99(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.628 * ((n + m) / (n * m)).sqrt()
}

/// Fraction of `xs` strictly above `t`.
pub fn survival_fraction(xs: &[f64], t: f64) -> f64 {
    xs.iter().filter(|&&x| x > t).count() as f64 / xs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorylessCheck {
    pub s: f64,
    pub t: f64,
    pub joint: f64,
    pub product: f64,
    pub gap: f64,
    /// Delta-method standard error of `joint - product`.
    pub se: f64,
}

/// Compares `P(tau > c(s+t))` with `P(tau > cs) P(tau > ct)` on one sample.
pub fn memoryless_gap(xs: &[f64], c: f64, s: f64, t: f64) -> MemorylessCheck {
    let r = xs.len() as f64;
    let var = |p: f64| p * (1.0 - p) / r;
    let joint = survival_fraction(xs, c * (s + t));
    let ps = survival_fraction(xs, c * s);
    let pt = survival_fraction(xs, c * t);
    let product = ps * pt;
    let var_product = if s == t {
        4.0 * ps * ps * var(ps)
    } else {
        pt * pt * var(ps) + ps * ps * var(pt)
    };
    MemorylessCheck {
        s,
        t,
        joint,
        product,
        gap: (joint - product).abs(),
        se: (var(joint) + var_product).sqrt(),
    }
}
