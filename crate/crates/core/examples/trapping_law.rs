//! Law of the trapping time from the ladder: distance to an exponential,
//! the quantile c with P(tau > c) = 1/e, and its lower bound.

use metaspike::experiments::{c_lower_bound, extinction_ensemble};
use metaspike::stats::memoryless_gap;
use metaspike::{Experiment, RunConfig};

fn main() -> metaspike::Result<()> {
    let n_max: usize = std::env::args().nth(1).map_or(5, |s| s.parse().expect("n"));
    for n in 3..=n_max {
        let mut cfg = RunConfig::new(Experiment::Extinction, n, 6);
        cfg.replicas = 2000;
        let r = extinction_ensemble(&cfg)?;
        let a = &r.aggregates;
        let c = a.c.as_ref().expect("enough samples");
        let gap = memoryless_gap(&r.taus(), c.value, 1.0, 1.0);
        println!(
            "n={n}: mean {:10.3}  c {:10.3} (lower {:10.3}, bound {:.4})  KS {:.4}  mean/c {:.3}  memoryless gap {:.4} (se {:.4})",
            a.tau.unwrap().mean,
            c.value,
            c.lower99,
            c_lower_bound(n),
            a.ks_exp1.unwrap(),
            a.mean_over_c.unwrap(),
            gap.gap,
            gap.se
        );
    }
    Ok(())
}
