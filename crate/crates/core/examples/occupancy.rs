//! Probability of being in W at time t given survival, from random starts.

use metaspike::experiments::occupancy;
use metaspike::{Experiment, RunConfig};

fn main() -> metaspike::Result<()> {
    for n in [6, 8, 10, 12] {
        let mut cfg = RunConfig::new(Experiment::Occupancy, n, 9);
        cfg.replicas = 400;
        cfg.t = 1.0;
        let r = occupancy(&cfg)?;
        println!(
            "n={n:2}: {} survivors, P(W | tau > 1) = {:.3}  [{:.3}, {:.3}]",
            r.survivors, r.conditional.estimate, r.conditional.ci99[0], r.conditional.ci99[1]
        );
    }
    Ok(())
}
