//! Long runs of the auxiliary process, which never reaches the null list,
//! and the fraction of time it spends in W.

use metaspike::experiments::aux_occupancy;
use metaspike::{Experiment, RunConfig};

fn main() -> metaspike::Result<()> {
    for n in [4, 8, 12] {
        let mut cfg = RunConfig::new(Experiment::AuxOccupancy, n, 13);
        cfg.replicas = 10;
        cfg.burn_in = 1.0;
        cfg.run_time = 10.0;
        let r = aux_occupancy(&cfg)?;
        println!(
            "n={n:2}: time in W {:.4} +/- {:.4}, null visits {}",
            r.occupation.mean, r.occupation.se, r.null_visits
        );
    }
    Ok(())
}
