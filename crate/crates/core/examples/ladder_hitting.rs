//! How quickly random starts reach the ladder set.

use metaspike::experiments::ladder_hitting;
use metaspike::stats::order_quantile;
use metaspike::{Experiment, RunConfig};

fn main() -> metaspike::Result<()> {
    for n in [9, 12, 16] {
        let mut cfg = RunConfig::new(Experiment::Ladder, n, 10);
        cfg.replicas = 300;
        let r = ladder_hitting(&cfg)?;
        let hits: Vec<f64> = r.records.iter().filter_map(|x| x.hit_time).collect();
        println!(
            "n={n:2}: horizon {:.5}, fraction hit {:.3}, median hit time {:.3e}",
            r.t_prime,
            r.fraction.estimate,
            order_quantile(&hits, 0.5)?
        );
    }
    Ok(())
}
