//! Trapping-time ensembles at small N checked against the exact oracle.

use metaspike::experiments::extinction_ensemble;
use metaspike::{Experiment, InitSpec, LeakKind, OracleModel, PotentialList, RunConfig};

fn main() -> metaspike::Result<()> {
    // from (0,1) both leaks act the same, so n=2 decrement starts at (0,2)
    for (start, leak) in [
        (vec![0, 1], LeakKind::Reset),
        (vec![0, 2], LeakKind::Decrement),
        (vec![0, 1, 2], LeakKind::Reset),
        (vec![0, 1, 2], LeakKind::Decrement),
    ] {
        let n = start.len();
        let u0 = PotentialList::new(start)?;
        let mut cfg = RunConfig::new(Experiment::Extinction, n, 2024);
        cfg.model = leak;
        cfg.init = InitSpec::Explicit(u0.clone());
        cfg.replicas = 20_000;
        let r = extinction_ensemble(&cfg)?;
        let m = r.aggregates.tau.expect("absorbed replicas");

        let oracle = OracleModel::build(&cfg.spec()?, 20)?;
        let exact = oracle.mean_from(&u0)?;
        println!(
            "{u0} {leak:<9} mean {:.5} +/- {:.5}  exact {exact:.5}  ({:+.2} se)",
            m.mean,
            m.se,
            (m.mean - exact) / m.se
        );
    }
    Ok(())
}
