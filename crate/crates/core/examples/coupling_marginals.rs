//! Does the first copy of a coupled pair follow the single-network law?
//! Compares ladder-hitting times under both rate conventions.

use metaspike::experiments::coupling_marginal;
use metaspike::{Experiment, RateConvention, RunConfig};

fn main() -> metaspike::Result<()> {
    for conv in [RateConvention::MarginalPreserving, RateConvention::PaperLiteral] {
        let mut cfg = RunConfig::new(Experiment::Coupling, 8, 12);
        cfg.marginal = true;
        cfg.convention = conv;
        cfg.replicas = 2000;
        let r = coupling_marginal(&cfg)?;
        println!(
            "{:<20} KS {:.4} vs critical {:.4}: {}",
            conv.as_str(),
            r.ks,
            r.critical99,
            if r.below_critical { "same law" } else { "rejected" }
        );
    }
    Ok(())
}
