//! Rank-matched coupling from pairs of partial ladders.

use metaspike::coupling::{coupled_rates, sample_w};
use metaspike::experiments::coupling_stats;
use metaspike::{derive_stream, CoupledState, Experiment, LeakKind, ModelSpec, PotentialList, RateConvention, RunConfig};

fn main() -> metaspike::Result<()> {
    // the two rate conventions on a single pair of lists
    let spec = ModelSpec::natural(2, LeakKind::Reset)?;
    let x = CoupledState::new(PotentialList::new(vec![0, 3])?, PotentialList::new(vec![0, 1])?)?;
    for conv in [RateConvention::PaperLiteral, RateConvention::MarginalPreserving] {
        println!("{}:", conv.as_str());
        for (ev, rate) in coupled_rates(&x, &spec, conv)? {
            println!("  rank {} {:?}: {rate:.4}", ev.rank, ev.kind);
        }
    }

    let mut rng = derive_stream(1, 0).rng();
    println!("a start pair: {} / {}", sample_w(16, &mut rng)?, sample_w(16, &mut rng)?);

    for n in [9, 16] {
        let mut cfg = RunConfig::new(Experiment::Coupling, n, 11);
        cfg.replicas = 500;
        let r = coupling_stats(&cfg)?;
        println!(
            "n={n:2}: P(n_c < n_dagger) {:.3}, median t_nc {:.2e}, window event {} times, violations {}",
            r.before_leak.estimate,
            r.median_t_nc.unwrap_or(f64::NAN),
            r.e1_count,
            r.e1_violations
        );
    }
    Ok(())
}
