//! Exact means and survival probabilities for n = 2 and n = 3.

use metaspike::oracle::oracle_report;
use metaspike::{closed_form_n2, LeakKind, ModelSpec, OracleModel, PotentialList};

fn main() -> metaspike::Result<()> {
    for leak in [LeakKind::Reset, LeakKind::Decrement] {
        let spec = ModelSpec::natural(2, leak)?;
        let model = OracleModel::build(&spec, 20)?;
        let means = model.mean_absorption()?;
        for k in 1..=4u64 {
            println!(
                "n=2 {leak:<9} (0,{k}): solve {:.12}  closed form {:.12}",
                means[k as usize],
                closed_form_n2(&spec, k)?
            );
        }
    }

    for leak in [LeakKind::Reset, LeakKind::Decrement] {
        let spec = ModelSpec::natural(3, leak)?;
        let report = oracle_report(&spec, 20)?;
        let model = OracleModel::build(&spec, 20)?;
        let ladder = PotentialList::ladder(3)?;
        println!(
            "n=3 {leak:<9} ladder mean {:.15}  cap change {:.1e}",
            model.mean_from(&ladder)?,
            report.checks.cap_relative_change
        );
        for t in [0.5, 1.0, 2.0] {
            println!("    P(tau > {t}) = {:.15}", model.survival(&ladder, t)?);
        }
    }
    Ok(())
}
