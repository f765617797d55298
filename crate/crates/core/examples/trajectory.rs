//! One trajectory from an explicit list, with its event log printed as CSV.

use metaspike::engine::write_event_log;
use metaspike::{derive_stream, simulate, ModelSpec, PotentialList, SimOptions, SetKind, StopCondition};
use metaspike::LeakKind;

fn main() -> metaspike::Result<()> {
    let spec = ModelSpec::natural(4, LeakKind::Reset)?;
    let u0 = PotentialList::new(vec![0, 1, 2, 7])?;
    let opts = SimOptions {
        record: vec![SetKind::W, SetKind::L],
        log_events: true,
        ..Default::default()
    };
    let stop = StopCondition::absorbed().with_budget(40);
    let s = simulate(&u0, &spec, &stop, &opts, &mut derive_stream(7, 0).rng())?;

    println!(
        "{:?} after {} jumps ({} spikes, {} leaks) at t = {:.6}, state {}",
        s.stop_reason, s.jumps, s.z_spike, s.z_leak, s.time, s.final_state
    );
    for (set, t) in &s.hit_times {
        println!("first entry into {}: {t:.6}", set.name());
    }
    write_event_log(s.events.as_deref().unwrap_or(&[]), std::io::stdout().lock())
}
