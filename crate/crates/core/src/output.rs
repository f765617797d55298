//! JSON and CSV renderings of experiment outcomes.
//!
//! CSV files start with `#` comment lines carrying the tool version, the
//! seed derivation rule and the config echo, followed by one header row and
//! one row per replica. Floats are printed with 17 significant digits.

use std::fmt::Write as _;

use crate::config::{OutputFormat, RunConfig};
use crate::experiments::{Outcome, Report};
use crate::format::{opt_sig17, sig17};
use crate::rng::DERIVATION_RULE;

pub const REPLICA_HEADER: &str = "replica,tau,jumps,z_spike,z_leak,stop_reason";
pub const COUPLING_HEADER: &str = "replica,n_c,n_dagger,t_nc,e1,jumps,stop_reason";

pub fn render(cfg: &RunConfig, outcome: &Outcome) -> String {
    match cfg.format {
        OutputFormat::Json => render_json(cfg, outcome),
        OutputFormat::Csv => render_csv(cfg, outcome),
    }
}

pub fn render_json(cfg: &RunConfig, outcome: &Outcome) -> String {
    let mut s = serde_json::to_string_pretty(&Report::new(cfg, outcome)).expect("serializable");
    s.push('\n');
    s
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn render_csv(cfg: &RunConfig, outcome: &Outcome) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {} {}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION")
    );
    let _ = writeln!(s, "# rng: {DERIVATION_RULE}");
    let _ = writeln!(s, "# config: {}", cfg.echo());
    match outcome {
        Outcome::Extinction(r) => replica_rows(&mut s, &r.records),
        Outcome::Cn(r) => replica_rows(&mut s, &r.records),
        Outcome::Simulate(r) => {
            let _ = writeln!(s, "{REPLICA_HEADER},time,final_state");
            for x in &r.records {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},\"{}\"",
                    x.replica,
                    opt_sig17(x.tau),
                    x.jumps,
                    x.z_spike,
                    x.z_leak,
                    x.stop_reason.as_str(),
                    sig17(x.time),
                    x.final_state
                );
            }
        }
        Outcome::Occupancy(r) => {
            let _ = writeln!(s, "replica,survived,in_w,jumps");
            for x in &r.records {
                let _ = writeln!(s, "{},{},{},{}", x.replica, x.survived, x.in_w, x.jumps);
            }
        }
        Outcome::Ladder(r) => {
            let _ = writeln!(s, "replica,hit_time,jumps");
            for x in &r.records {
                let _ = writeln!(s, "{},{},{}", x.replica, opt_sig17(x.hit_time), x.jumps);
            }
        }
        Outcome::Coupling(r) => {
            let _ = writeln!(s, "{COUPLING_HEADER}");
            for x in &r.records {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    x.replica,
                    opt(x.n_c),
                    opt(x.n_dagger),
                    opt_sig17(x.t_nc),
                    x.e1,
                    x.jumps,
                    x.stop_reason.as_str()
                );
            }
        }
        Outcome::CouplingMarginal(r) => {
            let _ = writeln!(s, "replica,coupled_hit,standalone_hit");
            for x in &r.records {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    x.replica,
                    sig17(x.coupled_hit),
                    sig17(x.standalone_hit)
                );
            }
        }
        Outcome::AuxOccupancy(r) => {
            let _ = writeln!(s, "replica,occupation,jumps,null_visits");
            for x in &r.records {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    x.replica,
                    sig17(x.occupation),
                    x.jumps,
                    x.null_visits
                );
            }
        }
        Outcome::Oracle(r) => {
            let _ = writeln!(s, "state,mean");
            for (state, m) in &r.means {
                let _ = writeln!(s, "\"{state}\",{}", sig17(*m));
            }
        }
    }
    s
}

fn replica_rows(s: &mut String, records: &[crate::experiments::ReplicaRecord]) {
    let _ = writeln!(s, "{REPLICA_HEADER}");
    for x in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            x.replica,
            opt_sig17(x.tau),
            x.jumps,
            x.z_spike,
            x.z_leak,
            x.stop_reason.as_str()
        );
    }
}

/// Lines of a CSV rendering that are not `#` comments.
pub fn csv_body(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.starts_with('#'))
}
