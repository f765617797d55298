//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on any validation or run error (one line on
//! stderr), 2 when `--check` finds the result outside its expectation.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use crate::config::{load_config, ConfigLayer, OutputFormat, RunConfig};
use crate::engine::write_event_log;
use crate::error::{Error, Result};
use crate::expectations::Expectations;
use crate::experiments::{run, Outcome};
use crate::output::render;

#[derive(Debug, Parser)]
#[command(
    name = "metaspike",
    version,
    about = "Simulate spiking networks with leakage and measure their trapping times"
)]
struct Args {
    /// simulate, extinction, occupancy, ladder, coupling, aux-occupancy, cn or oracle
    experiment: String,
    #[arg(long)]
    n: Option<usize>,
    /// reset or decrement
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    base: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// ladder, s0, w or explicit:0,1,2
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    jump_budget: Option<u64>,
    /// paper_literal or marginal_preserving
    #[arg(long)]
    convention: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Event log of the first replica (simulate only)
    #[arg(long)]
    log: Option<PathBuf>,
    /// Oracle truncation level
    #[arg(long)]
    cap: Option<u64>,
    /// Observation time for occupancy
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    burn_in: Option<f64>,
    #[arg(long)]
    run_time: Option<f64>,
    /// Coupling: compare the first copy against standalone runs
    #[arg(long)]
    marginal: bool,
    /// Extinction: report budget-censored replicas instead of failing
    #[arg(long)]
    allow_censored: bool,
    /// Compare the result against this expectation id
    #[arg(long)]
    check: Option<String>,
    /// Expectations file for --check (defaults to the bundled one)
    #[arg(long)]
    expectations: Option<PathBuf>,
}

fn parse<T: std::str::FromStr<Err = Error>>(x: Option<String>) -> Result<Option<T>> {
    x.map(|s| s.parse()).transpose()
}

fn layer(a: &Args) -> Result<ConfigLayer> {
    let mut format: Option<OutputFormat> = parse(a.format.clone())?;
    if format.is_none() {
        if let Some(ext) = a.out.as_ref().and_then(|p| p.extension()) {
            if ext == "csv" {
                format = Some(OutputFormat::Csv);
            }
        }
    }
    Ok(ConfigLayer {
        experiment: Some(a.experiment.parse()?),
        n: a.n,
        model: parse(a.model.clone())?,
        base: a.base,
        seed: a.seed,
        replicas: a.replicas,
        init: parse(a.init.clone())?,
        horizon: a.horizon,
        jump_budget: a.jump_budget,
        convention: parse(a.convention.clone())?,
        cap: a.cap,
        t: a.t,
        burn_in: a.burn_in,
        run_time: a.run_time,
        marginal: a.marginal.then_some(true),
        allow_censored: a.allow_censored.then_some(true),
        format,
        workers: a.workers,
        out: a.out.clone(),
        log: a.log.clone(),
    })
}

/// Resolves the configuration exactly as the command line would.
pub fn resolve_args<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| Error::Config(first_line(&e.to_string())))?;
    resolve(&args)
}

fn resolve(args: &Args) -> Result<RunConfig> {
    let flags = layer(args)?;
    let merged = match &args.config {
        Some(path) => load_config(path)?.overlay(flags),
        None => flags,
    };
    merged.resolve()
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("").trim().to_string()
}

fn write_or_print(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

enum Failure {
    Invalid(Error),
    Check,
}

fn execute(args: Args) -> std::result::Result<(), Failure> {
    let cfg = resolve(&args).map_err(Failure::Invalid)?;
    let outcome = run(&cfg).map_err(Failure::Invalid)?;
    write_or_print(cfg.out.as_ref(), &render(&cfg, &outcome)).map_err(Failure::Invalid)?;
    if let (Some(path), Outcome::Simulate(sim)) = (&cfg.log, &outcome) {
        let file = std::fs::File::create(path)
            .map_err(|e| Failure::Invalid(Error::Io(format!("{}: {e}", path.display()))))?;
        write_event_log(sim.events.as_deref().unwrap_or(&[]), std::io::BufWriter::new(file))
            .map_err(Failure::Invalid)?;
    }
    if let Some(id) = &args.check {
        let book = match &args.expectations {
            Some(p) => Expectations::load(p).map_err(Failure::Invalid)?,
            None => Expectations::builtin(),
        };
        let exp = book.get(id).map_err(Failure::Invalid)?;
        let (x, se) = outcome.metric(&exp.metric).ok_or_else(|| {
            Failure::Invalid(Error::Config(format!(
                "check `{id}`: metric `{}` is not produced by {}",
                exp.metric,
                cfg.experiment.as_str()
            )))
        })?;
        let v = exp.check(x, se).map_err(Failure::Invalid)?;
        let line = format!(
            "check {id}: {} {} = {} ({:?} {} +/- {})",
            if v.pass { "PASS" } else { "FAIL" },
            exp.metric,
            v.observed,
            exp.relation,
            exp.value,
            v.allowed
        );
        eprintln!("{line}");
        if !v.pass {
            return Err(Failure::Check);
        }
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("error: {}", first_line(&e.to_string()).trim_start_matches("error: "));
            return 1;
        }
    };
    match execute(args) {
        Ok(()) => 0,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Check) => 2,
    }
}
