//! Building a run from a JSON config, echoing it, and rendering the result
//! the way the command line writes it.

use metaspike::config::parse_config;
use metaspike::experiments::run;
use metaspike::output::render;

fn main() -> metaspike::Result<()> {
    let text = r#"{
        "experiment": "extinction",
        "n": 3,
        "model": "decrement",
        "seed": 5,
        "replicas": 4,
        "format": "csv"
    }"#;
    let cfg = parse_config(text)?.resolve()?;
    println!("echo: {}", cfg.echo());
    print!("{}", render(&cfg, &run(&cfg)?));

    // workers change scheduling only
    let mut wide = cfg.clone();
    wide.workers = 4;
    assert_eq!(render(&cfg, &run(&cfg)?), render(&wide, &run(&wide)?));
    Ok(())
}
