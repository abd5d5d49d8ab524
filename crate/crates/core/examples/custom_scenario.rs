//! Loads a scenario from TOML, runs it and writes the usual outputs.
//! Usage: `custom_scenario [path] [t_end]`; defaults to the bundled heated
//! channel.

use std::path::PathBuf;

use sphfsi::model::ScenarioConfig;
use sphfsi::scenario::runner::run_config;

fn main() -> sphfsi::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios/heated_channel.toml"));
    let mut cfg = ScenarioConfig::load(&path)?;
    if let Some(t) = args.next() {
        cfg.time.t_end = t.parse().expect("end time");
    }
    let out = std::env::temp_dir().join(&cfg.name);
    std::fs::create_dir_all(&out).map_err(|e| sphfsi::Error::io(&out, e))?;
    let summary = run_config(&cfg, &out)?;
    println!("{}: {} steps to t = {:.3}", summary.name, summary.steps, summary.time);
    for f in &summary.files {
        println!("  {}", f.display());
    }
    Ok(())
}
