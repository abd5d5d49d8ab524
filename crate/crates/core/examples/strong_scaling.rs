//! Wall time per step of the 3D settling box for 1..=N workers, written in
//! the `cores,walltimeperstep,strongscalingefficiency` format.
//! Usage: `strong_scaling [max_workers] [dx]`.

use sphfsi::scenario::output::{CsvLog, SCALING_HEADER};
use sphfsi::scenario::presets::estimated_particles;
use sphfsi::scenario::runner::{efficiencies, scaling_study};
use sphfsi::scenario::{preset, PresetOptions};

fn main() -> sphfsi::Result<()> {
    let mut args = std::env::args().skip(1);
    let max: usize = args.next().map_or(4, |a| a.parse().expect("worker count"));
    let dx: f64 = args.next().map_or(1.0, |a| a.parse().expect("spacing"));
    let mut cfg = preset("scaling_box", &PresetOptions { dx: Some(dx), seed: None })?;
    cfg.time.t_end = 0.02;
    println!("about {:.0} particles", estimated_particles(&cfg));
    let rows = scaling_study(&cfg, 1, max)?;
    let path = std::env::temp_dir().join("scaling.csv");
    let mut log = CsvLog::create(&path, SCALING_HEADER)?;
    println!("{SCALING_HEADER}");
    for ((w, t), e) in rows.iter().zip(efficiencies(&rows)) {
        let line = format!("{w},{t:.6e},{e:.2}");
        println!("{line}");
        log.row(&line)?;
    }
    log.finish()?;
    println!("written to {}", path.display());
    Ok(())
}
