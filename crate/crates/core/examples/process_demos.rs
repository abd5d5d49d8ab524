//! Runs the scaled melting and gastric mixing demonstrations through the
//! same entry point as the command line tool.
//! Usage: `process_demos [t_end]`.

use sphfsi::scenario::{run, RunOptions};

fn main() -> sphfsi::Result<()> {
    let t_end = std::env::args().nth(1).map(|a| a.parse().expect("end time"));
    for name in ["melt_demo", "gastric_demo"] {
        let out = std::env::temp_dir().join(name);
        let opts = RunOptions { t_end, out: Some(out), seed: Some(7), ..Default::default() };
        let s = run(name, &opts)?;
        println!("{name}: {} steps to t = {:.3}, {} files in {}", s.steps, s.time, s.files.len(), s.out_dir.display());
    }
    Ok(())
}
