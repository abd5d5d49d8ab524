//! Named scenarios, the run driver and all file output.

pub mod builder;
pub mod output;
pub mod presets;
pub mod runner;

pub use builder::{build_particles, build_setup};
pub use presets::{compute_reynolds, preset, PresetOptions, PRESETS};
pub use runner::{run, RunOptions, RunSummary, Workers};
