//! Driver behind the command line: resolve a preset or config file, apply
//! overrides, run and write the output plan.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::model::{validate_config, ScenarioConfig};
use crate::simulation::Simulation;
use crate::transition::TransitionEvent;

use super::builder::build_setup;
use super::output::{
    trajectory_row, write_grid_dump, write_snapshot, CsvLog, DISK_TABLE_HEADER, SCALING_HEADER, TRAJECTORY_HEADER,
};
use super::presets::{compute_reynolds, disk_discretization_table, preset, PresetOptions, DISK_SPACINGS, PRESETS};

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "SPHFSI_OUT_DIR";

/// One worker count or an inclusive range for a scaling study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workers {
    Fixed(usize),
    Range(usize, usize),
}

impl std::str::FromStr for Workers {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid worker count '{t}'"));
        let w = match s.split_once("..") {
            Some((a, b)) => Workers::Range(parse(a)?, parse(b)?),
            None => Workers::Fixed(parse(s)?),
        };
        match w {
            Workers::Fixed(0) | Workers::Range(0, _) => Err("worker count must be at least 1".into()),
            Workers::Range(a, b) if b < a => Err(format!("empty worker range {a}..{b}")),
            w => Ok(w),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub dx: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub workers: Option<Workers>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub name: String,
    pub out_dir: PathBuf,
    pub steps: u64,
    pub time: f64,
    pub files: Vec<PathBuf>,
}

/// Configuration for `target` (preset name or TOML path) with overrides
/// applied. Worker ranges leave `workers` at the range start.
pub fn resolve(target: &str, opts: &RunOptions) -> Result<ScenarioConfig> {
    let mut cfg = if PRESETS.contains(&target) {
        preset(target, &PresetOptions { dx: opts.dx, seed: opts.seed })?
    } else if Path::new(target).is_file() {
        let mut cfg = ScenarioConfig::load(Path::new(target))?;
        if let Some(dx) = opts.dx {
            cfg.discretization.dx = dx;
        }
        if let Some(s) = opts.seed {
            cfg.seed = s;
        }
        cfg
    } else {
        return Err(Error::UnknownPreset(format!("{target} (not a preset: {}; not a file)", PRESETS.join(", "))));
    };
    if let Some(t) = opts.t_end {
        cfg.time.t_end = t;
    }
    if let Some(dt) = opts.dt {
        cfg.time.dt = Some(dt);
    }
    match opts.workers {
        Some(Workers::Fixed(n)) | Some(Workers::Range(n, _)) => cfg.workers = n,
        None => {}
    }
    validate_config(&cfg).map_err(Error::Config)?;
    Ok(cfg)
}

/// Output directory: environment override, then `--out`, then the plan,
/// then `out/<name>`.
pub fn output_dir(cfg: &ScenarioConfig, opts: &RunOptions) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .or_else(|| opts.out.clone())
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name))
}

pub fn run(target: &str, opts: &RunOptions) -> Result<RunSummary> {
    let cfg = resolve(target, opts)?;
    let out_dir = output_dir(&cfg, opts);
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let cfg_path = out_dir.join("config.toml");
    std::fs::write(&cfg_path, cfg.to_toml_string()).map_err(|e| Error::io(&cfg_path, e))?;
    if cfg.name == "disk_discretization" {
        let spacings = opts.dx.map_or(DISK_SPACINGS.to_vec(), |dx| vec![dx]);
        return run_disk_table(&cfg, &out_dir, &spacings);
    }
    if let Some(Workers::Range(a, b)) = opts.workers {
        return run_scaling(&cfg, &out_dir, a, b);
    }
    run_config(&cfg, &out_dir)
}

fn run_disk_table(cfg: &ScenarioConfig, out_dir: &Path, spacings: &[f64]) -> Result<RunSummary> {
    let path = out_dir.join("disk_table.csv");
    let mut log = CsvLog::create(&path, DISK_TABLE_HEADER)?;
    for (dx, m, i) in disk_discretization_table(spacings)? {
        log.row(&format!("{dx:.6e},{m:.10e},{i:.10e}"))?;
    }
    log.finish()?;
    Ok(RunSummary { name: cfg.name.clone(), out_dir: out_dir.to_path_buf(), steps: 0, time: 0.0, files: vec![path] })
}

fn log_reynolds(cfg: &ScenarioConfig) {
    if !cfg.name.starts_with("shear") {
        return;
    }
    let walls: Vec<f64> = cfg
        .walls
        .iter()
        .map(|w| w.motion.velocity(0.0)[0])
        .collect();
    let (Some(hi), Some(lo)) =
        (walls.iter().cloned().reduce(f64::max), walls.iter().cloned().reduce(f64::min))
    else {
        return;
    };
    let set = cfg.material_set();
    let (Some(f), Some(b)) = (cfg.fluids.first(), cfg.bodies.first()) else { return };
    let nu = set.by_name(&f.material).map_or(0.0, |m| m.kinematic_viscosity);
    let (blo, bhi) = b.shape.bounds();
    let (flo, fhi) = f.shape.bounds();
    let re = compute_reynolds(hi - lo, bhi[0] - blo[0], nu, fhi[1] - flo[1]);
    log::info!("Reynolds number {re:.4}");
}

fn snapshot_files(sim: &Simulation, cfg: &ScenarioConfig, out_dir: &Path, index: usize) -> Result<Vec<PathBuf>> {
    let path = out_dir.join(format!("snapshot_{index:05}.txt"));
    let particles = sim.particles();
    let mats = cfg.material_set();
    write_snapshot(&path, &particles, &mats, cfg.dimension, sim.time, &cfg.output.fields)?;
    let mut files = vec![path];
    if let Some(spacing) = cfg.output.grid_spacing {
        let g = out_dir.join(format!("grid_{index:05}.txt"));
        let kernel = Kernel::new(cfg.h(), cfg.dimension);
        write_grid_dump(&g, &particles, &kernel, cfg.domain.min(), cfg.domain.max(), spacing, sim.time)?;
        files.push(g);
    }
    Ok(files)
}

/// Run one configuration to its end time and write the output plan.
pub fn run_config(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary> {
    log_reynolds(cfg);
    let mut sim = Simulation::new(build_setup(cfg)?)?;
    log::info!(
        "{}: {} particles, {} bodies, {} workers, dt {:.4e}",
        cfg.name,
        sim.n_particles(),
        sim.bodies.len(),
        sim.n_workers(),
        sim.dt
    );
    let t_end = cfg.time.t_end;
    let traj_every = cfg.output.trajectory_interval.unwrap_or(t_end / 1000.0).max(sim.dt);
    let snap_every = cfg.output.snapshot_interval;

    let traj_path = out_dir.join("trajectory.csv");
    let mut traj = CsvLog::create(&traj_path, TRAJECTORY_HEADER)?;
    let events_path = out_dir.join("events.csv");
    let mut events = cfg
        .output
        .event_log
        .then(|| CsvLog::create(&events_path, TransitionEvent::CSV_HEADER))
        .transpose()?;
    let mut files = vec![traj_path];
    if events.is_some() {
        files.push(events_path);
    }

    let mut snap_index = 0;
    files.extend(snapshot_files(&sim, cfg, out_dir, snap_index)?);
    snap_index += 1;
    for b in sim.bodies.values() {
        traj.row(&trajectory_row(sim.time, b))?;
    }
    let mut next_traj = traj_every;
    let mut next_snap = snap_every.unwrap_or(f64::INFINITY);
    let eps = 0.5 * sim.dt;
    while sim.time + eps < t_end {
        sim.step()?;
        if let Some(log) = events.as_mut() {
            for e in &sim.events {
                log.row(&e.csv_row())?;
            }
        }
        if sim.time + eps >= next_traj {
            for b in sim.bodies.values() {
                traj.row(&trajectory_row(sim.time, b))?;
            }
            next_traj += traj_every;
        }
        if sim.time + eps >= next_snap {
            files.extend(snapshot_files(&sim, cfg, out_dir, snap_index)?);
            snap_index += 1;
            next_snap += snap_every.unwrap_or(f64::INFINITY);
        }
        if sim.step % 1000 == 0 {
            log::info!("step {} t = {:.6e} particles {} bodies {}", sim.step, sim.time, sim.n_particles(), sim.bodies.len());
        }
    }
    if snap_every.is_none() || snap_index == 1 {
        files.extend(snapshot_files(&sim, cfg, out_dir, snap_index)?);
    }
    traj.finish()?;
    if let Some(log) = events {
        log.finish()?;
    }
    Ok(RunSummary { name: cfg.name.clone(), out_dir: out_dir.to_path_buf(), steps: sim.step, time: sim.time, files })
}

/// Wall time per step for each worker count in `a..=b`, measured over the
/// configured horizon after one warm-up step.
pub fn scaling_study(cfg: &ScenarioConfig, a: usize, b: usize) -> Result<Vec<(usize, f64)>> {
    let mut rows = Vec::new();
    for workers in a..=b {
        let mut c = cfg.clone();
        c.workers = workers;
        let mut sim = Simulation::new(build_setup(&c)?)?;
        sim.step()?;
        let steps = ((c.time.t_end / sim.dt).round() as u64).max(1);
        let start = Instant::now();
        for _ in 0..steps {
            sim.step()?;
        }
        let per_step = start.elapsed().as_secs_f64() / steps as f64;
        log::info!("{workers} workers: {per_step:.4e} s/step over {steps} steps");
        rows.push((workers, per_step));
    }
    Ok(rows)
}

/// Efficiency in percent of linear scaling relative to the first row.
pub fn efficiencies(rows: &[(usize, f64)]) -> Vec<f64> {
    let Some(&(w0, t0)) = rows.first() else { return Vec::new() };
    rows.iter().map(|&(w, t)| 100.0 * (t0 * w0 as f64) / (t * w as f64)).collect()
}

fn run_scaling(cfg: &ScenarioConfig, out_dir: &Path, a: usize, b: usize) -> Result<RunSummary> {
    let rows = scaling_study(cfg, a, b)?;
    let path = out_dir.join("scaling.csv");
    let mut log = CsvLog::create(&path, SCALING_HEADER)?;
    for ((w, t), e) in rows.iter().zip(efficiencies(&rows)) {
        log.row(&format!("{w},{t:.6e},{e:.2}"))?;
    }
    log.finish()?;
    Ok(RunSummary { name: cfg.name.clone(), out_dir: out_dir.to_path_buf(), steps: 0, time: 0.0, files: vec![path] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_spec_parsing() {
        assert_eq!("4".parse::<Workers>(), Ok(Workers::Fixed(4)));
        assert_eq!("1..8".parse::<Workers>(), Ok(Workers::Range(1, 8)));
        assert!("0".parse::<Workers>().is_err());
        assert!("5..2".parse::<Workers>().is_err());
        assert!("x".parse::<Workers>().is_err());
    }

    #[test]
    fn efficiency_is_relative_to_first_row() {
        let e = efficiencies(&[(1, 4.0), (2, 2.0), (4, 1.6)]);
        assert_eq!(e, vec![100.0, 100.0, 62.5]);
    }

    #[test]
    fn unknown_target_is_config_error() {
        let err = resolve("no_such_thing", &RunOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
