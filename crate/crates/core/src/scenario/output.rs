//! Text output: particle snapshots, Shepard grid dumps and CSV series.
//!
//! Snapshot format (version 1): `#`-prefixed header lines
//!
//! ```text
//! # sphfsi snapshot v1
//! # dimension 2
//! # time 1.00000000000000000e-1
//! # columns id phase material body x y z ux uy uz rho p T C
//! ```
//!
//! followed by one whitespace-separated row per particle in id order.
//! `body` is -1 for particles that do not belong to a body. Floats use 17
//! significant digits so values round-trip exactly.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kernel::{shepard_interpolate, Kernel};
use crate::model::{MaterialSet, Particle, Vec3};
use crate::rigid::RigidBody;

pub const SNAPSHOT_VERSION: u32 = 1;

pub const SNAPSHOT_COLUMNS: [&str; 14] =
    ["id", "phase", "material", "body", "x", "y", "z", "ux", "uy", "uz", "rho", "p", "T", "C"];

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn cell(p: &Particle, col: &str, materials: &MaterialSet) -> String {
    let f = |v: f64| format!("{v:.17e}");
    match col {
        "id" => p.id.to_string(),
        "phase" => p.tag.kind_str().to_string(),
        "material" => materials.get(p.material as usize).name.clone(),
        "body" => p.tag.body().map_or_else(|| "-1".to_string(), |b| b.to_string()),
        "x" => f(p.position[0]),
        "y" => f(p.position[1]),
        "z" => f(p.position[2]),
        "ux" => f(p.velocity[0]),
        "uy" => f(p.velocity[1]),
        "uz" => f(p.velocity[2]),
        "rho" => f(p.density),
        "p" => f(p.pressure),
        "T" => f(p.temperature),
        "C" => f(p.concentration),
        _ => unreachable!("unknown column {col}"),
    }
}

/// Columns selected by `fields` (all when empty); `id` is always first.
pub fn snapshot_columns(fields: &[String]) -> Result<Vec<&'static str>> {
    if let Some(bad) = fields.iter().find(|f| !SNAPSHOT_COLUMNS.contains(&f.as_str())) {
        return Err(Error::config(format!(
            "unknown snapshot field '{bad}'; available: {}",
            SNAPSHOT_COLUMNS.join(" ")
        )));
    }
    Ok(SNAPSHOT_COLUMNS
        .iter()
        .copied()
        .filter(|c| *c == "id" || fields.is_empty() || fields.iter().any(|f| f == c))
        .collect())
}

/// Write a snapshot of `particles` (expected in id order).
pub fn write_snapshot_to<W: Write>(
    out: &mut W,
    particles: &[Particle],
    materials: &MaterialSet,
    dimension: usize,
    t: f64,
    fields: &[String],
) -> Result<()> {
    let cols = snapshot_columns(fields)?;
    let io = |e| Error::io("<snapshot>", e);
    writeln!(out, "# sphfsi snapshot v{SNAPSHOT_VERSION}").map_err(io)?;
    writeln!(out, "# dimension {dimension}").map_err(io)?;
    writeln!(out, "# time {t:.17e}").map_err(io)?;
    writeln!(out, "# columns {}", cols.join(" ")).map_err(io)?;
    for p in particles {
        let row: Vec<String> = cols.iter().map(|c| cell(p, c, materials)).collect();
        writeln!(out, "{}", row.join(" ")).map_err(io)?;
    }
    Ok(())
}

pub fn write_snapshot(
    path: &Path,
    particles: &[Particle],
    materials: &MaterialSet,
    dimension: usize,
    t: f64,
    fields: &[String],
) -> Result<()> {
    let mut out = create(path)?;
    write_snapshot_to(&mut out, particles, materials, dimension, t, fields)
        .map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Shepard-filtered velocity and temperature of fluid particles on a regular
/// grid with spacing `spacing` over `lo..hi`. Grid points without fluid in
/// their kernel support are skipped.
pub fn write_grid_dump(
    path: &Path,
    particles: &[Particle],
    kernel: &Kernel,
    lo: Vec3,
    hi: Vec3,
    spacing: f64,
    t: f64,
) -> Result<()> {
    let dim = kernel.dimension();
    let rc = kernel.support_radius();
    let key = |x: &Vec3| [0, 1, 2].map(|a| if a < dim { (x[a] / rc).floor() as i64 } else { 0 });
    let mut bins: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let fluid: Vec<&Particle> = particles.iter().filter(|p| p.tag.is_fluid()).collect();
    for (i, p) in fluid.iter().enumerate() {
        bins.entry(key(&p.position)).or_default().push(i);
    }
    let n: Vec<usize> =
        (0..3).map(|a| if a < dim { ((hi[a] - lo[a]) / spacing).floor() as usize + 1 } else { 1 }).collect();
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(out, "# sphfsi grid v{SNAPSHOT_VERSION}").map_err(io)?;
    writeln!(out, "# dimension {dim}").map_err(io)?;
    writeln!(out, "# time {t:.17e}").map_err(io)?;
    writeln!(out, "# columns x y z ux uy uz T").map_err(io)?;
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let x = lo + Vec3::new(i as f64, j as f64, k as f64) * spacing;
                let c = key(&x);
                let mut samples = Vec::new();
                for dz in if dim == 3 { -1..=1 } else { 0..=0 } {
                    for dy in -1..=1 {
                        for dxi in -1..=1 {
                            if let Some(v) = bins.get(&[c[0] + dxi, c[1] + dy, c[2] + dz]) {
                                samples.extend(v.iter().map(|&q| {
                                    let p = fluid[q];
                                    let u = p.velocity;
                                    (p.position, p.volume(), [u[0], u[1], u[2], p.temperature])
                                }));
                            }
                        }
                    }
                }
                let val = shepard_interpolate(kernel, &x, samples.into_iter().map(|(p, v, f)| (p, v, Vec4(f))));
                if let Some(Vec4(f)) = val {
                    writeln!(
                        out,
                        "{:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
                        x[0], x[1], x[2], f[0], f[1], f[2], f[3]
                    )
                    .map_err(io)?;
                }
            }
        }
    }
    out.flush().map_err(io)
}

#[derive(Clone, Copy)]
struct Vec4([f64; 4]);

impl std::ops::Add for Vec4 {
    type Output = Vec4;
    fn add(self, o: Vec4) -> Vec4 {
        Vec4([0, 1, 2, 3].map(|i| self.0[i] + o.0[i]))
    }
}

impl std::ops::Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, s: f64) -> Vec4 {
        Vec4(self.0.map(|v| v * s))
    }
}

impl std::ops::Div<f64> for Vec4 {
    type Output = Vec4;
    fn div(self, s: f64) -> Vec4 {
        Vec4(self.0.map(|v| v / s))
    }
}

/// Line-oriented CSV file with a fixed header.
pub struct CsvLog {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvLog {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        let mut out = create(path)?;
        writeln!(out, "{header}").map_err(|e| Error::io(path, e))?;
        Ok(CsvLog { path: path.to_path_buf(), out })
    }

    pub fn row(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub const TRAJECTORY_HEADER: &str = "t,body,rx,ry,rz,ux,uy,uz,wx,wy,wz";

pub fn trajectory_row(t: f64, b: &RigidBody) -> String {
    let (r, u, w) = (b.com, b.velocity, b.angular_velocity);
    format!(
        "{t:.10e},{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
        b.id, r[0], r[1], r[2], u[0], u[1], u[2], w[0], w[1], w[2]
    )
}

pub const SCALING_HEADER: &str = "cores,walltimeperstep,strongscalingefficiency";
pub const DISK_TABLE_HEADER: &str = "dx,mass,inertia";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Material, PhaseTag};

    fn mats() -> MaterialSet {
        MaterialSet::new(vec![Material::new("water", 1.0)])
    }

    fn text(ps: &[Particle], fields: &[String]) -> String {
        let mut buf = Vec::new();
        write_snapshot_to(&mut buf, ps, &mats(), 2, 0.5, fields).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_store_is_header_only() {
        let s = text(&[], &[]);
        assert_eq!(s.lines().count(), 4);
        assert!(s.lines().all(|l| l.starts_with('#')));
        assert!(s.contains("# dimension 2"));
    }

    #[test]
    fn one_particle_one_full_row() {
        let p = Particle::new(7, PhaseTag::Fluid(0), Vec3::new(0.1, 0.2, 0.0), 1.0, 1.0);
        let s = text(&[p], &[]);
        let rows: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 1);
        let cols: Vec<&str> = rows[0].split_whitespace().collect();
        assert_eq!(cols.len(), SNAPSHOT_COLUMNS.len());
        assert_eq!(&cols[..4], &["7", "fluid", "water", "-1"]);
        assert_eq!(cols[5].parse::<f64>().unwrap(), 0.2);
    }

    #[test]
    fn field_selection_keeps_id() {
        let cols = snapshot_columns(&["T".into(), "x".into()]).unwrap();
        assert_eq!(cols, vec!["id", "x", "T"]);
        assert!(snapshot_columns(&["bogus".into()]).is_err());
    }
}
