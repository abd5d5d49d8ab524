use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

use super::{Material, MaterialSet, ScalarField, Shape, Vec3};

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

fn three() -> f64 {
    3.0
}

fn skin_default() -> f64 {
    0.1
}

/// Complete description of a simulation: geometry, materials, boundary and
/// initial conditions, discretization, time horizon and outputs.
///
/// Serializes to and from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub dimension: usize,
    pub discretization: Discretization,
    pub domain: DomainSpec,
    pub time: TimeSpec,
    #[serde(default = "one")]
    pub workers: usize,
    /// Transport velocity formulation on/off.
    #[serde(default = "yes")]
    pub transport_velocity: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub contact: Option<ContactSpec>,
    #[serde(default)]
    pub output: OutputPlan,
    pub materials: Vec<Material>,
    #[serde(default)]
    pub fluids: Vec<FluidRegion>,
    #[serde(default)]
    pub bodies: Vec<BodySpec>,
    #[serde(default)]
    pub walls: Vec<WallSpec>,
    #[serde(default)]
    pub dirichlet: Vec<DirichletSpec>,
    #[serde(default)]
    pub open_boundaries: Vec<OpenBoundarySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    /// Initial particle spacing Δx.
    pub dx: f64,
    /// Smoothing length; defaults to Δx.
    #[serde(default)]
    pub smoothing_length: Option<f64>,
    /// Support radius in units of h.
    #[serde(default = "three")]
    pub kernel_scaling: f64,
    /// Cell edge; defaults to the support radius plus the Verlet skin.
    #[serde(default)]
    pub cell_size: Option<f64>,
    /// Verlet skin in units of h.
    #[serde(default = "skin_default")]
    pub verlet_skin: f64,
    /// A point of the global particle lattice; defaults to domain min + Δx/2.
    #[serde(default)]
    pub lattice_anchor: Option<[f64; 3]>,
}

impl Discretization {
    pub fn new(dx: f64) -> Self {
        Discretization {
            dx,
            smoothing_length: None,
            kernel_scaling: 3.0,
            cell_size: None,
            verlet_skin: 0.1,
            lattice_anchor: None,
        }
    }

    pub fn h(&self) -> f64 {
        self.smoothing_length.unwrap_or(self.dx)
    }

    pub fn support_radius(&self) -> f64 {
        self.kernel_scaling * self.h()
    }

    pub fn skin(&self) -> f64 {
        self.verlet_skin * self.h()
    }

    pub fn min_cell_edge(&self) -> f64 {
        self.cell_size.unwrap_or(self.support_radius() + self.skin())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
    #[serde(default)]
    pub periodic: [bool; 3],
}

impl DomainSpec {
    pub fn min(&self) -> Vec3 {
        Vec3::from(self.min)
    }

    pub fn max(&self) -> Vec3 {
        Vec3::from(self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub t_end: f64,
    /// Fixed time step; derived from the step conditions when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Lower bound for |u_max| in the CFL condition, for flows that start
    /// at rest.
    #[serde(default)]
    pub expected_max_velocity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactSpec {
    pub stiffness: f64,
    #[serde(default)]
    pub damping: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPlan {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub snapshot_interval: Option<f64>,
    #[serde(default)]
    pub trajectory_interval: Option<f64>,
    /// Snapshot columns to write; empty means all.
    #[serde(default)]
    pub fields: Vec<String>,
    /// Spacing of the Shepard-filtered grid dump written with each snapshot.
    #[serde(default)]
    pub grid_spacing: Option<f64>,
    #[serde(default)]
    pub event_log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidRegion {
    pub material: String,
    pub shape: Shape,
    #[serde(default)]
    pub velocity: [f64; 3],
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub concentration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub material: String,
    pub shape: Shape,
    #[serde(default)]
    pub velocity: [f64; 3],
    #[serde(default)]
    pub angular_velocity: [f64; 3],
    #[serde(default = "yes")]
    pub mobile: bool,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub concentration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Side {
    pub fn axis(&self) -> usize {
        match self {
            Side::XMin | Side::XMax => 0,
            Side::YMin | Side::YMax => 1,
            Side::ZMin | Side::ZMax => 2,
        }
    }

    pub fn is_max(&self) -> bool {
        matches!(self, Side::XMax | Side::YMax | Side::ZMax)
    }

    pub fn all(dimension: usize) -> Vec<Side> {
        let mut v = vec![Side::XMin, Side::XMax, Side::YMin, Side::YMax];
        if dimension == 3 {
            v.extend([Side::ZMin, Side::ZMax]);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WallShape {
    /// Boundary layers wrapped around the box `min..max` on the listed sides.
    Shell {
        min: [f64; 3],
        max: [f64; 3],
        #[serde(default)]
        sides: Vec<Side>,
        #[serde(default)]
        layers: Option<usize>,
    },
    /// Boundary particles filling a solid region.
    Solid { shape: Shape },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WallMotion {
    Fixed,
    /// Tangential velocity without displacement (e.g. a periodic belt).
    Sliding { velocity: [f64; 3] },
    Translating { velocity: [f64; 3] },
    /// Displacement A·(cos ωt − 1).
    Harmonic { amplitude: [f64; 3], angular_frequency: f64 },
}

impl Default for WallMotion {
    fn default() -> Self {
        WallMotion::Fixed
    }
}

impl WallMotion {
    pub fn velocity(&self, t: f64) -> Vec3 {
        match self {
            WallMotion::Fixed => Vec3::zeros(),
            WallMotion::Sliding { velocity } | WallMotion::Translating { velocity } => {
                Vec3::from(*velocity)
            }
            WallMotion::Harmonic { amplitude, angular_frequency: w } => {
                Vec3::from(*amplitude) * (-w * (w * t).sin())
            }
        }
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        match self {
            WallMotion::Harmonic { amplitude, angular_frequency: w } => {
                Vec3::from(*amplitude) * (-w * w * (w * t).cos())
            }
            _ => Vec3::zeros(),
        }
    }

    /// Displacement from the initial position at time t.
    pub fn displacement(&self, t: f64) -> Vec3 {
        match self {
            WallMotion::Fixed | WallMotion::Sliding { .. } => Vec3::zeros(),
            WallMotion::Translating { velocity } => Vec3::from(*velocity) * t,
            WallMotion::Harmonic { amplitude, angular_frequency: w } => {
                Vec3::from(*amplitude) * ((w * t).cos() - 1.0)
            }
        }
    }

    pub fn moves(&self) -> bool {
        matches!(self, WallMotion::Translating { .. } | WallMotion::Harmonic { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallSpec {
    pub name: String,
    pub material: String,
    pub shape: WallShape,
    #[serde(default)]
    pub motion: WallMotion,
    /// Regions removed from the wall (inlets, openings).
    #[serde(default)]
    pub openings: Vec<Shape>,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub concentration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirichletTarget {
    Wall(String),
    Material(String),
}

/// Value applied while `t <= until`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub until: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletSpec {
    pub name: String,
    pub field: ScalarField,
    pub target: DirichletTarget,
    #[serde(default)]
    pub schedule: Vec<SchedulePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpenBoundaryKind {
    Inflow,
    Outflow,
}

/// Buffer zone with a prescribed parabolic velocity profile. Inflow zones
/// recycle particles that leave them into the domain; outflow zones delete
/// particles that leave them downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenBoundarySpec {
    pub kind: OpenBoundaryKind,
    pub material: String,
    /// Axis-aligned buffer box.
    pub zone: Shape,
    pub axis: usize,
    /// Signed mean velocity along `axis`.
    pub mean_velocity: f64,
    /// The profile is zero for t <= start_time.
    #[serde(default)]
    pub start_time: f64,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub concentration: f64,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn material_set(&self) -> MaterialSet {
        MaterialSet::new(self.materials.clone())
    }

    pub fn h(&self) -> f64 {
        self.discretization.h()
    }

    pub fn dx(&self) -> f64 {
        self.discretization.dx
    }

    pub fn support_radius(&self) -> f64 {
        self.discretization.support_radius()
    }

    pub fn lattice_anchor(&self) -> Vec3 {
        match self.discretization.lattice_anchor {
            Some(a) => Vec3::from(a),
            None => self.domain.min().add_scalar(0.5 * self.dx()),
        }
    }

    /// Materials used by fluid particles, directly or through transitions.
    pub fn fluid_material_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.fluids.iter().map(|f| f.material.clone()).collect();
        names.extend(self.open_boundaries.iter().map(|o| o.material.clone()));
        let solid: HashSet<&str> = self.bodies.iter().map(|b| b.material.as_str()).collect();
        for m in &self.materials {
            if let Some(rule) = &m.transition {
                if solid.contains(m.name.as_str()) {
                    names.push(rule.into.clone());
                }
            }
        }
        let mut seen = HashSet::new();
        names.retain(|n| seen.insert(n.clone()));
        names
    }
}

/// Report every violated invariant of `cfg`.
pub fn validate_config(cfg: &ScenarioConfig) -> std::result::Result<(), Vec<Violation>> {
    let mut v: Vec<Violation> = Vec::new();
    let mut bad = |s: String| v.push(Violation(s));
    let d = cfg.dimension;
    let disc = &cfg.discretization;

    if d != 2 && d != 3 {
        bad(format!("dimension must be 2 or 3, got {d}"));
    }
    if !(disc.dx > 0.0) {
        bad(format!("particle spacing must be positive, got {}", disc.dx));
    }
    if let Some(h) = disc.smoothing_length {
        if !(h > 0.0) {
            bad(format!("smoothing length must be positive, got {h}"));
        }
    }
    if !(disc.kernel_scaling > 0.0) {
        bad("kernel scaling must be positive".into());
    }
    if !(disc.verlet_skin >= 0.0) {
        bad("verlet skin must be non-negative".into());
    }
    let rc = disc.support_radius();
    if let Some(edge) = disc.cell_size {
        if edge < rc {
            bad(format!("cell edge < support radius ({edge} < {rc})"));
        }
    }
    let axes = d.min(3);
    for a in 0..axes {
        let len = cfg.domain.max[a] - cfg.domain.min[a];
        if !(len > 0.0) {
            bad(format!("domain extent along axis {a} must be positive"));
        } else if cfg.domain.periodic[a] && rc > 0.0 {
            let cells = (len / disc.min_cell_edge()).floor();
            if cells < 3.0 {
                bad(format!("periodic axis {a} needs at least 3 cells, domain fits {cells}"));
            }
        }
    }
    if !(cfg.time.t_end > 0.0) {
        bad("time horizon must be positive".into());
    }
    if let Some(dt) = cfg.time.dt {
        if !(dt > 0.0) {
            bad(format!("time step must be positive, got {dt}"));
        }
    }
    if cfg.workers == 0 {
        bad("worker count must be at least 1".into());
    }
    if let Some(c) = &cfg.contact {
        if c.stiffness < 0.0 || c.damping < 0.0 {
            bad("contact stiffness and damping must be non-negative".into());
        }
    }

    let mut names = HashSet::new();
    for m in &cfg.materials {
        if !names.insert(m.name.as_str()) {
            bad(format!("duplicate material `{}`", m.name));
        }
        if !(m.reference_density > 0.0) {
            bad(format!("material `{}`: reference density must be positive", m.name));
        }
        if m.conductivity > 0.0 && !(m.heat_capacity > 0.0) {
            bad(format!("material `{}`: conductive material needs a positive heat capacity", m.name));
        }
        if m.conductivity < 0.0 || m.diffusivity < 0.0 || m.kinematic_viscosity < 0.0 {
            bad(format!("material `{}`: transport coefficients must be non-negative", m.name));
        }
        if let Some(rule) = &m.transition {
            if !names_contains(&cfg.materials, &rule.into) {
                bad(format!("material `{}`: transition target `{}` is not defined", m.name, rule.into));
            }
        }
    }
    let known = |n: &str| names_contains(&cfg.materials, n);
    for name in cfg.fluid_material_names() {
        match cfg.materials.iter().find(|m| m.name == name) {
            Some(m) if !(m.speed_of_sound > 0.0) => {
                bad(format!("fluid material `{name}`: speed of sound must be positive"))
            }
            _ => {}
        }
    }
    for f in &cfg.fluids {
        if !known(&f.material) {
            bad(format!("fluid region uses undefined material `{}`", f.material));
        }
        if !f.shape.supports_dimension(d) {
            bad(format!("fluid region: {} is not available in {d}D", f.shape.name()));
        }
    }
    for (i, b) in cfg.bodies.iter().enumerate() {
        if !known(&b.material) {
            bad(format!("body {i} uses undefined material `{}`", b.material));
        }
        if !b.shape.supports_dimension(d) {
            bad(format!("body {i}: {} is not available in {d}D", b.shape.name()));
        }
    }
    let mut wall_names = HashSet::new();
    for w in &cfg.walls {
        if !wall_names.insert(w.name.as_str()) {
            bad(format!("duplicate wall `{}`", w.name));
        }
        if !known(&w.material) {
            bad(format!("wall `{}` uses undefined material `{}`", w.name, w.material));
        }
        match &w.shape {
            WallShape::Shell { sides, .. } => {
                let sides = if sides.is_empty() { Side::all(d) } else { sides.clone() };
                for s in sides {
                    if s.axis() >= d {
                        bad(format!("wall `{}`: side {s:?} does not exist in {d}D", w.name));
                    } else if cfg.domain.periodic[s.axis()] {
                        bad(format!("wall `{}`: side {s:?} lies on periodic axis {}", w.name, s.axis()));
                    }
                }
            }
            WallShape::Solid { shape } => {
                if !shape.supports_dimension(d) {
                    bad(format!("wall `{}`: {} is not available in {d}D", w.name, shape.name()));
                }
            }
        }
    }
    for g in &cfg.dirichlet {
        match &g.target {
            DirichletTarget::Wall(n) if !wall_names.contains(n.as_str()) => {
                bad(format!("dirichlet group `{}` targets unknown wall `{n}`", g.name))
            }
            DirichletTarget::Material(n) if !known(n) => {
                bad(format!("dirichlet group `{}` targets unknown material `{n}`", g.name))
            }
            _ => {}
        }
    }
    for o in &cfg.open_boundaries {
        if !known(&o.material) {
            bad(format!("open boundary uses undefined material `{}`", o.material));
        }
        if o.axis >= d {
            bad(format!("open boundary axis {} does not exist in {d}D", o.axis));
        }
        if !matches!(o.zone, Shape::Box { .. }) {
            bad("open boundary zone must be a box".into());
        }
    }
    if let Some(s) = cfg.output.grid_spacing {
        if !(s > 0.0) {
            bad("grid dump spacing must be positive".into());
        }
    }

    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

fn names_contains(materials: &[Material], name: &str) -> bool {
    materials.iter().any(|m| m.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ScenarioConfig {
        let mut water = Material::new("water", 1000.0);
        water.speed_of_sound = 0.25;
        water.kinematic_viscosity = 5e-6;
        ScenarioConfig {
            name: "t".into(),
            dimension: 2,
            discretization: Discretization::new(1e-3),
            domain: DomainSpec { min: [0.0; 3], max: [0.05, 0.01, 0.0], periodic: [true, false, false] },
            time: TimeSpec { t_end: 1.0, dt: None, expected_max_velocity: 0.0 },
            workers: 1,
            transport_velocity: true,
            seed: 0,
            contact: None,
            output: OutputPlan::default(),
            materials: vec![water],
            fluids: vec![FluidRegion {
                material: "water".into(),
                shape: Shape::rect([0.0, 0.003], [0.05, 0.007]),
                velocity: [0.0; 3],
                temperature: 0.0,
                concentration: 0.0,
            }],
            bodies: vec![],
            walls: vec![],
            dirichlet: vec![],
            open_boundaries: vec![],
        }
    }

    #[test]
    fn valid_config_passes() {
        assert_eq!(validate_config(&base()), Ok(()));
    }

    #[test]
    fn small_cells_are_reported() {
        let mut c = base();
        c.discretization.cell_size = Some(0.5 * c.support_radius());
        let v = validate_config(&c).unwrap_err();
        assert!(v.iter().any(|x| x.0.contains("cell edge < support radius")));
    }

    #[test]
    fn circle_in_three_dimensions_is_reported() {
        let mut c = base();
        c.dimension = 3;
        c.domain.max[2] = 0.01;
        c.fluids[0].shape = Shape::circle([0.0, 0.0], 1.0);
        let v = validate_config(&c).unwrap_err();
        assert!(v.iter().any(|x| x.0.contains("circle")));
    }

    #[test]
    fn every_violation_is_reported() {
        let mut c = base();
        c.discretization.dx = -1.0;
        c.fluids[0].material = "oil".into();
        c.walls.push(WallSpec {
            name: "w".into(),
            material: "water".into(),
            shape: WallShape::Shell { min: [0.0; 3], max: [1.0; 3], sides: vec![Side::XMin], layers: None },
            motion: WallMotion::Fixed,
            openings: vec![],
            temperature: 0.0,
            concentration: 0.0,
        });
        let v = validate_config(&c).unwrap_err();
        assert!(v.iter().any(|x| x.0.contains("spacing")));
        assert!(v.iter().any(|x| x.0.contains("oil")));
        assert!(v.iter().any(|x| x.0.contains("periodic axis 0")));
    }

    #[test]
    fn toml_round_trip() {
        let c = base();
        let text = c.to_toml_string();
        let back = ScenarioConfig::from_toml_str(&text, Path::new("x.toml")).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn harmonic_wall_motion_is_consistent() {
        let m = WallMotion::Harmonic { amplitude: [14.5, 0.0, 0.0], angular_frequency: std::f64::consts::PI };
        // x(t) = 14.5 + d(t) goes from 14.5 to -14.5 over one time unit
        assert!((m.displacement(1.0)[0] + 29.0).abs() < 1e-12);
        let t = 0.3;
        let eps = 1e-6;
        let fd = (m.displacement(t + eps) - m.displacement(t - eps)) / (2.0 * eps);
        assert!((fd - m.velocity(t)).norm() < 1e-6);
    }
}
