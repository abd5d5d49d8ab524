//! Shared read-only context for the pair loops.

use crate::kernel::Kernel;
use crate::model::{
    lattice_volume, ContactSpec, DirichletTarget, Material, MaterialSet, Particle, PhaseTag,
    ScalarField, ScenarioConfig, WallMotion,
};

#[derive(Debug, Clone, PartialEq)]
pub struct WallInfo {
    pub name: String,
    pub material: u16,
    pub motion: WallMotion,
    pub temperature_group: Option<usize>,
    pub concentration_group: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Physics {
    pub dimension: usize,
    pub dx: f64,
    pub kernel: Kernel,
    pub materials: MaterialSet,
    pub walls: Vec<WallInfo>,
    pub transport_velocity: bool,
    pub contact: Option<ContactSpec>,
    /// Dirichlet group fixing the temperature of fluid particles, per material.
    pub material_temperature_group: Vec<Option<usize>>,
    pub material_concentration_group: Vec<Option<usize>>,
}

impl Physics {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        let materials = cfg.material_set();
        let idx = |name: &str| materials.index_of(name).expect("validated material") as u16;
        let mut walls: Vec<WallInfo> = cfg
            .walls
            .iter()
            .map(|w| WallInfo {
                name: w.name.clone(),
                material: idx(&w.material),
                motion: w.motion.clone(),
                temperature_group: None,
                concentration_group: None,
            })
            .collect();
        let mut mt = vec![None; materials.len()];
        let mut mc = vec![None; materials.len()];
        for (g, spec) in cfg.dirichlet.iter().enumerate() {
            match &spec.target {
                DirichletTarget::Wall(name) => {
                    if let Some(w) = walls.iter_mut().find(|w| &w.name == name) {
                        match spec.field {
                            ScalarField::Temperature => w.temperature_group = Some(g),
                            ScalarField::Concentration => w.concentration_group = Some(g),
                        }
                    }
                }
                DirichletTarget::Material(name) => {
                    let m = idx(name) as usize;
                    match spec.field {
                        ScalarField::Temperature => mt[m] = Some(g),
                        ScalarField::Concentration => mc[m] = Some(g),
                    }
                }
            }
        }
        Physics {
            dimension: cfg.dimension,
            dx: cfg.dx(),
            kernel: Kernel::new(cfg.h(), cfg.dimension),
            materials,
            walls,
            transport_velocity: cfg.transport_velocity,
            contact: cfg.contact,
            material_temperature_group: mt,
            material_concentration_group: mc,
        }
    }

    /// Minimal context for unit tests and small drivers.
    pub fn simple(dimension: usize, dx: f64, materials: Vec<Material>) -> Self {
        let n = materials.len();
        Physics {
            dimension,
            dx,
            kernel: Kernel::new(dx, dimension),
            materials: MaterialSet::new(materials),
            walls: Vec::new(),
            transport_velocity: true,
            contact: None,
            material_temperature_group: vec![None; n],
            material_concentration_group: vec![None; n],
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.kernel.support_radius()
    }

    /// Δx^d.
    pub fn cell_volume(&self) -> f64 {
        lattice_volume(self.dx, self.dimension)
    }

    pub fn material(&self, p: &Particle) -> &Material {
        self.materials.get(p.material as usize)
    }

    /// Dirichlet group holding this particle's `field` fixed, if any.
    pub fn dirichlet_group(&self, p: &Particle, field: ScalarField) -> Option<usize> {
        match p.tag {
            PhaseTag::Boundary(w) => {
                let w = &self.walls[w as usize];
                match field {
                    ScalarField::Temperature => w.temperature_group,
                    ScalarField::Concentration => w.concentration_group,
                }
            }
            PhaseTag::Fluid(m) => match field {
                ScalarField::Temperature => self.material_temperature_group[m as usize],
                ScalarField::Concentration => self.material_concentration_group[m as usize],
            },
            PhaseTag::Rigid(_) => None,
        }
    }

    /// Whether the particle takes part in conduction (or diffusion). Walls
    /// only do so when a Dirichlet group is attached.
    pub fn transports(&self, p: &Particle, field: ScalarField) -> bool {
        match p.tag {
            PhaseTag::Boundary(_) => self.dirichlet_group(p, field).is_some(),
            _ => true,
        }
    }
}
