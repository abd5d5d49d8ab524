//! Particle data model, material catalog and scenario configuration.
//!
//! Every particle carries the full set of field quantities (velocity,
//! density, pressure, temperature, concentration, ...) regardless of its
//! phase, so phase transitions only ever flip the [`PhaseTag`].

mod config;
mod geometry;
mod seed;

pub use config::{
    validate_config, BodySpec, ContactSpec, DirichletSpec, DirichletTarget, Discretization,
    DomainSpec, FluidRegion, OpenBoundaryKind, OpenBoundarySpec, OutputPlan, ScenarioConfig,
    SchedulePoint, Side, TimeSpec, WallMotion, WallShape, WallSpec,
};
pub use geometry::Shape;
pub use seed::{lattice_points, seed_lattice};

use serde::{Deserialize, Serialize};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

pub type BodyId = u32;

/// Phase membership of a particle.
///
/// `Fluid` and `Boundary` carry an index into the material set respectively
/// the wall list; `Rigid` names the body the particle is affiliated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseTag {
    Fluid(u16),
    Rigid(BodyId),
    Boundary(u16),
}

impl PhaseTag {
    pub fn is_fluid(&self) -> bool {
        matches!(self, PhaseTag::Fluid(_))
    }

    pub fn is_rigid(&self) -> bool {
        matches!(self, PhaseTag::Rigid(_))
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, PhaseTag::Boundary(_))
    }

    pub fn body(&self) -> Option<BodyId> {
        match *self {
            PhaseTag::Rigid(b) => Some(b),
            _ => None,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            PhaseTag::Fluid(_) => "fluid",
            PhaseTag::Rigid(_) => "rigid",
            PhaseTag::Boundary(_) => "boundary",
        }
    }

    pub fn index(&self) -> u32 {
        match *self {
            PhaseTag::Fluid(i) | PhaseTag::Boundary(i) => i as u32,
            PhaseTag::Rigid(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    /// Globally unique, stable identifier.
    pub id: u64,
    pub tag: PhaseTag,
    /// Index into the material set.
    pub material: u16,
    pub position: Vec3,
    pub velocity: Vec3,
    /// Advection velocity of the transport velocity formulation.
    pub transport_velocity: Vec3,
    pub acceleration: Vec3,
    /// Background pressure contribution used to build the transport velocity.
    pub background_acceleration: Vec3,
    /// Velocity a boundary or rigid particle presents to fluid neighbors.
    pub interaction_velocity: Vec3,
    /// Accumulated coupling + contact force (rigid particles only).
    pub force: Vec3,
    /// Rigid: position relative to the center of mass in the body frame.
    /// Boundary: initial position of a moving wall particle.
    pub body_offset: Vec3,
    pub mass: f64,
    pub density: f64,
    pub pressure: f64,
    pub temperature: f64,
    pub temperature_rate: f64,
    pub concentration: f64,
    pub concentration_rate: f64,
    /// Inflow/outflow buffer zone currently prescribing this particle's velocity.
    pub open_zone: Option<u16>,
}

impl Particle {
    pub fn new(id: u64, tag: PhaseTag, position: Vec3, mass: f64, density: f64) -> Self {
        Particle {
            id,
            tag,
            material: 0,
            position,
            velocity: Vec3::zeros(),
            transport_velocity: Vec3::zeros(),
            acceleration: Vec3::zeros(),
            background_acceleration: Vec3::zeros(),
            interaction_velocity: Vec3::zeros(),
            force: Vec3::zeros(),
            body_offset: Vec3::zeros(),
            mass,
            density,
            pressure: 0.0,
            temperature: 0.0,
            temperature_rate: 0.0,
            concentration: 0.0,
            concentration_rate: 0.0,
            open_zone: None,
        }
    }

    pub fn volume(&self) -> f64 {
        self.mass / self.density
    }
}

/// Scalar transport field: drives transitions and Dirichlet groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarField {
    Temperature,
    Concentration,
}

/// Threshold rule attached to a material. On a solid material it describes
/// melting (value strictly above the threshold), on a fluid material
/// solidification (value strictly below).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRule {
    pub field: ScalarField,
    pub threshold: f64,
    /// Name of the material the particle turns into.
    pub into: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub reference_density: f64,
    #[serde(default)]
    pub kinematic_viscosity: f64,
    #[serde(default)]
    pub heat_capacity: f64,
    #[serde(default)]
    pub conductivity: f64,
    #[serde(default)]
    pub diffusivity: f64,
    #[serde(default)]
    pub speed_of_sound: f64,
    #[serde(default)]
    pub background_pressure: f64,
    /// Body force per unit mass.
    #[serde(default)]
    pub body_force: [f64; 3],
    #[serde(default)]
    pub transition: Option<TransitionRule>,
}

impl Material {
    pub fn new(name: &str, reference_density: f64) -> Self {
        Material {
            name: name.to_string(),
            reference_density,
            kinematic_viscosity: 0.0,
            heat_capacity: 0.0,
            conductivity: 0.0,
            diffusivity: 0.0,
            speed_of_sound: 0.0,
            background_pressure: 0.0,
            body_force: [0.0; 3],
            transition: None,
        }
    }

    /// η = ρ0·ν, evaluated with the reference density.
    pub fn dynamic_viscosity(&self) -> f64 {
        self.reference_density * self.kinematic_viscosity
    }

    /// p0 = ρ0·c².
    pub fn reference_pressure(&self) -> f64 {
        self.reference_density * self.speed_of_sound * self.speed_of_sound
    }

    pub fn body_force(&self) -> Vec3 {
        Vec3::from(self.body_force)
    }
}

/// Indexed collection of materials. Fluid phase tags index into it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaterialSet {
    materials: Vec<Material>,
}

impl MaterialSet {
    pub fn new(materials: Vec<Material>) -> Self {
        MaterialSet { materials }
    }

    pub fn get(&self, index: usize) -> &Material {
        &self.materials[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.materials.iter().position(|m| m.name == name)
    }

    pub fn by_name(&self, name: &str) -> Option<&Material> {
        self.materials.iter().find(|m| m.name == name)
    }

    pub fn len(&self) -> usize {
        self.materials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.materials.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Material> {
        self.materials.iter()
    }
}

/// Volume of a lattice cell, Δx^d.
pub fn lattice_volume(dx: f64, dimension: usize) -> f64 {
    dx.powi(dimension as i32)
}
