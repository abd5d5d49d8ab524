//! Parallel smoothed particle hydrodynamics for fluid-structure interaction
//! with rigid bodies, heat conduction and reversible phase transitions.

pub mod decomposition;
pub mod error;
pub mod fluid;
pub mod integrator;
pub mod kernel;
pub mod model;
pub mod physics;
pub mod rigid;
pub mod scenario;
pub mod simulation;
pub mod thermal;
pub mod transition;

pub use error::{Error, Result};
