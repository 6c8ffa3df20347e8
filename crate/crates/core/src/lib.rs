//! Gauge-reduced Stokes-Dirac structures and Lie-Poisson fluids on periodic
//! grids.

pub mod checks;
pub mod dirac;
pub mod error;
pub mod fluid;
pub mod forms;
pub mod reduction;
pub mod sampling;
pub mod systems;
pub mod timestep;

pub use error::{Error, Result};
pub use forms::{Form, FormSnapshot, Grid, VectorField};
