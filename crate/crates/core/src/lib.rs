//! Explicit pointwise bounds on the spatial derivative of solutions to
//! one-dimensional parabolic equations with Neumann boundary conditions,
//! together with a finite-difference solver and a reflected-diffusion Monte
//! Carlo engine that check them.

pub mod cli;
pub mod error;
pub mod forms;
pub mod gradient_bound;
pub mod instances;
pub mod pde_oracle;
pub mod problem;
pub mod sde_oracle;
pub mod spectral;

pub use error::{Error, Result};
