//! Phase-noise spectrum of a driven optical cavity whose end mirror
//! undergoes quantum Brownian motion.

pub mod audit;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod model;
pub mod quad;
pub mod sim;
pub mod spectrum;
pub mod steady_state;

pub use error::{Error, Result};
pub use kernels::{NoiseKind, NoiseModel};
pub use model::{Cutoff, DerivedParams, PhysicalParams, ValidationReport};
pub use steady_state::{Stability, SteadyState};
pub use grid::Grid;
pub use spectrum::{SpectrumComponents, SpectrumResult};
