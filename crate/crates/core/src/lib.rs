//! Pseudo-spectral simulation and verification toolkit for the
//! one-dimensional Euler alignment system with fractional kernel
//! `c_a / |x|^(1+a)` on the periodic torus.
//!
//! All numerical kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the double-precision instantiation used by
//! the command-line front end and the verification suite.

pub mod diagnostics;
pub mod error;
pub mod initial;
pub mod integrator;
pub mod model;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{kernel_constant, Scalar};

pub type State = model::SystemState<f64>;
pub type Params = model::ModelParams<f64>;
pub type Config = integrator::StepperConfig<f64>;
pub type Record = diagnostics::TrajectoryRecord<f64>;

pub type Grid = spectral::SpectralGrid<f64>;
pub type Field = spectral::RealField<f64>;
pub type Spectrum = spectral::SpectralField<f64>;
