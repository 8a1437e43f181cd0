//! Periodic grid, Fourier transforms and spectral operators.

mod field;
mod grid;
mod interp;
pub mod oracle;
mod ops;

pub use field::{RealField, SpectralField};
pub use grid::{SpectralGrid, INTERPOLATION_FACTOR};
pub use interp::{refine_extremum, Extremum, Interpolant};
pub use oracle::{fractional_laplacian_quadrature, ImageSum, QuadratureLaplacian};
pub use ops::{
    dealias, dealiased_product, derivative, forward_transform, fractional_laplacian,
    inverse_transform, mean_zero_primitive,
};
