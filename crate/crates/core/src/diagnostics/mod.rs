//! Conservation and bound checks, flocking, and the modulus-of-continuity
//! calculus.

mod bounds;
mod functionals;
mod moc;
mod records;
mod scaling;

pub use bounds::{
    check_density_bounds, check_f_transport, lipschitz_scale, nonlinear_max_principle_check,
    BoundsReport, DensityBounds, MaxPrincipleReport, TransportReport, BOUND_TOL, TRANSPORT_TOL,
};
pub use functionals::{
    breakthrough_functional, dissipation_d, lower_bound_a, velocity_modulus_omega, APieces,
    BreakthroughTerms, FeasibilitySearch, FeasiblePoint, FunctionalQuadrature, TRUNCATION_FACTOR,
};
pub use moc::{moc_check, ModulusOfContinuity, MocVerdict};
pub use records::{flocking_amplitude, mass, momentum, regularity, Regularity, TrajectoryRecord};
pub use scaling::{scale_state, scaling_factor};
