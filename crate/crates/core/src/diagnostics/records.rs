//! Conserved quantities and per-record trajectory diagnostics.

use crate::error::Result;
use crate::model::{compute_f, Fields, ModelParams, SystemState};
use crate::scalar::Scalar;
use crate::spectral::{Interpolant, RealField};

/// `∫ rho`.
pub fn mass<T: Scalar>(rho: &RealField<T>) -> T {
    rho.integral()
}

/// `∫ rho u`.
pub fn momentum<T: Scalar>(rho: &RealField<T>, u: &RealField<T>) -> Result<T> {
    rho.ensure_same_grid(u)?;
    Ok((rho * u).integral())
}

/// `sup u - inf u` over the continuum (interpolated).
pub fn flocking_amplitude<T: Scalar>(u: &RealField<T>) -> Result<T> {
    let it = Interpolant::new(u)?;
    Ok((it.max().value - it.min().value).max(T::zero()))
}

/// Regularity indicators monitored after every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularity<T> {
    /// `sup |∂_x rho|` (of `u` for the Burgers model).
    pub max_gradient: T,
    /// Energy fraction of the top third of the retained band.
    pub tail_fraction: T,
}

/// Gradient sup-norm and spectral tail of the monitored field.
pub fn regularity<T: Scalar>(state: &SystemState<T>) -> Result<Regularity<T>> {
    let field = match state.fields() {
        Fields::Burgers { u } => u,
        _ => state.rho().expect("alignment states carry a density"),
    };
    let spectrum = field.forward()?;
    let tail_fraction = spectrum.tail_fraction();
    let max_gradient = Interpolant::from_spectrum(spectrum.derivative()).max_abs();
    Ok(Regularity {
        max_gradient,
        tail_fraction,
    })
}

/// Diagnostics of one recorded time level.
///
/// For the Burgers model the density is formally `rho = 1` and `F = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub time: T,
    pub mass: T,
    pub momentum: T,
    pub rho_min: T,
    pub rho_max: T,
    pub f_min: T,
    pub f_max: T,
    pub max_dx_f: T,
    pub flocking_amplitude: T,
    pub bkm_partial: T,
    pub u_l2_norm: T,
    pub tail_fraction: T,
    pub max_gradient: T,
}

impl<T: Scalar> TrajectoryRecord<T> {
    pub fn capture(
        state: &SystemState<T>,
        params: &ModelParams<T>,
        regularity: Regularity<T>,
        bkm_partial: T,
    ) -> Result<Self> {
        let u = state.velocity(params)?;
        let flocking = flocking_amplitude(&u)?;
        let u_l2_norm = u.l2_norm();
        let base = |mass, momentum, rho_min, rho_max, f_min, f_max, max_dx_f| Self {
            time: state.time(),
            mass,
            momentum,
            rho_min,
            rho_max,
            f_min,
            f_max,
            max_dx_f,
            flocking_amplitude: flocking,
            bkm_partial,
            u_l2_norm,
            tail_fraction: regularity.tail_fraction,
            max_gradient: regularity.max_gradient,
        };
        let Some(rho) = state.rho() else {
            let l = u.grid().length();
            let z = T::zero();
            return Ok(base(l, u.integral(), T::one(), T::one(), z, z, z));
        };
        let rho_it = Interpolant::new(rho)?;
        let g = state.g_field(params)?;
        let f = compute_f(rho, &g)?;
        let f_it = Interpolant::new(&f)?;
        Ok(base(
            mass(rho),
            momentum(rho, &u)?,
            rho_it.min().value,
            rho_it.max().value,
            f_it.min().value,
            f_it.max().value,
            f_it.derivative().max_abs(),
        ))
    }
}
