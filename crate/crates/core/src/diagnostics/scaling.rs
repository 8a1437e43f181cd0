//! The scaling symmetry
//!
//! ```text
//! rho_l(x, t) = rho(l x, l^a t)
//! G_l(x, t)   = l^a G(l x, l^a t)
//! u_l(x, t)   = l^(a-1) u(l x, l^a t)
//! ```
//!
//! realized for `l = 1/k`: the rescaled state lives on the period `k L`
//! with `k n` points, so the grid spacing is unchanged.

use crate::error::{Error, Result};
use crate::model::{Fields, ModelParams, SystemState};
use crate::scalar::Scalar;
use crate::spectral::{Interpolant, RealField, SpectralGrid};

/// Integer `k` with `lambda = 1/k`, if any.
pub fn scaling_factor(lambda: f64) -> Result<usize> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Parameter(format!(
            "scaling parameter must be the reciprocal of a positive integer, got {lambda}"
        )));
    }
    let k = (1.0 / lambda).round();
    if ((k * lambda) - 1.0).abs() > 1e-12 || k > 1e6 {
        return Err(Error::Parameter(format!(
            "scaling parameter must be the reciprocal of a positive integer, got {lambda}"
        )));
    }
    Ok(k as usize)
}

fn stretch<T: Scalar>(f: &RealField<T>, k: usize, scale: T) -> Result<RealField<T>> {
    let grid = f.grid();
    let big = SpectralGrid::new(grid.n_points() * k, grid.length() * T::from_usize_lossy(k))?;
    let values = if k == 1 {
        f.values().to_vec()
    } else {
        Interpolant::new(f)?.refined_values(k)
    };
    RealField::new(big, values.into_iter().map(|v| v * scale).collect())
}

/// Rescales `state` by `lambda = 1/k`; the time becomes `t lambda^(-a)`.
pub fn scale_state<T: Scalar>(
    state: &SystemState<T>,
    params: &ModelParams<T>,
    lambda: f64,
) -> Result<SystemState<T>> {
    let k = scaling_factor(lambda)?;
    let a = params.alpha;
    let l = T::lit(lambda);
    let u_scale = l.powf(a - T::one());
    let time = state.time() * l.powf(-a);
    let scaled = match state.fields() {
        Fields::Primitive { rho, u } => {
            SystemState::primitive(stretch(rho, k, T::one())?, stretch(u, k, u_scale)?)?
        }
        Fields::Reformulated { rho, g } => SystemState::reformulated(
            stretch(rho, k, T::one())?,
            stretch(g, k, l.powf(a))?,
            state.momentum0() * l.powf(a - T::lit(2.0)),
        )?,
        Fields::Special { rho, u_mean } => {
            SystemState::special(stretch(rho, k, T::one())?, *u_mean * u_scale)?
        }
        Fields::Burgers { u } => SystemState::burgers(stretch(u, k, u_scale)?),
    };
    Ok(scaled.with_time(time))
}
