//! A priori bounds along trajectories: density extremes, transport of
//! `F = G / rho`, and the nonlinear maximum principle for `Λ^a`.

use crate::error::{Error, Result};
use crate::model::compute_f;
use crate::scalar::Scalar;
use crate::spectral::{Interpolant, RealField};

use super::records::TrajectoryRecord;

/// Relative slack of the lower density bound and the Lipschitz bound.
pub const BOUND_TOL: f64 = 1e-3;
/// Relative tolerance on the drift of the extrema of `F`.
pub const TRANSPORT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBounds<T> {
    /// No late growth: the final decile of records stays below
    /// `(1 + BOUND_TOL)` times the maximum over the earlier records.
    pub upper_bound_ok: bool,
    pub sup_rho_max: T,
    /// Time at which `sup_rho_max` is attained.
    pub sup_time: T,
    /// `rho_min(t) >= (1 - BOUND_TOL) / (1/rho_min0 + t F0_sup)` at every record.
    pub lower_bound_ok: bool,
    /// Smallest `rho_min(t) - bound(t)` over the records.
    pub worst_lower_margin: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportReport<T> {
    pub f_transport_ok: bool,
    /// Largest drift of `max F` or `min F` from their initial values.
    pub f_drift: T,
    pub f_lipschitz_ok: bool,
    /// `max_t max|∂_x F| / (||w0||_∞ rho_max(t))`.
    pub f_lipschitz_ratio: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport<T> {
    pub density: DensityBounds<T>,
    pub transport: Option<TransportReport<T>>,
}

impl<T: Scalar> BoundsReport<T> {
    pub fn all_ok(&self) -> bool {
        let d = self.density.upper_bound_ok && self.density.lower_bound_ok;
        let t = self
            .transport
            .map_or(true, |t| t.f_transport_ok && t.f_lipschitz_ok);
        d && t
    }
}

/// Lower density bound `rho_min(t) >= 1 / (1/rho_min0 + t ||F0||_∞)` and the
/// absence of late growth of `max rho`.
pub fn check_density_bounds<T: Scalar>(
    records: &[TrajectoryRecord<T>],
    f0_sup: T,
    rho_min0: T,
) -> Result<DensityBounds<T>> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let tol = T::lit(BOUND_TOL);
    let mut worst = T::infinity();
    for r in records {
        let bound = (T::one() - tol) / (T::one() / rho_min0 + r.time * f0_sup);
        worst = worst.min(r.rho_min - bound);
    }
    let (sup_idx, sup_rho_max) = records
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(i, m), (j, r)| {
            if r.rho_max > m {
                (j, r.rho_max)
            } else {
                (i, m)
            }
        });
    let split = (records.len() * 9 / 10).max(1);
    let early = records[..split]
        .iter()
        .fold(T::neg_infinity(), |m, r| m.max(r.rho_max));
    let late = records[split..]
        .iter()
        .fold(T::neg_infinity(), |m, r| m.max(r.rho_max));
    Ok(DensityBounds {
        upper_bound_ok: late <= early * (T::one() + tol),
        sup_rho_max,
        sup_time: records[sup_idx].time,
        lower_bound_ok: worst >= T::zero(),
        worst_lower_margin: worst,
    })
}

/// `||w0||_∞` with `w0 = ∂_x F0 / rho0`, the Lipschitz scale of `F`.
pub fn lipschitz_scale<T: Scalar>(rho0: &RealField<T>, g0: &RealField<T>) -> Result<T> {
    let f0 = compute_f(rho0, g0)?;
    let dx = f0.derivative()?;
    let w0 = compute_f(rho0, &dx)?;
    Ok(Interpolant::new(&w0)?.max_abs())
}

/// Transport of `F`: extrema conserved and `max|∂_x F| <= ||w0||_∞ rho_max(t)`.
pub fn check_f_transport<T: Scalar>(
    records: &[TrajectoryRecord<T>],
    w0_sup: T,
) -> Result<TransportReport<T>> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let f_drift = records.iter().fold(T::zero(), |d, r| {
        d.max((r.f_max - first.f_max).abs())
            .max((r.f_min - first.f_min).abs())
    });
    let scale = T::one() + first.f_max.abs().max(first.f_min.abs());
    let mut ratio = T::zero();
    let mut lipschitz_ok = true;
    for r in records {
        let cap = w0_sup * r.rho_max;
        if r.max_dx_f > (T::one() + T::lit(BOUND_TOL)) * cap {
            lipschitz_ok = false;
        }
        if cap > T::zero() {
            ratio = ratio.max(r.max_dx_f / cap);
        } else if r.max_dx_f > T::zero() {
            ratio = T::infinity();
        }
    }
    Ok(TransportReport {
        f_transport_ok: f_drift <= T::lit(TRANSPORT_TOL) * scale,
        f_drift,
        f_lipschitz_ok: lipschitz_ok,
        f_lipschitz_ratio: ratio,
    })
}

/// Quantities of the nonlinear maximum principle at the maximum of `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxPrincipleReport<T> {
    /// Location of `max rho`.
    pub x_bar: T,
    /// `theta(x_bar) = rho(x_bar) - kappa`.
    pub theta: T,
    /// `Λ^a rho (x_bar)`.
    pub laplacian: T,
    /// `||phi||_∞` with `phi` the mean-zero primitive of `theta`.
    pub phi_sup: T,
    /// Smallest `c` with `Λ^a θ(x̄) >= θ(x̄)^(1+a) / (c ||φ||^a)` or
    /// `θ(x̄) <= c ||φ||`.
    pub constant: T,
}

/// Evaluates the dichotomy at the interpolated maximum of `rho`.
pub fn nonlinear_max_principle_check<T: Scalar>(
    rho: &RealField<T>,
    alpha: T,
) -> Result<MaxPrincipleReport<T>> {
    let spectrum = rho.forward()?;
    let kappa = spectrum.coeffs()[0].re;
    let it = Interpolant::from_spectrum(spectrum.clone());
    let top = it.max();
    let theta = top.value - kappa;
    let lap = Interpolant::from_spectrum(spectrum.fractional_laplacian(alpha)?).eval(top.position);
    let phi_sup = Interpolant::from_spectrum(spectrum.primitive_unchecked()).max_abs();
    let constant = if theta <= T::zero() || phi_sup <= T::zero() {
        T::zero()
    } else {
        let second = theta / phi_sup;
        let first = if lap > T::zero() {
            theta.powf(T::one() + alpha) / (phi_sup.powf(alpha) * lap)
        } else {
            T::infinity()
        };
        first.min(second)
    };
    Ok(MaxPrincipleReport {
        x_bar: top.position,
        theta,
        laplacian: lap,
        phi_sup,
        constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;

    fn rec(time: f64, rho_min: f64, rho_max: f64) -> TrajectoryRecord<f64> {
        TrajectoryRecord {
            time,
            mass: 0.0,
            momentum: 0.0,
            rho_min,
            rho_max,
            f_min: 0.0,
            f_max: 0.0,
            max_dx_f: 0.0,
            flocking_amplitude: 0.0,
            bkm_partial: 0.0,
            u_l2_norm: 0.0,
            tail_fraction: 0.0,
            max_gradient: 0.0,
        }
    }

    #[test]
    fn degenerate_lower_bound_is_monotonicity() {
        let recs = [rec(0.0, 0.5, 1.5), rec(1.0, 0.5, 1.4), rec(2.0, 0.6, 1.3)];
        let d = check_density_bounds(&recs, 0.0, 0.5).unwrap();
        assert!(d.lower_bound_ok && d.upper_bound_ok);
        assert!((d.worst_lower_margin - 0.5e-3).abs() < 1e-15);
        let bad = [rec(0.0, 0.5, 1.5), rec(1.0, 0.49, 1.5)];
        assert!(!check_density_bounds(&bad, 0.0, 0.5).unwrap().lower_bound_ok);
        assert!(check_density_bounds::<f64>(&[], 0.0, 0.5).is_err());
    }

    #[test]
    fn late_growth_is_flagged() {
        let mut recs: Vec<_> = (0..20).map(|i| rec(i as f64, 0.5, 1.5)).collect();
        recs[19].rho_max = 1.6;
        let d = check_density_bounds(&recs, 0.0, 0.5).unwrap();
        assert!(!d.upper_bound_ok);
        assert_eq!(d.sup_time, 19.0);
    }

    #[test]
    fn single_mode_max_principle() {
        let g = SpectralGrid::<f64>::periodic(64).unwrap();
        let eps = 0.3;
        let rho = RealField::from_fn(g.clone(), |x| 1.0 + eps * x.cos()).unwrap();
        let r = nonlinear_max_principle_check(&rho, 0.5).unwrap();
        assert!(r.x_bar.abs() < 1e-6 || (r.x_bar - std::f64::consts::TAU).abs() < 1e-6);
        assert!((r.theta - eps).abs() < 1e-12);
        assert!((r.laplacian - eps).abs() < 1e-12);
        assert!((r.phi_sup - eps).abs() < 1e-12);
        assert!((r.constant - 1.0).abs() < 1e-10);
        let flat = RealField::constant(g, 2.0);
        assert_eq!(nonlinear_max_principle_check(&flat, 0.5).unwrap().constant, 0.0);
    }
}
