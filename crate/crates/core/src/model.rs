//! Model states and right-hand sides.
//!
//! Four formulations are supported:
//!
//! * primitive: `(rho, u)` with `rho_t + (rho u)_x = 0`,
//!   `u_t + u u_x = u Λ^a rho - Λ^a(rho u)`;
//! * reformulated: `(rho, G)` with `G = u_x - Λ^a rho`, both transported in
//!   conservative form and `u` recovered from the constraint;
//! * special: the `G = 0` reduction, a single transport equation for `rho`
//!   with `u_x = Λ^a rho`;
//! * burgers: `u_t + u u_x = -eps Λ^a u`, the comparison model.
//!
//! All quadratic products are dealiased with the two-thirds rule and every
//! density update is written in flux form, so the mean of each update is
//! exactly zero.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{RealField, SpectralField, SpectralGrid};

/// Densities at or below `VACUUM_RATIO * kappa` abort the evaluation.
pub const VACUUM_RATIO: f64 = 1e-8;

/// Physical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    /// Order of the fractional Laplacian.
    pub alpha: T,
    /// Dissipation coefficient of the Burgers model.
    pub epsilon: T,
}

impl<T: Scalar> ModelParams<T> {
    /// Parameters for the alignment models; `alpha` must lie in `(0, 1)`.
    pub fn alignment(alpha: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(Error::Parameter(format!(
                "alignment models require alpha in (0, 1), got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            epsilon: T::zero(),
        })
    }

    /// Parameters for the fractional Burgers model; `alpha` in `(0, 2)`.
    pub fn burgers(alpha: T, epsilon: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::lit(2.0)) {
            return Err(Error::Parameter(format!(
                "burgers model requires alpha in (0, 2), got {alpha}"
            )));
        }
        if !(epsilon >= T::zero()) || !epsilon.is_finite() {
            return Err(Error::Parameter(format!(
                "dissipation coefficient must be nonnegative, got {epsilon}"
            )));
        }
        Ok(Self { alpha, epsilon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Primitive,
    Reformulated,
    Special,
    Burgers,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::Primitive => "primitive",
            Formulation::Reformulated => "reformulated",
            Formulation::Special => "special",
            Formulation::Burgers => "burgers",
        }
    }

    pub fn is_alignment(self) -> bool {
        !matches!(self, Formulation::Burgers)
    }
}

/// Evolved fields of each formulation.
#[derive(Debug, Clone)]
pub enum Fields<T: Scalar> {
    Primitive { rho: RealField<T>, u: RealField<T> },
    Reformulated { rho: RealField<T>, g: RealField<T> },
    Special { rho: RealField<T>, u_mean: T },
    Burgers { u: RealField<T> },
}

/// A model state with its conserved momentum and current time.
#[derive(Debug, Clone)]
pub struct SystemState<T: Scalar> {
    fields: Fields<T>,
    momentum0: T,
    time: T,
}

fn check_density<T: Scalar>(rho: &RealField<T>) -> Result<T> {
    let kappa = rho.mean();
    let min = rho.min();
    let threshold = T::lit(VACUUM_RATIO) * kappa;
    if !(kappa > T::zero()) || min <= threshold {
        return Err(Error::Vacuum {
            min_rho: min.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    Ok(kappa)
}

fn check_mean_zero<T: Scalar>(f: &RealField<T>) -> Result<()> {
    let mean = f.mean();
    let tol = T::lit(T::MEAN_TOL) * f.max_abs();
    if mean.abs() > tol {
        return Err(Error::MeanViolation {
            mean: mean.to_f64_lossy(),
            tolerance: tol.to_f64_lossy(),
        });
    }
    Ok(())
}

impl<T: Scalar> SystemState<T> {
    /// Primitive state; `momentum0` is taken as `∫ rho u`.
    pub fn primitive(rho: RealField<T>, u: RealField<T>) -> Result<Self> {
        rho.ensure_same_grid(&u)?;
        check_density(&rho)?;
        let momentum0 = momentum_integral(&rho, &u);
        Ok(Self {
            fields: Fields::Primitive { rho, u },
            momentum0,
            time: T::zero(),
        })
    }

    pub fn reformulated(rho: RealField<T>, g: RealField<T>, momentum0: T) -> Result<Self> {
        rho.ensure_same_grid(&g)?;
        check_density(&rho)?;
        check_mean_zero(&g)?;
        Ok(Self {
            fields: Fields::Reformulated { rho, g },
            momentum0,
            time: T::zero(),
        })
    }

    /// Special (`G = 0`) state; its momentum is `kappa L u_mean`.
    pub fn special(rho: RealField<T>, u_mean: T) -> Result<Self> {
        let kappa = check_density(&rho)?;
        let momentum0 = kappa * rho.grid().length() * u_mean;
        Ok(Self {
            fields: Fields::Special { rho, u_mean },
            momentum0,
            time: T::zero(),
        })
    }

    pub fn burgers(u: RealField<T>) -> Self {
        let momentum0 = u.integral();
        Self {
            fields: Fields::Burgers { u },
            momentum0,
            time: T::zero(),
        }
    }

    pub fn with_time(mut self, time: T) -> Self {
        self.time = time;
        self
    }

    pub fn fields(&self) -> &Fields<T> {
        &self.fields
    }

    pub fn formulation(&self) -> Formulation {
        match self.fields {
            Fields::Primitive { .. } => Formulation::Primitive,
            Fields::Reformulated { .. } => Formulation::Reformulated,
            Fields::Special { .. } => Formulation::Special,
            Fields::Burgers { .. } => Formulation::Burgers,
        }
    }

    pub fn momentum0(&self) -> T {
        self.momentum0
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        match &self.fields {
            Fields::Primitive { rho, .. }
            | Fields::Reformulated { rho, .. }
            | Fields::Special { rho, .. } => rho.grid(),
            Fields::Burgers { u } => u.grid(),
        }
    }

    /// Density field; `None` for the Burgers model.
    pub fn rho(&self) -> Option<&RealField<T>> {
        match &self.fields {
            Fields::Primitive { rho, .. }
            | Fields::Reformulated { rho, .. }
            | Fields::Special { rho, .. } => Some(rho),
            Fields::Burgers { .. } => None,
        }
    }

    /// Velocity, reconstructed where it is not evolved directly.
    pub fn velocity(&self, params: &ModelParams<T>) -> Result<RealField<T>> {
        match &self.fields {
            Fields::Primitive { u, .. } | Fields::Burgers { u } => Ok(u.clone()),
            Fields::Reformulated { rho, g } => {
                reconstruct_velocity(rho, g, self.momentum0, params.alpha)
            }
            Fields::Special { rho, u_mean } => special_velocity(rho, params.alpha, *u_mean),
        }
    }

    /// `G = u_x - Λ^a rho`; identically zero for the special model.
    pub fn g_field(&self, params: &ModelParams<T>) -> Result<RealField<T>> {
        match &self.fields {
            Fields::Primitive { rho, u } => compute_g(rho, u, params.alpha),
            Fields::Reformulated { g, .. } => Ok(g.clone()),
            Fields::Special { rho, .. } => Ok(RealField::zeros(rho.grid().clone())),
            Fields::Burgers { .. } => Err(Error::MissingField("density")),
        }
    }

    /// Same physical state in `(rho, G)` variables.
    pub fn to_reformulated(&self, params: &ModelParams<T>) -> Result<Self> {
        let rho = self.rho().ok_or(Error::MissingField("density"))?.clone();
        let g = self.g_field(params)?;
        Ok(Self::reformulated(rho, g, self.momentum0)?.with_time(self.time))
    }

    /// Same physical state in `(rho, u)` variables.
    pub fn to_primitive(&self, params: &ModelParams<T>) -> Result<Self> {
        let rho = self.rho().ok_or(Error::MissingField("density"))?.clone();
        let u = self.velocity(params)?;
        let momentum0 = self.momentum0;
        check_density(&rho)?;
        Ok(Self {
            fields: Fields::Primitive { rho, u },
            momentum0,
            time: self.time,
        })
    }

    /// Evolved fields in a fixed order (density first).
    pub fn components(&self) -> Vec<&RealField<T>> {
        match &self.fields {
            Fields::Primitive { rho, u } => vec![rho, u],
            Fields::Reformulated { rho, g } => vec![rho, g],
            Fields::Special { rho, .. } => vec![rho],
            Fields::Burgers { u } => vec![u],
        }
    }

    /// State of the same formulation with replaced components and time.
    ///
    /// Intended for time steppers: checks lengths and finiteness, not the
    /// physical preconditions (those are enforced by the next RHS call).
    pub fn with_components(&self, comps: Vec<RealField<T>>, time: T) -> Result<Self> {
        let expected = self.components().len();
        if comps.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: comps.len(),
            });
        }
        for c in &comps {
            if let Some(index) = c.values().iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidField {
                    index,
                    value: c.values()[index].to_f64_lossy(),
                });
            }
        }
        let mut it = comps.into_iter();
        let mut next = || it.next().expect("component count checked");
        let fields = match &self.fields {
            Fields::Primitive { .. } => Fields::Primitive {
                rho: next(),
                u: next(),
            },
            Fields::Reformulated { .. } => Fields::Reformulated {
                rho: next(),
                g: next(),
            },
            Fields::Special { u_mean, .. } => Fields::Special {
                rho: next(),
                u_mean: *u_mean,
            },
            Fields::Burgers { .. } => Fields::Burgers { u: next() },
        };
        Ok(Self {
            fields,
            momentum0: self.momentum0,
            time,
        })
    }
}

/// Auxiliary fields of the reformulation.
#[derive(Debug, Clone)]
pub struct DerivedFields<T: Scalar> {
    /// `rho - kappa`.
    pub theta: RealField<T>,
    /// Mean-zero primitive of `theta`.
    pub phi: RealField<T>,
    /// Mean-zero primitive of `G`.
    pub psi: RealField<T>,
    /// `G / rho`.
    pub f: RealField<T>,
    pub kappa: T,
    /// Constant part of the reconstructed velocity.
    pub i0: T,
}

/// `θ`, `φ`, `ψ`, `F`, `κ` and `I_0` of a density-carrying state.
pub fn derived_fields<T: Scalar>(
    state: &SystemState<T>,
    params: &ModelParams<T>,
) -> Result<DerivedFields<T>> {
    let rho = state.rho().ok_or(Error::MissingField("density"))?;
    let g = state.g_field(params)?;
    let kappa = check_density(rho)?;
    let rho_hat = rho.forward()?;
    let phi = fluctuation_primitive(&rho_hat).inverse_unchecked();
    let theta = rho.shift(-kappa);
    check_mean_zero(&g)?;
    let psi_hat = g.forward()?.primitive_unchecked();
    let psi = psi_hat.inverse_unchecked();
    let i0 = velocity_offset(rho, &psi, kappa, state.momentum0);
    let f = compute_f(rho, &g)?;
    Ok(DerivedFields {
        theta,
        phi,
        psi,
        f,
        kappa,
        i0,
    })
}

/// `∫ rho u`, exact on the uniform grid for band-limited products.
pub fn momentum_integral<T: Scalar>(rho: &RealField<T>, u: &RealField<T>) -> T {
    (rho * u).integral()
}

/// Mean-zero primitive of `rho - kappa`, directly from the spectrum of `rho`.
fn fluctuation_primitive<T: Scalar>(rho_hat: &SpectralField<T>) -> SpectralField<T> {
    // the primitive symbol already discards mode 0
    rho_hat.primitive_unchecked()
}

fn velocity_offset<T: Scalar>(rho: &RealField<T>, psi: &RealField<T>, kappa: T, momentum0: T) -> T {
    let l = rho.grid().length();
    (momentum0 - momentum_integral(rho, psi)) / (kappa * l)
}

/// `G = u_x - Λ^a rho`.
pub fn compute_g<T: Scalar>(rho: &RealField<T>, u: &RealField<T>, alpha: T) -> Result<RealField<T>> {
    rho.ensure_same_grid(u)?;
    let du = u.forward()?.derivative();
    let lr = rho.forward()?.fractional_laplacian(alpha)?;
    Ok(sub_spectra(&du, &lr).inverse_unchecked())
}

/// `F = G / rho`.
pub fn compute_f<T: Scalar>(rho: &RealField<T>, g: &RealField<T>) -> Result<RealField<T>> {
    rho.ensure_same_grid(g)?;
    let min = rho.min();
    if !(min > T::zero()) {
        return Err(Error::Vacuum {
            min_rho: min.to_f64_lossy(),
            threshold: 0.0,
        });
    }
    Ok(g.zip_map(rho, |a, b| a / b))
}

/// `u = Λ^a φ + ψ + I_0` with `I_0` fixed by the momentum constraint
/// `∫ rho u = momentum0`.
pub fn reconstruct_velocity<T: Scalar>(
    rho: &RealField<T>,
    g: &RealField<T>,
    momentum0: T,
    alpha: T,
) -> Result<RealField<T>> {
    rho.ensure_same_grid(g)?;
    let kappa = check_density(rho)?;
    check_mean_zero(g)?;
    let rho_hat = rho.forward()?;
    let psi_hat = g.forward()?.primitive_unchecked();
    let psi = psi_hat.inverse_unchecked();
    // ∫ rho Λ^a φ = ∫ θ Λ^a φ = 0, so only ψ enters the offset
    let i0 = velocity_offset(rho, &psi, kappa, momentum0);
    let lphi = fluctuation_primitive(&rho_hat).fractional_laplacian(alpha)?;
    let mut u_hat = &lphi + &psi_hat;
    u_hat.coeffs_mut()[0] = Complex::new(i0, T::zero());
    Ok(u_hat.inverse_unchecked())
}

/// Velocity of the special model: `Λ^a ∂_x^{-1}(rho - kappa) + u_mean`.
pub fn special_velocity<T: Scalar>(rho: &RealField<T>, alpha: T, u_mean: T) -> Result<RealField<T>> {
    check_density(rho)?;
    let mut u_hat = fluctuation_primitive(&rho.forward()?).fractional_laplacian(alpha)?;
    u_hat.coeffs_mut()[0] = Complex::new(u_mean, T::zero());
    Ok(u_hat.inverse_unchecked())
}

fn sub_spectra<T: Scalar>(a: &SpectralField<T>, b: &SpectralField<T>) -> SpectralField<T> {
    let coeffs = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x - y).collect();
    SpectralField::new(a.grid().clone(), coeffs).expect("matching lengths")
}

/// `-∂_x P[a b]`.
fn flux_divergence<T: Scalar>(a: &RealField<T>, b: &RealField<T>) -> SpectralField<T> {
    let d = (a * b).forward_unchecked().dealias().derivative();
    d.apply_symbol(|_, _| Complex::new(-T::one(), T::zero()))
}

/// Primitive-model right-hand side `(d rho, d u)`.
pub fn rhs_primitive<T: Scalar>(
    rho: &RealField<T>,
    u: &RealField<T>,
    alpha: T,
) -> Result<(RealField<T>, RealField<T>)> {
    rho.ensure_same_grid(u)?;
    check_density(rho)?;
    let d_rho = flux_divergence(rho, u).inverse_unchecked();

    let rho_u = (rho * u).forward_unchecked().dealias();
    let l_rho = rho.forward()?.fractional_laplacian(alpha)?.inverse_unchecked();
    let l_rho_u = rho_u.fractional_laplacian_unchecked(alpha);
    // -u u_x = -(u^2 / 2)_x
    let half = T::lit(0.5);
    let transport = flux_divergence(u, u).apply_symbol(|_, _| Complex::new(half, T::zero()));
    let stretch = (u * &l_rho).forward_unchecked().dealias();
    let d_u_hat = sub_spectra(&(&transport + &stretch), &l_rho_u);
    Ok((d_rho, d_u_hat.inverse_unchecked()))
}

/// Reformulated right-hand side `(d rho, d G)`.
pub fn rhs_reformulated<T: Scalar>(
    rho: &RealField<T>,
    g: &RealField<T>,
    momentum0: T,
    alpha: T,
) -> Result<(RealField<T>, RealField<T>)> {
    let u = reconstruct_velocity(rho, g, momentum0, alpha)?;
    let d_rho = flux_divergence(rho, &u).inverse_unchecked();
    let d_g = flux_divergence(g, &u).inverse_unchecked();
    Ok((d_rho, d_g))
}

/// Special-model right-hand side `d rho`.
pub fn rhs_special<T: Scalar>(rho: &RealField<T>, alpha: T, u_mean: T) -> Result<RealField<T>> {
    let u = special_velocity(rho, alpha, u_mean)?;
    Ok(flux_divergence(rho, &u).inverse_unchecked())
}

/// Fractional Burgers right-hand side `-u u_x - eps Λ^a u`.
pub fn rhs_burgers<T: Scalar>(u: &RealField<T>, alpha: T, epsilon: T) -> Result<RealField<T>> {
    let half = T::lit(0.5);
    let transport = flux_divergence(u, u).apply_symbol(|_, _| Complex::new(half, T::zero()));
    let damping = u
        .forward()?
        .fractional_laplacian(alpha)?
        .apply_symbol(|_, _| Complex::new(-epsilon, T::zero()));
    Ok((&transport + &damping).inverse_unchecked())
}

/// Right-hand side of any state, in the order of [`SystemState::components`].
pub fn rhs<T: Scalar>(state: &SystemState<T>, params: &ModelParams<T>) -> Result<Vec<RealField<T>>> {
    let alpha = params.alpha;
    match state.fields() {
        Fields::Primitive { rho, u } => {
            let (a, b) = rhs_primitive(rho, u, alpha)?;
            Ok(vec![a, b])
        }
        Fields::Reformulated { rho, g } => {
            let (a, b) = rhs_reformulated(rho, g, state.momentum0(), alpha)?;
            Ok(vec![a, b])
        }
        Fields::Special { rho, u_mean } => Ok(vec![rhs_special(rho, alpha, *u_mean)?]),
        Fields::Burgers { u } => Ok(vec![rhs_burgers(u, alpha, params.epsilon)?]),
    }
}

/// Primitive data with `G_0 = 0`: `u_0 = Λ^a ∂_x^{-1}(rho_0 - kappa) + u_mean`.
pub fn make_special_data<T: Scalar>(rho0: RealField<T>, alpha: T, u_mean: T) -> Result<SystemState<T>> {
    let u0 = special_velocity(&rho0, alpha, u_mean)?;
    SystemState::primitive(rho0, u0)
}
