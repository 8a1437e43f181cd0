//! Floating-point abstraction shared by every numerical kernel.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar type the solver is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances that are stated for double
/// precision are relaxed for single precision through [`Scalar::MEAN_TOL`]
/// and [`Scalar::SYMMETRY_TOL`].
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Default + Display + LowerExp + Debug
{
    /// Relative tolerance for "mean zero" preconditions.
    const MEAN_TOL: f64;
    /// Relative tolerance for Hermitian symmetry of spectral coefficients.
    const SYMMETRY_TOL: f64;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    const MEAN_TOL: f64 = 1e-10;
    const SYMMETRY_TOL: f64 = 1e-10;
}

impl Scalar for f32 {
    const MEAN_TOL: f64 = 1e-4;
    const SYMMETRY_TOL: f64 = 1e-4;
}

/// Normalization constant of the singular-integral form of the fractional
/// Laplacian in one dimension.
///
/// With this constant, `c * PV∫ (f(x) - f(y)) / |x - y|^(1+alpha) dy` has
/// Fourier symbol `|k|^alpha`, i.e. `c = 1 / ∫_R (1 - cos w) / |w|^(1+alpha) dw`.
/// The integral equals `2 Γ(1-alpha) cos(pi alpha / 2) / alpha`; at `alpha = 1`
/// the expression is evaluated through its limit `pi`.
pub fn kernel_constant(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        return 1.0 / std::f64::consts::PI;
    }
    let symbol_integral =
        2.0 * libm::tgamma(1.0 - alpha) * (std::f64::consts::FRAC_PI_2 * alpha).cos() / alpha;
    1.0 / symbol_integral
}
