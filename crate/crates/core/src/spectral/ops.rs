use num_complex::Complex;

use super::field::{RealField, SpectralField};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::lit(2.0) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "fractional order must lie in (0, 2), got {alpha}"
        )))
    }
}

impl<T: Scalar> RealField<T> {
    /// Discrete Fourier modes, normalized so mode 0 is the mean.
    pub fn forward(&self) -> Result<SpectralField<T>> {
        if let Some(index) = self.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField {
                index,
                value: self.values()[index].to_f64_lossy(),
            });
        }
        Ok(self.forward_unchecked())
    }

    pub(crate) fn forward_unchecked(&self) -> SpectralField<T> {
        let grid = self.grid().clone();
        let n = grid.n_points();
        let mut buf: Vec<Complex<T>> = self
            .values()
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        grid.forward_plan().process(&mut buf);
        let inv_n = T::one() / T::from_usize_lossy(n);
        for c in &mut buf {
            *c = *c * inv_n;
        }
        SpectralField::from_raw(grid, buf)
    }

    /// Spectral derivative; the Nyquist mode is dropped.
    pub fn derivative(&self) -> Result<Self> {
        Ok(self.forward()?.derivative().inverse_unchecked())
    }

    /// `Λ^alpha` through its Fourier symbol `|k|^alpha`.
    pub fn fractional_laplacian(&self, alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(self.forward()?.fractional_laplacian_unchecked(alpha).inverse_unchecked())
    }

    /// Mean-zero periodic antiderivative of a mean-zero field.
    ///
    /// The mean must vanish to within `MEAN_TOL * max|f|`.
    pub fn mean_zero_primitive(&self) -> Result<Self> {
        let mean = self.mean();
        let tol = T::lit(T::MEAN_TOL) * self.max_abs();
        if mean.abs() > tol {
            return Err(Error::MeanViolation {
                mean: mean.to_f64_lossy(),
                tolerance: tol.to_f64_lossy(),
            });
        }
        Ok(self.forward()?.primitive_unchecked().inverse_unchecked())
    }

    /// Two-thirds-rule projection of this field.
    pub fn dealiased(&self) -> Result<Self> {
        Ok(self.forward()?.dealias().inverse_unchecked())
    }
}

impl<T: Scalar> SpectralField<T> {
    /// Real field with these coefficients, after checking Hermitian symmetry.
    pub fn inverse(&self) -> Result<RealField<T>> {
        let (slot, defect) = self.symmetry_defect();
        let scale = self
            .coeffs()
            .iter()
            .fold(T::zero(), |a, c| a.max(c.norm()))
            .max(T::min_positive_value());
        if defect > T::lit(T::SYMMETRY_TOL) * scale {
            return Err(Error::Asymmetry {
                mode: slot,
                deviation: (defect / scale).to_f64_lossy(),
            });
        }
        Ok(self.inverse_unchecked())
    }

    pub(crate) fn inverse_unchecked(&self) -> RealField<T> {
        let grid = self.grid().clone();
        let mut buf = self.coeffs().to_vec();
        grid.inverse_plan().process(&mut buf);
        RealField::from_raw(grid, buf.into_iter().map(|c| c.re).collect())
    }

    /// Multiplication by `i k`; Nyquist zeroed.
    pub fn derivative(&self) -> Self {
        let nyquist = self.grid().nyquist_slot();
        self.apply_symbol(|slot, k| {
            if slot == nyquist {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(T::zero(), k)
            }
        })
    }

    pub fn fractional_laplacian(&self, alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(self.fractional_laplacian_unchecked(alpha))
    }

    pub(crate) fn fractional_laplacian_unchecked(&self, alpha: T) -> Self {
        self.apply_symbol(|_, k| Complex::new(k.abs().powf(alpha), T::zero()))
    }

    /// Division by `i k` for `m != 0`; mode 0 and Nyquist set to zero.
    ///
    /// Fails when the mean is not zero to within `MEAN_TOL` of the field scale
    /// (max coefficient magnitude bounds `max|f|` from below).
    pub fn primitive(&self) -> Result<Self> {
        let mean = self.coeffs()[0].re;
        let scale = self.coeffs().iter().fold(T::zero(), |a, c| a + c.norm());
        let tol = T::lit(T::MEAN_TOL) * scale;
        if mean.abs() > tol {
            return Err(Error::MeanViolation {
                mean: mean.to_f64_lossy(),
                tolerance: tol.to_f64_lossy(),
            });
        }
        Ok(self.primitive_unchecked())
    }

    pub(crate) fn primitive_unchecked(&self) -> Self {
        let nyquist = self.grid().nyquist_slot();
        self.apply_symbol(|slot, k| {
            if slot == 0 || slot == nyquist {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(T::zero(), -T::one() / k)
            }
        })
    }

    /// Zero every mode with `|m| > n/3`.
    pub fn dealias(&self) -> Self {
        let cutoff = self.grid().dealias_cutoff();
        let grid = self.grid().clone();
        let mut out = self.clone();
        for (slot, c) in out.coeffs_mut().iter_mut().enumerate() {
            if grid.mode(slot).unsigned_abs() > cutoff {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        out
    }
}

/// Free-function forms of the field operators.
pub fn forward_transform<T: Scalar>(f: &RealField<T>) -> Result<SpectralField<T>> {
    f.forward()
}

pub fn inverse_transform<T: Scalar>(f: &SpectralField<T>) -> Result<RealField<T>> {
    f.inverse()
}

pub fn derivative<T: Scalar>(f: &RealField<T>) -> Result<RealField<T>> {
    f.derivative()
}

pub fn fractional_laplacian<T: Scalar>(f: &RealField<T>, alpha: T) -> Result<RealField<T>> {
    f.fractional_laplacian(alpha)
}

pub fn mean_zero_primitive<T: Scalar>(f: &RealField<T>) -> Result<RealField<T>> {
    f.mean_zero_primitive()
}

pub fn dealias<T: Scalar>(f: &SpectralField<T>) -> SpectralField<T> {
    f.dealias()
}

/// Dealiased pointwise product `P[a b]`, returned in spectral form.
pub fn dealiased_product<T: Scalar>(a: &RealField<T>, b: &RealField<T>) -> SpectralField<T> {
    (a * b).forward_unchecked().dealias()
}
