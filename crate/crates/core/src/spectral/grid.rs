use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Factor used for zero-padded Fourier interpolation of sup-norms.
pub const INTERPOLATION_FACTOR: usize = 4;

/// Uniform periodic grid on `[0, L)` with its FFT plans.
///
/// Spectral coefficients are stored in FFT order: slot `i` holds mode
/// `m = i` for `i <= n/2` and `m = i - n` otherwise. Slot `n/2` is the
/// Nyquist mode.
pub struct SpectralGrid<T: Scalar> {
    n: usize,
    length: T,
    wavenumbers: Vec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    fine_inverse: Arc<dyn Fft<T>>,
}

impl<T: Scalar> SpectralGrid<T> {
    pub fn new(n: usize, length: T) -> Result<Arc<Self>> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and at least 8, got {n}"
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let fine_inverse = planner.plan_fft_inverse(n * INTERPOLATION_FACTOR);
        let base = T::TAU() / length;
        let wavenumbers = (0..n)
            .map(|i| base * T::lit(mode_of(i, n) as f64))
            .collect();
        Ok(Arc::new(Self {
            n,
            length,
            wavenumbers,
            forward,
            inverse,
            fine_inverse,
        }))
    }

    /// Grid on the standard torus `[0, 2pi)`, where `k_m = m`.
    pub fn periodic(n: usize) -> Result<Arc<Self>> {
        Self::new(n, T::TAU())
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn spacing(&self) -> T {
        self.length / T::from_usize_lossy(self.n)
    }

    pub fn node(&self, j: usize) -> T {
        T::from_usize_lossy(j) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Wavenumbers `2 pi m / L` in FFT order.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    /// Signed mode index stored in FFT slot `slot`.
    pub fn mode(&self, slot: usize) -> isize {
        mode_of(slot, self.n)
    }

    /// FFT slot holding signed mode `m` (`|m| <= n/2`).
    pub fn slot(&self, m: isize) -> usize {
        let n = self.n as isize;
        debug_assert!(m.abs() <= n / 2);
        m.rem_euclid(n) as usize
    }

    pub fn nyquist_slot(&self) -> usize {
        self.n / 2
    }

    /// Largest mode index kept by the two-thirds rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// Largest retained wavenumber `2 pi (n/3) / L`.
    pub fn max_retained_wavenumber(&self) -> T {
        T::TAU() * T::from_usize_lossy(self.dealias_cutoff()) / self.length
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn Fft<T>> {
        &self.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn Fft<T>> {
        &self.inverse
    }

    pub(crate) fn fine_inverse_plan(&self) -> &Arc<dyn Fft<T>> {
        &self.fine_inverse
    }
}

fn mode_of(slot: usize, n: usize) -> isize {
    if slot <= n / 2 {
        slot as isize
    } else {
        slot as isize - n as isize
    }
}

impl<T: Scalar> fmt::Debug for SpectralGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl<T: Scalar> PartialEq for SpectralGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(SpectralGrid::<f64>::new(6, 1.0).is_err());
        assert!(SpectralGrid::<f64>::new(9, 1.0).is_err());
        assert!(SpectralGrid::<f64>::new(16, 0.0).is_err());
        assert!(SpectralGrid::<f64>::new(16, -2.0).is_err());
        assert!(SpectralGrid::<f64>::new(16, f64::NAN).is_err());
    }

    #[test]
    fn wavenumber_table_is_symmetric() {
        let g = SpectralGrid::<f64>::new(16, 4.0).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        for m in 1..8isize {
            assert_eq!(k[g.slot(m)], -k[g.slot(-m)]);
            assert!((k[g.slot(m)] - std::f64::consts::TAU * m as f64 / 4.0).abs() < 1e-14);
        }
        assert_eq!(g.mode(8), 8);
        assert_eq!(g.mode(9), -7);
    }

    #[test]
    fn default_torus_has_integer_wavenumbers() {
        let g = SpectralGrid::<f64>::periodic(32).unwrap();
        for (i, &k) in g.wavenumbers().iter().enumerate() {
            assert!((k - g.mode(i) as f64).abs() < 1e-12);
        }
        assert_eq!(g.dealias_cutoff(), 10);
    }
}
