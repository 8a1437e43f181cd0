use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex;

use super::grid::SpectralGrid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real grid function attached to a [`SpectralGrid`].
#[derive(Debug, Clone)]
pub struct RealField<T: Scalar> {
    grid: Arc<SpectralGrid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> PartialEq for RealField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_as(&other.grid) && self.values == other.values
    }
}

impl<T: Scalar> RealField<T> {
    /// Wraps `values`, rejecting wrong lengths and non-finite entries.
    pub fn new(grid: Arc<SpectralGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    /// Internal constructor for values produced by finite arithmetic.
    pub(crate) fn from_raw(grid: Arc<SpectralGrid<T>>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<SpectralGrid<T>>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<SpectralGrid<T>>, c: T) -> Self {
        let n = grid.n_points();
        Self::from_raw(grid, vec![c; n])
    }

    pub fn zeros(grid: Arc<SpectralGrid<T>>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn mean(&self) -> T {
        let sum = self.values.iter().fold(T::zero(), |a, &v| a + v);
        sum / T::from_usize_lossy(self.values.len())
    }

    /// Integral over one period; exact for trigonometric polynomials below
    /// the grid's Nyquist mode.
    pub fn integral(&self) -> T {
        self.mean() * self.grid.length()
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }

    pub fn l2_norm(&self) -> T {
        let sq = self.values.iter().fold(T::zero(), |a, &v| a + v * v);
        (sq / T::from_usize_lossy(self.len()) * self.grid.length()).sqrt()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination. Panics if the fields live on different grids;
    /// public entry points check with [`RealField::ensure_same_grid`] first.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert!(
            self.grid.same_as(&other.grid),
            "pointwise operation on fields from different grids"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_raw(self.grid.clone(), values)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn shift(&self, c: T) -> Self {
        self.map(|v| v + c)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: T, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + c * b)
    }

    /// Periodic rotation by `k` grid cells: `out[j] = self[j + k]`.
    pub fn rotate(&self, k: usize) -> Self {
        let mut values = self.values.clone();
        values.rotate_left(k % self.len());
        Self::from_raw(self.grid.clone(), values)
    }
}

fn check_finite<T: Scalar>(values: &[T]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::InvalidField {
            index,
            value: values[index].to_f64_lossy(),
        }),
        None => Ok(()),
    }
}

impl<T: Scalar> Add for &RealField<T> {
    type Output = RealField<T>;
    fn add(self, rhs: Self) -> RealField<T> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &RealField<T> {
    type Output = RealField<T>;
    fn sub(self, rhs: Self) -> RealField<T> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul for &RealField<T> {
    type Output = RealField<T>;
    fn mul(self, rhs: Self) -> RealField<T> {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl<T: Scalar> Neg for &RealField<T> {
    type Output = RealField<T>;
    fn neg(self) -> RealField<T> {
        self.map(|v| -v)
    }
}

/// Fourier coefficients of a real field, in FFT slot order.
///
/// Normalized so that mode 0 is the mean of the field.
#[derive(Debug, Clone)]
pub struct SpectralField<T: Scalar> {
    grid: Arc<SpectralGrid<T>>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralField<T> {
    pub fn new(grid: Arc<SpectralGrid<T>>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_raw(grid: Arc<SpectralGrid<T>>, coeffs: Vec<Complex<T>>) -> Self {
        Self { grid, coeffs }
    }

    pub fn zeros(grid: Arc<SpectralGrid<T>>) -> Self {
        let n = grid.n_points();
        Self::from_raw(grid, vec![Complex::new(T::zero(), T::zero()); n])
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Coefficient of signed mode `m`.
    pub fn mode(&self, m: isize) -> Complex<T> {
        self.coeffs[self.grid.slot(m)]
    }

    pub fn set_mode(&mut self, m: isize, c: Complex<T>) {
        let slot = self.grid.slot(m);
        self.coeffs[slot] = c;
    }

    /// Largest deviation from Hermitian symmetry, with the offending slot.
    pub fn symmetry_defect(&self) -> (usize, T) {
        let n = self.coeffs.len();
        let mut worst = (0, T::zero());
        for i in 0..=n / 2 {
            let j = (n - i) % n;
            let d = (self.coeffs[i] - self.coeffs[j].conj()).norm();
            if d > worst.1 {
                worst = (i, d);
            }
        }
        worst
    }

    /// Sum of `|c_m|^2` over all modes (mean square of the field).
    pub fn energy(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |a, c| a + c.norm_sqr())
    }

    /// Mode-wise multiplication by a real symbol `s(k)`.
    pub fn apply_symbol(&self, symbol: impl Fn(usize, T) -> Complex<T>) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.grid.wavenumbers())
            .enumerate()
            .map(|(slot, (&c, &k))| c * symbol(slot, k))
            .collect();
        Self::from_raw(self.grid.clone(), coeffs)
    }

    /// Fraction of the total spectral energy (mean included) held by the top
    /// third of the retained band, `2K/3 < |m| <= K` with `K = n/3`.
    pub fn tail_fraction(&self) -> T {
        let cutoff = self.grid.dealias_cutoff() as isize;
        let tail_start = 2 * cutoff / 3;
        let mut tail = T::zero();
        for (slot, c) in self.coeffs.iter().enumerate() {
            let m = self.grid.mode(slot).abs();
            if m > tail_start && m <= cutoff {
                tail = tail + c.norm_sqr();
            }
        }
        let total = self.energy();
        if total > T::zero() {
            tail / total
        } else {
            T::zero()
        }
    }

    /// Largest `|c_m|` over modes with `|m| >= m_min`.
    pub fn max_coefficient_above(&self, m_min: usize) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(slot, _)| self.grid.mode(*slot).unsigned_abs() >= m_min)
            .fold(T::zero(), |a, (_, c)| a.max(c.norm()))
    }
}

impl<T: Scalar> Add for &SpectralField<T> {
    type Output = SpectralField<T>;
    fn add(self, rhs: Self) -> SpectralField<T> {
        assert!(self.grid.same_as(&rhs.grid));
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| a + b)
            .collect();
        SpectralField::from_raw(self.grid.clone(), coeffs)
    }
}
