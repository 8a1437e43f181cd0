//! Off-grid evaluation of trigonometric interpolants and localization of
//! extrema: zero-padded refinement followed by golden-section search.

use num_complex::Complex;

use super::field::{RealField, SpectralField};
use super::grid::INTERPOLATION_FACTOR;
use crate::error::Result;
use crate::scalar::Scalar;

/// Location and value of an extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum<T> {
    pub position: T,
    pub value: T,
}

/// Trigonometric interpolant of a grid field.
#[derive(Debug, Clone)]
pub struct Interpolant<T: Scalar> {
    spectrum: SpectralField<T>,
}

impl<T: Scalar> Interpolant<T> {
    pub fn new(field: &RealField<T>) -> Result<Self> {
        Ok(Self {
            spectrum: field.forward()?,
        })
    }

    pub fn from_spectrum(spectrum: SpectralField<T>) -> Self {
        Self { spectrum }
    }

    pub fn spectrum(&self) -> &SpectralField<T> {
        &self.spectrum
    }

    pub fn derivative(&self) -> Self {
        Self::from_spectrum(self.spectrum.derivative())
    }

    /// Value of the interpolant at an arbitrary point.
    ///
    /// The Nyquist mode contributes `Re(c) cos(k x)`, the real trigonometric
    /// polynomial agreeing with the grid data.
    pub fn eval(&self, x: T) -> T {
        let grid = self.spectrum.grid();
        let n = grid.n_points();
        let c = self.spectrum.coeffs();
        let k1 = T::TAU() / grid.length();
        let step = Complex::new((k1 * x).cos(), (k1 * x).sin());
        let mut phase = step;
        let mut acc = c[0].re;
        let two = T::lit(2.0);
        for (m, coeff) in c.iter().enumerate().take(n / 2).skip(1) {
            acc = acc + two * (coeff * phase).re;
            // resynchronize periodically to bound drift of the recurrence
            if m % 64 == 63 {
                let a = k1 * T::from_usize_lossy(m + 1) * x;
                phase = Complex::new(a.cos(), a.sin());
            } else {
                phase = phase * step;
            }
        }
        let a = k1 * T::from_usize_lossy(n / 2) * x;
        acc + c[n / 2].re * a.cos()
    }

    /// Values on the `factor`-times refined uniform grid.
    pub fn refined_values(&self, factor: usize) -> Vec<T> {
        let grid = self.spectrum.grid();
        let n = grid.n_points();
        let big = n * factor;
        let zero = Complex::new(T::zero(), T::zero());
        let mut buf = vec![zero; big];
        let c = self.spectrum.coeffs();
        buf[0] = c[0];
        for m in 1..n / 2 {
            buf[m] = c[m];
            buf[big - m] = c[n - m];
        }
        if factor > 1 {
            // split Nyquist symmetrically to keep the interpolant real
            let half = T::lit(0.5);
            buf[n / 2] = Complex::new(c[n / 2].re * half, T::zero());
            buf[big - n / 2] = buf[n / 2];
        } else {
            buf[n / 2] = c[n / 2];
        }
        if factor == INTERPOLATION_FACTOR {
            grid.fine_inverse_plan().process(&mut buf);
        } else {
            let mut planner = rustfft::FftPlanner::new();
            planner.plan_fft_inverse(big).process(&mut buf);
        }
        buf.into_iter().map(|z| z.re).collect()
    }

    pub fn max(&self) -> Extremum<T> {
        let fine = self.refined_values(INTERPOLATION_FACTOR);
        let h = self.spectrum.grid().length() / T::from_usize_lossy(fine.len());
        refine_extremum(|x| self.eval(x), &fine, h, true)
    }

    pub fn min(&self) -> Extremum<T> {
        let fine = self.refined_values(INTERPOLATION_FACTOR);
        let h = self.spectrum.grid().length() / T::from_usize_lossy(fine.len());
        refine_extremum(|x| self.eval(x), &fine, h, false)
    }

    /// `sup |f|` over the continuum.
    pub fn max_abs(&self) -> T {
        let hi = self.max().value;
        let lo = self.min().value;
        hi.abs().max(lo.abs())
    }
}

/// Starting from the best sample of `samples` (spacing `h`), refine the
/// extremum of `f` by golden-section search over the neighbouring cells.
pub fn refine_extremum<T: Scalar>(
    f: impl Fn(T) -> T,
    samples: &[T],
    h: T,
    maximize: bool,
) -> Extremum<T> {
    let sign = if maximize { T::one() } else { -T::one() };
    let (best, best_val) = samples
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(bi, bv), (i, &v)| {
            if sign * v > bv {
                (i, sign * v)
            } else {
                (bi, bv)
            }
        });
    let center = T::from_usize_lossy(best) * h;
    let g = |x: T| sign * f(x);
    let mut a = center - h;
    let mut b = center + h;
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    let tol = h * T::lit(1e-10);
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let (x, v) = if gc > gd { (c, gc) } else { (d, gd) };
    // never report worse than the sampled value
    if v >= best_val {
        Extremum {
            position: x,
            value: sign * v,
        }
    } else {
        Extremum {
            position: center,
            value: sign * best_val,
        }
    }
}
