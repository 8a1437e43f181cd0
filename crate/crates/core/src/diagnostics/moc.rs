//! The modulus of continuity
//!
//! ```text
//! ω(ξ) = ξ - ξ^(1+a/2)                     0 <= ξ < δ
//! ω(ξ) = γ ln(ξ/δ) + δ - δ^(1+a/2)         ξ >= δ
//! ```
//!
//! and the pairwise check of a field against its rescaled version
//! `ω(ξ / λ)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{Interpolant, RealField, INTERPOLATION_FACTOR};

/// Parameters `(δ, γ, a)` of the modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusOfContinuity {
    delta: f64,
    gamma: f64,
    alpha: f64,
}

impl ModulusOfContinuity {
    /// Validates `0 < δ < 1`, `0 < a < 1`, `γ > 0`, monotonicity on `[0, δ]`,
    /// `γ <= ω(δ) / (2 ln 2)` and concavity across `δ`:
    /// `γ/δ <= 1 - (1 + a/2) δ^(a/2)`.
    pub fn new(delta: f64, gamma: f64, alpha: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if !(alpha > 0.0 && alpha < 1.0) {
            bad.push(format!("alpha must lie in (0, 1), got {alpha}"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            bad.push(format!("delta must lie in (0, 1), got {delta}"));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            bad.push(format!("gamma must be positive, got {gamma}"));
        }
        if bad.is_empty() {
            let m = Self {
                delta,
                gamma,
                alpha,
            };
            let slope = m.slope_below_delta();
            if !(slope > 0.0) {
                bad.push(format!("omega is not increasing below delta = {delta}"));
            }
            let log_cap = m.omega_delta() / (2.0 * std::f64::consts::LN_2);
            if gamma > log_cap {
                bad.push(format!(
                    "gamma = {gamma} exceeds (delta - delta^(1+alpha/2)) / (2 ln 2) = {log_cap}"
                ));
            }
            if gamma > delta * slope {
                bad.push(format!(
                    "gamma / delta = {} exceeds the left slope {slope}; omega would not be concave",
                    gamma / delta
                ));
            }
            if bad.is_empty() {
                return Ok(m);
            }
        }
        Err(Error::Parameter(bad.join("; ")))
    }

    /// Largest `γ` admissible for `δ`, additionally capped by `c δ`.
    pub fn gamma_max(delta: f64, alpha: f64, c: f64) -> f64 {
        let b = alpha / 2.0;
        let omega_delta = delta - delta.powf(1.0 + b);
        let concave = delta * (1.0 - (1.0 + b) * delta.powf(b));
        (omega_delta / (2.0 * std::f64::consts::LN_2))
            .min(c * delta)
            .min(concave)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn b(&self) -> f64 {
        0.5 * self.alpha
    }

    /// `ω(δ) = δ - δ^(1+a/2)`.
    pub fn omega_delta(&self) -> f64 {
        self.delta - self.delta.powf(1.0 + self.b())
    }

    /// `ω'(δ-)`.
    pub fn slope_below_delta(&self) -> f64 {
        1.0 - (1.0 + self.b()) * self.delta.powf(self.b())
    }

    pub fn omega(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) {
            return Err(Error::Parameter(format!(
                "modulus argument must be nonnegative, got {xi}"
            )));
        }
        Ok(self.value(xi))
    }

    /// One-sided derivative: the left branch below `δ`, `γ/ξ` from `δ` on.
    pub fn omega_prime(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) {
            return Err(Error::Parameter(format!(
                "modulus argument must be nonnegative, got {xi}"
            )));
        }
        Ok(self.slope(xi))
    }

    /// `max(ω'(ξ-), ω'(ξ+))`, the larger one-sided derivative.
    pub fn omega_prime_upper(&self, xi: f64) -> f64 {
        if xi == self.delta {
            self.slope_below_delta().max(self.gamma / self.delta)
        } else {
            self.slope(xi)
        }
    }

    pub(crate) fn value(&self, xi: f64) -> f64 {
        if xi < self.delta {
            xi - xi.powf(1.0 + self.b())
        } else {
            self.gamma * (xi / self.delta).ln() + self.omega_delta()
        }
    }

    fn slope(&self, xi: f64) -> f64 {
        if xi < self.delta {
            1.0 - (1.0 + self.b()) * xi.powf(self.b())
        } else {
            self.gamma / xi
        }
    }

    /// `ω(s) - ω(r)` with relative accuracy in `s - r`, also for `s ≈ r`.
    pub(crate) fn diff(&self, s: f64, r: f64) -> f64 {
        let d = self.delta;
        if (s < d && r > d) || (s > d && r < d) {
            return self.diff(s, d) + self.diff(d, r);
        }
        if s == r {
            return 0.0;
        }
        if s.min(r) >= d {
            return self.gamma * ((s - r) / r).ln_1p();
        }
        let c = 1.0 + self.b();
        if r == 0.0 {
            return s - s.powf(c);
        }
        // s^c - r^c = r^c ((1 + (s-r)/r)^c - 1)
        let pow_diff = r.powf(c) * (c * ((s - r) / r).ln_1p()).exp_m1();
        (s - r) - pow_diff
    }
}

/// Outcome of a pairwise modulus check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MocVerdict<T> {
    pub obeys: bool,
    /// Pair `(x, y)` with `f(x) >= f(y)` of smallest margin.
    pub worst_x: T,
    pub worst_y: T,
    /// `ω(d(x, y) / λ) - (f(x) - f(y))`.
    pub margin: T,
}

/// Checks `f(x) - f(y) < ω(d(x, y) / λ)` over all pairs of the
/// interpolated grid, with `d` the periodic distance.
pub fn moc_check<T: Scalar>(
    field: &RealField<T>,
    m: &ModulusOfContinuity,
    lambda: f64,
) -> Result<MocVerdict<T>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!(
            "scaling parameter must be positive, got {lambda}"
        )));
    }
    let it = Interpolant::new(field)?;
    let values: Vec<f64> = it
        .refined_values(INTERPOLATION_FACTOR)
        .into_iter()
        .map(|v| v.to_f64_lossy())
        .collect();
    let n = values.len();
    let h = field.grid().length().to_f64_lossy() / n as f64;
    // for each shift s the periodic distance is min(s, n - s) cells
    let mut worst = (f64::INFINITY, 0usize, 0usize);
    for s in 1..n {
        let cells = s.min(n - s);
        let bound = m.value(cells as f64 * h / lambda);
        for i in 0..n {
            let j = (i + s) % n;
            let diff = values[i] - values[j];
            let margin = bound - diff;
            if margin < worst.0 {
                worst = (margin, i, j);
            }
        }
    }
    Ok(MocVerdict {
        obeys: worst.0 > 0.0,
        worst_x: T::lit(worst.1 as f64 * h),
        worst_y: T::lit(worst.2 as f64 * h),
        margin: T::lit(worst.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;

    fn sample() -> ModulusOfContinuity {
        ModulusOfContinuity::new(0.1, 0.01, 0.5).unwrap()
    }

    #[test]
    fn continuity_at_delta() {
        let m = sample();
        assert_eq!(m.omega(0.0).unwrap(), 0.0);
        let below = 0.1 - 0.1f64.powf(1.25);
        assert_eq!(m.omega(0.1).unwrap(), below);
        let left = m.omega(0.1 * (1.0 - 1e-15)).unwrap();
        assert!((left - below).abs() < 1e-15);
        assert!(m.omega(-1.0).is_err());
    }

    #[test]
    fn admissibility() {
        assert!(ModulusOfContinuity::new(0.1, 0.5, 0.5).is_err());
        assert!(ModulusOfContinuity::new(1.5, 0.01, 0.5).is_err());
        assert!(ModulusOfContinuity::new(0.1, 0.01, 1.5).is_err());
        let g = ModulusOfContinuity::gamma_max(0.1, 0.5, 1.0);
        assert!(ModulusOfContinuity::new(0.1, g, 0.5).is_ok());
        assert!(ModulusOfContinuity::new(0.1, g * 1.001, 0.5).is_err());
    }

    #[test]
    fn stable_difference_matches_direct_evaluation() {
        let m = sample();
        for &(s, r) in &[(0.05, 0.02), (0.3, 0.05), (0.2, 0.7), (0.099, 0.101), (0.0, 0.04)] {
            let direct = m.value(s) - m.value(r);
            assert!((m.diff(s, r) - direct).abs() < 1e-15, "{s} {r}");
        }
        // tiny separations keep relative accuracy
        let r = 0.03;
        let h = (r + 1e-12) - r;
        let slope = m.slope(r);
        assert!((m.diff(r + h, r) / h - slope).abs() < 1e-9);
    }

    #[test]
    fn constant_field_obeys_and_jump_violates() {
        let g = SpectralGrid::<f64>::periodic(32).unwrap();
        let m = sample();
        let c = RealField::constant(g.clone(), 1.0);
        let v = moc_check(&c, &m, 1.0).unwrap();
        assert!(v.obeys && v.margin > 0.0);
        let steep = RealField::from_fn(g, |x| 5.0 * x.sin()).unwrap();
        let v = moc_check(&steep, &m, 1.0).unwrap();
        assert!(!v.obeys);
        assert!(v.margin < 0.0);
    }
}
