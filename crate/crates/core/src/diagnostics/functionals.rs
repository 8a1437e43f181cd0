//! Quadrature of the modulus functionals
//!
//! ```text
//! D(ξ) = c_a [ ∫_0^{ξ/2} (2ω(ξ) - ω(ξ+2η) - ω(ξ-2η)) η^{-1-a} dη
//!            + ∫_{ξ/2}^∞ (2ω(ξ) - ω(ξ+2η) + ω(2η-ξ)) η^{-1-a} dη ]
//! A(ξ) = -c_a ∫_R (ω(ξ) - ω(|ξ-η|)) |η|^{-1-a} dη
//! Ω(ξ) = ∫_0^ξ ω(η) η^{-a} dη + ξ ∫_ξ^∞ ω(η) η^{-1-a} dη
//! ```
//!
//! and the breakthrough functional `ω'(ξ) Ω(ξ) + ω(ξ) A(ξ) - m D(ξ)`.
//!
//! Semi-infinite integrals are computed numerically up to
//! `S = 10^6 max(ξ, δ)`; beyond `S` every argument of `ω` lies on the
//! logarithmic branch and the remainder is integrated in closed form.
//! Second differences of `ω` are assembled from [`ModulusOfContinuity::diff`]
//! so that the integrands keep relative accuracy as `η -> 0`.

use crate::error::{Error, Result};
use crate::quadrature::{Grading, PanelQuadrature};
use crate::scalar::kernel_constant;

use super::moc::ModulusOfContinuity;

/// Truncation point of the semi-infinite integrals, relative to `max(ξ, δ)`.
pub const TRUNCATION_FACTOR: f64 = 1e6;

/// Panel layout shared by the functionals.
#[derive(Debug, Clone)]
pub struct FunctionalQuadrature {
    quad: PanelQuadrature,
}

impl Default for FunctionalQuadrature {
    fn default() -> Self {
        Self::with_order(20)
    }
}

impl FunctionalQuadrature {
    pub fn with_order(order: usize) -> Self {
        let grading = Grading {
            ratio: 0.25,
            min_relative_width: 1e-20,
        };
        Self {
            quad: PanelQuadrature::new(order).with_grading(grading),
        }
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, special: &[f64]) -> f64 {
        self.quad.integrate(f, a, b, special)
    }

    /// Dissipation lower bound `D(ξ)`.
    pub fn dissipation(&self, xi: f64, m: &ModulusOfContinuity) -> Result<f64> {
        check_xi(xi)?;
        let a = m.alpha();
        let d = m.delta();
        let s = truncation(xi, m);
        let w = m.value(xi);
        let p = 1.0 + a;
        let near = self.integrate(
            |eta| -(m.diff(xi + 2.0 * eta, xi) + m.diff(xi - 2.0 * eta, xi)) / eta.powf(p),
            0.0,
            0.5 * xi,
            &[0.5 * (d - xi), 0.5 * (xi - d)],
        );
        let far = self.integrate(
            |eta| (2.0 * w + m.diff(2.0 * eta - xi, 2.0 * eta + xi)) / eta.powf(p),
            0.5 * xi,
            s,
            &[0.5 * (xi + d), 0.5 * (d - xi)],
        );
        // ln((1+x)/(1-x)) = 2 Σ_{j odd} x^j / j with x = ξ / (2η)
        let mut odd = 0.0;
        for j in [1, 3, 5, 7] {
            let jf = f64::from(j);
            odd += (0.5 * xi).powi(j) * s.powf(-jf - a) / (jf * (jf + a));
        }
        let tail = 2.0 * w * s.powf(-a) / a - 2.0 * m.gamma() * odd;
        let value = kernel_constant(a) * (near + far + tail);
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Accuracy {
                what: "dissipation bound",
                change: value,
            });
        }
        Ok(value)
    }

    /// The four pieces of `-A(ξ) / c_a`: `(-∞,-ξ)`, `(-ξ,ξ)`, `(ξ,2ξ)`, `(2ξ,∞)`.
    pub fn lower_bound_pieces(&self, xi: f64, m: &ModulusOfContinuity) -> Result<APieces> {
        check_xi(xi)?;
        let a = m.alpha();
        let d = m.delta();
        let s = truncation(xi, m);
        let p = 1.0 + a;
        let far_tail = |shift: f64| (m.value(xi) - m.omega_delta()) * s.powf(-a) / a
            - m.gamma() * log_tail(s, shift, d, a);
        let a1 = self.integrate(|r| -m.diff(xi + r, xi) / r.powf(p), xi, s, &[d - xi])
            + far_tail(xi);
        let a2 = self.integrate(
            |eta| -(m.diff(xi - eta, xi) + m.diff(xi + eta, xi)) / eta.powf(p),
            0.0,
            xi,
            &[xi - d, d - xi],
        );
        let a3 = self.integrate(|eta| -m.diff(eta - xi, xi) / eta.powf(p), xi, 2.0 * xi, &[xi + d]);
        let a4 = self.integrate(|eta| -m.diff(eta - xi, xi) / eta.powf(p), 2.0 * xi, s, &[xi + d])
            + far_tail(-xi);
        let c = kernel_constant(a);
        let pieces = APieces {
            a1: c * a1,
            a2: c * a2,
            a3: c * a3,
            a4: c * a4,
        };
        if !pieces.total().is_finite() {
            return Err(Error::Accuracy {
                what: "lower bound of the fractional Laplacian",
                change: pieces.total(),
            });
        }
        Ok(pieces)
    }

    /// `A(ξ)`.
    pub fn lower_bound(&self, xi: f64, m: &ModulusOfContinuity) -> Result<f64> {
        Ok(self.lower_bound_pieces(xi, m)?.a())
    }

    /// Velocity modulus `Ω(ξ)` with unit constant.
    pub fn velocity_modulus(&self, xi: f64, m: &ModulusOfContinuity) -> Result<f64> {
        check_xi(xi)?;
        let a = m.alpha();
        let d = m.delta();
        let s = truncation(xi, m);
        let inner = self.integrate(|eta| m.value(eta) / eta.powf(a), 0.0, xi, &[d]);
        let outer = self.integrate(|eta| m.value(eta) / eta.powf(1.0 + a), xi, s, &[d])
            + m.gamma() * log_tail(s, 0.0, d, a)
            + m.omega_delta() * s.powf(-a) / a;
        let value = inner + xi * outer;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Accuracy {
                what: "velocity modulus",
                change: value,
            });
        }
        Ok(value)
    }

    /// The three terms of the breakthrough functional.
    pub fn breakthrough(
        &self,
        xi: f64,
        m: &ModulusOfContinuity,
        rho_min: f64,
    ) -> Result<BreakthroughTerms> {
        if !(rho_min > 0.0) {
            return Err(Error::Parameter(format!(
                "density minimum must be positive, got {rho_min}"
            )));
        }
        let omega = self.velocity_modulus(xi, m)?;
        let a = self.lower_bound(xi, m)?;
        let d = self.dissipation(xi, m)?;
        Ok(BreakthroughTerms {
            transport: m.omega_prime_upper(xi) * omega,
            stretching: m.value(xi) * a,
            dissipation: rho_min * d,
        })
    }
}

/// Pieces of `-A(ξ)` including `c_a`; `A = -(a1 + a2 + a3 + a4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct APieces {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl APieces {
    fn total(&self) -> f64 {
        self.a1 + self.a2 + self.a3 + self.a4
    }

    pub fn a(&self) -> f64 {
        -self.total()
    }
}

/// `ω'(ξ) Ω(ξ)`, `ω(ξ) A(ξ)` and `m D(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakthroughTerms {
    pub transport: f64,
    pub stretching: f64,
    pub dissipation: f64,
}

impl BreakthroughTerms {
    pub fn value(&self) -> f64 {
        self.transport + self.stretching - self.dissipation
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "separation must be positive, got {xi}"
        )))
    }
}

fn truncation(xi: f64, m: &ModulusOfContinuity) -> f64 {
    TRUNCATION_FACTOR * xi.max(m.delta())
}

/// `∫_S^∞ ln((s + c)/δ) s^{-1-a} ds` for `|c| << S`.
fn log_tail(s: f64, c: f64, delta: f64, a: f64) -> f64 {
    let mut v = s.powf(-a) * ((s / delta).ln() / a + 1.0 / (a * a));
    let mut sign = 1.0;
    for j in 1..=4 {
        let jf = f64::from(j);
        v += sign * c.powi(j) / jf * s.powf(-jf - a) / (jf + a);
        sign = -sign;
    }
    v
}

pub fn dissipation_d(xi: f64, m: &ModulusOfContinuity) -> Result<f64> {
    FunctionalQuadrature::default().dissipation(xi, m)
}

pub fn lower_bound_a(xi: f64, m: &ModulusOfContinuity) -> Result<f64> {
    FunctionalQuadrature::default().lower_bound(xi, m)
}

pub fn velocity_modulus_omega(xi: f64, m: &ModulusOfContinuity) -> Result<f64> {
    FunctionalQuadrature::default().velocity_modulus(xi, m)
}

/// `ω'(ξ) Ω(ξ) + ω(ξ) A(ξ) - m D(ξ)`, taking the larger one-sided
/// derivative of `ω` at `ξ = δ`.
pub fn breakthrough_functional(xi: f64, m: &ModulusOfContinuity, rho_min: f64) -> Result<f64> {
    Ok(FunctionalQuadrature::default()
        .breakthrough(xi, m, rho_min)?
        .value())
}

/// Search for `(δ, γ)` making the breakthrough functional negative on a
/// log-uniform sample of separations.
#[derive(Debug, Clone)]
pub struct FeasibilitySearch {
    pub alpha: f64,
    pub rho_min: f64,
    /// Number of log-uniform samples of `ξ / δ`.
    pub xi_samples: usize,
    /// Range of `ξ / δ`.
    pub xi_range: (f64, f64),
    /// Fractions of the admissible `γ` tried at each `δ`, largest first.
    pub gamma_fractions: Vec<f64>,
    /// The constant `c` in `γ < c δ`.
    pub gamma_cap: f64,
    /// Log-spaced `δ` scan from the largest admissible value down to `delta_floor`.
    pub delta_points: usize,
    pub delta_floor: f64,
    /// Log-bisection steps refining the boundary of the feasible region.
    pub bisection_steps: usize,
}

/// A feasible parameter pair with the largest sampled functional value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasiblePoint {
    pub delta: f64,
    pub gamma: f64,
    pub worst: f64,
}

impl FeasibilitySearch {
    pub fn new(alpha: f64, rho_min: f64) -> Self {
        Self {
            alpha,
            rho_min,
            xi_samples: 200,
            xi_range: (1e-4, 1e3),
            gamma_fractions: vec![1.0, 0.5, 0.25, 0.1, 0.05, 0.02, 0.01],
            gamma_cap: 0.5,
            delta_points: 40,
            delta_floor: 1e-8,
            bisection_steps: 12,
        }
    }

    /// Sampled separations for a given `δ`.
    pub fn xi_grid(&self, delta: f64) -> Vec<f64> {
        let (lo, hi) = self.xi_range;
        let n = self.xi_samples.max(2);
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                delta * lo * (hi / lo).powf(t)
            })
            .collect()
    }

    /// Largest functional value over the sample, stopping at the first
    /// nonnegative value. Samples are visited coarse-to-fine so that a
    /// violation is usually met early.
    pub fn worst_value(&self, m: &ModulusOfContinuity, quad: &FunctionalQuadrature) -> Result<f64> {
        let grid = self.xi_grid(m.delta());
        let mut worst = f64::NEG_INFINITY;
        for i in coarse_to_fine(grid.len()) {
            let v = quad.breakthrough(grid[i], m, self.rho_min)?.value();
            worst = worst.max(v);
            if v >= 0.0 {
                break;
            }
        }
        Ok(worst)
    }

    /// First admissible `γ` (largest fraction first) that is feasible at `δ`.
    pub fn feasible_at(&self, delta: f64, quad: &FunctionalQuadrature) -> Result<Option<FeasiblePoint>> {
        let gmax = ModulusOfContinuity::gamma_max(delta, self.alpha, self.gamma_cap);
        if !(gmax > 0.0) {
            return Ok(None);
        }
        for &f in &self.gamma_fractions {
            let Ok(m) = ModulusOfContinuity::new(delta, f * gmax, self.alpha) else {
                continue;
            };
            let worst = self.worst_value(&m, quad)?;
            if worst < 0.0 {
                return Ok(Some(FeasiblePoint {
                    delta,
                    gamma: m.gamma(),
                    worst,
                }));
            }
        }
        Ok(None)
    }

    /// Largest admissible `δ` on the scan (refined by bisection) admitting a
    /// feasible `γ`.
    pub fn search(&self) -> Result<Option<FeasiblePoint>> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        let quad = FunctionalQuadrature::default();
        let b = 0.5 * self.alpha;
        // ω increasing on [0, δ] needs δ^(a/2) < 1 / (1 + a/2)
        let top = (1.0 / (1.0 + b)).powf(1.0 / b).min(1.0) * 0.999;
        let n = self.delta_points.max(2);
        let ratio = (self.delta_floor / top).powf(1.0 / (n - 1) as f64);
        let mut above: Option<f64> = None;
        for i in 0..n {
            let delta = top * ratio.powi(i as i32);
            if let Some(found) = self.feasible_at(delta, &quad)? {
                let Some(mut hi) = above else {
                    return Ok(Some(found));
                };
                let mut best = found;
                let mut lo = delta;
                for _ in 0..self.bisection_steps {
                    let mid = (lo * hi).sqrt();
                    match self.feasible_at(mid, &quad)? {
                        Some(p) => {
                            best = p;
                            lo = mid;
                        }
                        None => hi = mid,
                    }
                }
                return Ok(Some(best));
            }
            above = Some(delta);
        }
        Ok(None)
    }
}

/// Indices `0..n`, first on stride 64, then on successively halved strides.
fn coarse_to_fine(n: usize) -> impl Iterator<Item = usize> {
    let strides = [64usize, 32, 16, 8, 4, 2, 1];
    strides.into_iter().enumerate().flat_map(move |(level, stride)| {
        (0..n)
            .step_by(stride)
            .filter(move |&i| level == 0 || i % (2 * stride) != 0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ModulusOfContinuity {
        ModulusOfContinuity::new(0.05, 0.005, 0.5).unwrap()
    }

    #[test]
    fn log_tail_matches_quadrature() {
        let (s, c, d, a) = (1e3, 2.0, 0.1, 0.4);
        let q = PanelQuadrature::new(30);
        let big = 1e12;
        let direct: f64 = q.integrate(|x: f64| ((x + c) / d).ln() / x.powf(1.0 + a), s, big, &[]);
        let rest = log_tail(big, c, d, a);
        let v = log_tail(s, c, d, a);
        assert!((direct + rest - v).abs() < 1e-10 * v, "{direct} {rest} {v}");
    }

    #[test]
    fn functionals_positive_and_increasing_modulus() {
        let m = sample();
        let q = FunctionalQuadrature::default();
        let mut prev = 0.0;
        for i in 0..30 {
            let xi = 1e-4 * 1.6f64.powi(i);
            assert!(q.dissipation(xi, &m).unwrap() > 0.0);
            let o = q.velocity_modulus(xi, &m).unwrap();
            assert!(o > prev);
            prev = o;
            let p = q.lower_bound_pieces(xi, &m).unwrap();
            assert!(p.a2 >= 0.0 && p.a3 >= 0.0, "{p:?}");
        }
    }

    #[test]
    fn degenerate_functional_is_pure_dissipation() {
        let m = sample();
        let q = FunctionalQuadrature::default();
        let t = q.breakthrough(0.01, &m, 0.7).unwrap();
        let degenerate = BreakthroughTerms {
            transport: 0.0,
            stretching: 0.0,
            ..t
        };
        assert!((degenerate.value() + 0.7 * q.dissipation(0.01, &m).unwrap()).abs() < 1e-15);
        assert!(degenerate.value() < 0.0);
    }

    #[test]
    fn coarse_to_fine_visits_each_index_once() {
        let mut seen: Vec<usize> = coarse_to_fine(200).collect();
        assert_eq!(&seen[..4], &[0, 64, 128, 192]);
        seen.sort_unstable();
        assert_eq!(seen, (0..200).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = sample();
        assert!(dissipation_d(0.0, &m).is_err());
        assert!(breakthrough_functional(0.1, &m, 0.0).is_err());
    }
}
