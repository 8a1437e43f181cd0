//! Composite Gauss–Legendre quadrature on geometrically graded panels.
//!
//! Integrands handled here have integrable endpoint singularities of the
//! form `|x - p|^s` (s > -1) or kinks at known interior points. Grading the
//! panels geometrically toward those points restores spectral convergence on
//! every panel.

use crate::scalar::Scalar;

/// Gauss–Legendre rule of fixed order on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Newton on P_n from the Chebyshev-like initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[order - 1 - i] = x;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped<T: Scalar>(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * T::lit(x), half * T::lit(w)))
    }

    pub fn integrate<T: Scalar>(&self, f: impl Fn(T) -> T, a: T, b: T) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + w * f(x))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Panel layout for one integral: the interval is cut at every listed point
/// and each piece is graded geometrically toward both of its ends.
#[derive(Debug, Clone, Copy)]
pub struct Grading {
    /// Ratio between consecutive panel widths (0 < ratio < 1).
    pub ratio: f64,
    /// Smallest panel width relative to the piece length.
    pub min_relative_width: f64,
}

impl Default for Grading {
    fn default() -> Self {
        Self {
            ratio: 0.25,
            min_relative_width: 1e-40,
        }
    }
}

/// Panel quadrature: a Gauss–Legendre rule applied on graded panels.
#[derive(Debug, Clone)]
pub struct PanelQuadrature {
    rule: GaussLegendre,
    grading: Grading,
}

impl PanelQuadrature {
    pub fn new(order: usize) -> Self {
        Self {
            rule: GaussLegendre::new(order),
            grading: Grading::default(),
        }
    }

    pub fn with_grading(mut self, grading: Grading) -> Self {
        self.grading = grading;
        self
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    /// Panel breakpoints covering `[a, b]`, refined toward `a`, `b` and every
    /// point of `special` strictly inside.
    pub fn breakpoints<T: Scalar>(&self, a: T, b: T, special: &[T]) -> Vec<T> {
        let mut cuts: Vec<T> = special
            .iter()
            .copied()
            .filter(|&p| p > a && p < b)
            .collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        cuts.dedup();

        let ratio = T::lit(self.grading.ratio);
        let mut out = vec![a];
        for w in cuts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let len = q - p;
            if len <= T::zero() {
                continue;
            }
            let floor = len * T::lit(self.grading.min_relative_width);
            let mid = p + len * T::lit(0.5);
            // toward p: p + (mid-p) r^j
            let mut left = Vec::new();
            let mut d = mid - p;
            while d > floor {
                left.push(p + d);
                d = d * ratio;
            }
            left.reverse();
            out.extend(left);
            // toward q: q - (q-mid) r^j
            let mut d = (q - mid) * ratio;
            while d > floor {
                out.push(q - d);
                d = d * ratio;
            }
            out.push(q);
        }
        out
    }

    pub fn integrate<T: Scalar>(&self, f: impl Fn(T) -> T, a: T, b: T, special: &[T]) -> T {
        if b <= a {
            return T::zero();
        }
        let cuts = self.breakpoints(a, b, special);
        cuts.windows(2)
            .map(|w| self.rule.integrate(&f, w[0], w[1]))
            .fold(T::zero(), |acc, v| acc + v)
    }

    /// Nodes of panels graded toward `a` only: `[a + (b-a) r^(j+1), a + (b-a) r^j]`.
    pub fn nodes_graded_left<T: Scalar>(&self, a: T, b: T) -> Vec<(T, T)> {
        let ratio = T::lit(self.grading.ratio);
        let floor = (b - a) * T::lit(self.grading.min_relative_width);
        let mut cuts = vec![b];
        let mut d = (b - a) * ratio;
        while d > floor {
            cuts.push(a + d);
            d = d * ratio;
        }
        cuts.push(a);
        cuts.reverse();
        cuts.windows(2)
            .flat_map(|w| self.rule.mapped(w[0], w[1]).collect::<Vec<_>>())
            .collect()
    }

    /// All (node, weight) pairs of the composite rule; reusable across
    /// integrands sharing one layout.
    pub fn nodes<T: Scalar>(&self, a: T, b: T, special: &[T]) -> Vec<(T, T)> {
        let cuts = self.breakpoints(a, b, special);
        cuts.windows(2)
            .flat_map(|w| self.rule.mapped(w[0], w[1]).collect::<Vec<_>>())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let rule = GaussLegendre::new(8);
        // degree 15 is integrated exactly
        let v: f64 = rule.integrate(|x: f64| x.powi(14) + x.powi(15), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let w: f64 = rule.integrate(|x: f64| x * x, 0.0, 3.0);
        assert!((w - 9.0).abs() < 1e-13);
    }

    #[test]
    fn weights_sum_to_two() {
        for order in [1, 2, 5, 16, 40] {
            let rule = GaussLegendre::new(order);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "order {order}: {s}");
        }
    }

    #[test]
    fn graded_panels_resolve_endpoint_singularity() {
        let q = PanelQuadrature::new(16);
        for &s in &[-0.7_f64, -0.3, 0.3, 0.5] {
            let v: f64 = q.integrate(|x: f64| x.powf(s), 0.0, 1.0, &[]);
            let exact = 1.0 / (1.0 + s);
            assert!((v - exact).abs() < 1e-12 * exact, "s={s}: {v} vs {exact}");
        }
    }

    #[test]
    fn interior_kink() {
        let q = PanelQuadrature::new(12);
        let v: f64 = q.integrate(|x: f64| (x - 0.3).abs().sqrt(), 0.0, 1.0, &[0.3]);
        let exact = (2.0 / 3.0) * (0.3f64.powf(1.5) + 0.7f64.powf(1.5));
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let q = PanelQuadrature::new(8);
        let v: f32 = q.integrate(|x: f32| x.sqrt(), 0.0, 1.0, &[]);
        assert!((v - 2.0 / 3.0).abs() < 1e-5);
    }
}
