use std::f64::consts::TAU;
use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;

use fracalign::spectral::{dealiased_product, RealField, SpectralGrid};
use fracalign::{kernel_constant, Field, Grid};

/// Field `c0 + Σ a_m cos(m x) + b_m sin(m x)` on a grid of length `length`.
fn trig(grid: &Arc<Grid>, mean: f64, coeffs: &[(f64, f64)]) -> Field {
    let k1 = TAU / grid.length();
    RealField::from_fn(grid.clone(), |x| {
        coeffs.iter().enumerate().fold(mean, |acc, (i, (a, b))| {
            let k = k1 * (i + 1) as f64;
            acc + a * (k * x).cos() + b * (k * x).sin()
        })
    })
    .unwrap()
}

fn max_diff(a: &Field, b: &Field) -> f64 {
    a.zip_map(b, |x, y| x - y).max_abs()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..10)
}

fn grids() -> impl Strategy<Value = Arc<Grid>> {
    (prop::sample::select(vec![32usize, 64, 128]), 0.5..20.0f64)
        .prop_map(|(n, l)| SpectralGrid::new(n, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(g in grids(), mean in -2.0..2.0f64, c in coeffs()) {
        let f = trig(&g, mean, &c);
        let back = f.forward().unwrap().inverse().unwrap();
        prop_assert!(max_diff(&f, &back) < 1e-13 * (1.0 + f.max_abs()));
        prop_assert!((f.forward().unwrap().coeffs()[0].re - mean).abs() < 1e-13);
    }

    #[test]
    fn derivative_matches_analytic(g in grids(), c in coeffs()) {
        let f = trig(&g, 0.3, &c);
        let k1 = TAU / g.length();
        let exact: Vec<(f64, f64)> = c
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = k1 * (i + 1) as f64;
                (k * b, -k * a)
            })
            .collect();
        let d = trig(&g, 0.0, &exact);
        prop_assert!(max_diff(&f.derivative().unwrap(), &d) < 1e-11 * (1.0 + d.max_abs()));
    }

    #[test]
    fn laplacian_commutes_with_derivative(g in grids(), c in coeffs(), alpha in 0.1..1.9f64) {
        let f = trig(&g, 1.0, &c);
        let a = f.fractional_laplacian(alpha).unwrap().derivative().unwrap();
        let b = f.derivative().unwrap().fractional_laplacian(alpha).unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-11 * (1.0 + a.max_abs()));
    }

    #[test]
    fn laplacian_semigroup(g in grids(), c in coeffs(), a in 0.1..0.9f64, b in 0.1..0.9f64) {
        let f = trig(&g, 0.0, &c);
        let two = f.fractional_laplacian(a).unwrap().fractional_laplacian(b).unwrap();
        let one = f.fractional_laplacian(a + b).unwrap();
        prop_assert!(max_diff(&one, &two) < 1e-11 * (1.0 + one.max_abs()));
    }

    #[test]
    fn laplacian_is_symmetric_and_nonnegative(g in grids(), c in coeffs(), d in coeffs(), alpha in 0.1..1.9f64) {
        let f = trig(&g, 0.0, &c);
        let h = trig(&g, 0.0, &d);
        let lf = f.fractional_laplacian(alpha).unwrap();
        let lh = h.fractional_laplacian(alpha).unwrap();
        let ip = |a: &Field, b: &Field| a.zip_map(b, |x, y| x * y).integral();
        let scale = 1.0 + ip(&lf, &lf).sqrt() * ip(&h, &h).sqrt();
        prop_assert!((ip(&lf, &h) - ip(&f, &lh)).abs() < 1e-11 * scale);
        prop_assert!(ip(&lf, &f) >= -1e-12 * scale);
    }

    #[test]
    fn primitive_is_right_inverse(g in grids(), c in coeffs()) {
        let f = trig(&g, 0.0, &c);
        let p = f.mean_zero_primitive().unwrap();
        prop_assert!(p.mean().abs() < 1e-13 * (1.0 + p.max_abs()));
        let back = p.derivative().unwrap();
        prop_assert!(max_diff(&back, &f) < 1e-11 * (1.0 + f.max_abs()));
    }

    #[test]
    fn dealiased_product_is_exact_for_low_modes(c in coeffs(), d in coeffs()) {
        let g = SpectralGrid::<f64>::periodic(64).unwrap();
        let f = trig(&g, 0.5, &c);
        let h = trig(&g, -0.2, &d);
        let p = dealiased_product(&f, &h).inverse().unwrap();
        let direct = f.zip_map(&h, |x, y| x * y);
        // modes up to 18 stay below the cutoff 21
        prop_assert!(max_diff(&p, &direct) < 1e-12 * (1.0 + direct.max_abs()));
    }

    #[test]
    fn rotation_commutes_with_operators(c in coeffs(), k in 0usize..64, alpha in 0.1..1.9f64) {
        let g = SpectralGrid::<f64>::periodic(64).unwrap();
        let f = trig(&g, 1.0, &c);
        let a = f.rotate(k).fractional_laplacian(alpha).unwrap();
        let b = f.fractional_laplacian(alpha).unwrap().rotate(k);
        prop_assert!(max_diff(&a, &b) < 1e-12 * (1.0 + a.max_abs()));
    }
}

#[test]
fn single_mode_eigenvalue() {
    let g = SpectralGrid::<f64>::new(64, 3.0).unwrap();
    let k = 3.0 * TAU / 3.0;
    let f = trig(&g, 0.0, &[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)]);
    let lf = f.fractional_laplacian(0.6).unwrap();
    for (v, w) in lf.values().iter().zip(f.values()) {
        assert_relative_eq!(*v, k.powf(0.6) * w, epsilon = 1e-12);
    }
}

#[test]
fn primitive_rejects_nonzero_mean() {
    let g = SpectralGrid::<f64>::periodic(32).unwrap();
    let f = RealField::constant(g, 1.0);
    assert!(f.mean_zero_primitive().is_err());
}

#[test]
fn single_precision_path() {
    let g = SpectralGrid::<f32>::periodic(64).unwrap();
    let f = RealField::from_fn(g, |x| 1.0 + 0.5 * x.cos() + 0.25 * (3.0 * x).sin()).unwrap();
    let back = f.forward().unwrap().inverse().unwrap();
    let err = f.zip_map(&back, |a, b| a - b).max_abs();
    assert!(err < 1e-5, "{err}");
    let lap = f.fractional_laplacian(1.0).unwrap();
    let x0 = 0.0f32;
    assert!((lap.values()[0] - (0.5 * x0.cos())).abs() < 1e-5);
}

#[test]
fn kernel_constant_closed_form() {
    assert_relative_eq!(kernel_constant(1.0), 1.0 / std::f64::consts::PI, epsilon = 1e-15);
    let a: f64 = 0.5;
    let gamma_half = std::f64::consts::PI.sqrt();
    let c = a / (2.0 * gamma_half * (std::f64::consts::FRAC_PI_4).cos());
    assert_relative_eq!(kernel_constant(a), c, epsilon = 1e-14);
}
