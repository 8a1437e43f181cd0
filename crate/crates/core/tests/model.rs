use std::f64::consts::TAU;
use std::sync::Arc;

use proptest::prelude::*;

use fracalign::model::{
    compute_g, reconstruct_velocity, rhs, rhs_burgers, rhs_primitive, special_velocity,
    ModelParams, SystemState,
};
use fracalign::spectral::{RealField, SpectralGrid};
use fracalign::{Error, Field, Grid};

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

/// Low-mode data, so that every product in the right-hand sides stays
/// below the dealiasing cutoff of a 64-point grid.
fn low_modes(scale: f64) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-scale..scale, -scale..scale), 1..5)
}

fn grid() -> Arc<Grid> {
    SpectralGrid::new(64, 5.0).unwrap()
}

fn density(c: &[(f64, f64)]) -> Field {
    // |Σ| <= 4 * 2 * 0.1 < 1
    trig(&grid(), 1.0, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn velocity_round_trip(r in low_modes(0.1), v in low_modes(1.0), mean in -1.0..1.0f64, alpha in 0.05..0.95f64) {
        let rho = density(&r);
        let u = trig(&grid(), mean, &v);
        let g = compute_g(&rho, &u, alpha).unwrap();
        prop_assert!(g.mean().abs() < 1e-12);
        let m0 = (&rho * &u).integral();
        let back = reconstruct_velocity(&rho, &g, m0, alpha).unwrap();
        prop_assert!(max_diff(&back, &u) < 1e-11 * (1.0 + u.max_abs()));
    }

    #[test]
    fn mass_and_mean_of_g_are_conserved(r in low_modes(0.1), v in low_modes(1.0), alpha in 0.05..0.95f64) {
        let rho = density(&r);
        let u = trig(&grid(), 0.2, &v);
        let p = ModelParams::alignment(alpha).unwrap();
        for s in [
            SystemState::primitive(rho.clone(), u.clone()).unwrap(),
            SystemState::primitive(rho.clone(), u.clone()).unwrap().to_reformulated(&p).unwrap(),
            SystemState::special(rho.clone(), 0.4).unwrap(),
        ] {
            let d = rhs(&s, &p).unwrap();
            prop_assert!(d[0].mean().abs() < 1e-12);
            if d.len() > 1 && s.formulation() == fracalign::model::Formulation::Reformulated {
                prop_assert!(d[1].mean().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn momentum_rate_vanishes(r in low_modes(0.1), v in low_modes(0.5), alpha in 0.05..0.95f64) {
        let rho = density(&r);
        let u = trig(&grid(), 0.3, &v);
        let (d_rho, d_u) = rhs_primitive(&rho, &u, alpha).unwrap();
        let rate = (&d_rho * &u).integral() + (&rho * &d_u).integral();
        prop_assert!(rate.abs() < 1e-11, "rate {}", rate);
    }

    #[test]
    fn galilean_shift(r in low_modes(0.1), v in low_modes(0.5), c in -2.0..2.0f64, alpha in 0.05..0.95f64) {
        let rho = density(&r);
        let u = trig(&grid(), 0.0, &v);
        let (dr, du) = rhs_primitive(&rho, &u, alpha).unwrap();
        let (dr2, du2) = rhs_primitive(&rho, &u.shift(c), alpha).unwrap();
        let rx = rho.derivative().unwrap();
        let ux = u.derivative().unwrap();
        prop_assert!(max_diff(&dr2, &dr.axpy(-c, &rx)) < 1e-11);
        prop_assert!(max_diff(&du2, &du.axpy(-c, &ux)) < 1e-11);
    }

    #[test]
    fn special_velocity_has_no_g(r in low_modes(0.1), mean in -1.0..1.0f64, alpha in 0.05..0.95f64) {
        let rho = density(&r);
        let u = special_velocity(&rho, alpha, mean).unwrap();
        prop_assert!((u.mean() - mean).abs() < 1e-13);
        prop_assert!(compute_g(&rho, &u, alpha).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn burgers_energy_decreases(v in low_modes(1.0), eps in 0.0..2.0f64, alpha in 0.1..1.9f64) {
        let u = trig(&grid(), 0.5, &v);
        let du = rhs_burgers(&u, alpha, eps).unwrap();
        let rate = (&u * &du).integral();
        prop_assert!(rate <= 1e-11, "rate {}", rate);
        prop_assert!(du.mean().abs() < 1e-12);
    }
}

#[test]
fn vacuum_and_parameters_are_rejected() {
    let g = grid();
    let rho = RealField::from_fn(g.clone(), |x| (TAU * x / 5.0).cos().powi(2)).unwrap();
    let u = RealField::zeros(g);
    assert!(matches!(
        SystemState::primitive(rho, u),
        Err(Error::Vacuum { .. })
    ));
    assert!(ModelParams::alignment(1.0).is_err());
    assert!(ModelParams::alignment(0.0).is_err());
    assert!(ModelParams::burgers(2.0, 1.0).is_err());
    assert!(ModelParams::burgers(0.5, -1.0).is_err());
}

#[test]
fn reformulated_rejects_nonzero_mean_g() {
    let g = grid();
    let rho = RealField::constant(g.clone(), 1.0);
    let bad = RealField::constant(g, 0.5);
    assert!(matches!(
        SystemState::reformulated(rho, bad, 0.0),
        Err(Error::MeanViolation { .. })
    ));
}
