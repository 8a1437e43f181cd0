//! Named initial-data profiles.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{RealField, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Cos,
    Sin,
}

/// One term of an initial profile. Wavenumbers are in units of `2 pi / L`.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    SingleMode {
        amplitude: f64,
        wavenumber: u32,
        phase: Phase,
    },
    /// `a tanh(s sin(kx)) / tanh(s)` with `k = 2 pi / L`.
    SteepFront { amplitude: f64, sharpness: f64 },
    /// Random combination of modes `1..=modes`, seeded; amplitudes decay
    /// like `1/m` and the result is normalized to sup-norm at most `amplitude`.
    RandomModes { amplitude: f64, modes: u32 },
    Sum(Vec<Profile>),
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Constant(c) if !c.is_finite() => {
                Err(Error::Parameter(format!("constant {c} is not finite")))
            }
            Profile::SingleMode {
                amplitude,
                wavenumber,
                ..
            } if !amplitude.is_finite() || *wavenumber == 0 => Err(Error::Parameter(
                "single_mode needs a finite amplitude and a positive wavenumber".into(),
            )),
            Profile::SteepFront {
                amplitude,
                sharpness,
            } if !amplitude.is_finite() || !(*sharpness > 0.0) || !sharpness.is_finite() => {
                Err(Error::Parameter(
                    "steep_front needs a finite amplitude and positive sharpness".into(),
                ))
            }
            Profile::RandomModes { amplitude, modes } if !amplitude.is_finite() || *modes == 0 => {
                Err(Error::Parameter(
                    "random_modes needs a finite amplitude and at least one mode".into(),
                ))
            }
            Profile::Sum(parts) => parts.iter().try_for_each(Profile::validate),
            _ => Ok(()),
        }
    }

    /// Samples the profile on `grid`; `seed` drives random terms (each
    /// random term of a sum draws from its own stream).
    pub fn sample<T: Scalar>(&self, grid: &Arc<SpectralGrid<T>>, seed: u64) -> Result<RealField<T>> {
        self.validate()?;
        let length = grid.length().to_f64_lossy();
        let nodes: Vec<f64> = grid.nodes().iter().map(|x| x.to_f64_lossy()).collect();
        let mut values = vec![0.0f64; nodes.len()];
        let mut stream = 0u64;
        self.accumulate(&nodes, length, seed, &mut stream, &mut values);
        RealField::new(grid.clone(), values.into_iter().map(T::lit).collect())
    }

    fn accumulate(&self, x: &[f64], length: f64, seed: u64, stream: &mut u64, out: &mut [f64]) {
        let k1 = std::f64::consts::TAU / length;
        match self {
            Profile::Constant(c) => out.iter_mut().for_each(|v| *v += c),
            Profile::SingleMode {
                amplitude,
                wavenumber,
                phase,
            } => {
                let k = k1 * f64::from(*wavenumber);
                for (v, &x) in out.iter_mut().zip(x) {
                    *v += amplitude
                        * match phase {
                            Phase::Cos => (k * x).cos(),
                            Phase::Sin => (k * x).sin(),
                        };
                }
            }
            Profile::SteepFront {
                amplitude,
                sharpness,
            } => {
                let norm = sharpness.tanh();
                for (v, &x) in out.iter_mut().zip(x) {
                    *v += amplitude * (sharpness * (k1 * x).sin()).tanh() / norm;
                }
            }
            Profile::RandomModes { amplitude, modes } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(*stream);
                *stream += 1;
                let mut terms = vec![0.0f64; x.len()];
                for m in 1..=*modes {
                    let a: f64 = rng.random_range(-1.0..1.0) / f64::from(m);
                    let b: f64 = rng.random_range(-1.0..1.0) / f64::from(m);
                    let k = k1 * f64::from(m);
                    for (t, &x) in terms.iter_mut().zip(x) {
                        *t += a * (k * x).cos() + b * (k * x).sin();
                    }
                }
                let sup = terms.iter().fold(0.0f64, |s, t| s.max(t.abs()));
                let scale = if sup > 0.0 { amplitude / sup } else { 0.0 };
                for (v, t) in out.iter_mut().zip(terms) {
                    *v += scale * t;
                }
            }
            Profile::Sum(parts) => {
                for p in parts {
                    p.accumulate(x, length, seed, stream, out);
                }
            }
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "constant({c:?})"),
            Profile::SingleMode {
                amplitude,
                wavenumber,
                phase,
            } => {
                let p = match phase {
                    Phase::Cos => "cos",
                    Phase::Sin => "sin",
                };
                write!(f, "single_mode({amplitude:?}, {wavenumber}, {p})")
            }
            Profile::SteepFront {
                amplitude,
                sharpness,
            } => write!(f, "steep_front({amplitude:?}, {sharpness:?})"),
            Profile::RandomModes { amplitude, modes } => {
                write!(f, "random_modes({amplitude:?}, {modes})")
            }
            Profile::Sum(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// Random real field with modes `1..=modes` (plus `mean`), coefficients
/// uniform in `[-amplitude, amplitude]`.
pub fn random_band_limited<T: Scalar>(
    grid: &Arc<SpectralGrid<T>>,
    modes: usize,
    mean: f64,
    amplitude: f64,
    rng: &mut impl Rng,
) -> Result<RealField<T>> {
    let k1 = std::f64::consts::TAU / grid.length().to_f64_lossy();
    let coeffs: Vec<(f64, f64)> = (0..modes)
        .map(|_| {
            (
                rng.random_range(-amplitude..=amplitude),
                rng.random_range(-amplitude..=amplitude),
            )
        })
        .collect();
    RealField::from_fn(grid.clone(), |x| {
        let x = x.to_f64_lossy();
        let v = coeffs.iter().enumerate().fold(mean, |acc, (i, (a, b))| {
            let k = k1 * (i + 1) as f64;
            acc + a * (k * x).cos() + b * (k * x).sin()
        });
        T::lit(v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_modes() {
        let g = SpectralGrid::<f64>::periodic(32).unwrap();
        let p = Profile::Sum(vec![
            Profile::Constant(1.0),
            Profile::SingleMode {
                amplitude: 0.5,
                wavenumber: 2,
                phase: Phase::Cos,
            },
        ]);
        let f = p.sample(&g, 0).unwrap();
        for (x, v) in g.nodes().iter().zip(f.values()) {
            assert!((v - 1.0 - 0.5 * (2.0 * x).cos()).abs() < 1e-15);
        }
        assert_eq!(p.to_string(), "constant(1.0) + single_mode(0.5, 2, cos)");
    }

    #[test]
    fn random_modes_are_seeded_and_bounded() {
        let g = SpectralGrid::<f64>::periodic(64).unwrap();
        let p = Profile::RandomModes {
            amplitude: 0.3,
            modes: 6,
        };
        let a = p.sample(&g, 7).unwrap();
        let b = p.sample(&g, 7).unwrap();
        let c = p.sample(&g, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.max_abs() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn steep_front_is_normalized() {
        let g = SpectralGrid::<f64>::periodic(64).unwrap();
        let f = Profile::SteepFront {
            amplitude: 2.0,
            sharpness: 3.0,
        }
        .sample(&g, 0)
        .unwrap();
        assert!((f.max() - 2.0).abs() < 1e-12);
        assert!(Profile::SteepFront {
            amplitude: 1.0,
            sharpness: 0.0
        }
        .validate()
        .is_err());
    }
}
