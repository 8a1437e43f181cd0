//! Real-space evaluation of `Λ^alpha` by quadrature of the periodized
//! singular kernel.
//!
//! On the torus of length `L`,
//!
//! ```text
//! Λ^a f(x) = c_a ∫_0^{L/2} (2 f(x) - f(x+h) - f(x-h)) K(h) dh,
//! K(h)     = Σ_{j ∈ Z} |h + jL|^{-1-a},
//! ```
//!
//! where `c_a` is [`kernel_constant`]. The image sum is truncated at
//! `|j| <= n_images`, optionally completed with an Euler–Maclaurin remainder.
//! The symmetric second difference vanishes like `h^2` at the origin, so the
//! integrand behaves like `h^(1-a)` there; panels are graded toward `h = 0`.

use crate::error::{Error, Result};
use crate::quadrature::PanelQuadrature;
use crate::scalar::{kernel_constant, Scalar};

use super::field::RealField;

/// Image-sum policy for the periodized kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSum {
    pub n_images: usize,
    /// Add the Euler–Maclaurin estimate of `Σ_{|j| > n_images}`.
    pub tail_correction: bool,
}

impl ImageSum {
    pub fn new(n_images: usize) -> Self {
        Self {
            n_images,
            tail_correction: true,
        }
    }

    pub fn truncated(n_images: usize) -> Self {
        Self {
            n_images,
            tail_correction: false,
        }
    }
}

/// Result of the quadrature evaluation.
#[derive(Debug, Clone)]
pub struct QuadratureLaplacian<T: Scalar> {
    pub field: RealField<T>,
    /// Estimated relative weight of the kernel mass not represented by the
    /// image sum (zero-mode-free part of the kernel beyond `n_images`).
    pub neglected_tail: f64,
    /// Set when `neglected_tail` exceeds the `1e-6` target.
    pub warning: Option<String>,
}

const TARGET_TOLERANCE: f64 = 1e-6;

/// `Σ_{j > n} (j + a)^(-p)` by Euler–Maclaurin, for `n + a >> 1`.
fn image_tail(n: usize, a: f64, p: f64) -> f64 {
    let y = n as f64 + 1.0 + a;
    y.powf(1.0 - p) / (p - 1.0) + 0.5 * y.powf(-p) + p * y.powf(-p - 1.0) / 12.0
        - p * (p + 1.0) * (p + 2.0) * y.powf(-p - 3.0) / 720.0
}

/// Periodized kernel `Σ_{|j| <= N} |h + jL|^{-p}` plus optional remainder.
pub fn periodized_kernel(h: f64, length: f64, alpha: f64, images: ImageSum) -> f64 {
    let p = 1.0 + alpha;
    let mut sum = h.powf(-p);
    for j in 1..=images.n_images {
        let jl = j as f64 * length;
        sum += (jl + h).powf(-p) + (jl - h).powf(-p);
    }
    if images.tail_correction {
        let scale = length.powf(-p);
        let r = h / length;
        sum += scale * (image_tail(images.n_images, r, p) + image_tail(images.n_images, -r, p));
    }
    sum
}

/// `Λ^alpha f` by real-space quadrature of the periodized kernel.
pub fn fractional_laplacian_quadrature<T: Scalar>(
    f: &RealField<T>,
    alpha: f64,
    n_images: usize,
) -> Result<QuadratureLaplacian<T>> {
    fractional_laplacian_quadrature_with(f, alpha, ImageSum::new(n_images), 24)
}

/// As [`fractional_laplacian_quadrature`] with explicit image policy and
/// Gauss–Legendre panel order.
pub fn fractional_laplacian_quadrature_with<T: Scalar>(
    f: &RealField<T>,
    alpha: f64,
    images: ImageSum,
    order: usize,
) -> Result<QuadratureLaplacian<T>> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Parameter(format!(
            "fractional order must lie in (0, 2), got {alpha}"
        )));
    }
    if images.n_images < 10 {
        return Err(Error::Parameter(format!(
            "at least 10 kernel images required, got {}",
            images.n_images
        )));
    }
    let grid = f.grid().clone();
    let n = grid.n_points();
    let length = grid.length().to_f64_lossy();
    let spectrum = f.forward()?;
    let c_alpha = kernel_constant(alpha);

    // The second difference of the trigonometric interpolant,
    //   2f(x) - f(x+h) - f(x-h) = Σ_m c_m e^{i k_m x} 4 sin^2(k_m h / 2),
    // is evaluated in this cancellation-free form; the quadrature then
    // accumulates one weight per mode |m|.
    let half = n / 2;
    let k1 = std::f64::consts::TAU / length;
    let mut weights = vec![0.0f64; half + 1];
    let quad = PanelQuadrature::new(order);
    for (h, w) in quad.nodes_graded_left(0.0, 0.5 * length) {
        let kernel = periodized_kernel(h, length, alpha, images) * w;
        for (m, acc) in weights.iter_mut().enumerate().skip(1) {
            let s = (0.5 * k1 * m as f64 * h).sin();
            *acc += 4.0 * s * s * kernel;
        }
    }

    let coeffs = spectrum.coeffs();
    let nodes = grid.nodes();
    let values: Vec<T> = nodes
        .iter()
        .map(|&x| {
            let x = x.to_f64_lossy();
            let mut acc = 0.0;
            for m in 1..half {
                let c = coeffs[m];
                let (s, co) = (k1 * m as f64 * x).sin_cos();
                let re = c.re.to_f64_lossy() * co - c.im.to_f64_lossy() * s;
                acc += 2.0 * re * weights[m];
            }
            acc += coeffs[half].re.to_f64_lossy() * (k1 * half as f64 * x).cos() * weights[half];
            T::lit(c_alpha * acc)
        })
        .collect();

    // relative size of the omitted far-field kernel mass for the lowest mode
    let neglected_tail = if images.tail_correction {
        let p = 1.0 + alpha;
        let y = images.n_images as f64 + 1.0;
        p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) / 30240.0 * y.powf(-p - 5.0)
    } else {
        let far = 2.0 * (images.n_images as f64 * length).powf(-alpha) / alpha;
        c_alpha * far * length / k1.powf(alpha)
    };
    let warning = (neglected_tail > TARGET_TOLERANCE).then(|| {
        format!(
            "kernel image sum truncated at {} images leaves relative error ~{neglected_tail:e}",
            images.n_images
        )
    });
    Ok(QuadratureLaplacian {
        field: RealField::new(grid, values)?,
        neglected_tail,
        warning,
    })
}
