//! Transition probability of a static detector near the string or a
//! reflecting boundary. All values are per λ².

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::{image_terms, response_zeta, Alignment, ConeParameter};
use crate::quadrature::{integrate_semi_infinite_n, SemiInfinite, DEFAULT_TOL};
use crate::special::{kernel_ratio, response_kernel, SMALL_ARGUMENT, SQRT_PI};

/// Contribution of one image term `m` with half-distance `argument`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImageContribution {
    pub m: u32,
    pub weight: f64,
    pub argument: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseBreakdown {
    pub p_flat: f64,
    pub p_images: f64,
    pub p_integral: f64,
    pub total: f64,
    pub images: Vec<ImageContribution>,
    pub integral_error: f64,
}

/// `P0 = [exp(-g²) - sqrt(π) g erfc(g)] / 4π` with `g = Ωσ`.
pub fn p_flat(gap: f64) -> f64 {
    ((-gap * gap).exp() - SQRT_PI * gap * libm::erfc(gap)) / (4.0 * PI)
}

/// Response of a detector at distance `rho` from a string with parameter `nu`.
pub fn p_string(rho: f64, nu: ConeParameter, gap: f64) -> Result<ResponseBreakdown> {
    p_string_tol(rho, nu, gap, DEFAULT_TOL)
}

pub fn p_string_tol(rho: f64, nu: ConeParameter, gap: f64, tol: f64) -> Result<ResponseBreakdown> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(invalid(format!("rho = {rho} must be finite and >= 0")));
    }
    if !(gap.is_finite() && gap >= 0.0) {
        return Err(invalid(format!("gap = {gap} must be finite and >= 0")));
    }
    let flat = p_flat(gap);

    let images: Vec<ImageContribution> = image_terms(nu)
        .into_iter()
        .map(|t| {
            let a = rho * t.sin_term;
            ImageContribution {
                m: t.m,
                weight: t.weight,
                argument: a,
                value: t.weight * kernel_ratio(a, gap) / (4.0 * SQRT_PI),
            }
        })
        .collect();
    let p_images: f64 = images.iter().map(|c| c.value).sum();

    let zeta = response_zeta(rho, nu);
    let (p_integral, integral_error) = if zeta.vanishes() {
        (0.0, 0.0)
    } else {
        let opts = SemiInfinite::new(zeta.tail_rate(), tol).with_peak(zeta.peak_width());
        let r = integrate_semi_infinite_n(
            |z| [zeta.coefficient(z) * kernel_ratio(zeta.argument(z), gap)],
            &opts,
        )?;
        (
            r.value[0] / (8.0 * SQRT_PI),
            r.error_estimate[0] / (8.0 * SQRT_PI),
        )
    };

    Ok(ResponseBreakdown {
        p_flat: flat,
        p_images,
        p_integral,
        total: flat + p_images + p_integral,
        images,
        integral_error,
    })
}

/// Response at distance `l` from a reflecting boundary; zero on the boundary.
pub fn p_boundary(l: f64, gap: f64) -> f64 {
    let l = l.abs();
    if l < SMALL_ARGUMENT {
        return 0.0;
    }
    p_flat(gap) - response_kernel(l, gap) / (8.0 * SQRT_PI * l)
}

/// Response of one detector at distance `rho` for the given alignment: the
/// flat value, the string response, or the boundary response.
pub fn p_detector(alignment: Alignment, rho: f64, nu: ConeParameter, gap: f64) -> Result<ResponseBreakdown> {
    let flat = p_flat(gap);
    match alignment {
        Alignment::Flat => Ok(ResponseBreakdown {
            p_flat: flat,
            p_images: 0.0,
            p_integral: 0.0,
            total: flat,
            images: Vec::new(),
            integral_error: 0.0,
        }),
        Alignment::BoundaryParallel | Alignment::BoundaryOrthogonal => {
            if !(rho.is_finite() && rho >= 0.0) {
                return Err(invalid(format!("rho = {rho} must be finite and >= 0")));
            }
            let total = p_boundary(rho, gap);
            let image = total - flat;
            Ok(ResponseBreakdown {
                p_flat: flat,
                p_images: image,
                p_integral: 0.0,
                total,
                images: vec![ImageContribution {
                    m: 1,
                    weight: -1.0,
                    argument: rho,
                    value: image,
                }],
                integral_error: 0.0,
            })
        }
        _ => p_string(rho, nu, gap),
    }
}
