//! Nonlocal correlation term X for every alignment, assembled from the
//! auxiliary function `f`. All values are per λ².

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{f_arguments, Alignment, ConeParameter, PairConfig};
use crate::quadrature::{integrate_semi_infinite_n, SemiInfinite, DEFAULT_TOL};
use crate::special::{aux_f, Complex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTerm {
    pub m: u32,
    pub weight: f64,
    pub argument: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationBreakdown {
    pub x_flat: Complex,
    pub x_images: Complex,
    pub x_integral: Complex,
    pub total: Complex,
    pub images: Vec<CorrelationTerm>,
    pub integral_error: [f64; 2],
}

impl CorrelationBreakdown {
    fn flat_only(x_flat: Complex) -> Self {
        CorrelationBreakdown {
            x_flat,
            x_images: Complex::new(0.0, 0.0),
            x_integral: Complex::new(0.0, 0.0),
            total: x_flat,
            images: Vec::new(),
            integral_error: [0.0; 2],
        }
    }
}

fn overlap(image: Option<u32>, z: f64) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::DivergentArgument { .. } => Error::DivergentOverlap { image, argument: z },
        other => other,
    }
}

/// `X0 = f(d/2)`.
pub fn x_flat(d: f64, gap: f64) -> Result<Complex> {
    aux_f(0.5 * d, gap).map_err(overlap(None, 0.5 * d))
}

/// X for the flat and string alignments.
pub fn x_string(config: &PairConfig, nu: ConeParameter) -> Result<CorrelationBreakdown> {
    x_string_tol(config, nu, DEFAULT_TOL)
}

pub fn x_string_tol(config: &PairConfig, nu: ConeParameter, tol: f64) -> Result<CorrelationBreakdown> {
    if config.alignment.is_boundary() {
        return Err(invalid("boundary alignments are handled by x_boundary"));
    }
    let gap = config.gap;
    let x0 = x_flat(config.d, gap)?;
    if config.alignment == Alignment::Flat {
        return Ok(CorrelationBreakdown::flat_only(x0));
    }
    let args = f_arguments(config, nu)?;

    let mut images = Vec::with_capacity(args.images.len());
    let mut x_images = Complex::new(0.0, 0.0);
    for img in &args.images {
        let value = 2.0 * img.weight * aux_f(img.z, gap).map_err(overlap(Some(img.m), img.z))?;
        x_images += value;
        images.push(CorrelationTerm {
            m: img.m,
            weight: img.weight,
            argument: img.z,
            re: value.re,
            im: value.im,
        });
    }

    let (x_integral, integral_error) = match args.zeta.filter(|z| !z.vanishes()) {
        None => (Complex::new(0.0, 0.0), [0.0; 2]),
        Some(zeta) => {
            let opts = SemiInfinite::new(zeta.tail_rate(), tol).with_peak(zeta.peak_width());
            let mut failure = None;
            let r = integrate_semi_infinite_n(
                |s| {
                    let z = zeta.argument(s);
                    match aux_f(z, gap) {
                        Ok(f) => {
                            let c = zeta.coefficient(s);
                            [c * f.re, c * f.im]
                        }
                        Err(e) => {
                            failure.get_or_insert(overlap(None, z)(e));
                            [0.0, 0.0]
                        }
                    }
                },
                &opts,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            (Complex::new(r.value[0], r.value[1]), r.error_estimate)
        }
    };

    Ok(CorrelationBreakdown {
        x_flat: x0,
        x_images,
        x_integral,
        total: x0 + x_images + x_integral,
        images,
        integral_error,
    })
}

/// X next to a reflecting boundary; the single image is subtracted.
pub fn x_boundary(config: &PairConfig) -> Result<Complex> {
    Ok(x_boundary_breakdown(config)?.total)
}

pub fn x_boundary_breakdown(config: &PairConfig) -> Result<CorrelationBreakdown> {
    config.validate()?;
    let PairConfig { l, d, gap, .. } = *config;
    let z = match config.alignment {
        Alignment::BoundaryParallel => (0.25 * d * d + l * l).sqrt(),
        Alignment::BoundaryOrthogonal => 0.5 * d + l,
        other => return Err(invalid(format!("{other} is not a boundary alignment"))),
    };
    let x0 = x_flat(d, gap)?;
    let image = -aux_f(z, gap).map_err(overlap(Some(1), z))?;
    Ok(CorrelationBreakdown {
        x_flat: x0,
        x_images: image,
        x_integral: Complex::new(0.0, 0.0),
        total: x0 + image,
        images: vec![CorrelationTerm {
            m: 1,
            weight: -1.0,
            argument: z,
            re: image.re,
            im: image.im,
        }],
        integral_error: [0.0; 2],
    })
}

/// Dispatches on the alignment.
pub fn correlation(config: &PairConfig, nu: ConeParameter) -> Result<CorrelationBreakdown> {
    if config.alignment.is_boundary() {
        x_boundary_breakdown(config)
    } else {
        x_string(config, nu)
    }
}
