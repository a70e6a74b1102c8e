//! Independent recomputation of the response and correlation terms from
//! their time-domain integral representations.
//!
//! The `(s - iε)^{-2}` kernels are split into a principal-value integral and
//! a delta-function piece; the principal values go through
//! [`integrate_pv`]. Nothing here calls the closed-form production path, so
//! agreement between the two is a meaningful check. Expect 1e-6..1e-8
//! relative accuracy rather than the production 1e-10.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quadrature::{
    integrate, integrate_breakpoints, integrate_pv, integrate_semi_infinite_n, Bracket, PvDomain, SemiInfinite,
};

const INNER_TOL: f64 = 1e-12;
const OUTER_TOL: f64 = 1e-10;
/// Upper limit for Gaussian-damped integrands, where e^{-s²/4} < 1e-170.
const GAUSSIAN_CUTOFF: f64 = 40.0;

fn sqrt_pi() -> f64 {
    PI.sqrt()
}

/// Primed image list computed from scratch: `(m, weight, sin(mπ/ν))`.
fn images(nu: f64) -> Vec<(u32, f64, f64)> {
    let rounded = nu.round();
    let nu = if (nu - rounded).abs() < 1e-12 { rounded } else { nu };
    let even = nu.fract() == 0.0 && nu % 2.0 == 0.0;
    (1..=(nu / 2.0).floor() as u32)
        .map(|m| {
            let half = even && f64::from(2 * m) == nu;
            let s = if half { 1.0 } else { (f64::from(m) * PI / nu).sin() };
            (m, if half { 0.5 } else { 1.0 }, s)
        })
        .collect()
}

fn is_integer(nu: f64) -> bool {
    (nu - nu.round()).abs() < 1e-12
}

/// `sin(νπ) / (cosh(νζ) - cos(νπ))` and the options for integrating it;
/// the denominator is formed as `2 sin²(νπ/2) + 2 sinh²(νζ/2)`.
fn zeta_weight(nu: f64) -> (impl Fn(f64) -> f64, SemiInfinite) {
    let s = (nu * PI).sin();
    let one_minus = 2.0 * (0.5 * nu * PI).sin().powi(2);
    let weight = move |zeta: f64| {
        let sh = (0.5 * nu * zeta).sinh();
        s / (one_minus + 2.0 * sh * sh)
    };
    let peak = (one_minus < 0.1).then(|| (2.0 * one_minus).sqrt() / nu);
    (weight, SemiInfinite::new(nu, OUTER_TOL).with_peak(peak))
}

/// P0 from `-(1/4π^{3/2}) ∫_0^∞ [2 cos(gs) e^{-s²/4} - 2]/s² ds - g/(4√π)`.
pub fn p0_oracle(gap: f64) -> Result<f64> {
    if !(gap >= 0.0 && gap.is_finite()) {
        return Err(invalid("gap must be finite and >= 0"));
    }
    // cos(gs) e^{-s²/4} - 1 = -2 sin²(gs/2) e^{-s²/4} + expm1(-s²/4)
    let integrand = |s: f64| {
        if s == 0.0 {
            return -(gap * gap + 0.5);
        }
        let h = (0.5 * gap * s).sin();
        2.0 * (-2.0 * h * h * (-0.25 * s * s).exp() + (-0.25 * s * s).exp_m1()) / (s * s)
    };
    let body = integrate(integrand, Bracket::new(0.0, GAUSSIAN_CUTOFF)?, INNER_TOL)?;
    let tail = -2.0 / GAUSSIAN_CUTOFF;
    Ok(-(body.value + tail) / (4.0 * PI * sqrt_pi()) - gap / (4.0 * sqrt_pi()))
}

/// `I(b) = π e^{-b²/4} sin(gb)/b + 2 PV∫_0^∞ cos(gs) e^{-s²/4}/(s² - b²) ds`,
/// returned as (delta piece, principal-value piece).
fn i_kernel(b: f64, gap: f64) -> Result<(f64, f64)> {
    let delta = PI * (-0.25 * b * b).exp() * (gap * b).sin() / b;
    let pv = integrate_pv(
        |s| (gap * s).cos() * (-0.25 * s * s).exp(),
        &[b],
        PvDomain::HalfLine,
        INNER_TOL,
    )?;
    Ok((delta, 2.0 * pv.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleTerm {
    pub m: u32,
    pub weight: f64,
    pub delta: f64,
    pub principal_value: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermwiseOracle {
    pub terms: Vec<OracleTerm>,
    pub total: f64,
}

/// Image-sum part of the response at distance `rho`.
pub fn p1_oracle(rho: f64, nu: f64, gap: f64) -> Result<TermwiseOracle> {
    if !(rho >= 0.0 && nu >= 1.0) {
        return Err(invalid("p1 oracle needs rho >= 0 and nu >= 1"));
    }
    let prefactor = -1.0 / (2.0 * PI * sqrt_pi());
    let mut terms = Vec::new();
    for (m, weight, s) in images(nu) {
        let b = 2.0 * rho * s;
        let term = if b < 1e-8 {
            // at coincidence each image repeats the direct term twice
            let value = 2.0 * weight * p0_oracle(gap)?;
            OracleTerm {
                m,
                weight,
                delta: 0.0,
                principal_value: value,
                value,
            }
        } else {
            let (delta, pv) = i_kernel(b, gap)?;
            OracleTerm {
                m,
                weight,
                delta: prefactor * weight * delta,
                principal_value: prefactor * weight * pv,
                value: prefactor * weight * (delta + pv),
            }
        };
        terms.push(term);
    }
    let total = terms.iter().map(|t| t.value).sum();
    Ok(TermwiseOracle { terms, total })
}

/// ζ-integral part of the response, as a nested PV quadrature.
pub fn p2_oracle(rho: f64, nu: f64, gap: f64) -> Result<f64> {
    if !(rho > 0.0 && nu >= 1.0) {
        return Err(invalid("p2 oracle needs rho > 0 and nu >= 1"));
    }
    if is_integer(nu) {
        return Ok(0.0);
    }
    let (weight, opts) = zeta_weight(nu);
    let mut failure = None;
    let r = integrate_semi_infinite_n(
        |zeta| {
            let b = 2.0 * rho * (0.5 * zeta).cosh();
            match i_kernel(b, gap) {
                Ok((delta, pv)) => [weight(zeta) * (delta + pv)],
                Err(e) => {
                    failure.get_or_insert(e);
                    [0.0]
                }
            }
        },
        &opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(nu / (4.0 * PI * PI * sqrt_pi()) * r.value[0])
}

/// `J(D) = PV∫_0^∞ e^{-u²/4}/(u² - D²) du - iπ e^{-D²/4}/(2D)` as (re, im).
fn j_kernel(big_d: f64) -> Result<(f64, f64)> {
    let pv = integrate_pv(|u| (-0.25 * u * u).exp(), &[big_d], PvDomain::HalfLine, INNER_TOL)?;
    Ok((pv.value, -PI * (-0.25 * big_d * big_d).exp() / (2.0 * big_d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexTerm {
    pub m: u32,
    pub weight: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationOracle {
    pub x0: [f64; 2],
    pub images: Vec<ComplexTerm>,
    pub integral: [f64; 2],
    pub total: [f64; 2],
}

/// X0 as (re, im).
pub fn x0_oracle(d: f64, gap: f64) -> Result<[f64; 2]> {
    if !(d > 0.0) {
        return Err(invalid("x0 oracle needs d > 0"));
    }
    let (re, im) = j_kernel(d)?;
    let scale = (-gap * gap).exp() / (2.0 * PI * sqrt_pi());
    Ok([scale * re, scale * im])
}

/// X for the parallel same-side alignment.
pub fn xp_oracle(l: f64, d: f64, nu: f64, gap: f64) -> Result<CorrelationOracle> {
    if !(l >= 0.0 && d > 0.0 && nu >= 1.0) {
        return Err(invalid("xp oracle needs l >= 0, d > 0 and nu >= 1"));
    }
    let x0 = x0_oracle(d, gap)?;
    let damp = (-gap * gap).exp();
    let mut images_out = Vec::new();
    for (m, weight, s) in images(nu) {
        let (re, im) = j_kernel((d * d + 4.0 * l * l * s * s).sqrt())?;
        let scale = damp * weight / (PI * sqrt_pi());
        images_out.push(ComplexTerm {
            m,
            weight,
            re: scale * re,
            im: scale * im,
        });
    }
    let integral = if is_integer(nu) {
        [0.0, 0.0]
    } else {
        let (weight, opts) = zeta_weight(nu);
        let mut failure = None;
        let r = integrate_semi_infinite_n(
            |zeta| {
                let big_d = (d * d + 2.0 * l * l * (1.0 + zeta.cosh())).sqrt();
                match j_kernel(big_d) {
                    Ok((re, im)) => {
                        let w = weight(zeta);
                        [w * re, w * im]
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        [0.0, 0.0]
                    }
                }
            },
            &opts,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let scale = -nu * damp / (2.0 * PI * PI * sqrt_pi());
        [scale * r.value[0], scale * r.value[1]]
    };
    let mut total = [x0[0] + integral[0], x0[1] + integral[1]];
    for t in &images_out {
        total[0] += t.re;
        total[1] += t.im;
    }
    Ok(CorrelationOracle {
        x0,
        images: images_out,
        integral,
        total,
    })
}

/// Comparison of one production value against its oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub quantity: String,
    pub production: f64,
    pub oracle: f64,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    /// Relative comparison, falling back to absolute when the oracle value
    /// is below 1e-12 in magnitude.
    pub fn compare(quantity: impl Into<String>, production: f64, oracle: f64, tolerance: f64) -> Self {
        Self::compare_complex(quantity, [production, 0.0], [oracle, 0.0], tolerance)
    }

    /// Complex comparison by `|production - oracle| / |oracle|`; the scalar
    /// fields hold the magnitudes.
    pub fn compare_complex(quantity: impl Into<String>, production: [f64; 2], oracle: [f64; 2], tolerance: f64) -> Self {
        let diff = (production[0] - oracle[0]).hypot(production[1] - oracle[1]);
        let scale = oracle[0].hypot(oracle[1]);
        let rel = if scale > 0.0 { diff / scale } else { diff };
        let pass = if scale < 1e-12 { diff <= tolerance } else { rel <= tolerance };
        let magnitude = |z: [f64; 2]| if z[1] == 0.0 { z[0] } else { z[0].hypot(z[1]) };
        OracleReport {
            quantity: quantity.into(),
            production: magnitude(production),
            oracle: magnitude(oracle),
            abs_deviation: diff,
            rel_deviation: rel,
            tolerance,
            pass,
        }
    }
}

/// The ε → 0 limit of the regulated direct-term integral,
/// `-(1/4π^{3/2}) ∫_{-∞}^{∞} e^{-igs} e^{-s²/4} / (s - iε)² ds`, from
/// Richardson extrapolation over ε ∈ {1e-2, 5e-3, 2.5e-3}.
pub fn epsilon_extrapolation(gap: f64) -> Result<f64> {
    let regulated = |eps: f64| -> Result<f64> {
        let e2 = eps * eps;
        // subtract the h(0) piece, whose integral over the half-line is zero
        let f = |s: f64| {
            let s2 = s * s;
            let den = (s2 + e2) * (s2 + e2);
            let g = (-0.25 * s2).exp();
            ((gap * s).cos() * g - 1.0) * (s2 - e2) / den + 2.0 * eps * s * (gap * s).sin() * g / den
        };
        let mut points = vec![0.0];
        let mut edge = eps;
        while edge < GAUSSIAN_CUTOFF {
            points.push(edge);
            edge *= 4.0;
        }
        points.push(GAUSSIAN_CUTOFF);
        let body = integrate_breakpoints(|s| [f(s)], &points, INNER_TOL)?;
        let tail = -GAUSSIAN_CUTOFF / (GAUSSIAN_CUTOFF * GAUSSIAN_CUTOFF + e2);
        Ok(2.0 * (body.value[0] + tail))
    };
    let (a, b, c) = (regulated(1e-2)?, regulated(5e-3)?, regulated(2.5e-3)?);
    let r1 = 2.0 * b - a;
    let r2 = 2.0 * c - b;
    let limit = (4.0 * r2 - r1) / 3.0;
    Ok(-limit / (4.0 * PI * sqrt_pi()))
}

/// Compares the ε-extrapolated direct term with a production value of P0.
pub fn epsilon_extrapolation_check(gap: f64, production_p0: f64) -> Result<OracleReport> {
    let oracle = epsilon_extrapolation(gap)?;
    Ok(OracleReport::compare(
        format!("P0 epsilon limit (gap={gap})"),
        production_p0,
        oracle,
        1e-4,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    // closed forms evaluated independently of the production modules
    fn p0_closed(g: f64) -> f64 {
        ((-g * g).exp() - sqrt_pi() * g * libm::erfc(g)) / (4.0 * PI)
    }

    fn dawson(x: f64) -> f64 {
        // D(x) = e^{-x²} ∫_0^x e^{t²} dt by Simpson on a fine grid
        let n = 2000;
        let h = x / n as f64;
        let mut sum = 1.0 + (x * x).exp();
        for i in 1..n {
            let t = h * i as f64;
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * (t * t).exp();
        }
        (-x * x).exp() * sum * h / 3.0
    }

    #[test]
    fn p0_matches_closed_form() {
        assert!((p0_oracle(0.0).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-10);
        for &g in &[0.1, 1.0, 2.5] {
            let o = p0_oracle(g).unwrap();
            assert!((o / p0_closed(g) - 1.0).abs() < 1e-8, "g={g}");
        }
        assert!((p0_oracle(0.1).unwrap() - 0.066_267_183).abs() < 1e-8);
    }

    #[test]
    fn x0_imaginary_part_and_dawson_real_part() {
        let x = x0_oracle(1.0, 0.0).unwrap();
        assert!((x[1] + (-0.25f64).exp() / (4.0 * sqrt_pi())).abs() < 1e-14);
        let expected = -dawson(0.5) / (2.0 * PI);
        assert!((x[0] - expected).abs() < 1e-10, "{} vs {expected}", x[0]);
    }

    #[test]
    fn integer_nu_has_no_integral() {
        assert_eq!(p2_oracle(1.0, 3.0, 0.1).unwrap(), 0.0);
        assert!(p1_oracle(1.0, 1.0, 0.1).unwrap().terms.is_empty());
        assert_eq!(p1_oracle(1.0, 1.0, 0.1).unwrap().total, 0.0);
    }

    #[test]
    fn unit_nu_reduces_to_x0() {
        let xp = xp_oracle(0.7, 1.0, 1.0, 0.1).unwrap();
        assert_eq!(xp.total, x0_oracle(1.0, 0.1).unwrap());
    }

    #[test]
    fn coincident_images_reduce_to_direct_term() {
        // at ρ = 0 every image repeats the direct term: P = ν P0
        let p1 = p1_oracle(0.0, 3.0, 0.1).unwrap();
        assert!((p1.total - 2.0 * p0_closed(0.1)).abs() < 1e-9);
        // continuity of the PV route towards ρ = 0
        let near = p1_oracle(1e-3, 3.0, 0.1).unwrap();
        assert!((near.total / p1.total - 1.0).abs() < 1e-5);
    }

    #[test]
    fn half_weight_term() {
        let p = p1_oracle(0.5, 4.0, 0.1).unwrap();
        assert_eq!(p.terms.len(), 2);
        assert_eq!(p.terms[1].weight, 0.5);
        let full = p.terms[1].value / p.terms[1].weight;
        let with_full_weight = p.terms[0].value + full;
        assert!((with_full_weight - p.total - 0.5 * full).abs() < 1e-15);
    }

    #[test]
    fn epsilon_limit_matches_closed_form() {
        for &g in &[0.0, 0.1, 1.0] {
            let r = epsilon_extrapolation_check(g, p0_closed(g)).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn report_pass_rules() {
        assert!(OracleReport::compare("a", 1.0 + 1e-9, 1.0, 1e-8).pass);
        assert!(!OracleReport::compare("a", 1.0 + 1e-7, 1.0, 1e-8).pass);
        assert!(OracleReport::compare("zero", 1e-14, 0.0, 1e-12).pass);
    }
}
