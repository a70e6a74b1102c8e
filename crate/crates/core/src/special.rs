//! Complex error function family and the two kernels every observable is
//! built from.
//!
//! All complex-argument error functions are routed through the Faddeeva
//! function `w(z) = exp(-z^2) erfc(-iz)`, which stays bounded in the upper
//! half-plane. Production code never forms `exp(+a^2)` explicitly; the
//! unscaled forms (`erfc_complex`, `response_kernel_direct`) exist for
//! validation and are domain-limited.

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

pub const SQRT_PI: f64 = 1.772_453_850_905_516_f64;
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3_f64;

/// Arguments of the auxiliary function at or below this value (σ units) are
/// treated as a detector/image overlap.
pub const EPS_DIV: f64 = 1e-10;

/// Image half-distances below this use the analytic `a -> 0` limit of
/// `K(a, gap) / a`.
pub const SMALL_ARGUMENT: f64 = 1e-8;

/// Largest |Im z| accepted by [`erfc_complex`].
pub const ERFC_IM_LIMIT: f64 = 12.0;

// Zaghloul-Ali sum parameters tuned for double precision:
// a = pi / sqrt(-ln(eps / 2)), c = 2a / pi.
const ZA_A: f64 = 0.518_321_480_430_085_9;
const ZA_A2: f64 = 0.268_657_157_075_235_95;
const ZA_C: f64 = 0.329_973_702_884_629_07;

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`.
///
/// In the lower half-plane the value grows like `2 exp(-z^2)`; it is finite
/// whenever that factor is representable.
pub fn faddeeva_w(z: Complex) -> Complex {
    if z.im >= 0.0 {
        return w_upper(z);
    }
    // w(z) = 2 exp(-z^2) - w(-z)
    2.0 * exp_neg_square(z) - w_upper(-z)
}

/// `exp(-z^2)` with the real exponent formed as `(y - x)(y + x)`.
fn exp_neg_square(z: Complex) -> Complex {
    let (x, y) = (z.re, z.im);
    let mag = ((y - x) * (y + x)).exp();
    let phase = -2.0 * x * y;
    Complex::new(mag * phase.cos(), mag * phase.sin())
}

fn w_upper(z: Complex) -> Complex {
    let x = z.re.abs();
    let y = z.im;
    if x * x + y * y < 0.25 {
        return w_taylor(z);
    }
    if y > 5.0 || (x > 6.0 && (y > 0.1 || (x > 8.0 && y > 1e-10) || x > 28.0)) {
        return w_continued_fraction(z);
    }
    if x < 10.0 {
        w_exponential_sums(z)
    } else {
        w_near_real_axis(z)
    }
}

/// `w(z) = sum_n (iz)^n / Gamma(n/2 + 1)`, used for |z| < 1/2.
fn w_taylor(z: Complex) -> Complex {
    let iz = Complex::new(-z.im, z.re);
    // c_n = 1 / Gamma(n/2 + 1)
    let mut c_even = 1.0;
    let mut c_odd = 2.0 * FRAC_1_SQRT_PI;
    let mut power = Complex::new(1.0, 0.0);
    let mut sum = Complex::new(0.0, 0.0);
    for n in 0..40u32 {
        let c = if n % 2 == 0 { c_even } else { c_odd };
        let term = power * c;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
        if n % 2 == 0 {
            c_even /= f64::from(n / 2 + 1);
        } else {
            c_odd /= f64::from(n / 2) + 1.5;
        }
        power *= iz;
    }
    sum
}

/// Laplace continued fraction, `w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - ...)))`.
fn w_continued_fraction(z: Complex) -> Complex {
    let x = z.re.abs();
    let y = z.im;
    let terms = (4.0 + 14.0 / (0.08254 * x + 0.1421 * y + 0.2023)).floor() + 6.0;
    let mut t = z;
    let mut k = 0.5 * (terms - 1.0);
    while k > 0.4 {
        t = z - k / t;
        k -= 0.5;
    }
    Complex::new(0.0, FRAC_1_SQRT_PI) / t
}

/// Zaghloul-Ali exponentially convergent sums; valid for 0 <= y <= 5, |x| < 10.
fn w_exponential_sums(z: Complex) -> Complex {
    let xs = z.re;
    let x = xs.abs();
    let y = z.im;

    let expx2 = (-x * x).exp();
    let (mut sum1, mut sum2, mut sum3, mut sum45) = (0.0, 0.0, 0.0, 0.0);
    let mut prod_p = 1.0;
    let mut prod_m = 1.0;

    if x < 5e-4 {
        // sum5 - sum4 carries a sinh that cancels for tiny x; expand it.
        let ax2 = 2.0 * ZA_A * x;
        let exp_p = 1.0 + ax2 * (1.0 + ax2 * (0.5 + ax2 / 6.0));
        let exp_m = 1.0 - ax2 * (1.0 - ax2 * (0.5 - ax2 / 6.0));
        for n in 1..200u32 {
            let nf = f64::from(n);
            let coef = (-ZA_A2 * nf * nf).exp() * expx2 / (ZA_A2 * nf * nf + y * y);
            prod_p *= exp_p;
            prod_m *= exp_m;
            sum1 += coef;
            sum2 += coef * prod_m;
            sum3 += coef * prod_p;
            sum45 += coef * 2.0 * ZA_A * nf * sinh_small(2.0 * ZA_A * nf * x);
            if coef * prod_p < 1e-17 * sum3 {
                break;
            }
        }
    } else {
        let exp_p = (2.0 * ZA_A * x).exp();
        let exp_m = 1.0 / exp_p;
        let (mut sum4, mut sum5) = (0.0, 0.0);
        for n in 1..200u32 {
            let nf = f64::from(n);
            let coef = (-ZA_A2 * nf * nf).exp() * expx2 / (ZA_A2 * nf * nf + y * y);
            prod_p *= exp_p;
            prod_m *= exp_m;
            sum1 += coef;
            sum2 += coef * prod_m;
            sum4 += coef * prod_m * ZA_A * nf;
            sum3 += coef * prod_p;
            sum5 += coef * prod_p * ZA_A * nf;
            if coef * prod_p * ZA_A * nf < 1e-17 * sum5 {
                break;
            }
        }
        sum45 = sum5 - sum4;
    }

    let expx2_erfcx_y = expx2 * erfcx(y);
    let sinxy = (xs * y).sin();
    let sin2xy = (2.0 * xs * y).sin();
    let cos2xy = (2.0 * xs * y).cos();
    let coef1 = expx2_erfcx_y - ZA_C * y * sum1;
    let coef2 = ZA_C * xs * expx2;
    let re = coef1 * cos2xy + coef2 * sinxy * sinc(xs * y, sinxy) + 0.5 * ZA_C * y * (sum2 + sum3);
    let im = coef2 * sinc(2.0 * xs * y, sin2xy) - coef1 * sin2xy
        + 0.5 * ZA_C * sum45.copysign(xs);
    Complex::new(re, im)
}

/// Just above the real axis with |x| >= 10: first-order expansion in y around
/// `w(x) = exp(-x^2) + (2i/sqrt(pi)) D(x)`, with Dawson's integral from its
/// asymptotic series.
fn w_near_real_axis(z: Complex) -> Complex {
    let x = z.re;
    let y = z.im;
    let wx = Complex::new((-x * x).exp(), 2.0 * FRAC_1_SQRT_PI * dawson_asymptotic(x));
    // w'(x) = -2x w(x) + 2i/sqrt(pi)
    let dw = -2.0 * x * wx + Complex::new(0.0, 2.0 * FRAC_1_SQRT_PI);
    wx + Complex::new(0.0, y) * dw
}

/// Dawson's integral for |x| >= 10 from `D(x) ~ (1/2x) sum (2k-1)!! / (2x^2)^k`.
fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200u32 {
        term *= f64::from(2 * k - 1) * inv;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * x)
}

fn sinc(x: f64, sinx: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        sinx / x
    }
}

fn sinh_small(x: f64) -> f64 {
    let x2 = x * x;
    x * (1.0 + x2 * (1.0 / 6.0 + x2 / 120.0))
}

/// `sin(pi x)` with the argument reduced exactly, so values near integers
/// keep full relative precision.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (std::f64::consts::PI * r).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// `1 - cos(pi x) = 2 sin^2(pi x / 2)`, accurate near even integers.
pub fn one_minus_cos_pi(x: f64) -> f64 {
    let s = sin_pi(0.5 * x);
    2.0 * s * s
}

/// Scaled real complementary error function `exp(y^2) erfc(y)` for y >= 0.
pub fn erfcx(y: f64) -> f64 {
    let hi = y * y;
    let lo = y.mul_add(y, -hi);
    hi.exp() * (1.0 + lo) * libm::erfc(y)
}

/// `erfc(z) = exp(-z^2) w(iz)`, restricted to |Im z| <= 12.
pub fn erfc_complex(z: Complex) -> Result<Complex> {
    if !(z.im.abs() <= ERFC_IM_LIMIT) || !z.re.is_finite() {
        return Err(Error::OverflowDomain {
            re: z.re,
            im: z.im,
            limit: ERFC_IM_LIMIT,
        });
    }
    if z.re < 0.0 {
        return Ok(Complex::new(2.0, 0.0) - erfc_upper(-z));
    }
    Ok(erfc_upper(z))
}

// Re z >= 0 keeps exp(-z^2) bounded by exp(y^2).
fn erfc_upper(z: Complex) -> Complex {
    let iz = Complex::new(-z.im, z.re);
    exp_neg_square(z) * faddeeva_w(iz)
}

/// `erf(z) = 1 - erfc(z)`, with a Maclaurin series near the origin.
pub fn erf_complex(z: Complex) -> Result<Complex> {
    if z.norm() < 0.5 {
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        for n in 1..40u32 {
            term *= -z2 / f64::from(n);
            let contribution = term / f64::from(2 * n + 1);
            sum += contribution;
            if contribution.norm() < 1e-18 {
                break;
            }
        }
        return Ok(sum * (2.0 * FRAC_1_SQRT_PI));
    }
    Ok(Complex::new(1.0, 0.0) - erfc_complex(z)?)
}

/// Response kernel `K(a, g) = exp(-a^2) { Im[exp(2iga) erf(g + ia)] - sin(2ga) }`,
/// evaluated as `-exp(-g^2) Im w(-a + ig)`.
///
/// `a` is an image half-distance and `g = Ωσ`, both in σ units.
pub fn response_kernel(a: f64, gap: f64) -> f64 {
    -(-gap * gap).exp() * faddeeva_w(Complex::new(-a, gap)).im
}

/// The unscaled form of [`response_kernel`]; overflows for `a > 12`.
pub fn response_kernel_direct(a: f64, gap: f64) -> Result<f64> {
    let erf = erf_complex(Complex::new(gap, a))?;
    let phase = Complex::from_polar(1.0, 2.0 * gap * a);
    Ok((-a * a).exp() * ((phase * erf).im - (2.0 * gap * a).sin()))
}

/// `lim_{a->0} K(a, g) / a = (2/sqrt(pi)) exp(-g^2) - 2 g erfc(g)`.
pub fn kernel_ratio_limit(gap: f64) -> f64 {
    2.0 * FRAC_1_SQRT_PI * (-gap * gap).exp() - 2.0 * gap * libm::erfc(gap)
}

/// `K(a, g) / a`, switching to the analytic limit for `a < SMALL_ARGUMENT`.
pub fn kernel_ratio(a: f64, gap: f64) -> f64 {
    if a < SMALL_ARGUMENT {
        kernel_ratio_limit(gap)
    } else {
        response_kernel(a, gap) / a
    }
}

/// Auxiliary correlation function per λ²,
/// `f(z) = -i exp(-g^2 - z^2) erfc(iz) / (8 sqrt(pi) z) = -i exp(-g^2) w(-z) / (8 sqrt(pi) z)`.
pub fn aux_f(z: f64, gap: f64) -> Result<Complex> {
    if !(z > EPS_DIV) {
        return Err(Error::DivergentArgument { z });
    }
    let w = faddeeva_w(Complex::new(-z, 0.0));
    let scale = (-gap * gap).exp() / (8.0 * SQRT_PI * z);
    // -i * w
    Ok(Complex::new(w.im, -w.re) * scale)
}
