//! Adaptive quadrature, principal-value integration, and bracketed
//! root/extremum search.
//!
//! The integrator is a globally adaptive 21-point Gauss-Kronrod scheme. It
//! integrates `N` real components at once on shared subdivision points, which
//! is how complex integrands are handled. Error estimates are the plain
//! Kronrod-minus-Gauss difference summed over panels.

use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};

/// Default absolute tolerance for production integrals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default absolute tolerance for principal-value integrals.
pub const PV_TOL: f64 = 1e-8;
/// Panel budget per adaptive integration.
pub const MAX_PANELS: usize = 4000;
/// Default number of pre-scan points for root searches.
pub const DEFAULT_SCAN_POINTS: usize = 512;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Component-wise result of a multi-valued integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResultN<const N: usize> {
    pub value: [f64; N],
    pub error_estimate: [f64; N],
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("bracket [{lo}, {hi}] must satisfy lo < hi")));
        }
        Ok(Bracket { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

impl<const N: usize> Panel<N> {
    fn priority(&self) -> f64 {
        self.error.iter().copied().fold(0.0, f64::max)
    }
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.priority() == other.priority()
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.priority().total_cmp(&other.priority())
    }
}

fn gauss_kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Panel<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    for c in 0..N {
        kronrod[c] = WGK[10] * fc[c];
    }
    for (j, (&x, &wk)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for c in 0..N {
            let s = f1[c] + f2[c];
            kronrod[c] += wk * s;
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for c in 0..N {
        value[c] = kronrod[c] * half;
        error[c] = ((kronrod[c] - gauss[c]) * half).abs();
    }
    Panel { a, b, value, error }
}

/// Adaptive integration of an `N`-component integrand over the intervals
/// defined by consecutive `breakpoints`, to absolute tolerance `tol` per
/// component.
pub fn integrate_breakpoints<const N: usize, F>(
    mut f: F,
    breakpoints: &[f64],
    tol: f64,
) -> Result<QuadratureResultN<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    if breakpoints.len() < 2 || !(tol > 0.0) {
        return Err(invalid("integration needs two breakpoints and tol > 0"));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        if !(w[0] < w[1]) {
            return Err(invalid(format!("breakpoints must increase: {} !< {}", w[0], w[1])));
        }
        heap.push(gauss_kronrod(&mut f, w[0], w[1]));
        evaluations += 21;
    }

    let totals = |heap: &BinaryHeap<Panel<N>>| {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        for p in heap.iter() {
            for c in 0..N {
                value[c] += p.value[c];
                error[c] += p.error[c];
            }
        }
        (value, error)
    };

    loop {
        let (value, error) = totals(&heap);
        if value.iter().chain(&error).any(|v| !v.is_finite()) {
            return Err(Error::ToleranceNotMet {
                tolerance: tol,
                estimate: f64::INFINITY,
                evaluations,
            });
        }
        let converged = (0..N).all(|c| error[c] <= tol.max(50.0 * f64::EPSILON * value[c].abs()));
        if converged {
            return Ok(QuadratureResultN {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if heap.len() >= MAX_PANELS || !(worst.a < mid && mid < worst.b) {
            heap.push(worst);
            let (_, error) = totals(&heap);
            return Err(Error::ToleranceNotMet {
                tolerance: tol,
                estimate: error.iter().copied().fold(0.0, f64::max),
                evaluations,
            });
        }
        heap.push(gauss_kronrod(&mut f, worst.a, mid));
        heap.push(gauss_kronrod(&mut f, mid, worst.b));
        evaluations += 42;
    }
}

/// Adaptive integration of a scalar function over a finite interval.
pub fn integrate<F>(mut f: F, bracket: Bracket, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_breakpoints(|x| [f(x)], &[bracket.lo, bracket.hi], tol)?;
    Ok(scalar(r))
}

fn scalar(r: QuadratureResultN<1>) -> QuadratureResult {
    QuadratureResult {
        value: r.value[0],
        error_estimate: r.error_estimate[0],
        evaluations: r.evaluations,
    }
}

/// Options for integrals over `[0, ∞)` whose integrand decays at least like
/// `exp(-tail_rate * ζ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiInfinite {
    pub tail_rate: f64,
    pub tol: f64,
    /// Width of a sharp peak at the origin, if any. Forces breakpoints at
    /// `peak_width * 10^k` so the peak is resolved before adaptivity starts.
    pub peak_width: Option<f64>,
}

impl SemiInfinite {
    pub fn new(tail_rate: f64, tol: f64) -> Self {
        SemiInfinite {
            tail_rate,
            tol,
            peak_width: None,
        }
    }

    pub fn with_peak(mut self, width: Option<f64>) -> Self {
        self.peak_width = width;
        self
    }

    /// Truncation point where the tail bound falls below `tol / 10`.
    pub fn upper_limit(&self) -> f64 {
        ((1.0 / self.tol).ln() + 5.0) / self.tail_rate
    }

    fn breakpoints(&self) -> Result<Vec<f64>> {
        if !(self.tail_rate > 0.0 && self.tail_rate.is_finite()) || !(self.tol > 0.0) {
            return Err(invalid("semi-infinite integration needs tail_rate > 0 and tol > 0"));
        }
        let top = self.upper_limit();
        let mut points = vec![0.0];
        if let Some(width) = self.peak_width.filter(|w| *w > 0.0 && w.is_finite()) {
            let mut edge = width;
            while edge < top {
                points.push(edge);
                edge *= 10.0;
            }
        }
        points.push(top);
        Ok(points)
    }
}

/// `∫_0^∞ f(ζ) dζ` for an integrand decaying like `exp(-tail_rate ζ)`.
pub fn integrate_semi_infinite<F>(mut f: F, tail_rate: f64, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    let opts = SemiInfinite::new(tail_rate, tol);
    let r = integrate_breakpoints(|x| [f(x)], &opts.breakpoints()?, tol)?;
    Ok(scalar(r))
}

/// Multi-component semi-infinite integration with shared subdivision points.
pub fn integrate_semi_infinite_n<const N: usize, F>(
    f: F,
    opts: &SemiInfinite,
) -> Result<QuadratureResultN<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    integrate_breakpoints(f, &opts.breakpoints()?, opts.tol)
}

/// Domain of a principal-value integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PvDomain {
    /// A finite interval with `0 <= lo`.
    Finite(Bracket),
    /// `[0, ∞)`.
    HalfLine,
    /// `(-∞, ∞)`; folded onto the half-line.
    WholeLine,
}

/// Poles closer than this (relative to their magnitude) are bridged by linear
/// interpolation of the subtracted integrand.
pub const PV_EXCISION: f64 = 1e-6;

/// `PV ∫ numerator(s) / Π_k (s² - p_k²) ds` over `domain`, for simple poles
/// `p_k > 0`.
///
/// Uses partial fractions `1/Π(s² - p_k²) = Σ A_k / (s² - p_k²)` and
/// subtracts `numerator(p_k)` at each pole so the remaining integrand is
/// smooth. The subtracted pieces are added back analytically; over the half
/// line each of them is zero. The half-line part beyond the largest pole is
/// mapped onto a finite interval by `s = S / t`, so the numerator only needs
/// to be integrable, not exponentially decaying.
pub fn integrate_pv<F>(numerator: F, poles: &[f64], domain: PvDomain, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if let PvDomain::WholeLine = domain {
        return pv_impl(&|s| numerator(s) + numerator(-s), poles, PvDomain::HalfLine, tol);
    }
    pv_impl(&numerator, poles, domain, tol)
}

fn pv_impl(numerator: &dyn Fn(f64) -> f64, poles: &[f64], domain: PvDomain, tol: f64) -> Result<QuadratureResult> {
    if poles.is_empty() {
        return Err(invalid("principal-value integral needs at least one pole"));
    }
    let mut sorted = poles.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &p in &sorted {
        if !(p > 0.0 && p.is_finite()) {
            return Err(invalid(format!("pole {p} must be positive and finite")));
        }
    }
    let width = |p: f64| PV_EXCISION * p.max(1.0);
    for w in sorted.windows(2) {
        if w[1] - w[0] <= 10.0 * width(w[1]) {
            return Err(Error::PolesTooClose { a: w[0], b: w[1] });
        }
    }
    if let PvDomain::Finite(b) = domain {
        if b.lo < 0.0 {
            return Err(invalid("finite principal-value domain must have lo >= 0"));
        }
        for &p in &sorted {
            if !(p - b.lo > width(p) && b.hi - p > width(p)) {
                return Err(invalid(format!("pole {p} is not strictly inside [{}, {}]", b.lo, b.hi)));
            }
        }
    }

    let coefficients: Vec<f64> = sorted
        .iter()
        .map(|&p| {
            sorted
                .iter()
                .filter(|&&q| q != p)
                .fold(1.0, |acc, &q| acc / (p * p - q * q))
        })
        .collect();
    let at_poles: Vec<f64> = sorted.iter().map(|&p| numerator(p)).collect();

    let subtracted = |s: f64| -> f64 {
        sorted
            .iter()
            .zip(&coefficients)
            .zip(&at_poles)
            .map(|((&p, &a), &np)| a * (numerator(s) - np) / (s * s - p * p))
            .sum()
    };
    let smooth = |s: f64| -> f64 {
        if let Some(&p) = sorted.iter().find(|&&p| (s - p).abs() < width(p)) {
            let h = width(p);
            let left = subtracted(p - h);
            let right = subtracted(p + h);
            left + (s - (p - h)) * (right - left) / (2.0 * h)
        } else {
            subtracted(s)
        }
    };

    let mut breakpoints = Vec::new();
    let analytic;
    match domain {
        PvDomain::Finite(b) => {
            breakpoints.push(b.lo);
            breakpoints.extend(sorted.iter().copied());
            breakpoints.push(b.hi);
            analytic = sorted
                .iter()
                .zip(&coefficients)
                .zip(&at_poles)
                .map(|((&p, &a), &np)| {
                    let prim = |s: f64| ((s - p).abs().ln() - (s + p).ln()) / (2.0 * p);
                    a * np * (prim(b.hi) - prim(b.lo))
                })
                .sum::<f64>();
        }
        PvDomain::HalfLine => {
            breakpoints.push(0.0);
            breakpoints.extend(sorted.iter().copied());
            let top = 2.0 * sorted[sorted.len() - 1] + 1.0;
            breakpoints.push(top);
            analytic = 0.0;
        }
        PvDomain::WholeLine => unreachable!(),
    }

    let inner = integrate_breakpoints(|s| [smooth(s)], &breakpoints, 0.5 * tol)?;
    let mut value = inner.value[0] + analytic;
    let mut error = inner.error_estimate[0];
    let mut evaluations = inner.evaluations;
    if let PvDomain::HalfLine = domain {
        let top = *breakpoints.last().expect("non-empty");
        // ∫_S^∞ g(s) ds = ∫_0^1 g(S/t) S/t² dt
        let tail = integrate_breakpoints(
            |t| {
                if t <= 0.0 {
                    [0.0]
                } else {
                    [smooth(top / t) * top / (t * t)]
                }
            },
            &[0.0, 1.0],
            0.5 * tol,
        )?;
        value += tail.value[0];
        error += tail.error_estimate[0];
        evaluations += tail.evaluations;
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
    })
}

/// Brent's method on a sign-changing bracket; falls back to bisection
/// whenever interpolation misbehaves.
pub fn find_root_bracketed<F>(mut objective: F, bracket: Bracket, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (objective(a), objective(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: bracket.lo,
            hi: bracket.hi,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = objective(b);
    }
    Ok(b)
}

/// Scans `n` evenly spaced points on `bracket` and returns the sub-bracket
/// holding the last transition from a positive to a non-positive value.
/// Points where `objective` returns `None` are skipped; the bracket then spans
/// the skipped stretch only if both neighbours are defined.
pub fn last_sign_change<F>(mut objective: F, bracket: Bracket, n: usize) -> Result<Option<Bracket>>
where
    F: FnMut(f64) -> Option<f64>,
{
    if n < 2 {
        return Err(invalid("scan needs at least two points"));
    }
    let step = bracket.width() / (n - 1) as f64;
    let mut previous: Option<(f64, f64)> = None;
    let mut last = None;
    for i in 0..n {
        let x = if i + 1 == n { bracket.hi } else { bracket.lo + step * i as f64 };
        match objective(x) {
            Some(v) if v.is_finite() => {
                if let Some((px, pv)) = previous {
                    if pv > 0.0 && v <= 0.0 {
                        last = Some(Bracket { lo: px, hi: x });
                    }
                }
                previous = Some((x, v));
            }
            _ => previous = None,
        }
    }
    Ok(last)
}

/// Golden-section minimization with a post-hoc unimodality check on a
/// uniform sample of the bracket.
pub fn minimize_scalar<F>(mut objective: F, bracket: Bracket, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    const SAMPLES: usize = 25;
    let samples: Vec<f64> = (0..SAMPLES)
        .map(|i| objective(bracket.lo + bracket.width() * i as f64 / (SAMPLES - 1) as f64))
        .collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotUnimodal {
            lo: bracket.lo,
            hi: bracket.hi,
        });
    }
    let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slack = 1e-9 * scale;
    let argmin = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let descending = samples[..=argmin].windows(2).all(|w| w[1] <= w[0] + slack);
    let ascending = samples[argmin..].windows(2).all(|w| w[1] >= w[0] - slack);
    if !(descending && ascending) {
        return Err(Error::NotUnimodal {
            lo: bracket.lo,
            hi: bracket.hi,
        });
    }

    // Restrict to the sample cell pair around the discrete minimum.
    let step = bracket.width() / (SAMPLES - 1) as f64;
    let mut a = (bracket.lo + step * (argmin as f64 - 1.0)).max(bracket.lo);
    let mut b = (bracket.lo + step * (argmin as f64 + 1.0)).min(bracket.hi);
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while (b - a) > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    let mid = 0.5 * (a + b);
    // Endpoint minima: golden section cannot land exactly on the boundary.
    let candidates = [(mid, objective(mid)), (bracket.lo, samples[0]), (bracket.hi, samples[SAMPLES - 1])];
    let best = candidates
        .iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("non-empty");
    Ok(best.0)
}
