//! Concurrence, harvesting range, ν extrema and parameter sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::{correlation, x_flat, CorrelationBreakdown};
use crate::error::{invalid, Error, Result};
use crate::geometry::{radial_pair, Alignment, ConeParameter, PairConfig};
use crate::quadrature::{find_root_bracketed, last_sign_change, minimize_scalar, Bracket, DEFAULT_SCAN_POINTS};
use crate::response::{p_detector, p_flat, ResponseBreakdown};
use crate::special::{erfcx, faddeeva_w, Complex, FRAC_1_SQRT_PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrenceResult {
    pub p_a: f64,
    pub p_b: f64,
    pub abs_x: f64,
    pub geo_mean_p: f64,
    pub concurrence: f64,
    pub diverged: bool,
}

impl ConcurrenceResult {
    fn new(p_a: f64, p_b: f64, abs_x: f64) -> Self {
        let geo_mean_p = (p_a * p_b).sqrt();
        ConcurrenceResult {
            p_a,
            p_b,
            abs_x,
            geo_mean_p,
            concurrence: 2.0 * (abs_x - geo_mean_p).max(0.0),
            diverged: false,
        }
    }

    /// `|X| - sqrt(P_A P_B)`; positive exactly when harvesting succeeds.
    pub fn margin(&self) -> f64 {
        self.abs_x - self.geo_mean_p
    }
}

/// Everything computed for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEvaluation {
    pub response_a: ResponseBreakdown,
    pub response_b: ResponseBreakdown,
    pub correlation: CorrelationBreakdown,
    pub result: ConcurrenceResult,
}

pub fn evaluate(config: &PairConfig, nu: ConeParameter) -> Result<PairEvaluation> {
    let (rho_a, rho_b) = radial_pair(config)?;
    let correlation = correlation(config, nu)?;
    let response_a = p_detector(config.alignment, rho_a, nu, config.gap)?;
    let response_b = if rho_b == rho_a {
        response_a.clone()
    } else {
        p_detector(config.alignment, rho_b, nu, config.gap)?
    };
    let result = ConcurrenceResult::new(response_a.total, response_b.total, correlation.total.norm());
    Ok(PairEvaluation {
        response_a,
        response_b,
        correlation,
        result,
    })
}

/// Concurrence per λ² for a detector pair.
pub fn concurrence(config: &PairConfig, nu: ConeParameter) -> Result<ConcurrenceResult> {
    Ok(evaluate(config, nu)?.result)
}

/// Flat-space concurrence from its closed form,
/// `max{0, (e^{-g²}/2√π)[e^{-d²/4}|erfc(id/2)|/d + e^{g²} g erfc(g) - 1/√π]}`.
pub fn concurrence_flat(d: f64, gap: f64) -> Result<f64> {
    if !(d > 2.0 * crate::special::EPS_DIV) {
        return Err(Error::DivergentOverlap {
            image: None,
            argument: 0.5 * d,
        });
    }
    // e^{-d²/4} erfc(id/2) = w(-d/2)
    let scaled = faddeeva_w(Complex::new(-0.5 * d, 0.0)).norm();
    let bracket = scaled / d + gap * erfcx(gap) - FRAC_1_SQRT_PI;
    Ok(((-gap * gap).exp() * 0.5 * FRAC_1_SQRT_PI * bracket).max(0.0))
}

/// Scan settings for [`d_max`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DmaxScan {
    pub d_hi: f64,
    pub grid_n: usize,
    pub tol: f64,
}

impl Default for DmaxScan {
    fn default() -> Self {
        DmaxScan {
            d_hi: 10.0,
            grid_n: DEFAULT_SCAN_POINTS,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DmaxResult {
    /// Largest separation with positive concurrence, if any.
    pub d_max: Option<f64>,
    /// True when the concurrence is still positive at the top of the scan.
    pub capped: bool,
    /// Scan points skipped because a detector overlapped an image.
    pub skipped: Vec<f64>,
}

/// Last sign change of `margin` over `[lo, hi]`, refined to `tol`.
fn terminal_root<F>(margin: F, lo: f64, hi: f64, grid_n: usize, tol: f64) -> Result<DmaxResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let bracket = Bracket::new(lo, hi)?;
    let mut skipped = Vec::new();
    let mut failure = None;
    let mut last_defined = None;
    let scan = last_sign_change(
        |x| match margin(x) {
            Ok(v) => {
                last_defined = Some(v);
                Some(v)
            }
            Err(e) if e.is_divergence() => {
                skipped.push(x);
                None
            }
            Err(e) => {
                failure.get_or_insert(e);
                None
            }
        },
        bracket,
        grid_n,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    if last_defined.is_some_and(|v| v > 0.0) {
        return Ok(DmaxResult {
            d_max: Some(hi),
            capped: true,
            skipped,
        });
    }
    let d_max = match scan {
        None => None,
        Some(b) => {
            let mut inner = None;
            let root = find_root_bracketed(
                |x| match margin(x) {
                    Ok(v) => v,
                    Err(e) => {
                        inner.get_or_insert(e);
                        f64::NAN
                    }
                },
                b,
                tol,
            );
            if let Some(e) = inner {
                return Err(e);
            }
            Some(root?)
        }
    };
    Ok(DmaxResult {
        d_max,
        capped: false,
        skipped,
    })
}

/// Largest separation at which the pair still harvests entanglement.
pub fn d_max(alignment: Alignment, nu: ConeParameter, l: f64, gap: f64, scan: &DmaxScan) -> Result<DmaxResult> {
    if !(scan.d_hi > 0.0 && scan.d_hi.is_finite()) || scan.grid_n < 2 || !(scan.tol > 0.0) {
        return Err(invalid("d_max scan needs d_hi > 0, grid_n >= 2 and tol > 0"));
    }
    let lo = if alignment == Alignment::OrthogonalOppositeSides {
        2.0 * l
    } else {
        scan.d_hi / scan.grid_n as f64
    };
    if lo >= scan.d_hi {
        return Err(invalid(format!("scan start {lo} is not below d_hi = {}", scan.d_hi)));
    }
    if alignment == Alignment::Flat {
        let margin = |d: f64| -> Result<f64> { Ok(x_flat(d, gap)?.norm() - p_flat(gap)) };
        return terminal_root(margin, lo, scan.d_hi, scan.grid_n, scan.tol);
    }
    let margin = |d: f64| -> Result<f64> {
        let config = PairConfig::new(alignment, l, d, gap)?;
        Ok(concurrence(&config, nu)?.margin())
    };
    terminal_root(margin, lo, scan.d_hi, scan.grid_n, scan.tol)
}

/// For opposite sides, the largest string distance `l` at which a
/// symmetric pair (d = 2l) still harvests; beyond it `d_max(l) < 2l`.
pub fn opposite_terminal_distance(
    nu: ConeParameter,
    gap: f64,
    l_hi: f64,
    grid_n: usize,
    tol: f64,
) -> Result<DmaxResult> {
    let margin = |l: f64| -> Result<f64> {
        let config = PairConfig::new(Alignment::OrthogonalOppositeSides, l, 2.0 * l, gap)?;
        Ok(concurrence(&config, nu)?.margin())
    };
    terminal_root(margin, l_hi / grid_n as f64, l_hi, grid_n, tol)
}

/// Quantity extremized over ν by [`nu_extremum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NuObjective {
    /// Minimum of `|X| - P_A` for the configured pair.
    CorrelationMinusResponse,
    /// Maximum of the concurrence.
    Concurrence,
}

impl NuObjective {
    pub fn name(&self) -> &'static str {
        match self {
            NuObjective::CorrelationMinusResponse => "correlation-minus-response",
            NuObjective::Concurrence => "concurrence",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "correlation-minus-response" | "gap" => Ok(NuObjective::CorrelationMinusResponse),
            "concurrence" => Ok(NuObjective::Concurrence),
            other => Err(invalid(format!("unknown objective '{other}'"))),
        }
    }
}

/// Extremal ν in `bracket` for the selected objective.
pub fn nu_extremum(objective: NuObjective, config: &PairConfig, bracket: Bracket, tol: f64) -> Result<f64> {
    let config = *config;
    let value = move |nu: ConeParameter| -> Result<f64> {
        let r = concurrence(&config, nu)?;
        Ok(match objective {
            NuObjective::CorrelationMinusResponse => r.abs_x - r.p_a,
            NuObjective::Concurrence => -r.concurrence,
        })
    };
    nu_minimum_by(value, bracket, tol)
}

/// Minimizes an arbitrary function of ν over `bracket`.
pub fn nu_minimum_by<F>(objective: F, bracket: Bracket, tol: f64) -> Result<f64>
where
    F: Fn(ConeParameter) -> Result<f64>,
{
    let lo = ConeParameter::new(bracket.lo)?;
    let hi = ConeParameter::new(bracket.hi)?;
    let bracket = Bracket::new(lo.value(), hi.value())?;
    let mut failure = None;
    let nu = minimize_scalar(
        |v| match ConeParameter::new(v).and_then(&objective) {
            Ok(x) => x,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        bracket,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    nu
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    L,
    D,
    Nu,
    Gap,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::L => "l",
            Axis::D => "d",
            Axis::Nu => "nu",
            Axis::Gap => "gap",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            Axis::L | Axis::D => "sigma",
            Axis::Nu => "1",
            Axis::Gap => "1/sigma",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "l" => Ok(Axis::L),
            "d" => Ok(Axis::D),
            "nu" => Ok(Axis::Nu),
            "gap" => Ok(Axis::Gap),
            other => Err(invalid(format!("unknown sweep axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

pub const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub spacing: Spacing,
    pub alignments: Vec<Alignment>,
    pub nu: f64,
    pub l: f64,
    pub d: f64,
    pub gap: f64,
    /// Tie the separation to the string distance, d = ratio·l.
    pub d_over_l: Option<f64>,
}

impl SweepSpec {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(invalid(format!("sweep bounds [{}, {}] must satisfy lo < hi", self.lo, self.hi)));
        }
        if !(2..=MAX_SWEEP_POINTS).contains(&self.n) {
            return Err(invalid(format!("sweep size {} must be in [2, {MAX_SWEEP_POINTS}]", self.n)));
        }
        let last = (self.n - 1) as f64;
        match self.spacing {
            Spacing::Linear => Ok((0..self.n)
                .map(|i| if i + 1 == self.n { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / last })
                .collect()),
            Spacing::Log => {
                if !(self.lo > 0.0) {
                    return Err(invalid("log sweep needs lo > 0"));
                }
                let (a, b) = (self.lo.ln(), self.hi.ln());
                Ok((0..self.n)
                    .map(|i| if i + 1 == self.n { self.hi } else { (a + (b - a) * i as f64 / last).exp() })
                    .collect())
            }
        }
    }

    fn point(&self, alignment: Alignment, x: f64) -> (PairConfig, f64) {
        let (mut l, mut d, mut gap, mut nu) = (self.l, self.d, self.gap, self.nu);
        match self.axis {
            Axis::L => l = x,
            Axis::D => d = x,
            Axis::Nu => nu = x,
            Axis::Gap => gap = x,
        }
        if let Some(ratio) = self.d_over_l {
            d = ratio * l;
        }
        (PairConfig { alignment, l, d, gap }, nu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alignment: Alignment,
    pub param: f64,
    pub p_a: Option<f64>,
    pub p_b: Option<f64>,
    pub abs_x: Option<f64>,
    pub concurrence: Option<f64>,
    pub diverged: bool,
    /// Error kind for rows that could not be computed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: Axis,
    pub unit: &'static str,
    pub alignments: Vec<Alignment>,
    pub rows: Vec<SweepRow>,
}

fn sweep_row(alignment: Alignment, param: f64, config: PairConfig, nu: f64) -> SweepRow {
    let outcome = PairConfig::new(config.alignment, config.l, config.d, config.gap)
        .and_then(|c| Ok((c, ConeParameter::new(nu)?)))
        .and_then(|(c, nu)| concurrence(&c, nu));
    match outcome {
        Ok(r) => SweepRow {
            alignment,
            param,
            p_a: Some(r.p_a),
            p_b: Some(r.p_b),
            abs_x: Some(r.abs_x),
            concurrence: Some(r.concurrence),
            diverged: false,
            error: None,
        },
        Err(e) => SweepRow {
            alignment,
            param,
            p_a: None,
            p_b: None,
            abs_x: None,
            concurrence: None,
            diverged: e.is_divergence(),
            error: Some(e.kind().to_string()),
        },
    }
}

/// Evaluates every alignment at every grid point. Rows are ordered by the
/// sweep axis, then by the order of `spec.alignments`; per-point failures
/// are recorded in the row.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.alignments.is_empty() {
        return Err(invalid("sweep needs at least one alignment"));
    }
    let grid = spec.grid()?;
    let jobs: Vec<(f64, Alignment)> = grid
        .iter()
        .flat_map(|&x| spec.alignments.iter().map(move |&a| (x, a)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(x, alignment)| {
            let (config, nu) = spec.point(alignment, x);
            sweep_row(alignment, x, config, nu)
        })
        .collect();
    Ok(SweepTable {
        axis: spec.axis,
        unit: spec.axis.unit(),
        alignments: spec.alignments.clone(),
        rows,
    })
}

/// d_max for each string distance in `ls`, computed in parallel.
pub fn d_max_curve(
    alignment: Alignment,
    nu: ConeParameter,
    gap: f64,
    ls: &[f64],
    scan: &DmaxScan,
) -> Vec<Result<DmaxResult>> {
    ls.par_iter().map(|&l| d_max(alignment, nu, l, gap, scan)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nu(v: f64) -> ConeParameter {
        ConeParameter::new(v).unwrap()
    }

    fn pair(a: Alignment, l: f64, d: f64, gap: f64) -> PairConfig {
        PairConfig::new(a, l, d, gap).unwrap()
    }

    #[test]
    fn parallel_at_origin_is_nu_times_flat() {
        let c = concurrence(&pair(Alignment::ParallelSameSide, 0.0, 0.5, 0.1), nu(3.0)).unwrap();
        let c0 = concurrence_flat(0.5, 0.1).unwrap();
        assert!(c0 > 0.0);
        assert!((c.concurrence - 3.0 * c0).abs() < 1e-8);
    }

    #[test]
    fn large_gap_leaves_almost_nothing() {
        // P falls off faster in the gap than |X|, so the margin stays
        // positive, but every term is of order e^{-9}
        let small_gap = concurrence_flat(0.5, 0.1).unwrap();
        for a in Alignment::ALL {
            let c = concurrence(&pair(a, 0.5, 4.0, 3.0), nu(3.0)).unwrap();
            assert!(c.abs_x < 1e-4 && c.p_a < 1e-5, "{a}");
            assert!(c.concurrence < 1e-4 * small_gap.max(1.0), "{a}: {}", c.concurrence);
        }
        let flat = concurrence_flat(4.0, 3.0).unwrap();
        assert!(flat > 0.0 && flat < 1e-5);
    }

    #[test]
    fn unit_nu_matches_flat_closed_form() {
        for &l in &[0.0, 0.4, 3.0] {
            let c = concurrence(&pair(Alignment::ParallelSameSide, l, 0.5, 0.1), nu(1.0)).unwrap();
            let flat = concurrence(&pair(Alignment::Flat, l, 0.5, 0.1), nu(1.0)).unwrap();
            assert!((c.concurrence - concurrence_flat(0.5, 0.1).unwrap()).abs() < 1e-12);
            assert!((flat.concurrence - concurrence_flat(0.5, 0.1).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_closed_form_examples() {
        assert_eq!(concurrence_flat(20.0, 0.1).unwrap(), 0.0);
        let tiny = concurrence_flat(1e-6, 0.1).unwrap();
        assert!(tiny > 1e4);
        assert!(concurrence_flat(1e-11, 0.1).is_err());
    }

    #[test]
    fn flat_d_max_matches_dense_scan() {
        let r = d_max(Alignment::Flat, nu(1.0), 0.0, 0.1, &DmaxScan::default()).unwrap();
        let d = r.d_max.unwrap();
        // 4096-point dense scan of the closed form, refined by bisection
        let n = 4096;
        let mut last = 0.0;
        for i in 1..=n {
            let x = 10.0 * i as f64 / n as f64;
            if concurrence_flat(x, 0.1).unwrap() > 0.0 {
                last = x;
            }
        }
        let (mut a, mut b) = (last, last + 10.0 / n as f64);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if concurrence_flat(m, 0.1).unwrap() > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((d - a).abs() < 1e-6, "{d} vs {a}");
        assert!((d - 1.657_58).abs() < 1e-4);
    }

    #[test]
    fn parallel_d_max_below_flat() {
        let scan = DmaxScan::default();
        let flat = d_max(Alignment::Flat, nu(1.0), 0.0, 0.1, &scan).unwrap().d_max.unwrap();
        let par = d_max(Alignment::ParallelSameSide, nu(3.0), 0.5, 0.1, &scan).unwrap().d_max.unwrap();
        assert!(par < flat);
    }

    #[test]
    fn opposite_terminal_distance_example() {
        let r = opposite_terminal_distance(nu(3.0), 0.1, 4.0, 512, 1e-6).unwrap();
        let l0 = r.d_max.unwrap();
        assert!((l0 - 2.219).abs() < 0.02, "{l0}");
    }

    #[test]
    fn d_max_skips_divergent_points() {
        // for ν = 4 the symmetric start point d = 2l overlaps an image
        let r = d_max(Alignment::OrthogonalOppositeSides, nu(4.0), 0.5, 0.1, &DmaxScan::default()).unwrap();
        assert_eq!(r.skipped, vec![1.0]);
        assert!(r.d_max.is_some());
    }

    #[test]
    fn nu_extremum_examples() {
        let synthetic = nu_minimum_by(|v| Ok((v.value() - 5.0).powi(2)), Bracket::new(1.0, 9.0).unwrap(), 1e-8).unwrap();
        assert!((synthetic - 5.0).abs() < 1e-6);

        let config = pair(Alignment::ParallelSameSide, 0.1, 0.1, 0.1);
        let best = nu_extremum(NuObjective::Concurrence, &config, Bracket::new(1.1, 11.0).unwrap(), 1e-4).unwrap();
        assert_eq!(best, 11.0);
    }

    #[test]
    fn crossover_between_alignments() {
        let c = |a, d| concurrence(&pair(a, 0.1, d, 0.1), nu(2.0)).unwrap().concurrence;
        assert!(c(Alignment::ParallelSameSide, 0.1) > c(Alignment::OrthogonalSameSide, 0.1));
        assert!(c(Alignment::OrthogonalSameSide, 1.5) > c(Alignment::ParallelSameSide, 1.5));
    }

    #[test]
    fn sweep_orders_rows_and_flags_divergence() {
        let spec = SweepSpec {
            axis: Axis::L,
            lo: 0.5,
            hi: 1.5,
            n: 3,
            spacing: Spacing::Linear,
            alignments: vec![Alignment::OrthogonalOppositeSides],
            nu: 4.0,
            l: 0.0,
            d: 0.0,
            gap: 0.1,
            d_over_l: Some(2.0),
        };
        let table = sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows.iter().all(|r| r.diverged && r.concurrence.is_none()));
        assert_eq!(table.rows[0].error.as_deref(), Some("divergent_overlap"));
        let params: Vec<f64> = table.rows.iter().map(|r| r.param).collect();
        assert_eq!(params, vec![0.5, 1.0, 1.5]);
    }

    #[test]
    fn d_sweep_is_monotone_for_same_side_alignments() {
        let spec = SweepSpec {
            axis: Axis::D,
            lo: 0.05,
            hi: 3.0,
            n: 40,
            spacing: Spacing::Linear,
            alignments: vec![Alignment::ParallelSameSide, Alignment::OrthogonalSameSide],
            nu: 2.0,
            l: 0.1,
            d: 0.0,
            gap: 0.1,
            d_over_l: None,
        };
        let table = sweep(&spec).unwrap();
        for a in &spec.alignments {
            let values: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.alignment == *a)
                .map(|r| r.concurrence.unwrap())
                .filter(|&c| c > 0.0)
                .collect();
            assert!(values.len() > 5);
            assert!(values.windows(2).all(|w| w[1] < w[0]), "{a}");
        }
    }

    #[test]
    fn nu_sweep_at_origin_scales_flat() {
        let spec = SweepSpec {
            axis: Axis::Nu,
            lo: 1.0,
            hi: 6.0,
            n: 11,
            spacing: Spacing::Linear,
            alignments: vec![Alignment::ParallelSameSide],
            nu: 1.0,
            l: 0.0,
            d: 0.5,
            gap: 0.1,
            d_over_l: None,
        };
        let table = sweep(&spec).unwrap();
        let c0 = concurrence_flat(0.5, 0.1).unwrap();
        for r in &table.rows {
            assert!((r.concurrence.unwrap() - r.param * c0).abs() < 1e-7 * r.param, "{}", r.param);
            assert!((r.p_a.unwrap() - r.param * p_flat(0.1)).abs() < 1e-8 * r.param);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn concurrence_is_never_negative(
            a in 0usize..6, l in 0.01f64..4.0, extra in 0.01f64..5.0, v in 1.0f64..12.0, g in 0.0f64..2.0
        ) {
            let alignment = Alignment::ALL[a];
            let d = if alignment == Alignment::OrthogonalOppositeSides { 2.0 * l + extra } else { extra };
            let r = concurrence(&pair(alignment, l, d, g), nu(v)).unwrap();
            prop_assert!(r.concurrence >= 0.0 && r.concurrence.is_finite());
            prop_assert_eq!(r.concurrence, 2.0 * (r.abs_x - r.geo_mean_p).max(0.0));
        }
    }
}
