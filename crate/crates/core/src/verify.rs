//! Production-versus-oracle validation grid and analytic identity checks.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::{x_flat, x_string};
use crate::error::Result;
use crate::geometry::{Alignment, ConeParameter, PairConfig};
use crate::oracle::{self, OracleReport};
use crate::quadrature::{integrate_semi_infinite_n, SemiInfinite};
use crate::response::{p_flat, p_string};
use crate::special::{one_minus_cos_pi, sin_pi};

pub const P0_TOL: f64 = 1e-8;
pub const P1_TOL: f64 = 1e-6;
pub const P2_TOL: f64 = 1e-5;
pub const X0_TOL: f64 = 1e-8;
pub const XP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Default,
    Fast,
}

impl Profile {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "default" => Some(Profile::Default),
            "fast" => Some(Profile::Fast),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    P0 { gap: f64 },
    P1 { rho: f64, nu: f64, gap: f64 },
    P2 { rho: f64, nu: f64, gap: f64 },
    X0 { d: f64, gap: f64 },
    Xp { l: f64, d: f64, nu: f64, gap: f64 },
    /// The half-weight image of an even ν, compared term by term.
    HalfWeight { rho: f64, nu: f64, gap: f64 },
    Epsilon { gap: f64 },
    OriginIdentity { nu: f64, gap: f64 },
    ZetaIdentity { nu: f64 },
    FlatReduction { l: f64, d: f64, gap: f64 },
}

/// The twelve production/oracle comparisons.
pub fn oracle_grid() -> Vec<Check> {
    vec![
        Check::P0 { gap: 0.0 },
        Check::P0 { gap: 0.1 },
        Check::P0 { gap: 1.0 },
        Check::P1 { rho: 1.0, nu: 3.0, gap: 0.1 },
        Check::P1 { rho: 0.5, nu: 4.0, gap: 0.1 },
        Check::P1 { rho: 2.0, nu: 5.0, gap: 0.5 },
        Check::P2 { rho: 1.0, nu: 2.5, gap: 0.1 },
        Check::P2 { rho: 0.3, nu: 1.5, gap: 0.1 },
        Check::X0 { d: 1.0, gap: 0.1 },
        Check::X0 { d: 4.0, gap: 0.5 },
        Check::Xp { l: 0.5, d: 0.5, nu: 3.0, gap: 0.1 },
        Check::Xp { l: 1.0, d: 1.0, nu: 2.5, gap: 0.1 },
    ]
}

/// Analytic identities run alongside the oracle grid.
pub fn identity_checks() -> Vec<Check> {
    let mut checks = vec![Check::HalfWeight { rho: 0.5, nu: 4.0, gap: 0.1 }];
    checks.extend([0.0, 0.1, 1.0].map(|gap| Check::Epsilon { gap }));
    checks.extend([1.5, 2.0, 2.5, 3.0, 11.0].map(|nu| Check::OriginIdentity { nu, gap: 0.1 }));
    checks.extend([1.3, 2.5, 3.7, 9.2].map(|nu| Check::ZetaIdentity { nu }));
    checks.extend([(0.3, 0.5, 0.1), (2.0, 1.5, 1.0)].map(|(l, d, gap)| Check::FlatReduction { l, d, gap }));
    checks
}

pub fn checks_for(profile: Profile) -> Vec<Check> {
    match profile {
        Profile::Default => oracle_grid().into_iter().chain(identity_checks()).collect(),
        Profile::Fast => {
            let grid = oracle_grid();
            vec![
                grid[1],
                grid[3],
                grid[6],
                grid[8],
                grid[10],
                Check::HalfWeight { rho: 0.5, nu: 4.0, gap: 0.1 },
                Check::Epsilon { gap: 0.1 },
                Check::OriginIdentity { nu: 2.5, gap: 0.1 },
                Check::ZetaIdentity { nu: 2.5 },
                Check::FlatReduction { l: 0.3, d: 0.5, gap: 0.1 },
            ]
        }
    }
}

/// Test hooks applied to production values before comparison.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Faults {
    /// Relative perturbation of the production image-sum response.
    pub p1_relative: Option<f64>,
}

fn nu(v: f64) -> Result<ConeParameter> {
    ConeParameter::new(v)
}

fn c2(z: crate::special::Complex) -> [f64; 2] {
    [z.re, z.im]
}

pub fn run_check(check: &Check, faults: &Faults) -> Result<OracleReport> {
    let report = match *check {
        Check::P0 { gap } => OracleReport::compare(format!("P0 gap={gap}"), p_flat(gap), oracle::p0_oracle(gap)?, P0_TOL),
        Check::P1 { rho, nu: v, gap } => {
            let mut production = p_string(rho, nu(v)?, gap)?.p_images;
            if let Some(rel) = faults.p1_relative {
                production *= 1.0 + rel;
            }
            let o = oracle::p1_oracle(rho, v, gap)?;
            OracleReport::compare(format!("P1 rho={rho} nu={v} gap={gap}"), production, o.total, P1_TOL)
        }
        Check::P2 { rho, nu: v, gap } => {
            let production = p_string(rho, nu(v)?, gap)?.p_integral;
            OracleReport::compare(
                format!("P2 rho={rho} nu={v} gap={gap}"),
                production,
                oracle::p2_oracle(rho, v, gap)?,
                P2_TOL,
            )
        }
        Check::X0 { d, gap } => OracleReport::compare_complex(
            format!("X0 d={d} gap={gap}"),
            c2(x_flat(d, gap)?),
            oracle::x0_oracle(d, gap)?,
            X0_TOL,
        ),
        Check::Xp { l, d, nu: v, gap } => {
            let config = PairConfig::new(Alignment::ParallelSameSide, l, d, gap)?;
            let production = x_string(&config, nu(v)?)?.total;
            OracleReport::compare_complex(
                format!("XP l={l} d={d} nu={v} gap={gap}"),
                c2(production),
                oracle::xp_oracle(l, d, v, gap)?.total,
                XP_TOL,
            )
        }
        Check::HalfWeight { rho, nu: v, gap } => {
            let production = p_string(rho, nu(v)?, gap)?;
            let o = oracle::p1_oracle(rho, v, gap)?;
            let (p, q) = (production.images.last(), o.terms.last());
            let (p, q) = match (p, q) {
                (Some(p), Some(q)) if p.weight == q.weight && p.weight == 0.5 => (p.value, q.value),
                _ => (f64::NAN, 0.0),
            };
            OracleReport::compare(format!("P1 half-weight image rho={rho} nu={v} gap={gap}"), p, q, P1_TOL)
        }
        Check::Epsilon { gap } => oracle::epsilon_extrapolation_check(gap, p_flat(gap))?,
        Check::OriginIdentity { nu: v, gap } => OracleReport::compare(
            format!("P(0) = nu P0 nu={v} gap={gap}"),
            p_string(0.0, nu(v)?, gap)?.total,
            v * p_flat(gap),
            1e-6,
        ),
        Check::ZetaIdentity { nu: v } => {
            let s = sin_pi(v);
            let gap = one_minus_cos_pi(v);
            let opts = SemiInfinite::new(v, 1e-11).with_peak((gap < 0.1).then(|| (2.0 * gap).sqrt() / v));
            let r = integrate_semi_infinite_n(
                |z| {
                    let sh = (0.5 * v * z).sinh();
                    [-s / (gap + 2.0 * sh * sh)]
                },
                &opts,
            )?;
            let closed = std::f64::consts::PI / v * (v - 1.0 - 2.0 * (v / 2.0).floor());
            let mut report = OracleReport::compare(format!("zeta identity nu={v}"), r.value[0], closed, 1e-8);
            report.pass = report.abs_deviation <= 1e-8;
            report
        }
        Check::FlatReduction { l, d, gap } => {
            let config = PairConfig::new(Alignment::ParallelSameSide, l, d, gap)?;
            OracleReport::compare_complex(
                format!("nu=1 reduction l={l} d={d} gap={gap}"),
                c2(x_string(&config, ConeParameter::FLAT)?.total),
                c2(x_flat(d, gap)?),
                1e-12,
            )
        }
    };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub check: Check,
    pub report: Option<OracleReport>,
    pub error: Option<String>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.pass)
    }
}

/// Runs every check concurrently; results keep the input order.
pub fn run_checks(checks: &[Check], faults: &Faults) -> Vec<VerifyOutcome> {
    checks
        .par_iter()
        .map(|check| match run_check(check, faults) {
            Ok(report) => VerifyOutcome {
                check: *check,
                report: Some(report),
                error: None,
            },
            Err(e) => VerifyOutcome {
                check: *check,
                report: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}
