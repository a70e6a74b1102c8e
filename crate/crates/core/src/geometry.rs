//! Cone parameter, detector alignments and the effective distances that feed
//! the response and correlation sums.
//!
//! Lengths are in units of the switching width σ.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::special::{one_minus_cos_pi, sin_pi};

/// Values of ν within this distance of an integer are snapped to it.
pub const INTEGER_SNAP: f64 = 1e-12;
pub const NU_MAX: f64 = 64.0;

/// Below this value of `1 - cos(kνπ)` the ζ-coefficient has a sharp peak at
/// the origin and the integrator gets forced breakpoints.
const PEAK_THRESHOLD: f64 = 0.1;

/// Deficit-angle parameter ν = 1/(1 - 4Gμ).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConeParameter {
    nu: f64,
}

impl ConeParameter {
    pub const FLAT: ConeParameter = ConeParameter { nu: 1.0 };

    pub fn new(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu >= 1.0 - INTEGER_SNAP && nu <= NU_MAX + INTEGER_SNAP) {
            return Err(invalid(format!("nu = {nu} must lie in [1, {NU_MAX}]")));
        }
        let rounded = nu.round();
        let nu = if (nu - rounded).abs() < INTEGER_SNAP { rounded } else { nu };
        Ok(ConeParameter { nu })
    }

    pub fn value(&self) -> f64 {
        self.nu
    }

    pub fn is_integer(&self) -> bool {
        self.nu.fract() == 0.0
    }

    pub fn is_even_integer(&self) -> bool {
        self.is_integer() && self.nu.rem_euclid(2.0) == 0.0
    }

    /// True when 2ν is an integer (within the snap tolerance).
    pub fn is_half_integer_multiple(&self) -> bool {
        let twice = 2.0 * self.nu;
        (twice - twice.round()).abs() < 2.0 * INTEGER_SNAP
    }

    pub fn deficit_angle(&self) -> f64 {
        2.0 * PI * (self.nu - 1.0) / self.nu
    }

    #[allow(non_snake_case)]
    pub fn string_tension_Gmu(&self) -> f64 {
        (1.0 - 1.0 / self.nu) / 4.0
    }
}

impl fmt::Display for ConeParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alignment {
    Flat,
    ParallelSameSide,
    OrthogonalSameSide,
    OrthogonalOppositeSides,
    BoundaryParallel,
    BoundaryOrthogonal,
}

impl Alignment {
    pub const ALL: [Alignment; 6] = [
        Alignment::Flat,
        Alignment::ParallelSameSide,
        Alignment::OrthogonalSameSide,
        Alignment::OrthogonalOppositeSides,
        Alignment::BoundaryParallel,
        Alignment::BoundaryOrthogonal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Alignment::Flat => "flat",
            Alignment::ParallelSameSide => "parallel",
            Alignment::OrthogonalSameSide => "orthogonal",
            Alignment::OrthogonalOppositeSides => "opposite",
            Alignment::BoundaryParallel => "boundary-parallel",
            Alignment::BoundaryOrthogonal => "boundary-orthogonal",
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, Alignment::BoundaryParallel | Alignment::BoundaryOrthogonal)
    }

    pub fn uses_cone(&self) -> bool {
        matches!(
            self,
            Alignment::ParallelSameSide | Alignment::OrthogonalSameSide | Alignment::OrthogonalOppositeSides
        )
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for Alignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl FromStr for Alignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let a = match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "flat" => Alignment::Flat,
            "parallel" | "parallel-same-side" => Alignment::ParallelSameSide,
            "orthogonal" | "orthogonal-same-side" => Alignment::OrthogonalSameSide,
            "opposite" | "orthogonal-opposite-sides" => Alignment::OrthogonalOppositeSides,
            "boundary-parallel" => Alignment::BoundaryParallel,
            "boundary-orthogonal" => Alignment::BoundaryOrthogonal,
            other => return Err(invalid(format!("unknown alignment '{other}'"))),
        };
        Ok(a)
    }
}

/// Two detectors: `l` is the distance of detector A from the string (or
/// boundary), `d` the interdetector separation, `gap` the product Ωσ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConfig {
    pub alignment: Alignment,
    pub l: f64,
    pub d: f64,
    pub gap: f64,
}

impl PairConfig {
    pub fn new(alignment: Alignment, l: f64, d: f64, gap: f64) -> Result<Self> {
        let config = PairConfig { alignment, l, d, gap };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let PairConfig { alignment, l, d, gap } = *self;
        if !(l.is_finite() && l >= 0.0) {
            return Err(invalid(format!("l = {l} must be finite and >= 0")));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(invalid(format!("d = {d} must be finite and > 0")));
        }
        if !(gap.is_finite() && gap >= 0.0) {
            return Err(invalid(format!("gap = {gap} must be finite and >= 0")));
        }
        if alignment == Alignment::OrthogonalOppositeSides {
            if !(l > 0.0) {
                return Err(invalid("opposite-sides alignment requires l > 0"));
            }
            if d < 2.0 * l * (1.0 - 1e-12) {
                return Err(invalid(format!(
                    "opposite-sides alignment requires d >= 2l (d = {d}, l = {l})"
                )));
            }
        }
        Ok(())
    }
}

/// One term of the primed image sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageTerm {
    pub m: u32,
    pub weight: f64,
    /// sin(mπ/ν)
    pub sin_term: f64,
    /// cos(mπ/ν), exactly zero for m = ν/2
    pub cos_term: f64,
}

pub fn image_terms(nu: ConeParameter) -> Vec<ImageTerm> {
    let count = (nu.value() / 2.0).floor() as u32;
    (1..=count)
        .map(|m| {
            let ratio = f64::from(m) / nu.value();
            let half = nu.is_even_integer() && 2 * m == nu.value() as u32;
            ImageTerm {
                m,
                weight: if half { 0.5 } else { 1.0 },
                sin_term: if half { 1.0 } else { sin_pi(ratio) },
                cos_term: if half { 0.0 } else { sin_pi(0.5 - ratio) },
            }
        })
        .collect()
}

/// Radial distances (ρ_A, ρ_B) of the two detectors.
pub fn radial_pair(config: &PairConfig) -> Result<(f64, f64)> {
    config.validate()?;
    let PairConfig { l, d, .. } = *config;
    Ok(match config.alignment {
        Alignment::Flat | Alignment::ParallelSameSide | Alignment::BoundaryParallel => (l, l),
        Alignment::OrthogonalSameSide | Alignment::BoundaryOrthogonal => (l, l + d),
        Alignment::OrthogonalOppositeSides => (l, (d - l).max(l)),
    })
}

/// Which ζ-coefficient family an integral uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaFamily {
    /// ν sin(νπ) / (π [cos(νπ) - cosh(νζ)])
    SameSide,
    /// ν sin(2νπ) / (2π [cos(2νπ) - cosh(νζ)])
    OppositeSides,
}

/// The continuous part of an image sum: `∫_0^∞ coefficient(ζ) F(z(ζ)) dζ`
/// with `z(ζ)² = offset + scale · h(ζ)`, where `h = cosh²(ζ/2)` for the
/// same-side family and `h = sinh²(ζ/2)` for the opposite-sides family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaIntegral {
    pub family: ZetaFamily,
    pub nu: ConeParameter,
    pub offset: f64,
    pub scale: f64,
}

impl ZetaIntegral {
    fn multiple(&self) -> f64 {
        match self.family {
            ZetaFamily::SameSide => 1.0,
            ZetaFamily::OppositeSides => 2.0,
        }
    }

    /// True when the coefficient vanishes identically.
    pub fn vanishes(&self) -> bool {
        match self.family {
            ZetaFamily::SameSide => self.nu.is_integer(),
            ZetaFamily::OppositeSides => self.nu.is_half_integer_multiple(),
        }
    }

    pub fn coefficient(&self, zeta: f64) -> f64 {
        if self.vanishes() {
            return 0.0;
        }
        let nu = self.nu.value();
        let k = self.multiple();
        let sh = (0.5 * nu * zeta).sinh();
        // cos(kνπ) - cosh(νζ) = -[(1 - cos(kνπ)) + 2 sinh²(νζ/2)]
        -nu * sin_pi(k * nu) / (k * PI * (one_minus_cos_pi(k * nu) + 2.0 * sh * sh))
    }

    pub fn argument(&self, zeta: f64) -> f64 {
        let h = match self.family {
            ZetaFamily::SameSide => (0.5 * zeta).cosh(),
            ZetaFamily::OppositeSides => (0.5 * zeta).sinh(),
        };
        (self.offset + self.scale * h * h).sqrt()
    }

    /// Width of the Lorentzian peak at ζ = 0 when kν is close to an even
    /// integer.
    pub fn peak_width(&self) -> Option<f64> {
        let gap = one_minus_cos_pi(self.multiple() * self.nu.value());
        (gap < PEAK_THRESHOLD).then(|| (2.0 * gap).sqrt() / self.nu.value())
    }

    /// Exponential decay rate of the coefficient.
    pub fn tail_rate(&self) -> f64 {
        self.nu.value()
    }
}

/// The ζ-integral of the response function at distance ρ: arguments
/// `ρ cosh(ζ/2)`.
pub fn response_zeta(rho: f64, nu: ConeParameter) -> ZetaIntegral {
    ZetaIntegral {
        family: ZetaFamily::SameSide,
        nu,
        offset: 0.0,
        scale: rho * rho,
    }
}

/// An image contribution to the correlation term: `weight · f(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageArgument {
    pub m: u32,
    pub weight: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FArguments {
    pub images: Vec<ImageArgument>,
    pub zeta: Option<ZetaIntegral>,
}

/// Arguments of the auxiliary function for the image sum and ζ-integral of a
/// string alignment. The flat alignment yields no images and no integral.
pub fn f_arguments(config: &PairConfig, nu: ConeParameter) -> Result<FArguments> {
    config.validate()?;
    let PairConfig { l, d, .. } = *config;
    let quarter = 0.25 * d * d;
    let terms = image_terms(nu);
    let (images, zeta) = match config.alignment {
        Alignment::Flat => (Vec::new(), None),
        Alignment::ParallelSameSide | Alignment::OrthogonalSameSide => {
            let (_, rho_b) = radial_pair(config)?;
            let scale = l * rho_b;
            let images = terms
                .iter()
                .map(|t| ImageArgument {
                    m: t.m,
                    weight: t.weight,
                    z: (quarter + scale * t.sin_term * t.sin_term).sqrt(),
                })
                .collect();
            let zeta = ZetaIntegral {
                family: ZetaFamily::SameSide,
                nu,
                offset: quarter,
                scale,
            };
            (images, Some(zeta))
        }
        Alignment::OrthogonalOppositeSides => {
            let far = (d - l).max(l);
            let images = terms
                .iter()
                .map(|t| {
                    // d²/4 - l(d-l) sin² = (d/2 - l)² + l(d-l) cos²
                    let half = 0.5 * d - l;
                    ImageArgument {
                        m: t.m,
                        weight: t.weight,
                        z: (half * half + l * far * t.cos_term * t.cos_term).max(0.0).sqrt(),
                    }
                })
                .collect();
            let zeta = ZetaIntegral {
                family: ZetaFamily::OppositeSides,
                nu,
                offset: quarter,
                scale: l * far,
            };
            (images, Some(zeta))
        }
        Alignment::BoundaryParallel | Alignment::BoundaryOrthogonal => {
            return Err(invalid("boundary alignments have no cone image arguments"));
        }
    };
    Ok(FArguments { images, zeta })
}
