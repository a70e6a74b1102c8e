use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Unscaled complex erfc requested where e^{-z^2} would overflow.
    #[error("argument {re} + {im}i is outside the unscaled erfc domain (|Im z| <= {limit})")]
    OverflowDomain { re: f64, im: f64, limit: f64 },

    /// The auxiliary correlation function was asked for an argument at or below
    /// the overlap cutoff.
    #[error("auxiliary function argument {z:e} is at or below the overlap cutoff")]
    DivergentArgument { z: f64 },

    /// A detector overlaps with itself or with an image of its partner.
    /// `image` is `None` for the direct (flat) term.
    #[error("detector overlap: {} argument {argument:e} at or below the cutoff", describe_image(*.image))]
    DivergentOverlap { image: Option<u32>, argument: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e}, {evaluations} evaluations)")]
    ToleranceNotMet {
        tolerance: f64,
        estimate: f64,
        evaluations: usize,
    },

    #[error("principal-value poles at {a} and {b} are too close")]
    PolesTooClose { a: f64, b: f64 },

    #[error("objective has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("objective is not unimodal on [{lo}, {hi}]")]
    NotUnimodal { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn describe_image(image: Option<u32>) -> String {
    match image {
        Some(m) => format!("image m={m}"),
        None => "direct term".to_string(),
    }
}

impl Error {
    /// Stable machine-readable tag, used by the CLI's JSON error objects and
    /// the C interface.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OverflowDomain { .. } => "overflow_domain",
            Error::DivergentArgument { .. } => "divergent_argument",
            Error::DivergentOverlap { .. } => "divergent_overlap",
            Error::ToleranceNotMet { .. } => "tolerance_not_met",
            Error::PolesTooClose { .. } => "poles_too_close",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::NotUnimodal { .. } => "not_unimodal",
            Error::InvalidParameter(_) => "invalid_parameter",
        }
    }

    pub fn is_divergence(&self) -> bool {
        matches!(
            self,
            Error::DivergentOverlap { .. } | Error::DivergentArgument { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
