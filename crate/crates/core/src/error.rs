use thiserror::Error;

/// Errors raised by parameter validation, the Fock engine and the verifier.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NcError {
    #[error("parameter `{name}` must be strictly positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("parameter `{name}` is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },

    #[error("squeeze magnitude must be a finite value >= 0, got {0}")]
    InvalidSqueeze(f64),

    #[error("cutoff {0} outside the supported range 1..=200")]
    CutoffOutOfRange(usize),

    #[error(
        "the Fock realization needs mu*nu < hbar^2 strictly; got mu*nu/hbar^2 = {ratio:.6} \
         (the kappa map is singular at saturation and complex beyond it)"
    )]
    SaturatedOrSuperCritical { ratio: f64 },

    #[error("squeeze magnitude r = {r} exceeds the guard {limit} for cutoff {cutoff}")]
    SqueezeTooLargeForCutoff { r: f64, limit: f64, cutoff: usize },

    #[error(
        "state leaks {leakage:.3e} of its norm above occupation {threshold} (cutoff {cutoff}); \
         increase the cutoff"
    )]
    PopulationOverflow {
        leakage: f64,
        threshold: usize,
        cutoff: usize,
    },

    #[error("operand spaces differ: cutoff {left} vs cutoff {right}")]
    SpaceMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (residual {0:.3e})")]
    NonHermitianOperator(f64),

    #[error("resolution of identity needs theta < 1, got {0}")]
    ThetaAtOrAboveOne(f64),

    #[error("at least {min} samples are required, got {got}")]
    SamplesTooFew { got: usize, min: usize },

    #[error("buffer {buffer} larger than cutoff {cutoff}")]
    BufferTooLarge { buffer: usize, cutoff: usize },

    #[error("cutoffs must be strictly increasing")]
    CutoffsNotIncreasing,

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

pub type Result<T> = std::result::Result<T, NcError>;
