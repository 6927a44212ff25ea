use thiserror::Error;

/// Errors raised by kernels, skeletons and the coalescence engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid parameter for {family}: {constraint}")]
    InvalidParameter {
        family: &'static str,
        constraint: String,
    },

    #[error("kernel is not weakly non-null (alpha_-1 = {alpha_floor})")]
    WeakNonNullness { alpha_floor: f64 },

    #[error("unsupported kernel/skeleton pairing: {kernel} with {skeleton}")]
    UnsupportedPairing { kernel: String, skeleton: String },

    #[error("search depth cap exceeded: probed {probed} steps into the past over {blocks} blocks")]
    DepthExceeded { probed: u64, blocks: u64 },

    #[error("detector is not certified for the extended construction: {0}")]
    UncertifiedDetector(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl SimError {
    pub(crate) fn param(family: &'static str, constraint: impl Into<String>) -> Self {
        SimError::InvalidParameter {
            family,
            constraint: constraint.into(),
        }
    }

    pub fn is_depth_exceeded(&self) -> bool {
        matches!(self, SimError::DepthExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
