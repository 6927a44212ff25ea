//! Perfect simulation of chains of infinite order by coupling from the past.
//!
//! The crate is organised bottom-up:
//!
//! - [`streams`]: index-addressable uniforms and the spontaneous-symbol stream
//! - [`kernels`]: transition kernels exposing lower conditional probabilities
//! - [`skeletons`]: context trees, maximum context lengths and detectors
//! - [`engine`]: the block coalescence construction and forward reconstruction
//! - [`analysis`]: regime classification, tail estimation, regeneration and
//!   compatibility checks
//! - [`cli`]: configuration documents, subcommands and output files

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod kernels;
pub mod skeletons;
pub mod stats;
pub mod streams;

/// Internal symbol index, `0..alphabet_size`.
pub type Symbol = u32;

pub use error::{Result, SimError};
pub use kernels::{ContinuityClass, Kernel};
pub use skeletons::{ContextLen, Skeleton};
pub use streams::{RandomStream, YQuantizer, YSymbol};

/// Library version echoed into every output document.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
