use alloc::string::String;
use thiserror::Error;

use crate::statevec::StateLayout;

/// Errors shared by every layer of the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A state or coefficient pair whose squared norm deviates from 1 by
    /// more than the library tolerance.
    #[error("not normalized: squared norm is {norm_sqr}")]
    Normalization { norm_sqr: f64 },

    /// Vector lengths or spin counts that do not match.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// An operation applied to a state in the wrong layout.
    #[error("layout mismatch: expected {expected} state, got {actual}")]
    Layout {
        expected: StateLayout,
        actual: StateLayout,
    },

    /// A 1-based spin or step index outside the valid range.
    #[error("index {index} out of range 1..={limit}")]
    Index { index: usize, limit: usize },

    /// A malformed argument that no other variant describes.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An invalid or unparsable GHZ state label.
    #[error("invalid GHZ label: {0}")]
    Label(String),

    /// A Born-rule sample was needed but no seed was supplied.
    #[error("measurement outcome is not deterministic and no RNG seed was provided")]
    SeedRequired,
}

pub type Result<T> = core::result::Result<T, Error>;
