//! Exact state-vector simulation of a deterministic multi-spin GHZ-state
//! analyzer built from photon–spin interface cavities.
//!
//! The library models an N-spin register probed by single photons. Each
//! probe passes a list of cavities, picking up a polarization flip per
//! antiparallel spin pair and a sign per uncoupled transmission; detecting
//! the probes one after another identifies any of the 2^N maximally
//! entangled GHZ states without destroying it. The crate provides
//!
//! - [`statevec`] — dense complex state vectors, tensor products,
//!   polarization measurement, fidelities;
//! - [`optics`] — the photon–spin interface gate, spin Hadamards, cavity
//!   routing;
//! - [`ghz`] — GHZ labels, constructors, enumeration, and product-state
//!   specs;
//! - [`analyzer`] — the N-step analysis protocol and outcome decoder;
//! - [`prepare`] — GHZ preparation from uncorrelated spins with two probes;
//! - [`oracle`] — independent brute-force verification of all of the above.
//!
//! States are immutable values and every operation is a pure function of
//! its inputs plus an explicit RNG seed, so independent simulations can run
//! concurrently without shared state. The crate is `no_std` (with `alloc`);
//! IO and file formats live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analyzer;
mod error;
pub mod ghz;
pub mod optics;
pub mod oracle;
pub mod prepare;
pub mod statevec;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rand_chacha::ChaCha8Rng;

pub use analyzer::{run_analysis, AnalysisRecord, StepClassification, StepOutcome};
pub use ghz::{enumerate_ghz, make_ghz, GhzLabel, GhzSign, ProductSpinSpec};
pub use statevec::{HybridState, PhotonBasisState, SpinBasisState, StateLayout};

/// Numerical tolerance for norm, fidelity, and entrywise comparisons.
///
/// The protocol only ever produces amplitudes built from ±1 and 1/√2, so
/// double precision keeps every deviation far below this bound while sign
/// errors overshoot it by fifteen orders of magnitude.
pub const TOLERANCE: f64 = 1e-12;

/// Hard cap on the register size a dense amplitude vector can represent;
/// beyond this the allocation alone is hopeless, so constructors refuse
/// early with a clean error instead of overflowing shifts.
pub const MAX_REGISTER_SPINS: usize = 30;

/// The deterministic RNG used for every Born-rule sample in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand_core::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Float helpers routed through [`num_traits::Float`] so the crate builds
/// without `std`.
pub(crate) mod float {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        num_traits::Float::sqrt(x)
    }

    #[inline]
    pub fn abs(x: f64) -> f64 {
        num_traits::Float::abs(x)
    }
}
