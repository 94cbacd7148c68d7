//! Labels, constructors, and enumeration for the 2^N maximally entangled
//! N-spin GHZ states
//!
//! ```text
//! (|b⟩ ± |b̄⟩)/√2,   b = 0·i₂·i₃⋯i_N,   b̄ = bitwise complement of b,
//! ```
//!
//! with spin 1 fixed to Up in the first branch and `i ∈ [0, 2^(N−1))` read
//! big-endian from the remaining spins. Labels print as `psi+0` … `psi-3`
//! for three spins and `ghz:<N>:<i>:<+|->` in general.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::float;
use crate::statevec::{HybridState, StateLayout};
use crate::TOLERANCE;

/// Relative sign between the two branches of a GHZ state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GhzSign {
    Plus,
    Minus,
}

impl GhzSign {
    #[inline]
    pub fn as_char(self) -> char {
        match self {
            GhzSign::Plus => '+',
            GhzSign::Minus => '-',
        }
    }

    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            GhzSign::Plus => 1.0,
            GhzSign::Minus => -1.0,
        }
    }
}

/// Name of one N-spin GHZ basis state: spin count, branch index, sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GhzLabel {
    n_spins: usize,
    index: usize,
    sign: GhzSign,
}

impl GhzLabel {
    /// Validates `2 ≤ n_spins ≤ MAX_REGISTER_SPINS` and `index < 2^(N−1)`.
    pub fn new(n_spins: usize, index: usize, sign: GhzSign) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::Argument(format!(
                "a GHZ register needs at least 2 spins, got {n_spins}"
            )));
        }
        crate::statevec::check_register_size(n_spins)?;
        if index >= 1 << (n_spins - 1) {
            return Err(Error::Label(format!(
                "index {index} out of range 0..{} for {n_spins} spins",
                1usize << (n_spins - 1)
            )));
        }
        Ok(Self {
            n_spins,
            index,
            sign,
        })
    }

    #[inline]
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.index
    }

    #[inline]
    pub fn sign(&self) -> GhzSign {
        self.sign
    }

    /// Spin bits of the first branch; spin 1 is Up, so this equals `index`.
    #[inline]
    pub fn first_branch_bits(&self) -> usize {
        self.index
    }

    /// Spin bits of the second branch: the bitwise complement of the first.
    #[inline]
    pub fn second_branch_bits(&self) -> usize {
        ((1 << self.n_spins) - 1) ^ self.index
    }
}

impl fmt::Display for GhzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n_spins == 3 {
            write!(f, "psi{}{}", self.sign.as_char(), self.index)
        } else {
            write!(
                f,
                "ghz:{}:{}:{}",
                self.n_spins,
                self.index,
                self.sign.as_char()
            )
        }
    }
}

impl FromStr for GhzLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Label(format!("cannot parse state label `{s}`"));
        if let Some(rest) = s.strip_prefix("psi") {
            let sign = match rest.as_bytes().first() {
                Some(b'+') => GhzSign::Plus,
                Some(b'-') => GhzSign::Minus,
                _ => return Err(bad()),
            };
            let index: usize = rest[1..].parse().map_err(|_| bad())?;
            return GhzLabel::new(3, index, sign);
        }
        if let Some(rest) = s.strip_prefix("ghz:") {
            let mut parts = rest.split(':');
            let n_spins: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let index: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let sign = match parts.next() {
                Some("+") => GhzSign::Plus,
                Some("-") => GhzSign::Minus,
                _ => return Err(bad()),
            };
            if parts.next().is_some() {
                return Err(bad());
            }
            return GhzLabel::new(n_spins, index, sign);
        }
        Err(bad())
    }
}

/// Builds the labelled GHZ state `(|b⟩ ± |b̄⟩)/√2`.
pub fn make_ghz(label: &GhzLabel) -> HybridState {
    let dim = 1 << label.n_spins();
    let mut amps = alloc::vec![Complex64::ZERO; dim];
    let amp = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[label.first_branch_bits()] = amp;
    amps[label.second_branch_bits()] = amp * label.sign().factor();
    HybridState::from_raw(label.n_spins(), StateLayout::SpinsOnly, amps)
}

/// All 2^N GHZ labels for an N-spin register, ordered by index with `+`
/// before `−` (the order the three-spin outcome table lists them in).
pub fn enumerate_ghz(n_spins: usize) -> Result<Vec<GhzLabel>> {
    if n_spins < 2 {
        return Err(Error::Argument(format!(
            "a GHZ register needs at least 2 spins, got {n_spins}"
        )));
    }
    crate::statevec::check_register_size(n_spins)?;
    let mut labels = Vec::with_capacity(1 << n_spins);
    for index in 0..1usize << (n_spins - 1) {
        for sign in [GhzSign::Plus, GhzSign::Minus] {
            labels.push(GhzLabel {
                n_spins,
                index,
                sign,
            });
        }
    }
    Ok(labels)
}

/// Per-spin amplitudes `(αᵢ, βᵢ)` of an uncorrelated product register
/// `⊗ᵢ (αᵢ|u⟩ + βᵢ|d⟩)`, each pair normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpinSpec {
    coefficients: Vec<(Complex64, Complex64)>,
}

impl ProductSpinSpec {
    pub fn new(coefficients: Vec<(Complex64, Complex64)>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Dimension {
                expected: 1,
                actual: 0,
            });
        }
        crate::statevec::check_register_size(coefficients.len())?;
        for &(alpha, beta) in &coefficients {
            let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
            if float::abs(norm_sqr - 1.0) > TOLERANCE {
                return Err(Error::Normalization { norm_sqr });
            }
        }
        Ok(Self { coefficients })
    }

    /// All pairs `(1/√2, 1/√2)`.
    pub fn uniform(n_spins: usize) -> Result<Self> {
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(alloc::vec![(h, h); n_spins])
    }

    #[inline]
    pub fn n_spins(&self) -> usize {
        self.coefficients.len()
    }

    #[inline]
    pub fn pairs(&self) -> &[(Complex64, Complex64)] {
        &self.coefficients
    }
}

/// Expands a product spec into its 2^N-dimensional state vector.
pub fn product_state(spec: &ProductSpinSpec) -> HybridState {
    let n = spec.n_spins();
    let mut amps = alloc::vec![Complex64::ZERO; 1 << n];
    for (bits, amp) in amps.iter_mut().enumerate() {
        let mut value = Complex64::ONE;
        for (k, &(alpha, beta)) in spec.pairs().iter().enumerate() {
            let bit = (bits >> (n - 1 - k)) & 1;
            value *= if bit == 0 { alpha } else { beta };
        }
        *amp = value;
    }
    HybridState::from_raw(n, StateLayout::SpinsOnly, amps).renormalized()
}

/// Finds the GHZ label whose state overlaps `state` with fidelity 1 (up to
/// global phase), if any.
pub fn identify_ghz(state: &HybridState) -> Option<GhzLabel> {
    if state.layout() != StateLayout::SpinsOnly || state.n_spins() < 2 {
        return None;
    }
    for label in enumerate_ghz(state.n_spins()).ok()? {
        let candidate = make_ghz(&label);
        if let Ok(f) = crate::statevec::fidelity_up_to_global_phase(state, &candidate) {
            if f >= 1.0 - TOLERANCE {
                return Some(label);
            }
        }
    }
    None
}

impl GhzLabel {
    /// Round-trippable text form (`psi+0` / `ghz:5:3:-`).
    pub fn text(&self) -> String {
        self.to_string()
    }
}
