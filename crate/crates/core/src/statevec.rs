//! Dense complex state vectors over the hybrid photon ⊗ spin space.
//!
//! A [`HybridState`] holds the amplitudes of either a bare spin register
//! (`SpinsOnly`, dimension 2^N) or a register with one probe photon attached
//! (`WithPhoton`, dimension 4·2^N). Amplitudes are indexed as
//!
//! ```text
//! index = photon_index * 2^N + spin_bits
//! ```
//!
//! where the photon basis order is `[R^, Rv, L^, Lv]` and `spin_bits` is the
//! big-endian bit string of the register with spin 1 as the most significant
//! bit, Up = 0 and Down = 1.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::float;
use crate::TOLERANCE;

/// One electron spin basis state. `Up` maps to bit 0, `Down` to bit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinBasisState {
    Up,
    Down,
}

impl SpinBasisState {
    #[inline]
    pub fn bit(self) -> usize {
        match self {
            SpinBasisState::Up => 0,
            SpinBasisState::Down => 1,
        }
    }

    #[inline]
    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            SpinBasisState::Up
        } else {
            SpinBasisState::Down
        }
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            SpinBasisState::Up => SpinBasisState::Down,
            SpinBasisState::Down => SpinBasisState::Up,
        }
    }
}

impl fmt::Display for SpinBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinBasisState::Up => "↑",
            SpinBasisState::Down => "↓",
        })
    }
}

/// Circular photon polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    R,
    L,
}

/// Photon propagation direction along the cavity axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

/// One photon basis state out of `[R^, Rv, L^, Lv]`.
///
/// The spin angular momentum `sz` is +1 for `R^` and `Lv` and −1 for `Rv`
/// and `L^`; it is what the cavity interface actually couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhotonBasisState {
    pub polarization: Polarization,
    pub direction: Direction,
}

/// Photon basis states in canonical index order.
pub const PHOTON_STATES: [PhotonBasisState; 4] = [
    PhotonBasisState::R_UP,
    PhotonBasisState::R_DOWN,
    PhotonBasisState::L_UP,
    PhotonBasisState::L_DOWN,
];

impl PhotonBasisState {
    pub const R_UP: Self = Self {
        polarization: Polarization::R,
        direction: Direction::Up,
    };
    pub const R_DOWN: Self = Self {
        polarization: Polarization::R,
        direction: Direction::Down,
    };
    pub const L_UP: Self = Self {
        polarization: Polarization::L,
        direction: Direction::Up,
    };
    pub const L_DOWN: Self = Self {
        polarization: Polarization::L,
        direction: Direction::Down,
    };

    /// Spin angular momentum along the cavity axis: +1 or −1.
    #[inline]
    pub fn sz(self) -> i32 {
        if (self.polarization == Polarization::R) == (self.direction == Direction::Up) {
            1
        } else {
            -1
        }
    }

    /// Canonical index in `[R^, Rv, L^, Lv]`.
    #[inline]
    pub fn index(self) -> usize {
        let p = (self.polarization == Polarization::L) as usize;
        let d = (self.direction == Direction::Down) as usize;
        p * 2 + d
    }

    #[inline]
    pub fn from_index(index: usize) -> Option<Self> {
        PHOTON_STATES.get(index).copied()
    }

    /// The state after a cavity reflection: both polarization and direction
    /// flip, so `sz` is unchanged.
    #[inline]
    pub fn reflected(self) -> Self {
        Self {
            polarization: match self.polarization {
                Polarization::R => Polarization::L,
                Polarization::L => Polarization::R,
            },
            direction: match self.direction {
                Direction::Up => Direction::Down,
                Direction::Down => Direction::Up,
            },
        }
    }

    /// ASCII rendering used by machine-readable output: `R^`, `Rv`, `L^`, `Lv`.
    pub fn ascii(self) -> &'static str {
        match self.index() {
            0 => "R^",
            1 => "Rv",
            2 => "L^",
            _ => "Lv",
        }
    }

    /// Unicode rendering with direction arrows: `R↑`, `R↓`, `L↑`, `L↓`.
    pub fn arrows(self) -> &'static str {
        match self.index() {
            0 => "R↑",
            1 => "R↓",
            2 => "L↑",
            _ => "L↓",
        }
    }

    pub fn parse_ascii(s: &str) -> Option<Self> {
        PHOTON_STATES.iter().copied().find(|p| p.ascii() == s)
    }
}

impl fmt::Display for PhotonBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ascii())
    }
}

/// Whether a state vector carries the probe photon factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateLayout {
    WithPhoton,
    SpinsOnly,
}

impl fmt::Display for StateLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateLayout::WithPhoton => "with-photon",
            StateLayout::SpinsOnly => "spins-only",
        })
    }
}

pub(crate) fn check_register_size(n_spins: usize) -> Result<()> {
    if n_spins > crate::MAX_REGISTER_SPINS {
        return Err(Error::Argument(alloc::format!(
            "{n_spins} spins exceed the dense-register limit of {}",
            crate::MAX_REGISTER_SPINS
        )));
    }
    Ok(())
}

/// Flat amplitude index of `(photon_index, spin_bits)` for an N-spin register.
#[inline]
pub fn flat_index(photon_index: usize, spin_bits: usize, n_spins: usize) -> usize {
    photon_index * (1 << n_spins) + spin_bits
}

/// Inverse of [`flat_index`].
#[inline]
pub fn split_index(index: usize, n_spins: usize) -> (usize, usize) {
    (index >> n_spins, index & ((1 << n_spins) - 1))
}

/// Bit position of the 1-based `target_spin` inside `spin_bits`
/// (spin 1 is the most significant bit).
#[inline]
pub fn spin_bit_position(target_spin: usize, n_spins: usize) -> usize {
    n_spins - target_spin
}

/// Immutable state vector over (photon ⊗ N spins) or N spins alone.
#[derive(Clone)]
pub struct HybridState {
    n_spins: usize,
    layout: StateLayout,
    amps: Vec<Complex64>,
}

impl HybridState {
    /// Builds a `SpinsOnly` state from 2^N amplitudes, checking normalization.
    pub fn spins_only(n_spins: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::checked(n_spins, StateLayout::SpinsOnly, amps)
    }

    /// Builds a `WithPhoton` state from 4·2^N amplitudes, checking normalization.
    pub fn with_photon(n_spins: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::checked(n_spins, StateLayout::WithPhoton, amps)
    }

    fn checked(n_spins: usize, layout: StateLayout, amps: Vec<Complex64>) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::Dimension {
                expected: 1,
                actual: 0,
            });
        }
        check_register_size(n_spins)?;
        let expected = match layout {
            StateLayout::SpinsOnly => 1 << n_spins,
            StateLayout::WithPhoton => 4 << n_spins,
        };
        if amps.len() != expected {
            return Err(Error::Dimension {
                expected,
                actual: amps.len(),
            });
        }
        let state = Self {
            n_spins,
            layout,
            amps,
        };
        if !state.is_normalized() {
            return Err(Error::Normalization {
                norm_sqr: state.norm_sqr(),
            });
        }
        Ok(state)
    }

    /// The computational basis state `|spin_bits⟩` of an N-spin register.
    pub fn spin_basis(n_spins: usize, spin_bits: usize) -> Self {
        assert!((1..=crate::MAX_REGISTER_SPINS).contains(&n_spins));
        assert!(spin_bits < (1 << n_spins));
        let mut amps = vec![Complex64::ZERO; 1 << n_spins];
        amps[spin_bits] = Complex64::ONE;
        Self {
            n_spins,
            layout: StateLayout::SpinsOnly,
            amps,
        }
    }

    /// Internal constructor for amplitudes already known to be valid.
    pub(crate) fn from_raw(n_spins: usize, layout: StateLayout, amps: Vec<Complex64>) -> Self {
        Self {
            n_spins,
            layout,
            amps,
        }
    }

    #[inline]
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    #[inline]
    pub fn layout(&self) -> StateLayout {
        self.layout
    }

    /// Total amplitude count.
    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Dimension of the spin factor, 2^N.
    #[inline]
    pub fn spin_dim(&self) -> usize {
        1 << self.n_spins
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        float::abs(self.norm_sqr() - 1.0) <= TOLERANCE
    }

    /// Entrywise comparison within `tol` on the modulus of the difference.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.layout == other.layout
            && self.n_spins == other.n_spins
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Largest modulus of any entrywise difference, for diagnostics.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn renormalized(mut self) -> Self {
        let norm = float::sqrt(self.norm_sqr());
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
        self
    }

    /// Human-readable ket expansion of the `max_terms` largest amplitudes,
    /// ordered by decreasing magnitude.
    pub fn format_terms(&self, max_terms: usize) -> String {
        let mut order: Vec<usize> = (0..self.amps.len())
            .filter(|&i| self.amps[i].norm_sqr() > TOLERANCE * TOLERANCE)
            .collect();
        order.sort_by(|&a, &b| {
            self.amps[b]
                .norm_sqr()
                .total_cmp(&self.amps[a].norm_sqr())
                .then(a.cmp(&b))
        });
        let mut out = String::new();
        for (count, &i) in order.iter().take(max_terms).enumerate() {
            if count > 0 {
                out.push_str(" + ");
            }
            let a = self.amps[i];
            let _ = write!(out, "({:.6}{:+.6}i)", a.re, a.im);
            let (photon, bits) = match self.layout {
                StateLayout::WithPhoton => split_index(i, self.n_spins),
                StateLayout::SpinsOnly => (usize::MAX, i),
            };
            if photon != usize::MAX {
                let _ = write!(out, "|{}⟩", PHOTON_STATES[photon].ascii());
            }
            out.push('|');
            for k in 0..self.n_spins {
                let bit = (bits >> (self.n_spins - 1 - k)) & 1;
                out.push_str(if bit == 0 { "u" } else { "d" });
            }
            out.push('⟩');
        }
        if order.len() > max_terms {
            let _ = write!(out, " + … ({} more terms)", order.len() - max_terms);
        }
        out
    }
}

impl fmt::Debug for HybridState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HybridState({} spins, {}, {})",
            self.n_spins,
            self.layout,
            self.format_terms(8)
        )
    }
}

/// The four-component amplitude vector of one photon basis state.
pub fn photon_basis_vector(photon: PhotonBasisState) -> [Complex64; 4] {
    let mut v = [Complex64::ZERO; 4];
    v[photon.index()] = Complex64::ONE;
    v
}

/// Attaches a photon in the given superposition to a spin register.
pub fn tensor(photon: &[Complex64; 4], spins: &HybridState) -> Result<HybridState> {
    if spins.layout() != StateLayout::SpinsOnly {
        return Err(Error::Layout {
            expected: StateLayout::SpinsOnly,
            actual: spins.layout(),
        });
    }
    let photon_norm_sqr: f64 = photon.iter().map(|a| a.norm_sqr()).sum();
    if float::abs(photon_norm_sqr - 1.0) > TOLERANCE {
        return Err(Error::Normalization {
            norm_sqr: photon_norm_sqr,
        });
    }
    if !spins.is_normalized() {
        return Err(Error::Normalization {
            norm_sqr: spins.norm_sqr(),
        });
    }
    let d = spins.spin_dim();
    let mut amps = vec![Complex64::ZERO; 4 * d];
    for (p, &c) in photon.iter().enumerate() {
        if c == Complex64::ZERO {
            continue;
        }
        for (bits, &s) in spins.amplitudes().iter().enumerate() {
            amps[flat_index(p, bits, spins.n_spins())] = c * s;
        }
    }
    Ok(HybridState::from_raw(
        spins.n_spins(),
        StateLayout::WithPhoton,
        amps,
    ))
}

/// One of the four projection branches of a photon polarization measurement.
#[derive(Debug, Clone)]
pub struct PhotonBranch {
    pub outcome: PhotonBasisState,
    /// Squared norm of the projected branch before renormalization.
    pub probability: f64,
    /// Renormalized `SpinsOnly` state, or `None` for a dead branch.
    pub post_state: Option<HybridState>,
}

/// All four projection branches of a photon measurement, in canonical
/// photon order. Probabilities sum to 1 for a normalized input.
pub fn photon_polarization_branches(state: &HybridState) -> Result<[PhotonBranch; 4]> {
    if state.layout() != StateLayout::WithPhoton {
        return Err(Error::Layout {
            expected: StateLayout::WithPhoton,
            actual: state.layout(),
        });
    }
    let d = state.spin_dim();
    let branches = PHOTON_STATES.map(|outcome| {
        let start = outcome.index() * d;
        let block = &state.amplitudes()[start..start + d];
        // Born probabilities never exceed 1; shave the representation dust
        // that squaring 1/√2 leaves behind.
        let probability: f64 = block
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .min(1.0);
        let post_state = (probability > TOLERANCE).then(|| {
            HybridState::from_raw(state.n_spins(), StateLayout::SpinsOnly, block.to_vec())
                .renormalized()
        });
        PhotonBranch {
            outcome,
            probability,
            post_state,
        }
    });
    Ok(branches)
}

/// Outcome of a destructive photon polarization measurement.
#[derive(Debug, Clone)]
pub struct MeasurementResult {
    pub outcome: PhotonBasisState,
    /// Born probability of the observed outcome.
    pub probability: f64,
    /// Spin register after the photon is absorbed by the detector.
    pub post_state: HybridState,
}

/// Measures the photon polarization/direction, tracing the photon out.
///
/// A deterministic state (one branch with probability ≥ 1 − 1e-12) is
/// resolved without consuming randomness, so protocol runs on GHZ inputs are
/// reproducible with or without a seed. Non-deterministic states require a
/// seed and fail with [`Error::SeedRequired`] otherwise.
pub fn measure_photon_polarization(
    state: &HybridState,
    rng_seed: Option<u64>,
) -> Result<MeasurementResult> {
    let mut rng = rng_seed.map(crate::seeded_rng);
    measure_photon_polarization_with(state, rng.as_mut())
}

/// [`measure_photon_polarization`] drawing from an existing RNG, so that one
/// seed can cover a whole protocol run.
pub fn measure_photon_polarization_with(
    state: &HybridState,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<MeasurementResult> {
    let branches = photon_polarization_branches(state)?;
    let take = |branch: &PhotonBranch| MeasurementResult {
        outcome: branch.outcome,
        probability: branch.probability,
        post_state: branch
            .post_state
            .clone()
            .expect("selected branch has positive probability"),
    };

    if let Some(branch) = branches.iter().find(|b| b.probability >= 1.0 - TOLERANCE) {
        return Ok(take(branch));
    }
    let rng = rng.ok_or(Error::SeedRequired)?;
    let u = unit_f64(rng);
    let mut acc = 0.0;
    let mut last = None;
    for branch in branches.iter().filter(|b| b.probability > TOLERANCE) {
        acc += branch.probability;
        last = Some(branch);
        if u < acc {
            return Ok(take(branch));
        }
    }
    // Rounding can leave acc marginally below 1; fall back to the last live branch.
    Ok(take(last.expect("a normalized state has a live branch")))
}

fn compatible(a: &HybridState, b: &HybridState) -> Result<()> {
    if a.layout() != b.layout() {
        return Err(Error::Layout {
            expected: a.layout(),
            actual: b.layout(),
        });
    }
    if a.n_spins() != b.n_spins() {
        return Err(Error::Dimension {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(())
}

/// The Hermitian inner product ⟨a|b⟩.
pub fn inner_product(a: &HybridState, b: &HybridState) -> Result<Complex64> {
    compatible(a, b)?;
    Ok(a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// |⟨a|b⟩| — the overlap magnitude, insensitive to global phase. Clamped
/// to [0, 1] against rounding overshoot on unit vectors.
pub fn fidelity_up_to_global_phase(a: &HybridState, b: &HybridState) -> Result<f64> {
    Ok(inner_product(a, b)?.norm().min(1.0))
}

/// Uniform sample in [0, 1) with 53 bits of precision.
pub(crate) fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A Haar-ish random unit vector for property tests and random batteries.
pub fn random_state(n_spins: usize, layout: StateLayout, rng: &mut ChaCha8Rng) -> HybridState {
    assert!((1..=crate::MAX_REGISTER_SPINS).contains(&n_spins));
    let dim = match layout {
        StateLayout::SpinsOnly => 1 << n_spins,
        StateLayout::WithPhoton => 4 << n_spins,
    };
    let mut amps = vec![Complex64::ZERO; dim];
    loop {
        for a in &mut amps {
            *a = Complex64::new(2.0 * unit_f64(rng) - 1.0, 2.0 * unit_f64(rng) - 1.0);
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr > 1e-6 {
            return HybridState::from_raw(n_spins, layout, amps).renormalized();
        }
    }
}
