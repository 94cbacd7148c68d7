//! The quantum-dot–microcavity interface gate, the spin Hadamard, and the
//! cavity routing used by the protocol.
//!
//! The interface acts on (photon, one selected spin). A photon is *coupled*
//! to the dot exactly when its spin angular momentum matches the electron
//! spin's selection rule: `sz = +1` with spin up, or `sz = −1` with spin
//! down. A coupled photon is reflected — polarization and propagation
//! direction both flip, phase +1 — while an uncoupled photon transmits
//! unchanged with a π phase (−1). The electron spin is a spectator in every
//! rule, and `sz` is conserved.
//!
//! Beam-splitter routing is classical bookkeeping here: a protocol photon
//! never leaves the `sz = −1` subspace `{Rv, L^}`, so which cavities a
//! photon visits is expressed as an ordered index list, not as extra
//! Hilbert-space factors.

use alloc::vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevec::{
    flat_index, spin_bit_position, split_index, HybridState, PhotonBasisState, SpinBasisState,
    StateLayout,
};

/// The interface gate of the cavity holding `target_spin` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CavityGate {
    pub target_spin: usize,
}

/// A Hadamard rotation on one spin (1-based), e.g. a π/2 microwave pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinHadamard {
    pub target_spin: usize,
}

/// Basis action of a photon–spin interface: `(photon, spin) → (photon', phase)`.
///
/// The spin never appears on the output side; every physically meaningful
/// rule leaves it unchanged.
pub type CavityRuleFn = fn(PhotonBasisState, SpinBasisState) -> (PhotonBasisState, f64);

/// The canonical interface rule set.
pub fn cavity_rule(photon: PhotonBasisState, spin: SpinBasisState) -> (PhotonBasisState, f64) {
    let coupled = (photon.sz() == 1) == (spin == SpinBasisState::Up);
    if coupled {
        (photon.reflected(), 1.0)
    } else {
        (photon, -1.0)
    }
}

/// Applies the interface gate of one cavity to a state carrying a photon.
pub fn apply_cavity(state: &HybridState, gate: CavityGate) -> Result<HybridState> {
    apply_cavity_rule(state, gate.target_spin, cavity_rule)
}

/// [`apply_cavity`] with a caller-supplied rule set; used by the
/// verification layer to inject faults as a negative control.
pub fn apply_cavity_rule(
    state: &HybridState,
    target_spin: usize,
    rule: CavityRuleFn,
) -> Result<HybridState> {
    if state.layout() != StateLayout::WithPhoton {
        return Err(Error::Layout {
            expected: StateLayout::WithPhoton,
            actual: state.layout(),
        });
    }
    let n = state.n_spins();
    if target_spin == 0 || target_spin > n {
        return Err(Error::Index {
            index: target_spin,
            limit: n,
        });
    }
    let pos = spin_bit_position(target_spin, n);
    let mut amps = vec![Complex64::ZERO; state.dim()];
    for (idx, &a) in state.amplitudes().iter().enumerate() {
        if a == Complex64::ZERO {
            continue;
        }
        let (photon_idx, bits) = split_index(idx, n);
        let photon = PhotonBasisState::from_index(photon_idx).expect("photon index < 4");
        let spin = SpinBasisState::from_bit((bits >> pos) & 1);
        let (out_photon, phase) = rule(photon, spin);
        amps[flat_index(out_photon.index(), bits, n)] += phase * a;
    }
    Ok(HybridState::from_raw(n, StateLayout::WithPhoton, amps))
}

/// Hadamard on one spin: `u → (u+d)/√2`, `d → (u−d)/√2`.
pub fn apply_hadamard(state: &HybridState, gate: SpinHadamard) -> Result<HybridState> {
    let n = state.n_spins();
    if gate.target_spin == 0 || gate.target_spin > n {
        return Err(Error::Index {
            index: gate.target_spin,
            limit: n,
        });
    }
    let pos = spin_bit_position(gate.target_spin, n);
    let mask = 1 << pos;
    let inv_sqrt2 = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    let src = state.amplitudes();
    let mut amps = vec![Complex64::ZERO; state.dim()];
    for idx in 0..src.len() {
        if idx & mask != 0 {
            continue;
        }
        let up = src[idx];
        let down = src[idx | mask];
        amps[idx] = (up + down) * inv_sqrt2;
        amps[idx | mask] = (up - down) * inv_sqrt2;
    }
    Ok(HybridState::from_raw(n, state.layout(), amps))
}

/// Hadamard on every spin of the register.
pub fn apply_hadamard_all(state: &HybridState) -> Result<HybridState> {
    let mut out = state.clone();
    for spin in 1..=state.n_spins() {
        out = apply_hadamard(&out, SpinHadamard { target_spin: spin })?;
    }
    Ok(out)
}

/// Sends the photon through the listed cavities in order.
pub fn cavity_pass_sequence(state: &HybridState, cavities: &[usize]) -> Result<HybridState> {
    if cavities.is_empty() {
        return Err(Error::Argument("cavity list is empty".into()));
    }
    let mut out = state.clone();
    for &target_spin in cavities {
        out = apply_cavity(&out, CavityGate { target_spin })?;
    }
    Ok(out)
}

/// The 8×8 matrix of a rule on the (photon ⊗ spin) factor, `m[row][col]`.
/// Index order: `photon_index * 2 + spin_bit`.
pub fn interface_matrix(rule: CavityRuleFn) -> [[Complex64; 8]; 8] {
    let mut m = [[Complex64::ZERO; 8]; 8];
    for photon_idx in 0..4 {
        for spin_bit in 0..2 {
            let col = photon_idx * 2 + spin_bit;
            let (out, phase) = rule(
                PhotonBasisState::from_index(photon_idx).expect("photon index < 4"),
                SpinBasisState::from_bit(spin_bit),
            );
            let row = out.index() * 2 + spin_bit;
            m[row][col] = Complex64::new(phase, 0.0);
        }
    }
    m
}
