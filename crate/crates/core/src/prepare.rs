//! GHZ-state preparation from three uncorrelated spins via two probe
//! photons.
//!
//! Photon 1 (`Rv`) passes cavities [1, 2] and is detected; photon 2 (`L^`)
//! then passes cavities [2, 3] and is detected. The detected pair projects
//! the register onto one of four branches; with uniform coefficients each
//! branch appears with probability 1/4 and carries a plus-sign GHZ state.
//! The photons never coexist in the register — photon 2 enters only after
//! photon 1 has been absorbed — so each pass lives in the single-photon
//! space.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ghz::{product_state, ProductSpinSpec};
use crate::optics::cavity_pass_sequence;
use crate::statevec::{
    measure_photon_polarization_with, photon_basis_vector, photon_polarization_branches, tensor,
    HybridState, PhotonBasisState,
};
use crate::TOLERANCE;

/// The detected pairs in group order 0..=3.
const GROUP_PAIRS: [(PhotonBasisState, PhotonBasisState); 4] = [
    (PhotonBasisState::R_DOWN, PhotonBasisState::L_UP),
    (PhotonBasisState::R_DOWN, PhotonBasisState::R_DOWN),
    (PhotonBasisState::L_UP, PhotonBasisState::R_DOWN),
    (PhotonBasisState::L_UP, PhotonBasisState::L_UP),
];

/// Group index of a detected photon pair, if it is one of the four the
/// protocol can produce.
pub fn outcome_group(pair: (PhotonBasisState, PhotonBasisState)) -> Option<usize> {
    GROUP_PAIRS.iter().position(|&p| p == pair)
}

/// The detected pair belonging to a group index.
pub fn group_outcomes(group: usize) -> (PhotonBasisState, PhotonBasisState) {
    GROUP_PAIRS[group]
}

/// Result of one sampled preparation shot.
#[derive(Debug, Clone)]
pub struct PreparationRecord {
    pub outcome_pair: (PhotonBasisState, PhotonBasisState),
    /// Joint Born probability of the sampled pair.
    pub probability: f64,
    pub conditioned_state: HybridState,
    /// 0 for (Rv, L^), 1 for (Rv, Rv), 2 for (L^, Rv), 3 for (L^, L^).
    pub group: usize,
}

/// One branch of the exact preparation distribution. Dead branches carry no
/// conditioned state.
#[derive(Debug, Clone)]
pub struct PreparationBranch {
    pub outcome_pair: (PhotonBasisState, PhotonBasisState),
    pub probability: f64,
    pub conditioned_state: Option<HybridState>,
    pub group: usize,
}

fn check_spec(spec: &ProductSpinSpec) -> Result<()> {
    if spec.n_spins() != 3 {
        return Err(Error::Argument(format!(
            "preparation works on exactly 3 spins, got {}",
            spec.n_spins()
        )));
    }
    Ok(())
}

/// Samples one preparation shot: both photon detections drawn from the Born
/// rule with the given seed.
pub fn run_preparation(
    spec: &ProductSpinSpec,
    rng_seed: Option<u64>,
) -> Result<PreparationRecord> {
    check_spec(spec)?;
    let mut rng = rng_seed.map(crate::seeded_rng);

    let spins = product_state(spec);
    let first = tensor(&photon_basis_vector(PhotonBasisState::R_DOWN), &spins)?;
    let first = cavity_pass_sequence(&first, &[1, 2])?;
    let m1 = measure_photon_polarization_with(&first, rng.as_mut())?;

    let second = tensor(&photon_basis_vector(PhotonBasisState::L_UP), &m1.post_state)?;
    let second = cavity_pass_sequence(&second, &[2, 3])?;
    let m2 = measure_photon_polarization_with(&second, rng.as_mut())?;

    let outcome_pair = (m1.outcome, m2.outcome);
    let group = outcome_group(outcome_pair)
        .expect("protocol photons stay in the sz = -1 subspace");
    Ok(PreparationRecord {
        outcome_pair,
        probability: m1.probability * m2.probability,
        conditioned_state: m2.post_state,
        group,
    })
}

/// The exact four-branch outcome distribution of a preparation, in group
/// order. Probabilities sum to 1.
pub fn preparation_distribution(spec: &ProductSpinSpec) -> Result<Vec<PreparationBranch>> {
    check_spec(spec)?;

    let spins = product_state(spec);
    let first = tensor(&photon_basis_vector(PhotonBasisState::R_DOWN), &spins)?;
    let first = cavity_pass_sequence(&first, &[1, 2])?;
    let first_branches = photon_polarization_branches(&first)?;

    let mut out = Vec::with_capacity(4);
    for group in 0..4 {
        let (o1, o2) = group_outcomes(group);
        let b1 = &first_branches[o1.index()];
        let (probability, conditioned_state) = match &b1.post_state {
            None => (0.0, None),
            Some(intermediate) => {
                let second =
                    tensor(&photon_basis_vector(PhotonBasisState::L_UP), intermediate)?;
                let second = cavity_pass_sequence(&second, &[2, 3])?;
                let second_branches = photon_polarization_branches(&second)?;
                let b2 = &second_branches[o2.index()];
                let p = b1.probability * b2.probability;
                if p > TOLERANCE {
                    (p, b2.post_state.clone())
                } else {
                    (p, None)
                }
            }
        };
        out.push(PreparationBranch {
            outcome_pair: (o1, o2),
            probability,
            conditioned_state,
            group,
        });
    }
    Ok(out)
}
