//! The N-step GHZ analysis protocol and its outcome decoder.
//!
//! A run performs:
//!
//! 1. step 1 — probe `Rv` through cavities [1, 2], detect;
//! 2. steps j = 2..N−1 — probe `L^` through cavities [j, j+1], detect;
//! 3. step N — Hadamard on every spin, probe `Rv` through all N cavities,
//!    detect, then Hadamard on every spin again to return the register to
//!    the computational basis.
//!
//! Each parity-check photon leaves with its polarization preserved exactly
//! when the two visited spins are parallel in both GHZ branches; the final
//! photon reads the relative sign. For a GHZ input every detection is
//! deterministic and the register is left in the input state, which is what
//! makes the analyzer nondestructive.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ghz::{GhzLabel, GhzSign};
use crate::optics::{apply_hadamard_all, cavity_pass_sequence};
use crate::statevec::{
    fidelity_up_to_global_phase, measure_photon_polarization_with, photon_basis_vector, tensor,
    HybridState, PhotonBasisState, StateLayout,
};

/// Whether a detected probe kept or flipped its injected polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepClassification {
    Preserved,
    Flipped,
}

impl StepClassification {
    pub fn as_str(self) -> &'static str {
        match self {
            StepClassification::Preserved => "preserved",
            StepClassification::Flipped => "flipped",
        }
    }
}

/// The probe polarization injected at `step` of an N-step run: `Rv` for the
/// first and last step, `L^` in between.
pub fn injected_probe(step: usize, n_spins: usize) -> PhotonBasisState {
    if step == 1 || step == n_spins {
        PhotonBasisState::R_DOWN
    } else {
        PhotonBasisState::L_UP
    }
}

/// Detection record of one protocol step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    /// 1-based step number.
    pub step: usize,
    /// Detected photon state; always `Rv` or `L^`.
    pub detected: PhotonBasisState,
    /// Relation of `detected` to the step's injected probe.
    pub classification: StepClassification,
}

impl StepOutcome {
    /// Builds an outcome, deriving the classification from the step's probe.
    pub fn new(step: usize, n_spins: usize, detected: PhotonBasisState) -> Self {
        let classification = if detected == injected_probe(step, n_spins) {
            StepClassification::Preserved
        } else {
            StepClassification::Flipped
        };
        Self {
            step,
            detected,
            classification,
        }
    }
}

/// Full trace of one analysis run.
#[derive(Debug, Clone)]
pub struct AnalysisRecord {
    pub outcomes: Vec<StepOutcome>,
    pub decoded: GhzLabel,
    pub input_state: HybridState,
    /// Register after the final restoring Hadamards.
    pub post_state: HybridState,
    /// Born probability of each observed detection.
    pub outcome_probabilities: Vec<f64>,
}

impl AnalysisRecord {
    pub fn n_spins(&self) -> usize {
        self.input_state.n_spins()
    }

    /// |⟨input|post⟩| — 1 for every GHZ input.
    pub fn post_fidelity(&self) -> f64 {
        fidelity_up_to_global_phase(&self.post_state, &self.input_state)
            .expect("post state lives in the input space")
    }
}

fn check_run_inputs(state: &HybridState, n_spins: usize) -> Result<()> {
    if n_spins < 2 {
        return Err(Error::Argument(format!(
            "the analysis protocol needs at least 2 spins, got {n_spins}"
        )));
    }
    if state.layout() != StateLayout::SpinsOnly {
        return Err(Error::Layout {
            expected: StateLayout::SpinsOnly,
            actual: state.layout(),
        });
    }
    if state.n_spins() != n_spins {
        return Err(Error::Dimension {
            expected: 1 << n_spins,
            actual: state.dim(),
        });
    }
    if !state.is_normalized() {
        return Err(Error::Normalization {
            norm_sqr: state.norm_sqr(),
        });
    }
    Ok(())
}

fn one_step(
    state: &HybridState,
    step: usize,
    n_spins: usize,
    cavities: &[usize],
    rng: Option<&mut ChaCha8Rng>,
) -> Result<(StepOutcome, f64, HybridState)> {
    let probe = injected_probe(step, n_spins);
    let hybrid = tensor(&photon_basis_vector(probe), state)?;
    let passed = cavity_pass_sequence(&hybrid, cavities)?;
    let m = measure_photon_polarization_with(&passed, rng)?;
    Ok((
        StepOutcome::new(step, n_spins, m.outcome),
        m.probability,
        m.post_state,
    ))
}

/// Runs the full N-step protocol on a spin register.
///
/// GHZ inputs decode deterministically with every step probability 1; other
/// inputs are Born-sampled, which requires `rng_seed`.
pub fn run_analysis(
    state: &HybridState,
    n_spins: usize,
    rng_seed: Option<u64>,
) -> Result<AnalysisRecord> {
    check_run_inputs(state, n_spins)?;
    let mut rng = rng_seed.map(crate::seeded_rng);

    let input_state = state.clone();
    let mut current = state.clone();
    let mut outcomes = Vec::with_capacity(n_spins);
    let mut probabilities = Vec::with_capacity(n_spins);

    for step in 1..n_spins {
        let (outcome, probability, next) =
            one_step(&current, step, n_spins, &[step, step + 1], rng.as_mut())?;
        outcomes.push(outcome);
        probabilities.push(probability);
        current = next;
    }

    current = apply_hadamard_all(&current)?;
    let all_cavities: Vec<usize> = (1..=n_spins).collect();
    let (outcome, probability, next) =
        one_step(&current, n_spins, n_spins, &all_cavities, rng.as_mut())?;
    outcomes.push(outcome);
    probabilities.push(probability);
    current = apply_hadamard_all(&next)?;

    let decoded = decode_outcomes(&outcomes)?;
    Ok(AnalysisRecord {
        outcomes,
        decoded,
        input_state,
        post_state: current,
        outcome_probabilities: probabilities,
    })
}

/// Maps an outcome list to the unique GHZ label it identifies.
///
/// Spin 1 of the first branch is Up by convention; each parity check fixes
/// the next spin by XOR with its flip bit, and the final detection fixes the
/// sign (`Rv` reads `+`). Total over all 2^N outcome patterns.
pub fn decode_outcomes(outcomes: &[StepOutcome]) -> Result<GhzLabel> {
    let n_spins = outcomes.len();
    if n_spins < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 step outcomes, got {n_spins}"
        )));
    }
    let mut index = 0usize;
    let mut bit = 0usize;
    for (position, outcome) in outcomes.iter().enumerate() {
        let step = position + 1;
        if outcome.step != step {
            return Err(Error::Argument(format!(
                "outcome {position} carries step number {}, expected {step}",
                outcome.step
            )));
        }
        if outcome.detected.sz() != -1 {
            return Err(Error::Argument(format!(
                "step {step} detected {}, which is outside the probe subspace",
                outcome.detected
            )));
        }
        let expected = StepOutcome::new(step, n_spins, outcome.detected);
        if expected.classification != outcome.classification {
            return Err(Error::Argument(format!(
                "step {step} classification is inconsistent with its probe"
            )));
        }
        if step < n_spins {
            bit ^= (outcome.classification == StepClassification::Flipped) as usize;
            index = (index << 1) | bit;
        }
    }
    let sign = if outcomes[n_spins - 1].detected == PhotonBasisState::R_DOWN {
        GhzSign::Plus
    } else {
        GhzSign::Minus
    };
    GhzLabel::new(n_spins, index, sign)
}

/// One parity-check step in isolation: injects the step-j probe, passes
/// cavities [j, j+1], and measures. `j` ranges over 1..=N−1.
pub fn step_parity_check(
    state: &HybridState,
    j: usize,
    n_spins: usize,
) -> Result<(StepOutcome, HybridState)> {
    check_run_inputs(state, n_spins)?;
    if j == 0 || j >= n_spins {
        return Err(Error::Index {
            index: j,
            limit: n_spins - 1,
        });
    }
    let (outcome, _, post) = one_step(state, j, n_spins, &[j, j + 1], None)?;
    Ok((outcome, post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz::{enumerate_ghz, make_ghz, product_state, GhzLabel, ProductSpinSpec};
    use crate::{Complex64, TOLERANCE};
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;
    use alloc::vec;

    const RV: PhotonBasisState = PhotonBasisState::R_DOWN;
    const LU: PhotonBasisState = PhotonBasisState::L_UP;

    fn run_label(label: &GhzLabel) -> AnalysisRecord {
        run_analysis(&make_ghz(label), label.n_spins(), None).unwrap()
    }

    #[test]
    fn three_spin_outcome_table() {
        let expected: [(&str, [PhotonBasisState; 3]); 8] = [
            ("psi+0", [RV, LU, RV]),
            ("psi-0", [RV, LU, LU]),
            ("psi+1", [RV, RV, RV]),
            ("psi-1", [RV, RV, LU]),
            ("psi+2", [LU, RV, RV]),
            ("psi-2", [LU, RV, LU]),
            ("psi+3", [LU, LU, RV]),
            ("psi-3", [LU, LU, LU]),
        ];
        for (text, detections) in expected {
            let label: GhzLabel = text.parse().unwrap();
            let record = run_label(&label);
            let got: Vec<PhotonBasisState> =
                record.outcomes.iter().map(|o| o.detected).collect();
            assert_eq!(got, detections, "{text}");
            assert_eq!(record.decoded, label);
            for p in &record.outcome_probabilities {
                assert!((p - 1.0).abs() <= TOLERANCE);
            }
            assert!(record.post_fidelity() >= 1.0 - TOLERANCE);
        }
    }

    #[test]
    fn five_spin_reference_run() {
        let label = GhzLabel::new(5, 0, crate::ghz::GhzSign::Plus).unwrap();
        let record = run_label(&label);
        let got: Vec<PhotonBasisState> = record.outcomes.iter().map(|o| o.detected).collect();
        assert_eq!(got, vec![RV, LU, LU, LU, RV]);
        assert_eq!(record.decoded, label);
    }

    #[test]
    fn decode_examples() {
        let n = 3;
        let mk = |detections: [PhotonBasisState; 3]| {
            let outcomes: Vec<StepOutcome> = detections
                .iter()
                .enumerate()
                .map(|(i, &d)| StepOutcome::new(i + 1, n, d))
                .collect();
            decode_outcomes(&outcomes).unwrap()
        };
        assert_eq!(mk([RV, RV, LU]).to_string(), "psi-1");
        assert_eq!(mk([LU, LU, RV]).to_string(), "psi+3");
        // all preserved with a final Rv is index 0, plus — at any N
        for n_spins in 2..=7 {
            let outcomes: Vec<StepOutcome> = (1..=n_spins)
                .map(|step| StepOutcome::new(step, n_spins, injected_probe(step, n_spins)))
                .collect();
            let label = decode_outcomes(&outcomes).unwrap();
            assert_eq!(label.index(), 0);
            assert_eq!(label.sign(), crate::ghz::GhzSign::Plus);
        }
    }

    #[test]
    fn decode_rejects_malformed_lists() {
        let n = 3;
        let good: Vec<StepOutcome> = [RV, LU, RV]
            .iter()
            .enumerate()
            .map(|(i, &d)| StepOutcome::new(i + 1, n, d))
            .collect();
        assert!(decode_outcomes(&good).is_ok());

        let mut wrong_step = good.clone();
        wrong_step[1].step = 3;
        assert!(matches!(
            decode_outcomes(&wrong_step),
            Err(Error::Argument(_))
        ));

        let mut wrong_subspace = good.clone();
        wrong_subspace[0].detected = PhotonBasisState::R_UP;
        assert!(matches!(
            decode_outcomes(&wrong_subspace),
            Err(Error::Argument(_))
        ));

        let mut wrong_class = good;
        wrong_class[0].classification = StepClassification::Flipped;
        assert!(matches!(
            decode_outcomes(&wrong_class),
            Err(Error::Argument(_))
        ));

        assert!(matches!(
            decode_outcomes(&[StepOutcome::new(1, 2, RV)]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn parity_check_examples() {
        // (|uud⟩+|ddu⟩)/√2: spins 1,2 parallel — probe preserved, state kept
        let psi1: GhzLabel = "psi+1".parse().unwrap();
        let state = make_ghz(&psi1);
        let (outcome, post) = step_parity_check(&state, 1, 3).unwrap();
        assert_eq!(outcome.detected, RV);
        assert_eq!(outcome.classification, StepClassification::Preserved);
        assert!(fidelity_up_to_global_phase(&post, &state).unwrap() >= 1.0 - TOLERANCE);

        // (|udu⟩+|dud⟩)/√2: spins 1,2 antiparallel — probe flipped
        let psi2: GhzLabel = "psi+2".parse().unwrap();
        let state = make_ghz(&psi2);
        let (outcome, post) = step_parity_check(&state, 1, 3).unwrap();
        assert_eq!(outcome.detected, LU);
        assert_eq!(outcome.classification, StepClassification::Flipped);
        assert!(fidelity_up_to_global_phase(&post, &state).unwrap() >= 1.0 - TOLERANCE);

        // (|udd⟩−|duu⟩)/√2, step 2: spins 2,3 parallel — L^ preserved
        let psi3m: GhzLabel = "psi-3".parse().unwrap();
        let (outcome, _) = step_parity_check(&make_ghz(&psi3m), 2, 3).unwrap();
        assert_eq!(outcome.detected, LU);
        assert_eq!(outcome.classification, StepClassification::Preserved);

        assert!(matches!(
            step_parity_check(&make_ghz(&psi1), 3, 3),
            Err(Error::Index { .. })
        ));
    }

    #[test]
    fn probe_schedule() {
        assert_eq!(injected_probe(1, 5), RV);
        assert_eq!(injected_probe(3, 5), LU);
        assert_eq!(injected_probe(5, 5), RV);
        assert_eq!(injected_probe(2, 2), RV);
    }

    #[test]
    fn every_three_spin_pattern_is_distinct() {
        let mut seen = BTreeSet::new();
        for label in enumerate_ghz(3).unwrap() {
            let record = run_label(&label);
            let pattern: Vec<usize> =
                record.outcomes.iter().map(|o| o.detected.index()).collect();
            assert!(seen.insert(pattern));
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn global_phase_does_not_change_the_record() {
        let label: GhzLabel = "psi-2".parse().unwrap();
        let state = make_ghz(&label);
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated = HybridState::spins_only(
            3,
            state.amplitudes().iter().map(|a| a * phase).collect(),
        )
        .unwrap();
        let a = run_analysis(&state, 3, None).unwrap();
        let b = run_analysis(&rotated, 3, None).unwrap();
        assert_eq!(a.decoded, b.decoded);
        assert_eq!(
            a.outcomes.iter().map(|o| o.detected).collect::<Vec<_>>(),
            b.outcomes.iter().map(|o| o.detected).collect::<Vec<_>>()
        );
        assert!(b.post_fidelity() >= 1.0 - TOLERANCE);
    }

    #[test]
    fn non_ghz_input_is_sampled_and_conditioned() {
        let spec = ProductSpinSpec::uniform(3).unwrap();
        let state = product_state(&spec);
        assert!(matches!(
            run_analysis(&state, 3, None),
            Err(Error::SeedRequired)
        ));
        let a = run_analysis(&state, 3, Some(7)).unwrap();
        let b = run_analysis(&state, 3, Some(7)).unwrap();
        assert_eq!(a.decoded, b.decoded);
        for (x, y) in a
            .outcome_probabilities
            .iter()
            .zip(&b.outcome_probabilities)
        {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        // conditioning leaves a normalized register
        assert!(a.post_state.is_normalized());
    }

    #[test]
    fn run_input_validation() {
        let state = make_ghz(&"psi+0".parse().unwrap());
        assert!(matches!(
            run_analysis(&state, 1, None),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            run_analysis(&state, 4, None),
            Err(Error::Dimension { .. })
        ));
        let with_photon = tensor(
            &photon_basis_vector(RV),
            &HybridState::spin_basis(3, 0),
        )
        .unwrap();
        assert!(matches!(
            run_analysis(&with_photon, 3, None),
            Err(Error::Layout { .. })
        ));
    }

    #[test]
    fn detected_photons_stay_in_the_probe_subspace() {
        for n in 2..=6 {
            for label in enumerate_ghz(n).unwrap() {
                for outcome in run_label(&label).outcomes {
                    assert_eq!(outcome.detected.sz(), -1);
                    assert!(outcome.detected == RV || outcome.detected == LU);
                }
            }
        }
    }
}
