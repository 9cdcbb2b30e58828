use serde::Serialize;

use super::noise::NoiseModel;
use super::state::{aggregate, conditional_fidelity, FlaggedState16, IdealState};
use super::step::flagged_step;
use crate::Result;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ROUNDS: usize = 500;

/// Snapshot after a purification round. Round 0 is the initial ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub blend: IdealState,
    pub fidelity: f64,
    pub conditional_fidelity: f64,
    /// Keep probability of this round (1 for round 0).
    pub survival: f64,
    /// Initial pairs consumed per surviving pair so far.
    pub resources: f64,
    /// Security parameter `1 - F_cond`.
    pub epsilon: f64,
    pub state: FlaggedState16,
}

impl RoundRecord {
    fn new(round: usize, state: FlaggedState16, survival: f64, resources: f64) -> RoundRecord {
        RoundRecord {
            round,
            blend: aggregate(&state),
            fidelity: state.fidelity(),
            conditional_fidelity: conditional_fidelity(&state),
            survival,
            resources,
            epsilon: state.epsilon(),
            state,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<RoundRecord>,
    /// Whether iteration stopped because successive states agreed within `tol`.
    pub converged: bool,
}

impl Trajectory {
    pub fn last(&self) -> &RoundRecord {
        self.records.last().expect("trajectory always holds the initial record")
    }

    pub fn final_state(&self) -> &FlaggedState16 {
        &self.last().state
    }
}

/// Applies [`flagged_step`] up to `rounds` times, stopping early once the
/// max-norm change between successive states drops below `tol`
/// (`tol <= 0` disables early stopping). Resources follow `R' = 2R / N`.
pub fn iterate(initial: &FlaggedState16, noise: &NoiseModel, rounds: usize, tol: f64) -> Result<Trajectory> {
    let mut records = Vec::with_capacity(rounds.min(1024) + 1);
    records.push(RoundRecord::new(0, *initial, 1.0, 1.0));
    let mut state = *initial;
    let mut resources = 1.0;
    let mut converged = false;
    for round in 1..=rounds {
        let (next, survival) = flagged_step(&state, noise)?;
        resources *= 2.0 / survival;
        let change = state
            .coeffs()
            .iter()
            .zip(next.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        state = next;
        records.push(RoundRecord::new(round, state, survival, resources));
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(Trajectory { records, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::state::{make_initial_flagged, make_werner};
    use approx::assert_abs_diff_eq;

    fn werner(f: f64) -> FlaggedState16 {
        make_initial_flagged(&make_werner(f).unwrap())
    }

    #[test]
    fn zero_rounds_yields_initial_record() {
        let t = iterate(&werner(0.7), &NoiseModel::noiseless(), 0, DEFAULT_TOL).unwrap();
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.records[0].fidelity, 0.7);
        assert_eq!(t.records[0].resources, 1.0);
        assert_abs_diff_eq!(t.records[0].epsilon, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn noiseless_werner_purifies_monotonically() {
        let t = iterate(&werner(0.7), &NoiseModel::noiseless(), 40, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(t.records[1].fidelity, 0.735294117647, epsilon = 1e-12);
        assert_abs_diff_eq!(t.records[1].resources, 2.0 / 0.68, epsilon = 1e-12);
        for w in t.records.windows(2) {
            assert!(w[1].fidelity >= w[0].fidelity);
            assert!(w[1].resources >= w[0].resources);
        }
        assert!(t.last().fidelity > 1.0 - 1e-12);
        assert!(t.converged);
    }

    #[test]
    fn noisy_werner_reaches_fmax_below_one_with_unit_conditional_fidelity() {
        let noise = NoiseModel::one_qubit_white(0.97)
            .unwrap()
            .compose(&NoiseModel::two_qubit_white(0.97).unwrap());
        let t = iterate(&werner(0.7), &noise, 500, DEFAULT_TOL).unwrap();
        let last = t.last();
        assert!(t.converged);
        assert!(last.fidelity < 0.96 && last.fidelity > 0.9);
        assert!(last.conditional_fidelity > 1.0 - 1e-9);
        for r in &t.records {
            assert!((0.0..=1.0).contains(&r.survival));
            assert!(r.resources >= 1.0);
        }
    }
}
