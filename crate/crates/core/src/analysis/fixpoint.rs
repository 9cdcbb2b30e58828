use crate::recurrence::{BinaryFlaggedState, Coefficients};
use crate::{Error, Result};

pub const FIXPOINT_TOL: f64 = 1e-13;
pub const FIXPOINT_MAX_ITER: usize = 10_000;

/// Attracting fixpoint of the binary map under uncorrelated flips with no-flip
/// probability `f0`; real for `f0 >= 3/4`.
///
/// `A0 = (4f0² - 4f0 + (2f0 - 1)√(4f0 - 3) + 1) / (2(2f0 - 1)²)`, `A1 = B0 = 0`, `B1 = 1 - A0`.
pub fn binary_fixpoint_closed_form(f0: f64) -> Result<BinaryFlaggedState> {
    if !(0.75..=1.0).contains(&f0) {
        return Err(Error::Domain {
            what: "binary fixpoint f0",
            value: f0,
            domain: "[3/4, 1]",
        });
    }
    let t = 2.0 * f0 - 1.0;
    let a0 = (4.0 * f0 * f0 - 4.0 * f0 + t * (4.0 * f0 - 3.0).sqrt() + 1.0) / (2.0 * t * t);
    BinaryFlaggedState::new([a0, 0.0, 0.0, 1.0 - a0])
}

#[derive(Clone, Debug)]
pub struct FixpointResult<S> {
    pub state: S,
    pub converged: bool,
    pub iterations: usize,
    /// Max-norm change of the final iteration.
    pub last_change: f64,
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Iterates `step` until successive states differ by less than `tol` in the
/// max norm or `max_iter` steps have run. Non-convergence is reported in the
/// result, not as an error.
pub fn find_fixpoint<S, F>(step: F, initial: S, tol: f64, max_iter: usize) -> Result<FixpointResult<S>>
where
    S: Coefficients,
    F: Fn(&S) -> Result<(S, f64)>,
{
    let mut state = initial;
    let mut last_change = f64::INFINITY;
    for iteration in 1..=max_iter {
        let (next, _) = step(&state)?;
        last_change = max_change(state.as_slice(), next.as_slice());
        state = next;
        if last_change < tol {
            return Ok(FixpointResult {
                state,
                converged: true,
                iterations: iteration,
                last_change,
            });
        }
    }
    Ok(FixpointResult {
        state,
        converged: false,
        iterations: max_iter,
        last_change,
    })
}

/// Max-norm distance between `x` and its image.
pub fn fixpoint_residual<S, F>(step: F, x: &S) -> Result<f64>
where
    S: Coefficients,
    F: Fn(&S) -> Result<(S, f64)>,
{
    let (image, _) = step(x)?;
    Ok(max_change(x.as_slice(), image.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell_algebra::{BellLabel, ErrorFlag};
    use crate::recurrence::{
        binary_step, flagged_step, make_initial_flagged, make_werner, qpa_step_ideal, BinaryNoise, FlaggedState16,
        IdealState, NoiseModel,
    };
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_values() {
        assert_eq!(binary_fixpoint_closed_form(1.0).unwrap().coeffs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(binary_fixpoint_closed_form(0.75).unwrap().coeffs()[0], 0.5, epsilon = 1e-15);
        assert!(binary_fixpoint_closed_form(0.7).is_err());
    }

    #[test]
    fn closed_form_is_fixed_by_the_binary_map() {
        let noise = BinaryNoise::uncorrelated(0.9).unwrap();
        let p = binary_fixpoint_closed_form(0.9).unwrap();
        let r = fixpoint_residual(|s| binary_step(s, &noise), &p).unwrap();
        assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn ideal_map_goes_to_pure_phi_plus() {
        let s = IdealState::new([0.6, 0.2, 0.15, 0.05]).unwrap();
        let r = find_fixpoint(qpa_step_ideal, s, FIXPOINT_TOL, FIXPOINT_MAX_ITER).unwrap();
        assert!(r.converged);
        assert!(r.state.a() > 1.0 - 1e-12);
    }

    #[test]
    fn binary_iteration_matches_closed_form() {
        let noise = BinaryNoise::uncorrelated(0.9).unwrap();
        let start = BinaryFlaggedState::unflagged(0.8, 0.2).unwrap();
        let r = find_fixpoint(|s| binary_step(s, &noise), start, FIXPOINT_TOL, FIXPOINT_MAX_ITER).unwrap();
        let p = binary_fixpoint_closed_form(0.9).unwrap();
        for (a, b) in r.state.coeffs().iter().zip(p.coeffs()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
    }

    #[test]
    fn flagged_noiseless_collects_on_clear_phi_plus() {
        let start = make_initial_flagged(&make_werner(0.7).unwrap());
        let noise = NoiseModel::noiseless();
        let r = find_fixpoint(|s| flagged_step(s, &noise), start, FIXPOINT_TOL, FIXPOINT_MAX_ITER).unwrap();
        assert!(r.converged);
        let target = FlaggedState16::point(BellLabel::PhiPlus, ErrorFlag::CLEAR);
        for (a, b) in r.state.coeffs().iter().zip(target.coeffs()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let noise = BinaryNoise::uncorrelated(0.9).unwrap();
        let start = BinaryFlaggedState::unflagged(0.8, 0.2).unwrap();
        let r = find_fixpoint(|s| binary_step(s, &noise), start, 0.0, 3).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
