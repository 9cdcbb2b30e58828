use serde::Serialize;

use super::fixpoint::{binary_fixpoint_closed_form, find_fixpoint};
use super::jacobian::{jacobian, max_eigenvalue_modulus};
use crate::bell_algebra::{BellLabel, TransitionTable};
use crate::recurrence::{
    aggregate_step, binary_step, BinaryFlaggedState, BinaryNoise, Coefficients, FlaggedState16, IdealState,
    NoiseModel, QuadraticMap,
};
use crate::{Error, Result};

pub const MAX_BISECTIONS: usize = 60;
pub const CRITICAL_BINARY_BRACKET: (f64, f64) = (0.76, 0.80);
pub const CRITICAL_BINARY_TOL: f64 = 1e-7;
/// The lower white-noise threshold sits ~1e-5 above 0.8983, so the interval
/// is resolved well below the width of the regime itself.
pub const CRITICAL_WHITE_TOL: f64 = 1e-6;
pub const WHITE_LOWER_BRACKET: (f64, f64) = (0.85, 0.95);
pub const WHITE_UPPER_HI: f64 = 0.95;

// Iteration-based binary probe.
const PROBE_KICK: f64 = 1e-9;
const PROBE_TRANSIENT: usize = 200;
const PROBE_ROUNDS: usize = 20_000;

// Aggregate-map settling for the white-noise purification threshold.
const SETTLE_TOL: f64 = 1e-14;
const SETTLE_MAX_ITER: usize = 200_000;
const PURIFIES_MARGIN: f64 = 1e-3;

/// Bisects on a predicate that is `true` at `hi` and `false` at `lo` (or vice
/// versa); returns the final `(lo, hi)` bracket with the predicate values kept.
fn bisect(
    quantity: &'static str,
    bracket: (f64, f64),
    tol: f64,
    mut above: impl FnMut(f64) -> Result<bool>,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = bracket;
    let (at_lo, at_hi) = (above(lo)?, above(hi)?);
    if at_lo == at_hi {
        return Err(Error::NoSignChange { quantity, lo, hi });
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if above(mid)? == at_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    log::debug!("{quantity}: bracket [{lo}, {hi}]");
    Ok((lo, hi))
}

/// Spectral radius of the binary-map Jacobian at the closed-form fixpoint,
/// uncorrelated noise.
pub fn binary_spectral_radius(f0: f64) -> Result<f64> {
    let noise = BinaryNoise::uncorrelated(f0)?;
    let p = binary_fixpoint_closed_form(f0)?;
    max_eigenvalue_modulus(&jacobian(&QuadraticMap::binary(&noise), p.as_slice()))
}

/// Bisection on `max|λ| - 1` at the closed-form binary fixpoint.
pub fn critical_f0_binary(bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (lo, hi) = bisect("binary spectral radius - 1", bracket, tol, |f0| {
        Ok(binary_spectral_radius(f0)? < 1.0)
    })?;
    Ok(0.5 * (lo + hi))
}

/// Whether the binary map pulls a tiny perturbation back towards the
/// closed-form fixpoint, judged from the iteration alone.
fn binary_fixpoint_attracts(f0: f64) -> Result<bool> {
    let noise = BinaryNoise::uncorrelated(f0)?;
    let p = *binary_fixpoint_closed_form(f0)?.coeffs();
    let kicked = [p[0] - PROBE_KICK, p[1] + PROBE_KICK, p[2] + PROBE_KICK, p[3] - PROBE_KICK];
    let total: f64 = kicked.iter().sum();
    let mut s = BinaryFlaggedState::new(kicked.map(|x| x / total))?;
    let distance = |s: &BinaryFlaggedState| {
        s.coeffs()
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    for _ in 0..PROBE_TRANSIENT {
        s = binary_step(&s, &noise)?.0;
    }
    let d0 = distance(&s);
    for _ in 0..PROBE_ROUNDS {
        s = binary_step(&s, &noise)?.0;
    }
    Ok(distance(&s) <= d0)
}

/// Independent estimate of the binary critical point: bisection on whether
/// iterating the map returns a perturbed start to the closed-form fixpoint.
pub fn critical_f0_binary_iterative(bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (lo, hi) = bisect("binary perturbation growth", bracket, tol, binary_fixpoint_attracts)?;
    Ok(0.5 * (lo + hi))
}

fn settled_blend(noise: &NoiseModel) -> Result<IdealState> {
    let r = find_fixpoint(
        |s| aggregate_step(s, noise),
        IdealState::pure(BellLabel::PhiPlus),
        SETTLE_TOL,
        SETTLE_MAX_ITER,
    )?;
    if !r.converged {
        log::warn!("aggregate map not settled after {} rounds (change {:e})", r.iterations, r.last_change);
    }
    Ok(r.state)
}

/// Limit fidelity of the flag-free blend under `one_qubit_white(f0)`, started
/// from pure Φ⁺. Equals 1/4 below the purification threshold.
pub fn white_noise_lower_indicator(f0: f64) -> Result<f64> {
    Ok(settled_blend(&NoiseModel::one_qubit_white(f0)?)?.fidelity())
}

/// Spectral radius of the 16-dimensional flagged map at the correctly flagged
/// embedding of the `F_max` fixpoint. Below 1 the flag errors die out.
pub fn white_noise_upper_radius(f0: f64) -> Result<f64> {
    let noise = NoiseModel::one_qubit_white(f0)?;
    let blend = settled_blend(&noise)?;
    let point = FlaggedState16::diagonal(&blend);
    let map = QuadraticMap::flagged(&noise, TransitionTable::shared());
    max_eigenvalue_modulus(&jacobian(&map, point.as_slice()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalInterval {
    /// Purification threshold: above it `F_max` exceeds the fully mixed value.
    pub lower: f64,
    /// Security threshold: above it `1 - F_cond` goes to zero.
    pub upper: f64,
    pub tol: f64,
}

impl CriticalInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Both one-qubit white-noise thresholds, each bisected to `tol`.
pub fn critical_interval_white_noise(tol: f64) -> Result<CriticalInterval> {
    let (lo, hi) = bisect("white-noise purification", WHITE_LOWER_BRACKET, tol, |f0| {
        Ok(white_noise_lower_indicator(f0)? > 0.25 + PURIFIES_MARGIN)
    })?;
    let lower = 0.5 * (lo + hi);
    // `hi` purifies, so the diagonal fixpoint there is the F_max branch.
    let (ulo, uhi) = bisect("white-noise flagged radius - 1", (hi, WHITE_UPPER_HI), tol, |f0| {
        Ok(white_noise_upper_radius(f0)? < 1.0)
    })?;
    Ok(CriticalInterval {
        lower,
        upper: 0.5 * (ulo + uhi),
        tol,
    })
}
