use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::recurrence::{iterate, make_initial_flagged, make_werner, FlaggedState16, NoiseModel};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// No purification: `F` and `F_cond` both fall to 1/4.
    HighNoise,
    /// Purifies, but the flag errors never die out.
    Intermediate,
    /// `F → F_max` and `F_cond → 1`.
    Security,
}

impl RegimeLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegimeLabel::HighNoise => "high_noise",
            RegimeLabel::Intermediate => "intermediate",
            RegimeLabel::Security => "security",
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Finite-run proxies for the asymptotic regime definitions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeCriteria {
    pub max_rounds: usize,
    pub tol: f64,
    /// `1 - F_cond` below this counts as secure.
    pub eps_sec: f64,
    /// Rounds over which `1 - F_cond` must not increase.
    pub window: usize,
    /// `|F - 1/4|` below this counts as no purification.
    pub high_noise_band: f64,
}

impl Default for RegimeCriteria {
    fn default() -> Self {
        RegimeCriteria {
            max_rounds: 500,
            tol: 1e-12,
            eps_sec: 1e-6,
            window: 20,
            high_noise_band: 1e-3,
        }
    }
}

/// Werner fidelity of the default starting ensemble. A start that is not
/// correctly flagged is needed: the correctly flagged subspace is invariant,
/// so a pure start could never exhibit the intermediate regime.
pub const DEFAULT_REGIME_WERNER: f64 = 0.95;

pub fn default_regime_initial() -> FlaggedState16 {
    make_initial_flagged(&make_werner(DEFAULT_REGIME_WERNER).expect("valid fidelity"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeClassification {
    pub label: RegimeLabel,
    /// False when the run hit `max_rounds` before settling.
    pub confident: bool,
    pub rounds: usize,
    pub fidelity: f64,
    pub conditional_fidelity: f64,
    pub epsilon: f64,
}

// Slack for round-off when checking that epsilon does not grow.
const EPS_SLACK: f64 = 1e-15;

pub fn classify_regime(
    noise: &NoiseModel,
    initial: &FlaggedState16,
    criteria: &RegimeCriteria,
) -> Result<RegimeClassification> {
    let t = iterate(initial, noise, criteria.max_rounds, criteria.tol)?;
    let last = t.last();
    let start = t.records.len().saturating_sub(criteria.window + 1);
    let settling = t.records[start..]
        .windows(2)
        .all(|w| w[1].epsilon <= w[0].epsilon + EPS_SLACK);
    let label = if (last.fidelity - 0.25).abs() < criteria.high_noise_band {
        RegimeLabel::HighNoise
    } else if last.epsilon < criteria.eps_sec && settling {
        RegimeLabel::Security
    } else {
        RegimeLabel::Intermediate
    };
    Ok(RegimeClassification {
        label,
        confident: t.converged,
        rounds: last.round,
        fidelity: last.fidelity,
        conditional_fidelity: last.conditional_fidelity,
        epsilon: last.epsilon,
    })
}

/// Noise table with `f_II = f00` and the other 15 entries drawn uniformly from
/// the simplex of mass `1 - f00`.
pub fn sample_noise_with_f00<R: Rng + ?Sized>(f00: f64, rng: &mut R) -> Result<NoiseModel> {
    if !(0.0..=1.0).contains(&f00) {
        return Err(Error::Domain {
            what: "f00",
            value: f00,
            domain: "[0, 1]",
        });
    }
    let mut e = [0.0; 16];
    e[0] = f00;
    let mut total = 0.0;
    for x in e[1..].iter_mut() {
        *x = rng.sample::<f64, _>(Exp1);
        total += *x;
    }
    for x in e[1..].iter_mut() {
        *x *= (1.0 - f00) / total;
    }
    NoiseModel::from_entries(&e)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeHistogramRow {
    pub f00: f64,
    pub frac_high: f64,
    pub frac_intermediate: f64,
    pub frac_security: f64,
    pub samples: usize,
    /// Samples whose run did not settle within `max_rounds`.
    pub low_confidence: usize,
}

/// Regime frequencies over random noise tables at each `f00`. Sample `k` at
/// grid point `g` uses ChaCha8 stream `(g << 32) | k` of `seed`, so the
/// result does not depend on the number of worker threads.
pub fn regime_histogram(
    f00_grid: &[f64],
    samples_per_point: usize,
    seed: u64,
    initial: &FlaggedState16,
    criteria: &RegimeCriteria,
) -> Result<Vec<RegimeHistogramRow>> {
    if samples_per_point == 0 {
        return Err(Error::config("samples_per_point", "must be at least 1"));
    }
    f00_grid
        .iter()
        .enumerate()
        .map(|(g, &f00)| {
            let results: Vec<RegimeClassification> = (0..samples_per_point)
                .into_par_iter()
                .map(|k| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((g as u64) << 32) | k as u64);
                    let noise = sample_noise_with_f00(f00, &mut rng)?;
                    classify_regime(&noise, initial, criteria)
                })
                .collect::<Result<_>>()?;
            let count = |l| results.iter().filter(|r| r.label == l).count() as f64;
            let n = samples_per_point as f64;
            Ok(RegimeHistogramRow {
                f00,
                frac_high: count(RegimeLabel::HighNoise) / n,
                frac_intermediate: count(RegimeLabel::Intermediate) / n,
                frac_security: count(RegimeLabel::Security) / n,
                samples: samples_per_point,
                low_confidence: results.iter().filter(|r| !r.confident).count(),
            })
        })
        .collect()
}
