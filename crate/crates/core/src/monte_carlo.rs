//! Pair-by-pair simulation of the distillation with explicit lab-demon flags.
//!
//! Randomness is drawn from ChaCha8 streams keyed by `(round, purpose)`; each
//! pair slot reads its uniform from a fixed word position of its stream, so
//! results are identical for any rayon pool size.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell_algebra::{flag_update, pauli_flag_bits, BellLabel, ErrorFlag, PauliLabel, TransitionTable};
use crate::recurrence::{cell, IdealState, NoiseModel};
use crate::{Error, Result};

pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.9)";
pub const DEFAULT_ENSEMBLE: usize = 1_000_000;

const PURPOSE_INITIAL: u64 = 0;
const PURPOSE_SHUFFLE: u64 = 1;
const PURPOSE_NOISE: u64 = 2;

// Slots handed to one worker at a time. Only affects scheduling.
const BLOCK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PairRecord {
    pub bell: BellLabel,
    pub flag: ErrorFlag,
}

impl PairRecord {
    pub fn cell(&self) -> usize {
        cell(self.bell, self.flag)
    }

    pub fn correctly_flagged(&self) -> bool {
        self.flag == self.bell.matching_flag()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RngSpec {
    pub seed: u64,
}

impl RngSpec {
    pub fn new(seed: u64) -> RngSpec {
        RngSpec { seed }
    }

    fn stream(&self, round: u64, purpose: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(round << 8 | purpose);
        rng
    }

    /// One uniform per slot, slot `i` taken from words `2i, 2i+1` of the stream.
    fn uniforms(&self, round: u64, purpose: u64, slots: usize) -> Vec<f64> {
        let base = self.stream(round, purpose);
        let mut out = vec![0.0; slots];
        out.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
            let mut rng = base.clone();
            rng.set_word_pos(2 * (b * BLOCK) as u128);
            for u in chunk.iter_mut() {
                *u = rng.random::<f64>();
            }
        });
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub round: usize,
    pub pairs_remaining: usize,
    /// Pair-of-pairs whose source survived this round.
    pub kept: usize,
    pub discarded: usize,
    pub dropped_odd: usize,
    /// `None` once the ensemble is empty.
    pub fidelity_hat: Option<f64>,
    pub conditional_fidelity_hat: Option<f64>,
    /// Counts per (Bell, flag) cell in storage order.
    pub histogram: [u64; 16],
}

impl EnsembleStats {
    fn of(round: usize, pairs: &[PairRecord], kept: usize, discarded: usize, dropped_odd: usize) -> EnsembleStats {
        let mut histogram = [0u64; 16];
        for p in pairs {
            histogram[p.cell()] += 1;
        }
        let n = pairs.len();
        let phi: u64 = histogram[0..4].iter().sum();
        let matched: u64 = BellLabel::ALL.iter().map(|b| histogram[cell(*b, b.matching_flag())]).sum();
        let frac = |c: u64| (n > 0).then(|| c as f64 / n as f64);
        EnsembleStats {
            round,
            pairs_remaining: n,
            kept,
            discarded,
            dropped_odd,
            fidelity_hat: frac(phi),
            conditional_fidelity_hat: frac(matched),
            histogram,
        }
    }
}

fn cdf(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// Inverse-CDF lookup; round-off at the top end falls to the last outcome
/// with positive weight.
fn pick(cdf: &[f64], weights: &[f64], u: f64) -> usize {
    cdf.iter()
        .position(|&c| u < c)
        .unwrap_or_else(|| weights.iter().rposition(|&w| w > 0.0).unwrap_or(0))
}

/// Draws `size` pairs from `s`, all with flag `00`.
pub fn sample_initial_ensemble(s: &IdealState, size: usize, rng: &RngSpec) -> Result<Vec<PairRecord>> {
    if size < 2 {
        return Err(Error::Domain {
            what: "ensemble size",
            value: size as f64,
            domain: ">= 2",
        });
    }
    let weights = s.coeffs();
    let c = cdf(weights);
    Ok(rng
        .uniforms(0, PURPOSE_INITIAL, size)
        .into_par_iter()
        .map(|u| PairRecord {
            bell: BellLabel::from_index(pick(&c, weights, u)),
            flag: ErrorFlag::CLEAR,
        })
        .collect())
}

/// One purification round over the whole ensemble: seeded shuffle, adjacent
/// pairing, one noise draw per pair of pairs, table lookup and flag update.
pub fn mc_round(
    mut pairs: Vec<PairRecord>,
    noise: &NoiseModel,
    rng: &RngSpec,
    round: usize,
) -> (Vec<PairRecord>, EnsembleStats) {
    let table = TransitionTable::shared();
    pairs.shuffle(&mut rng.stream(round as u64, PURPOSE_SHUFFLE));
    let dropped_odd = pairs.len() % 2;
    let groups = pairs.len() / 2;
    let weights = noise.entries();
    let c = cdf(&weights);
    let draws = rng.uniforms(round as u64, PURPOSE_NOISE, groups);
    let survivors: Vec<PairRecord> = pairs
        .par_chunks_exact(2)
        .zip(draws.par_iter())
        .filter_map(|(two, &u)| {
            let k = pick(&c, &weights, u);
            let (mu, nu) = (PauliLabel::from_index(k / 4), PauliLabel::from_index(k % 4));
            let (src, tgt) = (two[0], two[1]);
            let f1 = src.flag ^ pauli_flag_bits(mu);
            let f2 = tgt.flag ^ pauli_flag_bits(nu);
            table.lookup(src.bell, tgt.bell, mu, nu).map(|bell| PairRecord {
                bell,
                flag: flag_update(f1, f2),
            })
        })
        .collect();
    let kept = survivors.len();
    let stats = EnsembleStats::of(round, &survivors, kept, groups - kept, dropped_odd);
    (survivors, stats)
}

/// Round-0 stats followed by one entry per round, stopping early once fewer
/// than two pairs remain.
pub fn mc_run(s: &IdealState, noise: &NoiseModel, rounds: usize, size: usize, seed: u64) -> Result<Vec<EnsembleStats>> {
    let rng = RngSpec::new(seed);
    let mut pairs = sample_initial_ensemble(s, size, &rng)?;
    let mut stats = vec![EnsembleStats::of(0, &pairs, 0, 0, 0)];
    for round in 1..=rounds {
        if pairs.len() < 2 {
            log::info!("ensemble exhausted before round {round}");
            break;
        }
        let (next, st) = mc_round(pairs, noise, &rng, round);
        pairs = next;
        stats.push(st);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::make_werner;

    fn record(bell: BellLabel) -> PairRecord {
        PairRecord {
            bell,
            flag: ErrorFlag::CLEAR,
        }
    }

    #[test]
    fn pure_initial_ensemble() {
        let pairs = sample_initial_ensemble(&IdealState::pure(BellLabel::PhiPlus), 4, &RngSpec::new(3)).unwrap();
        assert_eq!(pairs, vec![record(BellLabel::PhiPlus); 4]);
        assert!(sample_initial_ensemble(&IdealState::pure(BellLabel::PhiPlus), 1, &RngSpec::new(3)).is_err());
    }

    #[test]
    fn noiseless_round_examples() {
        let rng = RngSpec::new(1);
        let noise = NoiseModel::noiseless();
        let (out, st) = mc_round(vec![record(BellLabel::PhiPlus); 2], &noise, &rng, 1);
        assert_eq!(out, vec![record(BellLabel::PhiPlus)]);
        assert_eq!((st.kept, st.discarded, st.dropped_odd), (1, 0, 0));

        let (out, st) = mc_round(vec![record(BellLabel::PhiPlus), record(BellLabel::PsiPlus)], &noise, &rng, 1);
        assert!(out.is_empty());
        assert_eq!(st.discarded, 1);
        assert_eq!(st.fidelity_hat, None);
    }

    #[test]
    fn odd_leftover_is_dropped() {
        let (out, st) = mc_round(vec![record(BellLabel::PhiPlus); 5], &NoiseModel::noiseless(), &RngSpec::new(1), 1);
        assert_eq!(out.len(), 2);
        assert_eq!(st.dropped_odd, 1);
    }

    #[test]
    fn same_seed_same_ensemble() {
        let s = make_werner(0.7).unwrap();
        let a = sample_initial_ensemble(&s, 10_000, &RngSpec::new(9)).unwrap();
        let b = sample_initial_ensemble(&s, 10_000, &RngSpec::new(9)).unwrap();
        let c = sample_initial_ensemble(&s, 10_000, &RngSpec::new(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniforms_do_not_depend_on_blocking() {
        let rng = RngSpec::new(5);
        let all = rng.uniforms(3, PURPOSE_NOISE, 3 * BLOCK + 17);
        let mut seq = rng.stream(3, PURPOSE_NOISE);
        for u in &all {
            assert_eq!(*u, seq.random::<f64>());
        }
    }
}
