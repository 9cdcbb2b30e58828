//! Exact state-vector simulation of one protocol round on two Bell pairs.
//!
//! Qubit order in the 16-dimensional vector (most significant bit first):
//! A1, B1, A2, B2. Pair 1 is the BCNOT source, pair 2 the target.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C;

use super::{BellLabel, PauliLabel};
use crate::{Error, Result};

type Gate = [[C; 2]; 2];
type State = [C; 16];

const A1: usize = 3;
const B1: usize = 2;
const A2: usize = 1;
const B2: usize = 0;

const TOL: f64 = 1e-9;

/// Sign convention for the π/2 x-rotation applied by Alice.
///
/// `Standard` is `exp(-iπ/4 σx)` for Alice and its inverse for Bob;
/// `Conjugate` swaps the two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RotationConvention {
    #[default]
    Standard,
    Conjugate,
}

fn pauli(p: PauliLabel) -> Gate {
    let o = C::new(0.0, 0.0);
    let l = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    match p {
        PauliLabel::I => [[l, o], [o, l]],
        PauliLabel::X => [[o, l], [l, o]],
        PauliLabel::Y => [[o, -i], [i, o]],
        PauliLabel::Z => [[l, o], [o, -l]],
    }
}

/// `exp(-i sign π/4 σx)`.
fn x_rotation(sign: f64) -> Gate {
    let c = C::new(FRAC_1_SQRT_2, 0.0);
    let s = C::new(0.0, -sign * FRAC_1_SQRT_2);
    [[c, s], [s, c]]
}

fn bell_vector(b: BellLabel) -> [C; 4] {
    let h = C::new(FRAC_1_SQRT_2, 0.0);
    let o = C::new(0.0, 0.0);
    // index = 2 * alice + bob
    match b {
        BellLabel::PhiPlus => [h, o, o, h],
        BellLabel::PhiMinus => [h, o, o, -h],
        BellLabel::PsiPlus => [o, h, h, o],
        BellLabel::PsiMinus => [o, h, -h, o],
    }
}

fn apply_single(state: &mut State, qubit: usize, g: &Gate) {
    let mask = 1 << qubit;
    for idx in 0..16 {
        if idx & mask == 0 {
            let (a0, a1) = (state[idx], state[idx | mask]);
            state[idx] = g[0][0] * a0 + g[0][1] * a1;
            state[idx | mask] = g[1][0] * a0 + g[1][1] * a1;
        }
    }
}

fn apply_cnot(state: &mut State, control: usize, target: usize) {
    for idx in 0..16 {
        if idx & (1 << control) != 0 && idx & (1 << target) == 0 {
            state.swap(idx, idx | (1 << target));
        }
    }
}

fn product_state(s1: BellLabel, s2: BellLabel) -> State {
    let (v1, v2) = (bell_vector(s1), bell_vector(s2));
    let mut state = [C::new(0.0, 0.0); 16];
    for (i, a) in v1.iter().enumerate() {
        for (j, b) in v2.iter().enumerate() {
            // i = 2*A1 + B1, j = 2*A2 + B2
            state[i << 2 | j] = a * b;
        }
    }
    state
}

/// Pair-1 amplitudes conditioned on z outcomes `(a2, b2)` of the target pair.
fn source_branch(state: &State, a2: usize, b2: usize) -> [C; 4] {
    let mut v = [C::new(0.0, 0.0); 4];
    for (k, slot) in v.iter_mut().enumerate() {
        *slot = state[k << 2 | a2 << A2 | b2 << B2];
    }
    v
}

fn identify_bell(v: &[C; 4]) -> Option<BellLabel> {
    let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    BellLabel::ALL.into_iter().find(|&b| {
        let overlap: C = bell_vector(b).iter().zip(v).map(|(x, y)| x.conj() * y).sum();
        (overlap.norm_sqr() / norm2 - 1.0).abs() < TOL
    })
}

/// Runs one protocol round on `|s1⟩⊗|s2⟩` after the lab demon applied
/// `σ_mu` to A1 and `σ_nu` to A2, and returns the Bell label of the kept
/// source pair, or `None` when the target measurements disagree.
pub fn oracle_protocol_step(
    s1: BellLabel,
    s2: BellLabel,
    mu: PauliLabel,
    nu: PauliLabel,
    convention: RotationConvention,
) -> Result<Option<BellLabel>> {
    let mut state = product_state(s1, s2);

    apply_single(&mut state, A1, &pauli(mu));
    apply_single(&mut state, A2, &pauli(nu));

    let sign = match convention {
        RotationConvention::Standard => 1.0,
        RotationConvention::Conjugate => -1.0,
    };
    let (alice, bob) = (x_rotation(sign), x_rotation(-sign));
    for q in [A1, A2] {
        apply_single(&mut state, q, &alice);
    }
    for q in [B1, B2] {
        apply_single(&mut state, q, &bob);
    }

    apply_cnot(&mut state, A1, A2);
    apply_cnot(&mut state, B1, B2);

    let prob = |a2, b2| -> f64 { source_branch(&state, a2, b2).iter().map(|a| a.norm_sqr()).sum() };
    let coincide = prob(0, 0) + prob(1, 1);
    let differ = prob(0, 1) + prob(1, 0);

    if differ < TOL && (coincide - 1.0).abs() < TOL {
        let mut result = None;
        for (a2, b2) in [(0, 0), (1, 1)] {
            if prob(a2, b2) < TOL {
                continue;
            }
            let label = identify_bell(&source_branch(&state, a2, b2)).ok_or_else(|| {
                Error::OracleInconsistent(format!(
                    "source pair is not a Bell state for ({s1}, {s2}, {mu}, {nu}), outcome {a2}{b2}"
                ))
            })?;
            match result {
                Some(prev) if prev != label => {
                    return Err(Error::OracleInconsistent(format!(
                        "outcome branches disagree for ({s1}, {s2}, {mu}, {nu}): {prev} vs {label}"
                    )))
                }
                _ => result = Some(label),
            }
        }
        Ok(result)
    } else if coincide < TOL && (differ - 1.0).abs() < TOL {
        Ok(None)
    } else {
        Err(Error::OracleInconsistent(format!(
            "non-deterministic parity for ({s1}, {s2}, {mu}, {nu}): p(coincide) = {coincide}"
        )))
    }
}
