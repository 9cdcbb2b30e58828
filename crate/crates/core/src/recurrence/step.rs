use std::sync::atomic::{AtomicU64, Ordering};

use super::noise::{BinaryNoise, NoiseModel};
use super::state::{cell, BinaryFlaggedState, FlaggedState16, IdealState};
use crate::bell_algebra::{flag_update, pauli_flag_bits, BellLabel, ErrorFlag, PauliLabel, TransitionTable};
use crate::{Error, Result};

/// Negative coefficients down to this value are treated as round-off and clamped.
pub const CLAMP_THRESHOLD: f64 = 1e-14;

static CLAMPED: AtomicU64 = AtomicU64::new(0);

/// Process-wide count of coefficients clamped to zero after round-off.
pub fn clamp_warnings() -> u64 {
    CLAMPED.load(Ordering::Relaxed)
}

/// Divides by the total, returning it as the survival probability.
pub(crate) fn normalize<const K: usize>(mut raw: [f64; K]) -> Result<([f64; K], f64)> {
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EnsembleAnnihilated);
    }
    for (index, x) in raw.iter_mut().enumerate() {
        if *x < 0.0 {
            if *x < -CLAMP_THRESHOLD {
                return Err(Error::NegativeProbability {
                    what: "recurrence output",
                    index,
                    value: *x,
                });
            }
            log::warn!("clamping coefficient {index} from {x:e} to 0");
            CLAMPED.fetch_add(1, Ordering::Relaxed);
            *x = 0.0;
        }
    }
    for x in raw.iter_mut() {
        *x /= total;
    }
    Ok((raw, total))
}

/// Unnormalized noiseless QPA recursion.
pub fn ideal_unnormalized(s: &[f64; 4]) -> [f64; 4] {
    let [a, b, c, d] = *s;
    [a * a + b * b, 2.0 * c * d, c * c + d * d, 2.0 * a * b]
}

/// One noiseless round: `A' = (A² + B²)/N`, `B' = 2CD/N`, `C' = (C² + D²)/N`,
/// `D' = 2AB/N` with `N = (A + B)² + (C + D)²`.
pub fn qpa_step_ideal(s: &IdealState) -> Result<(IdealState, f64)> {
    let (v, n) = normalize(ideal_unnormalized(s.coeffs()))?;
    Ok((IdealState::from_normalized(v), n))
}

/// Unnormalized binary flagged recursion for `(A0, A1, B0, B1)`.
pub fn binary_unnormalized(s: &[f64; 4], n: &BinaryNoise) -> [f64; 4] {
    let [a0, a1, b0, b1] = *s;
    let (f00, f11, fs) = (n.f00, n.f11, n.f_s());
    [
        f00 * (a0 * a0 + 2.0 * a0 * a1) + f11 * (b1 * b1 + 2.0 * b0 * b1) + fs * (a0 * b1 + a1 * b1 + a0 * b0),
        f00 * a1 * a1 + f11 * b0 * b0 + fs * a1 * b0,
        f00 * (b0 * b0 + 2.0 * b0 * b1) + f11 * (a1 * a1 + 2.0 * a0 * a1) + fs * (b0 * a1 + b1 * a1 + b0 * a0),
        f00 * b1 * b1 + f11 * a0 * a0 + fs * b1 * a0,
    ]
}

/// Closed-form survival probability of the binary round,
/// `(f00 + f11)((A0 + A1)² + (B0 + B1)²) + 2 f_s (A0 + A1)(B0 + B1)`.
pub fn binary_survival(s: &[f64; 4], n: &BinaryNoise) -> f64 {
    let a = s[0] + s[1];
    let b = s[2] + s[3];
    (n.f00 + n.f11) * (a * a + b * b) + 2.0 * n.f_s() * a * b
}

pub fn binary_step(s: &BinaryFlaggedState, n: &BinaryNoise) -> Result<(BinaryFlaggedState, f64)> {
    let (v, total) = normalize(binary_unnormalized(s.coeffs(), n))?;
    Ok((BinaryFlaggedState::from_normalized(v), total))
}

/// Unnormalized flagged recursion, summed directly over the transition table:
/// noise flips flags by the Pauli bits, then kept pairs combine flags via
/// [`flag_update`].
pub fn flagged_unnormalized(w: &[f64; 16], noise: &NoiseModel, table: &TransitionTable) -> [f64; 16] {
    let mut out = [0.0; 16];
    for mu in PauliLabel::ALL {
        for nu in PauliLabel::ALL {
            let p = noise.get(mu, nu);
            if p == 0.0 {
                continue;
            }
            let (dmu, dnu) = (pauli_flag_bits(mu), pauli_flag_bits(nu));
            for s1 in BellLabel::ALL {
                for s2 in BellLabel::ALL {
                    let Some(r) = table.lookup(s1, s2, mu, nu) else {
                        continue;
                    };
                    for f1 in ErrorFlag::ALL {
                        let w1 = p * w[cell(s1, f1)];
                        if w1 == 0.0 {
                            continue;
                        }
                        for f2 in ErrorFlag::ALL {
                            let g = flag_update(f1 ^ dmu, f2 ^ dnu);
                            out[cell(r, g)] += w1 * w[cell(s2, f2)];
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn flagged_step_with(
    s: &FlaggedState16,
    noise: &NoiseModel,
    table: &TransitionTable,
) -> Result<(FlaggedState16, f64)> {
    let (v, total) = normalize(flagged_unnormalized(s.coeffs(), noise, table))?;
    Ok((FlaggedState16::from_normalized(v), total))
}

/// One noisy round of the full flagged ensemble, using the shared transition table.
pub fn flagged_step(s: &FlaggedState16, noise: &NoiseModel) -> Result<(FlaggedState16, f64)> {
    flagged_step_with(s, noise, TransitionTable::shared())
}

/// Unnormalized noisy recursion of the blended (flag-free) ensemble.
pub fn aggregate_unnormalized(s: &[f64; 4], noise: &NoiseModel, table: &TransitionTable) -> [f64; 4] {
    let mut out = [0.0; 4];
    for mu in PauliLabel::ALL {
        for nu in PauliLabel::ALL {
            let p = noise.get(mu, nu);
            if p == 0.0 {
                continue;
            }
            for s1 in BellLabel::ALL {
                for s2 in BellLabel::ALL {
                    if let Some(r) = table.lookup(s1, s2, mu, nu) {
                        out[r.index()] += p * s[s1.index()] * s[s2.index()];
                    }
                }
            }
        }
    }
    out
}

/// Noisy round of the blend that Alice and Bob see without flags; reduces to
/// [`qpa_step_ideal`] for noiseless apparatus.
pub fn aggregate_step(s: &IdealState, noise: &NoiseModel) -> Result<(IdealState, f64)> {
    let (v, total) = normalize(aggregate_unnormalized(s.coeffs(), noise, TransitionTable::shared()))?;
    Ok((IdealState::from_normalized(v), total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::state::{aggregate, make_initial_flagged, make_werner, Coefficients};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(*x, *y, epsilon = tol);
        }
    }

    #[test]
    fn ideal_examples() {
        let (s, n) = qpa_step_ideal(&IdealState::pure(BellLabel::PhiPlus)).unwrap();
        assert_eq!(n, 1.0);
        assert_eq!(s.coeffs(), &[1.0, 0.0, 0.0, 0.0]);

        // A² + B² = 0.5, 2CD = 0.02, C² + D² = 0.02, 2AB = 0.14, N = 0.68
        let (s, n) = qpa_step_ideal(&IdealState::new([0.7, 0.1, 0.1, 0.1]).unwrap()).unwrap();
        assert_abs_diff_eq!(n, 0.68, epsilon = 1e-15);
        close(s.coeffs(), &[0.5 / 0.68, 0.02 / 0.68, 0.02 / 0.68, 0.14 / 0.68], 1e-15);
        close(s.coeffs(), &[0.7353, 0.0294, 0.0294, 0.2059], 5e-5);

        let (s, n) = qpa_step_ideal(&IdealState::new([0.25; 4]).unwrap()).unwrap();
        assert_eq!(n, 0.5);
        close(s.coeffs(), &[0.25; 4], 1e-15);
    }

    #[test]
    fn binary_examples() {
        let noiseless = BinaryNoise::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let pure = BinaryFlaggedState::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        let (s, n) = binary_step(&pure, &noiseless).unwrap();
        assert_eq!((s.coeffs(), n), (&[1.0, 0.0, 0.0, 0.0], 1.0));

        let flips = BinaryNoise::new(0.9, 0.0, 0.0, 0.1).unwrap();
        let (s, n) = binary_step(&pure, &flips).unwrap();
        assert_abs_diff_eq!(n, 1.0, epsilon = 1e-15);
        close(s.coeffs(), &[0.9, 0.0, 0.0, 0.1], 1e-15);

        let s0 = BinaryFlaggedState::new([0.8, 0.0, 0.2, 0.0]).unwrap();
        let (s, n) = binary_step(&s0, &noiseless).unwrap();
        assert_abs_diff_eq!(n, 0.68, epsilon = 1e-15);
        close(s.coeffs(), &[0.64 / 0.68, 0.0, 0.04 / 0.68, 0.0], 1e-15);
        close(s.coeffs(), &[0.9412, 0.0, 0.0588, 0.0], 5e-5);
    }

    #[test]
    fn flagged_fixed_cell_and_noiseless_aggregate() {
        let s = FlaggedState16::point(BellLabel::PhiPlus, ErrorFlag::CLEAR);
        let (out, n) = flagged_step(&s, &NoiseModel::noiseless()).unwrap();
        assert_eq!(out, s);
        assert_eq!(n, 1.0);

        let w0 = make_initial_flagged(&make_werner(0.7).unwrap());
        let (w1, n) = flagged_step(&w0, &NoiseModel::noiseless()).unwrap();
        assert_abs_diff_eq!(n, 0.68, epsilon = 1e-15);
        assert_abs_diff_eq!(w1.fidelity(), 0.5 / 0.68, epsilon = 1e-15);
    }

    #[test]
    fn annihilation_and_clamping() {
        assert!(matches!(normalize([0.0, 0.0]), Err(Error::EnsembleAnnihilated)));
        let before = clamp_warnings();
        let (v, _) = normalize([1.0, -1e-16]).unwrap();
        assert_eq!(v[1], 0.0);
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-15);
        assert!(clamp_warnings() > before);
        assert!(normalize([1.0, -1e-10]).is_err());
    }

    #[test]
    fn binary_survival_matches_sum() {
        let n = BinaryNoise::new(0.6, 0.15, 0.05, 0.2).unwrap();
        let s = [0.4, 0.1, 0.3, 0.2];
        let raw: f64 = binary_unnormalized(&s, &n).iter().sum();
        assert_abs_diff_eq!(raw, binary_survival(&s, &n), epsilon = 1e-15);
    }

    fn flagged_strategy() -> impl Strategy<Value = FlaggedState16> {
        proptest::collection::vec(0.0f64..1.0, 16).prop_map(|v| {
            let s: f64 = v.iter().sum::<f64>() + 1e-9;
            let v: Vec<f64> = v.iter().map(|x| x / s).collect();
            let rest = 1.0 - v.iter().sum::<f64>();
            let mut v = v;
            v[0] += rest;
            FlaggedState16::try_from_slice(&v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn flags_never_influence_the_blend(s in flagged_strategy(), f0 in 0.7f64..1.0) {
            let noise = NoiseModel::one_qubit_white(f0).unwrap().compose(&NoiseModel::two_qubit_white(0.95).unwrap());
            let (out, n) = flagged_step(&s, &noise).unwrap();
            let (agg, n_agg) = aggregate_step(&aggregate(&s), &noise).unwrap();
            prop_assert!((n - n_agg).abs() < 1e-12);
            for (x, y) in aggregate(&out).coeffs().iter().zip(agg.coeffs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            let total: f64 = out.coeffs().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(out.coeffs().iter().all(|x| *x >= 0.0));
        }

        #[test]
        fn binary_support_is_closed_and_matches_the_binary_map(
            v in proptest::collection::vec(0.01f64..1.0, 4),
            f in proptest::collection::vec(0.01f64..1.0, 4),
        ) {
            let sv: f64 = v.iter().sum();
            let sf: f64 = f.iter().sum();
            let s = BinaryFlaggedState::new([v[0] / sv, v[1] / sv, v[2] / sv, 1.0 - (v[0] + v[1] + v[2]) / sv]).unwrap();
            let n = BinaryNoise::new(f[0] / sf, f[1] / sf, f[2] / sf, 1.0 - (f[0] + f[1] + f[2]) / sf).unwrap();
            let (b, nb) = binary_step(&s, &n).unwrap();
            let (w, nw) = flagged_step(&FlaggedState16::from_binary(&s), &n.to_noise_model()).unwrap();
            prop_assert!((nb - nw).abs() < 1e-12);
            prop_assert!((nb - binary_survival(s.coeffs(), &n)).abs() < 1e-12);
            for (x, y) in w.binary_part().iter().zip(b.coeffs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert!((w.binary_part().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn noiseless_blend_is_the_qpa_map(s in flagged_strategy()) {
            let (out, n) = flagged_step(&s, &NoiseModel::noiseless()).unwrap();
            let (ideal, n_ideal) = qpa_step_ideal(&aggregate(&s)).unwrap();
            prop_assert!((n - n_ideal).abs() < 1e-12);
            for (x, y) in aggregate(&out).coeffs().iter().zip(ideal.coeffs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
