use serde::{Deserialize, Serialize};

use crate::bell_algebra::{BellLabel, ErrorFlag};
use crate::{Error, Result};

/// Tolerance on the unit sum of every probability vector type.
pub const NORMALIZATION_TOL: f64 = 1e-12;

pub(crate) fn check_distribution(what: &'static str, v: &[f64], tol: f64) -> Result<()> {
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
        return Err(Error::NegativeProbability { what, index, value });
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::NotNormalized { what, sum });
    }
    Ok(())
}

/// A probability vector over a fixed set of cells, usable by the generic
/// fixpoint and Jacobian machinery.
pub trait Coefficients: Clone + Sized {
    const LEN: usize;

    fn as_slice(&self) -> &[f64];

    /// Validated construction from exactly `LEN` entries.
    fn try_from_slice(v: &[f64]) -> Result<Self>;
}

macro_rules! coefficient_vector {
    ($ty:ident, $len:expr, $what:expr) => {
        impl $ty {
            pub fn new(coeffs: [f64; $len]) -> Result<Self> {
                check_distribution($what, &coeffs, NORMALIZATION_TOL)?;
                Ok(Self(coeffs))
            }

            /// Caller guarantees the vector is a normalized distribution.
            pub(crate) fn from_normalized(coeffs: [f64; $len]) -> Self {
                debug_assert!(check_distribution($what, &coeffs, 1e-9).is_ok(), "{:?}", coeffs);
                Self(coeffs)
            }

            pub fn coeffs(&self) -> &[f64; $len] {
                &self.0
            }
        }

        impl Coefficients for $ty {
            const LEN: usize = $len;

            fn as_slice(&self) -> &[f64] {
                &self.0
            }

            fn try_from_slice(v: &[f64]) -> Result<Self> {
                let arr: [f64; $len] = v.try_into().map_err(|_| Error::Domain {
                    what: $what,
                    value: v.len() as f64,
                    domain: concat!("length ", stringify!($len)),
                })?;
                Self::new(arr)
            }
        }
    };
}

/// Bell-diagonal state `A Φ⁺ + B Ψ⁻ + C Ψ⁺ + D Φ⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealState([f64; 4]);
coefficient_vector!(IdealState, 4, "bell-diagonal state");

impl IdealState {
    pub fn a(&self) -> f64 {
        self.0[0]
    }
    pub fn b(&self) -> f64 {
        self.0[1]
    }
    pub fn c(&self) -> f64 {
        self.0[2]
    }
    pub fn d(&self) -> f64 {
        self.0[3]
    }

    pub fn fidelity(&self) -> f64 {
        self.0[0]
    }

    pub fn weight(&self, b: BellLabel) -> f64 {
        self.0[b.index()]
    }

    pub fn pure(b: BellLabel) -> IdealState {
        let mut v = [0.0; 4];
        v[b.index()] = 1.0;
        IdealState(v)
    }
}

/// Werner state `(F, (1-F)/3, (1-F)/3, (1-F)/3)`.
pub fn make_werner(fidelity: f64) -> Result<IdealState> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::Domain {
            what: "werner fidelity",
            value: fidelity,
            domain: "[0, 1]",
        });
    }
    let r = (1.0 - fidelity) / 3.0;
    Ok(IdealState([fidelity, r, r, r]))
}

/// Binary pair ensemble: `(A0, A1, B0, B1)` = (Φ⁺ flag 0, Φ⁺ flag 1, Ψ⁺ flag 0, Ψ⁺ flag 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryFlaggedState([f64; 4]);
coefficient_vector!(BinaryFlaggedState, 4, "binary flagged state");

impl BinaryFlaggedState {
    /// `A Φ⁺ + B Ψ⁺` with all flags cleared.
    pub fn unflagged(a: f64, b: f64) -> Result<BinaryFlaggedState> {
        BinaryFlaggedState::new([a, 0.0, b, 0.0])
    }

    pub fn fidelity(&self) -> f64 {
        self.0[0] + self.0[1]
    }

    /// Weight on correctly flagged pairs (Φ⁺ with flag 0, Ψ⁺ with flag 1).
    pub fn conditional_fidelity(&self) -> f64 {
        self.0[0] + self.0[3]
    }
}

/// The 16 flagged-subensemble weights `w[bell][flag]`, stored bell-major in
/// the order `A, B, C, D` and flags `00, 01, 10, 11`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaggedState16([f64; 16]);
coefficient_vector!(FlaggedState16, 16, "flagged state");

#[inline]
pub const fn cell(bell: BellLabel, flag: ErrorFlag) -> usize {
    bell.index() * 4 + flag.index()
}

/// Column names `PHIP_00 … PHIM_11` in storage order.
pub fn cell_names() -> Vec<String> {
    BellLabel::ALL
        .iter()
        .flat_map(|b| ErrorFlag::ALL.iter().map(move |f| format!("{}_{}", b.tag(), f.tag())))
        .collect()
}

impl FlaggedState16 {
    pub fn weight(&self, bell: BellLabel, flag: ErrorFlag) -> f64 {
        self.0[cell(bell, flag)]
    }

    /// All weight on one cell.
    pub fn point(bell: BellLabel, flag: ErrorFlag) -> FlaggedState16 {
        let mut v = [0.0; 16];
        v[cell(bell, flag)] = 1.0;
        FlaggedState16(v)
    }

    /// Places an ideal state on the cells where each Bell state carries its matching flag.
    pub fn diagonal(s: &IdealState) -> FlaggedState16 {
        let mut v = [0.0; 16];
        for b in BellLabel::ALL {
            v[cell(b, b.matching_flag())] = s.weight(b);
        }
        FlaggedState16(v)
    }

    /// Binary support: `A_i` on (Φ⁺, `0i`), `B_i` on (Ψ⁺, `0i`).
    pub fn from_binary(s: &BinaryFlaggedState) -> FlaggedState16 {
        let [a0, a1, b0, b1] = s.0;
        let mut v = [0.0; 16];
        v[cell(BellLabel::PhiPlus, ErrorFlag::new(false, false))] = a0;
        v[cell(BellLabel::PhiPlus, ErrorFlag::new(false, true))] = a1;
        v[cell(BellLabel::PsiPlus, ErrorFlag::new(false, false))] = b0;
        v[cell(BellLabel::PsiPlus, ErrorFlag::new(false, true))] = b1;
        FlaggedState16(v)
    }

    /// Reads back the binary-support cells; weight elsewhere is ignored.
    pub fn binary_part(&self) -> [f64; 4] {
        [
            self.weight(BellLabel::PhiPlus, ErrorFlag::new(false, false)),
            self.weight(BellLabel::PhiPlus, ErrorFlag::new(false, true)),
            self.weight(BellLabel::PsiPlus, ErrorFlag::new(false, false)),
            self.weight(BellLabel::PsiPlus, ErrorFlag::new(false, true)),
        ]
    }

    pub fn fidelity(&self) -> f64 {
        self.0[0..4].iter().sum()
    }

    /// `1 - F_cond`, summed directly over the 12 mismatched cells so it keeps
    /// relative precision far below machine epsilon.
    pub fn epsilon(&self) -> f64 {
        let mut eps = 0.0;
        for b in BellLabel::ALL {
            for f in ErrorFlag::ALL {
                if f != b.matching_flag() {
                    eps += self.weight(b, f);
                }
            }
        }
        eps
    }

    pub fn off_diagonal_max(&self) -> f64 {
        BellLabel::ALL
            .iter()
            .flat_map(|&b| ErrorFlag::ALL.iter().map(move |&f| (b, f)))
            .filter(|(b, f)| *f != b.matching_flag())
            .map(|(b, f)| self.weight(b, f))
            .fold(0.0, f64::max)
    }
}

/// Fidelity Alice and Bob would assign knowing the flags:
/// `w[Φ⁺][00] + w[Ψ⁻][11] + w[Ψ⁺][01] + w[Φ⁻][10]`.
pub fn conditional_fidelity(s: &FlaggedState16) -> f64 {
    BellLabel::ALL.iter().map(|&b| s.weight(b, b.matching_flag())).sum()
}

/// Sums each Bell weight over its four flags.
pub fn aggregate(s: &FlaggedState16) -> IdealState {
    let mut v = [0.0; 4];
    for (i, slot) in v.iter_mut().enumerate() {
        *slot = s.0[4 * i..4 * i + 4].iter().sum();
    }
    IdealState::from_normalized(v)
}

/// Initial flagged ensemble: every pair starts with flag `00`.
pub fn make_initial_flagged(s: &IdealState) -> FlaggedState16 {
    let mut v = [0.0; 16];
    for b in BellLabel::ALL {
        v[cell(b, ErrorFlag::CLEAR)] = s.weight(b);
    }
    FlaggedState16(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use BellLabel::*;

    #[test]
    fn werner_examples() {
        assert_eq!(make_werner(1.0).unwrap().coeffs(), &[1.0, 0.0, 0.0, 0.0]);
        let w = make_werner(0.7).unwrap();
        assert_abs_diff_eq!(w.b(), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(w.d(), 0.1, epsilon = 1e-15);
        assert!(make_werner(1.2).is_err());
    }

    #[test]
    fn initial_flagged_puts_everything_on_clear_flags() {
        let s = make_initial_flagged(&make_werner(0.85).unwrap());
        assert_eq!(s.weight(PhiPlus, ErrorFlag::CLEAR), 0.85);
        for b in BellLabel::ALL {
            for f in &ErrorFlag::ALL[1..] {
                assert_eq!(s.weight(b, *f), 0.0);
            }
        }
        let agg = aggregate(&make_initial_flagged(&make_werner(0.7).unwrap()));
        assert_abs_diff_eq!(agg.a(), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(agg.c(), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn conditional_fidelity_examples() {
        assert_eq!(conditional_fidelity(&FlaggedState16::point(PhiPlus, ErrorFlag::CLEAR)), 1.0);
        assert_eq!(conditional_fidelity(&FlaggedState16::point(PsiPlus, ErrorFlag::new(false, true))), 1.0);
        let mut v = [0.0; 16];
        v[cell(PhiPlus, ErrorFlag::CLEAR)] = 0.5;
        v[cell(PhiPlus, ErrorFlag::new(false, true))] = 0.5;
        let s = FlaggedState16::new(v).unwrap();
        assert_eq!(conditional_fidelity(&s), 0.5);
        assert_eq!(s.epsilon(), 0.5);
    }

    #[test]
    fn aggregate_examples() {
        let s = FlaggedState16::new([1.0 / 16.0; 16]).unwrap();
        assert_eq!(aggregate(&s).coeffs(), &[0.25; 4]);
        let s = FlaggedState16::point(PhiPlus, ErrorFlag::new(true, true));
        assert_eq!(aggregate(&s).coeffs(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn validation_rejects_bad_vectors() {
        assert!(matches!(IdealState::new([0.5, 0.5, 0.1, 0.0]), Err(Error::NotNormalized { .. })));
        assert!(matches!(
            IdealState::new([1.1, -0.1, 0.0, 0.0]),
            Err(Error::NegativeProbability { index: 1, .. })
        ));
        assert!(IdealState::new([f64::NAN, 0.0, 0.0, 1.0]).is_err());
        assert!(FlaggedState16::try_from_slice(&[1.0; 4]).is_err());
    }

    #[test]
    fn cell_names_follow_storage_order() {
        let names = cell_names();
        assert_eq!(names[0], "PHIP_00");
        assert_eq!(names[7], "PSIM_11");
        assert_eq!(names[15], "PHIM_11");
        assert_eq!(names[cell(PsiPlus, ErrorFlag::new(false, true))], "PSIP_01");
    }
}
