use serde::{Deserialize, Serialize};

use super::state::{check_distribution, NORMALIZATION_TOL};
use crate::bell_algebra::{pauli_flag_bits, PauliLabel};
use crate::{Error, Result};

/// Pauli-diagonal two-qubit noise: `f[mu][nu]` is the joint probability that
/// the lab demon applies `σ_mu` to the source qubit and `σ_nu` to the target qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    f: [[f64; 4]; 4],
}

fn check_parameter(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { what, value, domain: "[0, 1]" })
    }
}

impl NoiseModel {
    pub fn new(f: [[f64; 4]; 4]) -> Result<NoiseModel> {
        check_distribution("noise model", f.as_flattened(), NORMALIZATION_TOL)?;
        Ok(NoiseModel { f })
    }

    /// Row-major `f[mu][nu]` with Pauli order I, X, Y, Z.
    pub fn from_entries(entries: &[f64]) -> Result<NoiseModel> {
        let flat: [f64; 16] = entries.try_into().map_err(|_| Error::Domain {
            what: "noise entry count",
            value: entries.len() as f64,
            domain: "exactly 16",
        })?;
        let mut f = [[0.0; 4]; 4];
        for (i, row) in f.iter_mut().enumerate() {
            row.copy_from_slice(&flat[4 * i..4 * i + 4]);
        }
        NoiseModel::new(f)
    }

    /// Perfect apparatus.
    pub fn noiseless() -> NoiseModel {
        let mut f = [[0.0; 4]; 4];
        f[0][0] = 1.0;
        NoiseModel { f }
    }

    /// Independent single-qubit Pauli channels, `f[mu][nu] = p[mu] q[nu]`.
    pub fn product(source: [f64; 4], target: [f64; 4]) -> Result<NoiseModel> {
        check_distribution("single-qubit pauli weights", &source, NORMALIZATION_TOL)?;
        check_distribution("single-qubit pauli weights", &target, NORMALIZATION_TOL)?;
        let mut f = [[0.0; 4]; 4];
        for (mu, row) in f.iter_mut().enumerate() {
            for (nu, x) in row.iter_mut().enumerate() {
                *x = source[mu] * target[nu];
            }
        }
        Ok(NoiseModel { f })
    }

    /// One-qubit white noise on both qubits, parametrized by the no-error
    /// weight `f0`: `f_1 = f_2 = f_3 = (1 - f0) / 3`.
    pub fn one_qubit_white(f0: f64) -> Result<NoiseModel> {
        check_parameter("one-qubit white noise f0", f0)?;
        let r = (1.0 - f0) / 3.0;
        NoiseModel::product([f0, r, r, r], [f0, r, r, r])
    }

    /// Two-qubit white noise: `f00 = f`, the 15 other entries `(1 - f) / 15`.
    pub fn two_qubit_white(f: f64) -> Result<NoiseModel> {
        check_parameter("two-qubit white noise f", f)?;
        let mut t = [[(1.0 - f) / 15.0; 4]; 4];
        t[0][0] = f;
        Ok(NoiseModel { f: t })
    }

    /// One-qubit depolarizing channel `ρ → p ρ + (1 - p) 1/2` on each qubit,
    /// i.e. `one_qubit_white((1 + 3p) / 4)`.
    pub fn one_qubit_depolarizing(p: f64) -> Result<NoiseModel> {
        check_parameter("one-qubit depolarizing p", p)?;
        NoiseModel::one_qubit_white((1.0 + 3.0 * p) / 4.0)
    }

    /// Two-qubit depolarizing channel `ρ → p ρ + (1 - p) 1/4`.
    pub fn two_qubit_depolarizing(p: f64) -> Result<NoiseModel> {
        check_parameter("two-qubit depolarizing p", p)?;
        NoiseModel::two_qubit_white(p + (1.0 - p) / 16.0)
    }

    /// Sequential application of two Pauli channels: convolution over the
    /// Pauli-pair group, with labels multiplied by XOR of their flag bits.
    pub fn compose(&self, other: &NoiseModel) -> NoiseModel {
        let mut f = [[0.0; 4]; 4];
        for a in PauliLabel::ALL {
            for b in PauliLabel::ALL {
                for c in PauliLabel::ALL {
                    for d in PauliLabel::ALL {
                        let mu = PauliLabel::from_flag_bits(pauli_flag_bits(a) ^ pauli_flag_bits(c));
                        let nu = PauliLabel::from_flag_bits(pauli_flag_bits(b) ^ pauli_flag_bits(d));
                        f[mu.index()][nu.index()] += self.get(a, b) * other.get(c, d);
                    }
                }
            }
        }
        NoiseModel { f }
    }

    #[inline]
    pub fn get(&self, mu: PauliLabel, nu: PauliLabel) -> f64 {
        self.f[mu.index()][nu.index()]
    }

    pub fn f00(&self) -> f64 {
        self.f[0][0]
    }

    pub fn table(&self) -> &[[f64; 4]; 4] {
        &self.f
    }

    /// Row-major entries.
    pub fn entries(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        out.copy_from_slice(self.f.as_flattened());
        out
    }

    /// Column names `f_II … f_ZZ` matching [`NoiseModel::entries`].
    pub fn entry_names() -> Vec<String> {
        PauliLabel::ALL
            .iter()
            .flat_map(|mu| PauliLabel::ALL.iter().map(move |nu| format!("f_{mu}{nu}")))
            .collect()
    }
}

/// Two-bit correlated spin-flip channel acting with `1` or `σx` on source and target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryNoise {
    pub f00: f64,
    pub f01: f64,
    pub f10: f64,
    pub f11: f64,
}

impl BinaryNoise {
    pub fn new(f00: f64, f01: f64, f10: f64, f11: f64) -> Result<BinaryNoise> {
        check_distribution("binary noise", &[f00, f01, f10, f11], NORMALIZATION_TOL)?;
        Ok(BinaryNoise { f00, f01, f10, f11 })
    }

    /// Uncorrelated flips, `f_{mu nu} = f_mu f_nu` with `f_0 = f0`, `f_1 = 1 - f0`.
    pub fn uncorrelated(f0: f64) -> Result<BinaryNoise> {
        check_parameter("binary noise f0", f0)?;
        let f1 = 1.0 - f0;
        Ok(BinaryNoise {
            f00: f0 * f0,
            f01: f0 * f1,
            f10: f1 * f0,
            f11: f1 * f1,
        })
    }

    /// Probability that exactly one qubit is flipped.
    pub fn f_s(&self) -> f64 {
        self.f01 + self.f10
    }

    /// Embedding as a Pauli-pair table supported on `{I, X}²`.
    pub fn to_noise_model(&self) -> NoiseModel {
        let mut f = [[0.0; 4]; 4];
        f[0][0] = self.f00;
        f[0][1] = self.f01;
        f[1][0] = self.f10;
        f[1][1] = self.f11;
        NoiseModel { f }
    }
}
