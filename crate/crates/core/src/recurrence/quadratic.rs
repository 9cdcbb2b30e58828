use super::noise::{BinaryNoise, NoiseModel};
use super::state::cell;
use super::step::{binary_unnormalized, ideal_unnormalized, normalize};
use crate::bell_algebra::{flag_update, pauli_flag_bits, BellLabel, ErrorFlag, PauliLabel, TransitionTable};
use crate::Result;

/// A one-round map written as quadratic forms: the unnormalized output
/// component `j` is `x · M_j · xᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticMap {
    dim: usize,
    // m[(j * dim + a) * dim + b]
    m: Vec<f64>,
}

impl QuadraticMap {
    fn zeros(dim: usize) -> QuadraticMap {
        QuadraticMap {
            dim,
            m: vec![0.0; dim * dim * dim],
        }
    }

    /// Symmetric coefficients recovered by polarization from any quadratic map.
    pub fn from_quadratic_fn(dim: usize, q: impl Fn(&[f64]) -> Vec<f64>) -> QuadraticMap {
        let mut out = QuadraticMap::zeros(dim);
        let unit = |i: usize| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        };
        let diag: Vec<Vec<f64>> = (0..dim).map(|a| q(&unit(a))).collect();
        for a in 0..dim {
            for b in 0..dim {
                for j in 0..dim {
                    let v = if a == b {
                        diag[a][j]
                    } else {
                        let mut e = unit(a);
                        e[b] = 1.0;
                        (q(&e)[j] - diag[a][j] - diag[b][j]) / 2.0
                    };
                    *out.entry_mut(j, a, b) = v;
                }
            }
        }
        out
    }

    /// Noiseless QPA map on `(A, B, C, D)`.
    pub fn ideal() -> QuadraticMap {
        QuadraticMap::from_quadratic_fn(4, |x| ideal_unnormalized(&[x[0], x[1], x[2], x[3]]).to_vec())
    }

    /// Binary flagged map on `(A0, A1, B0, B1)`.
    pub fn binary(noise: &BinaryNoise) -> QuadraticMap {
        QuadraticMap::from_quadratic_fn(4, |x| binary_unnormalized(&[x[0], x[1], x[2], x[3]], noise).to_vec())
    }

    /// The 16 flagged-ensemble matrices, tabulated term by term from the
    /// transition table. Ordered source/target pairs land in `M_j[a][b]`.
    pub fn flagged(noise: &NoiseModel, table: &TransitionTable) -> QuadraticMap {
        let mut out = QuadraticMap::zeros(16);
        for mu in PauliLabel::ALL {
            for nu in PauliLabel::ALL {
                let p = noise.get(mu, nu);
                for s1 in BellLabel::ALL {
                    for s2 in BellLabel::ALL {
                        let Some(r) = table.lookup(s1, s2, mu, nu) else {
                            continue;
                        };
                        for f1 in ErrorFlag::ALL {
                            for f2 in ErrorFlag::ALL {
                                let g = flag_update(f1 ^ pauli_flag_bits(mu), f2 ^ pauli_flag_bits(nu));
                                *out.entry_mut(cell(r, g), cell(s1, f1), cell(s2, f2)) += p;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, j: usize, a: usize, b: usize) -> f64 {
        self.m[(j * self.dim + a) * self.dim + b]
    }

    fn entry_mut(&mut self, j: usize, a: usize, b: usize) -> &mut f64 {
        &mut self.m[(j * self.dim + a) * self.dim + b]
    }

    /// `M_j` as a row-major `dim × dim` slice.
    pub fn matrix(&self, j: usize) -> &[f64] {
        let d2 = self.dim * self.dim;
        &self.m[j * d2..(j + 1) * d2]
    }

    /// Unnormalized output `x · M_j · xᵀ` for every `j`.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|j| {
                let mj = self.matrix(j);
                let mut acc = 0.0;
                for (a, xa) in x.iter().enumerate() {
                    if *xa == 0.0 {
                        continue;
                    }
                    let row = &mj[a * self.dim..(a + 1) * self.dim];
                    acc += xa * row.iter().zip(x).map(|(m, xb)| m * xb).sum::<f64>();
                }
                acc
            })
            .collect()
    }

    /// `∂(x M_j xᵀ)/∂x_a = Σ_b (M_j[a][b] + M_j[b][a]) x_b`, as `[j][a]`.
    pub fn gradient(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = self.dim;
        (0..d)
            .map(|j| {
                (0..d)
                    .map(|a| (0..d).map(|b| (self.entry(j, a, b) + self.entry(j, b, a)) * x[b]).sum())
                    .collect()
            })
            .collect()
    }

    /// Normalized output and survival probability for a 16-component state.
    pub fn apply16(&self, x: &[f64; 16]) -> Result<([f64; 16], f64)> {
        let raw: [f64; 16] = self.evaluate(x).try_into().expect("16-dimensional map");
        normalize(raw)
    }

    /// Reduction of a flagged map to the blended `(A, B, C, D)` recursion,
    /// read off with all flags cleared.
    pub fn aggregate_reduction(&self) -> QuadraticMap {
        assert_eq!(self.dim, 16);
        let mut out = QuadraticMap::zeros(4);
        for j in 0..16 {
            let r = j / 4;
            for s1 in BellLabel::ALL {
                for s2 in BellLabel::ALL {
                    *out.entry_mut(r, s1.index(), s2.index()) +=
                        self.entry(j, cell(s1, ErrorFlag::CLEAR), cell(s2, ErrorFlag::CLEAR));
                }
            }
        }
        out
    }

    /// Same map with every `M_j` replaced by `(M_j + M_jᵀ) / 2`.
    pub fn symmetrized(&self) -> QuadraticMap {
        let mut out = self.clone();
        for j in 0..self.dim {
            for a in 0..self.dim {
                for b in 0..self.dim {
                    *out.entry_mut(j, a, b) = 0.5 * (self.entry(j, a, b) + self.entry(j, b, a));
                }
            }
        }
        out
    }
}

/// The sixteen 16×16 coefficient matrices of the flagged map for `noise`.
pub fn build_quadratic_map(noise: &NoiseModel) -> QuadraticMap {
    QuadraticMap::flagged(noise, TransitionTable::shared())
}
