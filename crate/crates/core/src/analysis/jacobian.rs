use nalgebra::{DMatrix, Schur};

use crate::recurrence::QuadraticMap;
use crate::{Error, Result};

pub const FD_STEP: f64 = 1e-6;

const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 10_000;

/// `J[o][a] = ∂F_o/∂x_a` of a normalized one-round map `F(x) = q(x) / Σ q(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianMatrix(pub DMatrix<f64>);

impl JacobianMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn max_abs_diff(&self, other: &JacobianMatrix) -> f64 {
        (&self.0 - &other.0).abs().max()
    }

    pub fn max_eigenvalue_modulus(&self) -> Result<f64> {
        max_eigenvalue_modulus(self)
    }
}

/// Quotient-rule Jacobian from the quadratic-form coefficients.
pub fn jacobian(map: &QuadraticMap, point: &[f64]) -> JacobianMatrix {
    let d = map.dim();
    let q = map.evaluate(point);
    let grad = map.gradient(point);
    let total: f64 = q.iter().sum();
    let dtotal: Vec<f64> = (0..d).map(|a| grad.iter().map(|g| g[a]).sum()).collect();
    JacobianMatrix(DMatrix::from_fn(d, d, |o, a| {
        grad[o][a] / total - q[o] * dtotal[a] / (total * total)
    }))
}

/// Central finite differences of an arbitrary map.
pub fn finite_difference_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, point: &[f64], h: f64) -> JacobianMatrix {
    let d = point.len();
    let mut m = DMatrix::zeros(d, d);
    let mut x = point.to_vec();
    for a in 0..d {
        x[a] = point[a] + h;
        let plus = f(&x);
        x[a] = point[a] - h;
        let minus = f(&x);
        x[a] = point[a];
        for o in 0..d {
            m[(o, a)] = (plus[o] - minus[o]) / (2.0 * h);
        }
    }
    JacobianMatrix(m)
}

/// Spectral radius via a real Schur decomposition (Hessenberg reduction + shifted QR).
pub fn max_eigenvalue_modulus(j: &JacobianMatrix) -> Result<f64> {
    let schur = Schur::try_new(j.0.clone(), SCHUR_EPS, SCHUR_MAX_ITER).ok_or(Error::EigenSolver(j.dim()))?;
    Ok(schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::binary_fixpoint_closed_form;
    use crate::recurrence::{binary_unnormalized, BinaryNoise, Coefficients};

    fn normalized_binary(noise: BinaryNoise) -> impl Fn(&[f64]) -> Vec<f64> {
        move |x| {
            let q = binary_unnormalized(&[x[0], x[1], x[2], x[3]], &noise);
            let n: f64 = q.iter().sum();
            q.iter().map(|v| v / n).collect()
        }
    }

    #[test]
    fn pure_noiseless_point_is_superattractive() {
        let noise = BinaryNoise::uncorrelated(1.0).unwrap();
        let j = jacobian(&QuadraticMap::binary(&noise), &[1.0, 0.0, 0.0, 0.0]);
        assert!(max_eigenvalue_modulus(&j).unwrap() < 1e-12);
    }

    #[test]
    fn attractor_and_repeller_examples() {
        for (f0, attracting) in [(0.9, true), (0.76, false)] {
            let noise = BinaryNoise::uncorrelated(f0).unwrap();
            let p = binary_fixpoint_closed_form(f0).unwrap();
            let rho = jacobian(&QuadraticMap::binary(&noise), p.as_slice()).max_eigenvalue_modulus().unwrap();
            assert_eq!(rho < 1.0, attracting, "f0 = {f0}, rho = {rho}");
        }
    }

    #[test]
    fn analytic_matches_finite_differences() {
        for f0 in [0.78, 0.85, 0.95] {
            let noise = BinaryNoise::uncorrelated(f0).unwrap();
            let p = binary_fixpoint_closed_form(f0).unwrap();
            let a = jacobian(&QuadraticMap::binary(&noise), p.as_slice());
            let n = finite_difference_jacobian(normalized_binary(noise), p.as_slice(), FD_STEP);
            assert!(a.max_abs_diff(&n) < 1e-6);
        }
    }

    #[test]
    fn radius_of_a_rotation_block() {
        // eigenvalues ±0.5i and 0.9
        let m = DMatrix::from_row_slice(3, 3, &[0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.9]);
        let r = max_eigenvalue_modulus(&JacobianMatrix(m)).unwrap();
        assert!((r - 0.9).abs() < 1e-12);
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.5, 1.5, 0.0]);
        let r = max_eigenvalue_modulus(&JacobianMatrix(m)).unwrap();
        assert!((r - 1.5).abs() < 1e-12);
    }
}
