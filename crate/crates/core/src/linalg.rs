//! Small dense decompositions: cyclic Jacobi for symmetric matrices and
//! one-sided (Hestenes) Jacobi for singular values of rectangular ones.
//!
//! Both work for the matrix sizes this crate deals with (tens of channels)
//! and keep high relative accuracy on small eigenvalues.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Stopping rule shared by the Jacobi routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOptions {
    /// Sweep budget per matrix dimension; the total budget is
    /// `sweeps_per_dim * n`.
    pub sweeps_per_dim: usize,
    /// Off-diagonal Frobenius mass, relative to the full Frobenius norm,
    /// at which iteration stops.
    pub tolerance: f64,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self {
            sweeps_per_dim: 100,
            tolerance: 1e-12,
        }
    }
}

impl JacobiOptions {
    fn budget(&self, n: usize) -> usize {
        self.sweeps_per_dim.saturating_mul(n.max(1))
    }
}

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    /// `Q diag(values) Q^T`.
    pub fn recompose(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values));
        &self.vectors * d * self.vectors.transpose()
    }
}

fn off_diagonal_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Only the upper triangle is trusted; the input is symmetrized first.
pub fn symmetric_eigen(a: &DMatrix<f64>, opts: JacobiOptions) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::Mismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let n = a.nrows();
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let frob = m.norm();
    let budget = opts.budget(n);

    let mut converged = frob == 0.0 || n < 2;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal_norm(&m) <= opts.tolerance * frob {
            converged = true;
            break;
        }
        if sweeps == budget {
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: budget,
            residual: off_diagonal_norm(&m) / frob,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = v.select_columns(order.iter());
    Ok(SymmetricEigen { values, vectors })
}

/// Singular values of an arbitrary real matrix, descending.
pub fn singular_values(a: &DMatrix<f64>, opts: JacobiOptions) -> Result<Vec<f64>> {
    // Orthogonalize the columns of whichever orientation has fewer of them.
    let mut u = if a.ncols() > a.nrows() {
        a.transpose()
    } else {
        a.clone()
    };
    let n = u.ncols();
    let rows = u.nrows();
    let budget = opts.budget(n);
    // Pairs count as orthogonal once |cos(angle)| drops to machine level.
    let tol = f64::EPSILON * rows as f64;

    let mut converged = n < 2;
    let mut sweeps = 0;
    let mut worst = 0.0_f64;
    while !converged && sweeps < budget {
        sweeps += 1;
        let mut rotated = false;
        worst = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let cp = u.column(p);
                    let cq = u.column(q);
                    (cp.norm_squared(), cq.norm_squared(), cp.dot(&cq))
                };
                if gamma == 0.0 {
                    continue;
                }
                let cosine = gamma.abs() / (alpha * beta).sqrt();
                worst = worst.max(cosine);
                if cosine <= tol {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let ukp = u[(k, p)];
                    let ukq = u[(k, q)];
                    u[(k, p)] = c * ukp - s * ukq;
                    u[(k, q)] = s * ukp + c * ukq;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: budget,
            residual: worst,
        });
    }
    let mut values: Vec<f64> = (0..n).map(|j| u.column(j).norm()).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_by_two_closed_form() {
        let a = DMatrix::from_row_slice(2, 2, &[10.0, 14.0, 14.0, 20.0]);
        let e = symmetric_eigen(&a, JacobiOptions::default()).unwrap();
        let r = 884f64.sqrt();
        assert_relative_eq!(e.values[0], (30.0 + r) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(e.values[1], (30.0 - r) / 2.0, max_relative = 1e-12);
        assert!((e.recompose() - a).norm() < 1e-12);
    }

    #[test]
    fn diagonal_and_zero_inputs() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]);
        assert_eq!(
            symmetric_eigen(&a, JacobiOptions::default()).unwrap().values,
            vec![3.0, 1.0]
        );
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(
            symmetric_eigen(&z, JacobiOptions::default()).unwrap().values,
            vec![0.0; 3]
        );
        assert_eq!(
            singular_values(&DMatrix::zeros(2, 3), JacobiOptions::default()).unwrap(),
            vec![0.0; 2]
        );
    }

    #[test]
    fn nilpotent_singular_values() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(singular_values(&a, JacobiOptions::default()).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn exhausted_budget_reports_non_convergence() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 1.0]);
        let opts = JacobiOptions {
            sweeps_per_dim: 0,
            ..Default::default()
        };
        assert!(matches!(symmetric_eigen(&a, opts), Err(Error::NoConvergence { .. })));
        assert!(matches!(singular_values(&a, opts), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn rejects_non_square() {
        assert!(symmetric_eigen(&DMatrix::zeros(2, 3), JacobiOptions::default()).is_err());
    }

    #[test]
    fn wide_and_tall_agree() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, -2.0, 0.5, 3.0, 0.0, 4.0]);
        let wide = singular_values(&a, JacobiOptions::default()).unwrap();
        let tall = singular_values(&a.transpose(), JacobiOptions::default()).unwrap();
        for (x, y) in wide.iter().zip(&tall) {
            assert_relative_eq!(x, y, max_relative = 1e-14);
        }
        let frob2: f64 = wide.iter().map(|s| s * s).sum();
        assert_relative_eq!(frob2, a.norm_squared(), max_relative = 1e-13);
    }
}
