//! Complex tridiagonal systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `A x = b` with `A` tridiagonal: `sub[i] = A[i+1][i]`, `diag[i] = A[i][i]`,
/// `sup[i] = A[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.sup[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut r = self.diag[i].norm();
                if i > 0 {
                    r += self.sub[i - 1].norm();
                }
                if i + 1 < n {
                    r += self.sup[i].norm();
                }
                r
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.sub[i];
                m[(i, i + 1)] = self.sup[i];
            }
        }
        m
    }

    /// Normwise backward error `‖Ax − b‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞)`.
    pub fn backward_error(&self, x: &[Complex64], b: &[Complex64]) -> f64 {
        let ax = self.mul_vec(x);
        let r = ax
            .iter()
            .zip(b)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let xn = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let bn = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let denom = self.norm_inf() * xn + bn;
        if denom == 0.0 {
            0.0
        } else {
            r / denom
        }
    }

    /// Gaussian elimination with partial pivoting (row interchanges between
    /// neighbours only), `O(n)`.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.len();
        assert_eq!(rhs.len(), n, "rhs length");
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        // sub-diagonal storage doubles as the second super-diagonal fill-in
        let mut dl = self.sub.clone();
        let mut b = rhs.to_vec();
        let zero = Complex64::default();
        for k in 0..n - 1 {
            if dl[k] == zero {
                if d[k] == zero {
                    return Err(Error::SolverBreakdown(format!("zero pivot at row {k}")));
                }
                continue;
            }
            if l1(d[k]) >= l1(dl[k]) {
                let mult = dl[k] / d[k];
                d[k + 1] -= mult * du[k];
                b[k + 1] = b[k + 1] - mult * b[k];
                dl[k] = zero;
            } else {
                let mult = d[k] / dl[k];
                d[k] = dl[k];
                let temp = d[k + 1];
                d[k + 1] = du[k] - mult * temp;
                if k + 1 < n - 1 {
                    dl[k] = du[k + 1];
                    du[k + 1] = -mult * dl[k];
                } else {
                    dl[k] = zero;
                }
                du[k] = temp;
                let tb = b[k];
                b[k] = b[k + 1];
                b[k + 1] = tb - mult * b[k + 1];
            }
        }
        if d[n - 1] == zero {
            return Err(Error::SolverBreakdown(format!("zero pivot at row {}", n - 1)));
        }
        b[n - 1] /= d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        }
        for j in (0..n.saturating_sub(2)).rev() {
            b[j] = (b[j] - du[j] * b[j + 1] - dl[j] * b[j + 2]) / d[j];
        }
        if b.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SolverBreakdown("non-finite solution".into()));
        }
        Ok(b)
    }
}

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Dense LU with partial pivoting.
pub fn dense_solve(a: &DMatrix<Complex64>, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let b = DVector::from_column_slice(rhs);
    a.clone()
        .lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::SolverBreakdown("singular dense matrix".into()))
}
