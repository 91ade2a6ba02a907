//! Matrix operators with a diagonal fast path, and their factorizations.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Diagonal(DVector<f64>),
    Dense(DMatrix<f64>),
}

impl Operator {
    pub fn identity(n: usize) -> Self {
        Operator::Diagonal(DVector::from_element(n, 1.0))
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Diagonal(d) => d.len(),
            Operator::Dense(m) => m.nrows(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Operator::Diagonal(_))
    }

    pub fn mul(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Operator::Diagonal(d) => d.component_mul(x),
            Operator::Dense(m) => m * x,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Operator::Diagonal(d) => DMatrix::from_diagonal(d),
            Operator::Dense(m) => m.clone(),
        }
    }

    /// `self + s·other`, staying diagonal when both are.
    pub fn add_scaled(&self, s: f64, other: &Operator) -> Operator {
        if s == 0.0 {
            return self.clone();
        }
        match (self, other) {
            (Operator::Diagonal(a), Operator::Diagonal(b)) => Operator::Diagonal(a + b * s),
            _ => Operator::Dense(self.to_dense() + other.to_dense() * s),
        }
    }

    /// Collapses a dense matrix with no off-diagonal entries.
    pub fn simplify(self) -> Operator {
        match self {
            Operator::Dense(m) => {
                let n = m.nrows();
                let off = (0..n).any(|i| (0..n).any(|j| i != j && m[(i, j)] != 0.0));
                if off {
                    Operator::Dense(m)
                } else {
                    Operator::Diagonal(m.diagonal())
                }
            }
            d => d,
        }
    }

    pub fn factor(&self) -> Result<Factor> {
        Factor::new(self)
    }
}

/// A reusable solver for `A x = b`.
#[derive(Debug, Clone)]
pub enum Factor {
    Diagonal(DVector<f64>),
    Cholesky(Cholesky<f64, Dyn>),
    Lu(LU<f64, Dyn, Dyn>),
}

impl Factor {
    pub fn new(a: &Operator) -> Result<Self> {
        match a {
            Operator::Diagonal(d) => {
                if d.iter().any(|x| *x == 0.0 || !x.is_finite()) {
                    return Err(Error::Singular("zero diagonal entry"));
                }
                Ok(Factor::Diagonal(d.map(|x| 1.0 / x)))
            }
            Operator::Dense(m) => {
                let symmetric = m.relative_eq(&m.transpose(), 1e-14, 1e-12);
                if symmetric {
                    if let Some(c) = m.clone().cholesky() {
                        return Ok(Factor::Cholesky(c));
                    }
                }
                let lu = m.clone().lu();
                if !lu.is_invertible() {
                    return Err(Error::Singular("LU pivot is zero"));
                }
                Ok(Factor::Lu(lu))
            }
        }
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            Factor::Diagonal(inv) => Ok(inv.component_mul(b)),
            Factor::Cholesky(c) => Ok(c.solve(b)),
            Factor::Lu(lu) => lu.solve(b).ok_or(Error::Singular("LU solve")),
        }
    }
}

pub fn max_abs(x: &DVector<f64>) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
