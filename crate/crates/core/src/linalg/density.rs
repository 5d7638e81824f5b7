use super::eigen::hermitian_eigenvalues;
use super::{Operator, C64};
use crate::error::{Error, Result};
use crate::tolerance::{EIGEN_FLOOR, EPS_ALG};

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Operator,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(matrix: Operator) -> Result<Self> {
        let herm = matrix.hermiticity_deviation();
        if herm > EPS_ALG {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > EPS_ALG {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let eigenvalues = hermitian_eigenvalues(&matrix);
        if let Some(&min) = eigenvalues.first() {
            if min < EIGEN_FLOOR {
                return Err(Error::InvalidDensity(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(DensityMatrix {
            matrix,
            eigenvalues,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}
