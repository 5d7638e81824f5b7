//! Dense complex linear algebra for few-qubit systems.

mod density;
pub mod eigen;
mod operator;
mod state;

use serde::{Deserialize, Serialize};

pub use density::DensityMatrix;
pub use operator::{gates, Operator};
pub use state::{Basis, MeasurementOutcome, StateVector};

use crate::error::{Error, Result};
use crate::tolerance::{ABSENT_PROBABILITY, EPS_ALG};

pub type C64 = num_complex::Complex64;

/// Unit direction `n` selecting `σ_n = nx·σx + ny·σy + nz·σz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliAxis {
    nx: f64,
    ny: f64,
    nz: f64,
}

impl PauliAxis {
    pub const X: PauliAxis = PauliAxis {
        nx: 1.0,
        ny: 0.0,
        nz: 0.0,
    };
    pub const Y: PauliAxis = PauliAxis {
        nx: 0.0,
        ny: 1.0,
        nz: 0.0,
    };
    pub const Z: PauliAxis = PauliAxis {
        nx: 0.0,
        ny: 0.0,
        nz: 1.0,
    };

    pub fn new(nx: f64, ny: f64, nz: f64) -> Result<Self> {
        let n2 = nx * nx + ny * ny + nz * nz;
        if !n2.is_finite() || (n2 - 1.0).abs() > EPS_ALG {
            return Err(Error::InvalidAxis(n2));
        }
        Ok(PauliAxis { nx, ny, nz })
    }

    pub fn components(&self) -> [f64; 3] {
        [self.nx, self.ny, self.nz]
    }
}

impl Default for PauliAxis {
    fn default() -> Self {
        PauliAxis::Z
    }
}

pub fn pauli_axis_matrix(axis: &PauliAxis) -> Operator {
    let [x, y, z] = axis.components();
    Operator::from_entries(vec![
        C64::new(z, 0.0),
        C64::new(x, -y),
        C64::new(x, y),
        C64::new(-z, 0.0),
    ])
    .expect("2x2")
}

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`, with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(xlog2x_neg(p) + xlog2x_neg(1.0 - p))
}

fn xlog2x_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Entropy in ebits: `−Σ eᵢ log₂ eᵢ` over the eigenvalues of `rho`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let s: f64 = rho.eigenvalues().iter().map(|&e| xlog2x_neg(e)).sum();
    s.clamp(0.0, (rho.dim() as f64).log2())
}

/// `1 − |tr(A†B)| / (‖A‖_F ‖B‖_F)`: zero exactly when `A = c·B`.
pub fn distance_up_to_phase(a: &Operator, b: &Operator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let na = a.frobenius_norm();
    let nb = b.frobenius_norm();
    let floor = ABSENT_PROBABILITY.sqrt();
    if na < floor || nb < floor {
        return Err(Error::ZeroOperator);
    }
    Ok((1.0 - a.hs_inner(b).norm() / (na * nb)).clamp(0.0, 1.0))
}

/// Smallest eigenvalue of the partial transpose over the second qubit.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let m = rho.matrix();
    let mut pt = Operator::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    // ⟨i j|ρ^{T_B}|k l⟩ = ⟨i l|ρ|k j⟩
                    pt.set(2 * i + j, 2 * k + l, m.get(2 * i + l, 2 * k + j));
                }
            }
        }
    }
    Ok(eigen::hermitian_eigenvalues(&pt)[0])
}
