use std::ops::{Add, Mul, Sub};

use serde::{Serialize, Serializer};

use super::C64;
use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        op
    }

    /// Builds from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_entries(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Operator { dim, entries })
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_entries(entries)
    }

    /// Real-valued matrix, row-major.
    pub fn from_real(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: values.len(),
            });
        }
        Ok(Operator {
            dim,
            entries: values.iter().map(|&v| C64::new(v, 0.0)).collect(),
        })
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            op.entries[i * diag.len() + i] = d;
        }
        op
    }

    /// Builds an operator column by column.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let dim = columns.len();
        let mut op = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: col.len(),
                });
            }
            for (i, &v) in col.iter().enumerate() {
                op.entries[i * dim + j] = v;
            }
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits the operator acts on, if `dim` is a power of two.
    pub fn qubits(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.entries[j * self.dim + i] = self.entries[i * self.dim + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|&e| e * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `tr(self† · other)`, the Hilbert–Schmidt inner product.
    pub fn hs_inner(&self, other: &Operator) -> C64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Self {
        let dim = self.dim * other.dim;
        let mut out = Self::zeros(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.entries[i * self.dim + j];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out.entries[(i * other.dim + k) * dim + j * other.dim + l] =
                            a * other.entries[k * other.dim + l];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.dim);
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U†U − I|` entry-wise.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Serialized as a list of rows, each a list of `[re, im]` pairs.
impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

/// Single-qubit gates used throughout.
pub mod gates {
    use super::*;

    pub fn pauli_x() -> Operator {
        Operator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Operator {
        let o = C64::new(0.0, 0.0);
        let i = C64::new(0.0, 1.0);
        Operator::from_entries(vec![o, -i, i, o]).unwrap()
    }

    pub fn pauli_z() -> Operator {
        Operator::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Operator {
        Operator::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap()
    }

    /// `|0⟩⟨0| ⊗ I + phase·|1⟩⟨1| ⊗ U`, control first.
    pub fn controlled(u: &Operator, phase: C64) -> Operator {
        let d = u.dim();
        let mut out = Operator::zeros(2 * d);
        for i in 0..d {
            out.set(i, i, C64::new(1.0, 0.0));
            for j in 0..d {
                out.set(d + i, d + j, phase * u.get(i, j));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;

    #[test]
    fn kron_dimensions_and_values() {
        let xz = pauli_x().kron(&pauli_z());
        assert_eq!(xz.dim(), 4);
        // X ⊗ Z maps |00⟩ → |10⟩ with +1, |01⟩ → |11⟩ with −1.
        assert_eq!(xz.get(2, 0), C64::new(1.0, 0.0));
        assert_eq!(xz.get(3, 1), C64::new(-1.0, 0.0));
    }

    #[test]
    fn paulis_multiply_like_paulis() {
        let i = C64::new(0.0, 1.0);
        let xy = &pauli_x() * &pauli_y();
        assert!(xy.max_abs_diff(&pauli_z().scale(i)) < 1e-15);
    }

    #[test]
    fn controlled_is_unitary() {
        let cu = controlled(&pauli_y(), C64::new(0.0, 1.0));
        assert!(cu.is_unitary(1e-12));
        assert!(cnot().is_unitary(1e-12));
    }

    #[test]
    fn from_entries_rejects_non_square() {
        assert!(Operator::from_entries(vec![C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn columns_round_trip() {
        let cols = vec![
            vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
            vec![C64::new(3.0, 0.0), C64::new(4.0, 1.0)],
        ];
        let op = Operator::from_columns(&cols).unwrap();
        assert_eq!(op.get(1, 0), C64::new(2.0, 0.0));
        assert_eq!(op.get(1, 1), C64::new(4.0, 1.0));
        assert_eq!(op.apply(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]), cols[1]);
    }
}
