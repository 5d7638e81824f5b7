use std::collections::HashSet;

use super::{DensityMatrix, Operator, C64};
use crate::error::{Error, Result};
use crate::tolerance::{ABSENT_PROBABILITY, EPS_ALG, EPS_SIM};

/// Pure state of labelled qubits.
///
/// Amplitude index `i` is read big-endian over `labels`: the first label is
/// the most significant bit. All composite states in the crate are addressed
/// by label, never by raw position.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<String>,
    amplitudes: Vec<C64>,
}

/// One outcome of a measurement or Kraus map. `state` is `None` when the
/// outcome probability is below [`ABSENT_PROBABILITY`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub probability: f64,
    pub state: Option<StateVector>,
}

impl MeasurementOutcome {
    /// Unnormalized post-measurement amplitudes, `sqrt(p)·ψ`, or zeros of
    /// length `dim` when the outcome is absent.
    pub fn weighted_amplitudes(&self, dim: usize) -> Vec<C64> {
        match &self.state {
            Some(s) => {
                let w = self.probability.sqrt();
                s.amplitudes().iter().map(|a| a * w).collect()
            }
            None => vec![C64::new(0.0, 0.0); dim],
        }
    }
}

/// Orthonormal, complete basis of a `2^m`-dimensional target space.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Vec<Vec<C64>>,
}

impl Basis {
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidBasis(f64::INFINITY));
        }
        let mut worst = 0.0f64;
        for (i, u) in vectors.iter().enumerate() {
            if u.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: u.len(),
                });
            }
            for (j, v) in vectors.iter().enumerate().skip(i) {
                let ip: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - expected).norm());
            }
        }
        if worst > EPS_SIM {
            return Err(Error::InvalidBasis(worst));
        }
        Ok(Basis { vectors })
    }

    pub fn computational(qubits: usize) -> Self {
        let dim = 1 << qubits;
        let vectors = (0..dim)
            .map(|k| {
                let mut v = vec![C64::new(0.0, 0.0); dim];
                v[k] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Basis { vectors }
    }

    /// Eigenbasis of σx: `|+⟩`, `|−⟩`.
    pub fn sigma_x() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Basis {
            vectors: vec![
                vec![C64::new(h, 0.0), C64::new(h, 0.0)],
                vec![C64::new(h, 0.0), C64::new(-h, 0.0)],
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }
}

impl StateVector {
    /// Builds a state; amplitudes must have length `2^labels.len()` and unit
    /// norm within `1e-10`.
    pub fn new<S: AsRef<str>>(labels: &[S], amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::unchecked(labels, amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > EPS_SIM {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Builds a state after rescaling the amplitudes to unit norm.
    pub fn normalized<S: AsRef<str>>(labels: &[S], amplitudes: Vec<C64>) -> Result<Self> {
        let mut state = Self::unchecked(labels, amplitudes)?;
        let norm = state.norm();
        if norm < ABSENT_PROBABILITY.sqrt() {
            return Err(Error::NotNormalized(norm));
        }
        state.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    fn unchecked<S: AsRef<str>>(labels: &[S], amplitudes: Vec<C64>) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let expected = 1usize << labels.len();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: amplitudes.len(),
            });
        }
        Ok(StateVector { labels, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state<S: AsRef<str>>(labels: &[S], index: usize) -> Result<Self> {
        let dim = 1usize << labels.len();
        if index >= dim {
            return Err(Error::param(format!(
                "basis index {index} out of range for {dim} amplitudes"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(labels, amps)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    /// Bit mask of `label` in the big-endian amplitude index.
    fn bit(&self, label: &str) -> Result<usize> {
        let pos = self.position(label)?;
        Ok(1 << (self.labels.len() - 1 - pos))
    }

    /// Amplitude for a full assignment of bits, given per label.
    pub fn amplitude_for(&self, bits: &[(&str, u8)]) -> Result<C64> {
        if bits.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                actual: bits.len(),
            });
        }
        let mut index = 0;
        for &(label, b) in bits {
            if b > 1 {
                return Err(Error::param(format!("bit value {b} for `{label}`")));
            }
            if b == 1 {
                index |= self.bit(label)?;
            }
        }
        Ok(self.amplitudes[index])
    }

    /// `⟨self|other⟩`; labels must agree in order.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.labels != other.labels {
            return Err(Error::param(format!(
                "label mismatch: {:?} vs {:?}",
                self.labels, other.labels
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, labels concatenated.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let labels: Vec<&str> = self
            .labels
            .iter()
            .chain(&other.labels)
            .map(String::as_str)
            .collect();
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::unchecked(&labels, amps)
    }

    /// Bit masks of `targets` (big-endian in target order) and the offsets
    /// of every target sub-index relative to a base index with those bits clear.
    fn target_layout<S: AsRef<str>>(&self, targets: &[S]) -> Result<(usize, Vec<usize>)> {
        let mut seen = HashSet::new();
        let mut bits = Vec::with_capacity(targets.len());
        for t in targets {
            let t = t.as_ref();
            if !seen.insert(t) {
                return Err(Error::DuplicateLabel(t.to_owned()));
            }
            bits.push(self.bit(t)?);
        }
        let mask = bits.iter().fold(0, |m, b| m | b);
        let m = bits.len();
        let offsets = (0..1usize << m)
            .map(|j| {
                bits.iter()
                    .enumerate()
                    .filter(|(k, _)| j & (1 << (m - 1 - k)) != 0)
                    .fold(0, |acc, (_, b)| acc | b)
            })
            .collect();
        Ok((mask, offsets))
    }

    fn apply_matrix<S: AsRef<str>>(&self, op: &Operator, targets: &[S]) -> Result<Vec<C64>> {
        let (mask, offsets) = self.target_layout(targets)?;
        if op.dim() != offsets.len() {
            return Err(Error::DimensionMismatch {
                expected: offsets.len(),
                actual: op.dim(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        let mut local = vec![C64::new(0.0, 0.0); offsets.len()];
        for base in (0..self.dim()).filter(|i| i & mask == 0) {
            for (slot, off) in local.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                out[base | off] = (0..offsets.len())
                    .map(|col| op.get(row, col) * local[col])
                    .sum();
            }
        }
        Ok(out)
    }

    /// Applies a unitary to `targets`, identity elsewhere.
    pub fn apply_gate<S: AsRef<str>>(&self, gate: &Operator, targets: &[S]) -> Result<StateVector> {
        let dev = gate.unitarity_deviation();
        if dev > EPS_ALG {
            return Err(Error::NotUnitary(dev));
        }
        let amplitudes = self.apply_matrix(gate, targets)?;
        Ok(StateVector {
            labels: self.labels.clone(),
            amplitudes,
        })
    }

    /// Applies a single Kraus operator; returns its probability `‖Mψ‖²` and
    /// the renormalized post state.
    pub fn apply_kraus<S: AsRef<str>>(
        &self,
        kraus: &Operator,
        targets: &[S],
    ) -> Result<MeasurementOutcome> {
        let amplitudes = self.apply_matrix(kraus, targets)?;
        Ok(self.outcome(self.labels.clone(), amplitudes))
    }

    /// Measures `targets` in `basis`; the measured qubits are removed from
    /// each post state. Outcomes are returned in basis order.
    pub fn projective_measure<S: AsRef<str>>(
        &self,
        basis: &Basis,
        targets: &[S],
    ) -> Result<Vec<MeasurementOutcome>> {
        let (mask, offsets) = self.target_layout(targets)?;
        if basis.dim() != offsets.len() {
            return Err(Error::DimensionMismatch {
                expected: offsets.len(),
                actual: basis.dim(),
            });
        }
        let remaining: Vec<String> = self
            .labels
            .iter()
            .filter(|l| !targets.iter().any(|t| t.as_ref() == l.as_str()))
            .cloned()
            .collect();
        let bases: Vec<usize> = (0..self.dim()).filter(|i| i & mask == 0).collect();
        Ok(basis
            .vectors()
            .iter()
            .map(|v| {
                let amps = bases
                    .iter()
                    .map(|&base| {
                        v.iter()
                            .zip(&offsets)
                            .map(|(c, off)| c.conj() * self.amplitudes[base | off])
                            .sum()
                    })
                    .collect();
                self.outcome(remaining.clone(), amps)
            })
            .collect())
    }

    fn outcome(&self, labels: Vec<String>, amplitudes: Vec<C64>) -> MeasurementOutcome {
        let probability: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let state = (probability >= ABSENT_PROBABILITY).then(|| {
            let norm = probability.sqrt();
            StateVector {
                labels,
                amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
            }
        });
        MeasurementOutcome { probability, state }
    }

    /// Partial trace onto `keep` (in the order given).
    pub fn reduced_density_matrix<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        let (mask, offsets) = self.target_layout(keep)?;
        let d = offsets.len();
        let mut rho = Operator::zeros(d);
        for base in (0..self.dim()).filter(|i| i & mask == 0) {
            for (i, oi) in offsets.iter().enumerate() {
                let a = self.amplitudes[base | oi];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (j, oj) in offsets.iter().enumerate() {
                    let v = rho.get(i, j) + a * self.amplitudes[base | oj].conj();
                    rho.set(i, j, v);
                }
            }
        }
        DensityMatrix::new(rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gates::{cnot, pauli_x, pauli_z};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell(labels: &[&str]) -> StateVector {
        StateVector::new(
            labels,
            vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)],
        )
        .unwrap()
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = StateVector::normalized(
            &["p", "q"],
            vec![c(1.0), c(2.0), c(-1.0), C64::new(0.0, 3.0)],
        )
        .unwrap();
        let out = s.apply_gate(&Operator::identity(4), &["q", "p"]).unwrap();
        assert!(out
            .amplitudes()
            .iter()
            .zip(s.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn sigma_z_is_an_involution() {
        let s = StateVector::normalized(
            &["p", "q"],
            vec![c(0.3), c(0.1), c(-0.7), C64::new(0.2, 0.5)],
        )
        .unwrap();
        let twice = s
            .apply_gate(&pauli_z(), &["q"])
            .unwrap()
            .apply_gate(&pauli_z(), &["q"])
            .unwrap();
        assert_eq!(twice, s);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let s = StateVector::basis_state(&["b0", "b1"], 0b10).unwrap();
        let out = s.apply_gate(&cnot(), &["b0", "b1"]).unwrap();
        assert_eq!(out.amplitude_for(&[("b0", 1), ("b1", 1)]).unwrap(), c(1.0));
    }

    #[test]
    fn gate_respects_label_order_not_position() {
        // X on `q` of |p=0,q=0⟩ gives |p=0,q=1⟩, i.e. index 1.
        let s = StateVector::basis_state(&["p", "q"], 0).unwrap();
        let out = s.apply_gate(&pauli_x(), &["q"]).unwrap();
        assert_eq!(out.amplitudes()[1], c(1.0));
        // CNOT with control q, target p acting on |p=0,q=1⟩ gives |11⟩.
        let out = out.apply_gate(&cnot(), &["q", "p"]).unwrap();
        assert_eq!(out.amplitudes()[3], c(1.0));
    }

    #[test]
    fn gate_errors() {
        let s = StateVector::basis_state(&["p", "q"], 0).unwrap();
        assert!(matches!(
            s.apply_gate(&pauli_x(), &["r"]),
            Err(Error::UnknownLabel(_))
        ));
        assert!(matches!(
            s.apply_gate(&pauli_x(), &["p", "q"]),
            Err(Error::DimensionMismatch { .. })
        ));
        let not_unitary = Operator::from_real(2, &[1.0, 0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(
            s.apply_gate(&not_unitary, &["p"]),
            Err(Error::NotUnitary(_))
        ));
        assert!(matches!(
            s.apply_gate(&cnot(), &["p", "p"]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn kraus_identity_is_certain() {
        let s = bell(&["p", "q"]);
        let out = s.apply_kraus(&Operator::identity(2), &["p"]).unwrap();
        assert!((out.probability - 1.0).abs() < 1e-15);
        assert_eq!(out.state.unwrap(), s);
    }

    #[test]
    fn kraus_probability_is_norm_squared() {
        // cos(π/3)·|+⟩ has squared norm 1/4.
        let plus = StateVector::new(&["q"], vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let m0 = Operator::diagonal(&[c(FRAC_PI_3.cos()), c(FRAC_PI_3.cos())]);
        let out = plus.apply_kraus(&m0, &["q"]).unwrap();
        assert!((out.probability - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kraus_zero_branch_is_absent() {
        let s = StateVector::basis_state(&["q"], 0).unwrap();
        let kill = Operator::diagonal(&[c(0.0), c(1.0)]);
        let out = s.apply_kraus(&kill, &["q"]).unwrap();
        assert_eq!(out.probability, 0.0);
        assert!(out.state.is_none());
    }

    #[test]
    fn computational_measurement_of_zero() {
        let s = StateVector::basis_state(&["q"], 0).unwrap();
        let out = s
            .projective_measure(&Basis::computational(1), &["q"])
            .unwrap();
        assert_eq!(out[0].probability, 1.0);
        assert!(out[0].state.as_ref().unwrap().labels().is_empty());
        assert_eq!(out[1].probability, 0.0);
        assert!(out[1].state.is_none());
    }

    #[test]
    fn measurement_removes_measured_qubits() {
        let s = StateVector::basis_state(&["a", "b", "c"], 0b101).unwrap();
        let out = s
            .projective_measure(&Basis::computational(1), &["b"])
            .unwrap();
        let post = out[0].state.as_ref().unwrap();
        assert_eq!(post.labels(), &["a".to_owned(), "c".to_owned()]);
        assert_eq!(post.amplitudes()[0b11], c(1.0));
    }

    #[test]
    fn collective_basis_on_bell_state() {
        // Basis |B00⟩ = cosδ|00⟩ + sinδ|11⟩ ... with δ0 = δ1 = π/4.
        let (co, si) = (FRAC_PI_4.cos(), FRAC_PI_4.sin());
        let basis = Basis::new(vec![
            vec![c(co), c(0.0), c(0.0), c(si)],
            vec![c(-si), c(0.0), c(0.0), c(co)],
            vec![c(0.0), c(co), c(si), c(0.0)],
            vec![c(0.0), c(-si), c(co), c(0.0)],
        ])
        .unwrap();
        let out = bell(&["p", "q"])
            .projective_measure(&basis, &["p", "q"])
            .unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-15);
        for o in &out[1..] {
            assert!(o.probability < 1e-30);
        }
    }

    #[test]
    fn basis_validation() {
        assert!(Basis::new(vec![vec![c(1.0), c(0.0)], vec![c(1.0), c(0.0)]]).is_err());
        assert!(Basis::new(vec![vec![c(1.0), c(0.0)]]).is_err());
        assert!(Basis::new(vec![vec![c(2.0), c(0.0)], vec![c(0.0), c(1.0)]]).is_err());
    }

    #[test]
    fn reduced_states() {
        let zero = StateVector::basis_state(&["x"], 0).unwrap();
        let psi = StateVector::normalized(&["y"], vec![c(0.6), C64::new(0.0, 0.8)]).unwrap();
        let rho = zero
            .tensor(&psi)
            .unwrap()
            .reduced_density_matrix(&["x"])
            .unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&Operator::diagonal(&[c(1.0), c(0.0)]))
                < 1e-15
        );

        let rho = bell(&["p", "q"]).reduced_density_matrix(&["q"]).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&Operator::diagonal(&[c(0.5), c(0.5)]))
                < 1e-15
        );

        assert!(matches!(
            bell(&["p", "q"]).reduced_density_matrix(&["z"]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            StateVector::new(&["p", "p"], vec![c(1.0), c(0.0), c(0.0), c(0.0)]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            StateVector::new(&["p"], vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            StateVector::new(&["p"], vec![c(1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
