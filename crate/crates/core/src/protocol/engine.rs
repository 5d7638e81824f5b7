//! Exhaustive branch enumeration for stator protocols.
//!
//! A protocol is described by a [`StatorLayout`] (resource state, controlled
//! gates, which ancillas are measured in σx and which pair is measured
//! collectively) and a [`Preparation`] (direct, or a two-outcome POVM with an
//! optional CNOT on the second outcome). The engine
//!
//! 1. runs the protocol on every computational target state and assembles
//!    each leaf's raw conditional operator from the unnormalized outputs,
//! 2. picks each leaf's correction from `{I, σ_1} ⊗ … ⊗ {I, σ_t}` so that the
//!    corrected operator is closest to the form `a·I + i·b·Σ` with `a, b ≥ 0`
//!    (ties broken by distance to the target gate, then by enumeration order),
//! 3. runs the protocol once more on the caller's target and applies the
//!    chosen corrections to the post-measurement states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::gates::{cnot, controlled, pauli_z};
use crate::linalg::{distance_up_to_phase, Basis, Operator, StateVector, C64};
use crate::protocol::{exp_i_xi, BasisOutcome, BranchRecord, MeasurementAngles, ProtocolReport};
use crate::tolerance::{ABSENT_PROBABILITY, EPS_SIM};

/// Which σx outcome of a measured ancilla triggers `σz` on the sign qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignConvention {
    /// Outcome `−1` (`|−⟩`) is corrected; `+1` needs nothing.
    CorrectOnMinus,
    /// Outcome `+1` is corrected. Only used if the default fails to produce
    /// operators of the stator form.
    CorrectOnPlus,
}

impl SignConvention {
    fn corrected_outcome(self) -> usize {
        match self {
            SignConvention::CorrectOnMinus => 1,
            SignConvention::CorrectOnPlus => 0,
        }
    }
}

/// `|0⟩⟨0| ⊗ I + phase·|1⟩⟨1| ⊗ σ` on `(control, target)`.
#[derive(Debug, Clone)]
pub(crate) struct ControlledGate {
    pub control: String,
    pub target: String,
    pub sigma: Operator,
    pub phase: C64,
}

#[derive(Debug, Clone)]
pub(crate) struct StatorLayout {
    pub resource: StateVector,
    pub target_labels: Vec<String>,
    /// One σ per target; the correction alphabet and the product `Σ`.
    pub target_sigmas: Vec<Operator>,
    pub gates: Vec<ControlledGate>,
    pub sigma_x_qubits: Vec<String>,
    pub sign_qubit: String,
    pub pair: [String; 2],
    pub xi: f64,
    pub classical_bits: u32,
    pub entanglement: f64,
}

#[derive(Debug, Clone)]
pub(crate) enum Preparation {
    Direct(MeasurementAngles),
    Povm {
        elements: [Operator; 2],
        angles: [MeasurementAngles; 2],
        cnot_on_second: bool,
        /// Leaf `(povm outcome, basis outcome)` the protocol gives up on,
        /// whatever operator it happens to realise.
        abandoned: Option<(usize, BasisOutcome)>,
    },
}

struct Node {
    povm: Option<usize>,
    signs: Vec<usize>,
    angles: MeasurementAngles,
    weight: f64,
    state: Option<StateVector>,
}

struct Leaf {
    povm: Option<usize>,
    signs: Vec<usize>,
    basis: BasisOutcome,
    weight: f64,
    state: Option<StateVector>,
}

/// Raw operator and selected correction of one leaf.
struct LeafAnalysis {
    raw: Operator,
    /// Bitmask over targets, big-endian in target order.
    correction: usize,
    form_distance: f64,
    absent: bool,
}

impl StatorLayout {
    fn sigma_product(&self) -> Operator {
        self.target_sigmas
            .iter()
            .skip(1)
            .fold(self.target_sigmas[0].clone(), |acc, s| acc.kron(s))
    }

    pub(crate) fn target_gate(&self) -> Operator {
        exp_i_xi(self.xi, &self.sigma_product())
    }

    fn target_dim(&self) -> usize {
        1 << self.target_labels.len()
    }

    fn enumerate(
        &self,
        prep: &Preparation,
        convention: SignConvention,
        input: &StateVector,
    ) -> Result<Vec<Leaf>> {
        let mut nodes = match prep {
            Preparation::Direct(angles) => vec![Node {
                povm: None,
                signs: Vec::new(),
                angles: *angles,
                weight: 1.0,
                state: Some(input.clone()),
            }],
            Preparation::Povm {
                elements,
                angles,
                cnot_on_second,
                ..
            } => {
                let mut nodes = Vec::with_capacity(2);
                for (k, m) in elements.iter().enumerate() {
                    let out = input.apply_kraus(m, &[&self.sign_qubit])?;
                    let mut state = out.state;
                    if k == 1 && *cnot_on_second {
                        state = state
                            .map(|s| s.apply_gate(&cnot(), &[&self.sign_qubit, &self.pair[1]]))
                            .transpose()?;
                    }
                    nodes.push(Node {
                        povm: Some(k),
                        signs: Vec::new(),
                        angles: angles[k],
                        weight: out.probability,
                        state,
                    });
                }
                nodes
            }
        };

        for node in &mut nodes {
            if let Some(s) = node.state.as_mut() {
                for g in &self.gates {
                    *s = s.apply_gate(&controlled(&g.sigma, g.phase), &[&g.control, &g.target])?;
                }
            }
        }

        let sigma_x = Basis::sigma_x();
        let flip = convention.corrected_outcome();
        for qubit in &self.sigma_x_qubits {
            let mut next = Vec::with_capacity(nodes.len() * 2);
            for node in nodes {
                let outcomes = match &node.state {
                    Some(s) => s.projective_measure(&sigma_x, &[qubit])?,
                    None => Vec::new(),
                };
                for k in 0..2 {
                    let (p, mut state) = match outcomes.get(k) {
                        Some(o) => (o.probability, o.state.clone()),
                        None => (0.0, None),
                    };
                    if k == flip {
                        state = state
                            .map(|s| s.apply_gate(&pauli_z(), &[&self.sign_qubit]))
                            .transpose()?;
                    }
                    let mut signs = node.signs.clone();
                    signs.push(k);
                    next.push(Node {
                        povm: node.povm,
                        signs,
                        angles: node.angles,
                        weight: node.weight * p,
                        state,
                    });
                }
            }
            nodes = next;
        }

        let mut leaves = Vec::with_capacity(nodes.len() * 4);
        for node in nodes {
            let outcomes = match &node.state {
                Some(s) => s.projective_measure(&node.angles.basis(), &self.pair)?,
                None => Vec::new(),
            };
            for basis in BasisOutcome::ALL {
                let (p, state) = match outcomes.get(basis.index()) {
                    Some(o) => (o.probability, o.state.clone()),
                    None => (0.0, None),
                };
                let weight = node.weight * p;
                leaves.push(Leaf {
                    povm: node.povm,
                    signs: node.signs.clone(),
                    basis,
                    weight,
                    state: state.filter(|_| weight >= ABSENT_PROBABILITY),
                });
            }
        }
        Ok(leaves)
    }

    /// Raw (uncorrected) conditional operator of every leaf.
    fn reconstruct(&self, prep: &Preparation, convention: SignConvention) -> Result<Vec<Operator>> {
        let d = self.target_dim();
        let mut columns: Vec<Vec<Vec<C64>>> = Vec::new();
        for j in 0..d {
            let input = self
                .resource
                .tensor(&StateVector::basis_state(&self.target_labels, j)?)?;
            let leaves = self.enumerate(prep, convention, &input)?;
            if columns.is_empty() {
                columns = vec![Vec::with_capacity(d); leaves.len()];
            }
            for (cols, leaf) in columns.iter_mut().zip(&leaves) {
                let col = match &leaf.state {
                    Some(s) => {
                        let w = leaf.weight.sqrt();
                        s.amplitudes().iter().map(|a| a * w).collect()
                    }
                    None => vec![C64::new(0.0, 0.0); d],
                };
                cols.push(col);
            }
        }
        columns
            .iter()
            .map(|cols| Operator::from_columns(cols))
            .collect()
    }

    fn analyse(&self, prep: &Preparation, convention: SignConvention) -> Result<Vec<LeafAnalysis>> {
        let raws = self.reconstruct(prep, convention)?;
        let d = self.target_dim() as f64;
        let t = self.target_labels.len();
        let full = (1usize << t) - 1;
        let (cos_xi, sin_xi) = (self.xi.cos(), self.xi.sin());
        let i = C64::new(0.0, 1.0);

        Ok(raws
            .into_iter()
            .map(|raw| {
                let norm = raw.frobenius_norm();
                if norm * norm < ABSENT_PROBABILITY {
                    return LeafAnalysis {
                        raw,
                        correction: 0,
                        form_distance: 1.0,
                        absent: true,
                    };
                }
                let traces = local_traces(&raw, &self.target_sigmas);
                let mut best: Option<(usize, f64, f64)> = None;
                let candidates: Vec<(usize, f64, f64)> = (0..=full)
                    .map(|mask| {
                        let t0 = traces[mask];
                        let t1 = traces[mask ^ full];
                        let a = t0.norm() / d;
                        let b = t1.norm() / d;
                        let form_norm = d.sqrt() * (a * a + b * b).sqrt();
                        let form = if form_norm < f64::MIN_POSITIVE {
                            1.0
                        } else {
                            1.0 - (t0.conj() * a + i * b * t1.conj()).norm() / (norm * form_norm)
                        };
                        let target = 1.0
                            - (t0.conj() * cos_xi + i * sin_xi * t1.conj()).norm()
                                / (norm * d.sqrt());
                        (mask, form.max(0.0), target.max(0.0))
                    })
                    .collect();
                let min_form = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                for c in candidates.iter().filter(|c| c.1 <= min_form + EPS_SIM) {
                    if best.is_none_or(|b| c.2 < b.2) {
                        best = Some(*c);
                    }
                }
                let (correction, form_distance, _) = best.expect("non-empty candidate set");
                LeafAnalysis {
                    raw,
                    correction,
                    form_distance,
                    absent: false,
                }
            })
            .collect())
    }

    fn correction_label(&self, mask: usize) -> String {
        let t = self.target_labels.len();
        let parts: Vec<String> = (0..t)
            .filter(|k| mask & (1 << (t - 1 - k)) != 0)
            .map(|k| format!("sigma_{}", self.target_labels[k]))
            .collect();
        if parts.is_empty() {
            "I".to_owned()
        } else {
            parts.join("*")
        }
    }

    fn apply_correction(&self, op: &Operator, mask: usize) -> Operator {
        let t = self.target_labels.len();
        let mut out = op.clone();
        for k in (0..t).filter(|k| mask & (1 << (t - 1 - k)) != 0) {
            left_apply_local(&mut out, 1 << (t - 1 - k), &self.target_sigmas[k]);
        }
        out
    }

    pub(crate) fn run(&self, prep: &Preparation, target: &StateVector) -> Result<ProtocolReport> {
        if target.labels() != self.target_labels.as_slice() {
            return Err(Error::param(format!(
                "target must be over {:?}, got {:?}",
                self.target_labels,
                target.labels()
            )));
        }

        let worst = |a: &[LeafAnalysis]| {
            a.iter()
                .filter(|l| !l.absent)
                .map(|l| l.form_distance)
                .fold(0.0, f64::max)
        };
        let mut convention = SignConvention::CorrectOnMinus;
        let mut analysis = self.analyse(prep, convention)?;
        if worst(&analysis) > EPS_SIM {
            let alt = self.analyse(prep, SignConvention::CorrectOnPlus)?;
            if worst(&alt) < worst(&analysis) {
                analysis = alt;
                convention = SignConvention::CorrectOnPlus;
            }
        }

        let gate = self.target_gate();
        let expected = {
            let amps = gate.apply(target.amplitudes());
            StateVector::normalized(&self.target_labels, amps)?
        };
        let input = self.resource.tensor(target)?;
        let leaves = self.enumerate(prep, convention, &input)?;
        debug_assert_eq!(leaves.len(), analysis.len());

        let t = self.target_labels.len();
        let mut branches = Vec::with_capacity(leaves.len());
        for (leaf, an) in leaves.into_iter().zip(analysis) {
            let mut path = Vec::new();
            if let Some(k) = leaf.povm {
                path.push((self.sign_qubit.clone(), format!("M{k}")));
            }
            for (q, &s) in self.sigma_x_qubits.iter().zip(&leaf.signs) {
                path.push((q.clone(), if s == 0 { "+" } else { "-" }.to_owned()));
            }
            path.push((
                format!("{}{}", self.pair[0], self.pair[1]),
                leaf.basis.to_string(),
            ));
            let abandoned = matches!(
                prep,
                Preparation::Povm { abandoned: Some((k, o)), .. }
                    if leaf.povm == Some(*k) && leaf.basis == *o
            );
            let label = if abandoned {
                "abort".to_owned()
            } else {
                self.correction_label(an.correction)
            };
            path.push(("correction".to_owned(), label));

            let operator = self.apply_correction(&an.raw, an.correction);
            let distance = if an.absent {
                1.0
            } else {
                distance_up_to_phase(&operator, &gate)?
            };
            let success = !abandoned && !an.absent && distance <= EPS_SIM;

            let overlap = match leaf.state {
                Some(mut post) => {
                    for k in (0..t).filter(|k| an.correction & (1 << (t - 1 - k)) != 0) {
                        post =
                            post.apply_gate(&self.target_sigmas[k], &[&self.target_labels[k]])?;
                    }
                    Some(expected.inner(&post)?.norm())
                }
                None => None,
            };

            branches.push(BranchRecord {
                path,
                povm: leaf.povm,
                basis: leaf.basis,
                probability: leaf.weight,
                conditional_operator: operator,
                success,
                distance,
                overlap,
            });
        }

        let success_probability = branches
            .iter()
            .filter(|b| b.success)
            .map(|b| b.probability)
            .sum();
        Ok(ProtocolReport {
            branches,
            success_probability,
            entanglement: self.entanglement,
            classical_bits: self.classical_bits,
            sign_convention: convention,
        })
    }
}

/// `tr((P_1 ⊗ … ⊗ P_t) K)` for every choice `P_k ∈ {I, σ_k}`, indexed by a
/// big-endian bitmask (bit set ⇔ `σ_k`). Qubits are contracted one at a time,
/// so the total cost is `O(d²)`.
fn local_traces(k: &Operator, sigmas: &[Operator]) -> Vec<C64> {
    fn contract(block: &[C64], dim: usize, sigmas: &[Operator], out: &mut Vec<C64>) {
        if sigmas.is_empty() {
            out.push(block[0]);
            return;
        }
        let h = dim / 2;
        let id = Operator::identity(2);
        for p in [&id, &sigmas[0]] {
            let mut reduced = vec![C64::new(0.0, 0.0); h * h];
            for a in 0..2 {
                for b in 0..2 {
                    let w = p.get(b, a);
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for r in 0..h {
                        for c in 0..h {
                            reduced[r * h + c] += w * block[(a * h + r) * dim + b * h + c];
                        }
                    }
                }
            }
            contract(&reduced, h, &sigmas[1..], out);
        }
    }
    let mut out = Vec::with_capacity(1 << sigmas.len());
    contract(k.entries(), k.dim(), sigmas, &mut out);
    out
}

/// Left-multiplies `op` by a single-qubit operator acting on the qubit with
/// the given row bit.
fn left_apply_local(op: &mut Operator, bit: usize, local: &Operator) {
    let d = op.dim();
    for r0 in (0..d).filter(|r| r & bit == 0) {
        let r1 = r0 | bit;
        for c in 0..d {
            let x0 = op.get(r0, c);
            let x1 = op.get(r1, c);
            op.set(r0, c, local.get(0, 0) * x0 + local.get(0, 1) * x1);
            op.set(r1, c, local.get(1, 0) * x0 + local.get(1, 1) * x1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gates::{pauli_x, pauli_y};
    use crate::linalg::{pauli_axis_matrix, PauliAxis};

    #[test]
    fn local_traces_match_dense_products() {
        let sigmas = vec![
            pauli_axis_matrix(&PauliAxis::new(0.6, 0.0, 0.8).unwrap()),
            pauli_y(),
            pauli_x(),
        ];
        let k = Operator::from_entries(
            (0..64)
                .map(|n| C64::new((n as f64 * 0.37).sin(), (n as f64 * 0.11).cos()))
                .collect(),
        )
        .unwrap();
        let traces = local_traces(&k, &sigmas);
        let id = Operator::identity(2);
        for (mask, got) in traces.iter().enumerate() {
            let pick = |q: usize| {
                if mask & (1 << (2 - q)) != 0 {
                    &sigmas[q]
                } else {
                    &id
                }
            };
            let p = pick(0).kron(pick(1)).kron(pick(2));
            let want = (&p * &k).trace();
            assert!((got - want).norm() < 1e-12, "mask {mask}");
        }
    }

    #[test]
    fn left_apply_matches_kron() {
        let k = Operator::from_entries(
            (0..16)
                .map(|n| C64::new(n as f64, -(n as f64) / 3.0))
                .collect(),
        )
        .unwrap();
        let mut got = k.clone();
        left_apply_local(&mut got, 0b01, &pauli_y());
        let want = &Operator::identity(2).kron(&pauli_y()) * &k;
        assert!(got.max_abs_diff(&want) < 1e-12);
    }
}
