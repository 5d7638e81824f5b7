//! Stator-based protocols for the nonlocal gate `exp(iξ σ_nA ⊗ σ_nB)`.
//!
//! Alice holds qubit `a` and target `A`; Bob holds `b0`, `b1` and target `B`.
//! The shared resource is
//! `λ0|000⟩ + λ1|001⟩ + λ2|110⟩ + λ3|111⟩` over `(a, b0, b1)`.
//!
//! Every protocol run is simulated exactly: all measurement outcomes are
//! enumerated, each leaf's conditional operator on the targets is
//! reconstructed column by column, and success means the corrected operator
//! equals the target gate up to a global phase.

pub(crate) mod engine;
mod general;
mod improved;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    binary_entropy, pauli_axis_matrix, Basis, Operator, PauliAxis, StateVector, C64,
};
use crate::tolerance::EPS_ALG;

pub use engine::SignConvention;
pub use general::{
    branch_operator_closed_form, branch_probabilities, deterministic_config, fpt_config,
    optimal_alpha, run_general_protocol, smallxi_config, smallxi_success_probability,
};
pub use improved::{
    coefficients_from_angles, entanglement_parameter, failure_probability_closed,
    failure_probability_first_line, params_from_nb, povm_elements, run_improved_protocol,
    ImprovedParams, B_SIM_FLOOR, DEFAULT_B,
};

pub(crate) use general::check_xi_matches;
pub(crate) use improved::improved_preparation;

/// Labels of the shared resource, in amplitude order.
pub const RESOURCE_LABELS: [&str; 3] = ["a", "b0", "b1"];
/// Labels of the two targets, in amplitude order.
pub const TARGET_LABELS: [&str; 2] = ["A", "B"];

/// Non-negative coefficients `λ0..λ3` of the shared state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResourceSpec {
    lambda: [f64; 4],
}

impl ResourceSpec {
    pub fn new(lambda: [f64; 4]) -> Result<Self> {
        if lambda.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return Err(Error::param(format!(
                "resource coefficients must be non-negative, got {lambda:?}"
            )));
        }
        let norm2: f64 = lambda.iter().map(|l| l * l).sum();
        if (norm2 - 1.0).abs() > EPS_ALG {
            return Err(Error::param(format!(
                "resource coefficients must satisfy Σλ² = 1, got {norm2}"
            )));
        }
        Ok(ResourceSpec { lambda })
    }

    pub fn lambda(&self) -> [f64; 4] {
        self.lambda
    }

    /// The single entanglement parameter `H = λ0² + λ1²`.
    pub fn h(&self) -> f64 {
        self.lambda[0].powi(2) + self.lambda[1].powi(2)
    }

    /// Entanglement of the resource in ebits, `h(H)`.
    pub fn entanglement(&self) -> f64 {
        resource_entanglement(self)
    }
}

pub fn resource_entanglement(spec: &ResourceSpec) -> f64 {
    binary_entropy(spec.h().clamp(0.0, 1.0)).expect("clamped")
}

pub fn build_resource_state(spec: &ResourceSpec) -> StateVector {
    let [l0, l1, l2, l3] = spec.lambda;
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0b000] = C64::new(l0, 0.0);
    amps[0b001] = C64::new(l1, 0.0);
    amps[0b110] = C64::new(l2, 0.0);
    amps[0b111] = C64::new(l3, 0.0);
    StateVector::new(&RESOURCE_LABELS, amps).expect("normalized resource")
}

/// The gate `exp(iξ σ_nA ⊗ σ_nB)` with `ξ ∈ [0, π/4]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateSpec {
    pub xi: f64,
    pub axis_a: PauliAxis,
    pub axis_b: PauliAxis,
}

impl GateSpec {
    pub fn new(xi: f64, axis_a: PauliAxis, axis_b: PauliAxis) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_4 + EPS_ALG).contains(&xi) {
            return Err(Error::param(format!("ξ = {xi} outside [0, π/4]")));
        }
        Ok(GateSpec {
            xi: xi.min(std::f64::consts::FRAC_PI_4),
            axis_a,
            axis_b,
        })
    }

    /// Both parties use σz.
    pub fn along_z(xi: f64) -> Result<Self> {
        Self::new(xi, PauliAxis::Z, PauliAxis::Z)
    }

    pub fn sigma_a(&self) -> Operator {
        pauli_axis_matrix(&self.axis_a)
    }

    pub fn sigma_b(&self) -> Operator {
        pauli_axis_matrix(&self.axis_b)
    }

    pub fn sigma_product(&self) -> Operator {
        self.sigma_a().kron(&self.sigma_b())
    }
}

/// `cos ξ·I⊗I + i sin ξ·σ_nA⊗σ_nB` on `(A, B)`.
pub fn target_gate(gate: &GateSpec) -> Operator {
    exp_i_xi(gate.xi, &gate.sigma_product())
}

/// `exp(iξ Σ) = cos ξ·I + i sin ξ·Σ` for an involution `Σ`.
pub(crate) fn exp_i_xi(xi: f64, sigma: &Operator) -> Operator {
    let id = Operator::identity(sigma.dim()).scale(C64::new(xi.cos(), 0.0));
    &id + &sigma.scale(C64::new(0.0, xi.sin()))
}

/// Angles `δ0, δ1 ∈ [0, π/2]` of Bob's collective measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementAngles {
    pub delta0: f64,
    pub delta1: f64,
}

impl MeasurementAngles {
    pub fn new(delta0: f64, delta1: f64) -> Result<Self> {
        let range = 0.0..=std::f64::consts::FRAC_PI_2 + EPS_ALG;
        if !range.contains(&delta0) || !range.contains(&delta1) {
            return Err(Error::param(format!(
                "measurement angles ({delta0}, {delta1}) outside [0, π/2]"
            )));
        }
        Ok(MeasurementAngles { delta0, delta1 })
    }

    /// `|B00⟩, |B01⟩, |B10⟩, |B11⟩` over the two-qubit index `|00⟩..|11⟩`.
    pub fn basis(&self) -> Basis {
        let (c0, s0) = (self.delta0.cos(), self.delta0.sin());
        let (c1, s1) = (self.delta1.cos(), self.delta1.sin());
        let r = |v: [f64; 4]| v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>();
        Basis::new(vec![
            r([c0, 0.0, 0.0, s0]),
            r([-s0, 0.0, 0.0, c0]),
            r([0.0, c1, s1, 0.0]),
            r([0.0, -s1, c1, 0.0]),
        ])
        .expect("rotation basis is orthonormal")
    }
}

/// Outcome of the collective two-qubit measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BasisOutcome {
    B00,
    B01,
    B10,
    B11,
}

impl BasisOutcome {
    pub const ALL: [BasisOutcome; 4] = [
        BasisOutcome::B00,
        BasisOutcome::B01,
        BasisOutcome::B10,
        BasisOutcome::B11,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for BasisOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One fully resolved measurement path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRecord {
    /// `(label, outcome)` steps in execution order, ending with the
    /// correction that was applied.
    pub path: Vec<(String, String)>,
    /// POVM outcome index for the improved technique.
    pub povm: Option<usize>,
    pub basis: BasisOutcome,
    pub probability: f64,
    /// Corrected, unnormalized operator realised on the targets by this leaf.
    pub conditional_operator: Operator,
    pub success: bool,
    /// `distance_up_to_phase` to the target gate; 1 for an absent leaf.
    pub distance: f64,
    /// `|⟨U·target|post⟩|` for the simulated target, when the leaf occurs.
    pub overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub branches: Vec<BranchRecord>,
    /// Total probability of success leaves.
    pub success_probability: f64,
    /// Entanglement of the consumed resource, in ebits.
    pub entanglement: f64,
    pub classical_bits: u32,
    pub sign_convention: SignConvention,
}

impl ProtocolReport {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Probability of a collective-measurement outcome, summed over the
    /// σx outcomes (and restricted to one POVM outcome when `povm` is set).
    pub fn basis_probability(&self, povm: Option<usize>, outcome: BasisOutcome) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.basis == outcome && (povm.is_none() || b.povm == povm))
            .map(|b| b.probability)
            .sum()
    }

    pub fn is_success(&self, povm: Option<usize>, outcome: BasisOutcome) -> bool {
        let mut leaves = self
            .branches
            .iter()
            .filter(|b| b.basis == outcome && (povm.is_none() || b.povm == povm))
            .peekable();
        leaves.peek().is_some() && leaves.all(|b| b.success)
    }

    pub fn failure_probability(&self) -> f64 {
        self.branches
            .iter()
            .filter(|b| !b.success)
            .map(|b| b.probability)
            .sum()
    }

    /// Smallest overlap with `U·target` among occurring success leaves.
    pub fn min_success_overlap(&self) -> Option<f64> {
        self.branches
            .iter()
            .filter(|b| b.success)
            .filter_map(|b| b.overlap)
            .reduce(f64::min)
    }
}
