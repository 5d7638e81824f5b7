use std::f64::consts::FRAC_PI_2;

use super::engine::{ControlledGate, Preparation, StatorLayout};
use super::{
    build_resource_state, BasisOutcome, GateSpec, MeasurementAngles, ProtocolReport, ResourceSpec,
    TARGET_LABELS,
};
use crate::error::{Error, Result};
use crate::linalg::{Operator, StateVector, C64};
use crate::tolerance::EPS_ALG;

/// Alice's `U_aA` carries the factor `i`; Bob's `U_b1B` does not.
pub(crate) fn bipartite_layout(
    resource: StateVector,
    entanglement: f64,
    gate: &GateSpec,
) -> StatorLayout {
    let (sa, sb) = (gate.sigma_a(), gate.sigma_b());
    StatorLayout {
        resource,
        target_labels: TARGET_LABELS.iter().map(|s| s.to_string()).collect(),
        target_sigmas: vec![sa.clone(), sb.clone()],
        gates: vec![
            ControlledGate {
                control: "a".into(),
                target: "A".into(),
                sigma: sa,
                phase: C64::new(0.0, 1.0),
            },
            ControlledGate {
                control: "b1".into(),
                target: "B".into(),
                sigma: sb,
                phase: C64::new(1.0, 0.0),
            },
        ],
        sigma_x_qubits: vec!["a".into()],
        sign_qubit: "b0".into(),
        pair: ["b0".into(), "b1".into()],
        xi: gate.xi,
        classical_bits: 2,
        entanglement,
    }
}

/// Runs the general technique on `target` (over `A, B`): controlled local
/// gates, σx on `a` with a `σz` fix on `b0`, Bob's collective measurement,
/// then the per-outcome Pauli corrections.
pub fn run_general_protocol(
    spec: &ResourceSpec,
    angles: &MeasurementAngles,
    gate: &GateSpec,
    target: &StateVector,
) -> Result<ProtocolReport> {
    let layout = bipartite_layout(build_resource_state(spec), spec.entanglement(), gate);
    layout.run(&Preparation::Direct(*angles), target)
}

/// Closed-form probabilities of `B00, B01, B10, B11`.
pub fn branch_probabilities(spec: &ResourceSpec, angles: &MeasurementAngles) -> [f64; 4] {
    let [l0, l1, l2, l3] = spec.lambda().map(|l| l * l);
    let (c0, s0) = (angles.delta0.cos().powi(2), angles.delta0.sin().powi(2));
    let (c1, s1) = (angles.delta1.cos().powi(2), angles.delta1.sin().powi(2));
    [
        l0 * c0 + l3 * s0,
        l0 * s0 + l3 * c0,
        l1 * c1 + l2 * s1,
        l1 * s1 + l2 * c1,
    ]
}

/// Unnormalized branch operator `x·I⊗I + i·y·σ_nA⊗σ_nB` for outcome `which`.
pub fn branch_operator_closed_form(
    spec: &ResourceSpec,
    angles: &MeasurementAngles,
    gate: &GateSpec,
    which: BasisOutcome,
) -> Operator {
    branch_operator_from_coefficients(spec.lambda(), angles, gate, which)
}

/// As [`branch_operator_closed_form`] for arbitrary (possibly unnormalized)
/// coefficients.
pub(crate) fn branch_operator_from_coefficients(
    lambda: [f64; 4],
    angles: &MeasurementAngles,
    gate: &GateSpec,
    which: BasisOutcome,
) -> Operator {
    let [l0, l1, l2, l3] = lambda;
    let (c0, s0) = (angles.delta0.cos(), angles.delta0.sin());
    let (c1, s1) = (angles.delta1.cos(), angles.delta1.sin());
    let (x, y) = match which {
        BasisOutcome::B00 => (l0 * c0, l3 * s0),
        BasisOutcome::B01 => (l3 * c0, l0 * s0),
        BasisOutcome::B10 => (l1 * c1, l2 * s1),
        BasisOutcome::B11 => (l2 * c1, l1 * s1),
    };
    let id = Operator::identity(4).scale(C64::new(x, 0.0));
    &id + &gate.sigma_product().scale(C64::new(0.0, y))
}

/// `λ0 = λ3`, `λ1 = λ2` (all `1/2`) and `δ0 = δ1 = ξ`: every outcome succeeds,
/// at the cost of one full ebit.
pub fn deterministic_config(gate: &GateSpec) -> (ResourceSpec, MeasurementAngles) {
    let spec = ResourceSpec::new([0.5; 4]).expect("uniform coefficients");
    let angles = MeasurementAngles::new(gate.xi, gate.xi).expect("ξ ≤ π/4");
    (spec, angles)
}

/// FPT configuration for target fidelity `F`: `λ0 = λ3 = sqrt(F/2)`, `λ1 = 0`,
/// `λ2 = sqrt(1 − F)`, `δ0 = ξ`. Outcomes `B00` and `B01` succeed with total
/// probability `F`; `δ1` is irrelevant and set to 0.
pub fn fpt_config(gate: &GateSpec, f_target: f64) -> Result<(ResourceSpec, MeasurementAngles)> {
    if !(f_target > 0.0 && f_target <= 1.0 + EPS_ALG) {
        return Err(Error::param(format!(
            "FPT target fidelity {f_target} outside (0, 1]"
        )));
    }
    let f_target = f_target.min(1.0);
    let l0 = (f_target / 2.0).sqrt();
    let l2 = (1.0 - f_target).max(0.0).sqrt();
    let spec = ResourceSpec::new([l0, 0.0, l2, l0])?;
    let angles = MeasurementAngles::new(gate.xi, 0.0)?;
    Ok((spec, angles))
}

/// Small-ξ configuration: `λ0 = λ3 = 0`, `λ1 = cos α`, `λ2 = sin α`, and `δ1`
/// solving `tan α · tan δ1 = tan ξ`. The designated success outcome is `B10`.
pub fn smallxi_config(gate: &GateSpec, alpha: f64) -> Result<(ResourceSpec, MeasurementAngles)> {
    if gate.xi <= 0.0 {
        return Err(Error::Degenerate(
            "ξ = 0 forces δ1 = 0; B10 then succeeds only with probability cos²α".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::param(format!("α = {alpha} outside (0, π/2)")));
    }
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let norm = (ca * ca + sa * sa).sqrt();
    let spec = ResourceSpec::new([0.0, ca / norm, sa / norm, 0.0])?;
    let delta1 = (gate.xi.tan() / alpha.tan()).atan();
    let angles = MeasurementAngles::new(0.0, delta1)?;
    Ok((spec, angles))
}

/// `α = arctan(sqrt(tan ξ))`, maximizing the `B10` probability.
pub fn optimal_alpha(gate: &GateSpec) -> Result<f64> {
    if gate.xi <= 0.0 {
        return Err(Error::Degenerate("optimal α requires ξ > 0".into()));
    }
    Ok(gate.xi.tan().sqrt().atan())
}

/// Closed-form `P(B10) = sec²ξ / (sec²α + csc²α·tan²ξ)` of the small-ξ
/// configuration; its maximum over α is `1/(1 + sin 2ξ)`.
pub fn smallxi_success_probability(xi: f64, alpha: f64) -> f64 {
    let sec2 = |x: f64| 1.0 / x.cos().powi(2);
    let csc2 = |x: f64| 1.0 / x.sin().powi(2);
    sec2(xi) / (sec2(alpha) + csc2(alpha) * xi.tan().powi(2))
}

pub(crate) fn check_xi_matches(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > EPS_ALG {
        return Err(Error::param(format!("ξ mismatch: {a} vs {b}")));
    }
    Ok(())
}
