//! POVM-assisted technique.
//!
//! Bob first applies the POVM `{M0, M1}` on `b0`. On `M0` the renormalized
//! resource has the deterministic pattern (`λ0' = λ3'`, `λ1' = λ2'`), so all
//! four collective outcomes succeed with `δ0 = δ1 = ξ`. On `M1` Bob applies
//! CNOT(`b0 → b1`) and reruns the general technique with `δ0 = ξ` and
//! `tan δ1 = n·tan ξ`; only `B11` fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use super::engine::Preparation;
use super::general::{bipartite_layout, check_xi_matches};
use super::{
    build_resource_state, BasisOutcome, GateSpec, MeasurementAngles, ProtocolReport, ResourceSpec,
};
use crate::error::{Error, Result};
use crate::linalg::{Operator, StateVector, C64};
use crate::tolerance::EPS_ALG;

/// `b` used when reproducing the trade-off curves.
pub const DEFAULT_B: f64 = 1.001;

/// Smallest `b` accepted by the simulation; `θ0 → π/2` as `b → 1`.
pub const B_SIM_FLOOR: f64 = 1.0 + 1e-6;

/// Parameters `(n, b, ξ)` with the derived angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovedParams {
    pub n: f64,
    pub b: f64,
    pub xi: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub delta1: f64,
}

impl ImprovedParams {
    pub fn resource(&self) -> ResourceSpec {
        coefficients_from_angles(self.theta0, self.theta1)
            .expect("angles validated on construction")
    }

    /// `H = cos²θ1 / (cos²θ0 + cos²θ1)`.
    pub fn h(&self) -> f64 {
        let (c0, c1) = (self.theta0.cos().powi(2), self.theta1.cos().powi(2));
        c1 / (c0 + c1)
    }
}

fn open_quarter_turn(theta: f64) -> bool {
    theta > 0.0 && theta < FRAC_PI_2
}

/// Resource coefficients parameterized by the POVM angles; they satisfy
/// `λ0 cos θ0 = λ3 cos θ1`, `λ1 cos θ0 = λ2 cos θ1` and `λ0 sin θ0 = λ2 sin θ1`.
pub fn coefficients_from_angles(theta0: f64, theta1: f64) -> Result<ResourceSpec> {
    if !open_quarter_turn(theta0) || !open_quarter_turn(theta1) {
        return Err(Error::param(format!(
            "POVM angles ({theta0}, {theta1}) must lie in (0, π/2)"
        )));
    }
    let (t0, t1) = (theta0.tan(), theta1.tan());
    let (c0, c1) = (theta0.cos(), theta1.cos());
    let raw = [t1 * c1, t0 * c1, t0 * c0, t1 * c0];
    let denom = ((t0 * t0 + t1 * t1) * (c0 * c0 + c1 * c1)).sqrt();
    let lambda = raw.map(|x| x / denom);
    // Remove rounding so the Σλ² = 1 invariant holds to machine precision.
    let norm = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
    ResourceSpec::new(lambda.map(|x| x / norm))
}

/// `θ0 = arccot sqrt((b−1)/2)`, `θ1 = arctan(tan θ0 / sqrt n)`,
/// `δ1 = arctan(n tan ξ)`.
pub fn params_from_nb(n: f64, b: f64, xi: f64) -> Result<ImprovedParams> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::param(format!("n = {n} must be positive")));
    }
    if !(b > 1.0 && b.is_finite()) {
        return Err(Error::param(format!("b = {b} must exceed 1")));
    }
    if !(xi > 0.0 && xi <= FRAC_PI_4 + EPS_ALG) {
        return Err(Error::param(format!("ξ = {xi} outside (0, π/4]")));
    }
    let xi = xi.min(FRAC_PI_4);
    let theta0 = (2.0 / (b - 1.0)).sqrt().atan();
    let theta1 = (theta0.tan() / n.sqrt()).atan();
    let delta1 = (n * xi.tan()).atan();
    if !open_quarter_turn(theta0) || !open_quarter_turn(theta1) {
        return Err(Error::Degenerate(format!(
            "(n, b) = ({n}, {b}) gives POVM angles ({theta0}, {theta1}) on the boundary"
        )));
    }
    Ok(ImprovedParams {
        n,
        b,
        xi,
        theta0,
        theta1,
        delta1,
    })
}

/// `M0 = diag(cos θ0, cos θ1)`, `M1 = diag(sin θ0, sin θ1)`; the closed
/// interval `[0, π/2]` is accepted so limits can be inspected.
pub fn povm_elements(theta0: f64, theta1: f64) -> Result<(Operator, Operator)> {
    let range = 0.0..=FRAC_PI_2;
    if !range.contains(&theta0) || !range.contains(&theta1) {
        return Err(Error::param(format!(
            "POVM angles ({theta0}, {theta1}) outside [0, π/2]"
        )));
    }
    let c = |x: f64| C64::new(x, 0.0);
    Ok((
        Operator::diagonal(&[c(theta0.cos()), c(theta1.cos())]),
        Operator::diagonal(&[c(theta0.sin()), c(theta1.sin())]),
    ))
}

/// Full improved technique on `target`. `gate.xi` must equal `params.xi`.
pub fn run_improved_protocol(
    params: &ImprovedParams,
    gate: &GateSpec,
    target: &StateVector,
) -> Result<ProtocolReport> {
    check_xi_matches(params.xi, gate.xi)?;
    if params.b < B_SIM_FLOOR {
        return Err(Error::param(format!(
            "simulation requires b ≥ {B_SIM_FLOOR}, got {}",
            params.b
        )));
    }
    let spec = params.resource();
    let layout = bipartite_layout(build_resource_state(&spec), spec.entanglement(), gate);
    layout.run(&improved_preparation(params)?, target)
}

pub(crate) fn improved_preparation(params: &ImprovedParams) -> Result<Preparation> {
    let (m0, m1) = povm_elements(params.theta0, params.theta1)?;
    Ok(Preparation::Povm {
        elements: [m0, m1],
        angles: [
            MeasurementAngles::new(params.xi, params.xi)?,
            MeasurementAngles::new(params.xi, params.delta1)?,
        ],
        cnot_on_second: true,
        abandoned: Some((1, BasisOutcome::B11)),
    })
}

fn check_closed_form_domain(n: f64, b: f64, xi: f64) -> Result<()> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::param(format!("n = {n} must be positive")));
    }
    if !(b >= 1.0 && b.is_finite()) {
        return Err(Error::param(format!("b = {b} must be at least 1")));
    }
    if !(xi > 0.0 && xi <= FRAC_PI_4 + EPS_ALG) {
        return Err(Error::param(format!("ξ = {xi} outside (0, π/4]")));
    }
    Ok(())
}

/// Joint probability of `M1` followed by `B11`:
/// `(1 + n⁴tan²ξ) / ((1 + n²tan²ξ)(1 + n)(1 + nb))`. Valid for `b ≥ 1`.
pub fn failure_probability_closed(n: f64, b: f64, xi: f64) -> Result<f64> {
    check_closed_form_domain(n, b, xi)?;
    Ok(failure_probability_unchecked(n, b, xi.tan().powi(2)))
}

/// The same closed form with `t = tan²ξ` and no domain checks; used by
/// finite-difference probes that step `n` around a valid point.
pub(crate) fn failure_probability_unchecked(n: f64, b: f64, t: f64) -> f64 {
    (1.0 + n.powi(4) * t) / ((1.0 + n * n * t) * (1.0 + n) * (1.0 + n * b))
}

/// `λ1² sin²θ0 sin²δ1 + λ3² sin²θ1 cos²δ1`, the failure probability written
/// directly in the coefficients and angles.
pub fn failure_probability_first_line(params: &ImprovedParams) -> f64 {
    let l = params.resource().lambda();
    let (s0, s1) = (params.theta0.sin().powi(2), params.theta1.sin().powi(2));
    let (sd, cd) = (params.delta1.sin().powi(2), params.delta1.cos().powi(2));
    l[1].powi(2) * s0 * sd + l[3].powi(2) * s1 * cd
}

/// `H(n, b) = ((1 − 1/n)/(1 + 2/(b − 1)) + 1 + 1/n)⁻¹`, which tends to
/// `n/(1 + n)` as `b → 1`.
pub fn entanglement_parameter(n: f64, b: f64) -> Result<f64> {
    if n.is_nan() || b.is_nan() || n <= 0.0 || b < 1.0 {
        return Err(Error::param(format!(
            "H(n, b) needs n > 0, b ≥ 1; got ({n}, {b})"
        )));
    }
    let inv = 1.0 / n;
    // (1 − 1/n)/(1 + 2/(b−1)) rewritten as (1 − 1/n)(b−1)/(b+1), finite at b = 1.
    Ok(1.0 / ((1.0 - inv) * (b - 1.0) / (b + 1.0) + 1.0 + inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{distance_up_to_phase, StateVector};
    use crate::protocol::general::branch_operator_from_coefficients;
    use crate::protocol::{target_gate, BasisOutcome, TARGET_LABELS};
    use crate::rng::SplitMix64;
    use crate::tolerance::EPS_SIM;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn equal_angles_give_uniform_coefficients() {
        let spec = coefficients_from_angles(0.7, 0.7).unwrap();
        for l in spec.lambda() {
            assert!((l - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn coefficient_identities() {
        let (t0, t1) = (FRAC_PI_3, FRAC_PI_4);
        let l = coefficients_from_angles(t0, t1).unwrap().lambda();
        assert!((l.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((l[0] * t0.cos() - l[3] * t1.cos()).abs() < 1e-12);
        assert!((l[1] * t0.cos() - l[2] * t1.cos()).abs() < 1e-12);
        assert!((l[0] * t0.sin() - l[2] * t1.sin()).abs() < 1e-12);
    }

    #[test]
    fn coefficient_identities_random() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..200 {
            let t0 = rng.range(1e-3, FRAC_PI_2 - 1e-3);
            let t1 = rng.range(1e-3, FRAC_PI_2 - 1e-3);
            let l = coefficients_from_angles(t0, t1).unwrap().lambda();
            assert!((l[0] * t0.sin() - l[2] * t1.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn coefficient_angle_errors() {
        assert!(coefficients_from_angles(0.0, 0.3).is_err());
        assert!(coefficients_from_angles(0.3, FRAC_PI_2).is_err());
    }

    #[test]
    fn unit_n_keeps_angles() {
        let p = params_from_nb(1.0, 1.3, 0.4).unwrap();
        assert!((p.theta0 - p.theta1).abs() < 1e-15);
        assert!((p.delta1 - 0.4).abs() < 1e-15);
        assert!(((p.theta0.tan().powi(-2)) - 0.15).abs() < 1e-12);
    }

    #[test]
    fn h_from_nb_matches_coefficients() {
        // n = 2, b = 1.001: H = 1/((1/2)(0.001/2.001) + 1.5) ≈ 0.66656
        let p = params_from_nb(2.0, 1.001, 0.3).unwrap();
        let from_eq = entanglement_parameter(2.0, 1.001).unwrap();
        let from_coeffs = p.resource().h();
        assert!((from_eq - from_coeffs).abs() < 1e-12);
        assert!((from_eq - p.h()).abs() < 1e-12);
        assert!((from_eq - 0.66656).abs() < 1e-5);
    }

    #[test]
    fn h_limit_at_unit_b() {
        for n in [0.5, 1.0, 1.5, 3.0] {
            let h = entanglement_parameter(n, 1.0).unwrap();
            assert!((h - 1.0 / (1.0 + 1.0 / n)).abs() < 1e-15);
            let near = entanglement_parameter(n, 1.0 + 1e-9).unwrap();
            assert!((near - h).abs() < 1e-8);
        }
    }

    #[test]
    fn params_errors() {
        assert!(params_from_nb(1.0, 1.0, 0.3).is_err());
        assert!(params_from_nb(0.0, 1.1, 0.3).is_err());
        assert!(params_from_nb(1.0, 1.1, 0.0).is_err());
        assert!(params_from_nb(1.0, 1.1, 0.9).is_err());
    }

    #[test]
    fn povm_limits_and_completeness() {
        let (m0, m1) = povm_elements(0.0, 0.0).unwrap();
        assert_eq!(m0, Operator::identity(2));
        assert!(m1.frobenius_norm() < 1e-15);
        let (m0, _) = povm_elements(FRAC_PI_2, 0.4).unwrap();
        assert!(m0.get(0, 0).norm() < 1e-15);
        assert!((m0.get(1, 1).re - 0.4f64.cos()).abs() < 1e-15);

        let mut rng = SplitMix64::new(1);
        for _ in 0..50 {
            let (m0, m1) =
                povm_elements(rng.random_quarter_angle(), rng.random_quarter_angle()).unwrap();
            let sum = &(&m0.adjoint() * &m0) + &(&m1.adjoint() * &m1);
            assert!(sum.max_abs_diff(&Operator::identity(2)) < 1e-12);
        }
        assert!(povm_elements(-0.1, 0.0).is_err());
    }

    #[test]
    fn failure_closed_form_unit_limit() {
        for xi in [0.05, 0.3, FRAC_PI_4] {
            assert!((failure_probability_closed(1.0, 1.0, xi).unwrap() - 0.25).abs() < 1e-15);
        }
        assert!(failure_probability_closed(1.0, 0.9, 0.3).is_err());
        assert!(failure_probability_closed(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn failure_closed_form_matches_first_line() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..200 {
            let n = rng.range(0.1, 10.0);
            let b = rng.range(1.0001, 3.0);
            let xi = rng.range(1e-3, FRAC_PI_4);
            let p = params_from_nb(n, b, xi).unwrap();
            let closed = failure_probability_closed(n, b, xi).unwrap();
            assert!((closed - failure_probability_first_line(&p)).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_n_failure_near_quarter() {
        let xi = 0.37;
        let p = params_from_nb(1.0, DEFAULT_B, xi).unwrap();
        let gate = GateSpec::along_z(xi).unwrap();
        let target = StateVector::basis_state(&TARGET_LABELS, 2).unwrap();
        let report = run_improved_protocol(&p, &gate, &target).unwrap();
        assert!((report.failure_probability() - 0.25).abs() < 2e-3);
    }

    #[test]
    fn branch_structure() {
        let mut rng = SplitMix64::new(31);
        let xi = 0.21;
        let p = params_from_nb(1.7, 1.05, xi).unwrap();
        let gate = GateSpec::new(xi, rng.random_axis(), rng.random_axis()).unwrap();
        let target = rng.random_state(&TARGET_LABELS);
        let report = run_improved_protocol(&p, &gate, &target).unwrap();
        assert_eq!(report.branches.len(), 16);
        assert!((report.total_probability() - 1.0).abs() < 1e-12);
        for b in BasisOutcome::ALL {
            assert!(report.is_success(Some(0), b), "M0 {b}");
        }
        assert!(report.is_success(Some(1), BasisOutcome::B00));
        assert!(report.is_success(Some(1), BasisOutcome::B01));
        assert!(report.is_success(Some(1), BasisOutcome::B10));
        assert!(!report.is_success(Some(1), BasisOutcome::B11));
        let closed = failure_probability_closed(1.7, 1.05, xi).unwrap();
        assert!((report.failure_probability() - closed).abs() < EPS_SIM);
        assert!((report.success_probability + closed - 1.0).abs() < EPS_SIM);
        assert!((report.entanglement - p.resource().entanglement()).abs() < 1e-15);
        assert!(report.min_success_overlap().unwrap() >= 1.0 - EPS_SIM);
    }

    #[test]
    fn m1_failure_operator_matches_closed_form() {
        // After M1 and CNOT the coefficients become
        // (λ0 sinθ0, λ1 sinθ0, λ3 sinθ1, λ2 sinθ1).
        let xi = 0.3;
        let p = params_from_nb(2.2, 1.2, xi).unwrap();
        let l = p.resource().lambda();
        let (s0, s1) = (p.theta0.sin(), p.theta1.sin());
        let mu = [l[0] * s0, l[1] * s0, l[3] * s1, l[2] * s1];
        let gate = GateSpec::along_z(xi).unwrap();
        let angles = MeasurementAngles::new(xi, p.delta1).unwrap();
        let target = StateVector::basis_state(&TARGET_LABELS, 0).unwrap();
        let report = run_improved_protocol(&p, &gate, &target).unwrap();
        let u = target_gate(&gate);
        for b in BasisOutcome::ALL {
            let s = branch_operator_from_coefficients(mu, &angles, &gate, b);
            for leaf in report
                .branches
                .iter()
                .filter(|x| x.povm == Some(1) && x.basis == b)
            {
                let d = distance_up_to_phase(&leaf.conditional_operator, &s).unwrap();
                assert!(d < 1e-12);
                let k2 = leaf.conditional_operator.frobenius_norm().powi(2) * 2.0;
                assert!((k2 - s.frobenius_norm().powi(2)).abs() < 1e-12);
            }
            let on_gate = distance_up_to_phase(&s, &u).unwrap() < 1e-12;
            assert_eq!(on_gate, b != BasisOutcome::B11);
        }
    }

    #[test]
    fn simulation_floor_and_xi_mismatch() {
        let p = params_from_nb(1.5, 1.0 + 1e-8, 0.2).unwrap();
        let target = StateVector::basis_state(&TARGET_LABELS, 0).unwrap();
        let gate = GateSpec::along_z(0.2).unwrap();
        assert!(run_improved_protocol(&p, &gate, &target).is_err());
        let p = params_from_nb(1.5, 1.1, 0.2).unwrap();
        let other = GateSpec::along_z(0.25).unwrap();
        assert!(run_improved_protocol(&p, &other, &target).is_err());
    }
}
