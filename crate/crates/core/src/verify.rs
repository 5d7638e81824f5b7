//! End-to-end checks of every protocol and analysis claim.
//!
//! Each check is seeded and deterministic. The command-line `verify-all`
//! command and the `acceptance` test target both run these.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::analysis::{
    default_crossings, find_n0, log_grid, n0_comparison, optimal_xi, plan_for_xi,
};
use crate::error::Result;
use crate::linalg::binary_entropy;
use crate::multiparty::{
    bipartition_entropy, build_quasi_ghz, holder_cuts, min_pairwise_ppt, run_multiparty_protocol,
    MultipartyMode, MultipartySpec,
};
use crate::protocol::{
    deterministic_config, failure_probability_closed, fpt_config, optimal_alpha, params_from_nb,
    run_general_protocol, run_improved_protocol, smallxi_config, smallxi_success_probability,
    BasisOutcome, GateSpec, MeasurementAngles, ResourceSpec, B_SIM_FLOOR, DEFAULT_B, TARGET_LABELS,
};
use crate::rng::{SplitMix64, DEFAULT_SEED};
use crate::PauliAxis;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: f64,
    pub passed: bool,
    /// Informational checks are reported but never fail the run.
    pub gated: bool,
}

impl CheckResult {
    fn new(
        id: u32,
        name: &str,
        expected: String,
        actual: String,
        tolerance: f64,
        passed: bool,
    ) -> Self {
        CheckResult {
            id,
            name: name.to_owned(),
            expected,
            actual,
            tolerance,
            passed,
            gated: true,
        }
    }

    fn errored(id: u32, name: &str, err: crate::Error) -> Self {
        CheckResult::new(
            id,
            name,
            "no error".into(),
            format!("error: {err}"),
            0.0,
            false,
        )
    }

    /// `PASS`/`FAIL`/`INFO` line with the check's numbers.
    pub fn line(&self) -> String {
        let flag = match (self.gated, self.passed) {
            (false, _) => "INFO",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        format!(
            "[{flag}] {:>2} {}: expected {}; actual {}; tol {:e}",
            self.id, self.name, self.expected, self.actual, self.tolerance
        )
    }
}

fn guard(id: u32, name: &str, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| CheckResult::errored(id, name, e))
}

/// 100 random gates, axes and targets through the deterministic protocol.
pub fn check_deterministic() -> CheckResult {
    const NAME: &str = "deterministic protocol";
    guard(1, NAME, || {
        let mut rng = SplitMix64::new(DEFAULT_SEED);
        let (mut f_err, mut e_err, mut min_overlap) = (0.0f64, 0.0f64, f64::INFINITY);
        for _ in 0..100 {
            let xi = rng.range(0.0, FRAC_PI_4);
            let gate = GateSpec::new(xi, rng.random_axis(), rng.random_axis())?;
            let target = rng.random_state(&TARGET_LABELS);
            let (spec, angles) = deterministic_config(&gate);
            let r = run_general_protocol(&spec, &angles, &gate, &target)?;
            f_err = f_err.max((r.success_probability - 1.0).abs());
            e_err = e_err.max((r.entanglement - 1.0).abs());
            min_overlap = min_overlap.min(r.min_success_overlap().unwrap_or(0.0));
        }
        Ok(CheckResult::new(
            1,
            NAME,
            "F = 1, E = 1, every overlap ≥ 1 − 1e-10".into(),
            format!(
                "max|F−1| = {f_err:.3e}, max|E−1| = {e_err:.3e}, min overlap = {min_overlap:.15}"
            ),
            1e-12,
            f_err <= 1e-12 && e_err <= 1e-12 && min_overlap >= 1.0 - 1e-10,
        ))
    })
}

/// Simulated FPT fidelity against `2λ0²`, then the cost at `F = 0.793`.
pub fn check_fpt() -> CheckResult {
    const NAME: &str = "FPT fidelity and cost";
    guard(2, NAME, || {
        let mut rng = SplitMix64::new(DEFAULT_SEED);
        let mut worst = 0.0f64;
        for k in 1..=20 {
            let l0 = k as f64 / 20.0 * std::f64::consts::FRAC_1_SQRT_2;
            let gate = GateSpec::new(
                rng.range(0.0, FRAC_PI_4),
                rng.random_axis(),
                rng.random_axis(),
            )?;
            let target = rng.random_state(&TARGET_LABELS);
            let (spec, angles) = fpt_config(&gate, 2.0 * l0 * l0)?;
            let r = run_general_protocol(&spec, &angles, &gate, &target)?;
            worst = worst.max((r.success_probability - 2.0 * spec.lambda()[0].powi(2)).abs());
        }
        let (spec, _) = fpt_config(&GateSpec::along_z(0.5)?, 0.793)?;
        let e = spec.entanglement();
        Ok(CheckResult::new(
            2,
            NAME,
            "F = 2λ0² (±1e-12); E(F=0.793) = 0.969 ± 0.002".into(),
            format!("max|F−2λ0²| = {worst:.3e}, E = {e:.6}"),
            1e-12,
            worst <= 1e-12 && (e - 0.969).abs() <= 0.002,
        ))
    })
}

/// Small-ξ configuration: optimum equals `1/(1 + sin 2ξ)` and no α beats it.
pub fn check_smallxi() -> CheckResult {
    const NAME: &str = "small-angle optimum";
    guard(3, NAME, || {
        let target = SplitMix64::new(DEFAULT_SEED).random_state(&TARGET_LABELS);
        let mut worst = 0.0f64;
        let mut excess = f64::NEG_INFINITY;
        for k in 1..=20 {
            let xi = k as f64 / 20.0 * FRAC_PI_4;
            let gate = GateSpec::along_z(xi)?;
            let bound = 1.0 / (1.0 + (2.0 * xi).sin());
            let (spec, angles) = smallxi_config(&gate, optimal_alpha(&gate)?)?;
            let r = run_general_protocol(&spec, &angles, &gate, &target)?;
            let p = if r.is_success(None, BasisOutcome::B10) {
                r.basis_probability(None, BasisOutcome::B10)
            } else {
                0.0
            };
            worst = worst.max((p - bound).abs());
            if k % 5 == 0 {
                for j in 1..=1000 {
                    let alpha = j as f64 / 1001.0 * FRAC_PI_2;
                    let (spec, angles) = smallxi_config(&gate, alpha)?;
                    let r = run_general_protocol(&spec, &angles, &gate, &target)?;
                    excess = excess.max(r.basis_probability(None, BasisOutcome::B10) - bound);
                }
            } else {
                for j in 1..=1000 {
                    let alpha = j as f64 / 1001.0 * FRAC_PI_2;
                    excess = excess.max(smallxi_success_probability(xi, alpha) - bound);
                }
            }
        }
        Ok(CheckResult::new(
            3,
            NAME,
            "P(B10) = 1/(1+sin 2ξ) at the optimal α; sweep never exceeds it".into(),
            format!("max|P−bound| = {worst:.3e}, max sweep excess = {excess:.3e}"),
            1e-10,
            worst <= 1e-10 && excess <= 1e-12,
        ))
    })
}

/// Simulated failure probability of the improved technique vs. closed form.
pub fn check_improved() -> CheckResult {
    const NAME: &str = "improved technique failure";
    guard(4, NAME, || {
        let mut rng = SplitMix64::new(DEFAULT_SEED);
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let n = rng.range(0.2, 10.0);
            let b = rng.range(B_SIM_FLOOR, 1.5);
            let xi = rng.range(1e-3, FRAC_PI_4);
            let params = params_from_nb(n, b, xi)?;
            let gate = GateSpec::new(xi, rng.random_axis(), rng.random_axis())?;
            let target = rng.random_state(&TARGET_LABELS);
            let r = run_improved_protocol(&params, &gate, &target)?;
            worst =
                worst.max((r.failure_probability() - failure_probability_closed(n, b, xi)?).abs());
        }
        Ok(CheckResult::new(
            4,
            NAME,
            "simulated P_fail = closed form on 500 draws".into(),
            format!("max deviation = {worst:.3e}"),
            1e-10,
            worst <= 1e-10,
        ))
    })
}

/// Crossing of the two cost curves at `b = 1.001`.
pub fn check_crossing() -> CheckResult {
    const NAME: &str = "cost-curve crossing";
    guard(5, NAME, || {
        let c = default_crossings(DEFAULT_B)?;
        let ((n1, e), (_, f), (_, xi)) = (c.m0, c.m1, c.m2);
        Ok(CheckResult::new(
            5,
            NAME,
            "n1 = 1.521 ± 0.005, E = 0.969, F = 0.793, ξ = 0.353 (± 0.002)".into(),
            format!("n1 = {n1:.6}, E = {e:.6}, F = {f:.6}, ξ = {xi:.6}"),
            0.002,
            (n1 - 1.521).abs() <= 0.005
                && (e - 0.969).abs() <= 0.002
                && (f - 0.793).abs() <= 0.002
                && (xi - 0.353).abs() <= 0.002,
        ))
    })
}

/// The plan for `ξ = 0.17`.
pub fn check_plan_point() -> CheckResult {
    const NAME: &str = "plan at ξ = 0.17";
    guard(6, NAME, || {
        let plan = plan_for_xi(0.17, DEFAULT_B)?;
        let (e, f) = (plan.entanglement(), plan.fidelity());
        Ok(CheckResult::new(
            6,
            NAME,
            "E0 = 0.897, F = 0.856 (± 0.002)".into(),
            format!("{plan:?}"),
            0.002,
            matches!(plan, crate::analysis::Plan::Improved { .. })
                && (e - 0.897).abs() <= 0.002
                && (f - 0.856).abs() <= 0.002,
        ))
    })
}

/// Root of the printed polynomial.
pub fn check_n0() -> CheckResult {
    let n0 = find_n0();
    CheckResult::new(
        7,
        "n0 polynomial root",
        "1.214 ± 0.002".into(),
        format!("{n0:.9}"),
        0.002,
        (n0 - 1.214).abs() <= 0.002,
    )
}

/// The polynomial root next to the cost-comparison thresholds; not gated.
pub fn n0_side_by_side() -> CheckResult {
    const NAME: &str = "n0 side by side";
    let mut r = guard(7, NAME, || {
        let c = n0_comparison(DEFAULT_B)?;
        Ok(CheckResult::new(
            7,
            NAME,
            "reported only".into(),
            format!(
                "polynomial root = {:.6}, E0 = E_FPT at n = {:.6}, exact-b cost crossing at n = {:.6}",
                c.polynomial_root, c.empirical_threshold, c.empirical_threshold_exact
            ),
            0.0,
            true,
        ))
    });
    r.gated = false;
    r
}

/// Central finite difference of the failure probability at the optimum.
pub fn check_stationarity() -> CheckResult {
    const NAME: &str = "optimizer stationarity";
    guard(8, NAME, || {
        let h = 1e-6;
        let mut worst = 0.0f64;
        for n in log_grid(find_n0(), 20.0, 200) {
            let xi = optimal_xi(n, DEFAULT_B)?;
            let d = (failure_probability_closed(n + h, DEFAULT_B, xi)?
                - failure_probability_closed(n - h, DEFAULT_B, xi)?)
                / (2.0 * h);
            worst = worst.max(d.abs());
        }
        Ok(CheckResult::new(
            8,
            NAME,
            "|∂P/∂n| ≤ 1e-6 at 200 grid points".into(),
            format!("max |∂P/∂n| = {worst:.3e}"),
            1e-6,
            worst <= 1e-6,
        ))
    })
}

/// Separability, cut entropies, fidelity and bit count for N = 2, 3, 4.
pub fn check_multiparty() -> CheckResult {
    const NAME: &str = "multiparty";
    guard(9, NAME, || {
        let mut rng = SplitMix64::new(DEFAULT_SEED);
        let (mut min_ppt, mut entropy_err, mut f_err) = (f64::INFINITY, 0.0f64, 0.0f64);
        let mut bits_ok = true;
        for parties in 2..=4usize {
            let xi = rng.range(0.05, FRAC_PI_4);
            let lambda = ResourceSpec::new(rng.random_lambdas())?;
            let angles =
                MeasurementAngles::new(rng.random_quarter_angle(), rng.random_quarter_angle())?;
            let axes: Vec<PauliAxis> = (0..parties).map(|_| rng.random_axis()).collect();

            let spec = MultipartySpec::new(lambda, axes.clone(), None)?;
            let state = build_quasi_ghz(&spec);
            min_ppt = min_ppt.min(min_pairwise_ppt(&state)?);
            let h = binary_entropy(lambda.h())?;
            for cut in holder_cuts(&spec) {
                entropy_err = entropy_err.max((bipartition_entropy(&state, &cut)? - h).abs());
            }

            let labels = spec.target_labels();
            let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let target = rng.random_state(&label_refs);
            let bi_target = rng.random_state(&TARGET_LABELS);
            let gate = GateSpec::new(xi, axes[0], axes[1])?;

            let multi =
                run_multiparty_protocol(&spec, xi, &MultipartyMode::General(angles), &target)?;
            let bi = run_general_protocol(&lambda, &angles, &gate, &bi_target)?;
            f_err = f_err.max((multi.success_probability - bi.success_probability).abs());
            bits_ok &= multi.classical_bits == 2 * parties as u32;

            let (r, angles) = deterministic_config(&gate);
            let spec = MultipartySpec::new(r, axes.clone(), None)?;
            let multi =
                run_multiparty_protocol(&spec, xi, &MultipartyMode::General(angles), &target)?;
            let bi = run_general_protocol(&r, &angles, &gate, &bi_target)?;
            f_err = f_err.max((multi.success_probability - bi.success_probability).abs());

            let params = params_from_nb(rng.range(1.3, 4.0), DEFAULT_B, xi)?;
            let spec = MultipartySpec::new(params.resource(), axes, None)?;
            let multi =
                run_multiparty_protocol(&spec, xi, &MultipartyMode::Improved(params), &target)?;
            let bi = run_improved_protocol(&params, &gate, &bi_target)?;
            f_err = f_err.max((multi.success_probability - bi.success_probability).abs());
            bits_ok &= multi.classical_bits == 2 * parties as u32;
        }
        Ok(CheckResult::new(
            9,
            NAME,
            "pairs PPT ≥ −1e-12, cut entropy = h(H) ±1e-12, F matches bipartite ±1e-10, bits = 2N".into(),
            format!(
                "min PPT eigenvalue = {min_ppt:.3e}, max entropy error = {entropy_err:.3e}, max |ΔF| = {f_err:.3e}, bits ok = {bits_ok}"
            ),
            1e-10,
            min_ppt >= -1e-12 && entropy_err <= 1e-12 && f_err <= 1e-10 && bits_ok,
        ))
    })
}

/// Plans for shrinking ξ approach `F = 1`, `E0 = 0`.
pub fn check_small_angle_limit() -> CheckResult {
    const NAME: &str = "small-angle limit";
    guard(10, NAME, || {
        let plans = [0.05, 0.02, 0.01]
            .iter()
            .map(|&xi| plan_for_xi(xi, DEFAULT_B))
            .collect::<Result<Vec<_>>>()?;
        let f: Vec<f64> = plans.iter().map(|p| p.fidelity()).collect();
        let e: Vec<f64> = plans.iter().map(|p| p.entanglement()).collect();
        let monotone = f.windows(2).all(|w| w[1] > w[0]) && e.windows(2).all(|w| w[1] < w[0]);
        Ok(CheckResult::new(
            10,
            NAME,
            "F increasing toward 1, E0 decreasing toward 0 for ξ = 0.05, 0.02, 0.01".into(),
            format!("F = {f:.6?}, E0 = {e:.6?}"),
            0.0,
            monotone && f.iter().all(|&x| x <= 1.0) && e.iter().all(|&x| x >= 0.0),
        ))
    })
}

/// Every check in order, with the informational `n0` comparison after
/// check 7.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check_deterministic(),
        check_fpt(),
        check_smallxi(),
        check_improved(),
        check_crossing(),
        check_plan_point(),
        check_n0(),
        n0_side_by_side(),
        check_stationarity(),
        check_multiparty(),
        check_small_angle_limit(),
    ]
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed || !r.gated)
}
