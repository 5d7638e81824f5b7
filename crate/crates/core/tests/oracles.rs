//! Cross-checks against independent computations.

use nalgebra::{Complex, DMatrix};
use stator_core::analysis::{default_grid, generate_curve};
use stator_core::linalg::eigen::hermitian_eigenvalues;
use stator_core::protocol::{
    fpt_config, params_from_nb, run_improved_protocol, GateSpec, DEFAULT_B, TARGET_LABELS,
};
use stator_core::report::{curve_csv, CURVE_HEADER};
use stator_core::rng::SplitMix64;
use stator_core::{Operator, StateVector, C64};

fn random_hermitian(rng: &mut SplitMix64, dim: usize) -> Operator {
    let mut m = Operator::zeros(dim);
    for i in 0..dim {
        m.set(i, i, C64::new(rng.standard_normal(), 0.0));
        for j in i + 1..dim {
            let z = C64::new(rng.standard_normal(), rng.standard_normal());
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    m
}

#[test]
fn eigenvalues_agree_with_nalgebra() {
    let mut rng = SplitMix64::new(2024);
    for dim in [2, 4, 8] {
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, dim);
            let na = DMatrix::from_fn(dim, dim, |i, j| {
                let z = h.get(i, j);
                Complex::new(z.re, z.im)
            });
            let mut want: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            want.sort_by(f64::total_cmp);
            let got = hermitian_eigenvalues(&h);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "dim {dim}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn curve_fidelity_matches_simulation() {
    let curve = generate_curve(DEFAULT_B, &default_grid()).unwrap();
    let target = StateVector::basis_state(&TARGET_LABELS, 3).unwrap();
    for p in curve.points.iter().step_by(20) {
        let params = params_from_nb(p.n, DEFAULT_B, p.xi_opt).unwrap();
        let gate = GateSpec::along_z(p.xi_opt).unwrap();
        let report = run_improved_protocol(&params, &gate, &target).unwrap();
        assert!(
            (p.f - (1.0 - report.failure_probability())).abs() < 1e-8,
            "n = {}",
            p.n
        );
    }
}

#[test]
fn fpt_cost_matches_fpt_resource() {
    let curve = generate_curve(DEFAULT_B, &default_grid()).unwrap();
    for p in curve.points.iter().step_by(50) {
        let gate = GateSpec::along_z(p.xi_opt).unwrap();
        let (spec, _) = fpt_config(&gate, p.f).unwrap();
        assert!((spec.entanglement() - p.e_fpt).abs() < 1e-12);
    }
}

#[test]
fn curve_csv_round_trips() {
    let curve = generate_curve(DEFAULT_B, &default_grid()).unwrap();
    let text = curve_csv(&curve.points);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.join(","), CURVE_HEADER);
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), curve.points.len());
    for (row, p) in rows.iter().zip(&curve.points) {
        let want = [p.n, p.xi_opt, p.e0, p.e0_exact, p.e_fpt, p.f];
        for (a, b) in row.iter().zip(want) {
            assert!((a - b).abs() <= 5e-7);
        }
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let run = || {
        let mut rng = SplitMix64::new(42);
        let xi = rng.range(0.01, 0.7);
        let params = params_from_nb(rng.range(0.5, 5.0), 1.2, xi).unwrap();
        let gate = GateSpec::new(xi, rng.random_axis(), rng.random_axis()).unwrap();
        let target = rng.random_state(&TARGET_LABELS);
        run_improved_protocol(&params, &gate, &target).unwrap()
    };
    assert_eq!(run(), run());
}
