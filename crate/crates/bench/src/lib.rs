//! Fixed inputs for the criterion benchmarks.

use stator_core::multiparty::{MultipartyMode, MultipartySpec};
use stator_core::protocol::{params_from_nb, GateSpec, ImprovedParams, DEFAULT_B, TARGET_LABELS};
use stator_core::rng::{SplitMix64, DEFAULT_SEED};
use stator_core::StateVector;

pub struct ImprovedCase {
    pub params: ImprovedParams,
    pub gate: GateSpec,
    pub target: StateVector,
}

pub fn improved_case() -> ImprovedCase {
    let mut rng = SplitMix64::new(DEFAULT_SEED);
    let xi = 0.17;
    ImprovedCase {
        params: params_from_nb(2.19, DEFAULT_B, xi).expect("valid parameters"),
        gate: GateSpec::new(xi, rng.random_axis(), rng.random_axis()).expect("valid gate"),
        target: rng.random_state(&TARGET_LABELS),
    }
}

pub struct MultipartyCase {
    pub spec: MultipartySpec,
    pub xi: f64,
    pub mode: MultipartyMode,
    pub target: StateVector,
}

/// Improved-mode run with `parties` partners and no Charlie target.
pub fn multiparty_case(parties: usize) -> MultipartyCase {
    let mut rng = SplitMix64::new(DEFAULT_SEED);
    let xi = 0.17;
    let params = params_from_nb(2.19, DEFAULT_B, xi).expect("valid parameters");
    let axes = (0..parties).map(|_| rng.random_axis()).collect();
    let spec = MultipartySpec::new(params.resource(), axes, None).expect("valid spec");
    let labels = spec.target_labels();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    MultipartyCase {
        target: rng.random_state(&refs),
        spec,
        xi,
        mode: MultipartyMode::Improved(params),
    }
}
