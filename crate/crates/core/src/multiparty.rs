//! Quasi-GHZ resources and the Charlie-mediated N-party gate.
//!
//! Partners `A1..AN` hold one resource qubit `a_i` each and their target
//! `A_i`; Charlie holds `c0, c1` and, optionally, a target `C`. The resource
//! `λ0|0..0 00⟩ + λ1|0..0 01⟩ + λ2|1..1 10⟩ + λ3|1..1 11⟩` over
//! `(a1..aN, c0, c1)` carries no entanglement between any two holders, yet
//! the stator protocol turns it into `exp(iξ σ_A1 ⊗ … ⊗ σ_AN [⊗ σ_C])`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    pauli_axis_matrix, ppt_min_eigenvalue, von_neumann_entropy, PauliAxis, StateVector, C64,
};
use crate::protocol::engine::{ControlledGate, Preparation, StatorLayout};
use crate::protocol::{
    check_xi_matches, improved_preparation, ImprovedParams, MeasurementAngles, ProtocolReport,
    ResourceSpec,
};
use crate::tolerance::{EIGEN_FLOOR, EPS_ALG};

/// Default limit on the number of partners; the simulated register holds
/// `2N + 2` qubits plus Charlie's target.
pub const DEFAULT_MAX_PARTIES: usize = 6;

/// Charlie's resource qubits.
pub const CHARLIE_LABELS: [&str; 2] = ["c0", "c1"];
/// Charlie's target.
pub const CHARLIE_TARGET: &str = "C";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultipartySpec {
    parties: usize,
    resource: ResourceSpec,
    axes: Vec<PauliAxis>,
    charlie_axis: Option<PauliAxis>,
    max_parties: usize,
}

impl MultipartySpec {
    /// `axes` holds one axis per partner; `charlie_axis` adds Charlie's
    /// target to the gate.
    pub fn new(
        resource: ResourceSpec,
        axes: Vec<PauliAxis>,
        charlie_axis: Option<PauliAxis>,
    ) -> Result<Self> {
        Self::with_max_parties(resource, axes, charlie_axis, DEFAULT_MAX_PARTIES)
    }

    pub fn with_max_parties(
        resource: ResourceSpec,
        axes: Vec<PauliAxis>,
        charlie_axis: Option<PauliAxis>,
        max_parties: usize,
    ) -> Result<Self> {
        let parties = axes.len();
        if parties < 2 {
            return Err(Error::param(format!(
                "need at least 2 partners, got {parties}"
            )));
        }
        if parties > max_parties {
            return Err(Error::param(format!(
                "{parties} partners exceeds the limit of {max_parties}"
            )));
        }
        Ok(MultipartySpec {
            parties,
            resource,
            axes,
            charlie_axis,
            max_parties,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn resource(&self) -> &ResourceSpec {
        &self.resource
    }

    pub fn includes_charlie_target(&self) -> bool {
        self.charlie_axis.is_some()
    }

    /// `a1..aN, c0, c1`.
    pub fn resource_labels(&self) -> Vec<String> {
        (1..=self.parties)
            .map(|i| format!("a{i}"))
            .chain(CHARLIE_LABELS.iter().map(|s| s.to_string()))
            .collect()
    }

    /// `A1..AN`, then `C` when Charlie's target takes part.
    pub fn target_labels(&self) -> Vec<String> {
        (1..=self.parties)
            .map(|i| format!("A{i}"))
            .chain(self.charlie_axis.map(|_| CHARLIE_TARGET.to_string()))
            .collect()
    }

    /// Each holder's qubits: one group per partner, then Charlie's.
    pub fn holders(&self) -> Vec<Vec<String>> {
        let mut groups: Vec<Vec<String>> =
            (1..=self.parties).map(|i| vec![format!("a{i}")]).collect();
        groups.push(CHARLIE_LABELS.iter().map(|s| s.to_string()).collect());
        groups
    }
}

pub fn build_quasi_ghz(spec: &MultipartySpec) -> StateVector {
    let [l0, l1, l2, l3] = spec.resource.lambda();
    let qubits = spec.parties + 2;
    let ones = ((1usize << (spec.parties + 1)) - 1) << 1;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << qubits];
    amps[0] = C64::new(l0, 0.0);
    amps[1] = C64::new(l1, 0.0);
    amps[ones] = C64::new(l2, 0.0);
    amps[ones | 1] = C64::new(l3, 0.0);
    StateVector::new(&spec.resource_labels(), amps).expect("normalized resource")
}

/// Charlie's measurement strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MultipartyMode {
    /// Collective measurement with fixed angles on the spec's resource.
    General(MeasurementAngles),
    /// POVM on `c0` first; the resource must be the one `params` prescribes.
    Improved(ImprovedParams),
}

fn layout(spec: &MultipartySpec, xi: f64) -> StatorLayout {
    let mut target_sigmas = Vec::new();
    let mut gates = Vec::new();
    for (i, axis) in spec.axes.iter().enumerate() {
        let sigma = pauli_axis_matrix(axis);
        gates.push(ControlledGate {
            control: format!("a{}", i + 1),
            target: format!("A{}", i + 1),
            sigma: sigma.clone(),
            // Exactly one partner carries the factor i.
            phase: if i == 0 {
                C64::new(0.0, 1.0)
            } else {
                C64::new(1.0, 0.0)
            },
        });
        target_sigmas.push(sigma);
    }
    if let Some(axis) = &spec.charlie_axis {
        let sigma = pauli_axis_matrix(axis);
        gates.push(ControlledGate {
            control: CHARLIE_LABELS[0].into(),
            target: CHARLIE_TARGET.into(),
            sigma: sigma.clone(),
            phase: C64::new(1.0, 0.0),
        });
        target_sigmas.push(sigma);
    }
    StatorLayout {
        resource: build_quasi_ghz(spec),
        target_labels: spec.target_labels(),
        target_sigmas,
        gates,
        sigma_x_qubits: (1..=spec.parties).map(|i| format!("a{i}")).collect(),
        sign_qubit: CHARLIE_LABELS[0].into(),
        pair: [CHARLIE_LABELS[0].into(), CHARLIE_LABELS[1].into()],
        xi,
        classical_bits: 2 * spec.parties as u32,
        entanglement: spec.resource.entanglement(),
    }
}

/// Runs the N-party protocol on `target` (over [`MultipartySpec::target_labels`]).
pub fn run_multiparty_protocol(
    spec: &MultipartySpec,
    xi: f64,
    mode: &MultipartyMode,
    target: &StateVector,
) -> Result<ProtocolReport> {
    if !(xi > 0.0 && xi <= std::f64::consts::FRAC_PI_4 + EPS_ALG) {
        return Err(Error::param(format!("ξ = {xi} outside (0, π/4]")));
    }
    let prep = match mode {
        MultipartyMode::General(angles) => Preparation::Direct(*angles),
        MultipartyMode::Improved(params) => {
            check_xi_matches(params.xi, xi)?;
            let want = params.resource().lambda();
            let have = spec.resource.lambda();
            if want.iter().zip(&have).any(|(w, h)| (w - h).abs() > EPS_ALG) {
                return Err(Error::param(format!(
                    "resource {have:?} differs from the improved parameters' {want:?}"
                )));
            }
            improved_preparation(params)?
        }
    };
    layout(spec, xi).run(&prep, target)
}

/// Smallest eigenvalue of the partial transpose of the two-qubit reduction
/// to `pair`, and whether it clears the separability floor.
pub fn pairwise_separability(state: &StateVector, pair: [&str; 2]) -> Result<(f64, bool)> {
    if pair[0] == pair[1] {
        return Err(Error::DuplicateLabel(pair[0].to_string()));
    }
    let rho = state.reduced_density_matrix(&pair)?;
    let min = ppt_min_eigenvalue(&rho)?;
    Ok((min, min >= EIGEN_FLOOR))
}

/// Von Neumann entropy of the reduction to `part`.
pub fn bipartition_entropy<S: AsRef<str>>(state: &StateVector, part: &[S]) -> Result<f64> {
    if part.is_empty() || part.len() >= state.num_qubits() {
        return Err(Error::param(format!(
            "a cut needs between 1 and {} qubits, got {}",
            state.num_qubits() - 1,
            part.len()
        )));
    }
    Ok(von_neumann_entropy(&state.reduced_density_matrix(part)?))
}

/// Every cut that keeps each holder's qubits on one side, as the qubit list
/// of the side containing the first partner.
pub fn holder_cuts(spec: &MultipartySpec) -> Vec<Vec<String>> {
    let holders = spec.holders();
    let h = holders.len();
    // Fixing holder 0 on the listed side enumerates each cut once.
    (0..(1usize << (h - 1)) - 1)
        .map(|mask| {
            let mut side = holders[0].clone();
            for (k, group) in holders.iter().enumerate().skip(1) {
                if mask & (1 << (k - 1)) != 0 {
                    side.extend(group.iter().cloned());
                }
            }
            side
        })
        .collect()
}

/// Minimum PPT eigenvalue over every pair of resource qubits.
pub fn min_pairwise_ppt(state: &StateVector) -> Result<f64> {
    let labels = state.labels();
    let mut min = f64::INFINITY;
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            let (m, _) = pairwise_separability(state, [&labels[i], &labels[j]])?;
            min = min.min(m);
        }
    }
    Ok(min)
}
