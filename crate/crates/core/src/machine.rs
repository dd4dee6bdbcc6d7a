//! The two-switch optical Deutsch machine.
//!
//! Modes `a, b, c, d, e` are indices 0..5, one photon at most per mode. The
//! input is `|01010⟩`. The pipeline is
//! `B_cd → gate → [projective EC] → S_a(π) → gate → [EC] → B†_cd`, where
//! both gates are Fredkin gates on `(a, b, e)` for `k1 = 0` and on
//! `(a, b, c)` for `k1 = 1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{
    damped_fredkin_channel, dephased_fredkin_mc, stream_seed, Channel, DephasedFredkin, LossPlacement,
    NoiseParams,
};
use crate::correction::{dualrail_postselect, mode_mismatch, projective_ec_step, LegalSubspace};
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockSpace, OccupationVector, PureState};
use crate::gates::{beamsplitter_unitary, fredkin_unitary, phase_shift_unitary, FredkinModes};

pub const MODE_A: usize = 0;
pub const MODE_B: usize = 1;
pub const MODE_C: usize = 2;
pub const MODE_D: usize = 3;
pub const MODE_E: usize = 4;

pub const INPUT_LABEL: &str = "01010";

pub fn machine_space() -> FockSpace {
    FockSpace::new(5, 1).expect("five modes at cutoff 1")
}

/// Gate modes selected by the `k1` switch.
pub fn gate_modes(k1: u8) -> FredkinModes {
    if k1 == 0 {
        FredkinModes::new(MODE_A, MODE_B, MODE_E)
    } else {
        FredkinModes::new(MODE_A, MODE_B, MODE_C)
    }
}

/// Photon count in mode `d` for a correct answer.
pub fn correct_d(k1: u8) -> usize {
    if k1 == 0 {
        1
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    #[default]
    None,
    /// Loss on the Kerr modes of each noisy gate.
    Loss,
    /// Equal loss on `a, b, c, d` in each noisy gate.
    BalancedLoss,
    /// Gaussian phase noise in the Kerr cell of each noisy gate.
    Dephasing,
}

impl NoiseModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Loss => "loss",
            Self::BalancedLoss => "balanced-loss",
            Self::Dephasing => "dephasing",
        }
    }

    pub fn is_lossy(&self) -> bool {
        matches!(self, Self::Loss | Self::BalancedLoss)
    }

    /// Loss noise sits in the second gate only; dephasing in both.
    pub fn default_noisy_gates(&self) -> NoisyGates {
        match self {
            Self::Dephasing => NoisyGates { first: true, second: true },
            _ => NoisyGates { first: false, second: true },
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::None, Self::Loss, Self::BalancedLoss, Self::Dephasing]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown noise model '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct NoisyGates {
    pub first: bool,
    pub second: bool,
}

/// How the dephased gates are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DephasingBackend {
    #[default]
    Analytic,
    /// Independent phase samples for each gate, seeded from `seed` and the
    /// gate position.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineConfig {
    pub k1: u8,
    /// Carried for labelling only.
    pub k0: u8,
    pub noise: NoiseParams,
    pub noise_model: NoiseModel,
    pub noisy_gates: NoisyGates,
    pub loss_placement: LossPlacement,
    pub dephasing_backend: DephasingBackend,
    /// Project onto the legal subspace after the first gate.
    pub projective_ec: bool,
    /// Also project after the second gate, onto the span of its ideal outputs.
    pub ec_after_second: bool,
    pub dualrail_postselect: bool,
}

impl MachineConfig {
    pub fn ideal(k1: u8) -> Self {
        Self {
            k1,
            k0: 0,
            noise: NoiseParams::default(),
            noise_model: NoiseModel::None,
            noisy_gates: NoiseModel::None.default_noisy_gates(),
            loss_placement: LossPlacement::BeforeKerr,
            dephasing_backend: DephasingBackend::Analytic,
            projective_ec: false,
            ec_after_second: false,
            dualrail_postselect: false,
        }
    }

    /// Loss `γ` in the second gate.
    pub fn lossy(k1: u8, gamma: f64) -> Self {
        Self {
            noise: NoiseParams { gamma, lambda: 0.0 },
            noise_model: NoiseModel::Loss,
            noisy_gates: NoiseModel::Loss.default_noisy_gates(),
            ..Self::ideal(k1)
        }
    }

    /// Balanced loss `γ` in the second gate.
    pub fn balanced(k1: u8, gamma: f64) -> Self {
        Self { noise_model: NoiseModel::BalancedLoss, ..Self::lossy(k1, gamma) }
    }

    /// Dephasing `λ` in both gates.
    pub fn dephased(k1: u8, lambda: f64) -> Self {
        Self {
            noise: NoiseParams { gamma: 0.0, lambda },
            noise_model: NoiseModel::Dephasing,
            noisy_gates: NoiseModel::Dephasing.default_noisy_gates(),
            ..Self::ideal(k1)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k1 > 1 || self.k0 > 1 {
            return Err(Error::InvalidConfig(format!("switch bits must be 0 or 1 (k1={}, k0={})", self.k1, self.k0)));
        }
        self.noise.validate()?;
        if (self.projective_ec || self.ec_after_second) && self.noise_model.is_lossy() {
            return Err(Error::InvalidConfig("projective correction requires a loss-free noise model".into()));
        }
        if self.ec_after_second && !self.projective_ec {
            return Err(Error::InvalidConfig("ec_after_second needs projective_ec".into()));
        }
        if let DephasingBackend::MonteCarlo { samples: 0, .. } = self.dephasing_backend {
            return Err(Error::ZeroSamples);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Final state after all corrections, renormalised.
    pub output_state: DensityOperator,
    /// Photon-number distribution over `a..d` before post-selection.
    pub outcome_distribution: Vec<(OccupationVector, f64)>,
    /// Mass surviving every correction step.
    pub p_accept: f64,
    /// Error conditioned on acceptance.
    pub p_error: f64,
    /// `(name, state)` after each pipeline stage.
    pub intermediate_states: Vec<(String, DensityOperator)>,
}

impl RunResult {
    pub fn probability_of(&self, abcd: &str) -> f64 {
        self.outcome_distribution
            .iter()
            .find(|(o, _)| o.to_string() == abcd)
            .map_or(0.0, |(_, p)| *p)
    }
}

fn abcd_distribution(rho: &DensityOperator) -> Result<Vec<(OccupationVector, f64)>> {
    let reduced = rho.partial_trace(&[MODE_A, MODE_B, MODE_C, MODE_D])?;
    Ok(reduced.diagonal_distribution())
}

struct Stage {
    name: &'static str,
    gate: bool,
}

fn gate_channel(config: &MachineConfig, position: u64) -> Result<Box<dyn Channel>> {
    let space = machine_space();
    let modes = gate_modes(config.k1);
    let noisy = match position {
        0 => config.noisy_gates.first,
        _ => config.noisy_gates.second,
    };
    if !noisy || config.noise_model == NoiseModel::None {
        return Ok(Box::new(fredkin_unitary(&space, modes)?));
    }
    let NoiseParams { gamma, lambda } = config.noise;
    Ok(match config.noise_model {
        NoiseModel::None => unreachable!(),
        NoiseModel::Loss => Box::new(damped_fredkin_channel(
            &space,
            modes,
            &[modes.b, modes.c],
            gamma,
            config.loss_placement,
        )?),
        NoiseModel::BalancedLoss => Box::new(damped_fredkin_channel(
            &space,
            modes,
            &[MODE_A, MODE_B, MODE_C, MODE_D],
            gamma,
            config.loss_placement,
        )?),
        NoiseModel::Dephasing => match config.dephasing_backend {
            DephasingBackend::Analytic => Box::new(DephasedFredkin::analytic(&space, modes, lambda)?),
            DephasingBackend::MonteCarlo { samples, seed } => {
                Box::new(dephased_fredkin_mc(&space, modes, lambda, samples, stream_seed(seed, position))?)
            }
        },
    })
}

/// Span of the ideal second-gate outputs for both switch settings,
/// `{|0101⟩, |0110⟩}`.
fn second_gate_legal(space: FockSpace) -> Result<LegalSubspace> {
    let cands = [
        PureState::from_label(space, "01010")?,
        PureState::from_label(space, "01100")?,
    ];
    LegalSubspace::from_candidates(space, &cands)
}

/// Runs the machine on `|01010⟩`.
pub fn run(config: &MachineConfig) -> Result<RunResult> {
    config.validate()?;
    let space = machine_space();
    let b_cd = beamsplitter_unitary(&space, MODE_C, MODE_D)?;
    let s_a = phase_shift_unitary(&space, MODE_A, PI)?;
    let gates = [gate_channel(config, 0)?, gate_channel(config, 1)?];

    let stages = [
        Stage { name: "beamsplitter-cd", gate: false },
        Stage { name: "first-gate", gate: true },
        Stage { name: "phase-a", gate: false },
        Stage { name: "second-gate", gate: true },
        Stage { name: "output", gate: false },
    ];
    let mut rho = DensityOperator::from_label(space, INPUT_LABEL)?;
    let mut p_accept = 1.0;
    let mut intermediates = Vec::new();
    let mut gate_index = 0;
    for stage in &stages {
        rho = if stage.gate {
            let out = gates[gate_index].apply(&rho)?;
            gate_index += 1;
            out
        } else {
            match stage.name {
                "beamsplitter-cd" => rho.apply_unitary(&b_cd)?,
                "phase-a" => rho.apply_unitary(&s_a)?,
                _ => rho.apply_unitary(&b_cd.adjoint())?,
            }
        };
        intermediates.push((stage.name.to_string(), rho.clone()));
        if stage.name == "first-gate" && config.projective_ec {
            let (corrected, p) = projective_ec_step(&rho)?;
            p_accept *= p;
            rho = corrected;
            intermediates.push(("projective-ec".to_string(), rho.clone()));
        }
        if stage.name == "second-gate" && config.ec_after_second {
            let (corrected, p) = rho.project(second_gate_legal(space)?.projector())?;
            p_accept *= p;
            rho = corrected;
            intermediates.push(("projective-ec-second".to_string(), rho.clone()));
        }
    }

    let outcome_distribution = abcd_distribution(&rho)?;
    if config.dualrail_postselect {
        let (accepted, p) = dualrail_postselect(&rho)?;
        p_accept *= p;
        rho = accepted;
    }
    let p_error = mode_mismatch(&rho, MODE_D, correct_d(config.k1))?;
    Ok(RunResult {
        output_state: rho,
        outcome_distribution,
        p_accept,
        p_error,
        intermediate_states: intermediates,
    })
}

/// The lossless machine.
pub fn ideal_run(k1: u8) -> Result<RunResult> {
    run(&MachineConfig::ideal(k1))
}

/// Error probability of `result` for switch setting `k1`, conditioned on
/// acceptance.
pub fn error_probability(result: &RunResult, k1: u8) -> Result<f64> {
    if result.p_accept <= 0.0 {
        return Err(Error::ZeroAcceptance);
    }
    mode_mismatch(&result.output_state, MODE_D, correct_d(k1))
}
