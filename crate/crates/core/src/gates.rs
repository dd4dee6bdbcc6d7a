//! Unitaries for the optical components and the Fredkin gate built from them.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, LinearOperator};
use crate::linalg::{self, CMatrix};

/// Mode assignment of a Fredkin gate: the beamsplitters couple `a` and `b`,
/// the Kerr cell couples `b` and `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FredkinModes {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl FredkinModes {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        Self { a, b, c }
    }

    pub fn check(&self, space: &FockSpace) -> Result<()> {
        space.check_distinct_modes(&[self.a, self.b, self.c])
    }
}

/// Declarative description of a single gate, resolved against a space by
/// [`GateSpec::build`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GateSpec {
    /// Mixing angle `theta` in `exp[theta (a†b - b†a)]`; a 50/50 splitter has `theta = π/4`.
    Beamsplitter { i: usize, j: usize, theta: f64 },
    Kerr { i: usize, j: usize, chi: f64 },
    PhaseShift { mode: usize, phi: f64 },
    Fredkin { modes: FredkinModes },
    FredkinNoisy { modes: FredkinModes, epsilon: f64 },
}

impl GateSpec {
    pub fn build(&self, space: &FockSpace) -> Result<LinearOperator> {
        match *self {
            GateSpec::Beamsplitter { i, j, theta } => {
                finite(theta)?;
                beamsplitter_with_angle(space, i, j, theta)
            }
            GateSpec::Kerr { i, j, chi } => {
                finite(chi)?;
                kerr_unitary(space, i, j, chi)
            }
            GateSpec::PhaseShift { mode, phi } => {
                finite(phi)?;
                phase_shift_unitary(space, mode, phi)
            }
            GateSpec::Fredkin { modes } => fredkin_unitary(space, modes),
            GateSpec::FredkinNoisy { modes, epsilon } => {
                finite(epsilon)?;
                noisy_fredkin_sample(space, modes, epsilon)
            }
        }
    }
}

fn finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("gate parameter"))
    }
}

/// 50/50 beamsplitter `exp[(π/4)(a_i† a_j - a_j† a_i)]` with identity on the
/// other modes. Exact on states with at most `cutoff` photons in the pair.
pub fn beamsplitter_unitary(space: &FockSpace, i: usize, j: usize) -> Result<LinearOperator> {
    beamsplitter_with_angle(space, i, j, FRAC_PI_4)
}

pub(crate) fn beamsplitter_with_angle(
    space: &FockSpace,
    i: usize,
    j: usize,
    theta: f64,
) -> Result<LinearOperator> {
    space.check_distinct_modes(&[i, j])?;
    let ai = space.lowering(i)?;
    let aj = space.lowering(j)?;
    let hop = ai.adjoint() * &aj;
    let generator = (&hop - hop.adjoint()).scale(theta);
    LinearOperator::unitary(*space, linalg::matrix_exponential(&generator)?)
}

/// Cross-phase modulation `exp[i χ n_i n_j]`.
pub fn kerr_unitary(space: &FockSpace, i: usize, j: usize, chi: f64) -> Result<LinearOperator> {
    space.check_distinct_modes(&[i, j])?;
    let m = space.diagonal_operator(|k| {
        let phase = chi * (space.count(k, i) * space.count(k, j)) as f64;
        Complex64::from_polar(1.0, phase)
    });
    LinearOperator::unitary(*space, m)
}

/// Phase shifter `exp[i φ n_mode]`.
pub fn phase_shift_unitary(space: &FockSpace, mode: usize, phi: f64) -> Result<LinearOperator> {
    space.check_mode(mode)?;
    let m = space.diagonal_operator(|k| Complex64::from_polar(1.0, phi * space.count(k, mode) as f64));
    LinearOperator::unitary(*space, m)
}

/// `F = B† K(π) B`.
pub fn fredkin_unitary(space: &FockSpace, modes: FredkinModes) -> Result<LinearOperator> {
    modes.check(space)?;
    let b = beamsplitter_unitary(space, modes.a, modes.b)?;
    let k = kerr_unitary(space, modes.b, modes.c, PI)?;
    b.then(&k)?.then(&b.adjoint())
}

/// Diagonal phase `exp[i ε (n_b + n_c)]` imprinted by a noisy Kerr cell.
pub(crate) fn kerr_noise_phase(space: &FockSpace, modes: FredkinModes, epsilon: f64) -> CMatrix {
    space.diagonal_operator(|k| {
        let n = space.count(k, modes.b) + space.count(k, modes.c);
        Complex64::from_polar(1.0, epsilon * n as f64)
    })
}

/// One realization of the dephased Fredkin gate,
/// `V(ε) = B† exp[i ε (n_b + n_c)] K(π) B`.
pub fn noisy_fredkin_sample(space: &FockSpace, modes: FredkinModes, epsilon: f64) -> Result<LinearOperator> {
    modes.check(space)?;
    finite(epsilon)?;
    let b = beamsplitter_unitary(space, modes.a, modes.b)?;
    let k = kerr_unitary(space, modes.b, modes.c, PI)?;
    let noise = LinearOperator::unitary(*space, kerr_noise_phase(space, modes, epsilon))?;
    b.then(&k)?.then(&noise)?.then(&b.adjoint())
}
