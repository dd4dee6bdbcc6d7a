//! Completely positive trace-preserving maps: Kraus channels, photon loss,
//! Kerr-cell dephasing and the noisy Fredkin gates built from them.

mod dephasing;
mod fredkin;
pub mod quadrature;

use std::f64::consts::LOG10_E;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{tol, DensityOperator, FockSpace, LinearOperator};
use crate::linalg::{self, CMatrix};

pub use dephasing::{
    dephased_fredkin_channel, dephased_fredkin_mc, dephased_fredkin_mc_direct, lambda_from_physical,
    sample_phases, stream_seed, DephasedFredkin, MC_BLOCK_SIZE,
};
pub use fredkin::{
    balanced_lossy_fredkin_channel, damped_fredkin_channel, lossy_fredkin_channel, LossPlacement,
};

/// Anything that maps density operators to density operators on one space.
pub trait Channel: Send + Sync {
    fn space(&self) -> FockSpace;
    fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator>;
}

/// Channel given by an explicit Kraus list, `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    space: FockSpace,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validated constructor; rejects lists with `‖Σ K†K - I‖_max > 1e-10`.
    pub fn new(space: FockSpace, ops: Vec<CMatrix>) -> Result<Self> {
        for op in &ops {
            if op.nrows() != space.dim() || op.ncols() != space.dim() {
                return Err(Error::DimensionMismatch { expected: space.dim(), found: op.nrows() });
            }
        }
        let ch = Self::from_ops_unchecked(space, ops);
        let defect = ch.trace_preservation_defect();
        if defect > tol::TRACE_PRESERVATION {
            return Err(Error::InvalidOperator(format!("Kraus list not trace preserving ({defect:e})")));
        }
        Ok(ch)
    }

    fn from_ops_unchecked(space: FockSpace, ops: Vec<CMatrix>) -> Self {
        let ops = ops.into_iter().filter(|k| k.iter().any(|z| z.norm_sqr() > 0.0)).collect();
        Self { space, ops }
    }

    pub fn identity(space: FockSpace) -> Self {
        Self { space, ops: vec![CMatrix::identity(space.dim(), space.dim())] }
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `max |Σ K†K - I|`
    pub fn trace_preservation_defect(&self) -> f64 {
        let dim = self.space.dim();
        let sum = self
            .ops
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        linalg::max_abs_diff(&sum, &CMatrix::identity(dim, dim))
    }

    /// Channel applying `self` first and `next` second.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        compose(next, self)
    }

    /// Applies the channel to a raw matrix (not necessarily a state).
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let dim = self.space.dim();
        self.ops
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, k| acc + k * m * k.adjoint())
    }
}

impl Channel for KrausChannel {
    fn space(&self) -> FockSpace {
        self.space
    }

    fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.space() != self.space {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), found: rho.space().dim() });
        }
        Ok(DensityOperator::from_matrix_unchecked(self.space, self.apply_matrix(rho.matrix())))
    }
}

impl Channel for LinearOperator {
    fn space(&self) -> FockSpace {
        LinearOperator::space(self)
    }

    fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        rho.apply_unitary(self)
    }
}

/// Single-Kraus channel `ρ ↦ UρU†`.
pub fn unitary_channel(u: &LinearOperator) -> Result<KrausChannel> {
    if !u.is_unitary() {
        return Err(Error::InvalidOperator("unitary_channel needs a unitary operator".into()));
    }
    Ok(KrausChannel { space: u.space(), ops: vec![u.matrix().clone()] })
}

/// `second ∘ first`: Kraus operators are all products `S_j F_i`.
pub fn compose(second: &KrausChannel, first: &KrausChannel) -> Result<KrausChannel> {
    if second.space != first.space {
        return Err(Error::DimensionMismatch { expected: first.space.dim(), found: second.space.dim() });
    }
    let ops = first
        .ops
        .iter()
        .flat_map(|f| second.ops.iter().map(move |s| s * f))
        .collect();
    Ok(KrausChannel::from_ops_unchecked(first.space, ops))
}

/// Composes a sequence of channels applied left to right.
pub fn sequence(space: FockSpace, stages: &[KrausChannel]) -> Result<KrausChannel> {
    stages
        .iter()
        .try_fold(KrausChannel::identity(space), |acc, st| acc.then(st))
}

fn check_rate(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite(name));
    }
    if value < 0.0 {
        return Err(Error::NegativeParameter { name, value });
    }
    Ok(())
}

/// Photon loss on one mode with survival probability `e^{-γ}` per photon.
///
/// Kraus operators `E_k = Σ_n √C(n,k) e^{-γ(n-k)/2} (1-e^{-γ})^{k/2} |n-k><n|`
/// for `k = 0..=cutoff`; at cutoff 1 these are `diag(1, e^{-γ/2})` and
/// `√(1-e^{-γ}) a`.
pub fn amplitude_damping_channel(space: &FockSpace, mode: usize, gamma: f64) -> Result<KrausChannel> {
    check_rate("gamma", gamma)?;
    space.check_mode(mode)?;
    let survive = (-gamma).exp();
    let lose = -(-gamma).exp_m1();
    let ops = (0..=space.cutoff())
        .map(|k| {
            let mut e = CMatrix::zeros(space.dim(), space.dim());
            for i in 0..space.dim() {
                let n = space.count(i, mode);
                if n < k {
                    continue;
                }
                let j = space.shifted(i, mode, -(k as isize)).expect("lowering stays in range");
                let amp = binomial(n, k).sqrt()
                    * survive.powf((n - k) as f64 / 2.0)
                    * lose.powf(k as f64 / 2.0);
                e[(j, i)] = Complex64::new(amp, 0.0);
            }
            e
        })
        .collect();
    Ok(KrausChannel::from_ops_unchecked(*space, ops))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Loss and dephasing strengths. `gamma` is the amplitude-damping exponent,
/// `lambda` is defined by `<e^{iε}> = e^{-λ}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseParams {
    pub gamma: f64,
    pub lambda: f64,
}

impl NoiseParams {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        check_rate("gamma", gamma)?;
        check_rate("lambda", lambda)?;
        Ok(Self { gamma, lambda })
    }

    pub fn validate(&self) -> Result<()> {
        check_rate("gamma", self.gamma)?;
        check_rate("lambda", self.lambda)
    }

    /// Loss in decibels, `10 γ log10 e`.
    pub fn loss_db(&self) -> f64 {
        to_db(self.gamma)
    }

    pub fn dephasing_db(&self) -> f64 {
        to_db(self.lambda)
    }
}

/// `10 x log10 e`
pub fn to_db(x: f64) -> f64 {
    10.0 * x * LOG10_E
}
