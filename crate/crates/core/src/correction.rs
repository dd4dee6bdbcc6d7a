//! Error correction for the Deutsch machine: dual-rail post-selection and
//! projection onto the a-priori legal two-dimensional subspace.

use nalgebra::{DVector, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{tol, DensityOperator, FockSpace, LinearOperator, PureState};
#[cfg(test)]
use crate::fock::OccupationVector;
use crate::linalg::CMatrix;

/// Largest `λ` (or `γ`) admitted by [`fit_series`].
pub const SERIES_MAX_PARAMETER: f64 = 0.05;
/// Relative residual below which a quadratic fit is trusted.
pub const SERIES_TRUST_RESIDUAL: f64 = 1e-3;

/// Orthonormal basis of a subspace together with its projector.
#[derive(Debug, Clone, PartialEq)]
pub struct LegalSubspace {
    space: FockSpace,
    basis: Vec<PureState>,
    projector: CMatrix,
}

impl LegalSubspace {
    /// Gram–Schmidt on `candidates`, in order. Dependent candidates are
    /// dropped.
    pub fn from_candidates(space: FockSpace, candidates: &[PureState]) -> Result<Self> {
        let mut basis: Vec<DVector<Complex64>> = Vec::new();
        for c in candidates {
            if c.space() != space {
                return Err(Error::DimensionMismatch { expected: space.dim(), found: c.space().dim() });
            }
            let mut v = c.amplitudes().clone();
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
            let norm = v.norm();
            if norm > 1e-10 {
                basis.push(v.unscale(norm));
            }
        }
        if basis.is_empty() {
            return Err(Error::InvalidState("legal subspace needs a nonzero candidate".into()));
        }
        let projector = basis
            .iter()
            .fold(CMatrix::zeros(space.dim(), space.dim()), |acc, b| acc + b * b.adjoint());
        let basis = basis
            .into_iter()
            .map(|v| PureState::new(space, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, basis, projector })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    /// Whether `psi` lies in the subspace to within `1e-12` in norm.
    pub fn contains(&self, psi: &PureState) -> bool {
        let v = psi.amplitudes();
        (&self.projector * v - v).norm() < 1e-12
    }
}

/// Pads a four-mode label with vacuum on the remaining modes.
fn machine_label(space: FockSpace, abcd: &str) -> Result<String> {
    if space.n_modes() < 4 {
        return Err(Error::ModeOutOfRange { mode: 3, n_modes: space.n_modes() });
    }
    Ok(format!("{abcd}{}", "0".repeat(space.n_modes() - 4)))
}

fn machine_state(space: FockSpace, terms: &[(&str, f64)]) -> Result<PureState> {
    let labels = terms
        .iter()
        .map(|(l, _)| machine_label(space, l))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(&str, Complex64)> = labels
        .iter()
        .zip(terms)
        .map(|(l, (_, x))| (l.as_str(), Complex64::new(*x, 0.0)))
        .collect();
    PureState::superposition(space, &terms)
}

/// The two states the first gate can produce in a lossless run.
pub fn legal_candidates(space: FockSpace) -> Result<[PureState; 2]> {
    Ok([
        machine_state(space, &[("0101", 1.0), ("1010", 1.0)])?,
        machine_state(space, &[("0101", 1.0), ("0110", 1.0)])?,
    ])
}

/// `span{ψ0, ψ1}` with `ψ0 = (|0101⟩+|1010⟩)/√2` and
/// `ψ1 = (|0101⟩+2|0110⟩−|1010⟩)/√6`, extra modes in vacuum.
pub fn legal_subspace(space: FockSpace) -> Result<LegalSubspace> {
    let candidates = legal_candidates(space)?;
    let legal = LegalSubspace::from_candidates(space, &candidates)?;
    debug_assert!(candidates.iter().all(|c| legal.contains(c)));
    Ok(legal)
}

/// Diagonal projector onto occupation patterns with exactly one photon in
/// each of the given mode pairs.
pub fn dualrail_projector(space: &FockSpace, pairs: &[(usize, usize)]) -> Result<CMatrix> {
    for &(i, j) in pairs {
        space.check_distinct_modes(&[i, j])?;
    }
    Ok(space.diagonal_operator(|k| {
        let legal = pairs
            .iter()
            .all(|&(i, j)| space.count(k, i) + space.count(k, j) == 1);
        Complex64::new(if legal { 1.0 } else { 0.0 }, 0.0)
    }))
}

/// Keeps only outcomes with one photon in `(a, b)` and one in `(c, d)`
/// (modes 0..4). Returns the renormalised state and the accepted mass.
pub fn dualrail_postselect(rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
    let p = dualrail_projector(&rho.space(), &[(0, 1), (2, 3)])?;
    rho.project(&p)
}

/// Projects onto the legal subspace and renormalises.
pub fn projective_ec_step(rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
    let legal = legal_subspace(rho.space())?;
    rho.project(legal.projector())
}

/// Unitary that sends `ψ0 → |0101⟩`, `ψ1 → |1001⟩` and the rest of
/// `span{|0101⟩, |0110⟩, |1010⟩, |1001⟩}` to states with `cd = 10`:
/// `|1001⟩ → |0110⟩`, `(|0101⟩−|0110⟩−|1010⟩)/√3 → |1010⟩`.
/// Identity outside that four-dimensional span.
pub fn projective_ec_unitary(space: FockSpace) -> Result<LinearOperator> {
    let legal = legal_subspace(space)?;
    let ket = |l: &str| -> Result<PureState> { machine_state(space, &[(l, 1.0)]) };
    let s3 = 3f64.sqrt().recip();
    let pairs = [
        (legal.basis()[0].clone(), ket("0101")?),
        (legal.basis()[1].clone(), ket("1001")?),
        (ket("1001")?, ket("0110")?),
        (machine_state(space, &[("0101", s3), ("0110", -s3), ("1010", -s3)])?, ket("1010")?),
    ];
    let mut u = CMatrix::identity(space.dim(), space.dim());
    for l in ["0101", "0110", "1010", "1001"] {
        let v = ket(l)?;
        u -= v.amplitudes() * v.amplitudes().adjoint();
    }
    for (from, to) in &pairs {
        u += to.amplitudes() * from.amplitudes().adjoint();
    }
    LinearOperator::unitary(space, u)
}

/// The same correction as [`projective_ec_step`], realised as
/// `U`, a measurement of modes `c, d` keeping `cd = 01`, then `U†`.
///
/// Agrees with the projector on states supported in
/// `span{|0101⟩, |0110⟩, |1010⟩, |1001⟩}`.
pub fn projective_ec_explicit(rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
    let space = rho.space();
    let u = projective_ec_unitary(space)?;
    let keep = space.diagonal_operator(|k| {
        let ok = space.count(k, 2) == 0 && space.count(k, 3) == 1;
        Complex64::new(if ok { 1.0 } else { 0.0 }, 0.0)
    });
    let (measured, p) = rho.apply_unitary(&u)?.project(&keep)?;
    Ok((measured.apply_unitary(&u.adjoint())?, p))
}

/// `(1 + e^{-γ} - 2e^{-3γ/2}) / 4`
pub fn p_noec_closed(gamma: f64) -> f64 {
    ((-gamma).exp_m1() - 2.0 * (-1.5 * gamma).exp_m1()) / 4.0
}

/// `(1 - sech(γ/2)) / 2`, written as `sinh²(γ/4) / cosh(γ/2)`.
pub fn p_ec_closed(gamma: f64) -> f64 {
    (gamma / 4.0).sinh().powi(2) / (gamma / 2.0).cosh()
}

/// Least-squares fit `p ≈ c1 x + c2 x²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub c1: f64,
    pub c2: f64,
    /// `‖p - fit‖ / ‖p‖`
    pub relative_residual: f64,
    pub trusted: bool,
}

/// Fits `p = c1 x + c2 x²` through the origin.
///
/// Needs at least four points with `0 < x ≤ 0.05`; points outside that
/// range are rejected rather than ignored.
pub fn fit_series(points: &[(f64, f64)]) -> Result<SeriesFit> {
    if let Some(&(x, _)) = points.iter().find(|(x, _)| !(*x > 0.0 && *x <= SERIES_MAX_PARAMETER)) {
        return Err(Error::DegenerateGrid(format!("series point {x} outside (0, {SERIES_MAX_PARAMETER}]")));
    }
    if points.iter().any(|(_, p)| !p.is_finite()) {
        return Err(Error::NonFinite("series value"));
    }
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::DegenerateGrid(format!("need 4 distinct points, have {}", distinct.len())));
    }
    let mut normal = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for &(x, p) in points {
        let row = Vector2::new(x, x * x);
        normal += row * row.transpose();
        rhs += row * p;
    }
    let sol = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateGrid("singular normal equations".into()))?;
    let (c1, c2) = (sol[0], sol[1]);
    let resid: f64 = points.iter().map(|&(x, p)| (p - c1 * x - c2 * x * x).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = points.iter().map(|&(_, p)| p * p).sum::<f64>().sqrt();
    let relative_residual = if scale > 0.0 { resid / scale } else { resid };
    Ok(SeriesFit { c1, c2, relative_residual, trusted: relative_residual < SERIES_TRUST_RESIDUAL })
}

/// The standard grid `{0.005, 0.01, 0.02, 0.03, 0.05}`.
pub const SERIES_GRID: [f64; 5] = [0.005, 0.01, 0.02, 0.03, 0.05];

/// Probability that the mode-`mode` count differs from `expected`.
pub fn mode_mismatch(rho: &DensityOperator, mode: usize, expected: usize) -> Result<f64> {
    let marginal = rho.marginal_mode_distribution(mode)?;
    let total: f64 = marginal.iter().sum();
    let wrong: f64 = marginal
        .iter()
        .enumerate()
        .filter(|(n, _)| *n != expected)
        .map(|(_, p)| p)
        .sum();
    if total <= tol::NEGLIGIBLE {
        return Err(Error::ZeroAcceptance);
    }
    Ok((wrong / total).clamp(0.0, 1.0))
}

#[cfg(test)]
fn occupation(label: &str) -> OccupationVector {
    OccupationVector::from_digits(label).expect("static label")
}
