//! Truncated multimode Fock space, pure and mixed states, and linear operators.
//!
//! Basis states are indexed positionally with mode 0 as the most significant
//! digit in base `cutoff + 1`, so `|01010>` on five cutoff-1 modes is index 10.
//! That ordering is used for every matrix and every file the crate writes.

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Numerical tolerances shared by the whole crate.
pub mod tol {
    /// Max entry-wise deviation from Hermiticity.
    pub const HERMITICITY: f64 = 1e-12;
    /// `|tr ρ - 1|` accepted when a density operator is constructed.
    pub const STATE_TRACE: f64 = 1e-12;
    /// `|tr ρ - 1|` accepted for the output of any operation.
    pub const TRACE: f64 = 1e-10;
    /// Smallest eigenvalue accepted for a density operator.
    pub const POSITIVITY: f64 = -1e-10;
    /// `| ||ψ||² - 1 |` accepted for a pure state.
    pub const NORM: f64 = 1e-12;
    /// Entry-wise `U†U = I` tolerance.
    pub const UNITARITY: f64 = 1e-12;
    /// Entry-wise `Σ K†K = I` tolerance.
    pub const TRACE_PRESERVATION: f64 = 1e-10;
    /// Diagonal entries below this are dropped from reported distributions.
    pub const NEGLIGIBLE: f64 = 1e-14;
}

/// `n_modes` bosonic modes, each truncated at `cutoff` photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    n_modes: usize,
    cutoff: usize,
    dim: usize,
}

impl FockSpace {
    pub fn new(n_modes: usize, cutoff: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidConfig("a Fock space needs at least one mode".into()));
        }
        if cutoff == 0 {
            return Err(Error::InvalidConfig("photon-number cutoff must be at least 1".into()));
        }
        let dim = (cutoff + 1)
            .checked_pow(n_modes as u32)
            .filter(|&d| d <= 1 << 16)
            .ok_or_else(|| Error::InvalidConfig("Fock space dimension too large for dense storage".into()))?;
        Ok(Self { n_modes, cutoff, dim })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn base(&self) -> usize {
        self.cutoff + 1
    }

    pub fn index_of(&self, occ: &OccupationVector) -> Result<usize> {
        self.check_occupation(occ)?;
        Ok(occ.0.iter().fold(0, |acc, &n| acc * self.base() + n))
    }

    pub fn occupation_of(&self, index: usize) -> Result<OccupationVector> {
        if index >= self.dim {
            return Err(Error::IndexOutOfRange { index, dim: self.dim });
        }
        Ok(OccupationVector(
            (0..self.n_modes).map(|m| self.count(index, m)).collect(),
        ))
    }

    /// Photon number of `mode` in basis state `index`. No range checks.
    pub(crate) fn count(&self, index: usize, mode: usize) -> usize {
        let shift = self.base().pow((self.n_modes - 1 - mode) as u32);
        (index / shift) % self.base()
    }

    /// Index obtained by adding `delta` photons to `mode`, if representable.
    pub(crate) fn shifted(&self, index: usize, mode: usize, delta: isize) -> Option<usize> {
        let n = self.count(index, mode) as isize + delta;
        if n < 0 || n > self.cutoff as isize {
            return None;
        }
        let shift = self.base().pow((self.n_modes - 1 - mode) as u32) as isize;
        Some((index as isize + delta * shift) as usize)
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            Err(Error::ModeOutOfRange { mode, n_modes: self.n_modes })
        } else {
            Ok(())
        }
    }

    /// Checks that every mode is in range and no mode appears twice.
    pub fn check_distinct_modes(&self, modes: &[usize]) -> Result<()> {
        for &m in modes {
            self.check_mode(m)?;
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::ModeCollision(modes.to_vec()));
            }
        }
        Ok(())
    }

    fn check_occupation(&self, occ: &OccupationVector) -> Result<()> {
        if occ.0.len() != self.n_modes || occ.0.iter().any(|&n| n > self.cutoff) {
            return Err(Error::InvalidOccupation {
                counts: occ.0.clone(),
                n_modes: self.n_modes,
                cutoff: self.cutoff,
            });
        }
        Ok(())
    }

    pub fn basis(&self) -> impl Iterator<Item = OccupationVector> + '_ {
        (0..self.dim).map(|i| OccupationVector((0..self.n_modes).map(|m| self.count(i, m)).collect()))
    }

    /// Diagonal operator `Σ_i f(occupation_i) |i><i|`.
    pub(crate) fn diagonal_operator(&self, f: impl Fn(usize) -> Complex64) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(self.dim, (0..self.dim).map(f)))
    }

    /// Annihilation operator for `mode` on the truncated space.
    pub fn lowering(&self, mode: usize) -> Result<CMatrix> {
        self.check_mode(mode)?;
        let mut a = CMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if let Some(j) = self.shifted(i, mode, -1) {
                a[(j, i)] = Complex64::new((self.count(i, mode) as f64).sqrt(), 0.0);
            }
        }
        Ok(a)
    }
}

/// Photon count per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    /// Parses a ket label such as `"01010"`, one decimal digit per mode.
    pub fn from_digits(label: &str) -> Result<Self> {
        label
            .chars()
            .map(|ch| ch.to_digit(10).map(|d| d as usize))
            .collect::<Option<Vec<_>>>()
            .map(Self)
            .ok_or_else(|| Error::InvalidState(format!("bad ket label `{label}`")))
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&n| n < 10) {
            for n in &self.0 {
                write!(f, "{n}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: FockSpace,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(space: FockSpace, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: amplitudes.len() });
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > tol::NORM {
            return Err(Error::InvalidState(format!("squared norm {norm_sq} is not 1")));
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalized superposition `Σ c_k |occ_k>`.
    pub fn superposition(space: FockSpace, terms: &[(&str, Complex64)]) -> Result<Self> {
        let mut amplitudes = DVector::zeros(space.dim());
        for (label, amp) in terms {
            let idx = space.index_of(&OccupationVector::from_digits(label)?)?;
            amplitudes[idx] += amp;
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("superposition has zero norm".into()));
        }
        Self::new(space, amplitudes.unscale(norm))
    }

    /// Basis state with unit amplitude at `index_of(occ)`.
    pub fn basis(space: FockSpace, occ: &OccupationVector) -> Result<Self> {
        let mut amplitudes = DVector::zeros(space.dim());
        amplitudes[space.index_of(occ)?] = Complex64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    pub fn from_label(space: FockSpace, label: &str) -> Result<Self> {
        Self::basis(space, &OccupationVector::from_digits(label)?)
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, occ: &OccupationVector) -> Result<Complex64> {
        Ok(self.amplitudes[self.space.index_of(occ)?])
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::from_matrix_unchecked(self.space, m)
    }

    pub fn apply(&self, op: &LinearOperator) -> Result<PureState> {
        op.check_space(self.space)?;
        let v = op.matrix() * &self.amplitudes;
        if op.is_unitary() {
            Ok(Self { space: self.space, amplitudes: v })
        } else {
            Self::new(self.space, v)
        }
    }
}

/// Summary of how far a matrix is from being a valid density operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub hermiticity: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn of(m: &CMatrix) -> Self {
        let eig = linalg::hermitian_eigenvalues(m);
        Self {
            hermiticity: linalg::hermiticity_defect(m),
            trace_deviation: (linalg::trace(m) - Complex64::new(1.0, 0.0)).norm(),
            min_eigenvalue: eig.first().copied().unwrap_or(0.0),
        }
    }

    /// True when all three quantities are within the operation tolerances.
    pub fn is_valid(&self) -> bool {
        self.hermiticity <= tol::HERMITICITY
            && self.trace_deviation <= tol::TRACE
            && self.min_eigenvalue >= tol::POSITIVITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    space: FockSpace,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validated constructor.
    pub fn new(space: FockSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: matrix.nrows() });
        }
        let d = StateDiagnostics::of(&matrix);
        if d.hermiticity > tol::HERMITICITY {
            return Err(Error::InvalidState(format!("Hermiticity defect {:e}", d.hermiticity)));
        }
        if d.trace_deviation > tol::STATE_TRACE {
            return Err(Error::InvalidState(format!("trace deviation {:e}", d.trace_deviation)));
        }
        if d.min_eigenvalue < tol::POSITIVITY {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", d.min_eigenvalue)));
        }
        Ok(Self { space, matrix })
    }

    pub(crate) fn from_matrix_unchecked(space: FockSpace, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        Self { space, matrix }
    }

    pub fn from_label(space: FockSpace, label: &str) -> Result<Self> {
        Ok(PureState::from_label(space, label)?.projector())
    }

    /// Equal-weight mixture of the given basis states.
    pub fn uniform_mixture(space: FockSpace, labels: &[&str]) -> Result<Self> {
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        for label in labels {
            let i = space.index_of(&OccupationVector::from_digits(label)?)?;
            m[(i, i)] += Complex64::new(1.0 / labels.len() as f64, 0.0);
        }
        Self::new(space, m)
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        StateDiagnostics::of(&self.matrix)
    }

    /// `<occ|ρ|occ>`
    pub fn probability(&self, occ: &OccupationVector) -> Result<f64> {
        let i = self.space.index_of(occ)?;
        Ok(self.matrix[(i, i)].re)
    }

    pub fn probability_of(&self, label: &str) -> Result<f64> {
        self.probability(&OccupationVector::from_digits(label)?)
    }

    pub fn apply_unitary(&self, u: &LinearOperator) -> Result<DensityOperator> {
        u.check_space(self.space)?;
        if !u.is_unitary() {
            return Err(Error::InvalidOperator("apply_unitary needs a unitary operator".into()));
        }
        let m = u.matrix() * &self.matrix * u.matrix().adjoint();
        Ok(Self::from_matrix_unchecked(self.space, m))
    }

    /// Diagonal in the Fock basis, dropping entries below [`tol::NEGLIGIBLE`].
    pub fn diagonal_distribution(&self) -> Vec<(OccupationVector, f64)> {
        (0..self.space.dim())
            .filter_map(|i| {
                let p = self.matrix[(i, i)].re;
                (p.abs() >= tol::NEGLIGIBLE)
                    .then(|| (self.space.occupation_of(i).expect("index in range"), p))
            })
            .collect()
    }

    /// Photon-number distribution of one mode, indexed by photon count.
    pub fn marginal_mode_distribution(&self, mode: usize) -> Result<Vec<f64>> {
        self.space.check_mode(mode)?;
        let mut probs = vec![0.0; self.space.cutoff() + 1];
        for i in 0..self.space.dim() {
            probs[self.space.count(i, mode)] += self.matrix[(i, i)].re;
        }
        Ok(probs)
    }

    /// Reduced state on `keep`, with modes ordered as listed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        self.space.check_distinct_modes(keep)?;
        let traced: Vec<usize> = (0..self.space.n_modes()).filter(|m| !keep.contains(m)).collect();
        let reduced = FockSpace::new(keep.len(), self.space.cutoff())?;
        let sp = self.space;
        let reduced_index = |i: usize| keep.iter().fold(0, |acc, &m| acc * (sp.cutoff() + 1) + sp.count(i, m));
        let env_index = |i: usize| traced.iter().fold(0, |acc, &m| acc * (sp.cutoff() + 1) + sp.count(i, m));

        let mut m = CMatrix::zeros(reduced.dim(), reduced.dim());
        for i in 0..sp.dim() {
            let (ri, ei) = (reduced_index(i), env_index(i));
            for j in 0..sp.dim() {
                if env_index(j) == ei {
                    m[(ri, reduced_index(j))] += self.matrix[(i, j)];
                }
            }
        }
        Ok(Self::from_matrix_unchecked(reduced, m))
    }

    /// `PρP / tr(PρP)` together with the accepted mass `tr(PρP)`.
    pub fn project(&self, projector: &CMatrix) -> Result<(DensityOperator, f64)> {
        if projector.nrows() != self.space.dim() {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), found: projector.nrows() });
        }
        let m = projector * &self.matrix * projector;
        let p = linalg::trace(&m).re;
        if p <= tol::NEGLIGIBLE {
            return Err(Error::ZeroAcceptance);
        }
        Ok((Self::from_matrix_unchecked(self.space, m.unscale(p)), p))
    }
}

/// Square operator on a Fock space, optionally certified unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    space: FockSpace,
    matrix: CMatrix,
    unitary: bool,
}

impl LinearOperator {
    pub fn new(space: FockSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: matrix.nrows() });
        }
        Ok(Self { space, matrix, unitary: false })
    }

    /// Constructor that verifies `U†U = I` and sets the unitary flag.
    pub fn unitary(space: FockSpace, matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(space, matrix)?;
        let defect = linalg::unitarity_defect(&op.matrix);
        if defect > tol::UNITARITY {
            return Err(Error::InvalidOperator(format!("unitarity defect {defect:e}")));
        }
        op.unitary = true;
        Ok(op)
    }

    pub fn identity(space: FockSpace) -> Self {
        Self { space, matrix: CMatrix::identity(space.dim(), space.dim()), unitary: true }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.adjoint(), unitary: self.unitary }
    }

    /// Operator product `self · rhs` (rhs acts first).
    pub fn mul(&self, rhs: &LinearOperator) -> Result<LinearOperator> {
        rhs.check_space(self.space)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * &rhs.matrix,
            unitary: self.unitary && rhs.unitary,
        })
    }

    /// Operator that applies `self` and then `next`.
    pub fn then(&self, next: &LinearOperator) -> Result<LinearOperator> {
        next.mul(self)
    }

    pub(crate) fn check_space(&self, space: FockSpace) -> Result<()> {
        if self.space != space {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: self.space.dim() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn occ(label: &str) -> OccupationVector {
        OccupationVector::from_digits(label).unwrap()
    }

    #[test]
    fn index_examples() {
        let s5 = FockSpace::new(5, 1).unwrap();
        assert_eq!(s5.index_of(&occ("00000")).unwrap(), 0);
        assert_eq!(s5.index_of(&occ("01010")).unwrap(), 10);
        let s3 = FockSpace::new(3, 2).unwrap();
        assert_eq!(s3.index_of(&occ("120")).unwrap(), 15);
        assert_eq!(s5.occupation_of(0).unwrap(), occ("00000"));
        assert_eq!(s5.occupation_of(10).unwrap(), occ("01010"));
    }

    #[test]
    fn index_rejects_bad_input() {
        let s = FockSpace::new(3, 1).unwrap();
        assert!(matches!(s.index_of(&occ("120")), Err(Error::InvalidOccupation { .. })));
        assert!(matches!(s.index_of(&occ("10")), Err(Error::InvalidOccupation { .. })));
        assert_eq!(s.occupation_of(8), Err(Error::IndexOutOfRange { index: 8, dim: 8 }));
    }

    #[test]
    fn round_trip_full_basis() {
        for (n, c) in [(3, 1), (4, 1), (5, 1), (3, 2)] {
            let s = FockSpace::new(n, c).unwrap();
            assert_eq!(s.dim(), (c + 1usize).pow(n as u32));
            for i in 0..s.dim() {
                let o = s.occupation_of(i).unwrap();
                assert_eq!(s.index_of(&o).unwrap(), i);
            }
        }
    }

    #[test]
    fn basis_pure_state() {
        let s = FockSpace::new(4, 1).unwrap();
        let psi = PureState::from_label(s, "0101").unwrap();
        assert_eq!(psi.amplitudes()[5], Complex64::new(1.0, 0.0));
        assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-15);
        let dist = psi.projector().diagonal_distribution();
        assert_eq!(dist, vec![(occ("0101"), 1.0)]);
    }

    #[test]
    fn diagonal_distribution_of_mixture() {
        let s = FockSpace::new(2, 1).unwrap();
        let rho = DensityOperator::uniform_mixture(s, &["00", "11"]).unwrap();
        let dist = rho.diagonal_distribution();
        assert_eq!(dist, vec![(occ("00"), 0.5), (occ("11"), 0.5)]);
    }

    #[test]
    fn marginal_examples() {
        let s = FockSpace::new(4, 1).unwrap();
        let rho = DensityOperator::from_label(s, "0101").unwrap();
        assert_eq!(rho.marginal_mode_distribution(3).unwrap(), vec![0.0, 1.0]);
        let mix = DensityOperator::uniform_mixture(s, &["0101", "0110"]).unwrap();
        assert_eq!(mix.marginal_mode_distribution(3).unwrap(), vec![0.5, 0.5]);
        assert!(matches!(mix.marginal_mode_distribution(4), Err(Error::ModeOutOfRange { .. })));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let s = FockSpace::new(3, 1).unwrap();
        let psi = PureState::superposition(
            s,
            &[("100", Complex64::new(1.0, 0.0)), ("110", Complex64::new(0.0, 1.0))],
        )
        .unwrap();
        // (|0> + i|1>)_b ⊗ |1>_a ⊗ |0>_c
        let reduced = psi.projector().partial_trace(&[1]).unwrap();
        let expected = PureState::superposition(
            FockSpace::new(1, 1).unwrap(),
            &[("0", Complex64::new(1.0, 0.0)), ("1", Complex64::new(0.0, 1.0))],
        )
        .unwrap()
        .projector();
        assert!(linalg::max_abs_diff(reduced.matrix(), expected.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_entangled_pair_is_maximally_mixed() {
        let s = FockSpace::new(2, 1).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let psi = PureState::superposition(s, &[("01", one), ("10", one)]).unwrap();
        let reduced = psi.projector().partial_trace(&[0]).unwrap();
        let half = CMatrix::identity(2, 2).scale(0.5);
        assert!(linalg::max_abs_diff(reduced.matrix(), &half) < 1e-15);
        assert_eq!(psi.projector().partial_trace(&[]), Err(Error::EmptyKeepSet));
    }

    #[test]
    fn density_operator_validation() {
        let s = FockSpace::new(1, 1).unwrap();
        let bad_trace = CMatrix::identity(2, 2);
        assert!(matches!(DensityOperator::new(s, bad_trace), Err(Error::InvalidState(_))));
        let mut non_positive = CMatrix::zeros(2, 2);
        non_positive[(0, 0)] = Complex64::new(1.5, 0.0);
        non_positive[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(matches!(DensityOperator::new(s, non_positive), Err(Error::InvalidState(_))));
    }

    proptest! {
        #[test]
        fn index_round_trip(n in 1usize..6, c in 1usize..4, seed in any::<u64>()) {
            let s = FockSpace::new(n, c).unwrap();
            let i = (seed % s.dim() as u64) as usize;
            let o = s.occupation_of(i).unwrap();
            prop_assert_eq!(s.index_of(&o).unwrap(), i);
            prop_assert!(o.counts().iter().all(|&k| k <= c));
        }
    }
}
