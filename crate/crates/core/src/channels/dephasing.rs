use std::f64::consts::PI;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::{check_rate, Channel, KrausChannel};
use crate::error::{Error, Result};
use crate::fock::{tol, DensityOperator, FockSpace};
use crate::gates::{beamsplitter_unitary, kerr_unitary, noisy_fredkin_sample, FredkinModes};
use crate::linalg::CMatrix;

/// Samples drawn from one ChaCha stream before moving to the next.
pub const MC_BLOCK_SIZE: usize = 4096;

/// Fredkin gate whose Kerr cell imprints a random phase `ε (n_b + n_c)`,
/// averaged over `ε`.
///
/// Stored as the characteristic function `φ(k) = <e^{ikε}>` for
/// `k = 0..=2·cutoff`. The channel is
/// `ρ ↦ B† [φ(N_m - N_n) (K B ρ B† K†)_mn] B` with `N = n_b + n_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasedFredkin {
    space: FockSpace,
    modes: FredkinModes,
    moments: Vec<Complex64>,
    pre: CMatrix,
    post: CMatrix,
    sector: Vec<usize>,
}

impl DephasedFredkin {
    fn with_moments(space: &FockSpace, modes: FredkinModes, moments: Vec<Complex64>) -> Result<Self> {
        modes.check(space)?;
        let b = beamsplitter_unitary(space, modes.a, modes.b)?;
        let k = kerr_unitary(space, modes.b, modes.c, PI)?;
        let pre = k.matrix() * b.matrix();
        let post = b.matrix().adjoint();
        let sector = (0..space.dim())
            .map(|i| space.count(i, modes.b) + space.count(i, modes.c))
            .collect();
        Ok(Self { space: *space, modes, moments, pre, post, sector })
    }

    fn max_sector(space: &FockSpace) -> usize {
        2 * space.cutoff()
    }

    /// Gaussian `ε` with variance `2λ`: `φ(k) = e^{-k²λ}`.
    pub fn analytic(space: &FockSpace, modes: FredkinModes, lambda: f64) -> Result<Self> {
        check_rate("lambda", lambda)?;
        let moments = (0..=Self::max_sector(space))
            .map(|k| Complex64::new((-((k * k) as f64) * lambda).exp(), 0.0))
            .collect();
        Self::with_moments(space, modes, moments)
    }

    /// The `λ → ∞` limit: every coherence between different `N` sectors is removed.
    pub fn fully_dephased(space: &FockSpace, modes: FredkinModes) -> Result<Self> {
        let moments = (0..=Self::max_sector(space))
            .map(|k| Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Self::with_moments(space, modes, moments)
    }

    /// Empirical characteristic function of the given phases.
    pub fn from_samples(space: &FockSpace, modes: FredkinModes, phases: &[f64]) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::ZeroSamples);
        }
        let sums = moment_sums(phases, Self::max_sector(space));
        Self::with_moments(space, modes, normalise(sums, phases.len()))
    }

    pub fn modes(&self) -> FredkinModes {
        self.modes
    }

    /// `φ(k)` for `k = 0..=2·cutoff`.
    pub fn moments(&self) -> &[Complex64] {
        &self.moments
    }

    fn phi(&self, k: isize) -> Complex64 {
        let z = self.moments[k.unsigned_abs()];
        if k < 0 {
            z.conj()
        } else {
            z
        }
    }

    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut mid = &self.pre * m * self.pre.adjoint();
        for j in 0..mid.ncols() {
            for i in 0..mid.nrows() {
                mid[(i, j)] *= self.phi(self.sector[i] as isize - self.sector[j] as isize);
            }
        }
        &self.post * mid * self.post.adjoint()
    }

    /// Equivalent Kraus list `B† D_k K B`.
    ///
    /// The Toeplitz matrix `T_pq = φ(p - q)` is positive semidefinite, so
    /// `T = Σ μ_k u_k u_k†` and `D_k = diag(√μ_k u_k(N))`.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let n = self.moments.len();
        let t = CMatrix::from_fn(n, n, |p, q| self.phi(p as isize - q as isize));
        let eig = SymmetricEigen::new(t);
        let mut ops = Vec::new();
        for (k, &mu) in eig.eigenvalues.iter().enumerate() {
            if mu < tol::POSITIVITY {
                return Err(Error::InvalidOperator(format!("dephasing moments not positive ({mu:e})")));
            }
            if mu <= tol::NEGLIGIBLE {
                continue;
            }
            let u = eig.eigenvectors.column(k);
            let d = DVector::from_iterator(
                self.space.dim(),
                self.sector.iter().map(|&s| u[s] * mu.sqrt()),
            );
            ops.push(&self.post * CMatrix::from_diagonal(&d) * &self.pre);
        }
        KrausChannel::new(self.space, ops)
    }
}

impl Channel for DephasedFredkin {
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

/// Exact Gaussian-averaged dephased Fredkin gate as a Kraus list.
pub fn dephased_fredkin_channel(space: &FockSpace, modes: FredkinModes, lambda: f64) -> Result<KrausChannel> {
    DephasedFredkin::analytic(space, modes, lambda)?.to_kraus()
}

fn moment_sums(phases: &[f64], max: usize) -> Vec<Complex64> {
    let mut sums = vec![Complex64::new(0.0, 0.0); max + 1];
    for &eps in phases {
        for (k, s) in sums.iter_mut().enumerate() {
            *s += Complex64::from_polar(1.0, k as f64 * eps);
        }
    }
    sums
}

fn normalise(sums: Vec<Complex64>, n: usize) -> Vec<Complex64> {
    sums.into_iter().map(|s| s / n as f64).collect()
}

fn gaussian(lambda: f64) -> Result<Normal<f64>> {
    check_rate("lambda", lambda)?;
    Normal::new(0.0, (2.0 * lambda).sqrt()).map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn block_phases(dist: &Normal<f64>, seed: u64, block: usize, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    (0..len).map(|_| dist.sample(&mut rng)).collect()
}

fn block_lengths(n: usize) -> impl ParallelIterator<Item = (usize, usize)> {
    (0..n.div_ceil(MC_BLOCK_SIZE))
        .into_par_iter()
        .map(move |b| (b, MC_BLOCK_SIZE.min(n - b * MC_BLOCK_SIZE)))
}

/// The `n` phases used by the Monte-Carlo estimators for `seed`.
///
/// Sample `i` comes from block `i / 4096`, which is ChaCha8 seeded with
/// `seed` on stream `i / 4096`; the sequence does not depend on the number
/// of worker threads.
pub fn sample_phases(lambda: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let dist = gaussian(lambda)?;
    let blocks: Vec<Vec<f64>> = block_lengths(n)
        .map(|(b, len)| block_phases(&dist, seed, b, len))
        .collect();
    Ok(blocks.concat())
}

/// Monte-Carlo estimate of the dephased gate from `n` Gaussian phases.
///
/// Per-block moment sums are reduced in block order, so the estimate is
/// bit-identical for any thread count.
pub fn dephased_fredkin_mc(
    space: &FockSpace,
    modes: FredkinModes,
    lambda: f64,
    n: usize,
    seed: u64,
) -> Result<DephasedFredkin> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let dist = gaussian(lambda)?;
    let max = DephasedFredkin::max_sector(space);
    let partial: Vec<Vec<Complex64>> = block_lengths(n)
        .map(|(b, len)| moment_sums(&block_phases(&dist, seed, b, len), max))
        .collect();
    let mut sums = vec![Complex64::new(0.0, 0.0); max + 1];
    for p in partial {
        for (s, x) in sums.iter_mut().zip(p) {
            *s += x;
        }
    }
    DephasedFredkin::with_moments(space, modes, normalise(sums, n))
}

/// `(1/n) Σ V(ε_i) ρ V(ε_i)†` evaluated sample by sample.
pub fn dephased_fredkin_mc_direct(
    rho: &DensityOperator,
    modes: FredkinModes,
    lambda: f64,
    n: usize,
    seed: u64,
) -> Result<DensityOperator> {
    let space = rho.space();
    let phases = sample_phases(lambda, n, seed)?;
    let dim = space.dim();
    let mut acc = CMatrix::zeros(dim, dim);
    for eps in phases {
        let v = noisy_fredkin_sample(&space, modes, eps)?;
        acc += v.matrix() * rho.matrix() * v.matrix().adjoint();
    }
    Ok(DensityOperator::from_matrix_unchecked(space, acc.unscale(n as f64)))
}

/// Seed for item `index` of a parallel job keyed by `seed` (splitmix64).
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `λ = πΩ/I` for a Kerr cell with resonance `Ω` (1/s) driven at photon
/// flux `I` (photons/s).
pub fn lambda_from_physical(omega: f64, intensity: f64) -> Result<f64> {
    if !omega.is_finite() {
        return Err(Error::NonFinite("omega"));
    }
    if !intensity.is_finite() {
        return Err(Error::NonFinite("intensity"));
    }
    if intensity <= 0.0 {
        return Err(Error::NonPositiveIntensity(intensity));
    }
    if omega < 0.0 {
        return Err(Error::NegativeParameter { name: "omega", value: omega });
    }
    Ok(PI * omega / intensity)
}
