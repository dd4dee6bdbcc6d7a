use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{amplitude_damping_channel, check_rate, sequence, unitary_channel, KrausChannel};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::gates::{beamsplitter_unitary, kerr_unitary, FredkinModes};

/// Where the photon loss sits relative to the Kerr cross-phase modulation.
///
/// The three placements agree on the no-loss branch but not on the states
/// left behind after a photon is absorbed: a photon removed from mode `c`
/// after the Kerr cell carries an extra `π` phase on mode `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossPlacement {
    /// `B† K $ B`
    BeforeKerr,
    /// `B† $ K B`
    AfterKerr,
    /// `B† $(γ/2) K $(γ/2) B`
    Split,
}

impl LossPlacement {
    pub const ALL: [LossPlacement; 3] = [Self::BeforeKerr, Self::AfterKerr, Self::Split];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::BeforeKerr => "before-kerr",
            Self::AfterKerr => "after-kerr",
            Self::Split => "split",
        }
    }
}

impl fmt::Display for LossPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossPlacement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidPlacement(s.to_string()))
    }
}

/// Fredkin gate with loss `γ` on each mode in `damped`.
pub fn damped_fredkin_channel(
    space: &FockSpace,
    modes: FredkinModes,
    damped: &[usize],
    gamma: f64,
    placement: LossPlacement,
) -> Result<KrausChannel> {
    check_rate("gamma", gamma)?;
    modes.check(space)?;
    space.check_distinct_modes(damped)?;
    let b = beamsplitter_unitary(space, modes.a, modes.b)?;
    let k = unitary_channel(&kerr_unitary(space, modes.b, modes.c, PI)?)?;
    let loss = |g: f64| -> Result<KrausChannel> {
        let stages = damped
            .iter()
            .map(|&m| amplitude_damping_channel(space, m, g))
            .collect::<Result<Vec<_>>>()?;
        sequence(*space, &stages)
    };
    let mut stages = vec![unitary_channel(&b)?];
    match placement {
        LossPlacement::BeforeKerr => stages.extend([loss(gamma)?, k]),
        LossPlacement::AfterKerr => stages.extend([k, loss(gamma)?]),
        LossPlacement::Split => stages.extend([loss(gamma / 2.0)?, k, loss(gamma / 2.0)?]),
    }
    stages.push(unitary_channel(&b.adjoint())?);
    sequence(*space, &stages)
}

/// Fredkin gate with a lossy Kerr cell: modes `b` and `c` are damped.
pub fn lossy_fredkin_channel(
    space: &FockSpace,
    modes: FredkinModes,
    gamma: f64,
    placement: LossPlacement,
) -> Result<KrausChannel> {
    damped_fredkin_channel(space, modes, &[modes.b, modes.c], gamma, placement)
}

/// Fredkin gate on `(a, b, c)` with equal loss on `a`, `b`, `c` and the
/// fourth machine mode `d`.
pub fn balanced_lossy_fredkin_channel(
    space: &FockSpace,
    modes: FredkinModes,
    d: usize,
    gamma: f64,
    placement: LossPlacement,
) -> Result<KrausChannel> {
    space.check_distinct_modes(&[modes.a, modes.b, modes.c, d])?;
    damped_fredkin_channel(space, modes, &[modes.a, modes.b, modes.c, d], gamma, placement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::Channel;
    use crate::fock::{DensityOperator, PureState};
    use crate::gates::fredkin_unitary;
    use crate::linalg::{self, CMatrix};
    use crate::testutil::random_density;
    use num_complex::Complex64;

    fn abc() -> FredkinModes {
        FredkinModes::new(0, 1, 2)
    }

    /// Closed-form output on |101><101| for loss after the Kerr cell.
    fn absorbed_101(space: FockSpace, gamma: f64) -> CMatrix {
        let e = (-gamma).exp();
        let h = (-gamma / 2.0).exp();
        let ket = |l: &str| {
            let mut v = nalgebra::DVector::<Complex64>::zeros(space.dim());
            v[space.index_of(&crate::fock::OccupationVector::from_digits(l).unwrap()).unwrap()] =
                1.0.into();
            v
        };
        let phi01 = ket("010").scale(1.0 + h) + ket("100").scale(1.0 - h);
        let phi10 = ket("011").scale(1.0 + h) + ket("101").scale(1.0 - h);
        let proj = |v: &nalgebra::DVector<Complex64>| v * v.adjoint();
        proj(&ket("000")).scale((1.0 - e).powi(2) / 2.0)
            + proj(&ket("001")).scale(e * (1.0 - e) / 2.0)
            + proj(&phi01).scale((1.0 - e) / 4.0)
            + proj(&phi10).scale(e / 4.0)
    }

    #[test]
    fn loss_after_kerr_on_101_matches_closed_form() {
        let s = FockSpace::new(3, 1).unwrap();
        for gamma in [0.01, 0.1, 0.5, 1.0] {
            let ch = lossy_fredkin_channel(&s, abc(), gamma, LossPlacement::AfterKerr).unwrap();
            let out = ch.apply(&DensityOperator::from_label(s, "101").unwrap()).unwrap();
            let err = linalg::max_abs_diff(out.matrix(), &absorbed_101(s, gamma));
            assert!(err < 1e-12, "gamma {gamma}: {err:e}");
            assert!((out.trace() - 1.0).abs() < 1e-12);
            assert!((linalg::trace(&absorbed_101(s, gamma)).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn output_on_011_is_101_with_first_two_modes_swapped() {
        let s = FockSpace::new(3, 1).unwrap();
        let gamma = 0.3;
        for placement in LossPlacement::ALL {
            let ch = lossy_fredkin_channel(&s, abc(), gamma, placement).unwrap();
            let a = ch.apply(&DensityOperator::from_label(s, "101").unwrap()).unwrap();
            let b = ch.apply(&DensityOperator::from_label(s, "011").unwrap()).unwrap();
            let swap = |i: usize| {
                let o = s.occupation_of(i).unwrap();
                let c = o.counts();
                s.index_of(&crate::fock::OccupationVector::new(vec![c[1], c[0], c[2]])).unwrap()
            };
            for i in 0..8 {
                for j in 0..8 {
                    assert!((a.matrix()[(i, j)] - b.matrix()[(swap(i), swap(j))]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_loss_is_fredkin() {
        let s = FockSpace::new(3, 1).unwrap();
        let f = fredkin_unitary(&s, abc()).unwrap();
        for placement in LossPlacement::ALL {
            let ch = lossy_fredkin_channel(&s, abc(), 0.0, placement).unwrap();
            assert_eq!(ch.ops().len(), 1);
            assert!(linalg::max_abs_diff(&ch.ops()[0], f.matrix()) < 1e-12);
        }
    }

    #[test]
    fn all_placements_trace_preserving_and_valid() {
        let s = FockSpace::new(4, 1).unwrap();
        for placement in LossPlacement::ALL {
            let ch = balanced_lossy_fredkin_channel(&s, abc(), 3, 0.4, placement).unwrap();
            assert!(ch.trace_preservation_defect() < 1e-10);
            for seed in 0..20 {
                assert!(ch.apply(&random_density(s, seed)).unwrap().diagnostics().is_valid());
            }
        }
    }

    #[test]
    fn placements_agree_on_no_loss_branch() {
        // The single no-jump Kraus operator is diagonal and commutes with K.
        let s = FockSpace::new(3, 1).unwrap();
        let gamma = 0.6;
        let one = Complex64::new(1.0, 0.0);
        let inputs = ["000", "100", "010", "101", "011"];
        let mut states: Vec<PureState> = inputs.iter().map(|l| PureState::from_label(s, l).unwrap()).collect();
        for (i, x) in inputs.iter().enumerate() {
            for y in &inputs[i + 1..] {
                states.push(PureState::superposition(s, &[(x, one), (y, one)]).unwrap());
            }
        }
        let no_jump: Vec<CMatrix> = LossPlacement::ALL
            .iter()
            .map(|&p| lossy_fredkin_channel(&s, abc(), gamma, p).unwrap().ops()[0].clone())
            .collect();
        for psi in &states {
            let outs: Vec<_> = no_jump.iter().map(|k| k * psi.amplitudes()).collect();
            for o in &outs[1..] {
                assert!((o - &outs[0]).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn placements_differ_after_absorption() {
        let s = FockSpace::new(3, 1).unwrap();
        let rho = DensityOperator::from_label(s, "101").unwrap();
        let before = lossy_fredkin_channel(&s, abc(), 0.5, LossPlacement::BeforeKerr).unwrap().apply(&rho).unwrap();
        let after = lossy_fredkin_channel(&s, abc(), 0.5, LossPlacement::AfterKerr).unwrap().apply(&rho).unwrap();
        let gap = linalg::max_abs_diff(before.matrix(), after.matrix());
        eprintln!("before/after Kerr discrepancy on |101>: {gap:e}");
        // Single absorption from c lands on |100> before K and on |010> after K.
        assert!(before.probability_of("100").unwrap() > before.probability_of("010").unwrap());
        assert!(after.probability_of("010").unwrap() > after.probability_of("100").unwrap());
    }

    #[test]
    fn placement_tags() {
        assert_eq!("split".parse::<LossPlacement>().unwrap(), LossPlacement::Split);
        assert_eq!(
            "middle".parse::<LossPlacement>(),
            Err(Error::InvalidPlacement("middle".into()))
        );
        assert_eq!(LossPlacement::BeforeKerr.to_string(), "before-kerr");
    }

    #[test]
    fn balanced_rejects_collisions() {
        let s = FockSpace::new(4, 1).unwrap();
        assert!(matches!(
            balanced_lossy_fredkin_channel(&s, abc(), 2, 0.1, LossPlacement::AfterKerr),
            Err(Error::ModeCollision(_))
        ));
    }
}
