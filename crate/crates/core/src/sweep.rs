//! Parameter sweeps of the machine over loss or dephasing strength.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::stream_seed;
use crate::error::{Error, Result};
use crate::machine::{run, DephasingBackend, MachineConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for Grid {
    fn default() -> Self {
        Self { start: 1e-3, stop: 1.0, count: 61, spacing: Spacing::Log }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::DegenerateGrid("grid count must be at least 1".into()));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::NonFinite("grid bounds"));
        }
        if self.start < 0.0 || self.stop < 0.0 {
            return Err(Error::DegenerateGrid("grid values must be nonnegative".into()));
        }
        if self.spacing == Spacing::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(Error::DegenerateGrid("log spacing needs positive bounds".into()));
        }
        Ok(())
    }

    /// Grid values in order; a single-point grid is `[start]`.
    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let last = (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Gamma,
    Lambda,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Gamma => "gamma",
            Self::Lambda => "lambda",
        }
    }

    fn set(&self, config: &mut MachineConfig, value: f64) {
        match self {
            Self::Gamma => config.noise.gamma = value,
            Self::Lambda => config.noise.lambda = value,
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(Self::Gamma),
            "lambda" => Ok(Self::Lambda),
            _ => Err(Error::UnknownParameter(s.to_string())),
        }
    }
}

/// Correction applied on top of the template configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// No correction at all.
    Plain,
    DualRail,
    Projective,
    /// Projection after both gates.
    ProjectiveTwice,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Plain => "plain",
            Self::DualRail => "dual-rail",
            Self::Projective => "projective",
            Self::ProjectiveTwice => "projective-twice",
        }
    }

    pub fn configure(&self, template: &MachineConfig) -> MachineConfig {
        let mut c = template.clone();
        c.dualrail_postselect = *self == Self::DualRail;
        c.projective_ec = matches!(self, Self::Projective | Self::ProjectiveTwice);
        c.ec_after_second = *self == Self::ProjectiveTwice;
        c
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::Plain, Self::DualRail, Self::Projective, Self::ProjectiveTwice]
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub strategy: Strategy,
    pub p_accept: f64,
    pub p_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    pub value: f64,
    pub outcomes: Vec<StrategyOutcome>,
}

impl SweepRecord {
    pub fn outcome(&self, strategy: Strategy) -> Option<&StrategyOutcome> {
        self.outcomes.iter().find(|o| o.strategy == strategy)
    }
}

/// Runs every strategy at every grid value. Records come back in grid
/// order. A Monte-Carlo template gets a distinct seed per grid index.
pub fn sweep(
    template: &MachineConfig,
    parameter: SweepParameter,
    grid: &[f64],
    strategies: &[Strategy],
) -> Result<Vec<SweepRecord>> {
    if grid.is_empty() {
        return Err(Error::DegenerateGrid("empty grid".into()));
    }
    if let Some(&v) = grid.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::DegenerateGrid(format!("grid value {v} is not a nonnegative number")));
    }
    grid.par_iter()
        .enumerate()
        .map(|(index, &value)| {
            let mut base = template.clone();
            parameter.set(&mut base, value);
            if let DephasingBackend::MonteCarlo { samples, seed } = base.dephasing_backend {
                base.dephasing_backend = DephasingBackend::MonteCarlo { samples, seed: stream_seed(seed, index as u64) };
            }
            let outcomes = strategies
                .iter()
                .map(|&strategy| {
                    let r = run(&strategy.configure(&base))?;
                    Ok(StrategyOutcome { strategy, p_accept: r.p_accept, p_error: r.p_error })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRecord { index, value, outcomes })
        })
        .collect()
}
