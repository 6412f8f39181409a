//! JSON experiment configuration shared by all subcommands.

use mfrn::quad::QuadratureSpec;
use mfrn::recurrence::NetConfig;
use mfrn::simulator::SimSpec;
use serde::Deserialize;
use std::path::PathBuf;

/// One experiment: a network, optional Monte Carlo settings, initial
/// conditions, and command-specific options. Unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub net: NetConfig,
    #[serde(default)]
    pub sim: Option<SimSpec>,
    /// (p0, e0) pairs; defaults to p0 = 1 with an e0 grid 0.1 … 0.9.
    #[serde(default)]
    pub initial_conditions: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    /// Last-layer squared gradient norm seeding the backward recurrence.
    #[serde(default)]
    pub daleth_l: Option<f64>,
    /// For `simulate`: which passes to run.
    #[serde(default)]
    pub sim_pass: Option<SimPass>,
    /// For `sweep`: the two grid axes.
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimPass {
    Forward,
    Backward,
    Both,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis1: SweepAxis,
    pub axis2: SweepAxis,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    VarW,
    VarV,
    VarA,
    Alpha,
    Depth,
}

impl AxisName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::VarW => "var_w",
            AxisName::VarV => "var_v",
            AxisName::VarA => "var_a",
            AxisName::Alpha => "alpha",
            AxisName::Depth => "depth",
        }
    }
}

impl ExperimentConfig {
    pub fn initial_conditions(&self) -> Vec<(f64, f64)> {
        self.initial_conditions.clone().unwrap_or_else(|| {
            (1..=9).map(|i| (1.0, i as f64 / 10.0)).collect()
        })
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.quadrature.unwrap_or_default()
    }

    pub fn daleth_l(&self) -> f64 {
        self.daleth_l.unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<(), mfrn::Error> {
        self.net.validate()?;
        if let Some(sim) = &self.sim {
            sim.validate()?;
        }
        self.quadrature().validate()?;
        for &(p0, e0) in self.initial_conditions().iter() {
            if !(p0 > 0.0) || !(-1.0..=1.0).contains(&e0) {
                return Err(mfrn::Error::Config(format!(
                    "initial condition (p0={p0}, e0={e0}) out of range"
                )));
            }
        }
        Ok(())
    }
}
