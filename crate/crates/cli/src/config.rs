//! JSON run configuration. Every field is optional; command-line flags
//! override it.

use std::path::Path;

use serde::Deserialize;

use charvol::estimators::EstimatorKind;
use charvol::montecarlo::StudyScenario;

use crate::args::{CommonArgs, EstimateArgs, MonteCarloArgs, SimulateArgs, TheoryArgs};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub simulate: SimulateBlock,
    #[serde(default)]
    pub estimate: EstimateBlock,
    #[serde(default)]
    pub montecarlo: MonteCarloBlock,
    #[serde(default)]
    pub theory: TheoryBlock,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub grid: Option<f64>,
    pub days: Option<usize>,
    pub c0: Option<f64>,
    pub cir_kappa: Option<f64>,
    pub cir_theta: Option<f64>,
    pub cir_sigma: Option<f64>,
    pub substeps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateBlock {
    pub estimators: Option<Vec<EstimatorKind>>,
    pub k_n: Option<usize>,
    pub zeta: Option<f64>,
    pub u: Option<f64>,
    pub kappa: Option<u8>,
    pub level: Option<f64>,
    pub delta: Option<f64>,
    pub time_column: Option<String>,
    pub value_column: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloBlock {
    pub scenarios: Option<Vec<StudyScenario>>,
    pub reps: Option<usize>,
    pub estimators: Option<Vec<EstimatorKind>>,
    pub zeta: Option<f64>,
    pub level: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryBlock {
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_plus: Option<f64>,
    pub gamma_minus: Option<f64>,
    pub u: Option<f64>,
    pub delta: Option<f64>,
    pub horizon: Option<f64>,
    pub k_n: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Seed and thread count with flags taking precedence.
    pub fn common(&self, args: &CommonArgs) -> (Option<u64>, Option<usize>) {
        (args.seed.or(self.seed), args.threads.or(self.threads))
    }
}

fn pick<T: Clone>(flag: &Option<T>, cfg: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| cfg.clone())
}

fn pick_list<T: Clone>(flag: &[T], cfg: &Option<Vec<T>>) -> Option<Vec<T>> {
    if flag.is_empty() {
        cfg.clone()
    } else {
        Some(flag.to_vec())
    }
}

impl SimulateBlock {
    pub fn merged(&self, a: &SimulateArgs) -> Self {
        Self {
            beta: pick(&a.beta, &self.beta),
            eta: pick(&a.eta, &self.eta),
            grid: pick(&a.grid, &self.grid),
            days: pick(&a.days, &self.days),
            c0: pick(&a.c0, &self.c0),
            cir_kappa: pick(&a.cir_kappa, &self.cir_kappa),
            cir_theta: pick(&a.cir_theta, &self.cir_theta),
            cir_sigma: pick(&a.cir_sigma, &self.cir_sigma),
            substeps: pick(&a.substeps, &self.substeps),
        }
    }
}

impl EstimateBlock {
    pub fn merged(&self, a: &EstimateArgs) -> Self {
        let value_column = a
            .value_column
            .map(|v| match v {
                crate::args::ValueColumnArg::Price => "price".to_string(),
                crate::args::ValueColumnArg::Logprice => "logprice".to_string(),
            })
            .or_else(|| self.value_column.clone());
        Self {
            estimators: pick_list(&a.estimators, &self.estimators),
            k_n: pick(&a.kn, &self.k_n),
            zeta: pick(&a.zeta, &self.zeta),
            u: pick(&a.u, &self.u),
            kappa: pick(&a.kappa, &self.kappa),
            level: pick(&a.level, &self.level),
            delta: pick(&a.delta, &self.delta),
            time_column: pick(&a.time_column, &self.time_column),
            value_column,
        }
    }
}

impl MonteCarloBlock {
    pub fn merged(&self, a: &MonteCarloArgs) -> Self {
        Self {
            scenarios: self.scenarios.clone(),
            reps: pick(&a.reps, &self.reps),
            estimators: pick_list(&a.estimators, &self.estimators),
            zeta: pick(&a.zeta, &self.zeta),
            level: pick(&a.level, &self.level),
        }
    }
}

impl TheoryBlock {
    pub fn merged(&self, a: &TheoryArgs) -> Self {
        let (gamma_plus, gamma_minus) = if a.gamma.is_some() {
            (None, None)
        } else {
            (
                pick(&a.gamma_plus, &self.gamma_plus),
                pick(&a.gamma_minus, &self.gamma_minus),
            )
        };
        let gamma = if a.gamma_plus.is_some() {
            None
        } else {
            pick(&a.gamma, &self.gamma)
        };
        Self {
            beta: pick(&a.beta, &self.beta),
            gamma,
            gamma_plus,
            gamma_minus,
            u: pick(&a.u, &self.u),
            delta: pick(&a.delta, &self.delta),
            horizon: pick(&a.horizon, &self.horizon),
            k_n: pick(&a.kn, &self.k_n),
        }
    }
}
