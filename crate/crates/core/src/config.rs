//! Experiment configuration: problem definitions read from TOML.

use serde::{Deserialize, Serialize};

use crate::cd::{cd_term_for, CdMethod, CdTerm};
use crate::models::{
    build_ising_chain, build_single_spin, build_zz_chain, AnnealingProblem, Boundary, SpinChainSpec,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    SingleSpin,
    IsingChain,
    ZzChain,
}

/// Scalar or per-site array, as the `h_z` key allows both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    PerSite(Vec<f64>),
}

impl ScalarOrVec {
    fn resolve(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            ScalarOrVec::Scalar(v) => Ok(vec![*v; n]),
            ScalarOrVec::PerSite(v) => {
                if v.len() != n {
                    return Err(Error::Config(format!(
                        "h_z has {} entries for {n} spins",
                        v.len()
                    )));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Time,
    Coupling,
    Size,
    Steps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCountSpec {
    /// Fidelity the CD run must reach.
    pub threshold_cd: f64,
    /// Fidelity the plain run must reach.
    pub threshold_nocd: f64,
    pub max_steps: usize,
}

impl Default for GateCountSpec {
    fn default() -> Self {
        Self {
            threshold_cd: 0.999,
            threshold_nocd: 0.99,
            max_steps: 200,
        }
    }
}

/// One experiment: problem, CD method, optional sweep/sampling settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub n: Option<usize>,
    pub h_x: f64,
    #[serde(default)]
    pub h_z: Option<ScalarOrVec>,
    #[serde(default)]
    pub j0: Option<f64>,
    #[serde(default)]
    pub boundary: Option<Boundary>,
    #[serde(rename = "T")]
    pub total_time: f64,
    pub dt: f64,
    #[serde(default = "default_schedule")]
    pub schedule: String,
    pub cd_method: String,
    #[serde(default)]
    pub cd_order: Option<usize>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub gatecount: Option<GateCountSpec>,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Symmetric per-qubit readout error probability.
    #[serde(default)]
    pub readout_error: Option<f64>,
    #[serde(default)]
    pub eps_rotation: Option<f64>,
    #[serde(default)]
    pub eps_cnot: Option<f64>,
    #[serde(default)]
    pub midpoint_sampling: Option<bool>,
    /// One of `cd-mid` (default), `cd-last`, `cd-first`.
    #[serde(default)]
    pub step_ordering: Option<String>,
}

fn default_schedule() -> String {
    "sin2".to_string()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The CD method, with `cd_order` folded into `nc` when given.
    pub fn method(&self) -> Result<CdMethod> {
        let mut method: CdMethod = self.cd_method.parse()?;
        if let (CdMethod::NestedCommutator(_), Some(order)) = (method, self.cd_order) {
            if order == 0 {
                return Err(Error::Config("cd_order must be ≥ 1".into()));
            }
            method = CdMethod::NestedCommutator(order);
        }
        Ok(method)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schedule != "sin2" {
            return Err(Error::Config(format!(
                "unknown schedule '{}' (only sin2 is available)",
                self.schedule
            )));
        }
        self.method()?;
        if let Some(spec) = &self.sweep {
            if spec.grid.is_empty() {
                return Err(Error::Config("sweep grid is empty".into()));
            }
        }
        Ok(())
    }

    pub fn build_problem(&self) -> Result<AnnealingProblem> {
        self.validate()?;
        self.build_problem_with(self.total_time, self.dt, None, None)
    }

    /// Build with selected parameters overridden (used by sweeps).
    pub fn build_problem_with(
        &self,
        total_time: f64,
        dt: f64,
        n_override: Option<usize>,
        j0_override: Option<f64>,
    ) -> Result<AnnealingProblem> {
        match self.model {
            ModelKind::SingleSpin => {
                let h_z = match &self.h_z {
                    Some(ScalarOrVec::Scalar(v)) => *v,
                    Some(ScalarOrVec::PerSite(v)) if v.len() == 1 => v[0],
                    Some(_) => return Err(Error::Config("single_spin takes scalar h_z".into())),
                    None => return Err(Error::Config("single_spin requires h_z".into())),
                };
                build_single_spin(self.h_x, h_z, total_time, dt)
            }
            ModelKind::IsingChain => {
                let n = n_override
                    .or(self.n)
                    .ok_or_else(|| Error::Config("ising_chain requires n".into()))?;
                let h_z = self
                    .h_z
                    .as_ref()
                    .ok_or_else(|| Error::Config("ising_chain requires h_z".into()))?
                    .resolve(n)?;
                let spec = SpinChainSpec {
                    n,
                    h_x: self.h_x,
                    h_z,
                    j0: j0_override.or(self.j0).unwrap_or(0.0),
                    boundary: self.boundary.unwrap_or(Boundary::Open),
                };
                build_ising_chain(&spec, total_time, dt)
            }
            ModelKind::ZzChain => {
                let n = n_override
                    .or(self.n)
                    .ok_or_else(|| Error::Config("zz_chain requires n".into()))?;
                let j0 = j0_override
                    .or(self.j0)
                    .ok_or_else(|| Error::Config("zz_chain requires j0".into()))?;
                build_zz_chain(n, self.h_x, j0, total_time, dt)
            }
        }
    }

    pub fn build_cd(&self, problem: &AnnealingProblem) -> Result<CdTerm> {
        cd_term_for(self.method()?, problem)
    }

    pub fn plan_options(&self) -> Result<crate::evolve::PlanOptions> {
        use crate::evolve::StepOrdering;
        let ordering = match self.step_ordering.as_deref() {
            None | Some("cd-mid") => StepOrdering::CdMid,
            Some("cd-last") => StepOrdering::CdLast,
            Some("cd-first") => StepOrdering::CdFirst,
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown step_ordering '{other}' (expected cd-mid, cd-last or cd-first)"
                )))
            }
        };
        Ok(crate::evolve::PlanOptions {
            midpoint_sampling: self.midpoint_sampling.unwrap_or(false),
            ordering,
        })
    }
}
