//! JSON instance documents. Arrays are indexed by day, starting at day 1.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intake::{build_confidence_set, clamp_estimate, mle_success_probs, ParametricAmbiguitySet, SuccessProbs};
use crate::planning::Instance;

pub const SCHEMA_VERSION: u32 = 1;

/// Estimate used when neither an estimate nor samples are given.
pub const DEFAULT_ESTIMATE: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbiguityFile {
    #[serde(rename = "N")]
    pub samples: u32,
    pub alpha: f64,
    pub n_probs: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_hat: Option<Vec<f64>>,
    /// Observed intake vectors; the estimate is their maximum-likelihood fit.
    #[serde(default, rename = "samples", skip_serializing_if = "Option::is_none")]
    pub observations: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    #[serde(rename = "L")]
    pub horizon: usize,
    #[serde(rename = "K")]
    pub window: usize,
    pub capacity: Vec<u32>,
    pub workstack: Vec<u32>,
    pub rollover_cost: Vec<f64>,
    pub i_max: Vec<u32>,
    pub ambiguity: AmbiguityFile,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, ambiguity: AmbiguityFile) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            horizon: instance.horizon(),
            window: instance.window(),
            capacity: instance.capacity().to_vec(),
            workstack: instance.workstack().to_vec(),
            rollover_cost: instance.rollover_cost().to_vec(),
            i_max: instance.intake_max().to_vec(),
            ambiguity,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { context: format!("reading {}", path.display()), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let file: Self =
            serde_json::from_str(text).map_err(|source| Error::Json { context: format!("parsing {origin}"), source })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "{origin} has schema version {}, expected {SCHEMA_VERSION}",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|source| Error::Json { context: format!("serialising {}", path.display()), source })?;
        std::fs::write(path, text + "\n")
            .map_err(|source| Error::Io { context: format!("writing {}", path.display()), source })
    }

    pub fn instance(&self) -> Result<Instance> {
        let days = self.horizon;
        for (what, len) in [
            ("capacity", self.capacity.len()),
            ("workstack", self.workstack.len()),
            ("rollover_cost", self.rollover_cost.len()),
            ("i_max", self.i_max.len()),
        ] {
            if len != days {
                return Err(Error::LengthMismatch { what, expected: days, got: len });
            }
        }
        Instance::new(
            self.window,
            self.capacity.clone(),
            self.workstack.clone(),
            self.rollover_cost.clone(),
            self.i_max.clone(),
        )
    }

    /// The estimate: given directly, fitted from samples, or the default.
    pub fn estimate(&self) -> Result<SuccessProbs> {
        let a = &self.ambiguity;
        match (&a.p_hat, &a.observations) {
            (Some(_), Some(_)) => Err(Error::InvalidInstance("give either p_hat or samples, not both".into())),
            (Some(p), None) => {
                if p.len() != self.horizon {
                    return Err(Error::LengthMismatch { what: "p_hat", expected: self.horizon, got: p.len() });
                }
                Ok(SuccessProbs(p.clone()))
            }
            (None, Some(samples)) => {
                let raw = mle_success_probs(samples, &self.i_max)?;
                Ok(SuccessProbs(clamp_estimate(&raw, samples.len() as u32, &self.i_max)))
            }
            (None, None) => Ok(SuccessProbs::uniform(DEFAULT_ESTIMATE, self.horizon)),
        }
    }

    /// Sample count behind the estimate.
    pub fn sample_count(&self) -> u32 {
        match &self.ambiguity.observations {
            Some(samples) => samples.len() as u32,
            None => self.ambiguity.samples,
        }
    }

    pub fn confidence_set(&self) -> Result<ParametricAmbiguitySet> {
        let estimate = self.estimate()?;
        build_confidence_set(
            estimate.as_slice(),
            self.sample_count(),
            &self.i_max,
            self.ambiguity.alpha,
            self.ambiguity.n_probs,
        )
    }
}
