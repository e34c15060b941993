use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parametric::Algorithm;

/// How many days should have a maximum intake above their spare capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HighDayTarget {
    One,
    /// `⌊L/2⌋` days.
    Half,
    /// `L − 1` days.
    AllButOne,
    Exactly(usize),
}

impl HighDayTarget {
    pub fn resolve(self, horizon: usize) -> usize {
        match self {
            HighDayTarget::One => 1,
            HighDayTarget::Half => horizon / 2,
            HighDayTarget::AllButOne => horizon.saturating_sub(1),
            HighDayTarget::Exactly(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub horizons: Vec<usize>,
    pub window: usize,
    pub capacity: u32,
    /// `c − D` on days with spare capacity.
    pub spare: u32,
    /// `D − c` on days without spare capacity.
    pub deficit: u32,
    /// Requested numbers of feasible pull-forward pairs; empty means the
    /// maximum and the two values two and four below it.
    pub pair_targets: Vec<usize>,
    pub high_days: Vec<HighDayTarget>,
    /// Independent intake-range draws per (pattern, high-day) cell.
    pub replicates: usize,
    pub samples: Vec<u32>,
    pub alpha: f64,
    pub n_probs: Vec<u32>,
    pub estimate: f64,
    pub algorithms: Vec<Algorithm>,
    pub epsilon: f64,
    pub k_max: usize,
    pub beta: f64,
    pub benders_epsilon: f64,
    /// Confidence level of the divergence ball.
    pub np_alpha: f64,
    /// Degrees of freedom of the divergence radius; defaults to the horizon.
    pub np_dof: Option<u32>,
    pub max_intake_space: usize,
    pub max_ambiguity_size: usize,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    /// Instance documents to run instead of generated instances.
    pub instance_files: Vec<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            horizons: vec![5],
            window: 2,
            capacity: 30,
            spare: 8,
            deficit: 15,
            pair_targets: Vec::new(),
            high_days: vec![HighDayTarget::One, HighDayTarget::Half, HighDayTarget::AllButOne],
            replicates: 1,
            samples: vec![10, 50, 100],
            alpha: 0.05,
            n_probs: vec![5, 10, 15],
            estimate: 0.75,
            algorithms: vec![
                Algorithm::Exact,
                Algorithm::CuttingSurface,
                Algorithm::CuttingSurfaceFull,
                Algorithm::ReducedIntake,
            ],
            epsilon: 0.01,
            k_max: 10,
            beta: crate::intake::DEFAULT_BETA,
            benders_epsilon: 1e-8,
            np_alpha: 0.05,
            np_dof: None,
            max_intake_space: 100_000,
            max_ambiguity_size: 5_000,
            seed: 1,
            jobs: 0,
            instance_files: Vec::new(),
            out_dir: None,
        }
    }
}

impl SuiteConfig {
    /// Small suite that runs in minutes: horizons 3 to 5, two-day window,
    /// intake spaces up to 5000 and ambiguity sets up to 500 members.
    pub fn desk() -> Self {
        Self {
            horizons: vec![3, 4, 5],
            replicates: 3,
            samples: vec![10, 50],
            n_probs: vec![5, 10],
            max_intake_space: 5_000,
            max_ambiguity_size: 500,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if self.horizons.is_empty() || self.horizons.iter().any(|&l| l < 2) {
            return bad("horizons must be non-empty and at least 2".into());
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        if self.spare == 0 || self.spare > self.capacity {
            return bad(format!("spare {} must lie in 1..={}", self.spare, self.capacity));
        }
        if self.samples.is_empty() || self.samples.contains(&0) {
            return bad("sample sizes must be positive".into());
        }
        if self.n_probs.is_empty() || self.n_probs.contains(&0) {
            return bad("grid resolutions must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) || !(self.np_alpha > 0.0 && self.np_alpha < 1.0) {
            return bad("alpha values must lie in (0, 1)".into());
        }
        if !(self.estimate > 0.0 && self.estimate < 1.0) {
            return bad(format!("estimate {} must lie in (0, 1)", self.estimate));
        }
        if !(self.epsilon > 0.0) || !(self.benders_epsilon > 0.0) || self.k_max == 0 {
            return bad("tolerances must be positive and k_max at least 1".into());
        }
        if !(0.0..1.0).contains(&self.beta) {
            return bad(format!("beta {} outside [0, 1)", self.beta));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { context: format!("reading {}", path.display()), source })?;
        let mut config: Self = serde_json::from_str(&text)
            .map_err(|source| Error::Json { context: format!("parsing {}", path.display()), source })?;
        // Instance paths are relative to the config file.
        if let Some(base) = path.parent() {
            for file in &mut config.instance_files {
                if file.is_relative() {
                    *file = base.join(&*file);
                }
            }
        }
        config.validate()?;
        Ok(config)
    }
}
