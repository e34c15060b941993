//! Plan choice against the divergence ball: a cut loop whose master is the
//! min-max over a pool of explicit distributions and whose separation is
//! the closed-form worst case at the master's plan.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::divergence::{divergence_radius, MODIFIED_CHI2_CURVATURE};
use super::inner::{worst_case_distribution, InnerSolution};
use crate::error::{Error, Result};
use crate::expectation::{CostEvaluator, LawCache, ScenarioEvaluator, ScenarioSet};
use crate::intake::{IntakeSpace, SuccessProbs};
use crate::master::{MasterStrategy, MinMaxSolver};
use crate::parametric::{Algorithm, IterationRecord, SolveReport, StopReason, WorstCase};
use crate::planning::{Instance, NetLoad, PullForwardPlan};

/// Largest intake space the explicit nominal distribution is built over.
pub const NONPARAMETRIC_SCENARIO_CAP: usize = 100_000;

/// A modified chi-square ball around a binomial nominal distribution.
#[derive(Debug, Clone)]
pub struct NonparametricAmbiguity {
    scenarios: Arc<ScenarioSet>,
    nominal: Vec<f64>,
    radius: f64,
    estimate: SuccessProbs,
}

impl NonparametricAmbiguity {
    pub fn new(intake_max: &[u32], estimate: SuccessProbs, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("radius {radius} must be positive and finite")));
        }
        let space = IntakeSpace::new(intake_max)?;
        if space.cardinality() > NONPARAMETRIC_SCENARIO_CAP {
            return Err(Error::TooLarge {
                what: "nonparametric scenario set",
                size: space.cardinality() as u128,
                cap: NONPARAMETRIC_SCENARIO_CAP as u128,
            });
        }
        let law = LawCache::new(intake_max).get(&estimate)?;
        let scenarios = ScenarioSet::full(space);
        let nominal = scenarios.weights_under(&law);
        Ok(Self { scenarios: Arc::new(scenarios), nominal, radius, estimate })
    }

    /// Radius from the sample size, confidence level and degrees of freedom.
    pub fn from_samples(intake_max: &[u32], estimate: SuccessProbs, samples: u32, alpha: f64, dof: u32) -> Result<Self> {
        let radius = divergence_radius(samples, dof, alpha, MODIFIED_CHI2_CURVATURE)?;
        Self::new(intake_max, estimate, radius)
    }

    pub fn scenarios(&self) -> &ScenarioSet {
        &self.scenarios
    }

    pub fn nominal(&self) -> &[f64] {
        &self.nominal
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn estimate(&self) -> &SuccessProbs {
        &self.estimate
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonparametricOptions {
    pub epsilon: f64,
    pub max_cuts: usize,
    pub strategy: MasterStrategy,
}

impl Default for NonparametricOptions {
    fn default() -> Self {
        Self { epsilon: 1e-4, max_cuts: 50, strategy: MasterStrategy::ExactSearch }
    }
}

#[derive(Debug, Clone)]
pub struct NonparametricSolution {
    pub report: SolveReport,
    /// Worst case at the reported plan.
    pub worst_case: InnerSolution,
}

/// Short content hash of a distribution, stable across runs.
pub fn distribution_hash(probabilities: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for p in probabilities {
        hasher.update(format!("{p:.12e};").as_bytes());
    }
    hasher.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Expected rollover per day under explicit scenario weights.
fn expected_rollover_under(scenarios: &ScenarioSet, net: &NetLoad, weights: &[f64]) -> Vec<f64> {
    let days = net.len();
    let mut mean = vec![0.0; days];
    for (row, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let intake = scenarios.intake(row);
        let mut carried = 0i64;
        for day in 0..days {
            carried = (carried + intake[day] as i64 + net.0[day]).max(0);
            mean[day] += w * carried as f64;
        }
    }
    mean
}

fn same_distribution(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

pub fn solve_np(
    instance: &Instance,
    ambiguity: &NonparametricAmbiguity,
    options: &NonparametricOptions,
) -> Result<NonparametricSolution> {
    let clock = Instant::now();
    if ambiguity.scenarios.space().intake_max() != instance.intake_max() {
        return Err(Error::InvalidInstance("ambiguity set was built for a different intake range".into()));
    }
    if !(options.epsilon > 0.0) || options.max_cuts == 0 {
        return Err(Error::Domain("cut loop needs epsilon > 0 and at least one cut".into()));
    }
    let cost = instance.rollover_cost();
    let solver = MinMaxSolver::new(instance, options.strategy)?;
    let nominal = ambiguity.nominal.clone();
    let mut pool = vec![nominal.clone()];
    let mut evaluators: Vec<Arc<dyn CostEvaluator>> = vec![Arc::new(ScenarioEvaluator::new(
        Arc::clone(&ambiguity.scenarios),
        nominal,
        cost,
        "nominal".into(),
    )?)];
    let mut trace = Vec::new();
    let mut calls = 0;
    let mut stop = StopReason::IterationLimit;
    let mut finished: Option<(PullForwardPlan, NetLoad, InnerSolution)> = None;
    let mut best: Option<(PullForwardPlan, NetLoad, InnerSolution)> = None;

    for iteration in 1..=options.max_cuts {
        let master = solver.solve(&evaluators)?;
        calls += master.evaluations;
        let costs = ambiguity.scenarios.costs(&master.net, cost);
        let inner = worst_case_distribution(&costs, &ambiguity.nominal, ambiguity.radius)?;
        calls += 1;
        let hash = distribution_hash(&inner.probabilities);
        trace.push(IterationRecord {
            iteration,
            plan: master.plan.clone(),
            master_value: master.value,
            separation_value: inner.objective,
            separated: format!("dist:{hash}"),
            pool_size: pool.len(),
        });
        log::debug!("np cut {iteration}: {} t={} V={}", master.plan, master.value, inner.objective);
        let current = (master.plan, master.net, inner);
        if best.as_ref().is_none_or(|b| current.2.objective < b.2.objective) {
            best = Some(current.clone());
        }
        if current.2.objective <= master.value + options.epsilon / 2.0 {
            stop = StopReason::WithinTolerance;
            finished = Some(current);
            break;
        }
        if pool.iter().any(|p| same_distribution(p, &current.2.probabilities)) {
            stop = StopReason::RepeatedParameter;
            finished = Some(current);
            break;
        }
        pool.push(current.2.probabilities.clone());
        evaluators.push(Arc::new(ScenarioEvaluator::new(
            Arc::clone(&ambiguity.scenarios),
            current.2.probabilities.clone(),
            cost,
            format!("dist:{hash}"),
        )?));
    }

    let converged = finished.is_some();
    let (plan, net, inner) = finished.or(best).expect("at least one cut ran");
    let report = SolveReport {
        algorithm: Algorithm::Nonparametric,
        plan,
        worst_case: WorstCase::Distribution { hash: distribution_hash(&inner.probabilities) },
        objective: inner.objective,
        iterations: trace.len(),
        trace,
        pmf_tables: 1,
        evaluator_calls: calls,
        converged,
        stop_reason: stop,
        worst_case_rollover: expected_rollover_under(&ambiguity.scenarios, &net, &inner.probabilities),
        surrogate_objective: None,
        wall_time_ms: clock.elapsed().as_secs_f64() * 1e3,
    };
    Ok(NonparametricSolution { report, worst_case: inner })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub divergence: f64,
    pub kl_divergence: f64,
    pub entropy: f64,
    /// Sum over days of the marginal means.
    pub total_mean: f64,
    /// Sum over days of the marginal variances.
    pub total_variance: f64,
    /// Sum over days of the marginal skewness coefficients.
    pub total_skewness: f64,
    /// Intakes with positive mass in `P` but none in `Q`, after rounding.
    pub popped: usize,
    /// Intakes with positive mass in `Q` but none in `P`, after rounding.
    pub suppressed: usize,
}

/// Describes `p` against the nominal `q`, both indexed by `space`.
pub fn distribution_summary(p: &[f64], q: &[f64], space: &IntakeSpace, decimals: i32) -> Result<DistributionSummary> {
    use super::divergence::{entropy, kl_divergence, modified_chi2_divergence};
    if p.len() != space.cardinality() {
        return Err(Error::LengthMismatch { what: "distribution", expected: space.cardinality(), got: p.len() });
    }
    let scale = 10f64.powi(decimals);
    let round = |x: f64| (x * scale).round() / scale;
    let mut popped = 0;
    let mut suppressed = 0;
    for (&pj, &qj) in p.iter().zip(q) {
        let (pr, qr) = (round(pj), round(qj));
        if pr > 0.0 && qr == 0.0 {
            popped += 1;
        }
        if qr > 0.0 && pr == 0.0 {
            suppressed += 1;
        }
    }

    let mut marginals: Vec<Vec<f64>> = space.intake_max().iter().map(|&m| vec![0.0; m as usize + 1]).collect();
    space.for_each(|index, intake| {
        for (day, &k) in intake.iter().enumerate() {
            marginals[day][k as usize] += p[index];
        }
    });
    let (mut total_mean, mut total_variance, mut total_skewness) = (0.0, 0.0, 0.0);
    for marginal in &marginals {
        let mean: f64 = marginal.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
        let moment = |order: i32| marginal.iter().enumerate().map(|(k, w)| w * (k as f64 - mean).powi(order)).sum::<f64>();
        let variance = moment(2);
        total_mean += mean;
        total_variance += variance;
        if variance > 1e-300 {
            total_skewness += moment(3) / variance.powf(1.5);
        }
    }
    Ok(DistributionSummary {
        divergence: modified_chi2_divergence(p, q)?,
        kl_divergence: kl_divergence(p, q)?,
        entropy: entropy(p),
        total_mean,
        total_variance,
        total_skewness,
        popped,
        suppressed,
    })
}
