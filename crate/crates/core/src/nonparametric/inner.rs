//! Worst-case distribution over a modified chi-square ball.
//!
//! For a multiplier `θ = 1/(2λ) > 0` the maximiser has the form
//! `P_j = Q_j max(1 + θ(c_j − ν), 0)`. For fixed `θ` the normalisation is
//! piecewise linear in `ν` and is solved exactly; the divergence of the
//! resulting `P` grows with `θ`, so a bisection on `θ` puts it on the
//! ball's boundary. When the ball already contains `Q` restricted to the
//! costliest scenarios, that restriction is optimal and `λ = 0`.

use serde::{Deserialize, Serialize};

use super::divergence::{conjugate_modified_chi2, modified_chi2_divergence};
use crate::error::{Error, Result};
use crate::expectation::pairwise_sum;

/// Costs whose spread is below this are treated as constant.
pub const FLAT_COST_SPREAD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerSolution {
    pub probabilities: Vec<f64>,
    /// Multiplier of the divergence constraint.
    pub lambda: f64,
    /// Multiplier of the normalisation constraint.
    pub nu: f64,
    /// `Σ P_j c_j`.
    pub objective: f64,
    /// `λρ + ν + λ Σ Q_j φ*((c_j − ν)/λ)`, or `ν` when `λ = 0`.
    pub dual_objective: f64,
    pub divergence: f64,
}

fn validate(costs: &[f64], nominal: &[f64], radius: f64) -> Result<()> {
    if costs.len() != nominal.len() {
        return Err(Error::LengthMismatch { what: "scenario costs", expected: nominal.len(), got: costs.len() });
    }
    if costs.is_empty() {
        return Err(Error::EmptyAmbiguitySet);
    }
    if costs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("scenario costs must be finite".into()));
    }
    if nominal.iter().any(|&q| !(q >= 0.0)) {
        return Err(Error::Domain("nominal weights must be non-negative".into()));
    }
    let mass: f64 = nominal.iter().sum();
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("nominal weights sum to {mass}, not 1")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("radius {radius} must be positive and finite")));
    }
    Ok(())
}

/// `ν` solving `Σ Q_j max(1 + θ(c_j − ν), 0) = 1` for fixed `θ > 0`.
/// `order` lists the support in decreasing cost.
fn normaliser(costs: &[f64], nominal: &[f64], order: &[usize], theta: f64) -> f64 {
    let mut mass = 0.0;
    let mut weighted = 0.0;
    let mut nu = f64::NAN;
    for (rank, &j) in order.iter().enumerate() {
        mass += nominal[j];
        weighted += nominal[j] * (1.0 + theta * costs[j]);
        nu = (weighted - 1.0) / (theta * mass);
        let cutoff = nu - 1.0 / theta;
        // The active set is the top `rank + 1` scenarios when the next
        // scenario sits at or below the cutoff.
        match order.get(rank + 1) {
            Some(&next) if costs[next] > cutoff => continue,
            _ => break,
        }
    }
    nu
}

fn distribution_at(costs: &[f64], nominal: &[f64], theta: f64, nu: f64) -> Vec<f64> {
    costs.iter().zip(nominal).map(|(&c, &q)| q * (1.0 + theta * (c - nu)).max(0.0)).collect()
}

fn weighted_sum(p: &[f64], costs: &[f64]) -> f64 {
    pairwise_sum(&p.iter().zip(costs).map(|(a, b)| a * b).collect::<Vec<_>>())
}

/// Maximises `Σ P_j c_j` over distributions within `radius` of `nominal`.
pub fn worst_case_distribution(costs: &[f64], nominal: &[f64], radius: f64) -> Result<InnerSolution> {
    validate(costs, nominal, radius)?;
    let support: Vec<usize> = (0..costs.len()).filter(|&j| nominal[j] > 0.0).collect();
    let top = support.iter().map(|&j| costs[j]).fold(f64::NEG_INFINITY, f64::max);
    let bottom = support.iter().map(|&j| costs[j]).fold(f64::INFINITY, f64::min);

    if top - bottom <= FLAT_COST_SPREAD {
        let objective = weighted_sum(nominal, costs);
        return Ok(InnerSolution {
            probabilities: nominal.to_vec(),
            lambda: 0.0,
            nu: objective,
            objective,
            dual_objective: objective,
            divergence: 0.0,
        });
    }

    let peak_mass: f64 = support.iter().filter(|&&j| costs[j] >= top - FLAT_COST_SPREAD).map(|&j| nominal[j]).sum();
    if 1.0 / peak_mass - 1.0 <= radius {
        let probabilities: Vec<f64> = (0..costs.len())
            .map(|j| if nominal[j] > 0.0 && costs[j] >= top - FLAT_COST_SPREAD { nominal[j] / peak_mass } else { 0.0 })
            .collect();
        let divergence = modified_chi2_divergence(&probabilities, nominal)?;
        return Ok(InnerSolution {
            objective: weighted_sum(&probabilities, costs),
            probabilities,
            lambda: 0.0,
            nu: top,
            dual_objective: top,
            divergence,
        });
    }

    let mut order = support.clone();
    order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(a.cmp(&b)));
    let divergence_at = |theta: f64| {
        let nu = normaliser(costs, nominal, &order, theta);
        let p = distribution_at(costs, nominal, theta, nu);
        let d = modified_chi2_divergence(&p, nominal).unwrap_or(f64::INFINITY);
        (d, nu, p)
    };

    let mut low = 0.0;
    let mut high = 1.0 / (top - bottom);
    let mut guard = 0;
    while divergence_at(high).0 < radius {
        low = high;
        high *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Solver("could not bracket the divergence multiplier".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (low + high);
        if mid <= low || mid >= high {
            break;
        }
        if divergence_at(mid).0 < radius {
            low = mid;
        } else {
            high = mid;
        }
    }
    let theta = if (divergence_at(low).0 - radius).abs() <= (divergence_at(high).0 - radius).abs() { low } else { high };
    let (divergence, nu, probabilities) = divergence_at(theta);
    let lambda = 1.0 / (2.0 * theta);
    let conjugate: Vec<f64> =
        costs.iter().zip(nominal).map(|(&c, &q)| q * conjugate_modified_chi2((c - nu) / lambda)).collect();
    let dual_objective = lambda * radius + nu + lambda * pairwise_sum(&conjugate);
    let objective = weighted_sum(&probabilities, costs);
    let scale = objective.abs().max(1.0);
    if (objective - dual_objective).abs() > 1e-6 * scale {
        return Err(Error::Solver(format!(
            "inner duality gap {} exceeds tolerance (primal {objective}, dual {dual_objective})",
            (objective - dual_objective).abs()
        )));
    }
    Ok(InnerSolution { probabilities, lambda, nu, objective, dual_objective, divergence })
}
