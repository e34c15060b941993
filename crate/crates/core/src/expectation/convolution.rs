//! Day-by-day propagation of the rollover law.
//!
//! `R_τ = max(0, R_{τ−1} + I_τ + n_τ)` with independent `I_τ`, so the law of
//! `R_τ` is the law of `R_{τ−1}` convolved with the day's binomial, shifted by
//! the net load, with negative mass collapsed onto zero.

use crate::error::Result;
use crate::intake::BinomialIntakeLaw;
use crate::planning::{Instance, NetLoad, PullForwardPlan};

const FLUSH: f64 = 1e-300;
const DRIFT: f64 = 1e-12;

/// Per-day law of the rollover, supported on `0..=bound[τ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloverDistribution {
    pub days: Vec<Vec<f64>>,
}

impl RolloverDistribution {
    pub fn means(&self) -> Vec<f64> {
        self.days
            .iter()
            .map(|pmf| pmf.iter().enumerate().map(|(r, w)| r as f64 * w).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCost {
    pub total: f64,
    /// `E[R_τ]` per day.
    pub expected_rollover: Vec<f64>,
}

fn tidy(pmf: &mut [f64]) {
    let mut total = 0.0;
    for w in pmf.iter_mut() {
        if *w < FLUSH {
            *w = 0.0;
        }
        total += *w;
    }
    if (total - 1.0).abs() > DRIFT && total > 0.0 {
        log::debug!("renormalising rollover law with mass {total}");
        for w in pmf.iter_mut() {
            *w /= total;
        }
    }
}

pub fn rollover_distribution(net: &NetLoad, law: &BinomialIntakeLaw) -> RolloverDistribution {
    let mut days = Vec::with_capacity(net.len());
    let mut current = vec![1.0];
    for (&load, table) in net.as_slice().iter().zip(law.tables()) {
        let bound = (current.len() as i64 - 1 + table.len() as i64 - 1 + load).max(0) as usize;
        let mut next = vec![0.0; bound + 1];
        for (r, &w) in current.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (k, &q) in table.iter().enumerate() {
                let v = r as i64 + k as i64 + load;
                next[v.max(0) as usize] += w * q;
            }
        }
        tidy(&mut next);
        days.push(next.clone());
        current = next;
    }
    RolloverDistribution { days }
}

pub fn expected_rollover(net: &NetLoad, law: &BinomialIntakeLaw) -> Vec<f64> {
    rollover_distribution(net, law).means()
}

pub fn expected_cost_convolution(
    instance: &Instance,
    plan: &PullForwardPlan,
    law: &BinomialIntakeLaw,
) -> Result<ExpectedCost> {
    instance.validate_plan(plan)?;
    let net = instance.net_load(plan);
    let expected_rollover = expected_rollover(&net, law);
    let total = expected_rollover.iter().zip(instance.rollover_cost()).map(|(e, a)| e * a).sum();
    Ok(ExpectedCost { total, expected_rollover })
}

/// Expected cost and a subgradient with respect to the net load.
///
/// The chain state is the rollover together with the day its current busy
/// period began; `∂E[R_τ]/∂n_u = P(R_τ > 0, busy since some day ≤ u)` for
/// `u ≤ τ`. A zero rollover counts as idle.
pub fn cost_and_slope_convolution(net: &NetLoad, law: &BinomialIntakeLaw, cost: &[f64]) -> (f64, Vec<f64>) {
    let days = net.len();
    let mut slope = vec![0.0; days];
    let mut total = 0.0;
    let mut idle = 1.0;
    // busy[s][r]: mass with rollover r > 0 whose busy period started on day s.
    let mut busy: Vec<Vec<f64>> = Vec::with_capacity(days);
    for (day, (&load, table)) in net.as_slice().iter().zip(law.tables()).enumerate() {
        let width = busy.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let bound = (width as i64 - 1 + table.len() as i64 - 1 + load).max(0) as usize;
        let mut next_idle = 0.0;
        let mut next_busy: Vec<Vec<f64>> = Vec::with_capacity(day + 1);
        for period in &busy {
            let mut row = vec![0.0; bound + 1];
            for (r, &w) in period.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for (k, &q) in table.iter().enumerate() {
                    let v = r as i64 + k as i64 + load;
                    if v > 0 {
                        row[v as usize] += w * q;
                    } else {
                        next_idle += w * q;
                    }
                }
            }
            next_busy.push(row);
        }
        let mut fresh = vec![0.0; bound + 1];
        if idle > 0.0 {
            for (k, &q) in table.iter().enumerate() {
                let v = k as i64 + load;
                if v > 0 {
                    fresh[v as usize] += idle * q;
                } else {
                    next_idle += idle * q;
                }
            }
        }
        next_busy.push(fresh);

        let a = cost[day];
        let mut started_by = 0.0;
        for (start, row) in next_busy.iter_mut().enumerate() {
            for w in row.iter_mut() {
                if *w < FLUSH {
                    *w = 0.0;
                }
            }
            let mass: f64 = row.iter().sum();
            total += a * row.iter().enumerate().map(|(r, w)| r as f64 * w).sum::<f64>();
            started_by += mass;
            slope[start] += a * started_by;
        }
        idle = next_idle;
        busy = next_busy;
    }
    (total, slope)
}
