//! Epigraph MIP: minimise `t` subject to `t ≥ Σ a_τ E_d[R_τ]` for every
//! evaluator `d`, with one rollover variable per intake prefix.
//!
//! Rollover on day τ depends only on intakes up to τ, so the variables are
//! indexed by intake prefixes rather than full intake vectors; each
//! evaluator's weights are marginalised onto those prefixes.

use std::sync::Arc;

use tactical_lp::{mip_solve, ConstraintOp, LinearProgram, MipOptions, MipStatus, Sense};

use crate::error::{Error, Result};
use crate::expectation::CostEvaluator;
use crate::intake::IntakeSpace;
use crate::planning::{DayPair, Instance, PullForwardPlan};

pub const DEFAULT_ROLLOVER_VARIABLE_CAP: usize = 20_000;

#[derive(Debug, Clone)]
pub struct EpigraphProgram {
    pub program: LinearProgram,
    pairs: Vec<DayPair>,
    plan_columns: Vec<usize>,
    pub epigraph_column: usize,
}

impl EpigraphProgram {
    pub fn solve(&self) -> Result<PullForwardPlan> {
        let solution = mip_solve(&self.program, &MipOptions::default())?;
        if solution.status != MipStatus::Optimal {
            return Err(Error::Solver(format!("epigraph MIP ended with status {:?}", solution.status)));
        }
        Ok(PullForwardPlan::from_entries(
            self.pairs.iter().zip(&self.plan_columns).map(|(&pair, &col)| (pair, solution.x[col].round() as u32)),
        ))
    }
}

pub fn epigraph_program(
    instance: &Instance,
    evaluators: &[Arc<dyn CostEvaluator>],
    cap: usize,
) -> Result<EpigraphProgram> {
    let days = instance.horizon();
    let space = IntakeSpace::new(instance.intake_max())?;
    let radix: Vec<usize> = instance.intake_max().iter().map(|&m| m as usize + 1).collect();
    let mut prefixes = Vec::with_capacity(days);
    let mut count = 1usize;
    for &r in &radix {
        count *= r;
        prefixes.push(count);
    }
    let variables: usize = prefixes.iter().sum();
    if variables > cap {
        return Err(Error::TooLarge { what: "rollover variables", size: variables as u128, cap: cap as u128 });
    }

    let mut lp = LinearProgram::new(Sense::Minimize);
    let pairs = instance.pair_sets().feasible;
    let plan_columns: Vec<usize> = pairs
        .iter()
        .map(|p| {
            let top = instance.spare(p.work_day).min(instance.workstack()[p.due_day - 1]);
            lp.add_integer_variable(0.0, 0.0, top as f64)
        })
        .collect();
    let epigraph_column = lp.add_variable(1.0, 0.0, f64::INFINITY);
    let rollover_columns: Vec<usize> = (0..variables).map(|_| lp.add_variable(0.0, 0.0, f64::INFINITY)).collect();
    let mut offsets = Vec::with_capacity(days);
    let mut offset = 0;
    for &p in &prefixes {
        offsets.push(offset);
        offset += p;
    }

    for day in 0..days {
        // Plan terms of the net load: +y on the work day, −y on the due day.
        let plan_terms: Vec<(usize, f64)> = pairs
            .iter()
            .zip(&plan_columns)
            .filter_map(|(p, &col)| {
                if p.work_day == day + 1 {
                    Some((col, -1.0))
                } else if p.due_day == day + 1 {
                    Some((col, 1.0))
                } else {
                    None
                }
            })
            .collect();
        for prefix in 0..prefixes[day] {
            let arrivals = (prefix % radix[day]) as f64;
            let mut row = vec![(rollover_columns[offsets[day] + prefix], 1.0)];
            if day > 0 {
                row.push((rollover_columns[offsets[day - 1] + prefix / radix[day]], -1.0));
            }
            row.extend(plan_terms.iter().copied());
            lp.add_constraint(row, ConstraintOp::Ge, arrivals - instance.slack(day + 1) as f64);
        }
    }

    for evaluator in evaluators {
        let weights = evaluator.joint_weights(&space);
        let mut row = vec![(epigraph_column, 1.0)];
        for day in 0..days {
            let stride = space.stride(day);
            let mut marginal = vec![0.0; prefixes[day]];
            for (index, w) in weights.iter().enumerate() {
                marginal[index / stride] += w;
            }
            let a = instance.rollover_cost()[day];
            for (prefix, m) in marginal.into_iter().enumerate() {
                if m != 0.0 && a != 0.0 {
                    row.push((rollover_columns[offsets[day] + prefix], -a * m));
                }
            }
        }
        lp.add_constraint(row, ConstraintOp::Ge, 0.0);
    }

    for day in 1..=days {
        let out: Vec<(usize, f64)> =
            pairs.iter().zip(&plan_columns).filter(|(p, _)| p.due_day == day).map(|(_, &c)| (c, 1.0)).collect();
        if !out.is_empty() {
            lp.add_constraint(out, ConstraintOp::Le, instance.workstack()[day - 1] as f64);
        }
        let into: Vec<(usize, f64)> =
            pairs.iter().zip(&plan_columns).filter(|(p, _)| p.work_day == day).map(|(_, &c)| (c, 1.0)).collect();
        if !into.is_empty() {
            lp.add_constraint(into, ConstraintOp::Le, instance.spare(day) as f64);
        }
    }
    Ok(EpigraphProgram { program: lp, pairs, plan_columns, epigraph_column })
}
