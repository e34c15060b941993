//! Benders decomposition of the exact model over an enumerated intake space.
//!
//! The master chooses the plan and an epigraph value `z`. For a fixed plan
//! the residual problem (rollover per scenario and the epigraph over
//! members) is a linear program whose dual has a closed form: the binding
//! member gets weight one, and each scenario's rollover row carries the
//! cost still to be paid until that scenario's next idle day. The dual is
//! feasible for every plan, so its objective, which is affine in the net
//! load, is a valid optimality cut. The residual primal is always feasible
//! and bounded below, so feasibility cuts are never needed.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use tactical_lp::{mip_solve, ConstraintOp, LinearProgram, MipOptions, MipStatus, Sense};

use super::report::{Algorithm, IterationRecord, SolveReport, StopReason, WorstCase};
use super::{elapsed_ms, worst_member};
use crate::error::{Error, Result};
use crate::expectation::{expected_rollover, pairwise_sum, LawCache, ScenarioSet};
use crate::intake::{IntakeSpace, ParametricAmbiguitySet};
use crate::planning::{DayPair, Instance, NetLoad, PullForwardPlan};

pub const DEFAULT_BENDERS_SCENARIO_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BendersOptions {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub scenario_cap: usize,
}

impl Default for BendersOptions {
    fn default() -> Self {
        Self { epsilon: 1e-8, max_iterations: 500, scenario_cap: DEFAULT_BENDERS_SCENARIO_CAP }
    }
}

/// `z ≥ value + Σ_τ slope_τ (n_τ(y) − origin_τ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BendersCut {
    pub value: f64,
    pub slope: Vec<f64>,
    pub origin: Vec<i64>,
    /// Member whose epigraph row was binding.
    pub member: usize,
}

impl BendersCut {
    pub fn at(&self, net: &NetLoad) -> f64 {
        self.value
            + self.slope.iter().zip(net.as_slice()).zip(&self.origin).map(|((g, &n), &o)| g * (n - o) as f64).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BendersState {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_history: Vec<f64>,
    pub upper_history: Vec<f64>,
    pub optimality_cuts: Vec<BendersCut>,
    pub feasibility_cuts: usize,
    /// Rollover-row duals of the last subproblem, scenario-major.
    pub rollover_duals: Vec<f64>,
    /// Epigraph-row duals of the last subproblem, one per member.
    pub member_duals: Vec<f64>,
}

/// Residual problem at one plan: per-scenario rollover and its dual.
struct Residual {
    values: Vec<f64>,
    binding: usize,
    cut: BendersCut,
    rollover_duals: Vec<f64>,
}

struct Subproblem<'a> {
    instance: &'a Instance,
    scenarios: ScenarioSet,
    /// Member-major joint weights.
    weights: Vec<Vec<f64>>,
    theta: &'a ParametricAmbiguitySet,
}

impl Subproblem<'_> {
    fn solve(&self, net: &NetLoad) -> Result<Residual> {
        let days = self.instance.horizon();
        let cost = self.instance.rollover_cost();
        let rows = self.scenarios.len();
        let mut rollover = vec![0i64; rows * days];
        let mut scenario_cost = vec![0.0; rows];
        for j in 0..rows {
            let intake = self.scenarios.intake(j);
            let mut carried = 0i64;
            for day in 0..days {
                carried = (carried + intake[day] as i64 + net.0[day]).max(0);
                rollover[j * days + day] = carried;
                scenario_cost[j] += cost[day] * carried as f64;
            }
        }
        let values: Vec<f64> = self
            .weights
            .iter()
            .map(|w| pairwise_sum(&w.iter().zip(&scenario_cost).map(|(a, b)| a * b).collect::<Vec<_>>()))
            .collect();
        let binding = worst_member(&values, self.theta.members());
        let w = &self.weights[binding];

        let mut duals = vec![0.0; rows * days];
        let mut slope = vec![0.0; days];
        let mut dual_objective = Vec::with_capacity(rows * days);
        for j in 0..rows {
            let intake = self.scenarios.intake(j);
            let mut ahead = 0.0;
            for day in (0..days).rev() {
                ahead = if rollover[j * days + day] > 0 { cost[day] * w[j] + ahead } else { 0.0 };
                duals[j * days + day] = ahead;
                slope[day] += ahead;
                dual_objective.push(ahead * (intake[day] as i64 + net.0[day]) as f64);
            }
        }
        let dual_value = pairwise_sum(&dual_objective);
        let primal = values[binding];
        if (dual_value - primal).abs() > 1e-8 * primal.abs().max(1.0) {
            return Err(Error::Solver(format!("residual dual value {dual_value} differs from primal {primal}")));
        }
        Ok(Residual {
            cut: BendersCut { value: primal, slope, origin: net.0.clone(), member: binding },
            values,
            binding,
            rollover_duals: duals,
        })
    }
}

struct Master {
    program: LinearProgram,
    pairs: Vec<DayPair>,
    columns: Vec<usize>,
    epigraph: usize,
}

impl Master {
    fn new(instance: &Instance) -> Self {
        let mut program = LinearProgram::new(Sense::Minimize);
        let pairs = instance.pair_sets().feasible;
        let columns: Vec<usize> = pairs
            .iter()
            .map(|p| {
                let top = instance.spare(p.work_day).min(instance.workstack()[p.due_day - 1]);
                program.add_integer_variable(0.0, 0.0, top as f64)
            })
            .collect();
        // Costs are non-negative, so zero bounds the epigraph from below.
        let epigraph = program.add_variable(1.0, 0.0, f64::INFINITY);
        for day in 1..=instance.horizon() {
            let out: Vec<(usize, f64)> =
                pairs.iter().zip(&columns).filter(|(p, _)| p.due_day == day).map(|(_, &c)| (c, 1.0)).collect();
            if !out.is_empty() {
                program.add_constraint(out, ConstraintOp::Le, instance.workstack()[day - 1] as f64);
            }
            let into: Vec<(usize, f64)> =
                pairs.iter().zip(&columns).filter(|(p, _)| p.work_day == day).map(|(_, &c)| (c, 1.0)).collect();
            if !into.is_empty() {
                program.add_constraint(into, ConstraintOp::Le, instance.spare(day) as f64);
            }
        }
        Self { program, pairs, columns, epigraph }
    }

    /// Adds the cut written in plan variables: the net load is the plan's
    /// pulls into a day minus pulls out of it, plus a constant that cancels.
    fn add_cut(&mut self, cut: &BendersCut, plan: &PullForwardPlan) {
        let mut row = vec![(self.epigraph, 1.0)];
        let mut rhs = cut.value;
        for (pair, &col) in self.pairs.iter().zip(&self.columns) {
            let coefficient = cut.slope[pair.work_day - 1] - cut.slope[pair.due_day - 1];
            if coefficient != 0.0 {
                row.push((col, -coefficient));
                rhs -= coefficient * plan.get(*pair) as f64;
            }
        }
        self.program.add_constraint(row, ConstraintOp::Ge, rhs);
    }

    fn solve(&self) -> Result<(PullForwardPlan, f64)> {
        let solution = mip_solve(&self.program, &MipOptions::default())?;
        if solution.status != MipStatus::Optimal {
            return Err(Error::Solver(format!("Benders master ended with status {:?}", solution.status)));
        }
        let plan = PullForwardPlan::from_entries(
            self.pairs.iter().zip(&self.columns).map(|(&p, &c)| (p, solution.x[c].round() as u32)),
        );
        Ok((plan, solution.objective))
    }
}

pub fn solve_benders(
    instance: &Instance,
    theta: &ParametricAmbiguitySet,
    options: &BendersOptions,
) -> Result<(SolveReport, BendersState)> {
    let clock = Instant::now();
    if theta.is_empty() {
        return Err(Error::EmptyAmbiguitySet);
    }
    if !(options.epsilon > 0.0) {
        return Err(Error::Domain(format!("Benders tolerance must be positive, got {}", options.epsilon)));
    }
    let space = IntakeSpace::new(instance.intake_max())?;
    if space.cardinality() > options.scenario_cap {
        return Err(Error::TooLarge {
            what: "Benders scenario set",
            size: space.cardinality() as u128,
            cap: options.scenario_cap as u128,
        });
    }
    let cache = LawCache::new(instance.intake_max());
    let scenarios = ScenarioSet::full(space);
    let mut weights = Vec::with_capacity(theta.len());
    for p in theta.members() {
        let law = cache.get(p)?;
        weights.push(scenarios.weights_under(&law));
    }
    let subproblem = Subproblem { instance, scenarios, weights, theta };
    let mut master = Master::new(instance);
    let mut state = BendersState {
        lower_bound: 0.0,
        upper_bound: f64::INFINITY,
        lower_history: Vec::new(),
        upper_history: Vec::new(),
        optimality_cuts: Vec::new(),
        feasibility_cuts: 0,
        rollover_duals: Vec::new(),
        member_duals: vec![0.0; theta.len()],
    };
    let mut seen: HashSet<PullForwardPlan> = HashSet::new();
    let mut incumbent: Option<(PullForwardPlan, NetLoad, usize)> = None;
    let mut trace = Vec::new();
    let mut stop = StopReason::IterationLimit;
    let mut calls = 0;

    for iteration in 1..=options.max_iterations {
        let (plan, lower) = master.solve()?;
        state.lower_bound = lower;
        state.lower_history.push(lower);
        if state.upper_bound - lower <= options.epsilon {
            stop = StopReason::BoundsClosed;
            break;
        }
        if !seen.insert(plan.clone()) {
            stop = StopReason::RepeatedPlan;
            break;
        }
        let net = instance.net_load(&plan);
        let residual = subproblem.solve(&net)?;
        calls += residual.values.len();
        let value = residual.values[residual.binding];
        if value < state.upper_bound {
            state.upper_bound = value;
            incumbent = Some((plan.clone(), net, residual.binding));
        }
        state.upper_history.push(state.upper_bound);
        for (k, v) in state.member_duals.iter_mut().enumerate() {
            *v = if k == residual.binding { 1.0 } else { 0.0 };
        }
        state.rollover_duals = residual.rollover_duals;
        trace.push(IterationRecord {
            iteration,
            plan: plan.clone(),
            master_value: lower,
            separation_value: state.upper_bound,
            separated: theta.members()[residual.binding].to_string(),
            pool_size: state.optimality_cuts.len(),
        });
        log::debug!("benders {iteration}: {plan} LB={lower} UB={}", state.upper_bound);
        master.add_cut(&residual.cut, &plan);
        state.optimality_cuts.push(residual.cut);
        if state.upper_bound - lower <= options.epsilon {
            stop = StopReason::BoundsClosed;
            break;
        }
    }

    let (plan, net, member) = incumbent.expect("at least one subproblem was solved");
    let worst = theta.members()[member].clone();
    let law = cache.get(&worst)?;
    let report = SolveReport {
        algorithm: Algorithm::Benders,
        plan,
        worst_case: WorstCase::Parameter(worst),
        objective: state.upper_bound,
        iterations: trace.len(),
        trace,
        pmf_tables: cache.constructions(),
        evaluator_calls: calls,
        converged: stop != StopReason::IterationLimit,
        stop_reason: stop,
        worst_case_rollover: expected_rollover(&net, &law),
        surrogate_objective: Some(state.lower_bound),
        wall_time_ms: elapsed_ms(clock),
    };
    Ok((report, state))
}
