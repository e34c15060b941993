//! Deterministic planning model: instances, pull-forward plans, and the
//! rollover recursion for one fixed intake realisation.
//!
//! Days are 1-based wherever they appear in a public type ([`DayPair`],
//! [`Violation`]); plain vectors are indexed by `day - 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A job due on `due_day` worked on the earlier `work_day`.
///
/// Field order makes the derived ordering "work day first, then due day",
/// which is the component order used for plan enumeration and tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DayPair {
    pub work_day: usize,
    pub due_day: usize,
}

impl DayPair {
    pub fn new(due_day: usize, work_day: usize) -> Self {
        Self { work_day, due_day }
    }
}

impl fmt::Display for DayPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.due_day, self.work_day)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    horizon: usize,
    window: usize,
    capacity: Vec<u32>,
    workstack: Vec<u32>,
    rollover_cost: Vec<f64>,
    intake_max: Vec<u32>,
}

impl Instance {
    pub fn new(
        window: usize,
        capacity: Vec<u32>,
        workstack: Vec<u32>,
        rollover_cost: Vec<f64>,
        intake_max: Vec<u32>,
    ) -> Result<Self> {
        let horizon = capacity.len();
        if horizon < 2 {
            return Err(Error::InvalidInstance(format!("horizon {horizon} is below 2")));
        }
        for (what, got) in [
            ("workstack", workstack.len()),
            ("rollover_cost", rollover_cost.len()),
            ("intake_max", intake_max.len()),
        ] {
            if got != horizon {
                return Err(Error::LengthMismatch { what, expected: horizon, got });
            }
        }
        if window < 1 || window > horizon - 1 {
            return Err(Error::InvalidInstance(format!(
                "window {window} must lie in [1, {}]",
                horizon - 1
            )));
        }
        if let Some(day) = rollover_cost.iter().position(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidInstance(format!(
                "rollover cost on day {} must be finite and non-negative",
                day + 1
            )));
        }
        Ok(Self { horizon, window, capacity, workstack, rollover_cost, intake_max })
    }

    /// Unit rollover costs.
    pub fn with_unit_costs(
        window: usize,
        capacity: Vec<u32>,
        workstack: Vec<u32>,
        intake_max: Vec<u32>,
    ) -> Result<Self> {
        let costs = vec![1.0; capacity.len()];
        Self::new(window, capacity, workstack, costs, intake_max)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn capacity(&self) -> &[u32] {
        &self.capacity
    }

    pub fn workstack(&self) -> &[u32] {
        &self.workstack
    }

    pub fn rollover_cost(&self) -> &[f64] {
        &self.rollover_cost
    }

    pub fn intake_max(&self) -> &[u32] {
        &self.intake_max
    }

    /// Capacity minus workstack on `day` (1-based); negative on deficit days.
    pub fn slack(&self, day: usize) -> i64 {
        self.capacity[day - 1] as i64 - self.workstack[day - 1] as i64
    }

    /// Capacity left over for pulled-forward work on `day` (1-based).
    pub fn spare(&self, day: usize) -> u32 {
        self.slack(day).max(0) as u32
    }

    pub fn contains_pair(&self, pair: DayPair) -> bool {
        pair.due_day >= 2
            && pair.due_day <= self.horizon
            && pair.work_day < pair.due_day
            && pair.work_day + self.window >= pair.due_day
            && pair.work_day >= 1
    }

    pub fn pair_sets(&self) -> PairSets {
        let mut all = Vec::new();
        for work_day in 1..self.horizon {
            for due_day in work_day + 1..=(work_day + self.window).min(self.horizon) {
                all.push(DayPair { work_day, due_day });
            }
        }
        let feasible = all
            .iter()
            .copied()
            .filter(|p| self.spare(p.work_day) > 0 && self.workstack[p.due_day - 1] > 0)
            .collect();
        PairSets { all, feasible }
    }

    fn check_pairs(&self, plan: &PullForwardPlan) -> Result<()> {
        match plan.iter().find(|(pair, _)| !self.contains_pair(*pair)) {
            Some((pair, _)) => {
                Err(Error::PairOutOfWindow { due_day: pair.due_day, work_day: pair.work_day })
            }
            None => Ok(()),
        }
    }

    pub fn validate_plan(&self, plan: &PullForwardPlan) -> Result<PlanVerdict> {
        self.check_pairs(plan)?;
        let mut pulled_out = vec![0u64; self.horizon];
        let mut pulled_in = vec![0u64; self.horizon];
        for (pair, amount) in plan.iter() {
            pulled_out[pair.due_day - 1] += amount as u64;
            pulled_in[pair.work_day - 1] += amount as u64;
        }
        let mut violations = Vec::new();
        for day in 1..=self.horizon {
            let total = pulled_out[day - 1];
            let limit = self.workstack[day - 1] as u64;
            if total > limit {
                violations.push(Violation { day, family: ConstraintFamily::Workstack, total, limit });
            }
        }
        for day in 1..=self.horizon {
            let total = pulled_in[day - 1];
            let limit = self.spare(day) as u64;
            if total > limit {
                violations.push(Violation {
                    day,
                    family: ConstraintFamily::SpareCapacity,
                    total,
                    limit,
                });
            }
        }
        Ok(PlanVerdict { violations })
    }

    /// Per-day net load `pulls_into − pulls_out_of − (c − D)` of a plan.
    ///
    /// The plan's pairs are assumed to lie inside the window.
    pub fn net_load(&self, plan: &PullForwardPlan) -> NetLoad {
        let mut load: Vec<i64> = (1..=self.horizon).map(|d| -self.slack(d)).collect();
        for (pair, amount) in plan.iter() {
            load[pair.work_day - 1] += amount as i64;
            load[pair.due_day - 1] -= amount as i64;
        }
        NetLoad(load)
    }

    pub fn check_intake(&self, intake: &[u32]) -> Result<()> {
        if intake.len() != self.horizon {
            return Err(Error::LengthMismatch {
                what: "intake",
                expected: self.horizon,
                got: intake.len(),
            });
        }
        for (day, (&value, &max)) in intake.iter().zip(&self.intake_max).enumerate() {
            if value > max {
                return Err(Error::IntakeOutOfRange { day: day + 1, value, max });
            }
        }
        Ok(())
    }

    /// Minimal rollover satisfying the carry-over inequalities for one
    /// intake realisation.
    pub fn rollover_trajectory(
        &self,
        plan: &PullForwardPlan,
        intake: &[u32],
    ) -> Result<RolloverTrajectory> {
        self.check_pairs(plan)?;
        self.check_intake(intake)?;
        let net = self.net_load(plan);
        let mut rollover = Vec::with_capacity(self.horizon);
        let mut carried = 0i64;
        for (&load, &arrivals) in net.as_slice().iter().zip(intake) {
            carried = (carried + arrivals as i64 + load).max(0);
            rollover.push(carried as f64);
        }
        let total_cost = rollover.iter().zip(&self.rollover_cost).map(|(r, a)| r * a).sum();
        Ok(RolloverTrajectory { rollover, total_cost })
    }

    /// Rollover at the largest possible intake: a per-day support bound.
    pub fn rollover_bound(&self, net: &NetLoad) -> Vec<i64> {
        let mut carried = 0i64;
        net.as_slice()
            .iter()
            .zip(&self.intake_max)
            .map(|(&load, &max)| {
                carried = (carried + max as i64 + load).max(0);
                carried
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSets {
    /// Every pair in the window, in component order.
    pub all: Vec<DayPair>,
    /// Pairs whose pull-forward amount can be positive.
    pub feasible: Vec<DayPair>,
}

/// Net daily load: jobs pulled into the day, minus jobs pulled out of it,
/// minus the day's slack. Costs depend on a plan only through this vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetLoad(pub Vec<i64>);

impl NetLoad {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Total rollover cost of a net load under one intake vector.
pub(crate) fn rollover_cost_at(net: &[i64], intake: &[u32], cost: &[f64]) -> f64 {
    let mut carried = 0i64;
    let mut total = 0.0;
    for ((&load, &arrivals), &a) in net.iter().zip(intake).zip(cost) {
        carried = (carried + arrivals as i64 + load).max(0);
        total += a * carried as f64;
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloverTrajectory {
    pub rollover: Vec<f64>,
    pub total_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintFamily {
    /// Pulled-forward jobs exceed the due day's workstack.
    Workstack,
    /// Pulled-forward work exceeds the work day's spare capacity.
    SpareCapacity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub day: usize,
    pub family: ConstraintFamily,
    pub total: u64,
    pub limit: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanVerdict {
    pub violations: Vec<Violation>,
}

impl PlanVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sparse pull-forward plan; absent pairs are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PullForwardPlan {
    amounts: BTreeMap<DayPair, u32>,
}

impl PullForwardPlan {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (DayPair, u32)>>(entries: I) -> Self {
        let mut plan = Self::zero();
        for (pair, amount) in entries {
            plan.set(pair, amount);
        }
        plan
    }

    pub fn get(&self, pair: DayPair) -> u32 {
        self.amounts.get(&pair).copied().unwrap_or(0)
    }

    pub fn set(&mut self, pair: DayPair, amount: u32) {
        if amount == 0 {
            self.amounts.remove(&pair);
        } else {
            self.amounts.insert(pair, amount);
        }
    }

    /// Non-zero entries in component order.
    pub fn iter(&self) -> impl Iterator<Item = (DayPair, u32)> + '_ {
        self.amounts.iter().map(|(p, a)| (*p, *a))
    }

    pub fn is_zero(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.amounts.values().map(|&a| a as u64).sum()
    }
}

impl fmt::Display for PullForwardPlan {
    /// `y[2,1]=9;y[3,1]=2`, or `0` for the empty plan.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (pair, amount)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            write!(f, "y{pair}={amount}")?;
        }
        Ok(())
    }
}

impl FromStr for PullForwardPlan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut plan = Self::zero();
        if s == "0" || s.is_empty() {
            return Ok(plan);
        }
        let bad = || Error::Domain(format!("cannot parse plan {s:?}"));
        for entry in s.split(';') {
            let (key, value) = entry.split_once('=').ok_or_else(bad)?;
            let inner = key.trim().strip_prefix("y[").and_then(|k| k.strip_suffix(']')).ok_or_else(bad)?;
            let (due, work) = inner.split_once(',').ok_or_else(bad)?;
            let due_day = due.trim().parse().map_err(|_| bad())?;
            let work_day = work.trim().parse().map_err(|_| bad())?;
            let amount = value.trim().parse().map_err(|_| bad())?;
            plan.set(DayPair { work_day, due_day }, amount);
        }
        Ok(plan)
    }
}

impl Serialize for PullForwardPlan {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PullForwardPlan {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_day() -> Instance {
        Instance::with_unit_costs(1, vec![30, 10], vec![5, 20], vec![20, 20]).unwrap()
    }

    fn single(amount: u32) -> PullForwardPlan {
        PullForwardPlan::from_entries([(DayPair::new(2, 1), amount)])
    }

    #[test]
    fn zero_plan_is_feasible() {
        assert!(two_day().validate_plan(&PullForwardPlan::zero()).unwrap().is_ok());
    }

    #[test]
    fn nine_pulled_forward_is_feasible() {
        assert!(two_day().validate_plan(&single(9)).unwrap().is_ok());
    }

    #[test]
    fn exceeding_spare_capacity_is_flagged() {
        let verdict = two_day().validate_plan(&single(26)).unwrap();
        // 26 also exceeds the day-2 workstack of 20.
        assert_eq!(
            verdict.violations,
            vec![
                Violation { day: 2, family: ConstraintFamily::Workstack, total: 26, limit: 20 },
                Violation { day: 1, family: ConstraintFamily::SpareCapacity, total: 26, limit: 25 },
            ]
        );
    }

    #[test]
    fn pair_outside_window_is_structural() {
        let inst = two_day();
        let plan = PullForwardPlan::from_entries([(DayPair::new(1, 2), 1)]);
        assert!(matches!(inst.validate_plan(&plan), Err(Error::PairOutOfWindow { .. })));
    }

    #[test]
    fn rollover_examples() {
        let inst = two_day();
        let t = inst.rollover_trajectory(&single(9), &[20, 20]).unwrap();
        assert_eq!(t.rollover, vec![4.0, 25.0]);
        assert_eq!(t.total_cost, 29.0);
        let t = inst.rollover_trajectory(&single(5), &[20, 20]).unwrap();
        assert_eq!(t.rollover, vec![0.0, 25.0]);
        assert_eq!(t.total_cost, 25.0);
    }

    #[test]
    fn idle_instance_has_no_rollover() {
        let inst = Instance::with_unit_costs(2, vec![5, 5, 5], vec![5, 3, 0], vec![4, 4, 4]).unwrap();
        let t = inst.rollover_trajectory(&PullForwardPlan::zero(), &[0, 0, 0]).unwrap();
        assert_eq!(t.total_cost, 0.0);
    }

    #[test]
    fn intake_above_max_is_rejected() {
        assert!(matches!(
            two_day().rollover_trajectory(&single(1), &[21, 0]),
            Err(Error::IntakeOutOfRange { day: 1, .. })
        ));
    }

    #[test]
    fn feasible_pairs_follow_slack_pattern() {
        let cap = vec![30; 5];
        let work = |slack: [i64; 5]| slack.iter().map(|s| (30 - s) as u32).collect::<Vec<_>>();
        let inst = Instance::with_unit_costs(2, cap.clone(), work([8, -15, -15, 8, -15]), vec![1; 5]).unwrap();
        let feasible = inst.pair_sets().feasible;
        let expected: Vec<DayPair> =
            [(2, 1), (3, 1), (5, 4)].iter().map(|&(d, w)| DayPair::new(d, w)).collect();
        assert_eq!(feasible, expected);

        let inst = Instance::with_unit_costs(2, cap, work([8; 5]), vec![1; 5]).unwrap();
        assert_eq!(inst.pair_sets().feasible.len(), 7);

        assert_eq!(two_day().pair_sets().all, vec![DayPair::new(2, 1)]);
    }

    #[test]
    fn plan_text_round_trip() {
        let plan = PullForwardPlan::from_entries([(DayPair::new(3, 1), 2), (DayPair::new(2, 1), 9)]);
        let text = plan.to_string();
        assert_eq!(text, "y[2,1]=9;y[3,1]=2");
        assert_eq!(text.parse::<PullForwardPlan>().unwrap(), plan);
        assert_eq!(PullForwardPlan::zero().to_string(), "0");
        assert!("0".parse::<PullForwardPlan>().unwrap().is_zero());
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::with_unit_costs(1, vec![1], vec![1], vec![1]).is_err());
        assert!(Instance::with_unit_costs(2, vec![1, 1], vec![1, 1], vec![1, 1]).is_err());
        assert!(Instance::with_unit_costs(1, vec![1, 1], vec![1], vec![1, 1]).is_err());
        assert!(Instance::new(1, vec![1, 1], vec![1, 1], vec![1.0, f64::NAN], vec![1, 1]).is_err());
    }
}
