use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::planning::{DayPair, Instance, NetLoad, PullForwardPlan};

/// Default cap on feasible integer plans visited while building the lattice.
pub const DEFAULT_LATTICE_CAP: u64 = 50_000_000;

/// Every feasible plan, grouped by the net load it induces.
///
/// Candidates are stored in lexicographic order of their representative
/// plan, which is the smallest plan (in component order) with that load.
#[derive(Debug, Clone)]
pub struct PlanLattice {
    pairs: Vec<DayPair>,
    /// Row-major representative amounts, one row per candidate.
    amounts: Vec<u32>,
    /// Row-major net loads.
    loads: Vec<i64>,
    days: usize,
    visited: u64,
}

impl PlanLattice {
    pub fn new(instance: &Instance, cap: u64) -> Result<Self> {
        let pairs = instance.pair_sets().feasible;
        let days = instance.horizon();
        let mut spare_left: Vec<u32> = (1..=days).map(|d| instance.spare(d)).collect();
        let mut demand_left: Vec<u32> = instance.workstack().to_vec();
        let mut net = instance.net_load(&PullForwardPlan::zero()).0;
        let mut lattice = Self { pairs, amounts: Vec::new(), loads: Vec::new(), days, visited: 0 };
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut current = vec![0u32; lattice.pairs.len()];
        lattice.descend(0, &mut current, &mut spare_left, &mut demand_left, &mut net, &mut seen, cap)?;
        Ok(lattice)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        depth: usize,
        current: &mut Vec<u32>,
        spare_left: &mut [u32],
        demand_left: &mut [u32],
        net: &mut [i64],
        seen: &mut HashSet<Vec<i64>>,
        cap: u64,
    ) -> Result<()> {
        if depth == self.pairs.len() {
            self.visited += 1;
            if self.visited > cap {
                return Err(Error::TooLarge { what: "plan lattice", size: self.visited as u128, cap: cap as u128 });
            }
            if seen.insert(net.to_vec()) {
                self.amounts.extend_from_slice(current);
                self.loads.extend_from_slice(net);
            }
            return Ok(());
        }
        let pair = self.pairs[depth];
        let (w, d) = (pair.work_day - 1, pair.due_day - 1);
        let top = spare_left[w].min(demand_left[d]);
        for amount in 0..=top {
            current[depth] = amount;
            spare_left[w] -= amount;
            demand_left[d] -= amount;
            net[w] += amount as i64;
            net[d] -= amount as i64;
            let outcome = self.descend(depth + 1, current, spare_left, demand_left, net, seen, cap);
            spare_left[w] += amount;
            demand_left[d] += amount;
            net[w] -= amount as i64;
            net[d] += amount as i64;
            outcome?;
        }
        current[depth] = 0;
        Ok(())
    }

    pub fn pairs(&self) -> &[DayPair] {
        &self.pairs
    }

    /// Number of distinct net loads.
    pub fn len(&self) -> usize {
        if self.pairs.is_empty() {
            1
        } else {
            self.amounts.len() / self.pairs.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of feasible integer plans enumerated.
    pub fn plans_visited(&self) -> u64 {
        self.visited
    }

    pub fn load(&self, candidate: usize) -> &[i64] {
        &self.loads[candidate * self.days..(candidate + 1) * self.days]
    }

    pub fn net_load(&self, candidate: usize) -> NetLoad {
        NetLoad(self.load(candidate).to_vec())
    }

    pub fn plan(&self, candidate: usize) -> PullForwardPlan {
        let width = self.pairs.len();
        if width == 0 {
            return PullForwardPlan::zero();
        }
        let row = &self.amounts[candidate * width..(candidate + 1) * width];
        PullForwardPlan::from_entries(self.pairs.iter().copied().zip(row.iter().copied()))
    }
}
