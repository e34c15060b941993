use serde::{Deserialize, Serialize};

use super::special::chi_square_quantile;
use super::SuccessProbs;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetKind {
    BaseGrid,
    Confidence,
    Extreme,
    Explicit,
}

/// Inputs of the approximate confidence set around an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceSpec {
    pub estimate: Vec<f64>,
    pub samples: u32,
    pub alpha: f64,
    pub n_probs: u32,
}

/// A finite, sorted, duplicate-free collection of success-probability vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricAmbiguitySet {
    members: Vec<SuccessProbs>,
    kind: SetKind,
    spec: Option<ConfidenceSpec>,
}

impl ParametricAmbiguitySet {
    pub fn from_members(members: Vec<SuccessProbs>) -> Result<Self> {
        Self::assemble(members, SetKind::Explicit, None)
    }

    fn assemble(mut members: Vec<SuccessProbs>, kind: SetKind, spec: Option<ConfidenceSpec>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyAmbiguitySet);
        }
        let days = members[0].len();
        for m in &members {
            if m.len() != days {
                return Err(Error::LengthMismatch { what: "ambiguity member", expected: days, got: m.len() });
            }
            if m.as_slice().iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Domain(format!("member {m} has a coordinate outside [0, 1]")));
            }
        }
        members.sort();
        members.dedup();
        Ok(Self { members, kind, spec })
    }

    pub fn members(&self) -> &[SuccessProbs] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn spec(&self) -> Option<&ConfidenceSpec> {
        self.spec.as_ref()
    }

    pub fn days(&self) -> usize {
        self.members[0].len()
    }

    pub fn contains(&self, probs: &SuccessProbs) -> bool {
        self.members.binary_search(probs).is_ok()
    }
}

/// The grid `{0, 1/n, …, 1}^L`, enumerated lazily in lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseGrid {
    pub n_probs: u32,
    pub days: usize,
}

impl BaseGrid {
    pub fn new(n_probs: u32, days: usize) -> Result<Self> {
        if n_probs == 0 {
            return Err(Error::Domain("grid fineness must be at least 1".into()));
        }
        Ok(Self { n_probs, days })
    }

    pub fn point(&self, step: u32) -> f64 {
        step as f64 / self.n_probs as f64
    }

    /// Number of grid points, if it fits in `u128`.
    pub fn len(&self) -> Option<u128> {
        (self.n_probs as u128 + 1).checked_pow(self.days as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = SuccessProbs> + '_ {
        let mut steps = Some(vec![0u32; self.days]);
        std::iter::from_fn(move || {
            let current = steps.take()?;
            let point = SuccessProbs(current.iter().map(|&s| self.point(s)).collect());
            let mut next = current;
            for day in (0..next.len()).rev() {
                if next[day] < self.n_probs {
                    next[day] += 1;
                    steps = Some(next);
                    return Some(point);
                }
                next[day] = 0;
            }
            Some(point)
        })
    }

    pub fn materialize(&self, cap: usize) -> Result<ParametricAmbiguitySet> {
        let size = self.len().unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::TooLarge { what: "base grid", size, cap: cap as u128 });
        }
        ParametricAmbiguitySet::assemble(self.iter().collect(), SetKind::BaseGrid, None)
    }
}

impl ConfidenceSpec {
    /// Weighted squared-distance terms of one day, for every grid step.
    fn day_terms(&self, day: usize, intake_max: u32) -> Vec<f64> {
        let p_hat = self.estimate[day];
        let weight = self.samples as f64 * intake_max as f64;
        let denom = p_hat * (1.0 - p_hat);
        (0..=self.n_probs)
            .map(|j| {
                let d = p_hat - j as f64 / self.n_probs as f64;
                weight * (d * d) / denom
            })
            .collect()
    }

    pub fn threshold(&self) -> Result<f64> {
        chi_square_quantile(self.estimate.len() as u32, 1.0 - self.alpha)
    }

    /// Grid points whose weighted distance to the estimate is within the
    /// chi-square threshold, by depth-first search with the remaining budget.
    pub fn build(&self, intake_max: &[u32]) -> Result<ParametricAmbiguitySet> {
        let days = self.estimate.len();
        if intake_max.len() != days {
            return Err(Error::LengthMismatch { what: "intake_max", expected: days, got: intake_max.len() });
        }
        if self.samples == 0 {
            return Err(Error::Domain("confidence set needs at least one sample".into()));
        }
        if self.n_probs == 0 {
            return Err(Error::Domain("grid fineness must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        for (day, &p) in self.estimate.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::BoundaryEstimate { day: day + 1, value: p });
            }
        }
        let threshold = self.threshold()?;
        let grid = BaseGrid::new(self.n_probs, days)?;
        // Per-day candidate steps, already pruned by the single-day term.
        let candidates: Vec<Vec<(u32, f64)>> = (0..days)
            .map(|day| {
                self.day_terms(day, intake_max[day])
                    .into_iter()
                    .enumerate()
                    .filter(|(_, t)| *t <= threshold)
                    .map(|(j, t)| (j as u32, t))
                    .collect()
            })
            .collect();

        let mut members = Vec::new();
        let mut steps = Vec::with_capacity(days);
        collect_within(&candidates, threshold, 0.0, &mut steps, &mut |steps| {
            members.push(SuccessProbs(steps.iter().map(|&s| grid.point(s)).collect()));
        });
        if members.is_empty() {
            // Radius too small to reach any grid point: keep the grid points
            // closest to the estimate instead of returning an empty set.
            members = self.nearest_points(intake_max, &grid);
        }
        ParametricAmbiguitySet::assemble(members, SetKind::Confidence, Some(self.clone()))
    }

    /// Grid points minimising the weighted distance; the distance is
    /// separable, so this is the product of per-day minimisers.
    fn nearest_points(&self, intake_max: &[u32], grid: &BaseGrid) -> Vec<SuccessProbs> {
        let mut points = vec![Vec::new()];
        for (day, &max) in intake_max.iter().enumerate() {
            let terms = self.day_terms(day, max);
            let best = terms.iter().copied().fold(f64::INFINITY, f64::min);
            let steps: Vec<u32> = (0..=self.n_probs)
                .filter(|&j| terms[j as usize] <= best + 1e-12 * best.max(1.0))
                .collect();
            points = points
                .into_iter()
                .flat_map(|prefix: Vec<f64>| {
                    steps.iter().map(move |&j| {
                        let mut next = prefix.clone();
                        next.push(grid.point(j));
                        next
                    })
                })
                .collect();
        }
        points.into_iter().map(SuccessProbs).collect()
    }
}

fn collect_within<F: FnMut(&[u32])>(
    candidates: &[Vec<(u32, f64)>],
    threshold: f64,
    partial: f64,
    steps: &mut Vec<u32>,
    emit: &mut F,
) {
    let day = steps.len();
    if day == candidates.len() {
        emit(steps);
        return;
    }
    for &(step, term) in &candidates[day] {
        let total = partial + term;
        if total <= threshold {
            steps.push(step);
            collect_within(candidates, threshold, total, steps, emit);
            steps.pop();
        }
    }
}

pub fn build_confidence_set(
    estimate: &[f64],
    samples: u32,
    intake_max: &[u32],
    alpha: f64,
    n_probs: u32,
) -> Result<ParametricAmbiguitySet> {
    ConfidenceSpec { estimate: estimate.to_vec(), samples, alpha, n_probs }.build(intake_max)
}

/// Members that maximise some coordinate and, among those, the coordinate sum.
pub fn build_extreme_set(theta: &ParametricAmbiguitySet) -> ParametricAmbiguitySet {
    let members = theta.members();
    let mut extreme = Vec::new();
    for day in 0..theta.days() {
        let top = members.iter().map(|m| m.0[day]).fold(f64::NEG_INFINITY, f64::max);
        let at_top: Vec<&SuccessProbs> = members.iter().filter(|m| m.0[day] == top).collect();
        let sums: Vec<f64> = at_top.iter().map(|m| m.0.iter().sum()).collect();
        let best = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        extreme.extend(
            at_top
                .into_iter()
                .zip(&sums)
                .filter(|(_, &s)| s >= best - 1e-9)
                .map(|(m, _)| m.clone()),
        );
    }
    ParametricAmbiguitySet::assemble(extreme, SetKind::Extreme, theta.spec.clone())
        .expect("extreme subset of a non-empty set is non-empty")
}
