//! Seeded instance generation.
//!
//! Every day has the same capacity. Days with spare capacity carry `c − D =
//! spare`, the rest `c − D = −deficit`, and the set of spare days is chosen
//! to hit a requested number of feasible pull-forward pairs. Maximum intakes
//! are then drawn so that a requested number of days exceed their spare
//! capacity, and scaled down when their total exceeds the total spare
//! capacity.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::SuiteConfig;
use super::instance_file::{AmbiguityFile, InstanceFile};
use crate::error::Result;
use crate::intake::{build_confidence_set, space_cardinality};
use crate::planning::Instance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceTags {
    pub horizon: usize,
    /// Feasible pull-forward pairs.
    pub pairs: usize,
    /// Days whose maximum intake exceeds their spare capacity.
    pub high_days: usize,
    pub intake_space: u64,
    pub ambiguity_size: usize,
    pub samples: u32,
    pub n_probs: u32,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub id: String,
    pub file: InstanceFile,
    pub instance: Instance,
    pub tags: InstanceTags,
}

impl GeneratedInstance {
    /// Wraps an instance document, recomputing its tags.
    pub fn from_file(id: String, file: InstanceFile) -> Result<Self> {
        let instance = file.instance()?;
        let margins: Vec<i64> = (1..=instance.horizon()).map(|d| instance.slack(d)).collect();
        let theta = file.confidence_set()?;
        let tags = InstanceTags {
            horizon: instance.horizon(),
            pairs: instance.pair_sets().feasible.len(),
            high_days: high_day_count(instance.intake_max(), &margins),
            intake_space: space_cardinality(instance.intake_max())?,
            ambiguity_size: theta.len(),
            samples: file.sample_count(),
            n_probs: file.ambiguity.n_probs,
        };
        Ok(Self { id, file, instance, tags })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub cell: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Generated {
    pub instances: Vec<GeneratedInstance>,
    pub skipped: Vec<SkippedCell>,
}

/// Pairs `(due, work)` within the window whose work day has spare capacity,
/// assuming every day has a positive workstack.
pub fn feasible_pair_count(spare: &[i64], window: usize) -> usize {
    let days = spare.len();
    (1..=days)
        .filter(|&work| spare[work - 1] > 0)
        .map(|work| (work + window).min(days) - work)
        .sum()
}

/// Days whose maximum intake exceeds `c − D`.
pub fn high_day_count(intake_max: &[u32], spare: &[i64]) -> usize {
    intake_max.iter().zip(spare).filter(|(&m, &s)| i64::from(m) > s).count()
}

/// One spare-day pattern per achievable target, the first in bitmask order
/// (bit `k` marks day `k + 1` as spare).
pub fn spare_patterns(horizon: usize, window: usize, targets: &[usize]) -> Vec<(usize, Option<Vec<bool>>)> {
    targets
        .iter()
        .map(|&target| {
            let found = (1u32..1 << horizon).find_map(|mask| {
                let spare: Vec<bool> = (0..horizon).map(|d| mask >> d & 1 == 1).collect();
                let signs: Vec<i64> = spare.iter().map(|&s| if s { 1 } else { -1 }).collect();
                (feasible_pair_count(&signs, window) == target).then_some(spare)
            });
            (target, found)
        })
        .collect()
}

/// Largest pair count, then two and four below it.
pub fn default_pair_targets(horizon: usize, window: usize) -> Vec<usize> {
    let most = feasible_pair_count(&vec![1; horizon], window);
    [most, most.saturating_sub(2), most.saturating_sub(4)].into_iter().filter(|&t| t > 0).collect()
}

fn cell_seed(seed: u64, parts: &[usize]) -> u64 {
    parts.iter().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |acc, &p| acc.rotate_left(17).wrapping_mul(0x100_0000_01b3) ^ p as u64)
}

/// Draws maximum intakes with `high` days above spare capacity.
fn draw_intake_max(rng: &mut ChaCha8Rng, spare_days: &[bool], spare: u32, high: usize) -> std::result::Result<Vec<u32>, String> {
    let forced = spare_days.iter().filter(|&&s| !s).count();
    if high < forced {
        return Err(format!("{forced} days lack spare capacity, so at least {forced} days are high"));
    }
    let mut candidates: Vec<usize> = (0..spare_days.len()).filter(|&d| spare_days[d]).collect();
    if high - forced > candidates.len() {
        return Err(format!("only {} spare days can be raised", candidates.len()));
    }
    candidates.shuffle(rng);
    let raised = &candidates[..high - forced];
    let mut intake_max: Vec<u32> = (0..spare_days.len())
        .map(|d| if raised.contains(&d) { spare + rng.gen_range(1..=2) } else { rng.gen_range(1..=spare) })
        .collect();
    let budget = spare as u64 * candidates.len() as u64;
    let total: u64 = intake_max.iter().map(|&m| m as u64).sum();
    if total > budget {
        for m in &mut intake_max {
            *m = (*m as u64 * budget / total) as u32;
        }
    }
    Ok(intake_max)
}

pub fn generate_instances(config: &SuiteConfig) -> Result<Generated> {
    config.validate()?;
    let mut out = Generated::default();
    for &horizon in &config.horizons {
        let targets =
            if config.pair_targets.is_empty() { default_pair_targets(horizon, config.window) } else { config.pair_targets.clone() };
        let mut seen_high = Vec::new();
        for &rule in &config.high_days {
            let high = rule.resolve(horizon);
            if seen_high.contains(&high) {
                continue;
            }
            seen_high.push(high);
            for (target, pattern) in spare_patterns(horizon, config.window, &targets) {
                let cell = format!("L{horizon}-F{target}-n{high}");
                let Some(spare_days) = pattern else {
                    out.skipped.push(SkippedCell { cell, reason: format!("no spare pattern gives {target} pairs") });
                    continue;
                };
                let margins: Vec<i64> = spare_days
                    .iter()
                    .map(|&s| if s { config.spare as i64 } else { -(config.deficit as i64) })
                    .collect();
                let capacity = vec![config.capacity; horizon];
                let workstack: Vec<u32> = margins.iter().map(|&m| (config.capacity as i64 - m) as u32).collect();
                for rep in 0..config.replicates {
                    let cell = format!("{cell}-r{rep}");
                    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(config.seed, &[horizon, target, high, rep]));
                    let intake_max = match draw_intake_max(&mut rng, &spare_days, config.spare, high) {
                        Ok(m) => m,
                        Err(reason) => {
                            log::info!("skipping {cell}: {reason}");
                            out.skipped.push(SkippedCell { cell, reason });
                            continue;
                        }
                    };
                    let tagged = high_day_count(&intake_max, &margins);
                    if tagged != high {
                        let reason = format!("capping total intake left {tagged} high days instead of {high}");
                        log::info!("skipping {cell}: {reason}");
                        out.skipped.push(SkippedCell { cell, reason });
                        continue;
                    }
                    let intake_space = space_cardinality(&intake_max)?;
                    if intake_space > config.max_intake_space as u64 {
                        let reason = format!("intake space {intake_space} above {}", config.max_intake_space);
                        out.skipped.push(SkippedCell { cell, reason });
                        continue;
                    }
                    let instance =
                        Instance::new(config.window, capacity.clone(), workstack.clone(), vec![1.0; horizon], intake_max.clone())?;
                    let pairs = instance.pair_sets().feasible.len();
                    for &samples in &config.samples {
                        for &n_probs in &config.n_probs {
                            let id = format!("{cell}-N{samples}-g{n_probs}");
                            let estimate = vec![config.estimate; horizon];
                            let theta = build_confidence_set(&estimate, samples, &intake_max, config.alpha, n_probs)?;
                            if theta.len() > config.max_ambiguity_size {
                                let reason = format!("ambiguity set {} above {}", theta.len(), config.max_ambiguity_size);
                                out.skipped.push(SkippedCell { cell: id, reason });
                                continue;
                            }
                            let ambiguity = AmbiguityFile {
                                samples,
                                alpha: config.alpha,
                                n_probs,
                                p_hat: Some(estimate),
                                observations: None,
                            };
                            out.instances.push(GeneratedInstance {
                                id,
                                file: InstanceFile::from_instance(&instance, ambiguity),
                                instance: instance.clone(),
                                tags: InstanceTags {
                                    horizon,
                                    pairs,
                                    high_days: tagged,
                                    intake_space,
                                    ambiguity_size: theta.len(),
                                    samples,
                                    n_probs,
                                },
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::HighDayTarget;

    #[test]
    fn pair_counts_of_published_patterns() {
        assert_eq!(feasible_pair_count(&[8, -15, -15, 8, -15], 2), 3);
        assert_eq!(feasible_pair_count(&[8, -15, 8, 8, 8], 2), 5);
        assert_eq!(feasible_pair_count(&[8, 8, 8, 8, 8], 2), 7);
        assert_eq!(default_pair_targets(5, 2), vec![7, 5, 3]);
    }

    #[test]
    fn first_pattern_for_three_pairs() {
        let found = spare_patterns(5, 2, &[3, 8]);
        assert_eq!(found[0].1.as_deref(), Some(&[true, false, false, true, false][..]));
        assert_eq!(found[1].1, None);
    }

    #[test]
    fn high_days_tagging() {
        assert_eq!(high_day_count(&[9, 1, 1, 1, 1], &[8, 8, 8, 8, 8]), 1);
        assert_eq!(high_day_count(&[0, 0, 0], &[8, -15, -15]), 2);
    }

    #[test]
    fn generation_is_deterministic_and_respects_the_budget() {
        let config = SuiteConfig { replicates: 3, ..SuiteConfig::desk() };
        let a = generate_instances(&config).unwrap();
        let b = generate_instances(&config).unwrap();
        assert!(!a.instances.is_empty());
        assert_eq!(a.instances.len(), b.instances.len());
        for (x, y) in a.instances.iter().zip(&b.instances) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.file, y.file);
            let inst = &x.instance;
            let budget: i64 = (1..=inst.horizon()).map(|d| inst.slack(d).max(0)).sum();
            let total: i64 = inst.intake_max().iter().map(|&m| m as i64).sum();
            assert!(total <= budget, "{}", x.id);
            let margins: Vec<i64> = (1..=inst.horizon()).map(|d| inst.slack(d)).collect();
            assert_eq!(high_day_count(inst.intake_max(), &margins), x.tags.high_days);
            assert_eq!(feasible_pair_count(&margins, inst.window()), x.tags.pairs);
            assert!(x.tags.intake_space <= 5000 && x.tags.ambiguity_size <= 500);
        }
    }

    #[test]
    fn impossible_targets_are_skipped() {
        let config = SuiteConfig {
            horizons: vec![5],
            pair_targets: vec![3],
            high_days: vec![HighDayTarget::One],
            ..SuiteConfig::desk()
        };
        let out = generate_instances(&config).unwrap();
        assert!(out.instances.is_empty());
        assert!(!out.skipped.is_empty());
    }
}
