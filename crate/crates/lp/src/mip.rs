use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::model::{LinearProgram, Sense};
use crate::simplex::{LpSolution, LpStatus};
use crate::{LpEngine, LpError, RevisedSimplex};

#[derive(Debug, Clone)]
pub struct MipOptions {
    pub node_limit: usize,
    pub integrality_tol: f64,
    /// Absolute pruning slack; nodes whose bound is within this of the
    /// incumbent are discarded.
    pub prune_tol: f64,
}

impl Default for MipOptions {
    fn default() -> Self {
        Self { node_limit: 200_000, integrality_tol: 1e-6, prune_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node budget exhausted; `x` holds the incumbent if one was found.
    NodeLimit,
}

#[derive(Debug, Clone)]
pub struct MipSolution {
    pub status: MipStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Best remaining relaxation bound (equals `objective` when optimal).
    pub bound: f64,
    pub nodes: usize,
}

pub fn mip_solve(lp: &LinearProgram, options: &MipOptions) -> Result<MipSolution, LpError> {
    mip_solve_with(&RevisedSimplex, lp, options)
}

struct Node {
    /// Relaxation objective in minimisation form.
    key: f64,
    seq: usize,
    bounds: Vec<(f64, f64)>,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap on "better": smaller key first, then older node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Best-bound branch-and-bound over the integer columns of `lp`.
pub fn mip_solve_with<E: LpEngine>(
    engine: &E,
    lp: &LinearProgram,
    options: &MipOptions,
) -> Result<MipSolution, LpError> {
    lp.validate()?;
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let integer_cols: Vec<usize> = (0..lp.num_variables()).filter(|&j| lp.integer[j]).collect();
    let root_bounds: Vec<(f64, f64)> = integer_cols
        .iter()
        .map(|&j| (lp.lower[j].ceil(), lp.upper[j].floor()))
        .collect();

    let mut work = lp.clone();
    let mut solve_node = |bounds: &[(f64, f64)]| -> Result<Option<LpSolution>, LpError> {
        for (&j, &(lo, hi)) in integer_cols.iter().zip(bounds) {
            if lo > hi {
                return Ok(None);
            }
            work.set_bounds(j, lo, hi);
        }
        let sol = engine.solve(&work)?;
        match sol.status {
            LpStatus::Optimal | LpStatus::Unbounded => Ok(Some(sol)),
            LpStatus::Infeasible => Ok(None),
            LpStatus::Stalled => Err(LpError::Stalled { pivots: sol.pivots }),
        }
    };

    let mut nodes = 0usize;
    let mut seq = 0usize;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut heap = BinaryHeap::new();

    let Some(root) = solve_node(&root_bounds)? else {
        return Ok(MipSolution {
            status: MipStatus::Infeasible,
            x: Vec::new(),
            objective: f64::NAN,
            bound: f64::NAN,
            nodes: 1,
        });
    };
    nodes += 1;
    if root.status == LpStatus::Unbounded {
        return Ok(MipSolution {
            status: MipStatus::Unbounded,
            x: Vec::new(),
            objective: f64::NAN,
            bound: f64::NEG_INFINITY,
            nodes,
        });
    }
    let mut pending = vec![(root_bounds, root)];

    loop {
        for (bounds, sol) in pending.drain(..) {
            let key = sign * sol.objective;
            if let Some((best, _)) = &incumbent {
                if key >= best - options.prune_tol * best.abs().max(1.0) {
                    continue;
                }
            }
            match most_fractional(&sol.x, &integer_cols, options.integrality_tol) {
                None => {
                    let mut x = sol.x;
                    for &j in &integer_cols {
                        x[j] = x[j].round();
                    }
                    incumbent = Some((key, x));
                }
                Some(_) => {
                    heap.push(Node { key, seq, bounds, x: sol.x });
                    seq += 1;
                }
            }
        }

        let Some(node) = heap.pop() else { break };
        if let Some((best, _)) = &incumbent {
            if node.key >= best - options.prune_tol * best.abs().max(1.0) {
                continue;
            }
        }
        if nodes >= options.node_limit {
            heap.push(node);
            break;
        }
        let Some(k) = most_fractional(&node.x, &integer_cols, options.integrality_tol) else {
            continue;
        };
        let value = node.x[integer_cols[k]];
        let mut down = node.bounds.clone();
        down[k].1 = value.floor();
        let mut up = node.bounds;
        up[k].0 = value.ceil();
        for child in [down, up] {
            if let Some(child_sol) = solve_node(&child)? {
                nodes += 1;
                pending.push((child, child_sol));
            }
        }
    }

    let open_bound = heap.iter().map(|n| n.key).fold(f64::INFINITY, f64::min);
    let status = if heap.is_empty() {
        if incumbent.is_some() {
            MipStatus::Optimal
        } else {
            MipStatus::Infeasible
        }
    } else {
        MipStatus::NodeLimit
    };
    Ok(match incumbent {
        Some((key, x)) => MipSolution {
            status,
            objective: lp.evaluate(&x),
            x,
            bound: sign * open_bound.min(key),
            nodes,
        },
        None => MipSolution {
            status,
            x: Vec::new(),
            objective: f64::NAN,
            bound: sign * open_bound,
            nodes,
        },
    })
}

fn most_fractional(x: &[f64], integer_cols: &[usize], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &j) in integer_cols.iter().enumerate() {
        let frac = x[j] - x[j].floor();
        let dist = frac.min(1.0 - frac);
        if dist > tol && best.is_none_or(|(_, d)| dist > d + 1e-12) {
            best = Some((k, dist));
        }
    }
    best.map(|(k, _)| k)
}
