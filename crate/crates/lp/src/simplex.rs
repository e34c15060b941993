use crate::model::{ConstraintOp, LinearProgram, Sense};
use crate::LpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivot budget exhausted before optimality was proven.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub pivot_tol: f64,
    pub optimality_tol: f64,
    pub feasibility_tol: f64,
    /// Defaults to `50 * (rows + columns) + 1000` when unset.
    pub max_pivots: Option<usize>,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_streak: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-7,
            optimality_tol: 1e-9,
            feasibility_tol: 1e-7,
            max_pivots: None,
            degenerate_streak: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values in the caller's variable space (empty unless optimal).
    pub x: Vec<f64>,
    /// One dual per constraint row, `∂z*/∂rhs` (empty unless optimal).
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        Self { status, x: Vec::new(), duals: Vec::new(), objective: f64::NAN, pivots }
    }
}

pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp_solve_with(lp, &SimplexOptions::default())
}

pub fn lp_solve_with(lp: &LinearProgram, options: &SimplexOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let standard = StandardForm::build(lp);
    let mut tableau = Tableau::new(&standard);
    let budget = options
        .max_pivots
        .unwrap_or(50 * (tableau.m + tableau.ncols) + 1000);

    // Phase 1: minimise the sum of artificials.
    let mut phase1_cost = vec![0.0; tableau.ncols];
    for c in &mut phase1_cost[tableau.art_start..] {
        *c = 1.0;
    }
    tableau.set_objective(&phase1_cost);
    let scale = standard.rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
    // Stop as soon as the artificials are gone: further phase 1 pivots are
    // driven by round-off and can wreck the tableau.
    let feasible_at = options.feasibility_tol * scale;
    match tableau.run(options, budget, tableau.ncols, Some(feasible_at)) {
        RunOutcome::Optimal => {}
        // Phase 1 is bounded below by zero; treat anything else as a stall.
        RunOutcome::Unbounded | RunOutcome::Stalled => {
            return Ok(LpSolution::without_point(LpStatus::Stalled, tableau.pivots));
        }
    }
    let infeasibility = -tableau.obj[tableau.ncols];
    if infeasibility > feasible_at {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, tableau.pivots));
    }
    tableau.drive_out_artificials(options.pivot_tol);
    tableau.refactor();

    // Phase 2 with artificial columns barred from entering.
    let mut cost = vec![0.0; tableau.ncols];
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    for (j, c) in standard.cost.iter().enumerate() {
        cost[j] = sign * c;
    }
    tableau.set_objective(&cost);
    let art_start = tableau.art_start;
    match tableau.run(options, budget, art_start, None) {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => {
            return Ok(LpSolution::without_point(LpStatus::Unbounded, tableau.pivots));
        }
        RunOutcome::Stalled => {
            return Ok(LpSolution::without_point(LpStatus::Stalled, tableau.pivots));
        }
    }

    let mut standard_x = vec![0.0; standard.num_struct];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < standard.num_struct {
            standard_x[b] = tableau.rhs(i).max(0.0);
        }
    }
    let x = standard.recover_primal(&standard_x);
    let violation = lp.max_violation(&x);
    if violation > 1e3 * options.feasibility_tol * scale {
        log::warn!("simplex finished with a primal violation of {violation:e}");
        return Ok(LpSolution::without_point(LpStatus::Stalled, tableau.pivots));
    }
    let duals = (0..lp.rows.len())
        .map(|i| {
            let pi = -tableau.obj[tableau.identity[i]];
            sign * standard.flip[i] * pi
        })
        .map(|d| if d == 0.0 { 0.0 } else { d })
        .collect();
    let objective = lp.evaluate(&x);
    Ok(LpSolution { status: LpStatus::Optimal, x, duals, objective, pivots: tableau.pivots })
}

#[derive(Debug, Clone, Copy)]
enum ColumnMap {
    /// x = offset + x'
    Shifted { col: usize, offset: f64 },
    /// x = offset - x'
    Reflected { col: usize, offset: f64 },
    /// x = x⁺ - x⁻
    Split { pos: usize, neg: usize },
}

struct StandardRow {
    coeffs: Vec<(usize, f64)>,
    op: ConstraintOp,
    rhs: f64,
}

/// `min cost·x'` over `x' ≥ 0`, every row with a non-negative right-hand side.
struct StandardForm {
    num_struct: usize,
    cost: Vec<f64>,
    rows: Vec<StandardRow>,
    /// +1 or -1 per row, the sign applied to make the rhs non-negative.
    flip: Vec<f64>,
    maps: Vec<ColumnMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut maps = Vec::with_capacity(lp.objective.len());
        let mut num_struct = 0;
        let mut cost = Vec::new();
        let mut bound_rows = Vec::new();
        for j in 0..lp.objective.len() {
            let (lo, hi) = (lp.lower[j], lp.upper[j]);
            let c = lp.objective[j];
            if lo.is_finite() {
                let col = num_struct;
                num_struct += 1;
                cost.push(c);
                maps.push(ColumnMap::Shifted { col, offset: lo });
                if hi.is_finite() {
                    bound_rows.push(StandardRow {
                        coeffs: vec![(col, 1.0)],
                        op: ConstraintOp::Le,
                        rhs: hi - lo,
                    });
                }
            } else if hi.is_finite() {
                let col = num_struct;
                num_struct += 1;
                cost.push(-c);
                maps.push(ColumnMap::Reflected { col, offset: hi });
            } else {
                let pos = num_struct;
                let neg = num_struct + 1;
                num_struct += 2;
                cost.push(c);
                cost.push(-c);
                maps.push(ColumnMap::Split { pos, neg });
            }
        }

        let mut rows: Vec<StandardRow> = lp
            .rows
            .iter()
            .map(|r| StandardRow { coeffs: Vec::new(), op: r.op, rhs: r.rhs })
            .collect();
        for &(r, j, v) in &lp.entries {
            match maps[j] {
                ColumnMap::Shifted { col, offset } => {
                    rows[r].coeffs.push((col, v));
                    rows[r].rhs -= v * offset;
                }
                ColumnMap::Reflected { col, offset } => {
                    rows[r].coeffs.push((col, -v));
                    rows[r].rhs -= v * offset;
                }
                ColumnMap::Split { pos, neg } => {
                    rows[r].coeffs.push((pos, v));
                    rows[r].coeffs.push((neg, -v));
                }
            }
        }
        rows.extend(bound_rows);

        let mut flip = Vec::with_capacity(rows.len());
        for row in &mut rows {
            if row.rhs < 0.0 {
                row.rhs = -row.rhs;
                for (_, v) in &mut row.coeffs {
                    *v = -*v;
                }
                row.op = match row.op {
                    ConstraintOp::Le => ConstraintOp::Ge,
                    ConstraintOp::Ge => ConstraintOp::Le,
                    ConstraintOp::Eq => ConstraintOp::Eq,
                };
                flip.push(-1.0);
            } else {
                flip.push(1.0);
            }
        }
        Self { num_struct, cost, rows, flip, maps }
    }

    fn recover_primal(&self, xs: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .map(|m| match *m {
                ColumnMap::Shifted { col, offset } => offset + xs[col],
                ColumnMap::Reflected { col, offset } => offset - xs[col],
                ColumnMap::Split { pos, neg } => xs[pos] - xs[neg],
            })
            .collect()
    }
}

enum RunOutcome {
    Optimal,
    Unbounded,
    Stalled,
}

struct Tableau {
    m: usize,
    ncols: usize,
    art_start: usize,
    width: usize,
    data: Vec<f64>,
    /// Reduced costs, last entry holds `-z`.
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Column that started as the identity for each row (slack or artificial).
    identity: Vec<usize>,
    pivots: usize,
    scratch: Vec<usize>,
    pivot_row: Vec<f64>,
    /// The initial tableau, kept for refactorisation.
    original: Vec<f64>,
    /// Cost vector of the current phase.
    cost: Vec<f64>,
    /// Pivots since the tableau was last rebuilt from `original`.
    drift: usize,
}

impl Tableau {
    fn new(standard: &StandardForm) -> Self {
        let m = standard.rows.len();
        let ns = standard.num_struct;
        let num_slack = standard
            .rows
            .iter()
            .filter(|r| r.op != ConstraintOp::Eq)
            .count();
        let num_art = standard
            .rows
            .iter()
            .filter(|r| r.op != ConstraintOp::Le)
            .count();
        let art_start = ns + num_slack;
        let ncols = art_start + num_art;
        let width = ncols + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut next_slack = ns;
        let mut next_art = art_start;
        let mut identity = Vec::with_capacity(m);
        for (i, row) in standard.rows.iter().enumerate() {
            let base = i * width;
            for &(c, v) in &row.coeffs {
                data[base + c] += v;
            }
            data[base + ncols] = row.rhs;
            match row.op {
                ConstraintOp::Le => {
                    data[base + next_slack] = 1.0;
                    basis[i] = next_slack;
                    identity.push(next_slack);
                    next_slack += 1;
                }
                ConstraintOp::Ge => {
                    data[base + next_slack] = -1.0;
                    next_slack += 1;
                    data[base + next_art] = 1.0;
                    basis[i] = next_art;
                    identity.push(next_art);
                    next_art += 1;
                }
                ConstraintOp::Eq => {
                    data[base + next_art] = 1.0;
                    basis[i] = next_art;
                    identity.push(next_art);
                    next_art += 1;
                }
            }
        }
        let original = data.clone();
        Self {
            identity,
            m,
            ncols,
            art_start,
            width,
            data,
            obj: vec![0.0; width],
            basis,
            pivots: 0,
            scratch: Vec::new(),
            pivot_row: vec![0.0; width],
            original,
            cost: vec![0.0; ncols],
            drift: 0,
        }
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.ncols]
    }

    fn set_objective(&mut self, cost: &[f64]) {
        self.cost.clear();
        self.cost.extend_from_slice(cost);
        self.obj[..self.ncols].copy_from_slice(cost);
        self.obj[self.ncols] = 0.0;
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * self.width..(i + 1) * self.width];
                for (o, a) in self.obj.iter_mut().zip(row) {
                    *o -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.eliminate(r, c);
        self.basis[r] = c;
        self.pivots += 1;
        self.drift += 1;
    }

    /// Gauss-Jordan step on `(r, c)` over the rows and the objective.
    fn eliminate(&mut self, r: usize, c: usize) {
        let w = self.width;
        let piv = self.data[r * w + c];
        self.scratch.clear();
        for k in 0..w {
            let v = self.data[r * w + k] / piv;
            self.data[r * w + k] = v;
            self.pivot_row[k] = v;
            if v != 0.0 {
                self.scratch.push(k);
            }
        }
        self.data[r * w + c] = 1.0;
        self.pivot_row[c] = 1.0;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for &k in &self.scratch {
                row[k] -= f * self.pivot_row[k];
            }
            row[c] = 0.0;
        }
        let f = self.obj[c];
        if f != 0.0 {
            for &k in &self.scratch {
                self.obj[k] -= f * self.pivot_row[k];
            }
            self.obj[c] = 0.0;
        }
    }

    /// Rebuilds the tableau for the current basis from the initial data,
    /// with partial pivoting, discarding accumulated round-off. Leaves the
    /// tableau untouched when the basis is numerically singular.
    fn refactor(&mut self) -> bool {
        let w = self.width;
        let saved = std::mem::replace(&mut self.data, self.original.clone());
        let columns = self.basis.clone();
        let mut assigned = vec![false; self.m];
        let mut basis = vec![usize::MAX; self.m];
        let obj = std::mem::replace(&mut self.obj, vec![0.0; w]);
        for &c in &columns {
            let mut best: Option<(usize, f64)> = None;
            for i in (0..self.m).filter(|&i| !assigned[i]) {
                let a = self.data[i * w + c].abs();
                if best.is_none_or(|(_, b)| a > b) {
                    best = Some((i, a));
                }
            }
            match best {
                Some((r, a)) if a > 1e-11 => {
                    self.eliminate(r, c);
                    assigned[r] = true;
                    basis[r] = c;
                }
                _ => {
                    log::debug!("refactorisation found a singular basis");
                    self.data = saved;
                    self.obj = obj;
                    return false;
                }
            }
        }
        self.basis = basis;
        let cost = std::mem::take(&mut self.cost);
        self.set_objective(&cost);
        self.drift = 0;
        true
    }

    /// Primal simplex over columns `[0, enter_limit)`, optionally stopping
    /// once the objective falls to `stop_at`.
    fn run(&mut self, options: &SimplexOptions, budget: usize, enter_limit: usize, stop_at: Option<f64>) -> RunOutcome {
        let mut bland = false;
        let mut streak = 0usize;
        let w = self.width;
        let refactor_every = self.m.max(50);
        loop {
            if self.drift >= refactor_every {
                self.refactor();
            }
            if stop_at.is_some_and(|target| -self.obj[self.ncols] <= target) {
                if self.drift > 0 && self.refactor() {
                    continue;
                }
                return RunOutcome::Optimal;
            }
            let mut entering = None;
            let mut best = -options.optimality_tol;
            for j in 0..enter_limit {
                let d = self.obj[j];
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = entering else {
                if self.drift > 0 && self.refactor() {
                    continue;
                }
                return RunOutcome::Optimal;
            };

            // Harris ratio test: bound the step using right-hand sides relaxed
            // by the feasibility tolerance, then take the largest pivot whose
            // ratio fits. Once degenerate pivots pile up, switch to the exact
            // min-ratio test with lexicographic ties, which cannot cycle.
            let mut bound = f64::INFINITY;
            if !bland {
                for i in 0..self.m {
                    let a = self.data[i * w + c];
                    if a > options.pivot_tol {
                        bound = bound.min((self.data[i * w + self.ncols].max(0.0) + options.feasibility_tol) / a);
                    }
                }
            }
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.data[i * w + c];
                if a <= options.pivot_tol {
                    continue;
                }
                let ratio = self.data[i * w + self.ncols].max(0.0) / a;
                let better = if bland {
                    match leave {
                        None => true,
                        Some(l) if (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio) => self.lex_less(i, l, c),
                        Some(_) => ratio < best_ratio,
                    }
                } else {
                    ratio <= bound && leave.is_none_or(|l| a > self.data[l * w + c])
                };
                if better {
                    leave = Some(i);
                    best_ratio = ratio;
                }
            }
            let Some(r) = leave else {
                if self.drift > 0 && self.refactor() {
                    continue;
                }
                return RunOutcome::Unbounded;
            };
            // A slightly negative right-hand side is round-off; zeroing it
            // keeps the step from pushing other rows below zero.
            if self.data[r * w + self.ncols] < 0.0 {
                self.data[r * w + self.ncols] = 0.0;
            }
            if best_ratio <= 1e-12 {
                streak += 1;
                if streak >= options.degenerate_streak {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }
            self.pivot(r, c);
            if self.pivots >= budget {
                log::warn!("simplex pivot budget of {budget} exhausted");
                return RunOutcome::Stalled;
            }
        }
    }

    /// Whether row `i` scaled by its entry in column `c` precedes row `l`
    /// lexicographically over the basis-inverse columns.
    fn lex_less(&self, i: usize, l: usize, c: usize) -> bool {
        let w = self.width;
        let (ai, al) = (self.data[i * w + c], self.data[l * w + c]);
        for &k in &self.identity {
            let (vi, vl) = (self.data[i * w + k] / ai, self.data[l * w + k] / al);
            if (vi - vl).abs() > 1e-11 * vi.abs().max(vl.abs()).max(1.0) {
                return vi < vl;
            }
        }
        self.basis[i] < self.basis[l]
    }

    fn drive_out_artificials(&mut self, pivot_tol: f64) {
        let w = self.width;
        for i in 0..self.m {
            if self.basis[i] < self.art_start {
                continue;
            }
            // The artificial sits within tolerance of zero; making that exact
            // turns the exchange into a degenerate pivot whatever its sign.
            self.data[i * w + self.ncols] = 0.0;
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.art_start {
                let a = self.data[i * w + j].abs();
                if a > pivot_tol && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(i, j);
            }
        }
    }
}
