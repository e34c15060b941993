use crate::LpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintOp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Row {
    pub op: ConstraintOp,
    pub rhs: f64,
}

/// A linear program in row form with sparse coefficient triplets.
///
/// Variables default to `[0, +inf)`. Integrality flags are ignored by
/// [`crate::lp_solve`] and honoured by [`crate::mip_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub(crate) sense: Sense,
    pub(crate) objective: Vec<f64>,
    pub(crate) lower: Vec<f64>,
    pub(crate) upper: Vec<f64>,
    pub(crate) integer: Vec<bool>,
    pub(crate) rows: Vec<Row>,
    /// (row, column, value)
    pub(crate) entries: Vec<(usize, usize, f64)>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            objective: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            integer: Vec::new(),
            rows: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.entries.len()
    }

    pub fn add_variable(&mut self, objective: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(objective);
        self.lower.push(lower);
        self.upper.push(upper);
        self.integer.push(false);
        self.objective.len() - 1
    }

    pub fn add_integer_variable(&mut self, objective: f64, lower: f64, upper: f64) -> usize {
        let index = self.add_variable(objective, lower, upper);
        self.integer[index] = true;
        index
    }

    /// Adds `Σ coeff·x op rhs` and returns the row index. Repeated columns
    /// are summed.
    pub fn add_constraint<I>(&mut self, coefficients: I, op: ConstraintOp, rhs: f64) -> usize
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let row = self.rows.len();
        self.rows.push(Row { op, rhs });
        for (col, value) in coefficients {
            if value != 0.0 {
                self.entries.push((row, col, value));
            }
        }
        row
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn is_integer(&self, var: usize) -> bool {
        self.integer[var]
    }

    pub fn objective_coefficients(&self) -> &[f64] {
        &self.objective
    }

    /// Objective value of an arbitrary point.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut activity = vec![0.0; self.rows.len()];
        for &(r, c, v) in &self.entries {
            activity[r] += v * x[c];
        }
        let mut worst: f64 = 0.0;
        for (row, act) in self.rows.iter().zip(&activity) {
            let viol = match row.op {
                ConstraintOp::Le => act - row.rhs,
                ConstraintOp::Ge => row.rhs - act,
                ConstraintOp::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(LpError::NonFinite { location: format!("objective[{j}]") });
            }
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(LpError::NonFinite { location: format!("bounds[{j}]") });
            }
            if lo > hi {
                return Err(LpError::InvertedBounds { index: j, lower: lo, upper: hi });
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::NonFinite { location: format!("rhs[{i}]") });
            }
        }
        for &(r, c, v) in &self.entries {
            if c >= n {
                return Err(LpError::VariableOutOfRange { index: c, count: n });
            }
            if !v.is_finite() {
                return Err(LpError::NonFinite { location: format!("a[{r},{c}]") });
            }
        }
        Ok(())
    }
}
