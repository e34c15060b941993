use super::special::ln_gamma;
use super::SuccessProbs;
use crate::error::{Error, Result};

/// `P(X = k)` for `k = 0..=trials`, `X ~ Binomial(trials, p)`.
///
/// Built by the ratio recurrence from `(1 − p)^n`; for `p > 0.5` the table of
/// `1 − p` is reversed so the starting term never underflows before `n ≈ 1000`.
/// Larger `n` falls back to log space.
pub fn binomial_pmf_table(trials: u32, p: f64) -> Vec<f64> {
    let n = trials as usize;
    let mut table = vec![0.0; n + 1];
    if p <= 0.0 {
        table[0] = 1.0;
        return table;
    }
    if p >= 1.0 {
        table[n] = 1.0;
        return table;
    }
    if p > 0.5 {
        let mut flipped = binomial_pmf_table(trials, 1.0 - p);
        flipped.reverse();
        return flipped;
    }
    let q = 1.0 - p;
    let start = q.powi(trials as i32);
    if start > 1e-280 {
        let ratio = p / q;
        table[0] = start;
        for k in 0..n {
            table[k + 1] = table[k] * (n - k) as f64 / (k + 1) as f64 * ratio;
        }
    } else {
        let ln_n = ln_gamma(n as f64 + 1.0);
        for (k, slot) in table.iter_mut().enumerate() {
            let ln_choose = ln_n - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
            *slot = (ln_choose + k as f64 * p.ln() + (n - k) as f64 * q.ln()).exp();
        }
    }
    table
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("success probability {p} outside [0, 1]")))
    }
}

pub fn binomial_pmf(trials: u32, p: f64, k: u32) -> Result<f64> {
    check_probability(p)?;
    if k > trials {
        return Err(Error::Domain(format!("count {k} exceeds {trials} trials")));
    }
    Ok(binomial_pmf_table(trials, p)[k as usize])
}

/// Probability of one intake vector under independent binomial days.
pub fn joint_pmf(probs: &[f64], intake_max: &[u32], intake: &[u32]) -> Result<f64> {
    if probs.len() != intake_max.len() || intake.len() != intake_max.len() {
        return Err(Error::LengthMismatch {
            what: "joint pmf arguments",
            expected: intake_max.len(),
            got: probs.len().min(intake.len()),
        });
    }
    let mut product = 1.0;
    for ((&p, &n), &k) in probs.iter().zip(intake_max).zip(intake) {
        product *= binomial_pmf(n, p, k)?;
    }
    Ok(product)
}

/// Per-day PMF tables of one success-probability vector.
#[derive(Debug, Clone)]
pub struct BinomialIntakeLaw {
    probs: SuccessProbs,
    tables: Vec<Vec<f64>>,
}

impl BinomialIntakeLaw {
    pub fn new(probs: SuccessProbs, intake_max: &[u32]) -> Result<Self> {
        if probs.len() != intake_max.len() {
            return Err(Error::LengthMismatch {
                what: "success probabilities",
                expected: intake_max.len(),
                got: probs.len(),
            });
        }
        for &p in probs.as_slice() {
            check_probability(p)?;
        }
        let tables = probs
            .as_slice()
            .iter()
            .zip(intake_max)
            .map(|(&p, &n)| binomial_pmf_table(n, p))
            .collect();
        Ok(Self { probs, tables })
    }

    pub fn probs(&self) -> &SuccessProbs {
        &self.probs
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    pub fn joint(&self, intake: &[u32]) -> f64 {
        self.tables.iter().zip(intake).map(|(t, &k)| t[k as usize]).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_examples() {
        assert_eq!(binomial_pmf(2, 0.5, 1).unwrap(), 0.5);
        let top = binomial_pmf(20, 0.75, 20).unwrap();
        assert!((top - 0.75f64.powi(20)).abs() < 1e-15);
        assert!((top - 3.1712e-3).abs() < 1e-7);
        assert_eq!(binomial_pmf_table(4, 0.0), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(binomial_pmf_table(3, 1.0), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn pmf_matches_direct_formula() {
        for n in [1u32, 5, 20, 40] {
            for p in [0.1, 0.37, 0.5, 0.75, 0.93] {
                let table = binomial_pmf_table(n, p);
                let mut choose = 1.0f64;
                for k in 0..=n {
                    let direct = choose * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
                    assert!((table[k as usize] - direct).abs() <= 1e-12 * direct.max(1e-300) + 1e-300);
                    choose = choose * (n - k) as f64 / (k + 1) as f64;
                }
                assert!((table.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn large_trials_use_log_space() {
        let table = binomial_pmf_table(3000, 0.3);
        assert!((table.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(table.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn joint_of_point_mass() {
        assert_eq!(joint_pmf(&[1.0, 1.0], &[3, 4], &[3, 4]).unwrap(), 1.0);
        assert_eq!(joint_pmf(&[0.3], &[5], &[2]).unwrap(), binomial_pmf(5, 0.3, 2).unwrap());
        assert!(binomial_pmf(3, 1.5, 1).is_err());
        assert!(binomial_pmf(3, 0.5, 4).is_err());
    }
}
