//! Modified chi-square divergence, its convex conjugate, the ball radius and
//! a few information measures used to describe worst-case distributions.

use crate::error::{Error, Result};
use crate::intake::chi_square_quantile;

/// Second derivative at one of `φ(t) = (t − 1)²`.
pub const MODIFIED_CHI2_CURVATURE: f64 = 2.0;

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { what: "distribution", expected: q.len(), got: p.len() });
    }
    Ok(())
}

/// `Σ (P_j − Q_j)² / Q_j`; infinite when `P` puts mass where `Q` has none.
pub fn modified_chi2_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let mut total = 0.0;
    for (&pj, &qj) in p.iter().zip(q) {
        if qj > 0.0 {
            total += (pj - qj) * (pj - qj) / qj;
        } else if pj > 0.0 {
            return Ok(f64::INFINITY);
        }
    }
    Ok(total)
}

/// `φ*(s) = max(s/2 + 1, 0)² − 1`.
pub fn conjugate_modified_chi2(s: f64) -> f64 {
    let h = (s / 2.0 + 1.0).max(0.0);
    h * h - 1.0
}

/// Radius of the divergence ball that approximates a `1 − alpha` confidence
/// region from `samples` observations with `dof` degrees of freedom.
pub fn divergence_radius(samples: u32, dof: u32, alpha: f64, curvature: f64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::EmptySamples);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(curvature / (2.0 * samples as f64) * chi_square_quantile(dof, 1.0 - alpha)?)
}

/// Second-order cone `√(4z² + (λ − u)²) ≤ λ + u`, which for `λ ≥ 0` is the
/// rotated cone `λu ≥ z², λ + u ≥ 0`.
pub fn cone_holds(lambda: f64, u: f64, z: f64) -> bool {
    (4.0 * z * z + (lambda - u) * (lambda - u)).sqrt() <= lambda + u
}

/// Kullback-Leibler divergence `Σ P log(P/Q)` with `0 log 0 = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let mut total = 0.0;
    for (&pj, &qj) in p.iter().zip(q) {
        if pj > 0.0 {
            if qj <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += pj * (pj / qj).ln();
        }
    }
    Ok(total)
}

/// Shannon entropy in nats.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}
