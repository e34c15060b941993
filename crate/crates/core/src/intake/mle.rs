use crate::error::{Error, Result};

/// Maximum-likelihood success probabilities from `N` intake samples:
/// `p̂[τ] = Σ i[τ] / (N · i_max[τ])`, with `0` on days where `i_max` is zero.
pub fn mle_success_probs(samples: &[Vec<u32>], intake_max: &[u32]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut totals = vec![0u64; intake_max.len()];
    for sample in samples {
        if sample.len() != intake_max.len() {
            return Err(Error::LengthMismatch {
                what: "intake sample",
                expected: intake_max.len(),
                got: sample.len(),
            });
        }
        for (day, (&value, &max)) in sample.iter().zip(intake_max).enumerate() {
            if value > max {
                return Err(Error::IntakeOutOfRange { day: day + 1, value, max });
            }
            totals[day] += value as u64;
        }
    }
    let n = samples.len() as f64;
    Ok(totals
        .iter()
        .zip(intake_max)
        .map(|(&t, &m)| if m == 0 { 0.0 } else { t as f64 / (n * m as f64) })
        .collect())
}

/// Pulls estimates off the boundary into `[1/(2N·i_max), 1 − 1/(2N·i_max)]`
/// so the confidence-set weights stay finite. Days with `i_max = 0` carry no
/// information and are set to one half.
pub fn clamp_estimate(estimate: &[f64], samples: u32, intake_max: &[u32]) -> Vec<f64> {
    estimate
        .iter()
        .zip(intake_max)
        .map(|(&p, &m)| {
            if m == 0 {
                return 0.5;
            }
            let margin = 1.0 / (2.0 * samples.max(1) as f64 * m as f64);
            p.clamp(margin, 1.0 - margin)
        })
        .collect()
}
