use std::collections::HashMap;

use super::binomial::binomial_pmf_table;
use super::{IntakeSpace, ParametricAmbiguitySet};
use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 1e-3;

/// Intakes whose largest probability over an ambiguity set exceeds `beta`.
#[derive(Debug, Clone)]
pub struct ReducedIntakeSet {
    beta: f64,
    space: IntakeSpace,
    indices: Vec<usize>,
}

impl ReducedIntakeSet {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn space(&self) -> &IntakeSpace {
        &self.space
    }

    /// Retained indices into the space, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn reduce_intake_set(
    theta: &ParametricAmbiguitySet,
    intake_max: &[u32],
    beta: f64,
) -> Result<ReducedIntakeSet> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta {beta} outside [0, 1)")));
    }
    if theta.days() != intake_max.len() {
        return Err(Error::LengthMismatch {
            what: "ambiguity member",
            expected: intake_max.len(),
            got: theta.days(),
        });
    }
    let space = IntakeSpace::new(intake_max)?;
    // One table per distinct (day, p) value; members share most coordinates.
    let mut tables: Vec<HashMap<u64, usize>> = vec![HashMap::new(); intake_max.len()];
    let mut store: Vec<Vec<f64>> = Vec::new();
    let member_tables: Vec<Vec<usize>> = theta
        .members()
        .iter()
        .map(|m| {
            m.as_slice()
                .iter()
                .enumerate()
                .map(|(day, &p)| {
                    *tables[day].entry(p.to_bits()).or_insert_with(|| {
                        store.push(binomial_pmf_table(intake_max[day], p));
                        store.len() - 1
                    })
                })
                .collect()
        })
        .collect();

    let mut indices = Vec::new();
    space.for_each(|index, intake| {
        let best = member_tables
            .iter()
            .map(|ids| ids.iter().zip(intake).map(|(&t, &k)| store[t][k as usize]).product::<f64>())
            .fold(0.0, f64::max);
        if best > beta {
            indices.push(index);
        }
    });
    if indices.is_empty() {
        return Err(Error::EmptyReducedSet { beta });
    }
    Ok(ReducedIntakeSet { beta, space, indices })
}
