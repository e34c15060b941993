use crate::error::{Error, Result};

/// `Π (i_max[τ] + 1)`, with an explicit error on overflow.
pub fn space_cardinality(intake_max: &[u32]) -> Result<u64> {
    intake_max.iter().try_fold(1u64, |acc, &m| {
        acc.checked_mul(m as u64 + 1).ok_or(Error::Overflow { what: "intake space" })
    })
}

/// All intake vectors `0 ≤ i ≤ i_max`, indexed lexicographically with day 1
/// most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntakeSpace {
    intake_max: Vec<u32>,
    cardinality: usize,
    /// Index weight of each day (product of the later radices).
    strides: Vec<usize>,
}

impl IntakeSpace {
    pub fn new(intake_max: &[u32]) -> Result<Self> {
        let cardinality = usize::try_from(space_cardinality(intake_max)?)
            .map_err(|_| Error::Overflow { what: "intake space" })?;
        let mut strides = vec![1usize; intake_max.len()];
        for day in (0..intake_max.len().saturating_sub(1)).rev() {
            strides[day] = strides[day + 1] * (intake_max[day + 1] as usize + 1);
        }
        Ok(Self { intake_max: intake_max.to_vec(), cardinality, strides })
    }

    pub fn intake_max(&self) -> &[u32] {
        &self.intake_max
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn days(&self) -> usize {
        self.intake_max.len()
    }

    /// Index weight of `day` (0-based).
    pub fn stride(&self, day: usize) -> usize {
        self.strides[day]
    }

    pub fn index_of(&self, intake: &[u32]) -> Result<usize> {
        if intake.len() != self.days() {
            return Err(Error::LengthMismatch { what: "intake", expected: self.days(), got: intake.len() });
        }
        let mut index = 0;
        for (day, (&v, &m)) in intake.iter().zip(&self.intake_max).enumerate() {
            if v > m {
                return Err(Error::IntakeOutOfRange { day: day + 1, value: v, max: m });
            }
            index += v as usize * self.strides[day];
        }
        Ok(index)
    }

    pub fn intake_at(&self, index: usize) -> Vec<u32> {
        let mut out = vec![0; self.days()];
        self.decode_into(index, &mut out);
        out
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [u32]) {
        for (day, slot) in out.iter_mut().enumerate() {
            *slot = (index / self.strides[day]) as u32;
            index %= self.strides[day];
        }
    }

    /// Visits every intake in index order without allocating per point.
    pub fn for_each<F: FnMut(usize, &[u32])>(&self, mut visit: F) {
        let mut current = vec![0u32; self.days()];
        for index in 0..self.cardinality {
            visit(index, &current);
            for day in (0..current.len()).rev() {
                if current[day] < self.intake_max[day] {
                    current[day] += 1;
                    break;
                }
                current[day] = 0;
            }
        }
    }
}
