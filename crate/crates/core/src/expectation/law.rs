use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::Result;
use crate::intake::{BinomialIntakeLaw, SuccessProbs};

/// Builds each distinct law's PMF tables once and counts the builds.
#[derive(Debug)]
pub struct LawCache {
    intake_max: Vec<u32>,
    laws: Mutex<HashMap<SuccessProbs, Arc<BinomialIntakeLaw>>>,
    built: AtomicUsize,
}

impl LawCache {
    pub fn new(intake_max: &[u32]) -> Self {
        Self { intake_max: intake_max.to_vec(), laws: Mutex::new(HashMap::new()), built: AtomicUsize::new(0) }
    }

    pub fn intake_max(&self) -> &[u32] {
        &self.intake_max
    }

    pub fn get(&self, probs: &SuccessProbs) -> Result<Arc<BinomialIntakeLaw>> {
        let mut laws = self.laws.lock().expect("law cache poisoned");
        if let Some(law) = laws.get(probs) {
            return Ok(Arc::clone(law));
        }
        let law = Arc::new(BinomialIntakeLaw::new(probs.clone(), &self.intake_max)?);
        self.built.fetch_add(1, Ordering::Relaxed);
        laws.insert(probs.clone(), Arc::clone(&law));
        Ok(law)
    }

    /// Number of PMF-table sets constructed so far.
    pub fn constructions(&self) -> usize {
        self.built.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_once_per_distinct_law() {
        let cache = LawCache::new(&[3, 3]);
        let a = SuccessProbs(vec![0.2, 0.4]);
        let b = SuccessProbs(vec![0.4, 0.2]);
        cache.get(&a).unwrap();
        cache.get(&b).unwrap();
        cache.get(&a).unwrap();
        assert_eq!(cache.constructions(), 2);
    }
}
