//! Binary classification metrics with label 1 as the positive class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn count(pred: &[u8], truth: &[u8]) -> Result<Confusion> {
        if pred.len() != truth.len() || pred.is_empty() {
            return Err(Error::Usage(format!(
                "metrics need equal nonempty lengths, got {} predictions and {} labels",
                pred.len(),
                truth.len()
            )));
        }
        let mut c = Confusion::default();
        for (&p, &t) in pred.iter().zip(truth) {
            if p > 1 || t > 1 {
                return Err(Error::Usage(format!("labels must be 0 or 1, got {p} and {t}")));
            }
            match (p, t) {
                (1, 1) => c.tp += 1,
                (1, 0) => c.fp += 1,
                (0, 1) => c.fn_ += 1,
                _ => c.tn += 1,
            }
        }
        Ok(c)
    }

    pub fn metrics(&self) -> Metrics {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            accuracy: ratio(self.tp + self.tn, self.tp + self.fp + self.fn_ + self.tn),
            precision,
            recall,
            f1,
        }
    }
}

pub fn metrics(pred: &[u8], truth: &[u8]) -> Result<Metrics> {
    Ok(Confusion::count(pred, truth)?.metrics())
}

impl Metrics {
    pub fn mean(all: &[Metrics]) -> Metrics {
        let n = all.len().max(1) as f64;
        let avg = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
        Metrics {
            accuracy: avg(|m| m.accuracy),
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            f1: avg(|m| m.f1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn confusion_example() {
        let pred = [1, 1, 1, 1, 0, 0, 0, 0, 0, 0];
        let truth = [1, 1, 1, 0, 1, 1, 0, 0, 0, 0];
        let m = metrics(&pred, &truth).unwrap();
        assert!((m.accuracy - 0.7).abs() < 1e-12);
        assert!((m.precision - 0.75).abs() < 1e-12);
        assert!((m.recall - 0.6).abs() < 1e-12);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_predictors() {
        let m = metrics(&[0, 0, 0, 0], &[1, 0, 1, 0]).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        let m = metrics(&[1, 0, 1], &[1, 0, 1]).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
        assert!(matches!(metrics(&[1], &[1, 0]), Err(Error::Usage(_))));
        assert!(matches!(metrics(&[], &[]), Err(Error::Usage(_))));
    }

    proptest! {
        #[test]
        fn metric_identities(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..60)) {
            let (pred, truth): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
            let c = Confusion::count(&pred, &truth).unwrap();
            let m = c.metrics();
            prop_assert!((m.accuracy - (c.tp + c.tn) as f64 / pred.len() as f64).abs() < 1e-12);
            for v in [m.accuracy, m.precision, m.recall, m.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if m.precision > 0.0 && m.recall > 0.0 {
                let h = 2.0 / (1.0 / m.precision + 1.0 / m.recall);
                prop_assert!((m.f1 - h).abs() < 1e-12);
            }
        }
    }
}
