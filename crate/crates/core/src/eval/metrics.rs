//! Binary confusion counts and the accuracy / sensitivity / specificity
//! percentages derived from them.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            tn: self.tn + o.tn,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// Counts predictions against ground truth with `positive` as the positive
/// class and `negative` as the other.
pub fn confusion<P: AsRef<str>, T: AsRef<str>>(
    predictions: &[P],
    truth: &[T],
    positive: &str,
    negative: &str,
) -> Result<ConfusionCounts> {
    if predictions.len() != truth.len() {
        return Err(Error::Mismatch {
            expected: truth.len(),
            found: predictions.len(),
        });
    }
    let is_positive = |l: &str| -> Result<bool> {
        if l == positive {
            Ok(true)
        } else if l == negative {
            Ok(false)
        } else {
            Err(Error::Data(format!(
                "label `{l}` is neither `{positive}` nor `{negative}`"
            )))
        }
    };
    let mut c = ConfusionCounts::default();
    for (p, t) in predictions.iter().zip(truth) {
        match (is_positive(p.as_ref())?, is_positive(t.as_ref())?) {
            (true, true) => c.tp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Percentages in `[0, 100]` and AUC in `[0, 1]`. `None` marks a ratio
/// whose denominator was zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MetricsReport {
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub auc: Option<f64>,
}

impl MetricsReport {
    /// Names of the fields that are undefined.
    pub fn undefined(&self) -> Vec<&'static str> {
        [
            ("accuracy", self.accuracy),
            ("sensitivity", self.sensitivity),
            ("specificity", self.specificity),
            ("auc", self.auc),
        ]
        .into_iter()
        .filter(|(_, v)| v.is_none())
        .map(|(n, _)| n)
        .collect()
    }
}

fn percent(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

/// Accuracy, sensitivity and specificity. `auc` is left unset.
pub fn metrics(c: &ConfusionCounts) -> Result<MetricsReport> {
    if c.total() == 0 {
        return Err(Error::Data("no evaluated samples".into()));
    }
    Ok(MetricsReport {
        accuracy: percent(c.tp + c.tn, c.total()),
        sensitivity: percent(c.tp, c.tp + c.fn_),
        specificity: percent(c.tn, c.tn + c.fp),
        auc: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_correct_large_case() {
        let truth: Vec<&str> = (0..1033).map(|i| if i < 482 { "LA" } else { "HA" }).collect();
        let c = confusion(&truth, &truth, "LA", "HA").unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                tp: 482,
                tn: 551,
                fp: 0,
                fn_: 0
            }
        );
        let m = metrics(&c).unwrap();
        assert_eq!(
            (m.accuracy, m.sensitivity, m.specificity),
            (Some(100.0), Some(100.0), Some(100.0))
        );
    }

    #[test]
    fn flipped_predictions_swap_cells() {
        let truth = ["p", "p", "n", "p", "n"];
        let flipped: Vec<&str> = truth.iter().map(|&t| if t == "p" { "n" } else { "p" }).collect();
        let c = confusion(&truth, &truth, "p", "n").unwrap();
        let f = confusion(&flipped, &truth, "p", "n").unwrap();
        assert_eq!((f.tp, f.fn_, f.tn, f.fp), (c.fn_, c.tp, c.fp, c.tn));
    }

    #[test]
    fn twenty_sample_case() {
        // 10 positives (8 caught), 10 negatives (9 rejected)
        let truth: Vec<&str> = (0..20).map(|i| if i < 10 { "p" } else { "n" }).collect();
        let mut pred = truth.clone();
        pred[0] = "n";
        pred[1] = "n";
        pred[10] = "p";
        let c = confusion(&pred, &truth, "p", "n").unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                tp: 8,
                tn: 9,
                fp: 1,
                fn_: 2
            }
        );
        let m = metrics(&c).unwrap();
        assert_eq!(
            (m.sensitivity, m.specificity, m.accuracy),
            (Some(80.0), Some(90.0), Some(85.0))
        );
    }

    #[test]
    fn undefined_ratios_are_flagged() {
        let m = metrics(&ConfusionCounts {
            tp: 0,
            tn: 4,
            fp: 1,
            fn_: 0,
        })
        .unwrap();
        assert_eq!(m.sensitivity, None);
        assert_eq!(m.undefined(), vec!["sensitivity", "auc"]);
        assert!(metrics(&ConfusionCounts::default()).is_err());
    }

    #[test]
    fn confusion_errors() {
        assert!(confusion(&["a"], &["a", "b"], "a", "b").is_err());
        assert!(confusion(&["c"], &["a"], "a", "b").is_err());
    }

    #[test]
    fn accuracy_identity() {
        for (tp, tn, fp, fn_) in [(3, 4, 5, 6), (0, 1, 0, 0), (17, 0, 2, 9)] {
            let c = ConfusionCounts { tp, tn, fp, fn_ };
            let acc = metrics(&c).unwrap().accuracy.unwrap();
            assert!((acc * c.total() as f64 - 100.0 * (tp + tn) as f64).abs() < 1e-9);
        }
    }
}
