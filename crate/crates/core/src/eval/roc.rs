//! ROC curve by threshold sweep and its trapezoidal area.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    /// Samples with `score >= threshold` are called positive. The first
    /// point, `(0, 0)`, has an infinite threshold and is serialized as null.
    #[serde(serialize_with = "finite_or_null")]
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

fn finite_or_null<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC curve and AUC, higher score meaning more positive.
///
/// One point is emitted per distinct score, so tied scores form a diagonal
/// segment and contribute half credit to the area.
pub fn roc_auc<L: AsRef<str>>(scores: &[f64], truth: &[L], positive: &str) -> Result<RocCurve> {
    if scores.len() != truth.len() {
        return Err(Error::Mismatch {
            expected: truth.len(),
            found: scores.len(),
        });
    }
    if let Some(s) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::Data(format!("score {s} is not a number")));
    }
    let mut ranked: Vec<(f64, bool)> = scores
        .iter()
        .zip(truth)
        .map(|(&s, l)| (s, l.as_ref() == positive))
        .collect();
    let n_pos = ranked.iter().filter(|(_, p)| *p).count() as u64;
    let n_neg = ranked.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Data("ROC needs both positive and negative samples".into()));
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    // Twice the area in units of (positive x negative) pairs, kept integral.
    let mut doubled_area: u128 = 0;
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < ranked.len() {
        let threshold = ranked[i].0;
        let (prev_tp, prev_fp) = (tp, fp);
        while i < ranked.len() && ranked[i].0 == threshold {
            if ranked[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_area += u128::from(fp - prev_fp) * u128::from(tp + prev_tp);
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
        });
    }
    let auc = doubled_area as f64 / (2.0 * n_pos as f64 * n_neg as f64);
    Ok(RocCurve { points, auc })
}
