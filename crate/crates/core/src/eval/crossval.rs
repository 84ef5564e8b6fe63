//! End-to-end evaluation: feature extraction, k-fold or subject-held-out
//! splitting, class-means classification, metrics, pooled ROC and scatter
//! analysis, assembled into one serializable report.

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::classify::{class_order, CmmdcModel};
use crate::error::{Error, Result};
use crate::eval::metrics::{confusion, metrics, ConfusionCounts, MetricsReport};
use crate::eval::roc::{roc_auc, RocPoint};
use crate::eval::scatter::{scatter_analysis, ScatterAnalysis};
use crate::eval::split::{kfold_split, subject_split};
use crate::nuclear::{extract_features_with, FeatureConfig, FeatureVector, SpectrumSource};
use crate::signal::{amplitude_reject, RegionSpec, Trial};

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Protocol {
    KFold { folds: usize, stratified: bool },
    SubjectSplit { test_fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossvalConfig {
    pub features: FeatureConfig,
    pub protocol: Protocol,
    pub seed: u64,
    /// Positive class for sensitivity and ROC; defaults to the second class
    /// in order of first appearance.
    pub positive: Option<String>,
    /// Amplitude rejection (μV) applied before anything else; `None` keeps
    /// every trial.
    pub reject_threshold: Option<f64>,
}

impl Default for CrossvalConfig {
    fn default() -> Self {
        Self {
            features: FeatureConfig::default(),
            protocol: Protocol::KFold {
                folds: DEFAULT_FOLDS,
                stratified: true,
            },
            seed: DEFAULT_SEED,
            positive: None,
            reject_threshold: None,
        }
    }
}

impl CrossvalConfig {
    pub fn kfold(k: usize, folds: usize, seed: u64) -> Self {
        Self {
            features: FeatureConfig {
                k,
                ..Default::default()
            },
            protocol: Protocol::KFold {
                folds,
                stratified: true,
            },
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub region: String,
    pub channels: Vec<usize>,
    pub k: usize,
    pub source: SpectrumSource,
    pub epsilon: f64,
    pub protocol: Protocol,
    pub seed: u64,
    pub reject_threshold: Option<f64>,
    pub positive: String,
    pub negative: String,
    pub n_trials: usize,
    pub n_rejected: usize,
    /// First 16 hex digits of the SHA-256 of this block's JSON, computed
    /// while this field is still empty.
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldReport {
    pub index: usize,
    pub n_train: usize,
    pub n_test: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_subjects: Option<Vec<String>>,
    pub confusion: ConfusionCounts,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    /// Unweighted mean of the per-fold values that are defined.
    pub mean: MetricsReport,
    pub pooled_confusion: ConfusionCounts,
    /// Metrics of the pooled held-out predictions; `auc` is the pooled-score
    /// AUC.
    pub pooled: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub provenance: Provenance,
    pub class_labels: [String; 2],
    pub folds: Vec<FoldReport>,
    pub aggregate: Aggregate,
    pub roc: Vec<RocPoint>,
    /// Scatter analysis of every kept trial's features.
    pub scatter: Option<ScatterAnalysis>,
    pub rejected: Vec<String>,
    pub flags: Vec<String>,
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary_row(&self) -> SummaryRow {
        SummaryRow {
            region: self.provenance.region.clone(),
            k: self.provenance.k,
            channels: self.provenance.channels.len(),
            accuracy: self.aggregate.mean.accuracy,
            sensitivity: self.aggregate.mean.sensitivity,
            specificity: self.aggregate.mean.specificity,
            auc: self.aggregate.pooled.auc,
        }
    }
}

/// One line of the human-readable summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub region: String,
    pub k: usize,
    pub channels: usize,
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub auc: Option<f64>,
}

/// Fixed-width table: region, features, channels, accuracy, sensitivity,
/// specificity, AUC.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    fn cell(v: Option<f64>, digits: usize) -> String {
        v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.digits$}"))
    }
    let mut out = format!(
        "{:<10} {:>8} {:>8} {:>9} {:>11} {:>11} {:>6}\n",
        "Region", "Features", "Channels", "Accuracy", "Sensitivity", "Specificity", "AUC"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<10} {:>8} {:>8} {:>9} {:>11} {:>11} {:>6}\n",
            r.region,
            format!("{:02}", r.k),
            r.channels,
            cell(r.accuracy, 1),
            cell(r.sensitivity, 1),
            cell(r.specificity, 1),
            cell(r.auc, 3),
        ));
    }
    out
}

/// Features of every trial, in input order. Runs on the current rayon pool.
pub fn extract_all(trials: &[Trial], region: &RegionSpec, config: &FeatureConfig) -> Result<Vec<FeatureVector>> {
    trials
        .par_iter()
        .map(|t| extract_features_with(t, region, config))
        .collect()
}

fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    hex::encode(&Sha256::digest(&bytes)[..8])
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Fits on `train`, evaluates on `test`. Also returns the test scores,
/// oriented so that higher means more positive.
fn evaluate_split(
    features: &[FeatureVector],
    labels: &[&str],
    train: &[usize],
    test: &[usize],
    positive: &str,
    negative: &str,
) -> Result<(ConfusionCounts, MetricsReport, Vec<f64>)> {
    let train_f: Vec<&[f64]> = train.iter().map(|&i| features[i].values.as_slice()).collect();
    let train_l: Vec<&str> = train.iter().map(|&i| labels[i]).collect();
    let model = CmmdcModel::fit(&train_f, &train_l)?;
    // d1 - d2 grows toward the model's second class
    let sign = if model.class_labels[1] == positive { 1.0 } else { -1.0 };

    let mut predictions = Vec::with_capacity(test.len());
    let mut scores = Vec::with_capacity(test.len());
    for &i in test {
        let x = &features[i].values;
        predictions.push(model.predict(x)?.to_string());
        scores.push(sign * model.score(x)?);
    }
    let truth: Vec<&str> = test.iter().map(|&i| labels[i]).collect();
    let c = confusion(&predictions, &truth, positive, negative)?;
    let mut m = metrics(&c)?;
    m.auc = roc_auc(&scores, &truth, positive).ok().map(|r| r.auc);
    Ok((c, m, scores))
}

/// Output of [`evaluate_features`].
#[derive(Debug, Clone, PartialEq)]
pub struct HeldOutEvaluation {
    pub folds: Vec<FoldReport>,
    pub aggregate: Aggregate,
    pub roc: Vec<RocPoint>,
    pub positive: String,
    pub negative: String,
    pub flags: Vec<String>,
}

/// Runs the configured protocol on precomputed features.
///
/// `subjects` is only consulted by the subject-split protocol.
pub fn evaluate_features(
    features: &[FeatureVector],
    labels: &[&str],
    subjects: &[&str],
    config: &CrossvalConfig,
) -> Result<HeldOutEvaluation> {
    let classes = class_order(labels);
    let classes: [String; 2] = <[String; 2]>::try_from(classes.clone()).map_err(|_| Error::ClassCount {
        found: classes.len(),
        labels: classes,
    })?;
    let positive = config.positive.clone().unwrap_or_else(|| classes[1].clone());
    if !classes.contains(&positive) {
        return Err(Error::Config(format!(
            "positive class `{positive}` is not one of {classes:?}"
        )));
    }
    let negative = classes
        .iter()
        .find(|c| **c != positive)
        .cloned()
        .expect("two distinct classes");

    // (train, test, held-out subjects)
    type Split = (Vec<usize>, Vec<usize>, Option<Vec<String>>);
    let splits: Vec<Split> = match config.protocol {
        Protocol::KFold { folds, stratified } => {
            let plan = kfold_split(labels, folds, config.seed, stratified)?;
            (0..plan.len())
                .map(|i| {
                    let (train, test) = plan.split(i);
                    (train, test, None)
                })
                .collect()
        }
        Protocol::SubjectSplit { test_fraction } => {
            let s = subject_split(subjects, test_fraction, config.seed)?;
            vec![(s.train, s.test, Some(s.test_subjects))]
        }
    };

    let evaluated = splits
        .par_iter()
        .map(|(train, test, _)| evaluate_split(features, labels, train, test, &positive, &negative))
        .collect::<Result<Vec<_>>>()?;

    let mut folds = Vec::with_capacity(splits.len());
    let mut pooled_confusion = ConfusionCounts::default();
    let mut pooled_scores = Vec::new();
    let mut pooled_truth = Vec::new();
    for (index, ((train, test, subjects), (c, m, scores))) in splits.into_iter().zip(evaluated).enumerate() {
        pooled_confusion = pooled_confusion + c;
        pooled_truth.extend(test.iter().map(|&i| labels[i]));
        pooled_scores.extend(scores);
        folds.push(FoldReport {
            index,
            n_train: train.len(),
            n_test: test.len(),
            test_subjects: subjects,
            confusion: c,
            metrics: m,
        });
    }

    let mut flags = Vec::new();
    for name in ["accuracy", "sensitivity", "specificity", "auc"] {
        let undefined = folds.iter().filter(|f| f.metrics.undefined().contains(&name)).count();
        if undefined > 0 {
            flags.push(format!("{name} undefined in {undefined} of {} folds", folds.len()));
        }
    }
    let mean = MetricsReport {
        accuracy: mean_defined(folds.iter().map(|f| f.metrics.accuracy)),
        sensitivity: mean_defined(folds.iter().map(|f| f.metrics.sensitivity)),
        specificity: mean_defined(folds.iter().map(|f| f.metrics.specificity)),
        auc: mean_defined(folds.iter().map(|f| f.metrics.auc)),
    };
    let mut pooled = metrics(&pooled_confusion)?;
    let roc = match roc_auc(&pooled_scores, &pooled_truth, &positive) {
        Ok(r) => {
            pooled.auc = Some(r.auc);
            r.points
        }
        Err(_) => {
            flags.push("pooled held-out set has a single class; ROC undefined".into());
            Vec::new()
        }
    };
    let aggregate = Aggregate {
        mean,
        pooled_confusion,
        pooled,
    };
    Ok(HeldOutEvaluation {
        folds,
        aggregate,
        roc,
        positive,
        negative,
        flags,
    })
}

/// Full pipeline on raw trials: optional amplitude rejection, feature
/// extraction, the configured protocol, and scatter analysis.
pub fn crossval(trials: &[Trial], region: &RegionSpec, config: &CrossvalConfig) -> Result<EvaluationReport> {
    let (kept, rejected) = match config.reject_threshold {
        Some(t) => {
            let r = amplitude_reject(trials.to_vec(), t)?;
            (r.kept, r.rejected)
        }
        None => (trials.to_vec(), Vec::new()),
    };
    let features = extract_all(&kept, region, &config.features)?;
    let labels: Vec<&str> = kept.iter().map(|t| t.label.as_str()).collect();
    let subjects: Vec<&str> = kept.iter().map(|t| t.subject.as_str()).collect();
    let HeldOutEvaluation {
        folds,
        aggregate,
        roc,
        positive,
        negative,
        mut flags,
    } = evaluate_features(&features, &labels, &subjects, config)?;

    let scatter = match scatter_analysis(&features, &labels) {
        Ok(s) => Some(s),
        Err(e) => {
            flags.push(format!("scatter analysis skipped: {e}"));
            None
        }
    };
    let class_labels = <[String; 2]>::try_from(class_order(&labels)).expect("two classes checked above");

    let mut provenance = Provenance {
        region: region.name.clone(),
        channels: region.channels.clone(),
        k: config.features.k,
        source: config.features.source,
        epsilon: config.features.epsilon,
        protocol: config.protocol,
        seed: config.seed,
        reject_threshold: config.reject_threshold,
        positive,
        negative,
        n_trials: kept.len(),
        n_rejected: rejected.len(),
        config_hash: String::new(),
    };
    provenance.config_hash = config_hash(&provenance);

    Ok(EvaluationReport {
        provenance,
        class_labels,
        folds,
        aggregate,
        roc,
        scatter,
        rejected,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector { values: v.to_vec() }
    }

    #[test]
    fn separable_features_score_perfectly() {
        let features: Vec<FeatureVector> = (0..40)
            .map(|i| {
                if i % 2 == 0 {
                    fv(&[i as f64 * 0.01, 1.0])
                } else {
                    fv(&[10.0 + i as f64 * 0.01, 1.0])
                }
            })
            .collect();
        let labels: Vec<&str> = (0..40).map(|i| if i % 2 == 0 { "a" } else { "b" }).collect();
        let subjects: Vec<&str> = vec!["s"; 40];
        let e = evaluate_features(&features, &labels, &subjects, &CrossvalConfig::kfold(2, 10, 3)).unwrap();
        assert_eq!(e.folds.len(), 10);
        assert_eq!((e.positive.as_str(), e.negative.as_str()), ("b", "a"));
        assert_eq!(e.aggregate.mean.accuracy, Some(100.0));
        assert_eq!(e.aggregate.pooled.auc, Some(1.0));
        assert_eq!(e.aggregate.pooled_confusion.total(), 40);
        assert!(e.roc.len() > 2);
        assert!(e.flags.is_empty());
    }

    #[test]
    fn positive_class_flips_score_orientation() {
        let features: Vec<FeatureVector> = (0..20)
            .map(|i| fv(&[if i < 10 { 0.0 } else { 5.0 } + i as f64 * 0.1]))
            .collect();
        let labels: Vec<&str> = (0..20).map(|i| if i < 10 { "a" } else { "b" }).collect();
        let subjects = vec!["s"; 20];
        let mut cfg = CrossvalConfig::kfold(1, 5, 1);
        cfg.positive = Some("a".into());
        let e = evaluate_features(&features, &labels, &subjects, &cfg).unwrap();
        assert_eq!(e.positive, "a");
        assert_eq!(e.aggregate.pooled.auc, Some(1.0));

        cfg.positive = Some("zzz".into());
        assert!(matches!(
            evaluate_features(&features, &labels, &subjects, &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn summary_table_layout() {
        let row = SummaryRow {
            region: "FRONT".into(),
            k: 2,
            channels: 16,
            accuracy: Some(100.0),
            sensitivity: Some(100.0),
            specificity: None,
            auc: Some(1.0),
        };
        let table = format_summary(&[row]);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].starts_with("Region"));
        assert!(lines[1].contains("FRONT") && lines[1].contains(" 02 ") && lines[1].contains("n/a"));
    }
}
