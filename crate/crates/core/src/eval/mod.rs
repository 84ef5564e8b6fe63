//! Cross-validation, subject-held-out splits, confusion metrics, ROC/AUC
//! and scatter-matrix discriminant analysis.

mod crossval;
mod metrics;
mod roc;
mod scatter;
mod split;

pub use crossval::{
    crossval, evaluate_features, extract_all, format_summary, Aggregate, CrossvalConfig, EvaluationReport, FoldReport,
    HeldOutEvaluation, Protocol, Provenance, SummaryRow, DEFAULT_FOLDS, DEFAULT_SEED,
};
pub use metrics::{confusion, metrics, ConfusionCounts, MetricsReport};
pub use roc::{roc_auc, RocCurve, RocPoint};
pub use scatter::{scatter_analysis, ScatterAnalysis, SINGULAR_RTOL};
pub use split::{kfold_split, subject_split, test_subject_count, FoldPlan, SubjectSplit};
