//! Nuclear features for binary classification of multichannel EEG trials.
//!
//! The pipeline per trial is: select a region's channels, normalize every
//! time sample across channels, form the Gram ("nuclear") matrix of the
//! normalized channels, and keep its `k` largest singular values. A
//! class-means minimum-distance classifier separates the two classes, and
//! [`eval`] wraps the whole thing in cross-validation with confusion
//! metrics, ROC/AUC and scatter-matrix analysis.
//!
//! ```
//! use nucleeg::{nuclear, signal::RegionSpec, synth};
//!
//! let cfg = synth::GeneratorConfig { trials_per_class: 4, subjects: 2, ..Default::default() };
//! let (trials, _manifest) = synth::generate_dataset(&cfg).unwrap();
//! let region = RegionSpec::all(cfg.n_channels);
//! let f = nuclear::extract_features(&trials[0], &region, 2).unwrap();
//! assert_eq!(f.k(), 2);
//! assert!(f.values[0] >= f.values[1]);
//! ```
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod classify;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod nuclear;
pub mod plot;
pub mod signal;
pub mod synth;

pub use classify::CmmdcModel;
pub use dataset::{load_dataset, Dataset, DatasetManifest};
pub use error::{Error, ErrorKind, Result};
pub use nuclear::{extract_features, nuclear_matrix, nuclear_norm, FeatureVector, NuclearMatrix, SingularSpectrum};
pub use signal::{normalize, region_select, NormalizedTrial, RegionSpec, Trial};
