//! Nuclear matrix `N = AᵀA` of a normalized trial, its singular spectrum,
//! and the dominant-singular-value feature vector.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, JacobiOptions};
use crate::signal::{self, NormalizedTrial, RegionSpec, Trial};

/// Default number of dominant singular values kept as features.
pub const DEFAULT_K: usize = 2;

/// Relative size of a negative eigenvalue (against the trace) still
/// treated as round-off.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// The `n x n` Gram matrix of a normalized trial's channels.
#[derive(Debug, Clone, PartialEq)]
pub struct NuclearMatrix {
    pub entries: DMatrix<f64>,
    pub source: String,
}

impl NuclearMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

/// All singular values of a nuclear matrix, descending and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn leading(&self, k: usize) -> Result<FeatureVector> {
        if k == 0 || k > self.values.len() {
            return Err(Error::Config(format!(
                "feature count k={k} must be in 1..={}",
                self.values.len()
            )));
        }
        Ok(FeatureVector {
            values: self.values[..k].to_vec(),
        })
    }
}

/// The `k` dominant singular values of a trial, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn k(&self) -> usize {
        self.values.len()
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Which matrix the spectrum is taken from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    /// Singular values of `N = AᵀA`.
    #[default]
    NuclearMatrix,
    /// Singular values of the normalized signal matrix `A` itself; these
    /// are the square roots of the default spectrum.
    Signal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub k: usize,
    pub epsilon: f64,
    pub source: SpectrumSource,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            epsilon: signal::DEFAULT_EPSILON,
            source: SpectrumSource::NuclearMatrix,
        }
    }
}

/// `N[i][j] = φⁱ · φʲ`, symmetrized exactly.
pub fn nuclear_matrix(normalized: &NormalizedTrial) -> NuclearMatrix {
    let a = &normalized.phi;
    let gram = a.tr_mul(a);
    NuclearMatrix {
        entries: (&gram + gram.transpose()) * 0.5,
        source: normalized.source.clone(),
    }
}

/// Singular values of a symmetric PSD nuclear matrix.
///
/// They coincide with the eigenvalues; negative round-off down to
/// `-PSD_TOLERANCE * trace` is clamped to zero, anything more negative is
/// reported as [`Error::NotPsd`].
pub fn singular_values(n: &NuclearMatrix) -> Result<SingularSpectrum> {
    singular_values_with(n, JacobiOptions::default())
}

pub fn singular_values_with(n: &NuclearMatrix, opts: JacobiOptions) -> Result<SingularSpectrum> {
    let eig = linalg::symmetric_eigen(&n.entries, opts)?;
    let tolerance = PSD_TOLERANCE * n.trace().abs();
    let values = eig
        .values
        .into_iter()
        .map(|v| {
            if v < -tolerance {
                Err(Error::NotPsd {
                    eigenvalue: v,
                    tolerance: -tolerance,
                })
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SingularSpectrum { values })
}

/// Full spectrum of a trial restricted to a region.
pub fn spectrum(trial: &Trial, region: &RegionSpec, config: &FeatureConfig) -> Result<SingularSpectrum> {
    let selected = signal::region_select(trial, region)?;
    let normalized = signal::normalize(&selected, config.epsilon);
    match config.source {
        SpectrumSource::NuclearMatrix => singular_values(&nuclear_matrix(&normalized)),
        SpectrumSource::Signal => {
            let n = normalized.phi.ncols();
            let mut values = linalg::singular_values(&normalized.phi, JacobiOptions::default())?;
            values.resize(n, 0.0);
            Ok(SingularSpectrum { values })
        }
    }
}

/// Region selection, normalization, nuclear matrix, spectrum, then the
/// `k` largest values.
pub fn extract_features(trial: &Trial, region: &RegionSpec, k: usize) -> Result<FeatureVector> {
    extract_features_with(
        trial,
        region,
        &FeatureConfig {
            k,
            ..Default::default()
        },
    )
}

pub fn extract_features_with(trial: &Trial, region: &RegionSpec, config: &FeatureConfig) -> Result<FeatureVector> {
    if config.k == 0 || config.k > region.len() {
        return Err(Error::Config(format!(
            "feature count k={} must be in 1..={} for region `{}`",
            config.k,
            region.len(),
            region.name
        )));
    }
    spectrum(trial, region, config)?.leading(config.k)
}

/// Sum of all singular values of an arbitrary real matrix.
pub fn nuclear_norm(m: &DMatrix<f64>) -> Result<f64> {
    if let Some(bad) = m.iter().find(|v| !v.is_finite()) {
        return Err(Error::Data(format!("matrix contains non-finite value {bad}")));
    }
    Ok(linalg::singular_values(m, JacobiOptions::default())?.iter().sum())
}
