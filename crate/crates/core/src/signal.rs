//! Trial data model, channel-region selection, amplitude rejection and the
//! per-sample cross-channel normalization that feeds the nuclear matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default floor below which a time sample's cross-channel standard
/// deviation is treated as zero.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Default amplitude-rejection threshold, in μV.
pub const DEFAULT_REJECT_THRESHOLD: f64 = 90.0;

/// One event's multichannel recording.
///
/// `samples` is `d x n`: one row per time sample, one column per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub id: String,
    pub label: String,
    pub subject: String,
    pub samples: DMatrix<f64>,
}

impl Trial {
    /// Builds a trial, rejecting matrices smaller than 2x2 or holding
    /// non-finite values.
    pub fn new(
        id: impl Into<String>,
        label: impl Into<String>,
        subject: impl Into<String>,
        samples: DMatrix<f64>,
    ) -> Result<Self> {
        let id = id.into();
        if samples.nrows() < 2 || samples.ncols() < 2 {
            return Err(Error::Data(format!(
                "trial `{id}` must have at least 2 samples and 2 channels, found {}x{}",
                samples.nrows(),
                samples.ncols()
            )));
        }
        for c in 0..samples.ncols() {
            for r in 0..samples.nrows() {
                if !samples[(r, c)].is_finite() {
                    return Err(Error::NonFinite {
                        trial: id,
                        row: r,
                        col: c,
                    });
                }
            }
        }
        Ok(Self {
            id,
            label: label.into(),
            subject: subject.into(),
            samples,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_channels(&self) -> usize {
        self.samples.ncols()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// A named group of channel indices (a scalp region).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub name: String,
    #[serde(rename = "channel_indices")]
    pub channels: Vec<usize>,
}

impl RegionSpec {
    pub fn new(name: impl Into<String>, channels: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            channels,
        }
    }

    /// The region covering channels `0..n_channels` in order.
    pub fn all(n_channels: usize) -> Self {
        Self::new("ALL", (0..n_channels).collect())
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Checks the region is non-empty, duplicate-free and within
    /// `0..n_channels`.
    pub fn validate(&self, n_channels: usize) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::Config(format!("region `{}` has no channels", self.name)));
        }
        let mut seen = vec![false; n_channels];
        for &c in &self.channels {
            if c >= n_channels {
                return Err(Error::Config(format!(
                    "region `{}` references channel {c}, but only {n_channels} channels exist",
                    self.name
                )));
            }
            if seen[c] {
                return Err(Error::Config(format!(
                    "region `{}` lists channel {c} more than once",
                    self.name
                )));
            }
            seen[c] = true;
        }
        Ok(())
    }
}

/// Region sizes of the 100-channel scalp layout: temporal, frontal,
/// central, parietal and occipital.
pub const STANDARD_REGION_SIZES: [(&str, usize); 5] =
    [("TEMP", 8), ("FRONT", 16), ("CENT", 20), ("PERI", 18), ("OCCIP", 18)];

/// Channel count of the full layout that [`standard_regions`] describes.
pub const STANDARD_LAYOUT_CHANNELS: usize = 100;

/// Preset regions for a 100-channel montage, assigned as contiguous blocks
/// in the order TEMP, FRONT, CENT, PERI, OCCIP, followed by `ALL`.
///
/// The five named blocks cover channels `0..80`; the remaining 20 channels
/// only belong to `ALL`. Datasets with a real montage should list their own
/// regions in the manifest.
pub fn standard_regions() -> Vec<RegionSpec> {
    let mut start = 0;
    let mut regions: Vec<RegionSpec> = STANDARD_REGION_SIZES
        .iter()
        .map(|&(name, size)| {
            let r = RegionSpec::new(name, (start..start + size).collect());
            start += size;
            r
        })
        .collect();
    regions.push(RegionSpec::all(STANDARD_LAYOUT_CHANNELS));
    regions
}

/// Restricts a trial to the region's channels, in region order.
pub fn region_select(trial: &Trial, region: &RegionSpec) -> Result<Trial> {
    region.validate(trial.n_channels())?;
    if region.len() < 2 {
        return Err(Error::Config(format!(
            "region `{}` must select at least 2 channels",
            region.name
        )));
    }
    Ok(Trial {
        id: trial.id.clone(),
        label: trial.label.clone(),
        subject: trial.subject.clone(),
        samples: trial.samples.select_columns(region.channels.iter()),
    })
}

/// Result of [`amplitude_reject`].
#[derive(Debug, Clone, Default)]
pub struct Rejection {
    pub kept: Vec<Trial>,
    /// Ids of rejected trials, in input order.
    pub rejected: Vec<String>,
}

/// Drops every trial with any `|sample| > threshold`. Order is preserved on
/// both sides of the partition.
pub fn amplitude_reject(trials: Vec<Trial>, threshold: f64) -> Result<Rejection> {
    if threshold.is_nan() || threshold <= 0.0 || !threshold.is_finite() {
        return Err(Error::Config(format!(
            "rejection threshold must be a positive finite number, got {threshold}"
        )));
    }
    let mut out = Rejection::default();
    for trial in trials {
        if trial.samples.iter().any(|v| v.abs() > threshold) {
            out.rejected.push(trial.id);
        } else {
            out.kept.push(trial);
        }
    }
    Ok(out)
}

/// A trial after cross-channel normalization: each row has zero mean and,
/// unless degenerate, unit population variance across channels.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTrial {
    pub phi: DMatrix<f64>,
    pub source: String,
    /// Rows whose cross-channel spread fell below epsilon and were zeroed.
    pub degenerate_rows: Vec<usize>,
}

impl NormalizedTrial {
    pub fn is_fully_non_degenerate(&self) -> bool {
        self.degenerate_rows.is_empty()
    }
}

/// Centers each time sample on its cross-channel mean and divides by the
/// cross-channel population standard deviation.
///
/// A row whose standard deviation is below `epsilon * max(1, max |x|)` is
/// set to zero.
pub fn normalize(trial: &Trial, epsilon: f64) -> NormalizedTrial {
    let (d, n) = trial.samples.shape();
    let inv_n = 1.0 / n as f64;
    let mut phi = DMatrix::zeros(d, n);
    let mut degenerate_rows = Vec::new();
    for t in 0..d {
        let row = trial.samples.row(t);
        let mean = row.iter().sum::<f64>() * inv_n;
        let var = row.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() * inv_n;
        let std = var.sqrt();
        let scale = row.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if std < epsilon * scale {
            degenerate_rows.push(t);
            continue;
        }
        for (c, x) in row.iter().enumerate() {
            phi[(t, c)] = (x - mean) / std;
        }
    }
    NormalizedTrial {
        phi,
        source: trial.id.clone(),
        degenerate_rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn trial(rows: usize, cols: usize, data: &[f64]) -> Trial {
        Trial::new("t", "a", "s", DMatrix::from_row_slice(rows, cols, data)).unwrap()
    }

    #[test]
    fn trial_rejects_non_finite_and_tiny_shapes() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 0.0]);
        assert!(matches!(
            Trial::new("x", "a", "s", bad),
            Err(Error::NonFinite { row: 0, col: 1, .. })
        ));
        let thin = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(Trial::new("x", "a", "s", thin).is_err());
    }

    #[test]
    fn symmetric_pair_normalizes_to_unit() {
        // ch1 = [1, 2], ch2 = [-1, -2]
        let t = trial(2, 2, &[1.0, -1.0, 2.0, -2.0]);
        let z = normalize(&t, DEFAULT_EPSILON);
        assert_eq!(z.phi, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 1.0, -1.0]));
        assert!(z.is_fully_non_degenerate());
    }

    #[test]
    fn equal_channels_give_zero_row() {
        let t = trial(2, 2, &[5.0, 5.0, 1.0, 3.0]);
        let z = normalize(&t, DEFAULT_EPSILON);
        assert_eq!(z.phi.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0]);
        assert_eq!(z.degenerate_rows, vec![0]);
    }

    #[test]
    fn three_channel_row() {
        let t = trial(2, 3, &[1.0, 2.0, 3.0, 0.0, 1.0, 0.0]);
        let z = normalize(&t, DEFAULT_EPSILON);
        assert_abs_diff_eq!(z.phi[(0, 0)], -1.224744871391589, epsilon = 1e-12);
        assert_abs_diff_eq!(z.phi[(0, 1)], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.phi[(0, 2)], 1.224744871391589, epsilon = 1e-12);
    }

    #[test]
    fn region_select_keeps_order_and_metadata() {
        let t = trial(2, 4, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let r = RegionSpec::new("X", vec![3, 1]);
        let s = region_select(&t, &r).unwrap();
        assert_eq!(s.samples, DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 7.0, 5.0]));
        assert_eq!((s.label.as_str(), s.subject.as_str()), ("a", "s"));

        assert_eq!(region_select(&t, &RegionSpec::all(4)).unwrap(), t);
        assert!(region_select(&t, &RegionSpec::new("X", vec![0, 4])).is_err());
        assert!(region_select(&t, &RegionSpec::new("X", vec![1, 1])).is_err());
    }

    #[test]
    fn frontal_preset_on_full_montage() {
        let regions = standard_regions();
        let front = regions.iter().find(|r| r.name == "FRONT").unwrap();
        let t = Trial::new("t", "a", "s", DMatrix::from_fn(10, 100, |r, c| (r * c) as f64)).unwrap();
        assert_eq!(region_select(&t, front).unwrap().n_channels(), 16);
        assert!(region_select(&t, &RegionSpec::new("BAD", vec![100])).is_err());
        for r in &regions {
            r.validate(STANDARD_LAYOUT_CHANNELS).unwrap();
        }
    }

    #[test]
    fn rejection_is_strict() {
        let mk = |id: &str, peak: f64| {
            Trial::new(id, "a", "s", DMatrix::from_row_slice(2, 2, &[0.0, peak, 0.0, 0.0])).unwrap()
        };
        let out = amplitude_reject(vec![mk("hi", 95.0), mk("zero", 0.0), mk("edge", -90.0)], 90.0).unwrap();
        assert_eq!(out.rejected, vec!["hi".to_string()]);
        let kept: Vec<_> = out.kept.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(kept, vec!["zero", "edge"]);

        assert!(amplitude_reject(vec![], 90.0).unwrap().kept.is_empty());
        assert!(amplitude_reject(vec![], 0.0).is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = DMatrix<f64>> {
        (2usize..12, 2usize..10).prop_flat_map(|(d, n)| {
            prop::collection::vec(-100.0f64..100.0, d * n).prop_map(move |v| DMatrix::from_row_slice(d, n, &v))
        })
    }

    proptest! {
        #[test]
        fn rows_are_centered_and_scaled(m in matrix_strategy()) {
            let n = m.ncols() as f64;
            let t = Trial::new("p", "a", "s", m).unwrap();
            let z = normalize(&t, DEFAULT_EPSILON);
            for r in 0..z.phi.nrows() {
                let row = z.phi.row(r);
                prop_assert!(row.sum().abs() <= 1e-9 * n);
                if !z.degenerate_rows.contains(&r) {
                    prop_assert!((row.norm_squared() - n).abs() <= 1e-9 * n);
                }
            }
        }

        #[test]
        fn renormalizing_is_a_fixed_point(m in matrix_strategy()) {
            let t = Trial::new("p", "a", "s", m).unwrap();
            let once = normalize(&t, DEFAULT_EPSILON);
            let again = normalize(&Trial { samples: once.phi.clone(), ..t }, DEFAULT_EPSILON);
            prop_assert!((&once.phi - &again.phi).amax() <= 1e-9);
        }

        #[test]
        fn rejection_partitions_input(peaks in prop::collection::vec(0.0f64..200.0, 0..20)) {
            let trials: Vec<Trial> = peaks.iter().enumerate().map(|(i, &p)| {
                Trial::new(format!("t{i}"), "a", "s", DMatrix::from_row_slice(2, 2, &[p, 0.0, 0.0, 0.0])).unwrap()
            }).collect();
            let out = amplitude_reject(trials, 90.0).unwrap();
            prop_assert_eq!(out.kept.len() + out.rejected.len(), peaks.len());
            let mut ids: Vec<String> = out.kept.iter().map(|t| t.id.clone()).chain(out.rejected.clone()).collect();
            ids.sort();
            let mut expected: Vec<String> = (0..peaks.len()).map(|i| format!("t{i}")).collect();
            expected.sort();
            prop_assert_eq!(ids, expected);
        }
    }
}
