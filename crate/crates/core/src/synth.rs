//! Seeded two-class synthetic trials and blink-like artifact injection.
//!
//! Each class `c` owns a fixed channel-mixing matrix `B_c` (`n x r`). A
//! trial of class `c` is `Zᵀ B_cᵀ + ε`, with fresh standard-normal latent
//! sources `Z` (`r x d`) and white sensor noise `ε`. The classes differ in
//! how many latent sources they actually use, which changes the
//! cross-channel correlation structure that survives normalization.
//!
//! `separation` interpolates the mixing matrices between a common matrix
//! shared by both classes (`0`) and fully class-specific ones (`1`).

use nalgebra::DMatrix;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetManifest;
use crate::error::{Error, Result};
use crate::signal::{standard_regions, RegionSpec, Trial, DEFAULT_REJECT_THRESHOLD, STANDARD_LAYOUT_CHANNELS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_channels: usize,
    pub d_samples: usize,
    pub trials_per_class: usize,
    /// Subjects are assigned to trials round-robin.
    pub subjects: usize,
    pub separation: f64,
    pub seed: u64,
    /// Number of latent sources used by each class.
    pub class_factor_ranks: (usize, usize),
    /// Norm of each channel's mixing row; the per-channel signal standard
    /// deviation, in μV.
    pub signal_scale: f64,
    /// Standard deviation of the sensor noise, in μV.
    pub noise_std: f64,
    pub labels: (String, String),
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_channels: 16,
            d_samples: 150,
            trials_per_class: 300,
            subjects: 10,
            separation: 1.0,
            seed: 0,
            class_factor_ranks: (2, 8),
            signal_scale: 10.0,
            noise_std: 0.5,
            labels: ("A".into(), "B".into()),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_channels < 2 || self.d_samples < 2 {
            return bad(format!(
                "need at least 2 channels and 2 samples, got {} and {}",
                self.n_channels, self.d_samples
            ));
        }
        if self.trials_per_class == 0 {
            return bad("trials_per_class must be positive".into());
        }
        if self.subjects == 0 || self.subjects > 2 * self.trials_per_class {
            return bad(format!(
                "subjects must be in 1..={}, got {}",
                2 * self.trials_per_class,
                self.subjects
            ));
        }
        let (r1, r2) = self.class_factor_ranks;
        if r1 == 0 || r2 == 0 || r1 > self.n_channels || r2 > self.n_channels {
            return bad(format!(
                "class factor ranks must be in 1..={}, got ({r1}, {r2})",
                self.n_channels
            ));
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return bad(format!(
                "separation must be a finite non-negative number, got {}",
                self.separation
            ));
        }
        if !(self.signal_scale > 0.0 && self.signal_scale.is_finite()) {
            return bad("signal_scale must be positive".into());
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return bad("noise_std must be non-negative".into());
        }
        if self.labels.0 == self.labels.1 {
            return bad("class labels must differ".into());
        }
        Ok(())
    }
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Regions written into a synthetic manifest: the standard preset for a
/// full montage, otherwise `ALL` plus a `FRONT` block of the first (up to)
/// 16 channels.
pub fn synthetic_regions(n_channels: usize) -> Vec<RegionSpec> {
    if n_channels >= STANDARD_LAYOUT_CHANNELS {
        let mut r = standard_regions();
        if let Some(all) = r.iter_mut().find(|r| r.name == "ALL") {
            *all = RegionSpec::all(n_channels);
        }
        r
    } else {
        vec![
            RegionSpec::all(n_channels),
            RegionSpec::new("FRONT", (0..n_channels.min(16)).collect()),
        ]
    }
}

/// Generates `2 * trials_per_class` trials, all of the first class
/// followed by all of the second, plus a manifest describing them.
///
/// The manifest's trial list is empty; [`crate::dataset::write_dataset`]
/// fills it in when the trials are written.
pub fn generate_dataset(cfg: &GeneratorConfig) -> Result<(Vec<Trial>, DatasetManifest)> {
    cfg.validate()?;
    let n = cfg.n_channels;
    let (r1, r2) = cfg.class_factor_ranks;
    let r_max = r1.max(r2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let common = gaussian_matrix(&mut rng, n, r_max);
    let mixing: Vec<DMatrix<f64>> = [r1, r2]
        .into_iter()
        .map(|rank| {
            let mut specific = gaussian_matrix(&mut rng, n, r_max);
            specific.columns_mut(rank, r_max - rank).fill(0.0);
            let mut b = &common * (1.0 - cfg.separation) + specific * cfg.separation;
            for mut row in b.row_iter_mut() {
                let norm = row.norm();
                if norm > 0.0 {
                    row *= cfg.signal_scale / norm;
                }
            }
            b
        })
        .collect();

    let noise = Normal::new(0.0, cfg.noise_std).map_err(|e| Error::Config(e.to_string()))?;
    let labels = [&cfg.labels.0, &cfg.labels.1];
    let total = 2 * cfg.trials_per_class;
    let mut trials = Vec::with_capacity(total);
    for j in 0..total {
        let class = j / cfg.trials_per_class;
        let latent = gaussian_matrix(&mut rng, cfg.d_samples, r_max);
        let mut samples = latent * mixing[class].transpose();
        for v in samples.iter_mut() {
            *v += noise.sample(&mut rng);
        }
        trials.push(Trial::new(
            format!("trial_{j:05}"),
            labels[class].clone(),
            format!("subject_{:03}", j % cfg.subjects),
            samples,
        )?);
    }

    let manifest = DatasetManifest {
        channels: (0..n).map(|i| format!("E{:03}", i + 1)).collect(),
        regions: synthetic_regions(n),
        trials: Vec::new(),
        samples_per_trial: cfg.d_samples,
    };
    Ok((trials, manifest))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactConfig {
    /// Fraction of trials that receive a pulse; exactly
    /// `round(rate * trials)` are chosen.
    pub rate: f64,
    /// Peak pulse amplitude, in μV.
    pub amplitude: f64,
    /// Pulse length in samples.
    pub width: usize,
    /// Fraction of channels hit in an affected trial (at least one).
    pub channel_fraction: f64,
    pub seed: u64,
}

impl Default for ArtifactConfig {
    fn default() -> Self {
        Self {
            rate: 0.3,
            amplitude: DEFAULT_REJECT_THRESHOLD,
            width: 20,
            channel_fraction: 0.25,
            seed: 0,
        }
    }
}

/// Half-cosine pulse of `width` samples whose peak sample, at index
/// `(width - 1) / 2`, equals `amplitude`.
pub fn half_cosine_pulse(amplitude: f64, width: usize) -> Vec<f64> {
    let centre = (width.saturating_sub(1) / 2) as f64;
    (0..width)
        .map(|j| amplitude * (std::f64::consts::PI * (j as f64 - centre) / width as f64).cos())
        .collect()
}

/// Output of [`inject_artifacts`].
#[derive(Debug, Clone)]
pub struct Injection {
    pub trials: Vec<Trial>,
    /// Ids of the trials that received a pulse, in input order.
    pub affected: Vec<String>,
}

/// Adds a half-cosine pulse to a seeded subset of trials, on a seeded
/// subset of channels, at a seeded onset. Untouched trials are returned
/// unchanged.
pub fn inject_artifacts(trials: &[Trial], cfg: &ArtifactConfig) -> Result<Injection> {
    if !(0.0..=1.0).contains(&cfg.rate) {
        return Err(Error::Config(format!(
            "artifact rate must be in [0, 1], got {}",
            cfg.rate
        )));
    }
    if !(0.0..=1.0).contains(&cfg.channel_fraction) {
        return Err(Error::Config(format!(
            "artifact channel fraction must be in [0, 1], got {}",
            cfg.channel_fraction
        )));
    }
    if !cfg.amplitude.is_finite() {
        return Err(Error::Config("artifact amplitude must be finite".into()));
    }
    if cfg.width == 0 {
        return Err(Error::Config("artifact width must be positive".into()));
    }
    if let Some(t) = trials.iter().find(|t| cfg.width >= t.n_samples()) {
        return Err(Error::Config(format!(
            "artifact width {} must be shorter than trial `{}` ({} samples)",
            cfg.width,
            t.id,
            t.n_samples()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let count = (cfg.rate * trials.len() as f64).round() as usize;
    let mut order: Vec<usize> = (0..trials.len()).collect();
    order.shuffle(&mut rng);
    let mut chosen = order[..count].to_vec();
    chosen.sort_unstable();

    let pulse = half_cosine_pulse(cfg.amplitude, cfg.width);
    let mut out = trials.to_vec();
    let mut affected = Vec::with_capacity(count);
    for i in chosen {
        let trial = &mut out[i];
        let n = trial.n_channels();
        let hit = ((cfg.channel_fraction * n as f64).round() as usize).clamp(1, n);
        let channels = index::sample(&mut rng, n, hit);
        let onset = rng.random_range(0..=trial.n_samples() - cfg.width);
        for c in channels.iter() {
            for (j, p) in pulse.iter().enumerate() {
                trial.samples[(onset + j, c)] += p;
            }
        }
        affected.push(trial.id.clone());
    }
    Ok(Injection { trials: out, affected })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GeneratorConfig {
        GeneratorConfig {
            n_channels: 6,
            d_samples: 30,
            trials_per_class: 5,
            subjects: 3,
            class_factor_ranks: (1, 4),
            ..Default::default()
        }
    }

    #[test]
    fn shape_balance_and_subjects() {
        let (trials, manifest) = generate_dataset(&small()).unwrap();
        assert_eq!(trials.len(), 10);
        assert_eq!(trials.iter().filter(|t| t.label == "A").count(), 5);
        assert!(trials.iter().all(|t| t.samples.shape() == (30, 6)));
        assert_eq!(trials[4].subject, "subject_001");
        assert_eq!(manifest.channels.len(), 6);
        assert_eq!(manifest.samples_per_trial, 30);
        assert_eq!(manifest.regions[0], RegionSpec::all(6));
    }

    #[test]
    fn same_seed_same_data() {
        let a = generate_dataset(&small()).unwrap().0;
        let b = generate_dataset(&small()).unwrap().0;
        assert_eq!(a, b);
        let c = generate_dataset(&GeneratorConfig { seed: 1, ..small() }).unwrap().0;
        assert_ne!(a, c);
    }

    #[test]
    fn config_validation() {
        assert!(generate_dataset(&GeneratorConfig {
            class_factor_ranks: (0, 2),
            ..small()
        })
        .is_err());
        assert!(generate_dataset(&GeneratorConfig {
            class_factor_ranks: (2, 7),
            ..small()
        })
        .is_err());
        assert!(generate_dataset(&GeneratorConfig {
            subjects: 11,
            ..small()
        })
        .is_err());
        assert!(generate_dataset(&GeneratorConfig {
            separation: -0.1,
            ..small()
        })
        .is_err());
    }

    #[test]
    fn full_montage_gets_preset_regions() {
        let names: Vec<String> = synthetic_regions(100).into_iter().map(|r| r.name).collect();
        assert_eq!(names, ["TEMP", "FRONT", "CENT", "PERI", "OCCIP", "ALL"]);
    }

    #[test]
    fn pulse_peak_is_exact() {
        for w in [1, 2, 5, 20] {
            let p = half_cosine_pulse(90.0, w);
            assert_eq!(p.len(), w);
            assert_eq!(p[(w - 1) / 2], 90.0);
            assert!(p.iter().all(|v| *v >= 0.0 && *v <= 90.0));
        }
    }

    #[test]
    fn zero_rate_is_identity() {
        let trials = generate_dataset(&small()).unwrap().0;
        let cfg = ArtifactConfig {
            rate: 0.0,
            width: 5,
            ..Default::default()
        };
        let out = inject_artifacts(&trials, &cfg).unwrap();
        assert_eq!(out.trials, trials);
        assert!(out.affected.is_empty());
    }

    #[test]
    fn full_rate_reaches_amplitude_and_stays_local() {
        let trials = generate_dataset(&small()).unwrap().0;
        let cfg = ArtifactConfig {
            rate: 1.0,
            width: 7,
            ..Default::default()
        };
        let out = inject_artifacts(&trials, &cfg).unwrap();
        assert_eq!(out.affected.len(), trials.len());
        for (before, after) in trials.iter().zip(&out.trials) {
            assert!(after.max_abs() >= cfg.amplitude - before.max_abs());
            let diff = &after.samples - &before.samples;
            let changed_rows: Vec<usize> = (0..diff.nrows()).filter(|&r| diff.row(r).amax() > 0.0).collect();
            assert!(changed_rows.last().unwrap() - changed_rows.first().unwrap() < cfg.width);
            let changed_cols = (0..diff.ncols()).filter(|&c| diff.column(c).amax() > 0.0).count();
            // round(0.25 * 6) = 2 channels
            assert_eq!(changed_cols, 2);
        }
        assert_eq!(inject_artifacts(&trials, &cfg).unwrap().trials, out.trials);
    }

    #[test]
    fn partial_rate_count_and_errors() {
        let trials = generate_dataset(&small()).unwrap().0;
        let cfg = ArtifactConfig {
            rate: 0.3,
            width: 5,
            ..Default::default()
        };
        let out = inject_artifacts(&trials, &cfg).unwrap();
        assert_eq!(out.affected.len(), 3);
        for (before, after) in trials.iter().zip(&out.trials) {
            assert_eq!(before == after, !out.affected.contains(&before.id));
        }
        assert!(inject_artifacts(
            &trials,
            &ArtifactConfig {
                width: 30,
                ..cfg.clone()
            }
        )
        .is_err());
        assert!(inject_artifacts(&trials, &ArtifactConfig { rate: 1.5, ..cfg }).is_err());
    }
}
