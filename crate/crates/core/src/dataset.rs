//! On-disk dataset format.
//!
//! A dataset is one JSON manifest plus one headerless CSV per trial
//! (`samples_per_trial` rows, one column per manifest channel). Trial paths
//! are resolved relative to the manifest's directory.
//!
//! ```json
//! {
//!   "channels": ["Fp1", "Fp2"],
//!   "regions": [{"name": "FRONT", "channel_indices": [0, 1]}],
//!   "trials": [{"path": "trials/t0.csv", "label": "EO", "subject": "s01"}],
//!   "samples_per_trial": 150
//! }
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::classify::class_order;
use crate::error::{Error, Result};
use crate::signal::{RegionSpec, Trial};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialEntry {
    /// Defaults to the file stem of `path`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub path: PathBuf,
    pub label: String,
    pub subject: String,
}

impl TrialEntry {
    pub fn trial_id(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub channels: Vec<String>,
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    pub trials: Vec<TrialEntry>,
    pub samples_per_trial: usize,
}

impl DatasetManifest {
    /// Region by name. `ALL` resolves to every channel when not listed.
    pub fn region(&self, name: &str) -> Result<RegionSpec> {
        if let Some(r) = self.regions.iter().find(|r| r.name == name) {
            return Ok(r.clone());
        }
        if name == "ALL" {
            return Ok(RegionSpec::all(self.channels.len()));
        }
        let known: Vec<&str> = self.regions.iter().map(|r| r.name.as_str()).collect();
        Err(Error::Config(format!("unknown region `{name}` (known: {known:?})")))
    }

    /// The two class labels in order of first appearance.
    pub fn class_labels(&self) -> Result<[String; 2]> {
        let labels: Vec<&str> = self.trials.iter().map(|t| t.label.as_str()).collect();
        let classes = class_order(&labels);
        <[String; 2]>::try_from(classes.clone()).map_err(|_| Error::ClassCount {
            found: classes.len(),
            labels: classes,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.len() < 2 {
            return Err(Error::Data("manifest must list at least 2 channels".into()));
        }
        if self.samples_per_trial < 2 {
            return Err(Error::Data("samples_per_trial must be at least 2".into()));
        }
        for r in &self.regions {
            r.validate(self.channels.len())?;
        }
        self.class_labels()?;
        let mut ids = HashSet::new();
        for t in &self.trials {
            let id = t.trial_id();
            if !ids.insert(id.clone()) {
                return Err(Error::Data(format!("duplicate trial id `{id}`")));
            }
        }
        Ok(())
    }
}

/// A loaded manifest plus its validated trials, in manifest order.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub trials: Vec<Trial>,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<Dataset> {
    let manifest_path = manifest_path.as_ref();
    let manifest = load_manifest(manifest_path)?;
    manifest.validate()?;
    let root = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let trials = manifest
        .trials
        .iter()
        .map(|entry| {
            let id = entry.trial_id();
            let samples = read_trial_csv(
                root.join(&entry.path),
                &id,
                manifest.samples_per_trial,
                manifest.channels.len(),
            )?;
            Trial::new(id, entry.label.clone(), entry.subject.clone(), samples)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { manifest, trials })
}

/// Reads a headerless `rows x cols` CSV of reals.
pub fn read_trial_csv(path: impl AsRef<Path>, trial_id: &str, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut data = Vec::with_capacity(rows * cols);
    let mut found_rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != cols {
            return Err(Error::Dimension {
                trial: trial_id.to_string(),
                expected_rows: rows,
                expected_cols: cols,
                found_rows: found_rows + 1,
                found_cols: record.len(),
            });
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(path, format!("row {found_rows}, column {c}: `{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    trial: trial_id.to_string(),
                    row: found_rows,
                    col: c,
                });
            }
            data.push(v);
        }
        found_rows += 1;
    }
    if found_rows != rows {
        return Err(Error::Dimension {
            trial: trial_id.to_string(),
            expected_rows: rows,
            expected_cols: cols,
            found_rows,
            found_cols: cols,
        });
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::parse(path, format!("{other:?}")),
        }
    } else {
        Error::parse(path, e)
    }
}

/// Writes a matrix as headerless CSV using shortest round-trip formatting.
pub fn write_trial_csv(path: impl AsRef<Path>, samples: &DMatrix<f64>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(samples.len() * 12);
    for r in 0..samples.nrows() {
        for c in 0..samples.ncols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&samples[(r, c)].to_string());
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes `manifest.json` and one CSV per trial under `dir/trials/`.
/// Manifest trial entries are replaced with the written files.
pub fn write_dataset(dir: impl AsRef<Path>, mut manifest: DatasetManifest, trials: &[Trial]) -> Result<PathBuf> {
    let dir = dir.as_ref();
    let trial_dir = dir.join("trials");
    fs::create_dir_all(&trial_dir).map_err(|e| Error::io(&trial_dir, e))?;
    manifest.trials = trials
        .iter()
        .map(|t| {
            let rel = PathBuf::from("trials").join(format!("{}.csv", t.id));
            write_trial_csv(dir.join(&rel), &t.samples)?;
            Ok(TrialEntry {
                id: None,
                path: rel,
                label: t.label.clone(),
                subject: t.subject.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// One row of a feature or spectrum table.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub trial_id: String,
    pub label: String,
    pub subject: String,
    pub values: Vec<f64>,
}

/// CSV with columns `trial_id,label,subject,<prefix>1..<prefix>k`.
///
/// Feature dumps use prefix `f`, full singular spectra use `s`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, |r| r.values.len())
    }

    pub fn to_csv(&self, prefix: &str) -> String {
        let k = self.width();
        let mut out = String::from("trial_id,label,subject");
        for i in 1..=k {
            out.push_str(&format!(",{prefix}{i}"));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{}", r.trial_id, r.label, r.subject));
            for v in &r.values {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>, prefix: &str) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv(prefix)).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| csv_error(path, e))?;
        let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
        if headers.len() < 3 || &headers[0] != "trial_id" || &headers[1] != "label" || &headers[2] != "subject" {
            return Err(Error::parse(path, "expected header `trial_id,label,subject,...`"));
        }
        let k = headers.len() - 3;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| csv_error(path, e))?;
            let values = record
                .iter()
                .skip(3)
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::parse(path, format!("`{f}` is not a finite number")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != k {
                return Err(Error::parse(
                    path,
                    format!("row has {} values, header has {k}", values.len()),
                ));
            }
            rows.push(FeatureRow {
                trial_id: record[0].to_string(),
                label: record[1].to_string(),
                subject: record[2].to_string(),
                values,
            });
        }
        Ok(Self { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(n_trials: usize) -> DatasetManifest {
        DatasetManifest {
            channels: (0..3).map(|i| format!("C{i}")).collect(),
            regions: vec![RegionSpec::new("PAIR", vec![2, 0])],
            trials: (0..n_trials)
                .map(|i| TrialEntry {
                    id: None,
                    path: format!("trials/t{i}.csv").into(),
                    label: if i % 2 == 0 { "A" } else { "B" }.into(),
                    subject: format!("s{}", i / 2),
                })
                .collect(),
            samples_per_trial: 4,
        }
    }

    fn trials(n: usize) -> Vec<Trial> {
        let m = manifest(n);
        m.trials
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let samples = DMatrix::from_fn(4, 3, |r, c| (i * 12 + r * 3 + c) as f64 * 0.1 - 1.7);
                Trial::new(e.trial_id(), e.label.clone(), e.subject.clone(), samples).unwrap()
            })
            .collect()
    }

    #[test]
    fn write_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let ts = trials(4);
        let path = write_dataset(dir.path(), manifest(0), &ts).unwrap();
        let ds = load_dataset(&path).unwrap();
        assert_eq!(ds.trials, ts);
        assert_eq!(ds.manifest.class_labels().unwrap(), ["A".to_string(), "B".to_string()]);
        assert_eq!(ds.manifest.region("PAIR").unwrap().channels, vec![2, 0]);
        assert_eq!(ds.manifest.region("ALL").unwrap().channels, vec![0, 1, 2]);
        assert!(matches!(ds.manifest.region("OCCIP"), Err(Error::Config(_))));
    }

    #[test]
    fn short_trial_file_names_the_trial() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_dataset(dir.path(), manifest(0), &trials(2)).unwrap();
        fs::write(dir.path().join("trials/t1.csv"), "1,2,3\n4,5,6\n7,8,9\n").unwrap();
        match load_dataset(&path) {
            Err(Error::Dimension {
                trial,
                expected_rows: 4,
                found_rows: 3,
                ..
            }) => assert_eq!(trial, "t1"),
            other => panic!("unexpected {other:?}"),
        }
        fs::write(dir.path().join("trials/t1.csv"), "1,2,3\n4,5\n7,8,9\n1,1,1\n").unwrap();
        assert!(matches!(
            load_dataset(&path),
            Err(Error::Dimension { found_cols: 2, .. })
        ));
    }

    #[test]
    fn non_finite_entry_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_dataset(dir.path(), manifest(0), &trials(2)).unwrap();
        fs::write(dir.path().join("trials/t0.csv"), "1,2,3\n4,NaN,6\n7,8,9\n1,1,1\n").unwrap();
        assert!(matches!(
            load_dataset(&path),
            Err(Error::NonFinite { row: 1, col: 1, .. })
        ));
    }

    #[test]
    fn label_count_and_missing_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut ts = trials(2);
        ts[1].label = "A".into();
        let path = write_dataset(dir.path(), manifest(0), &ts).unwrap();
        assert!(matches!(load_dataset(&path), Err(Error::ClassCount { found: 1, .. })));

        let path = write_dataset(dir.path(), manifest(0), &trials(2)).unwrap();
        fs::remove_file(dir.path().join("trials/t0.csv")).unwrap();
        assert!(matches!(load_dataset(&path), Err(Error::Io { .. })));
        assert!(matches!(
            load_dataset(dir.path().join("nope.json")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn feature_table_round_trip() {
        let table = FeatureTable {
            rows: vec![
                FeatureRow {
                    trial_id: "t0".into(),
                    label: "A".into(),
                    subject: "s0".into(),
                    values: vec![1234.5678, 1e-9],
                },
                FeatureRow {
                    trial_id: "t1".into(),
                    label: "B".into(),
                    subject: "s0".into(),
                    values: vec![0.1 + 0.2, 3.0],
                },
            ],
        };
        let csv = table.to_csv("f");
        assert!(csv.starts_with("trial_id,label,subject,f1,f2\n"));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        table.write(&p, "f").unwrap();
        assert_eq!(FeatureTable::read(&p).unwrap(), table);
    }
}
