//! Class-means minimum-distance classifier (CMMDC).
//!
//! Fitting stores one mean feature vector per class and nothing else. A
//! query goes to the class whose mean is nearest in Euclidean distance;
//! exact ties go to the first class.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
}

/// The two class means plus their labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmmdcModel {
    /// Ordered by first appearance in the training data.
    pub class_labels: [String; 2],
    pub means: [Vec<f64>; 2],
    pub k: usize,
    pub metric: Metric,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distinct labels in order of first appearance.
pub fn class_order<L: AsRef<str>>(labels: &[L]) -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    for l in labels {
        if !seen.iter().any(|s| s == l.as_ref()) {
            seen.push(l.as_ref().to_string());
        }
    }
    seen
}

impl CmmdcModel {
    /// Arithmetic class means of the training features.
    pub fn fit<F: AsRef<[f64]>, L: AsRef<str>>(features: &[F], labels: &[L]) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Mismatch {
                expected: features.len(),
                found: labels.len(),
            });
        }
        let classes = class_order(labels);
        if classes.len() != 2 {
            return Err(Error::ClassCount {
                found: classes.len(),
                labels: classes,
            });
        }
        let k = features[0].as_ref().len();
        if k == 0 {
            return Err(Error::Data("feature vectors are empty".into()));
        }
        let mut sums = [vec![0.0; k], vec![0.0; k]];
        let mut counts = [0usize; 2];
        for (f, l) in features.iter().zip(labels) {
            let f = f.as_ref();
            if f.len() != k {
                return Err(Error::Mismatch {
                    expected: k,
                    found: f.len(),
                });
            }
            let c = usize::from(l.as_ref() != classes[0]);
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(f) {
                *s += x;
            }
        }
        let [s0, s1] = sums;
        let mean = |s: Vec<f64>, n: usize| s.into_iter().map(|v| v / n as f64).collect::<Vec<_>>();
        let means = [mean(s0, counts[0]), mean(s1, counts[1])];
        if means.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("class mean is not finite".into()));
        }
        let [c0, c1] = <[String; 2]>::try_from(classes).expect("two classes");
        Ok(Self {
            class_labels: [c0, c1],
            means,
            k,
            metric: Metric::Euclidean,
        })
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.k {
            return Err(Error::Mismatch {
                expected: self.k,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Distances to the first and second class means.
    pub fn distances(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(x)?;
        Ok((euclidean(x, &self.means[0]), euclidean(x, &self.means[1])))
    }

    /// Index (0 or 1) of the nearer class mean.
    pub fn predict_index(&self, x: &[f64]) -> Result<usize> {
        let (d1, d2) = self.distances(x)?;
        Ok(usize::from(d2 < d1))
    }

    pub fn predict(&self, x: &[f64]) -> Result<&str> {
        Ok(&self.class_labels[self.predict_index(x)?])
    }

    /// `d1 - d2`: positive favors the second class, negative the first.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        let (d1, d2) = self.distances(x)?;
        Ok(d1 - d2)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: Self = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        if model.class_labels[0] == model.class_labels[1] {
            return Err(Error::parse(path, "class labels must be distinct"));
        }
        if model.means.iter().any(|m| m.len() != model.k) {
            return Err(Error::parse(path, "mean length does not match k"));
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(m1: &[f64], m2: &[f64]) -> CmmdcModel {
        CmmdcModel::fit(&[m1.to_vec(), m2.to_vec()], &["c1", "c2"]).unwrap()
    }

    #[test]
    fn single_sample_per_class() {
        let m = model(&[1.0, 2.0], &[3.0, -1.0]);
        assert_eq!(m.means, [vec![1.0, 2.0], vec![3.0, -1.0]]);
        assert_eq!(m.class_labels, ["c1".to_string(), "c2".to_string()]);
    }

    #[test]
    fn means_of_two_point_classes() {
        let f = [[0.0, 0.0], [4.0, 0.0], [2.0, 2.0], [6.0, 2.0]];
        let l = ["A", "B", "A", "B"];
        let m = CmmdcModel::fit(&f, &l).unwrap();
        assert_eq!(m.means, [vec![1.0, 1.0], vec![5.0, 1.0]]);

        let doubled_f: Vec<[f64; 2]> = f.iter().chain(&f).copied().collect();
        let doubled_l: Vec<&str> = l.iter().chain(&l).copied().collect();
        assert_eq!(CmmdcModel::fit(&doubled_f, &doubled_l).unwrap(), m);
    }

    #[test]
    fn class_order_follows_first_appearance() {
        let m = CmmdcModel::fit(&[[1.0], [2.0]], &["z", "a"]).unwrap();
        assert_eq!(m.class_labels, ["z".to_string(), "a".to_string()]);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            CmmdcModel::fit(&[[1.0], [2.0]], &["a", "a"]),
            Err(Error::ClassCount { found: 1, .. })
        ));
        assert!(matches!(
            CmmdcModel::fit(&[[1.0], [2.0], [3.0]], &["a", "b", "c"]),
            Err(Error::ClassCount { found: 3, .. })
        ));
        assert!(CmmdcModel::fit(&[vec![1.0], vec![2.0, 3.0]], &["a", "b"]).is_err());
        assert!(CmmdcModel::fit(&[[1.0]], &["a", "b"]).is_err());
    }

    #[test]
    fn predict_and_score() {
        let m = model(&[0.0, 0.0], &[4.0, 0.0]);
        assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), "c1");
        assert_eq!(m.predict(&[1.0, 0.0]).unwrap(), "c1");
        assert_eq!(m.score(&[1.0, 0.0]).unwrap(), -2.0);
        // tie
        assert_eq!(m.predict(&[2.0, 0.0]).unwrap(), "c1");
        assert_eq!(m.score(&[2.0, 5.0]).unwrap(), 0.0);
        assert_eq!(m.score(&[4.0, 0.0]).unwrap(), 4.0);
        assert!(m.predict(&[1.0]).is_err());
        assert!(m.score(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = model(&[0.5, 0.25], &[4.0, 1e-7]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        m.save(&path).unwrap();
        assert_eq!(CmmdcModel::load(&path).unwrap(), m);
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["metric"], "euclidean");
        assert_eq!(v["k"], 2);
    }

    proptest! {
        #[test]
        fn score_sign_matches_prediction(
            a in prop::collection::vec(-10.0f64..10.0, 3),
            b in prop::collection::vec(-10.0f64..10.0, 3),
            x in prop::collection::vec(-10.0f64..10.0, 3),
        ) {
            let m = model(&a, &b);
            let s = m.score(&x).unwrap();
            let p = m.predict_index(&x).unwrap();
            if s < 0.0 { prop_assert_eq!(p, 0); }
            if s > 0.0 { prop_assert_eq!(p, 1); }
        }
    }
}
