//! Seeded k-fold and subject-held-out partitioning.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::class_order;
use crate::error::{Error, Result};

/// Sample indices split into folds. Indices within a fold are ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub folds: Vec<Vec<usize>>,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldPlan {
    /// `(train, test)` indices for fold `i`.
    pub fn split(&self, i: usize) -> (Vec<usize>, Vec<usize>) {
        let test = self.folds[i].clone();
        let mut train: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        train.sort_unstable();
        (train, test)
    }

    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }
}

/// Splits `labels.len()` samples into `folds` folds.
///
/// Stratified: each class (in first-appearance order) is shuffled with the
/// seeded RNG and dealt round-robin, continuing from the fold where the
/// previous class stopped. Otherwise all indices are shuffled and dealt
/// round-robin.
pub fn kfold_split<L: AsRef<str>>(labels: &[L], folds: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plan = vec![Vec::new(); folds];
    let groups: Vec<Vec<usize>> = if stratified {
        class_order(labels)
            .iter()
            .map(|c| (0..labels.len()).filter(|&i| labels[i].as_ref() == c).collect())
            .collect()
    } else {
        vec![(0..labels.len()).collect()]
    };
    for members in &groups {
        if members.len() < folds {
            return Err(Error::Config(if stratified {
                format!(
                    "class `{}` has {} samples, fewer than {folds} folds",
                    labels[members[0]].as_ref(),
                    members.len()
                )
            } else {
                format!("{} samples cannot fill {folds} folds", members.len())
            }));
        }
    }
    let mut next = 0;
    for mut members in groups {
        members.shuffle(&mut rng);
        for idx in members {
            plan[next].push(idx);
            next = (next + 1) % folds;
        }
    }
    for f in &mut plan {
        f.sort_unstable();
    }
    Ok(FoldPlan {
        folds: plan,
        seed,
        stratified,
    })
}

/// Result of [`subject_split`]: trial indices on each side and the subjects
/// that went to each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubjectSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub train_subjects: Vec<String>,
    pub test_subjects: Vec<String>,
}

/// Number of held-out subjects: `max(1, round(fraction * subjects))`,
/// capped so at least one subject remains for training.
pub fn test_subject_count(subjects: usize, test_fraction: f64) -> usize {
    ((test_fraction * subjects as f64).round() as usize)
        .max(1)
        .min(subjects.saturating_sub(1))
}

/// Holds out whole subjects. `subjects[i]` is the subject of trial `i`.
pub fn subject_split<S: AsRef<str>>(subjects: &[S], test_fraction: f64, seed: u64) -> Result<SubjectSplit> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test fraction must lie strictly between 0 and 1, got {test_fraction}"
        )));
    }
    let mut unique = class_order(subjects);
    if unique.len() < 2 {
        return Err(Error::Config(format!(
            "subject split needs at least 2 subjects, found {}",
            unique.len()
        )));
    }
    let n_test = test_subject_count(unique.len(), test_fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    unique.shuffle(&mut rng);
    let mut test_subjects = unique.split_off(unique.len() - n_test);
    let mut train_subjects = unique;
    test_subjects.sort();
    train_subjects.sort();

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, s) in subjects.iter().enumerate() {
        if test_subjects.binary_search_by(|t| t.as_str().cmp(s.as_ref())).is_ok() {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    Ok(SubjectSplit {
        train,
        test,
        train_subjects,
        test_subjects,
    })
}
