//! Seeded k-fold assignment, stratified per subject or subject-disjoint.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldUnit {
    /// Every subject's windows are spread over all folds.
    #[default]
    Window,
    /// Whole subjects go to one fold.
    Subject,
}

fn by_subject(labels: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        m.entry(l).or_default().push(i);
    }
    m
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidConfig("need at least 3 folds (train, validation, test)".into()));
    }
    Ok(())
}

/// Fold index per window: each subject's windows are shuffled and dealt
/// round-robin, so fold sizes per subject differ by at most one.
pub fn assign_folds(labels: &[usize], k: usize, seed: u64) -> Result<Vec<usize>> {
    check_k(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; labels.len()];
    for (subject, mut idx) in by_subject(labels) {
        if idx.len() < k {
            return Err(Error::InsufficientData {
                subject: format!("{subject}"),
                have: idx.len(),
                need: k,
            });
        }
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            folds[i] = pos % k;
        }
    }
    Ok(folds)
}

/// Fold index per window with whole subjects dealt to folds; every fold
/// needs two subjects so it has impostors of its own.
pub fn assign_subject_folds(labels: &[usize], k: usize, seed: u64) -> Result<Vec<usize>> {
    check_k(k)?;
    let groups = by_subject(labels);
    let mut subjects: Vec<usize> = groups.keys().copied().collect();
    if subjects.len() < 2 * k {
        return Err(Error::InsufficientData {
            subject: "all".into(),
            have: subjects.len(),
            need: 2 * k,
        });
    }
    subjects.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![0; labels.len()];
    for (pos, s) in subjects.into_iter().enumerate() {
        for &i in &groups[&s] {
            folds[i] = pos % k;
        }
    }
    Ok(folds)
}

pub fn fold_assignment(labels: &[usize], k: usize, seed: u64, unit: FoldUnit) -> Result<Vec<usize>> {
    match unit {
        FoldUnit::Window => assign_folds(labels, k, seed),
        FoldUnit::Subject => assign_subject_folds(labels, k, seed),
    }
}

/// Test fold `f`, validation fold `f + 1`, training on the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn split(folds: &[usize], k: usize, f: usize) -> FoldSplit {
    let v = (f + 1) % k;
    let pick = |want: &dyn Fn(usize) -> bool| (0..folds.len()).filter(|&i| want(folds[i])).collect();
    FoldSplit {
        train: pick(&|x| x != f && x != v),
        val: pick(&|x| x == v),
        test: pick(&|x| x == f),
    }
}

/// Alternating gallery/probe halves of each subject's windows, in index order.
pub fn halves(indices: &[usize], labels: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut gallery = Vec::new();
    let mut probes = Vec::new();
    for &i in indices {
        let n = seen.entry(labels[i]).or_insert(0);
        if *n % 2 == 0 {
            gallery.push(i);
        } else {
            probes.push(i);
        }
        *n += 1;
    }
    (gallery, probes)
}
