//! Confusion counts, derived rates, PR sweeps and fold summaries.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairwise decision counts. "Positive" means the pair was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    pub fn add(&mut self, accepted: bool, genuine: bool) {
        match (accepted, genuine) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> Option<f64> {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Harmonic mean of precision and recall, written as 2TP / (2TP + FP + FN);
    /// absent when either rate is absent or both are zero.
    pub fn f1(&self) -> Option<f64> {
        self.precision()?;
        self.recall()?;
        if self.tp == 0 {
            return None;
        }
        ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }

    /// Share of impostor pairs accepted.
    pub fn false_accept_rate(&self) -> Option<f64> {
        ratio(self.fp, self.fp + self.tn)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub confusion: Confusion,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl Metrics {
    pub fn from_confusion(confusion: Confusion) -> Result<Metrics> {
        Ok(Metrics {
            confusion,
            accuracy: confusion.accuracy().ok_or(Error::EmptyInput)?,
            precision: confusion.precision(),
            recall: confusion.recall(),
            f1: confusion.f1(),
        })
    }
}

/// Metrics over `(accepted, genuine)` decisions.
pub fn metrics(decisions: &[(bool, bool)]) -> Result<Metrics> {
    let mut c = Confusion::default();
    for &(accepted, genuine) in decisions {
        c.add(accepted, genuine);
    }
    Metrics::from_confusion(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub tau: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision and recall of "accept iff distance <= tau" for tau over the
/// sorted distinct union of both score sets (ascending, so recall never
/// drops). `steps` caps the number of points by sampling that list evenly;
/// the largest score is always kept.
pub fn pr_curve(genuine: &[f64], impostor: &[f64], steps: Option<usize>) -> Result<Vec<PrPoint>> {
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut g = genuine.to_vec();
    let mut i = impostor.to_vec();
    g.sort_by(f64::total_cmp);
    i.sort_by(f64::total_cmp);
    let mut taus: Vec<f64> = g.iter().chain(&i).copied().collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    if let Some(steps) = steps {
        if steps == 0 {
            return Err(Error::InvalidConfig("pr steps must be positive".into()));
        }
        if steps < taus.len() {
            let last = taus.len() - 1;
            let picked: Vec<f64> = if steps == 1 {
                alloc::vec![taus[last]]
            } else {
                (0..steps).map(|k| taus[(k * last + (steps - 1) / 2) / (steps - 1)]).collect()
            };
            taus = picked;
            taus.dedup();
        }
    }
    let at_most = |sorted: &[f64], t: f64| sorted.partition_point(|&v| v <= t);
    Ok(taus
        .into_iter()
        .map(|tau| {
            let tp = at_most(&g, tau);
            let fp = at_most(&i, tau);
            PrPoint {
                tau,
                precision: tp as f64 / (tp + fp) as f64,
                recall: tp as f64 / g.len() as f64,
            }
        })
        .collect())
}

/// Mean, median and sample standard deviation of per-fold values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub count: usize,
}

impl Summary {
    /// Absent values are skipped; `None` when nothing is left.
    pub fn of(values: impl IntoIterator<Item = Option<f64>>) -> Option<Summary> {
        let mut v: Vec<f64> = values.into_iter().flatten().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        let std = if n > 1 {
            (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Summary {
            mean,
            median,
            std,
            count: n,
        })
    }
}
