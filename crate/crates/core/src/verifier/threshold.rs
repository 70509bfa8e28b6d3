//! Equal-error-rate threshold selection.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub tau: f64,
    pub eer: f64,
}

/// Counts at threshold `t`: impostors accepted (`d <= t`) and genuines rejected (`d > t`).
fn counts(genuine: &[f64], impostor: &[f64], t: f64) -> (usize, usize) {
    let fa = impostor.iter().filter(|&&d| d <= t).count();
    let fr = genuine.iter().filter(|&&d| d > t).count();
    (fa, fr)
}

/// Distance threshold where false accepts and false rejects balance.
///
/// If the two rates are exactly equal on some interval between consecutive
/// distinct scores, the first such interval's midpoint is returned. Otherwise
/// the rate curves are interpolated linearly across the score where they
/// cross, and `tau` is interpolated the same way.
pub fn choose_threshold(genuine: &[f64], impostor: &[f64]) -> Result<ThresholdChoice> {
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::EmptySet);
    }
    let (ng, ni) = (genuine.len(), impostor.len());
    let mut values: Vec<f64> = genuine.iter().chain(impostor).copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    for w in values.windows(2) {
        let (fa, fr) = counts(genuine, impostor, w[0]);
        if fa * ng == fr * ni {
            return Ok(ThresholdChoice {
                tau: 0.5 * (w[0] + w[1]),
                eer: fa as f64 / ni as f64,
            });
        }
    }
    // the curves cross at a single score
    let rates = |fa: usize, fr: usize| (fa as f64 / ni as f64, fr as f64 / ng as f64);
    let mut prev = (values[0], 0.0, 1.0);
    for &v in &values {
        let (fa, fr) = counts(genuine, impostor, v);
        let (far, frr) = rates(fa, fr);
        if far >= frr {
            let (t0, far0, frr0) = prev;
            let denom = (far - far0) - (frr - frr0);
            let lambda = if denom > 0.0 { (frr0 - far0) / denom } else { 0.0 };
            return Ok(ThresholdChoice {
                tau: t0 + lambda * (v - t0),
                eer: far0 + lambda * (far - far0),
            });
        }
        prev = (v, far, frr);
    }
    unreachable!("every impostor is accepted at the largest score")
}

/// Equal error rate of two score sets.
pub fn equal_error_rate(genuine: &[f64], impostor: &[f64]) -> Result<f64> {
    Ok(choose_threshold(genuine, impostor)?.eer)
}
