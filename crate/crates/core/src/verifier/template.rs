//! Enrolled galleries and accept/reject decisions.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::network::distance;
use super::Model;
use crate::error::{Error, Result};
use crate::pipeline::RawWindow;

pub const MIN_ENROLL_WINDOWS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub subject: String,
    pub gallery: Vec<Vec<f64>>,
    pub tau: f64,
    pub model_version: u64,
    /// Free-form creation note supplied by the caller.
    pub created: String,
}

impl Template {
    pub fn new(subject: String, gallery: Vec<Vec<f64>>, tau: f64, model_version: u64, created: String) -> Result<Self> {
        if gallery.is_empty() {
            return Err(Error::TooFewWindows { got: 0, needed: 1 });
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidConfig("template threshold must be finite and nonnegative".into()));
        }
        let dim = gallery[0].len();
        if let Some(bad) = gallery.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Template {
            subject,
            gallery,
            tau,
            model_version,
            created,
        })
    }

    /// Smallest distance from `embedding` to the gallery.
    pub fn score(&self, embedding: &[f64]) -> f64 {
        self.gallery
            .iter()
            .map(|g| distance(g, embedding))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn decide(&self, embedding: &[f64]) -> Decision {
        let score = self.score(embedding);
        Decision {
            accept: score <= self.tau,
            score,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub accept: bool,
    pub score: f64,
}

/// Embeds at least three windows of one subject under `tau`.
pub fn enroll(model: &Model, subject: &str, windows: &[RawWindow], tau: f64, created: &str) -> Result<Template> {
    if windows.len() < MIN_ENROLL_WINDOWS {
        return Err(Error::TooFewWindows {
            got: windows.len(),
            needed: MIN_ENROLL_WINDOWS,
        });
    }
    let gallery = windows
        .iter()
        .map(|w| model.embed_raw(w))
        .collect::<Result<Vec<_>>>()?;
    Template::new(subject.into(), gallery, tau, model.version, created.into())
}

pub fn verify(template: &Template, window: &RawWindow, model: &Model) -> Result<Decision> {
    if template.model_version != model.version {
        return Err(Error::VersionMismatch {
            template: template.model_version,
            model: model.version,
        });
    }
    Ok(template.decide(&model.embed_raw(window)?))
}

/// Majority vote over the most recent decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousVerifier {
    span: usize,
    recent: VecDeque<bool>,
}

impl ContinuousVerifier {
    pub fn new(span: usize) -> Self {
        assert!(span > 0, "smoothing span must be positive");
        ContinuousVerifier {
            span,
            recent: VecDeque::with_capacity(span),
        }
    }

    /// Records one decision and returns the smoothed one: accept when more
    /// than half of the remembered decisions accepted.
    pub fn push(&mut self, accept: bool) -> bool {
        if self.recent.len() == self.span {
            self.recent.pop_front();
        }
        self.recent.push_back(accept);
        2 * self.recent.iter().filter(|&&a| a).count() > self.recent.len()
    }
}

impl Default for ContinuousVerifier {
    fn default() -> Self {
        ContinuousVerifier::new(5)
    }
}
