//! Frame-to-frame line matching and motion statistics.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::segments::LineSegment;
use crate::texture::RegionLabel;

pub const MAX_VECTORS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    pub w_distance: f64,
    pub w_length: f64,
    pub w_angle: f64,
    /// Pairs whose centers are farther apart are never matched.
    pub max_distance: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            w_distance: 1.0,
            w_length: 0.5,
            w_angle: 0.2,
            max_distance: 15.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionVector {
    pub dx: f64,
    pub dy: f64,
    pub region: RegionLabel,
    /// The region's representative (longest current line) rather than padding.
    pub primary: bool,
}

impl MotionVector {
    pub fn magnitude(&self) -> f64 {
        self.dx.hypot(self.dy)
    }
}

/// Summary of one frame pair; `None` when nothing matched.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairStats {
    pub mean_dx: f64,
    pub mean_dy: f64,
    pub mean_magnitude: f64,
    /// Direction of the mean vector, degrees in `[0, 360)`; 0 for a zero mean.
    pub mean_direction: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MotionVectorSet {
    pub vectors: Vec<MotionVector>,
    pub stats: Option<PairStats>,
}

struct Matched {
    prev: usize,
    curr: usize,
    curr_length: f64,
}

fn wrap(x: f64, m: f64) -> f64 {
    let r = x % m;
    if r < 0.0 { r + m } else { r }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    crate::geom::angle_diff_deg(a, b)
}

/// Greedy one-to-one matching inside each region, then one vector per region
/// plus padding up to eight.
pub fn match_motion(prev: &[LineSegment], curr: &[LineSegment], cfg: &MatchConfig) -> MotionVectorSet {
    let mut per_region: Vec<Vec<Matched>> = (0..6).map(|_| Vec::new()).collect();
    for label in RegionLabel::ALL {
        let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
        for (i, p) in prev.iter().enumerate().filter(|(_, l)| l.region == label) {
            for (j, c) in curr.iter().enumerate().filter(|(_, l)| l.region == label) {
                let dist = p.center().dist(c.center());
                if dist > cfg.max_distance {
                    continue;
                }
                let cost = cfg.w_distance * dist
                    + cfg.w_length * (p.length() - c.length()).abs()
                    + cfg.w_angle * angle_gap(p.angle(), c.angle());
                candidates.push((cost, i, j));
            }
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut used_p = alloc::vec![false; prev.len()];
        let mut used_c = alloc::vec![false; curr.len()];
        for (_, i, j) in candidates {
            if used_p[i] || used_c[j] {
                continue;
            }
            used_p[i] = true;
            used_c[j] = true;
            per_region[label.index()].push(Matched {
                prev: i,
                curr: j,
                curr_length: curr[j].length(),
            });
        }
        // longest current line first; stable on match order
        per_region[label.index()].sort_by(|a, b| b.curr_length.total_cmp(&a.curr_length));
    }
    let vector = |m: &Matched, region: RegionLabel, primary: bool| {
        let d = curr[m.curr].center() - prev[m.prev].center();
        MotionVector {
            dx: d.x,
            dy: d.y,
            region,
            primary,
        }
    };
    let mut vectors = Vec::new();
    let mut rest: Vec<(f64, usize, usize)> = Vec::new();
    for label in RegionLabel::ALL {
        for (k, m) in per_region[label.index()].iter().enumerate() {
            if k == 0 {
                vectors.push(vector(m, label, true));
            } else {
                rest.push((m.curr_length, label.index(), k));
            }
        }
    }
    rest.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, r, k) in rest {
        if vectors.len() >= MAX_VECTORS {
            break;
        }
        vectors.push(vector(&per_region[r][k], RegionLabel::ALL[r], false));
    }
    vectors.truncate(MAX_VECTORS);
    let stats = pair_stats(&vectors);
    MotionVectorSet { vectors, stats }
}

pub fn pair_stats(vectors: &[MotionVector]) -> Option<PairStats> {
    if vectors.is_empty() {
        return None;
    }
    let n = vectors.len() as f64;
    let mean_dx = vectors.iter().map(|v| v.dx).sum::<f64>() / n;
    let mean_dy = vectors.iter().map(|v| v.dy).sum::<f64>() / n;
    let mean_magnitude = vectors.iter().map(|v| v.magnitude()).sum::<f64>() / n;
    let mean_direction = if mean_dx == 0.0 && mean_dy == 0.0 {
        0.0
    } else {
        wrap(mean_dy.atan2(mean_dx).to_degrees(), 360.0)
    };
    Some(PairStats {
        mean_dx,
        mean_dy,
        mean_magnitude,
        mean_direction,
    })
}

/// Trajectory statistics over consecutive frame pairs of a window.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryStats {
    /// Sum of per-pair mean magnitudes.
    pub length: f64,
    /// Mean absolute turn between consecutive nonzero mean vectors (radians)
    /// divided by their mean step length; 0 with fewer than two such steps.
    pub curvature: f64,
}

pub fn trajectory_stats(pairs: &[Option<PairStats>]) -> TrajectoryStats {
    let present: Vec<&PairStats> = pairs.iter().flatten().collect();
    let length = present.iter().map(|s| s.mean_magnitude).sum();
    let steps: Vec<(f64, f64)> = present
        .iter()
        .map(|s| (s.mean_dx, s.mean_dy))
        .filter(|&(x, y)| x != 0.0 || y != 0.0)
        .collect();
    let mut turn = 0.0;
    let mut step = 0.0;
    let mut count = 0usize;
    for w in steps.windows(2) {
        let (a, b) = (w[0], w[1]);
        let d = wrap(b.1.atan2(b.0) - a.1.atan2(a.0), core::f64::consts::TAU);
        turn += d.min(core::f64::consts::TAU - d);
        step += 0.5 * (a.0.hypot(a.1) + b.0.hypot(b.1));
        count += 1;
    }
    let curvature = if count == 0 || step == 0.0 {
        0.0
    } else {
        (turn / count as f64) / (step / count as f64)
    };
    TrajectoryStats { length, curvature }
}
