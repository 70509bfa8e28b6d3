#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::{angle_diff_deg, line_angle_deg, Point};
use crate::texture::RegionLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub p1: Point,
    pub p2: Point,
    pub region: RegionLabel,
}

impl LineSegment {
    pub fn new(p1: Point, p2: Point, region: RegionLabel) -> Self {
        LineSegment { p1, p2, region }
    }

    pub fn length(&self) -> f64 {
        self.p1.dist(self.p2)
    }

    /// Degrees from the positive x axis, in `[0, 180)`.
    pub fn angle(&self) -> f64 {
        line_angle_deg(self.p1, self.p2)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.p1.x + self.p2.x), 0.5 * (self.p1.y + self.p2.y))
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Self {
        let d = Point::new(dx, dy);
        LineSegment::new(self.p1 + d, self.p2 + d, self.region)
    }

    /// Smallest distance between an endpoint of `self` and one of `other`.
    pub fn endpoint_gap(&self, other: &LineSegment) -> f64 {
        let a = [self.p1, self.p2];
        let b = [other.p1, other.p2];
        a.iter()
            .flat_map(|p| b.iter().map(move |q| p.dist(*q)))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    /// Endpoints must be strictly closer than this.
    pub max_gap: f64,
    pub max_angle_deg: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            max_gap: 2.0,
            max_angle_deg: 10.0,
        }
    }
}

/// Merges near-touching, near-parallel segments until none qualify.
///
/// Each round merges the qualifying pair with the smallest endpoint gap
/// (ties: lowest first index, then lowest second index). The merged segment
/// joins the two most distant of the four endpoints, takes the first
/// segment's slot and the longer segment's region.
pub fn link_segments(lines: &[LineSegment], cfg: &LinkConfig) -> Vec<LineSegment> {
    // Slots keep their original order, so (gap, i, j) over live slots ranks
    // pairs exactly as a rescan of the compacted list would.
    let mut slots: Vec<Option<(LineSegment, f64)>> = lines.iter().map(|l| Some((*l, l.angle()))).collect();
    let qualifies = |a: &(LineSegment, f64), b: &(LineSegment, f64)| {
        let gap = a.0.endpoint_gap(&b.0);
        (gap < cfg.max_gap && angle_diff_deg(a.1, b.1) <= cfg.max_angle_deg).then_some(gap)
    };
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..slots.len() {
        for j in i + 1..slots.len() {
            if let (Some(a), Some(b)) = (&slots[i], &slots[j]) {
                if let Some(gap) = qualifies(a, b) {
                    pairs.push((gap, i, j));
                }
            }
        }
    }
    loop {
        let Some(&(_, i, j)) = pairs
            .iter()
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)))
        else {
            return slots.into_iter().flatten().map(|(l, _)| l).collect();
        };
        let (a, b) = (slots[i].expect("live slot").0, slots[j].expect("live slot").0);
        let ends = [a.p1, a.p2, b.p1, b.p2];
        let mut far = (a.p1, a.p2, -1.0);
        for s in 0..4 {
            for t in s + 1..4 {
                let d = ends[s].dist(ends[t]);
                if d > far.2 {
                    far = (ends[s], ends[t], d);
                }
            }
        }
        let region = if b.length() > a.length() { b.region } else { a.region };
        let merged = LineSegment::new(far.0, far.1, region);
        slots[i] = Some((merged, merged.angle()));
        slots[j] = None;
        pairs.retain(|&(_, p, q)| p != i && q != i && p != j && q != j);
        let m = slots[i].expect("merged slot");
        for (k, other) in slots.iter().enumerate() {
            if k == i {
                continue;
            }
            if let Some(o) = other {
                if let Some(gap) = qualifies(&m, o) {
                    pairs.push((gap, i.min(k), i.max(k)));
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Strict lower bound on length.
    pub min_length: f64,
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_length: 10.0,
            min_angle_deg: 40.0,
            max_angle_deg: 140.0,
        }
    }
}

impl FilterConfig {
    pub fn accepts(&self, l: &LineSegment) -> bool {
        let a = l.angle();
        l.length() > self.min_length && a >= self.min_angle_deg && a <= self.max_angle_deg
    }
}

pub fn filter_lines(lines: &[LineSegment], cfg: &FilterConfig) -> Vec<LineSegment> {
    lines.iter().copied().filter(|l| cfg.accepts(l)).collect()
}
