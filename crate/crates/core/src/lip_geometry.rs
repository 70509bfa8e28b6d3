//! Lip contour fitting, mask rasterization and static shape features.
//!
//! The outer loop runs over mouth landmarks 0..=11 (face points 48-59) and the
//! inner loop over 12..=19 (face points 60-67). Each loop is cut into an upper
//! and a lower arc at the mouth corners, and every arc is covered by a chain of
//! short parametric polynomial segments that share their end landmarks.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ingest::{LipRoi, MouthLandmarks, ROI_PIXELS};
use crate::raster::Mask;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourConfig {
    /// Polynomial degree of each segment.
    pub degree: usize,
    /// Landmarks per segment, end landmarks included.
    pub segment_points: usize,
    /// Samples per segment when the contour is turned into a polygon.
    pub samples_per_segment: usize,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            degree: 2,
            segment_points: 3,
            samples_per_segment: 16,
        }
    }
}

impl ContourConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 || self.segment_points < 2 || self.samples_per_segment == 0 {
            return Err(Error::InvalidConfig(
                "contour needs degree >= 1, segment_points >= 2, samples_per_segment >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arc {
    UpperOuter,
    LowerOuter,
    UpperInner,
    LowerInner,
}

impl Arc {
    /// Mouth landmark indices along the arc, corner to corner.
    pub fn landmarks(self) -> &'static [usize] {
        match self {
            Arc::UpperOuter => &[0, 1, 2, 3, 4, 5, 6],
            Arc::LowerOuter => &[6, 7, 8, 9, 10, 11, 0],
            Arc::UpperInner => &[12, 13, 14, 15, 16],
            Arc::LowerInner => &[16, 17, 18, 19, 12],
        }
    }
}

/// Parametric polynomial curve over `t_range`; coefficients are monomial, lowest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSegment {
    pub coeffs_x: Vec<f64>,
    pub coeffs_y: Vec<f64>,
    pub t_range: (f64, f64),
    /// Mouth landmark run; the first and last entries are the segment endpoints.
    pub landmarks: Vec<usize>,
}

impl CurveSegment {
    pub fn eval(&self, t: f64) -> Point {
        Point::new(horner(&self.coeffs_x, t), horner(&self.coeffs_y, t))
    }

    pub fn start(&self) -> Point {
        self.eval(self.t_range.0)
    }

    pub fn end(&self) -> Point {
        self.eval(self.t_range.1)
    }

    fn line(a: Point, b: Point) -> Self {
        CurveSegment {
            coeffs_x: vec![a.x, b.x - a.x],
            coeffs_y: vec![a.y, b.y - a.y],
            t_range: (0.0, 1.0),
            landmarks: Vec::new(),
        }
    }

    fn map_axes(&self, sx: f64, tx: f64, sy: f64, ty: f64) -> Self {
        let scale = |c: &[f64], s: f64, t: f64| {
            c.iter()
                .enumerate()
                .map(|(i, &v)| if i == 0 { s * v + t } else { s * v })
                .collect()
        };
        CurveSegment {
            coeffs_x: scale(&self.coeffs_x, sx, tx),
            coeffs_y: scale(&self.coeffs_y, sy, ty),
            t_range: self.t_range,
            landmarks: self.landmarks.clone(),
        }
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSpan {
    pub arc: Arc,
    pub segments: core::ops::Range<usize>,
}

/// Closed outer and inner lip loops built from polynomial segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipContour {
    pub segments: Vec<CurveSegment>,
    /// Upper-outer, lower-outer, upper-inner, lower-inner. Empty for plain polygons.
    pub arcs: Vec<ArcSpan>,
    /// Segment ranges forming the outer and inner loops.
    pub outer: core::ops::Range<usize>,
    pub inner: core::ops::Range<usize>,
    pub samples_per_segment: usize,
}

impl LipContour {
    /// Closed polygonal outer loop with no inner loop.
    pub fn polygon(points: &[Point]) -> Self {
        let n = points.len();
        let segments: Vec<_> = (0..n)
            .map(|i| CurveSegment::line(points[i], points[(i + 1) % n]))
            .collect();
        LipContour {
            segments,
            arcs: Vec::new(),
            outer: 0..n,
            inner: n..n,
            samples_per_segment: 1,
        }
    }

    /// Applies `p -> (sx * x + tx, sy * y + ty)` to the whole contour.
    pub fn map_axes(&self, sx: f64, tx: f64, sy: f64, ty: f64) -> Self {
        LipContour {
            segments: self
                .segments
                .iter()
                .map(|s| s.map_axes(sx, tx, sy, ty))
                .collect(),
            ..self.clone()
        }
    }

    pub fn arc(&self, arc: Arc) -> Option<&[CurveSegment]> {
        self.arcs
            .iter()
            .find(|a| a.arc == arc)
            .map(|a| &self.segments[a.segments.clone()])
    }

    fn loop_polygon(&self, range: core::ops::Range<usize>) -> Vec<Point> {
        let n = self.samples_per_segment;
        let mut out = Vec::with_capacity(range.len() * n);
        for seg in &self.segments[range] {
            let (t0, t1) = seg.t_range;
            for i in 0..n {
                out.push(seg.eval(t0 + (t1 - t0) * i as f64 / n as f64));
            }
        }
        out
    }

    pub fn outer_polygon(&self) -> Vec<Point> {
        self.loop_polygon(self.outer.clone())
    }

    pub fn inner_polygon(&self) -> Vec<Point> {
        self.loop_polygon(self.inner.clone())
    }

    /// Dense polyline along one arc, endpoints included.
    pub fn arc_polyline(&self, arc: Arc) -> Vec<Point> {
        let Some(segs) = self.arc(arc) else {
            return Vec::new();
        };
        let n = self.samples_per_segment;
        let mut out = Vec::with_capacity(segs.len() * n + 1);
        for seg in segs {
            let (t0, t1) = seg.t_range;
            for i in 0..n {
                out.push(seg.eval(t0 + (t1 - t0) * i as f64 / n as f64));
            }
        }
        if let Some(last) = segs.last() {
            out.push(last.end());
        }
        out
    }
}

/// Fits the outer and inner lip loops from the 20 mouth landmarks.
pub fn fit_contour(mouth: &MouthLandmarks, config: &ContourConfig) -> Result<LipContour> {
    config.validate()?;
    let outer_pts: Vec<Point> = mouth.points[..12].to_vec();
    if polygon_area(&outer_pts).abs() <= 1e-9 {
        return Err(Error::DegenerateGeometry("outer lip landmarks enclose no area"));
    }
    let mut segments = Vec::new();
    let mut arcs = Vec::new();
    for arc in [Arc::UpperOuter, Arc::LowerOuter, Arc::UpperInner, Arc::LowerInner] {
        let start = segments.len();
        let ids = arc.landmarks();
        let step = config.segment_points - 1;
        let mut i = 0;
        while i + 1 < ids.len() {
            let j = (i + step).min(ids.len() - 1);
            let run = &ids[i..=j];
            let pts: Vec<Point> = run.iter().map(|&k| mouth.points[k]).collect();
            let (cx, cy) = fit_run(&pts, config.degree);
            segments.push(CurveSegment {
                coeffs_x: cx,
                coeffs_y: cy,
                t_range: (0.0, 1.0),
                landmarks: run.to_vec(),
            });
            i = j;
        }
        arcs.push(ArcSpan {
            arc,
            segments: start..segments.len(),
        });
    }
    let outer = arcs[0].segments.start..arcs[1].segments.end;
    let inner = arcs[2].segments.start..arcs[3].segments.end;
    Ok(LipContour {
        segments,
        arcs,
        outer,
        inner,
        samples_per_segment: config.samples_per_segment,
    })
}

/// Endpoint-interpolating least squares fit of `p(t) = a + (b - a) t + t (1 - t) q(t)`
/// with chord-length parameters. Returns monomial coefficients per axis.
fn fit_run(pts: &[Point], degree: usize) -> (Vec<f64>, Vec<f64>) {
    let m = pts.len() - 1;
    let mut t = vec![0.0; pts.len()];
    for k in 1..=m {
        t[k] = t[k - 1] + pts[k].dist(pts[k - 1]);
    }
    let total = t[m];
    for (k, tk) in t.iter_mut().enumerate() {
        *tk = if total > 1e-12 {
            *tk / total
        } else {
            k as f64 / m as f64
        };
    }
    // free coefficients of q, limited by the number of interior points
    let free = degree.saturating_sub(1).min(m - 1);
    let a = pts[0];
    let b = pts[m];
    let solve = |coord: fn(Point) -> f64| -> Vec<f64> {
        let (ca, cb) = (coord(a), coord(b));
        let mut poly = vec![0.0; free + 2];
        poly[0] = ca;
        poly[1] = cb - ca;
        if free == 0 {
            return poly;
        }
        let rows = m - 1;
        let design = DMatrix::from_fn(rows, free, |r, c| {
            let tk = t[r + 1];
            tk * (1.0 - tk) * tk.powi(c as i32)
        });
        let rhs = DVector::from_fn(rows, |r, _| {
            let tk = t[r + 1];
            coord(pts[r + 1]) - ca - (cb - ca) * tk
        });
        let normal = design.transpose() * &design;
        let q = normal
            .lu()
            .solve(&(design.transpose() * rhs))
            .filter(|q| q.iter().all(|v| v.is_finite()))
            .unwrap_or_else(|| DVector::zeros(free));
        // t (1 - t) t^j = t^(j+1) - t^(j+2)
        for (j, &c) in q.iter().enumerate() {
            poly[j + 1] += c;
            poly[j + 2] -= c;
        }
        poly
    };
    (solve(|p| p.x), solve(|p| p.y))
}

/// Signed shoelace area.
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    0.5 * s
}

/// Pixels whose centers lie inside the outer loop or on its boundary.
/// The inner loop is not subtracted.
pub fn rasterize_mask(contour: &LipContour, width: usize, height: usize) -> Mask {
    rasterize_polygon(&contour.outer_polygon(), width, height)
}

pub fn rasterize_polygon(poly: &[Point], width: usize, height: usize) -> Mask {
    let mut mask = Mask::filled(width, height, 0);
    let n = poly.len();
    if n < 2 || width == 0 || height == 0 {
        return mask;
    }
    let fill_span = |mask: &mut Mask, y: usize, xa: f64, xb: f64| {
        let lo = xa.ceil().max(0.0);
        let hi = xb.floor().min((width - 1) as f64);
        if lo > hi {
            return;
        }
        for x in lo as usize..=hi as usize {
            mask.set(x, y, 1);
        }
    };
    let mut xs = Vec::new();
    for y in 0..height {
        let yc = y as f64;
        xs.clear();
        for i in 0..n {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            if (p.y <= yc && yc < q.y) || (q.y <= yc && yc < p.y) {
                xs.push(p.x + (yc - p.y) * (q.x - p.x) / (q.y - p.y));
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in xs.chunks_exact(2) {
            fill_span(&mut mask, y, pair[0], pair[1]);
        }
    }
    // centers lying exactly on an edge count as inside
    const ON_EDGE: f64 = 1e-9;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (ylo, yhi) = (p.y.min(q.y), p.y.max(q.y));
        let first = ylo.ceil().max(0.0);
        let last = yhi.floor().min((height - 1) as f64);
        if first > last {
            continue;
        }
        for y in first as usize..=last as usize {
            let yc = y as f64;
            if (q.y - p.y).abs() < 1e-15 {
                fill_span(&mut mask, y, p.x.min(q.x), p.x.max(q.x));
            } else {
                let x = p.x + (yc - p.y) * (q.x - p.x) / (q.y - p.y);
                let r = x.round();
                if (x - r).abs() < ON_EDGE && r >= 0.0 && r < width as f64 {
                    mask.set(r as usize, y, 1);
                }
            }
        }
    }
    mask
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ThicknessProfile {
    pub per_column: Vec<u32>,
    /// Mean over columns that contain lip pixels.
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ColorStats {
    pub mean: [f64; 3],
    pub std: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticShapeFeatures {
    pub area_px: u32,
    pub perimeter_px: f64,
    pub upper_thickness: ThicknessProfile,
    pub lower_thickness: ThicknessProfile,
    pub curvature_mean: f64,
    pub symmetry: f64,
    pub color_stats: ColorStats,
}

/// Boundary points compared when estimating discrete curvature.
const CURVATURE_STEP: usize = 5;

pub fn static_features(roi: &LipRoi) -> Result<StaticShapeFeatures> {
    let mask = &roi.mask;
    let area = mask.count_set();
    if area == 0 {
        return Err(Error::EmptyMask);
    }
    debug_assert!(area <= ROI_PIXELS);

    let boundaries = outer_boundaries(mask);
    let perimeter: f64 = boundaries.iter().map(|b| boundary_length(b)).sum();
    let curvatures: Vec<f64> = boundaries
        .iter()
        .flat_map(|b| boundary_curvature(b, CURVATURE_STEP))
        .collect();
    let curvature_mean = if curvatures.is_empty() {
        0.0
    } else {
        curvatures.iter().sum::<f64>() / curvatures.len() as f64
    };

    let (upper, lower) = thickness(mask, |x| roi.midline_y(x));

    Ok(StaticShapeFeatures {
        area_px: area as u32,
        perimeter_px: perimeter,
        upper_thickness: upper,
        lower_thickness: lower,
        curvature_mean,
        symmetry: mirror_symmetry(mask).unwrap_or(0.0),
        color_stats: color_stats(roi),
    })
}

/// Splits the longest set-pixel run of every column at the midline:
/// pixels with center above `midline(x)` are upper lip, the rest lower lip.
pub fn thickness(
    mask: &Mask,
    midline: impl Fn(f64) -> f64,
) -> (ThicknessProfile, ThicknessProfile) {
    let (w, h) = (mask.width(), mask.height());
    let mut upper = vec![0u32; w];
    let mut lower = vec![0u32; w];
    for x in 0..w {
        let mut best = (0usize, 0usize);
        let mut y = 0;
        while y < h {
            if mask.get(x, y) == 0 {
                y += 1;
                continue;
            }
            let start = y;
            while y < h && mask.get(x, y) != 0 {
                y += 1;
            }
            if y - start > best.1 - best.0 {
                best = (start, y);
            }
        }
        let m = midline(x as f64);
        let above = (best.0..best.1).filter(|&yy| (yy as f64) < m).count();
        upper[x] = above as u32;
        lower[x] = (best.1 - best.0 - above) as u32;
    }
    let profile = |own: Vec<u32>, other: &[u32]| {
        let cols: Vec<usize> = (0..w).filter(|&x| own[x] + other[x] > 0).collect();
        let mean = if cols.is_empty() {
            0.0
        } else {
            cols.iter().map(|&x| own[x] as f64).sum::<f64>() / cols.len() as f64
        };
        ThicknessProfile {
            per_column: own,
            mean,
        }
    };
    let up = profile(upper.clone(), &lower);
    let low = profile(lower, &upper);
    (up, low)
}

/// Intersection over union of the mask and its left-right mirror image.
pub fn mirror_symmetry(mask: &Mask) -> Option<f64> {
    let (w, h) = (mask.width(), mask.height());
    let mut inter = 0usize;
    let mut union = 0usize;
    for y in 0..h {
        for x in 0..w {
            let a = mask.get(x, y) != 0;
            let b = mask.get(w - 1 - x, y) != 0;
            inter += (a && b) as usize;
            union += (a || b) as usize;
        }
    }
    (union > 0).then(|| inter as f64 / union as f64)
}

fn color_stats(roi: &LipRoi) -> ColorStats {
    let mut sum = [0.0; 3];
    let mut sq = [0.0; 3];
    let mut n = 0.0;
    for (m, c) in roi.mask.data().iter().zip(roi.color.data()) {
        if *m == 0 {
            continue;
        }
        n += 1.0;
        for ch in 0..3 {
            let v = c[ch] as f64;
            sum[ch] += v;
            sq[ch] += v * v;
        }
    }
    let mut out = ColorStats::default();
    if n == 0.0 {
        return out;
    }
    for ch in 0..3 {
        out.mean[ch] = sum[ch] / n;
        out.std[ch] = (sq[ch] / n - out.mean[ch] * out.mean[ch]).max(0.0).sqrt();
    }
    out
}

// E, SE, S, SW, W, NW, N, NE: clockwise on screen with y pointing down
const DIRS: [(isize, isize); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

/// Outer border of every 8-connected component, traced clockwise from its
/// top-left pixel (Moore neighbour tracing).
pub fn outer_boundaries(mask: &Mask) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (mask.width(), mask.height());
    let mut label = vec![0u32; w * h];
    let mut next = 0u32;
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) == 0 || label[y * w + x] != 0 {
                continue;
            }
            next += 1;
            label[y * w + x] = next;
            stack.push((x, y));
            while let Some((cx, cy)) = stack.pop() {
                for (dx, dy) in DIRS {
                    let nx = cx as isize + dx;
                    let ny = cy as isize + dy;
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if mask.get(nx, ny) != 0 && label[ny * w + nx] == 0 {
                        label[ny * w + nx] = next;
                        stack.push((nx, ny));
                    }
                }
            }
            out.push(trace_border(mask, (x, y)));
        }
    }
    out
}

fn trace_border(mask: &Mask, start: (usize, usize)) -> Vec<(usize, usize)> {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let set = |x: isize, y: isize| x >= 0 && y >= 0 && x < w && y < h && mask.get(x as usize, y as usize) != 0;
    let mut points = vec![start];
    let mut cur = (start.0 as isize, start.1 as isize);
    // pretend we arrived moving east; the search then starts at north
    let mut dir = 0usize;
    let mut first_dir = None;
    loop {
        let from = (dir + 6) % 8;
        let Some(nd) = (0..8)
            .map(|k| (from + k) % 8)
            .find(|&d| set(cur.0 + DIRS[d].0, cur.1 + DIRS[d].1))
        else {
            return points; // isolated pixel
        };
        if cur == (start.0 as isize, start.1 as isize) {
            match first_dir {
                None => first_dir = Some(nd),
                Some(f) if f == nd => break,
                Some(_) => {}
            }
        }
        cur = (cur.0 + DIRS[nd].0, cur.1 + DIRS[nd].1);
        dir = nd;
        points.push((cur.0 as usize, cur.1 as usize));
        if points.len() > 4 * mask.width() * mask.height() + 8 {
            break;
        }
    }
    // the walk ends back on the start pixel; drop the duplicate
    points.pop();
    points
}

/// Closed-loop length with unit axial and sqrt(2) diagonal steps.
pub fn boundary_length(b: &[(usize, usize)]) -> f64 {
    if b.len() < 2 {
        return 0.0;
    }
    (0..b.len())
        .map(|i| {
            let (x0, y0) = b[i];
            let (x1, y1) = b[(i + 1) % b.len()];
            if x0 != x1 && y0 != y1 {
                SQRT_2
            } else {
                1.0
            }
        })
        .sum()
}

/// Absolute turning angle per unit length at each boundary point, using the
/// points `step` positions before and after.
pub fn boundary_curvature(b: &[(usize, usize)], step: usize) -> Vec<f64> {
    let n = b.len();
    if n < 2 * step + 1 {
        return Vec::new();
    }
    let p = |i: usize| Point::new(b[i % n].0 as f64, b[i % n].1 as f64);
    (0..n)
        .filter_map(|i| {
            let a = p(i + n - step);
            let c = p(i);
            let d = p(i + step);
            let v1 = c - a;
            let v2 = d - c;
            let l1 = v1.x.hypot(v1.y);
            let l2 = v2.x.hypot(v2.y);
            if l1 < 1e-12 || l2 < 1e-12 {
                return None;
            }
            let cross = v1.x * v2.y - v1.y * v2.x;
            let dot = v1.x * v2.x + v1.y * v2.y;
            Some(cross.atan2(dot).abs() / (0.5 * (l1 + l2)))
        })
        .collect()
}
