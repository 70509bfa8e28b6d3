mod oracles;

use lipdyn_core::geom::{Point, Rect};
use lipdyn_core::lipprint::{
    detect_lines, filter_lines, hough_segments, link_segments, match_motion, FilterConfig,
    HoughConfig, LineSegment, LinkConfig, MatchConfig, MAX_VECTORS,
};
use lipdyn_core::raster::GrayImage;
use lipdyn_core::texture::{RegionLabel, RegionTiling};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiling() -> RegionTiling {
    let r = |x, y| Rect { x, y, w: 83, h: 55 };
    RegionTiling {
        rects: [r(0, 0), r(83, 0), r(166, 0), r(0, 55), r(83, 55), r(166, 55)],
    }
}

#[test]
fn vertical_line_is_found() {
    let mut img = GrayImage::filled(100, 80, 0);
    oracles::draw_line(&mut img, 50.0, 20.0, 50.0, 59.0);
    let segs = hough_segments(&img, &HoughConfig::default());
    assert!(!segs.is_empty());
    let best = segs
        .iter()
        .map(|&(a, b)| LineSegment::new(a, b, RegionLabel::UL))
        .max_by(|a, b| a.length().total_cmp(&b.length()))
        .unwrap();
    assert!((best.angle() - 90.0).abs() <= 2.0, "{}", best.angle());
    assert!(best.length() >= 30.0);
}

#[test]
fn parallel_lines_give_distinct_segments() {
    let mut img = GrayImage::filled(100, 80, 0);
    oracles::draw_line(&mut img, 30.0, 20.0, 30.0, 39.0);
    oracles::draw_line(&mut img, 45.0, 20.0, 45.0, 39.0);
    let segs = detect_lines(&img, &tiling(), &HoughConfig::default());
    assert!(segs.len() >= 2);
    assert!(segs.iter().any(|s| (s.center().x - 30.0).abs() < 1.0));
    assert!(segs.iter().any(|s| (s.center().x - 45.0).abs() < 1.0));
}

#[test]
fn segment_endpoints_lie_on_edges_of_random_rasters() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for _ in 0..20 {
        let img = oracles::random_edge_raster(&mut rng, 250, 110);
        for (a, b) in hough_segments(&img, &HoughConfig::default()) {
            assert_ne!(img.get(a.x as usize, a.y as usize), 0);
            assert_ne!(img.get(b.x as usize, b.y as usize), 0);
        }
    }
}

#[test]
fn filtered_segments_respect_bounds_on_synthetic_rasters() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut total = 0;
    for _ in 0..50 {
        let img = oracles::random_edge_raster(&mut rng, 250, 110);
        let lines = detect_lines(&img, &tiling(), &HoughConfig::default());
        let kept = filter_lines(&link_segments(&lines, &LinkConfig::default()), &FilterConfig::default());
        for l in &kept {
            assert!(l.length() > 10.0 && (40.0..=140.0).contains(&l.angle()));
        }
        total += kept.len();
    }
    assert!(total > 0);
}

fn arb_segment() -> impl Strategy<Value = LineSegment> {
    (0.0f64..200.0, 0.0f64..100.0, 0.0f64..200.0, 0.0f64..100.0, 0usize..6).prop_map(|(a, b, c, d, r)| {
        LineSegment::new(Point::new(a, b), Point::new(c, d), RegionLabel::ALL[r])
    })
}

fn arb_chain() -> impl Strategy<Value = Vec<LineSegment>> {
    // near-collinear pieces so that merges actually happen
    prop::collection::vec((0.0f64..3.0, 2.0f64..12.0, -0.1f64..0.1), 1..10).prop_map(|pieces| {
        let mut x = 0.0;
        pieces
            .into_iter()
            .map(|(gap, len, slope)| {
                let a = Point::new(20.0, x + gap);
                let b = Point::new(20.0 + slope * len, x + gap + len);
                x += gap + len;
                LineSegment::new(a, b, RegionLabel::UM)
            })
            .collect()
    })
}

/// Full rescan after every merge.
fn rescan_link(lines: &[LineSegment], max_gap: f64, max_angle: f64) -> Vec<LineSegment> {
    let mut lines = lines.to_vec();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a, b) = (lines[i], lines[j]);
                let gap = [a.p1, a.p2]
                    .iter()
                    .flat_map(|p| [b.p1, b.p2].map(|q| p.dist(q)))
                    .fold(f64::INFINITY, f64::min);
                let mut da = (a.angle() - b.angle()).abs();
                da = da.min(180.0 - da);
                if gap < max_gap && da <= max_angle && best.is_none_or(|(g, _, _)| gap < g) {
                    best = Some((gap, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { return lines };
        let (a, b) = (lines[i], lines[j]);
        let ends = [a.p1, a.p2, b.p1, b.p2];
        let mut far = (a.p1, a.p2, -1.0);
        for s in 0..4 {
            for t in s + 1..4 {
                if ends[s].dist(ends[t]) > far.2 {
                    far = (ends[s], ends[t], ends[s].dist(ends[t]));
                }
            }
        }
        let region = if b.length() > a.length() { b.region } else { a.region };
        lines[i] = LineSegment::new(far.0, far.1, region);
        lines.remove(j);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linking_matches_full_rescan(lines in prop::collection::vec(arb_segment(), 0..15), a in arb_chain(), b in arb_chain()) {
        let mut mixed = lines;
        mixed.extend(a);
        mixed.extend(b.iter().map(|l| l.translate(60.0, 5.0)));
        let cfg = LinkConfig::default();
        prop_assert_eq!(link_segments(&mixed, &cfg), rescan_link(&mixed, cfg.max_gap, cfg.max_angle_deg));
    }

    #[test]
    fn linking_never_grows_count_or_shrinks_longest(lines in prop::collection::vec(arb_segment(), 0..15), chain in arb_chain()) {
        for input in [lines, chain] {
            let out = link_segments(&input, &LinkConfig::default());
            prop_assert!(out.len() <= input.len());
            let longest = |v: &[LineSegment]| v.iter().map(|l| l.length()).fold(0.0, f64::max);
            prop_assert!(longest(&out) >= longest(&input) - 1e-9);
        }
    }

    #[test]
    fn filter_postcondition(lines in prop::collection::vec(arb_segment(), 0..30)) {
        let cfg = FilterConfig::default();
        let kept = filter_lines(&lines, &cfg);
        prop_assert_eq!(kept.len(), lines.iter().filter(|l| l.length() > 10.0 && (40.0..=140.0).contains(&l.angle())).count());
    }

    #[test]
    fn matching_is_translation_equivariant(
        slots in prop::collection::vec((any::<bool>(), 5.0f64..25.0, 0.0f64..180.0), 12),
        jitter in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 12),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        // two well-separated lines per region, so each line has a single candidate
        let t = tiling();
        let mut prev = Vec::new();
        for (k, &(on, len, deg)) in slots.iter().enumerate() {
            if !on {
                continue;
            }
            let r = t.rects[k / 2];
            let c = Point::new(r.x as f64 + 20.0 + 40.0 * (k % 2) as f64, r.y as f64 + 27.0);
            let (s, co) = deg.to_radians().sin_cos();
            let h = Point::new(0.5 * len * co, 0.5 * len * s);
            prev.push(LineSegment::new(c - h, c + h, RegionLabel::ALL[k / 2]));
        }
        let curr: Vec<LineSegment> = prev.iter().zip(&jitter).map(|(l, &(dx, dy))| l.translate(dx, dy)).collect();
        let moved: Vec<LineSegment> = curr.iter().map(|l| l.translate(a, b)).collect();
        let cfg = MatchConfig::default();
        let m0 = match_motion(&prev, &curr, &cfg);
        let m1 = match_motion(&prev, &moved, &cfg);
        prop_assert!(m0.vectors.len() <= MAX_VECTORS);
        prop_assert_eq!(m0.vectors.len(), prev.len().min(MAX_VECTORS));
        prop_assert_eq!(m0.vectors.len(), m1.vectors.len());
        for (u, v) in m0.vectors.iter().zip(&m1.vectors) {
            prop_assert_eq!(u.region, v.region);
            prop_assert!((v.dx - u.dx - a).abs() < 1e-9 && (v.dy - u.dy - b).abs() < 1e-9);
        }
    }

    #[test]
    fn never_more_than_eight_vectors(prev in prop::collection::vec(arb_segment(), 0..40), curr in prop::collection::vec(arb_segment(), 0..40)) {
        let cfg = MatchConfig { max_distance: 1e6, ..MatchConfig::default() };
        let n = match_motion(&prev, &curr, &cfg).vectors.len();
        prop_assert!(n <= MAX_VECTORS);
    }
}
