//! Seeded synthetic talking-mouth subjects rendered as landmark frames and RGB images.
//!
//! Mouth motion is driven by three periodic latent signals whose periods divide
//! the default window length, so every full window sees whole cycles. Each
//! subject mixes the latents into landmark displacements with its own weights
//! and carries its own lip shape, colour, surface stripes and groove field.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ingest::{LandmarkFrame, FACE_POINTS, MOUTH_OFFSET, MOUTH_POINTS};
use crate::raster::RgbImage;

pub const FRAME_WIDTH: usize = 320;
pub const FRAME_HEIGHT: usize = 200;
pub const FPS: f64 = 25.0;
pub const LATENTS: usize = 3;
/// Frames per cycle of the slowest latent.
pub const PERIOD: f64 = 25.0;

const LANDMARK_JITTER: f64 = 0.25;
const PIXEL_NOISE: f64 = 2.0;

/// Standard normal sample by the Box-Muller transform.
pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Groove {
    /// Horizontal position across the mouth, -1 (left corner) to 1.
    pub u: f64,
    /// Horizontal drift per unit of lip depth.
    pub slant: f64,
    /// Start and end as fractions of lip depth (0 at the outer edge).
    pub v0: f64,
    pub v1: f64,
    pub upper: bool,
    /// Gray levels removed at the groove centre.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectParams {
    pub center: (f64, f64),
    pub half_width: f64,
    pub upper_height: f64,
    pub lower_height: f64,
    /// Inner corner position as a fraction of the half width.
    pub inner_width: f64,
    pub inner_gap: f64,
    pub bow: f64,
    pub tilt: f64,
    /// Per mouth landmark, per latent, (dx, dy) amplitude in pixels.
    pub modes: Vec<[[f64; 2]; LATENTS]>,
    pub phases: [f64; LATENTS],
    /// Latent weights of the jaw opening signal.
    pub opening_mix: [f64; LATENTS],
    /// Jaw drop at full opening, pixels.
    pub opening: f64,
    /// Exponent shaping the opening signal; above 1 the mouth rests closed longer.
    pub opening_gamma: f64,
    /// Scale applied to every latent mode.
    pub motion_gain: f64,
    /// Amplitude of each landmark's private oscillation, pixels.
    pub wobble: f64,
    /// Per mouth landmark, phase and direction of the private oscillation.
    pub wobble_phase: Vec<(f64, f64)>,
    pub skin: [f64; 3],
    pub lip: [f64; 3],
    pub stripe_freq: f64,
    pub stripe_angle: f64,
    pub stripe_amp: f64,
    pub grooves: Vec<Groove>,
}

impl SubjectParams {
    pub fn random(rng: &mut impl Rng) -> SubjectParams {
        let mut r = |lo: f64, hi: f64| rng.random_range(lo..hi);
        let center = (160.0 + r(-6.0, 6.0), 140.0 + r(-4.0, 4.0));
        let half_width = r(42.0, 55.0);
        let upper_height = r(15.0, 21.0);
        let lower_height = r(17.0, 24.0);
        let inner_width = r(0.6, 0.78);
        let inner_gap = r(2.5, 4.0);
        let bow = r(0.05, 0.25);
        let tilt = r(-0.04, 0.04);
        let phases = [r(0.0, TAU), r(0.0, TAU), r(0.0, TAU)];
        let mut opening_mix = [r(-1.0, 1.0), r(-1.0, 1.0), r(-1.0, 1.0)];
        let norm: f64 = opening_mix.iter().map(|v: &f64| v.abs()).sum::<f64>().max(1e-6);
        opening_mix.iter_mut().for_each(|v| *v /= norm);
        let opening = r(4.0, 9.0);
        let modes = (0..MOUTH_POINTS)
            .map(|k| {
                let inner = k >= 12;
                let scale = if inner { 0.8 } else { 1.5 };
                let mut m = [[0.0; 2]; LATENTS];
                for l in m.iter_mut() {
                    *l = [r(-1.0, 1.0) * scale * 1.5, r(-1.0, 1.0) * scale];
                }
                m
            })
            .collect();
        let opening_gamma = r(0.6, 1.8);
        let motion_gain = r(0.5, 1.8);
        let wobble = r(0.0, 1.2);
        let wobble_phase = (0..MOUTH_POINTS).map(|_| (r(0.0, TAU), r(0.0, TAU))).collect();
        let skin = [r(185.0, 225.0), r(140.0, 180.0), r(115.0, 150.0)];
        let lip = [r(150.0, 200.0), r(60.0, 100.0), r(70.0, 110.0)];
        let stripe_freq = r(0.08, 0.3);
        let stripe_angle = r(0.0, PI);
        let stripe_amp = r(5.0, 14.0);
        let count = rng.random_range(10..18);
        let grooves = (0..count)
            .map(|_| {
                let v0 = rng.random_range(0.05..0.3);
                Groove {
                    u: rng.random_range(-0.85..0.85),
                    slant: rng.random_range(-0.12..0.12),
                    v0,
                    v1: rng.random_range((v0 + 0.45).min(0.95)..0.98),
                    upper: rng.random_bool(0.5),
                    depth: rng.random_range(35.0..60.0),
                }
            })
            .collect();
        SubjectParams {
            center,
            half_width,
            upper_height,
            lower_height,
            inner_width,
            inner_gap,
            bow,
            tilt,
            modes,
            phases,
            opening_mix,
            opening,
            opening_gamma,
            motion_gain,
            wobble,
            wobble_phase,
            skin,
            lip,
            stripe_freq,
            stripe_angle,
            stripe_amp,
            grooves,
        }
    }

    fn latents(&self, t: f64) -> [f64; LATENTS] {
        core::array::from_fn(|l| {
            let drift = 1.0 + 0.1 * (TAU * t / (173.0 + 31.0 * l as f64) + self.phases[l]).sin();
            drift * (TAU * (l + 1) as f64 * t / PERIOD + self.phases[l]).sin()
        })
    }

    /// Noise-free mouth landmarks at frame `t`, plus the head offset.
    pub fn mouth_at(&self, t: f64) -> ([Point; MOUTH_POINTS], Point) {
        let s = self.latents(t);
        let mix = self.opening_mix.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>();
        let open = clamp01(0.5 + 0.5 * mix).powf(self.opening_gamma);
        let head = Point::new(
            2.0 * (TAU * t / 97.0 + self.phases[0]).sin(),
            1.5 * (TAU * t / 131.0 + self.phases[1]).sin(),
        );
        let (cx, cy) = self.center;
        let w = self.half_width;
        let wi = self.inner_width * w;
        let at = |u: f64, dy: f64| Point::new(cx + u * w, cy + self.tilt * u * w + dy);
        let mut p = [Point::new(0.0, 0.0); MOUTH_POINTS];
        for k in 0..=6 {
            let a = PI * k as f64 / 6.0;
            let u = -a.cos();
            let dip = self.bow * (-(u / 0.25) * (u / 0.25)).exp();
            p[k] = at(u, -self.upper_height * a.sin() * (1.0 - dip));
        }
        for k in 7..12 {
            let a = PI * (k - 6) as f64 / 6.0;
            p[k] = at(a.cos(), (self.lower_height + open * self.opening) * a.sin());
        }
        let half_gap = 0.5 * self.inner_gap;
        for j in 0..=4 {
            let a = PI * j as f64 / 4.0;
            let q = at(-a.cos() * wi / w, -half_gap * a.sin());
            p[12 + j] = q;
        }
        for j in 1..4 {
            let a = PI * j as f64 / 4.0;
            p[16 + j] = at(a.cos() * wi / w, (half_gap + open * self.opening) * a.sin());
        }
        for (k, q) in p.iter_mut().enumerate() {
            for (l, sl) in s.iter().enumerate() {
                q.x += self.motion_gain * self.modes[k][l][0] * sl;
                q.y += self.motion_gain * self.modes[k][l][1] * sl;
            }
            let (phase, dir) = self.wobble_phase[k];
            let w = self.wobble * (TAU * 4.0 * t / PERIOD + phase).sin();
            q.x += w * dir.cos();
            q.y += w * dir.sin();
            q.x += head.x;
            q.y += head.y;
        }
        (p, head)
    }

    fn face_point(&self, i: usize, head: Point, chin_drop: f64) -> Point {
        let (cx, cy) = self.center;
        let (x, y) = match i {
            0..=16 => {
                let a = PI * (1.0 - i as f64 / 16.0);
                let down = a.sin();
                (cx + 105.0 * a.cos(), cy - 40.0 + 85.0 * down + chin_drop * down * down)
            }
            17..=26 => {
                let side = if i < 22 { -1.0 } else { 1.0 };
                let k = if i < 22 { i - 17 } else { 26 - i } as f64;
                (cx + side * (85.0 - 12.0 * k), cy - 95.0 - 4.0 * (k - 2.0).abs().min(2.0) * -1.0)
            }
            27..=30 => (cx, cy - 85.0 + 12.0 * (i - 27) as f64),
            31..=35 => (cx + 8.0 * (i as f64 - 33.0), cy - 32.0 + (i as f64 - 33.0).abs()),
            _ => {
                let k = (i - 36) % 6;
                let side = if i < 42 { -1.0 } else { 1.0 };
                let a = PI * k as f64 / 3.0;
                (cx + side * 45.0 - 12.0 * a.cos() * side, cy - 78.0 - 4.0 * a.sin())
            }
        };
        Point::new(x + head.x, y + head.y)
    }
}

/// One synthetic subject: appearance and motion parameters plus the seed of
/// its per-frame noise. Equal parameters with different noise seeds make a
/// negative control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSubject {
    pub name: String,
    pub params: SubjectParams,
    pub noise_seed: u64,
}

fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// `y` of a left-to-right polyline at `x`, clamped to its ends.
fn y_at(poly: &[Point], x: f64) -> f64 {
    if x <= poly[0].x {
        return poly[0].y;
    }
    for w in poly.windows(2) {
        if x <= w[1].x {
            let span = w[1].x - w[0].x;
            let f = if span > 1e-9 { (x - w[0].x) / span } else { 1.0 };
            return w[0].y + f * (w[1].y - w[0].y);
        }
    }
    poly[poly.len() - 1].y
}

impl SyntheticSubject {
    /// Detected landmarks for `frame`: the true positions plus jitter.
    pub fn landmarks(&self, frame: u64) -> LandmarkFrame {
        let t = frame as f64;
        let (mouth, head) = self.params.mouth_at(t);
        let mut rng = frame_rng(self.noise_seed, frame);
        let chin = 0.5 * (mouth[9].y - mouth[3].y - self.params.upper_height - self.params.lower_height);
        let points: Vec<Point> = (0..FACE_POINTS)
            .map(|i| {
                let p = if (MOUTH_OFFSET..MOUTH_OFFSET + MOUTH_POINTS).contains(&i) {
                    mouth[i - MOUTH_OFFSET]
                } else {
                    self.params.face_point(i, head, chin)
                };
                let jx = LANDMARK_JITTER * gaussian(&mut rng);
                let jy = LANDMARK_JITTER * gaussian(&mut rng);
                Point::new((p.x + jx).max(0.0), (p.y + jy).max(0.0))
            })
            .collect();
        LandmarkFrame::new(frame, 1000.0 * t / FPS, points, Some(format!("{frame:05}.png")))
            .expect("synthetic landmarks are finite and inside the frame")
    }

    /// Landmarks and the rendered RGB frame.
    pub fn render(&self, frame: u64) -> (LandmarkFrame, RgbImage) {
        let landmarks = self.landmarks(frame);
        let sp = &self.params;
        let (m, _) = sp.mouth_at(frame as f64);
        let upper_outer: Vec<Point> = (0..=6).map(|k| m[k]).collect();
        let lower_outer: Vec<Point> = [0, 11, 10, 9, 8, 7, 6].iter().map(|&k| m[k]).collect();
        let upper_inner: Vec<Point> = [0, 12, 13, 14, 15, 16, 6].iter().map(|&k| m[k]).collect();
        let lower_inner: Vec<Point> = [0, 12, 19, 18, 17, 16, 6].iter().map(|&k| m[k]).collect();
        let mid_x = 0.5 * (m[0].x + m[6].x);
        let half_w = 0.5 * (m[6].x - m[0].x);
        let top = m.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let bottom = m.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let pad_x = 0.3 * (m[6].x - m[0].x) + 4.0;
        let pad_y = 0.3 * (bottom - top) + 4.0;
        let (x_lo, x_hi) = (m[0].x - pad_x, m[6].x + pad_x);
        let (y_lo, y_hi) = (top - pad_y, bottom + pad_y);
        let (sin_a, cos_a) = sp.stripe_angle.sin_cos();
        let mut rng = frame_rng(self.noise_seed ^ 0x9e37_79b9_7f4a_7c15, frame);

        let image = RgbImage::from_fn(FRAME_WIDTH, FRAME_HEIGHT, |px, py| {
            let (x, y) = (px as f64, py as f64);
            let shade = 1.0 - 0.08 * (y - sp.center.1) / FRAME_HEIGHT as f64;
            let skin = sp.skin.map(|c| c * shade);
            if x < x_lo || x > x_hi || y < y_lo || y > y_hi {
                return skin.map(|c| c.round().clamp(0.0, 255.0) as u8);
            }
            let noise = PIXEL_NOISE * gaussian(&mut rng);
            let inside = x >= m[0].x && x <= m[6].x;
            let mut color = skin;
            if inside {
                let uo = y_at(&upper_outer, x);
                let lo = y_at(&lower_outer, x);
                let ui = y_at(&upper_inner, x).max(uo);
                let li = y_at(&lower_inner, x).min(lo).max(ui);
                let c_upper = clamp01(y - uo + 0.5) * clamp01(ui - y + 0.5);
                let c_mouth = clamp01(y - ui + 0.5) * clamp01(li - y + 0.5);
                let c_lower = clamp01(y - li + 0.5) * clamp01(lo - y + 0.5);
                let c_skin = clamp01(1.0 - c_upper - c_mouth - c_lower);
                let u = (x - mid_x) / half_w;
                let lip_at = |upper: bool| {
                    let (a, b) = if upper { (uo, ui) } else { (lo, li) };
                    let depth = (b - a).abs().max(1e-6);
                    let v = clamp01((y - a).abs() / depth);
                    let su = u * half_w;
                    let sv = v * depth;
                    let stripe =
                        sp.stripe_amp * (TAU * sp.stripe_freq * (su * cos_a + sv * sin_a)).sin();
                    let mut groove = 0.0f64;
                    for g in sp.grooves.iter().filter(|g| g.upper == upper) {
                        if v < g.v0 - 0.05 || v > g.v1 + 0.05 {
                            continue;
                        }
                        let gx = (u - (g.u + g.slant * (v - 0.5))) * half_w;
                        let across = clamp01(1.0 - gx.abs() / 1.3);
                        let along = clamp01((v - g.v0 + 0.05) / 0.1) * clamp01((g.v1 + 0.05 - v) / 0.1);
                        groove = groove.max(g.depth * across * along);
                    }
                    sp.lip.map(|c| c + stripe - groove)
                };
                let upper = lip_at(true);
                let lower = lip_at(false);
                let dark = [45.0, 22.0, 28.0];
                color = core::array::from_fn(|ch| {
                    c_skin * skin[ch] + c_upper * upper[ch] + c_mouth * dark[ch] + c_lower * lower[ch]
                });
            }
            color.map(|c| (c + noise).round().clamp(0.0, 255.0) as u8)
        });
        (landmarks, image)
    }
}

/// `n` subjects with parameters drawn from `seed`; names `s00`, `s01`, ...
pub fn synth_subjects(n: usize, seed: u64) -> Result<Vec<SyntheticSubject>> {
    if n < 2 {
        return Err(Error::InvalidConfig("synthetic dataset needs at least 2 subjects".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|i| {
            let params = SubjectParams::random(&mut rng);
            SyntheticSubject {
                name: format!("s{i:02}"),
                params,
                noise_seed: rng.random(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::extract_mouth;

    #[test]
    fn landmarks_are_in_frame_and_deterministic() {
        let subjects = synth_subjects(3, 5).unwrap();
        for s in &subjects {
            for f in [0u64, 7, 60, 250] {
                let a = s.landmarks(f);
                assert_eq!(a, s.landmarks(f));
                for p in a.points() {
                    assert!(p.x < FRAME_WIDTH as f64 && p.y < FRAME_HEIGHT as f64, "{p:?}");
                }
                let m = extract_mouth(&a);
                assert!(m.points[0].x < m.points[6].x);
                assert!(m.points[3].y < m.points[9].y);
            }
        }
        assert!(synth_subjects(1, 5).is_err());
    }

    #[test]
    fn motion_repeats_every_period() {
        let s = &synth_subjects(2, 9).unwrap()[0];
        let strip = |t: f64| {
            let mut p = s.params.clone();
            p.phases = [0.3, 1.1, 2.0];
            p.latents(t)
        };
        let a = strip(3.0);
        let b = strip(28.0);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 0.25);
        }
    }

    #[test]
    fn mouth_pixels_differ_from_skin() {
        let s = &synth_subjects(2, 1).unwrap()[1];
        let (lm, img) = s.render(4);
        let m = extract_mouth(&lm);
        let c = Point::new(0.5 * (m.points[2].x + m.points[4].x), 0.5 * (m.points[3].y + m.points[14].y));
        let lip = img.get(c.x as usize, c.y as usize);
        let skin = img.get(5, 5);
        assert!((lip[1] as i32 - skin[1] as i32).abs() > 30, "{lip:?} vs {skin:?}");
    }
}
