//! Straightforward reference implementations used to check the optimized code.
#![allow(dead_code)]

use lipdyn_core::raster::RealImage;
use lipdyn_core::texture::Region;

fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - m;
    }
    m as usize
}

/// Enumerates every in-region pixel pair and tallies both orders.
pub fn glcm(img: &RealImage, region: &Region, levels: usize, distance: usize) -> Option<Vec<Vec<f64>>> {
    let mut values = Vec::new();
    for y in 0..img.height() {
        for x in 0..img.width() {
            if region.is_valid(x, y) {
                values.push(img.get(x, y));
            }
        }
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let level = |v: f64| -> usize {
        if hi <= lo {
            return 0;
        }
        let mut q = 0;
        // smallest bin whose upper edge exceeds v
        while q + 1 < levels && v >= lo + (hi - lo) * (q + 1) as f64 / levels as f64 {
            q += 1;
        }
        q
    };
    let mut m = vec![vec![0.0; levels]; levels];
    let mut n = 0usize;
    for y in 0..img.height() {
        for x in 0..img.width() {
            let x2 = x + distance;
            if x2 < img.width() && region.is_valid(x, y) && region.is_valid(x2, y) {
                let (a, b) = (level(img.get(x, y)), level(img.get(x2, y)));
                m[a][b] += 1.0;
                m[b][a] += 1.0;
                n += 1;
            }
        }
    }
    if n < 2 {
        return None;
    }
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v /= 2.0 * n as f64;
        }
    }
    Some(m)
}

/// Five statistics computed through the marginal distributions.
pub fn glcm_stats(p: &[Vec<f64>]) -> [f64; 5] {
    let n = p.len();
    let px: Vec<f64> = (0..n).map(|i| p[i].iter().sum()).collect();
    let py: Vec<f64> = (0..n).map(|j| (0..n).map(|i| p[i][j]).sum()).collect();
    let mx: f64 = (0..n).map(|i| i as f64 * px[i]).sum();
    let my: f64 = (0..n).map(|j| j as f64 * py[j]).sum();
    let vx: f64 = (0..n).map(|i| (i as f64 - mx).powi(2) * px[i]).sum();
    let vy: f64 = (0..n).map(|j| (j as f64 - my).powi(2) * py[j]).sum();
    let (mut asm, mut con, mut cov, mut idm, mut ent) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let v = p[i][j];
            let d = i as f64 - j as f64;
            asm += v * v;
            con += d * d * v;
            cov += (i as f64 - mx) * (j as f64 - my) * v;
            idm += v / (1.0 + d * d);
            if v > 0.0 {
                ent -= v * v.ln() / core::f64::consts::LN_2;
            }
        }
    }
    let corr = if vx * vy > 0.0 { cov / (vx * vy).sqrt() } else { 0.0 };
    [asm, con, corr, idm, ent]
}

/// Isotropic Gaussian on the `(2r+1)^2` grid, normalized to unit sum.
pub fn gaussian_2d(sigma: f64, r: isize) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; (2 * r + 1) as usize]; (2 * r + 1) as usize];
    let mut total = 0.0;
    for v in -r..=r {
        for u in -r..=r {
            let val = (-((u * u + v * v) as f64) / (2.0 * sigma * sigma)).exp();
            g[(v + r) as usize][(u + r) as usize] = val;
            total += val;
        }
    }
    for row in g.iter_mut() {
        for x in row.iter_mut() {
            *x /= total;
        }
    }
    g
}

/// Second directional derivative of the sampled Gaussian along `deg`,
/// sampled directly on the rotated axis and shifted by a multiple of the
/// Gaussian to sum to zero. Indexed `[v + r][u + r]`.
pub fn rotated_g2_kernel(sigma: f64, deg: f64) -> Vec<Vec<f64>> {
    let r = (3.0 * sigma).ceil() as isize;
    let g = gaussian_2d(sigma, r);
    let (s, c) = deg.to_radians().sin_cos();
    let s2 = sigma * sigma;
    let mut k = g.clone();
    let mut total = 0.0;
    for v in -r..=r {
        for u in -r..=r {
            let t = u as f64 * c + v as f64 * s;
            let val = (t * t / (s2 * s2) - 1.0 / s2) * g[(v + r) as usize][(u + r) as usize];
            k[(v + r) as usize][(u + r) as usize] = val;
            total += val;
        }
    }
    for v in 0..k.len() {
        for u in 0..k.len() {
            k[v][u] -= total * g[v][u];
        }
    }
    k
}

/// Direct 2-D convolution with reflect-101 borders.
pub fn convolve_2d(img: &RealImage, k: &[Vec<f64>]) -> RealImage {
    let r = (k.len() / 2) as isize;
    let (w, h) = (img.width(), img.height());
    RealImage::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for v in -r..=r {
            for u in -r..=r {
                let sx = reflect(x as isize - u, w);
                let sy = reflect(y as isize - v, h);
                acc += k[(v + r) as usize][(u + r) as usize] * img.get(sx, sy);
            }
        }
        acc
    })
}

/// Pearson correlation between rows `a` and `b`, 0 when either is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa.sqrt() * sbb.sqrt())
    }
}

/// Draws a 1-px line by stepping along the major axis.
pub fn draw_line(img: &mut lipdyn_core::raster::GrayImage, x0: f64, y0: f64, x1: f64, y1: f64) {
    let n = (x1 - x0).abs().max((y1 - y0).abs()).ceil().max(1.0) as usize;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let x = (x0 + t * (x1 - x0)).round();
        let y = (y0 + t * (y1 - y0)).round();
        if x >= 0.0 && y >= 0.0 && (x as usize) < img.width() && (y as usize) < img.height() {
            img.set(x as usize, y as usize, 255);
        }
    }
}

/// Random groove-like edge raster: short strokes at arbitrary angles plus speckle.
pub fn random_edge_raster(rng: &mut impl rand::Rng, w: usize, h: usize) -> lipdyn_core::raster::GrayImage {
    let mut img = lipdyn_core::raster::GrayImage::filled(w, h, 0);
    for _ in 0..rng.random_range(5..25) {
        let x = rng.random_range(0.0..w as f64);
        let y = rng.random_range(0.0..h as f64);
        let a = rng.random_range(0.0..core::f64::consts::PI);
        let len = rng.random_range(3.0..60.0);
        draw_line(&mut img, x, y, x + len * a.cos(), y + len * a.sin());
    }
    for _ in 0..rng.random_range(0..200) {
        let (x, y) = (rng.random_range(0..w), rng.random_range(0..h));
        img.set(x, y, 255);
    }
    img
}

/// Gradient of `f` at `params` by central differences.
pub fn central_differences(params: &[f64], eps: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + eps;
            let up = f(&p);
            p[i] = orig - eps;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * eps)
        })
        .collect()
}

/// `|a - n| / max(|a|, |n|)`, with a floor on the denominator so that
/// gradients at roundoff level are compared absolutely.
pub fn relative_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-8)
}

/// FAR and FRR at every midpoint and sample: the threshold with the smallest
/// |FAR - FRR|, lowest first.
pub fn brute_force_eer_threshold(genuine: &[f64], impostor: &[f64]) -> f64 {
    let mut cands: Vec<f64> = genuine.iter().chain(impostor).copied().collect();
    cands.sort_by(f64::total_cmp);
    let mids: Vec<f64> = cands.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    cands.extend(mids);
    cands.sort_by(f64::total_cmp);
    let mut best = (f64::INFINITY, 0.0);
    for t in cands {
        let far = impostor.iter().filter(|&&d| d <= t).count() as f64 / impostor.len() as f64;
        let frr = genuine.iter().filter(|&&d| d > t).count() as f64 / genuine.len() as f64;
        if (far - frr).abs() < best.0 {
            best = ((far - frr).abs(), t);
        }
    }
    best.1
}
