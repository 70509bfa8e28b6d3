//! Second-derivative-of-Gaussian (G2) steerable filtering.
//!
//! The response at angle `theta` is `c^2 Gxx + 2 c s Gxy + s^2 Gyy` applied to
//! the image, with `(c, s) = (cos theta, sin theta)` in image coordinates.
//! All three basis kernels are separable products of 1-D Gaussian factors.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::raster::{reflect101, RealImage};

#[derive(Debug, Clone, PartialEq)]
pub struct SteerableBasis {
    pub sigma: f64,
    pub radius: usize,
    /// Gaussian, normalized to unit sum; index `radius` is the center tap.
    pub smooth: Vec<f64>,
    /// First derivative of `smooth`.
    pub first: Vec<f64>,
    /// Second derivative of `smooth`, shifted by a multiple of `smooth` to sum to zero.
    pub second: Vec<f64>,
}

/// Basis responses `Gxx * I`, `Gxy * I`, `Gyy * I`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisResponses {
    pub xx: RealImage,
    pub xy: RealImage,
    pub yy: RealImage,
}

impl SteerableBasis {
    /// Kernel support is `+-ceil(3 sigma)`.
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0, "sigma must be positive");
        let radius = (3.0 * sigma).ceil() as usize;
        let s2 = sigma * sigma;
        let taps = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            (0..=2 * radius)
                .map(|i| f(i as f64 - radius as f64))
                .collect()
        };
        let raw = taps(&|u| (-u * u / (2.0 * s2)).exp());
        let mass: f64 = raw.iter().sum();
        let smooth: Vec<f64> = raw.iter().map(|v| v / mass).collect();
        let first: Vec<f64> = smooth
            .iter()
            .enumerate()
            .map(|(i, g)| -(i as f64 - radius as f64) / s2 * g)
            .collect();
        let second_raw: Vec<f64> = smooth
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let u = i as f64 - radius as f64;
                (u * u / (s2 * s2) - 1.0 / s2) * g
            })
            .collect();
        let dc: f64 = second_raw.iter().sum();
        let second = second_raw
            .iter()
            .zip(&smooth)
            .map(|(d, g)| d - dc * g)
            .collect();
        SteerableBasis {
            sigma,
            radius,
            smooth,
            first,
            second,
        }
    }

    pub fn responses(&self, image: &RealImage) -> BasisResponses {
        let along_x_second = pass(image, &self.second, Axis::X, Parity::EvenZeroSum);
        let xx = pass(&along_x_second, &self.smooth, Axis::Y, Parity::Even);
        let along_x_first = pass(image, &self.first, Axis::X, Parity::Odd);
        let xy = pass(&along_x_first, &self.first, Axis::Y, Parity::Odd);
        let along_x_smooth = pass(image, &self.smooth, Axis::X, Parity::Even);
        let yy = pass(&along_x_smooth, &self.second, Axis::Y, Parity::EvenZeroSum);
        BasisResponses { xx, xy, yy }
    }
}

/// Interpolation weights for `(Gxx, Gxy, Gyy)` at `orientation_deg`.
pub fn steering_weights(orientation_deg: f64) -> [f64; 3] {
    let t = orientation_deg.to_radians();
    let (s, c) = t.sin_cos();
    [c * c, 2.0 * c * s, s * s]
}

impl BasisResponses {
    pub fn steer(&self, orientation_deg: f64) -> RealImage {
        let [a, b, c] = steering_weights(orientation_deg);
        let data = self
            .xx
            .data()
            .iter()
            .zip(self.xy.data())
            .zip(self.yy.data())
            .map(|((xx, xy), yy)| a * xx + b * xy + c * yy)
            .collect();
        RealImage::from_vec(self.xx.width(), self.xx.height(), data)
    }
}

/// Second directional derivative of a Gaussian along `orientation_deg`, convolved
/// with `gray`. Borders are reflected (reflect-101).
pub fn steerable_response(gray: &RealImage, orientation_deg: f64, sigma: f64) -> RealImage {
    SteerableBasis::new(sigma).responses(gray).steer(orientation_deg)
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

#[derive(Clone, Copy, PartialEq)]
enum Parity {
    Even,
    /// Symmetric kernel whose taps sum to zero: evaluated as weighted second
    /// differences so constant input maps to exactly zero.
    EvenZeroSum,
    /// Antisymmetric kernel: evaluated as weighted first differences.
    Odd,
}

/// 1-D convolution `out(x) = sum_u k(u) in(x - u)` along one axis.
fn pass(image: &RealImage, kernel: &[f64], axis: Axis, parity: Parity) -> RealImage {
    let (w, h) = (image.width(), image.height());
    let r = kernel.len() / 2;
    let (n, stride_along) = match axis {
        Axis::X => (w, 1usize),
        Axis::Y => (h, w),
    };
    let src = image.data();
    let mut out = alloc::vec![0.0; w * h];
    let lines = match axis {
        Axis::X => h,
        Axis::Y => w,
    };
    let mut line = alloc::vec![0.0; n];
    for l in 0..lines {
        let base = match axis {
            Axis::X => l * w,
            Axis::Y => l,
        };
        for (i, v) in line.iter_mut().enumerate() {
            *v = src[base + i * stride_along];
        }
        let at = |i: isize| line[reflect101(i, n)];
        for i in 0..n {
            let ii = i as isize;
            let center = line[i];
            let mut acc = 0.0;
            match parity {
                Parity::Even => {
                    acc = kernel[r] * center;
                    for u in 1..=r {
                        let u_ = u as isize;
                        acc += kernel[r + u] * (at(ii - u_) + at(ii + u_));
                    }
                }
                Parity::EvenZeroSum => {
                    for u in 1..=r {
                        let u_ = u as isize;
                        acc += kernel[r + u] * (at(ii - u_) + at(ii + u_) - 2.0 * center);
                    }
                }
                Parity::Odd => {
                    for u in 1..=r {
                        let u_ = u as isize;
                        acc += kernel[r + u] * (at(ii - u_) - at(ii + u_));
                    }
                }
            }
            out[base + i * stride_along] = acc;
        }
    }
    RealImage::from_vec(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_moments() {
        let b = SteerableBasis::new(2.0);
        assert_eq!(b.radius, 6);
        let sum: f64 = b.smooth.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
        let sum2: f64 = b.second.iter().sum();
        assert!(sum2.abs() < 1e-15);
        for u in 0..=b.radius {
            assert_eq!(b.smooth[b.radius + u], b.smooth[b.radius - u]);
            assert_eq!(b.first[b.radius + u], -b.first[b.radius - u]);
        }
    }

    #[test]
    fn constant_image_gives_exact_zero() {
        let img = RealImage::filled(40, 30, 137.0);
        for k in 0..8 {
            let r = steerable_response(&img, k as f64 * 22.5, 2.0);
            assert!(r.data().iter().all(|&v| v == 0.0), "orientation {k}");
        }
    }

    #[test]
    fn weights_at_axes() {
        let [a, b, c] = steering_weights(0.0);
        assert_eq!((a, b, c), (1.0, 0.0, 0.0));
        let [a, b, c] = steering_weights(45.0);
        assert!((a - 0.5).abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && (c - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vertical_stripes_respond_at_zero_degrees_only() {
        // intensity varies along x only, so the 90 degree derivative vanishes
        let img = RealImage::from_fn(48, 48, |x, _| ((x as f64) * 0.7).sin() * 50.0);
        let r0 = steerable_response(&img, 0.0, 2.0);
        let r90 = steerable_response(&img, 90.0, 2.0);
        let e0: f64 = r0.data().iter().map(|v| v * v).sum();
        let e90: f64 = r90.data().iter().map(|v| v * v).sum();
        assert!(e0 > 1.0);
        assert!(e90 < 1e-20 * e0.max(1.0));
    }
}
