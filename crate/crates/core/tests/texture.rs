mod oracles;

use lipdyn_core::raster::RealImage;
use lipdyn_core::texture::{glcm, glcm_stats, steerable_response, Glcm, Region, SteerableBasis};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_region(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Region {
    let mut r = Region::full(w, h);
    for v in r.valid.iter_mut() {
        *v = rng.random_bool(0.85);
    }
    r
}

#[test]
fn glcm_and_stats_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let img = RealImage::from_fn(16, 16, |_, _| rng.random_range(-50.0..50.0));
        let region = random_region(&mut rng, 16, 16);
        let fast = glcm(&img, &region, 16, 1).unwrap();
        let slow = oracles::glcm(&img, &region, 16, 1).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                assert!((fast.at(i, j) - slow[i][j]).abs() < 1e-12);
            }
        }
        let s = glcm_stats(&fast).unwrap().to_array();
        let o = oracles::glcm_stats(&slow);
        for k in 0..5 {
            assert!((s[k] - o[k]).abs() < 1e-12, "stat {k}: {} vs {}", s[k], o[k]);
        }
    }
}

#[test]
fn stats_match_oracle_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let raw: Vec<f64> = (0..256).map(|_| rng.random_range(0.0..1.0f64).powi(3)).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let rows: Vec<Vec<f64>> = p.chunks(16).map(|c| c.to_vec()).collect();
        let s = glcm_stats(&Glcm::from_probabilities(16, p)).unwrap().to_array();
        let o = oracles::glcm_stats(&rows);
        for k in 0..5 {
            assert!((s[k] - o[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn quadratic_ramp_response_is_uniform_and_matches_direct_convolution() {
    let img = RealImage::from_fn(32, 32, |x, _| (x as f64) * (x as f64));
    let fast = steerable_response(&img, 0.0, 2.0);
    let direct = oracles::convolve_2d(&img, &oracles::rotated_g2_kernel(2.0, 0.0));
    let r = SteerableBasis::new(2.0).radius;
    let centre = fast.get(16, 16);
    for y in 0..32 {
        for x in r..32 - r {
            assert!((fast.get(x, y) - direct.get(x, y)).abs() < 1e-9);
            assert!((fast.get(x, y) - centre).abs() < 1e-9);
        }
    }
    // twice the second moment of the truncated, DC-corrected 1-D kernel
    let b = SteerableBasis::new(2.0);
    let moment: f64 = b
        .second
        .iter()
        .enumerate()
        .map(|(i, k)| k * ((i as f64 - 6.0).powi(2)))
        .sum();
    assert!((centre - moment).abs() < 1e-9);
    assert!((centre - 1.8543).abs() < 1e-3, "{centre}");
}

#[test]
fn steering_matches_rotated_kernel_at_every_orientation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let img = RealImage::from_fn(32, 32, |_, _| rng.random_range(0.0..255.0));
    for k in 0..8 {
        let deg = k as f64 * 22.5;
        let fast = steerable_response(&img, deg, 2.0);
        let direct = oracles::convolve_2d(&img, &oracles::rotated_g2_kernel(2.0, deg));
        for (a, b) in fast.data().iter().zip(direct.data()) {
            assert!((a - b).abs() < 1e-9, "{deg}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn glcm_is_symmetric_and_normalized(seed in any::<u64>(), levels in 2usize..20, w in 2usize..20, h in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let img = RealImage::from_fn(w, h, |_, _| rng.random_range(0.0..10.0));
        let region = Region::full(w, h);
        match glcm(&img, &region, levels, 1) {
            Ok(m) => {
                let sum: f64 = m.p.iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
                for i in 0..levels {
                    for j in 0..levels {
                        prop_assert_eq!(m.at(i, j), m.at(j, i));
                    }
                }
                let s = glcm_stats(&m).unwrap();
                prop_assert!(s.asm > 0.0 && s.asm <= 1.0);
                prop_assert!(s.idm > 0.0 && s.idm <= 1.0 + 1e-15);
                prop_assert!(s.entropy >= 0.0);
                prop_assert!(s.correlation >= -1.0 - 1e-12 && s.correlation <= 1.0 + 1e-12);
            }
            Err(_) => prop_assert!((w - 1) * h < 2),
        }
    }

    #[test]
    fn steerable_response_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i1 = RealImage::from_fn(24, 20, |_, _| rng.random_range(0.0..255.0));
        let i2 = RealImage::from_fn(24, 20, |_, _| rng.random_range(0.0..255.0));
        let mix = RealImage::from_fn(24, 20, |x, y| a * i1.get(x, y) + b * i2.get(x, y));
        let deg = k as f64 * 22.5;
        let (r1, r2, rm) = (
            steerable_response(&i1, deg, 2.0),
            steerable_response(&i2, deg, 2.0),
            steerable_response(&mix, deg, 2.0),
        );
        for i in 0..rm.data().len() {
            let want = a * r1.data()[i] + b * r2.data()[i];
            prop_assert!((rm.data()[i] - want).abs() < 1e-9);
        }
    }
}
