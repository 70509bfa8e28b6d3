mod oracles;

use lipdyn_core::verifier::network::batch_loss;
use lipdyn_core::verifier::{choose_threshold, Network, Template, TrainConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Three-pair batch whose pre-activations all sit at least `margin` from the
/// ReLU kink and whose negative pairs are away from the hinge.
fn kink_free_batch(dim: usize, channels: usize) -> (Network, Vec<Vec<f64>>) {
    for seed in 0..10_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Network::init(dim, channels, seed);
        for p in net.params.iter_mut() {
            *p += rng.random_range(-0.05..0.05);
        }
        let xs: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect())
            .collect();
        let clear = xs.iter().all(|x| net.min_activation_margin(x).unwrap() > 2e-3);
        if clear {
            return (net, xs);
        }
    }
    panic!("no kink-free instance found");
}

#[test]
fn backprop_matches_central_differences() {
    let margin = 3.0;
    let (net, xs) = kink_free_batch(12, 8);
    let pairs: Vec<(&[f64], &[f64], bool)> = vec![
        (&xs[0], &xs[1], true),
        (&xs[2], &xs[3], false),
        (&xs[4], &xs[5], false),
    ];
    let mut grad = vec![0.0; net.params.len()];
    batch_loss(&net, &pairs, margin, Some(&mut grad)).unwrap();
    let numeric = oracles::central_differences(&net.params, 1e-4, |p| {
        let probe = Network { params: p.to_vec(), ..net.clone() };
        batch_loss(&probe, &pairs, margin, None).unwrap()
    });
    for (i, (a, n)) in grad.iter().zip(&numeric).enumerate() {
        let r = oracles::relative_error(*a, *n);
        assert!(r < 1e-4, "param {i}: analytic {a}, numeric {n}, rel {r}");
    }
}

#[test]
fn threshold_examples_match_brute_force() {
    let cases: [(&[f64], &[f64]); 3] = [
        (&[1.0, 2.0], &[3.0, 4.0]),
        (&[0.2, 0.4, 0.9], &[0.5, 1.1, 1.4, 2.0]),
        (&[1.0, 1.0, 2.0, 3.0], &[1.5, 2.5, 3.5]),
    ];
    for (g, i) in cases {
        let c = choose_threshold(g, i).unwrap();
        let b = oracles::brute_force_eer_threshold(g, i);
        // the interpolated threshold and the best swept one share a bracket of adjacent samples
        let (lo, hi) = (c.tau.min(b), c.tau.max(b));
        assert!(!g.iter().chain(i).any(|&s| lo < s && s < hi), "{g:?} {i:?}: {} vs {b}", c.tau);
    }
    assert_eq!(choose_threshold(&[1.0, 2.0], &[3.0, 4.0]).unwrap().tau, 2.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn loss_is_nonnegative(seed in any::<u64>(), same in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = Network::init(10, 4, seed);
        let a: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
        let l = batch_loss(&net, &[(&a, &b, same)], 1.0, None).unwrap();
        prop_assert!(l >= 0.0);
        prop_assert_eq!(batch_loss(&net, &[(&a, &a, true)], 1.0, None).unwrap(), 0.0);
    }

    #[test]
    fn eer_rates_balance_better_than_any_sample_threshold(
        g in prop::collection::vec(0.0f64..10.0, 1..20),
        i in prop::collection::vec(0.0f64..10.0, 1..20),
    ) {
        let c = choose_threshold(&g, &i).unwrap();
        prop_assert!(c.eer >= 0.0 && c.eer <= 1.0);
        let far = |t: f64| i.iter().filter(|&&d| d <= t).count() as f64 / i.len() as f64;
        let frr = |t: f64| g.iter().filter(|&&d| d > t).count() as f64 / g.len() as f64;
        let gap = |t: f64| (far(t) - frr(t)).abs();
        let best = oracles::brute_force_eer_threshold(&g, &i);
        prop_assert!(gap(c.tau) <= gap(best) + 1.0 / g.len().min(i.len()) as f64 + 1e-12);
    }

    #[test]
    fn gallery_duplicates_leave_decisions_unchanged(
        gallery in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 4), 1..6),
        probe in prop::collection::vec(-3.0f64..3.0, 4),
        tau in 0.0f64..4.0,
        dup in 0usize..6,
    ) {
        let t = Template::new("s".into(), gallery.clone(), tau, 1, String::new()).unwrap();
        let mut more = gallery.clone();
        more.push(gallery[dup % gallery.len()].clone());
        let d = Template::new("s".into(), more, tau, 1, String::new()).unwrap();
        prop_assert_eq!(t.decide(&probe), d.decide(&probe));
    }
}

#[test]
fn default_training_config() {
    let c = TrainConfig::default();
    assert_eq!((c.channels, c.learning_rate, c.batch_size, c.epochs, c.margin), (8, 1e-3, 32, 50, 1.0));
}
