use lipdyn_core::articulator::BLOCK_DIM;
use lipdyn_core::eval::folds::halves;
use lipdyn_core::eval::{
    assign_folds, assign_subject_folds, blend_windows, metrics, pr_curve, split, static_photo_window,
    synth_subject_data, synth_subjects, Confusion, Metrics, SyntheticSubject,
};
use lipdyn_core::pipeline::PipelineConfig;
use lipdyn_core::verifier::{distance, FeatureTransform};
use lipdyn_core::Error;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn ninety_percent_confusion() {
    let m = Metrics::from_confusion(Confusion { tp: 9, fp: 1, tn: 9, fn_: 1 }).unwrap();
    assert_eq!(m.precision, Some(0.9));
    assert_eq!(m.recall, Some(0.9));
    assert_eq!(m.f1, Some(0.9));
    assert_eq!(m.accuracy, 0.9);
}

#[test]
fn metric_edge_cases() {
    let all_right = metrics(&[(true, true), (false, false), (true, true)]).unwrap();
    assert_eq!((all_right.accuracy, all_right.f1), (1.0, Some(1.0)));
    let none_accepted = metrics(&[(false, false), (false, true)]).unwrap();
    assert_eq!(none_accepted.precision, None);
    assert_eq!(none_accepted.recall, Some(0.0));
    assert_eq!(none_accepted.f1, None);
    assert_eq!(metrics(&[]).unwrap_err(), Error::EmptyInput);
}

proptest! {
    #[test]
    fn metrics_match_a_recount(decisions in prop::collection::vec((any::<bool>(), any::<bool>()), 1..60)) {
        let m = metrics(&decisions).unwrap();
        let count = |a: bool, g: bool| decisions.iter().filter(|d| **d == (a, g)).count() as f64;
        let (tp, fp, tn, fn_) = (count(true, true), count(true, false), count(false, false), count(false, true));
        prop_assert_eq!(m.accuracy, (tp + tn) / decisions.len() as f64);
        prop_assert_eq!(m.precision, (tp + fp > 0.0).then(|| tp / (tp + fp)));
        prop_assert_eq!(m.recall, (tp + fn_ > 0.0).then(|| tp / (tp + fn_)));
        let f1 = match (m.precision, m.recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            _ => None,
        };
        match (m.f1, f1) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn pr_curve_matches_brute_force(
        g in prop::collection::vec(0u8..20, 1..25),
        i in prop::collection::vec(0u8..20, 1..25),
    ) {
        let g: Vec<f64> = g.into_iter().map(|v| v as f64 * 0.5).collect();
        let i: Vec<f64> = i.into_iter().map(|v| v as f64 * 0.5).collect();
        let curve = pr_curve(&g, &i, None).unwrap();
        let mut taus: Vec<f64> = g.iter().chain(&i).copied().collect();
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        prop_assert_eq!(curve.len(), taus.len());
        for (p, &t) in curve.iter().zip(&taus) {
            let tp = g.iter().filter(|&&v| v <= t).count() as f64;
            let fp = i.iter().filter(|&&v| v <= t).count() as f64;
            prop_assert_eq!(p.tau, t);
            prop_assert_eq!(p.precision, tp / (tp + fp));
            prop_assert_eq!(p.recall, tp / g.len() as f64);
        }
        for w in curve.windows(2) {
            prop_assert!(w[0].recall <= w[1].recall);
        }
        let last = curve.last().unwrap();
        prop_assert_eq!(last.recall, 1.0);
        prop_assert_eq!(last.precision, g.len() as f64 / (g.len() + i.len()) as f64);

        let sampled = pr_curve(&g, &i, Some(4)).unwrap();
        prop_assert!(sampled.len() <= 4);
        prop_assert_eq!(sampled.last().unwrap().tau, last.tau);
        prop_assert!(sampled.iter().all(|p| curve.contains(p)));
    }
}

#[test]
fn pr_curve_examples() {
    let c = pr_curve(&[0.1, 0.2], &[0.5, 0.9], None).unwrap();
    assert!(c.iter().any(|p| p.precision == 1.0 && p.recall == 1.0));
    let c = pr_curve(&[1.0], &[2.0], None).unwrap();
    assert!(c.iter().any(|p| p.precision == 1.0 && p.recall == 1.0));
    let same = [0.3, 0.7, 0.7, 1.2, 2.0];
    let c = pr_curve(&same, &same, None).unwrap();
    let full = c.iter().find(|p| p.recall == 1.0).unwrap();
    assert!((full.precision - 0.5).abs() < 1e-12);
    assert_eq!(pr_curve(&[], &[1.0], None).unwrap_err(), Error::EmptySet);
}

fn labels(per_subject: &[usize]) -> Vec<usize> {
    let mut l: Vec<usize> = per_subject.iter().enumerate().flat_map(|(s, &n)| std::iter::repeat_n(s, n)).collect();
    l.shuffle(&mut ChaCha8Rng::seed_from_u64(per_subject.len() as u64));
    l
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn window_folds_partition_and_stratify(
        counts in prop::collection::vec(10usize..30, 2..6),
        k in 3usize..11,
        seed in any::<u64>(),
    ) {
        let l = labels(&counts);
        let folds = assign_folds(&l, k, seed).unwrap();
        prop_assert_eq!(&folds, &assign_folds(&l, k, seed).unwrap());
        prop_assert!(folds.iter().all(|&f| f < k));
        for s in 0..counts.len() {
            let mut per_fold = vec![0usize; k];
            for (i, &f) in folds.iter().enumerate() {
                if l[i] == s {
                    per_fold[f] += 1;
                }
            }
            let lo = *per_fold.iter().min().unwrap();
            let hi = *per_fold.iter().max().unwrap();
            prop_assert!(hi - lo <= 1, "subject {} spread {:?}", s, per_fold);
        }
        let mut tested = vec![0usize; l.len()];
        for f in 0..k {
            let sp = split(&folds, k, f);
            prop_assert_eq!(sp.train.len() + sp.val.len() + sp.test.len(), l.len());
            for &i in &sp.test {
                tested[i] += 1;
            }
            for &i in &sp.val {
                prop_assert!(!sp.test.contains(&i) && !sp.train.contains(&i));
            }
        }
        prop_assert!(tested.iter().all(|&t| t == 1));
    }

    #[test]
    fn subject_folds_keep_subjects_together(n in 6usize..14, seed in any::<u64>()) {
        let l = labels(&vec![4; n]);
        let folds = assign_subject_folds(&l, 3, seed).unwrap();
        for i in 0..l.len() {
            for j in 0..l.len() {
                if l[i] == l[j] {
                    prop_assert_eq!(folds[i], folds[j]);
                }
            }
        }
        let sp = split(&folds, 3, 0);
        let (gallery, probe) = halves(&sp.test, &l);
        prop_assert_eq!(gallery.len() + probe.len(), sp.test.len());
        for &p in &probe {
            prop_assert!(gallery.iter().any(|&g| l[g] == l[p]));
        }
    }
}

#[test]
fn fold_preconditions() {
    let mut l = labels(&[10, 10]);
    assert_eq!(assign_folds(&l, 10, 1).unwrap().len(), 20);
    l.pop();
    assert!(matches!(assign_folds(&l, 10, 1), Err(Error::InsufficientData { have: 9, need: 10, .. })));
    assert!(matches!(assign_folds(&labels(&[10, 10]), 2, 1), Err(Error::InvalidConfig(_))));
}

#[test]
fn synthetic_subjects_are_reproducible_and_distinct() {
    let a = synth_subjects(4, 3).unwrap();
    assert_eq!(a, synth_subjects(4, 3).unwrap());
    assert_ne!(a, synth_subjects(4, 4).unwrap());
    for (i, s) in a.iter().enumerate() {
        assert_eq!(s.name, format!("s{i:02}"));
        for t in &a[i + 1..] {
            assert_ne!(s.params.modes, t.params.modes);
            assert_ne!(s.params.grooves, t.params.grooves);
        }
        let (lm, img) = s.render(17);
        assert_eq!((lm.clone(), img.clone()), s.render(17));
        assert_eq!(lm.image_ref.as_deref(), Some("00017.png"));
    }
}

/// p-value of a permutation test on (mean cross-group distance - mean
/// within-group distance) between two window groups.
fn separation_p_value(a: &[Vec<f64>], b: &[Vec<f64>], rounds: usize) -> f64 {
    let all: Vec<&Vec<f64>> = a.iter().chain(b).collect();
    let n = all.len();
    let d: Vec<Vec<f64>> = all.iter().map(|x| all.iter().map(|y| distance(x, y)).collect()).collect();
    let stat = |group: &[bool]| {
        let (mut cross, mut nc, mut within, mut nw) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                if group[i] == group[j] {
                    within += d[i][j];
                    nw += 1.0;
                } else {
                    cross += d[i][j];
                    nc += 1.0;
                }
            }
        }
        cross / nc - within / nw
    };
    let mut group: Vec<bool> = (0..n).map(|i| i < a.len()).collect();
    let observed = stat(&group);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut at_least = 1;
    for _ in 0..rounds {
        group.shuffle(&mut rng);
        if stat(&group) >= observed {
            at_least += 1;
        }
    }
    at_least as f64 / (rounds + 1) as f64
}

#[test]
fn twin_subjects_are_indistinguishable() {
    let cfg = PipelineConfig::default();
    let base = synth_subjects(2, 31).unwrap();
    let twin = SyntheticSubject {
        name: "twin".into(),
        params: base[0].params.clone(),
        noise_seed: base[0].noise_seed ^ 0xabcdef,
    };
    let windows = 8;
    let data: Vec<_> = [&base[0], &twin, &base[1]]
        .iter()
        .map(|s| synth_subject_data(s, windows, &cfg).unwrap())
        .collect();
    let all: Vec<_> = data.iter().flat_map(|d| d.windows.clone()).collect();
    let t = FeatureTransform::fit(&all).unwrap();
    let vecs: Vec<Vec<Vec<f64>>> = data
        .iter()
        .map(|d| d.windows.iter().map(|w| t.apply(w).unwrap()).collect())
        .collect();
    let twin_p = separation_p_value(&vecs[0], &vecs[1], 999);
    let other_p = separation_p_value(&vecs[0], &vecs[2], 999);
    assert!(twin_p > 0.01, "twin p = {twin_p}");
    assert!(other_p < 0.01, "distinct p = {other_p}");
}

#[test]
fn attack_probes_have_the_stated_shape() {
    let cfg = PipelineConfig::default();
    let s = synth_subjects(2, 8).unwrap();
    let a = synth_subject_data(&s[0], 2, &cfg).unwrap();
    let b = synth_subject_data(&s[1], 2, &cfg).unwrap();

    let still = static_photo_window(&a.frames[3], &cfg).unwrap();
    assert!(still.articulator[..BLOCK_DIM - 3].iter().all(|&v| v == 0.0));
    assert_eq!(still.articulator[BLOCK_DIM - 3..].iter().filter(|&&v| v == 1.0).count(), 1);
    assert!(!still.present[2], "no motion between identical frames");
    assert!(still.lipprint.iter().all(|&v| v == 0.0));

    let same = blend_windows(&a.windows[0], &b.windows[1], 0.0);
    assert_eq!(same, a.windows[0]);
    let fake = blend_windows(&a.windows[0], &b.windows[1], 1.0);
    assert_eq!(fake.static_block, a.windows[0].static_block);
    assert_eq!(fake.texture_raw, a.windows[0].texture_raw);
    assert_eq!(fake.lipprint, b.windows[1].lipprint);
    assert_eq!(fake.articulator, b.windows[1].articulator);
    assert_eq!(fake.present[2], b.windows[1].present[2]);
}

#[test]
fn swapped_dynamics_score_farther_than_genuine_probes() {
    use lipdyn_core::verifier::{fit_model, TrainConfig};
    let cfg = PipelineConfig::default();
    let data: Vec<_> = synth_subjects(6, 12)
        .unwrap()
        .iter()
        .map(|s| synth_subject_data(s, 16, &cfg).unwrap())
        .collect();
    let (mut tw, mut tl, mut vw, mut vl) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (s, d) in data.iter().enumerate() {
        for (i, w) in d.windows.iter().enumerate() {
            if i < 10 {
                tw.push(w.clone());
                tl.push(s);
            } else {
                vw.push(w.clone());
                vl.push(s);
            }
        }
    }
    let model = fit_model(&tw, &tl, &vw, &vl, &TrainConfig::default()).unwrap();
    for (s, d) in data.iter().enumerate() {
        let attacker = &data[(s + 1) % data.len()];
        let gallery: Vec<Vec<f64>> = d.windows[..10].iter().map(|w| model.embed_raw(w).unwrap()).collect();
        let score = |e: Vec<f64>| gallery.iter().map(|g| distance(g, &e)).fold(f64::INFINITY, f64::min);
        let mut genuine = 0.0;
        let mut fake = 0.0;
        for i in 10..16 {
            genuine += score(model.embed_raw(&d.windows[i]).unwrap());
            fake += score(model.embed_raw(&blend_windows(&d.windows[i], &attacker.windows[i], 1.0)).unwrap());
        }
        assert!(fake > genuine, "subject {s}: swapped {fake} vs genuine {genuine}");
    }
}
