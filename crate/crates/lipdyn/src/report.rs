//! Plain-text evaluation reports: one `key=value` pair per line, reals in
//! shortest round-trip form, undefined ratios written as `absent`.

use std::fmt::Write;

use lipdyn_core::eval::{AttackRates, EvalReport, Metrics, PrPoint, Summary};

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "absent".to_string(), |x| x.to_string())
}

fn metrics(out: &mut String, prefix: &str, m: &Metrics) {
    let c = &m.confusion;
    let _ = writeln!(out, "{prefix}tp={}", c.tp);
    let _ = writeln!(out, "{prefix}fp={}", c.fp);
    let _ = writeln!(out, "{prefix}tn={}", c.tn);
    let _ = writeln!(out, "{prefix}fn={}", c.fn_);
    let _ = writeln!(out, "{prefix}accuracy={}", m.accuracy);
    let _ = writeln!(out, "{prefix}precision={}", opt(m.precision));
    let _ = writeln!(out, "{prefix}recall={}", opt(m.recall));
    let _ = writeln!(out, "{prefix}f1={}", opt(m.f1));
}

fn summary(out: &mut String, name: &str, s: Option<&Summary>) {
    for (field, v) in [
        ("mean", s.map(|s| s.mean)),
        ("median", s.map(|s| s.median)),
        ("std", s.map(|s| s.std)),
    ] {
        let _ = writeln!(out, "{name}.{field}={}", opt(v));
    }
    let _ = writeln!(out, "{name}.count={}", s.map_or(0, |s| s.count));
}

pub fn format_attacks(out: &mut String, prefix: &str, a: &AttackRates) {
    let _ = writeln!(out, "{prefix}control={}", a.control);
    let _ = writeln!(out, "{prefix}mimic={}", a.mimic);
    let _ = writeln!(out, "{prefix}static_photo={}", a.static_photo);
    let _ = writeln!(out, "{prefix}deepfake={}", a.deepfake);
}

pub fn format_report(r: &EvalReport) -> String {
    let mut out = String::new();
    metrics(&mut out, "", &r.metrics);
    summary(&mut out, "fold_accuracy", Some(&r.accuracy));
    summary(&mut out, "fold_precision", r.precision.as_ref());
    summary(&mut out, "fold_recall", r.recall.as_ref());
    summary(&mut out, "fold_f1", r.f1.as_ref());
    summary(&mut out, "fold_eer", Some(&r.eer));
    format_attacks(&mut out, "attack.", &r.attacks);
    let _ = writeln!(out, "folds={}", r.folds.len());
    for f in &r.folds {
        let prefix = format!("fold.{}.", f.fold);
        metrics(&mut out, &prefix, &f.metrics);
        let _ = writeln!(out, "{prefix}eer={}", f.eer);
        let _ = writeln!(out, "{prefix}tau={}", f.tau);
        format_attacks(&mut out, &format!("{prefix}attack."), &f.attacks);
    }
    let _ = writeln!(out, "pr_points={}", r.pr_curve.len());
    out
}

/// `tau precision recall`, one point per line.
pub fn format_pr(points: &[PrPoint]) -> String {
    let mut out = String::new();
    for p in points {
        let _ = writeln!(out, "{} {} {}", p.tau, p.precision, p.recall);
    }
    out
}

/// Key-value pairs of a report, in file order.
pub fn parse_report(text: &str) -> Vec<(&str, &str)> {
    text.lines().filter_map(|l| l.split_once('=')).collect()
}
