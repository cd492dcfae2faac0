//! Threshold formulas against an independent 50-digit evaluation stored in
//! `fixtures/thresholds.txt` (regenerate with `fixtures/gen_thresholds.py`).

use chemolab_core::constants::{delta0, mu1_star, mu2_star, mu3_star, mu4_star, mu_tilde, Coefficients};

const FIXTURE: &str = include_str!("fixtures/thresholds.txt");

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn rows() -> impl Iterator<Item = (String, Vec<f64>)> {
    FIXTURE.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).map(|l| {
        let mut parts = l.split_whitespace();
        let kind = parts.next().unwrap().to_string();
        (kind, parts.map(|x| x.parse().unwrap()).collect())
    })
}

fn coeffs(chi: f64, r: f64, mu: f64, alpha: f64, beta: f64, lambda: f64) -> Coefficients {
    Coefficients { chi, r, mu, alpha, beta, lambda }
}

#[test]
fn every_fixture_row_matches() {
    let mut counts = std::collections::BTreeMap::new();
    for (kind, x) in rows() {
        let (got, want): (Vec<f64>, Vec<f64>) = match kind.as_str() {
            "mu1" => (vec![mu1_star(x[0], x[1], x[2], x[3]).unwrap()], vec![x[4]]),
            "mu2" => (vec![mu2_star(x[0] as u32, x[1], x[2], x[3]).unwrap()], vec![x[4]]),
            "mu3" => (vec![mu3_star(x[0] as u32, x[1], x[2], x[3]).unwrap()], vec![x[4]]),
            "mu4" => {
                let c = coeffs(x[2], x[5], 1.0, x[3], x[4], x[1]);
                let m = mu4_star(&c, x[0], x[6], x[7], x[8]).unwrap();
                (vec![m.first, m.second, m.value], vec![x[9], x[10], x[9].min(x[10])])
            }
            "mu_tilde" => {
                let c = coeffs(x[0], x[1], x[2], x[3], x[4], x[5]);
                let m = mu_tilde(&c, x[6], x[7], x[8], x[9]).unwrap();
                (vec![m.value, m.margin], vec![x[10].min(x[11]), x[2] - x[10].min(x[11])])
            }
            "delta0" => (vec![delta0(x[0] as u32, x[1]).unwrap()], vec![x[2]]),
            other => panic!("unknown fixture kind {other}"),
        };
        for (g, w) in got.iter().zip(&want) {
            assert!(rel(*g, *w) <= 1e-10, "{kind} {x:?}: got {g}, want {w}");
        }
        *counts.entry(kind).or_insert(0) += 1;
    }
    assert_eq!(counts.len(), 6);
    assert!(counts.values().all(|&n| n >= 20));
}

#[test]
fn fixture_covers_the_reference_examples() {
    let has = |kind: &str, args: &[f64]| rows().any(|(k, x)| k == kind && x[..args.len()] == *args);
    assert!(has("mu1", &[2.0, 0.5, 1.0, 1.0]));
    assert!(has("mu2", &[4.0, 0.5, 1.0, 1.0]));
    assert!(has("mu3", &[2.0, 0.5, 1.0, 1.0]));
    assert!(has("mu4", &[0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 0.067, 1.0]));
}
