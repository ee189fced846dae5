use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use roi_lab::config::StateSpec;
use roi_lab::formats::StatsJson;
use roi_lab::montecarlo::{half_probability_error_scale, monte_carlo, rms_deviation, McRun, DEFAULT_SHOTS};

fn runs(shots: u64, seeds: u64) -> Vec<McRun> {
    (0..seeds)
        .map(|s| monte_carlo(&StateSpec::experiment(), &[0.0, FRAC_PI_8, FRAC_PI_4], shots, s).unwrap())
        .collect()
}

#[test]
fn error_scale_matches_two_percent() {
    let scale = half_probability_error_scale(&runs(DEFAULT_SHOTS, 32));
    assert!(scale > 0.02 / 1.5 && scale < 0.02 * 1.5, "{scale}");
}

#[test]
fn four_times_the_shots_halves_the_error() {
    let small = rms_deviation(&runs(400, 32));
    let large = rms_deviation(&runs(1600, 32));
    let ratio = small / large;
    assert!(ratio > 2.0 / 1.5 && ratio < 2.0 * 1.5, "{ratio}");
}

#[test]
fn sequential_stats_survive_json() {
    let run = monte_carlo(&StateSpec::experiment(), &[FRAC_PI_8], 300, 5).unwrap();
    let stats = run.sequential_stats("plus").unwrap();
    let json = serde_json::to_string(&StatsJson::from_stats(&stats)).unwrap();
    let back = serde_json::from_str::<StatsJson>(&json).unwrap().to_stats().unwrap();
    let (a, b) = (stats.records(), back.records());
    assert_eq!(a.len(), b.len());
    for (r, s) in a.iter().zip(&b) {
        assert_eq!((r.a, r.b, &r.x, &r.y), (s.a, s.b, &s.x, &s.y));
        // insert renormalises each block, which may move the last ulp
        assert!((r.p - s.p).abs() < 1e-15);
    }
}
