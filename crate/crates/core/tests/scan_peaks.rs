use std::f64::consts::PI;

use bangbang_core::scan::golden_section_max;
use bangbang_core::{
    refine_peak, scan_tau, CouplingFunction, Error, Metric, ModeSet, Reservoir, ScanSpec,
};

fn fig1() -> Reservoir {
    Reservoir::Common(CouplingFunction::gaussian(5.0, 1.0, 0.1).unwrap().discretize(2000, 6.0).unwrap())
}

fn averaged_scan() -> ScanSpec {
    ScanSpec::new(PI / 10.0, 3.0 * PI, 300, Metric::TimeAveragedC, 30.0)
}

#[test]
fn averaged_retention_peaks_near_the_centre_period() {
    let r = fig1();
    let res = scan_tau(&r, &averaged_scan()).unwrap();
    let rows = &res.rows;
    let local_max: Vec<f64> = (1..rows.len() - 1)
        .filter(|&i| rows[i].value > rows[i - 1].value && rows[i].value >= rows[i + 1].value)
        .map(|i| rows[i].tau)
        .collect();
    assert!(
        local_max.iter().any(|t| (t / (2.0 * PI) - 1.0).abs() < 0.05),
        "{local_max:?}"
    );
    for row in rows {
        assert!((0.0..=1.0).contains(&row.value));
    }
    assert_eq!(res.best_value, rows.iter().map(|r| r.value).fold(0.0, f64::max));
}

#[test]
fn fast_train_beats_the_half_period_train() {
    let r = fig1();
    let spec = averaged_scan();
    let fast = spec.evaluate(&r, PI / 5.0).unwrap();
    let half = spec.evaluate(&r, PI).unwrap();
    assert!(fast > half, "{fast} vs {half}");
}

#[test]
fn horizon_metric_refines_to_the_centre_period() {
    let r = fig1();
    let spec = ScanSpec::new(1.5 * PI, 2.5 * PI, 21, Metric::CAtHorizon, 6.0 * PI);
    let (tau, value) = refine_peak(&r, &spec, (1.5 * PI, 2.5 * PI)).unwrap();
    assert!((0.95 * 2.0 * PI..=1.05 * 2.0 * PI).contains(&tau), "{tau}");
    let grid = scan_tau(&r, &spec).unwrap();
    assert!(value >= grid.best_value - 1e-12, "{value} < {}", grid.best_value);
    let merged = grid.with_refinement(tau, value);
    assert!(merged.best_value >= value);
}

#[test]
fn single_mode_refines_to_the_echo_interval() {
    let r = Reservoir::Common(ModeSet::single(1.0, 0.5).unwrap());
    // tau = 1.5 pi also nulls the displacement at 6 pi, so keep it out of the bracket.
    let spec = ScanSpec::new(1.6 * PI, 2.4 * PI, 11, Metric::CAtHorizon, 6.0 * PI);
    let (tau, value) = refine_peak(&r, &spec, (1.6 * PI, 2.4 * PI)).unwrap();
    assert!((tau - 2.0 * PI).abs() < 1e-3, "{tau}");
    assert!((value - 1.0).abs() < 1e-6);
}

#[test]
fn commensurate_intervals_tie_with_the_echo() {
    let r = Reservoir::Common(ModeSet::single(1.0, 0.5).unwrap());
    let spec = ScanSpec::new(1.5 * PI, 2.5 * PI, 11, Metric::CAtHorizon, 6.0 * PI);
    assert!((spec.evaluate(&r, 1.5 * PI).unwrap() - 1.0).abs() < 1e-12);
    let err = refine_peak(&r, &spec, (1.5 * PI, 2.5 * PI)).unwrap_err();
    assert!(matches!(err, Error::NoBracket { .. }));
}

#[test]
fn refinement_needs_a_bracketed_peak() {
    let r = Reservoir::Common(ModeSet::single(1.0, 0.5).unwrap());
    let spec = ScanSpec::new(1.0, 2.0, 5, Metric::CAtHorizon, 6.0 * PI);
    let err = refine_peak(&r, &spec, (2.5 * PI, 3.0 * PI)).unwrap_err();
    assert!(matches!(err, Error::NoBracket { .. }), "{err}");
}

#[test]
fn golden_section_finds_an_injected_peak() {
    let (tau, _) =
        golden_section_max(|t| Ok(1.0 - (t - 2.0 * PI).powi(2)), 5.0, 7.5, 1e-4).unwrap();
    assert!((tau - 2.0 * PI).abs() < 1e-4);
}

#[test]
fn identical_specs_export_identical_text() {
    let r = fig1();
    let spec = ScanSpec::new(0.5, 7.0, 25, Metric::MinC, 20.0);
    let a = scan_tau(&r, &spec).unwrap().to_csv();
    let b = scan_tau(&r, &spec).unwrap().to_csv();
    assert_eq!(a, b);
}
