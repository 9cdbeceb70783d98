//! Truncated Fock-space evolution against the closed-form concurrence.

use std::f64::consts::PI;

use bangbang_core::fock_oracle::ReducedTrace;
use bangbang_core::measures::{IDX_00, IDX_11};
use bangbang_core::pulse_dynamics::uniform_grid;
use bangbang_core::{
    compare, evolve, trace, Error, Mode, ModeSet, Normalization, OracleConfig, PulseSchedule,
    Reservoir, Topology,
};

fn one_mode(h_sq: f64) -> ModeSet {
    ModeSet::single(1.0, h_sq).unwrap()
}

fn two_modes() -> ModeSet {
    ModeSet::new(
        1.0,
        vec![
            Mode { omega: 0.9, h_sq: 0.2 },
            Mode { omega: 1.15, h_sq: 0.15 },
        ],
    )
    .unwrap()
}

fn adjudication_grid() -> Vec<f64> {
    uniform_grid(4.0 * PI, 200)
}

fn schedules() -> Vec<PulseSchedule> {
    (0..=2)
        .map(|n| PulseSchedule::uniform(n, 2.0 * PI).unwrap())
        .collect()
}

#[test]
fn single_mode_matches_closed_form() {
    let modes = one_mode(0.5);
    let grid = adjudication_grid();
    for sched in schedules() {
        let cfg = OracleConfig::new(modes.clone(), 40, sched.clone(), grid.clone());
        let oracle = evolve(&cfg).unwrap();
        let analytic =
            trace(&Reservoir::Common(modes.clone()), &grid, &sched, Normalization::Physical).unwrap();
        let report = compare(&analytic, &oracle).unwrap();
        assert!(report.passes(1e-6), "{sched:?}: {} / {}", report.max_rel_err, report.offdiag_max_rel_err);
        assert!(!report.factor_two_discrepancy);
    }
}

#[test]
fn two_modes_match_closed_form() {
    let modes = two_modes();
    let grid = uniform_grid(4.0 * PI, 60);
    for sched in schedules() {
        let cfg = OracleConfig::new(modes.clone(), 16, sched.clone(), grid.clone());
        let oracle = evolve(&cfg).unwrap();
        let analytic =
            trace(&Reservoir::Common(modes.clone()), &grid, &sched, Normalization::Physical).unwrap();
        let report = compare(&analytic, &oracle).unwrap();
        assert!(report.passes(1e-6), "{sched:?}: {}", report.max_rel_err);
    }
}

#[test]
fn separate_reservoirs_match_closed_form() {
    let (a, b) = (one_mode(0.6), ModeSet::single(1.0, 0.3).unwrap());
    let grid = uniform_grid(4.0 * PI, 80);
    for sched in schedules() {
        let cfg = OracleConfig::new(a.clone(), 20, sched.clone(), grid.clone())
            .with_topology(Topology::NonCommon)
            .with_second_modes(b.clone());
        let oracle = evolve(&cfg).unwrap();
        let analytic = trace(
            &Reservoir::NonCommon(a.clone(), b.clone()),
            &grid,
            &sched,
            Normalization::Physical,
        )
        .unwrap();
        let report = compare(&analytic, &oracle).unwrap();
        assert!(report.passes(1e-6), "{sched:?}: {}", report.max_rel_err);
    }
}

#[test]
fn reduced_state_stays_x_shaped_with_fixed_populations() {
    let cfg = OracleConfig::new(
        two_modes(),
        24,
        PulseSchedule::explicit(vec![1.0, 2.5, 6.0]).unwrap(),
        uniform_grid(8.0, 41),
    );
    for s in evolve(&cfg).unwrap().samples {
        let m = s.rho.matrix();
        for r in 0..4 {
            for c in 0..4 {
                let corner = (r == IDX_11 || r == IDX_00) && (c == IDX_11 || c == IDX_00);
                if !corner {
                    assert!(m[(r, c)].norm() < 1e-10, "t = {}: ({r},{c})", s.t);
                }
            }
        }
        assert!((m[(IDX_11, IDX_11)].re - 0.5).abs() < 1e-10);
        assert!((m[(IDX_00, IDX_00)].re - 0.5).abs() < 1e-10);
        assert!(s.truncation_leak < 1e-8);
    }
}

#[test]
fn exchange_coupling_leaves_concurrence_unchanged() {
    let grid = uniform_grid(4.0 * PI, 100);
    let sched = PulseSchedule::uniform(3, 1.3).unwrap();
    // Each qubit sees half the displacement with separate reservoirs.
    for (topology, d) in [(Topology::Common, 30), (Topology::NonCommon, 18)] {
        let base = OracleConfig::new(one_mode(0.5), d, sched.clone(), grid.clone())
            .with_topology(topology);
        let free = evolve(&base).unwrap();
        let coupled = evolve(&base.clone().with_heisenberg(0.3)).unwrap();
        for (a, b) in free.samples.iter().zip(&coupled.samples) {
            assert!(
                (a.concurrence - b.concurrence).abs() < 1e-8,
                "{topology:?} t = {}: {} vs {}",
                a.t,
                a.concurrence,
                b.concurrence
            );
        }
    }
}

/// A small top-level population does not by itself bound the coherence error: at d = 16
/// the leak is 2e-9 while `C` is off by 1e-5. The error goes roughly like `sqrt(leak)`.
#[test]
fn truncation_error_outlives_a_small_leak() {
    let grid = uniform_grid(4.0 * PI, 50);
    let sched = PulseSchedule::uniform(1, 2.0 * PI).unwrap();
    let coarse = evolve(&OracleConfig::new(one_mode(0.5), 16, sched.clone(), grid.clone())).unwrap();
    let fine = evolve(&OracleConfig::new(one_mode(0.5), 32, sched, grid)).unwrap();
    let leak = coarse.samples.iter().map(|s| s.truncation_leak).fold(0.0, f64::max);
    let shift = coarse
        .samples
        .iter()
        .zip(&fine.samples)
        .map(|(a, b)| (a.concurrence - b.concurrence).abs())
        .fold(0.0, f64::max);
    assert!(leak < 1e-8);
    assert!(shift > 1e-6, "{shift:e}");
}

#[test]
fn doubling_the_truncation_changes_nothing() {
    let grid = uniform_grid(4.0 * PI, 50);
    let sched = PulseSchedule::uniform(1, 2.0 * PI).unwrap();
    let coarse = evolve(&OracleConfig::new(one_mode(0.5), 30, sched.clone(), grid.clone())).unwrap();
    let fine = evolve(&OracleConfig::new(one_mode(0.5), 60, sched, grid)).unwrap();
    for (a, b) in coarse.samples.iter().zip(&fine.samples) {
        assert!(a.truncation_leak < 1e-8);
        assert!((a.concurrence - b.concurrence).abs() < 1e-8, "t = {}: {} vs {}", a.t, a.concurrence, b.concurrence);
    }
}

#[test]
fn synchronised_pulse_echo_restores_the_bell_state() {
    let tau = 2.0 * PI;
    let cfg = OracleConfig::new(
        one_mode(1.0),
        40,
        PulseSchedule::uniform(1, tau).unwrap(),
        vec![0.0, tau, 1.5 * tau, 2.0 * tau],
    );
    let out = evolve(&cfg).unwrap();
    let last = out.samples.last().unwrap();
    assert!((last.concurrence - 1.0).abs() < 1e-6, "{}", last.concurrence);
    assert!(out.samples[2].concurrence < 0.5);
}

#[test]
fn printed_prefactor_shows_up_as_a_factor_of_two() {
    let modes = one_mode(0.5);
    let grid = uniform_grid(2.0 * PI, 30);
    let sched = PulseSchedule::none();
    let oracle = evolve(&OracleConfig::new(modes.clone(), 40, sched.clone(), grid.clone())).unwrap();
    let literal =
        trace(&Reservoir::Common(modes), &grid, &sched, Normalization::PaperLiteral).unwrap();
    let report = compare(&literal, &oracle).unwrap();
    assert!(report.factor_two_discrepancy);
    assert!(!report.passes(1e-6));
    for row in &report.rows {
        assert!((row.rel_err - 0.5).abs() < 1e-6, "{row:?}");
    }
}

#[test]
fn comparing_a_trace_with_itself_gives_zero_error() {
    let modes = one_mode(0.2);
    let grid = uniform_grid(10.0, 50);
    let analytic = trace(
        &Reservoir::Common(modes),
        &grid,
        &PulseSchedule::uniform(2, 1.7).unwrap(),
        Normalization::Physical,
    )
    .unwrap();
    let report = compare(&analytic, &ReducedTrace::from_trace(&analytic).unwrap()).unwrap();
    assert!(report.max_abs_err < 1e-15);
    assert!(report.offdiag_max_abs_err < 1e-15);
    assert!(report.passes(1e-12), "{} {}", report.max_rel_err, report.offdiag_max_rel_err);
}

#[test]
fn mismatched_grids_are_rejected() {
    let modes = one_mode(0.7);
    let sched = PulseSchedule::none();
    let analytic =
        trace(&Reservoir::Common(modes.clone()), &[0.0, 1.0], &sched, Normalization::Physical).unwrap();
    let oracle = evolve(&OracleConfig::new(modes, 20, sched, vec![0.0, 1.5])).unwrap();
    assert!(matches!(compare(&analytic, &oracle), Err(Error::GridMismatch(_))));
}

#[test]
fn csv_export_keeps_the_summary_columns() {
    let cfg = OracleConfig::new(one_mode(0.4), 24, PulseSchedule::none(), uniform_grid(3.0, 7));
    let out = evolve(&cfg).unwrap();
    let rows = ReducedTrace::parse_csv_summary(&out.to_csv()).unwrap();
    assert_eq!(rows.len(), 7);
    for (row, s) in rows.iter().zip(&out.samples) {
        assert!((row[0] - s.t).abs() <= 1e-11 * s.t.abs());
        assert!((row[1] - s.offdiag_mag).abs() <= 1e-11 * s.offdiag_mag);
        assert!((row[2] - s.concurrence).abs() <= 1e-11 * s.concurrence);
    }
}
