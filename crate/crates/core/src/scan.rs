//! Pulse-interval sweeps and golden-section refinement of the synchronised-pulse peak.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::csv::fmt_sig12;
use crate::error::{Error, Result};
use crate::pulse_dynamics::{uniform_grid, Normalization, PulseSchedule, Reservoir};

/// Golden-section stopping width in scaled time.
pub const REFINE_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_METRIC_SAMPLES: usize = 301;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Mean of `C` over a uniform grid on `[0, horizon]`.
    TimeAveragedC,
    /// Minimum of `C` over the same grid.
    MinC,
    /// `C(horizon)`.
    CAtHorizon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseCount {
    Fixed(usize),
    /// `floor(horizon / tau)` pulses, so every schedule spans the same window.
    FillHorizon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanSpec {
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub grid_points: usize,
    pub metric: Metric,
    pub horizon: f64,
    pub pulses: PulseCount,
    /// Time samples used by the averaged and minimum metrics.
    pub samples: usize,
}

impl ScanSpec {
    pub fn new(tau_lo: f64, tau_hi: f64, grid_points: usize, metric: Metric, horizon: f64) -> Self {
        Self {
            tau_lo,
            tau_hi,
            grid_points,
            metric,
            horizon,
            pulses: PulseCount::FillHorizon,
            samples: DEFAULT_METRIC_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_lo > 0.0 && self.tau_hi > self.tau_lo && self.tau_hi.is_finite()) {
            return Err(Error::DomainError(format!(
                "need 0 < tau_lo < tau_hi, got [{}, {}]",
                self.tau_lo, self.tau_hi
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::DomainError("grid_points must be at least 2".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::DomainError("horizon must be positive".into()));
        }
        if self.samples < 2 && self.metric != Metric::CAtHorizon {
            return Err(Error::DomainError("metric needs at least 2 time samples".into()));
        }
        Ok(())
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        let n = self.grid_points - 1;
        (0..=n)
            .map(|i| self.tau_lo + (self.tau_hi - self.tau_lo) * i as f64 / n as f64)
            .collect()
    }

    pub fn schedule(&self, tau: f64) -> Result<PulseSchedule> {
        match self.pulses {
            PulseCount::Fixed(n) => PulseSchedule::uniform(n, tau),
            PulseCount::FillHorizon => PulseSchedule::fill(self.horizon, tau),
        }
    }

    /// Metric value for interval `tau`, physical normalisation.
    pub fn evaluate(&self, reservoir: &Reservoir, tau: f64) -> Result<f64> {
        let sched = self.schedule(tau)?;
        let c = |t: f64| reservoir.concurrence(t, &sched, Normalization::Physical);
        match self.metric {
            Metric::CAtHorizon => c(self.horizon),
            Metric::TimeAveragedC => {
                let grid = uniform_grid(self.horizon, self.samples);
                let mut sum = 0.0;
                for &t in &grid {
                    sum += c(t)?;
                }
                Ok(sum / grid.len() as f64)
            }
            Metric::MinC => {
                let mut min = f64::INFINITY;
                for t in uniform_grid(self.horizon, self.samples) {
                    min = min.min(c(t)?);
                }
                Ok(min)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub tau: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub best_tau: f64,
    pub best_value: f64,
}

impl ScanResult {
    /// Adopt a refined peak if it beats the current best.
    pub fn with_refinement(mut self, tau: f64, value: f64) -> Self {
        if value > self.best_value {
            self.best_tau = tau;
            self.best_value = value;
        }
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau_s_scaled,metric_value\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{}", fmt_sig12(r.tau), fmt_sig12(r.value));
        }
        let _ = writeln!(
            out,
            "# best_tau={},best_value={}",
            fmt_sig12(self.best_tau),
            fmt_sig12(self.best_value)
        );
        out
    }
}

pub fn scan_tau(reservoir: &Reservoir, spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let rows = spec
        .tau_grid()
        .into_iter()
        .map(|tau| {
            Ok(ScanRow {
                tau,
                value: spec.evaluate(reservoir, tau)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // Ascending tau with strict improvement: ties go to the smallest interval.
    let mut best = rows[0];
    for r in &rows[1..] {
        if r.value > best.value {
            best = *r;
        }
    }
    Ok(ScanResult {
        rows,
        best_tau: best.tau,
        best_value: best.value,
    })
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// The bracket must enclose a maximum: `f` at the midpoint has to exceed both endpoint
/// values. Returns the best point evaluated, so the result is never below the midpoint.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tolerance: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::NoBracket { lo, hi });
    }
    let mid = 0.5 * (lo + hi);
    let (f_lo, f_mid, f_hi) = (f(lo)?, f(mid)?, f(hi)?);
    if !(f_mid > f_lo && f_mid > f_hi) {
        return Err(Error::NoBracket { lo, hi });
    }
    let mut best = (mid, f_mid);
    let mut keep = |x: f64, v: f64| {
        if v > best.1 || (v == best.1 && x < best.0) {
            best = (x, v);
        }
    };

    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    keep(x1, f1);
    keep(x2, f2);
    while b - a >= tolerance {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
            keep(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
            keep(x2, f2);
        }
    }
    Ok(best)
}

/// Refine a metric peak inside `bracket` to a width below [`REFINE_TOLERANCE`].
pub fn refine_peak(reservoir: &Reservoir, spec: &ScanSpec, bracket: (f64, f64)) -> Result<(f64, f64)> {
    spec.validate()?;
    if !(bracket.0 > 0.0) {
        return Err(Error::NoBracket {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    golden_section_max(
        |tau| spec.evaluate(reservoir, tau),
        bracket.0,
        bracket.1,
        REFINE_TOLERANCE,
    )
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::reservoir::ModeSet;

    #[test]
    fn golden_section_on_a_parabola() {
        let (x, v) =
            golden_section_max(|t| Ok(1.0 - (t - 2.0 * PI).powi(2)), 5.0, 7.0, 1e-4).unwrap();
        assert!((x - 2.0 * PI).abs() < 1e-4, "{x}");
        assert!(v <= 1.0 && v > 1.0 - 1e-8);
    }

    #[test]
    fn golden_section_requires_a_bracket() {
        let r = golden_section_max(|t| Ok(t), 0.0, 1.0, 1e-4);
        assert!(matches!(r, Err(Error::NoBracket { .. })));
        let r = golden_section_max(|t| Ok(t), 1.0, 1.0, 1e-4);
        assert!(matches!(r, Err(Error::NoBracket { .. })));
    }

    #[test]
    fn zero_coupling_ties_resolve_to_smallest_tau() {
        let r = Reservoir::Common(ModeSet::single(1.0, 0.0).unwrap());
        let spec = ScanSpec::new(0.5, 3.0, 11, Metric::TimeAveragedC, 10.0);
        let res = scan_tau(&r, &spec).unwrap();
        assert!(res.rows.iter().all(|row| row.value == 1.0));
        assert_eq!(res.best_tau, 0.5);
        assert_eq!(res.best_value, 1.0);
    }

    #[test]
    fn spec_validation() {
        let r = Reservoir::Common(ModeSet::single(1.0, 0.1).unwrap());
        for spec in [
            ScanSpec::new(0.0, 1.0, 5, Metric::MinC, 1.0),
            ScanSpec::new(2.0, 1.0, 5, Metric::MinC, 1.0),
            ScanSpec::new(0.5, 1.0, 1, Metric::MinC, 1.0),
            ScanSpec::new(0.5, 1.0, 5, Metric::MinC, 0.0),
        ] {
            assert!(scan_tau(&r, &spec).is_err());
        }
    }

    #[test]
    fn fixed_pulse_count_is_honoured() {
        let mut spec = ScanSpec::new(1.0, 2.0, 2, Metric::CAtHorizon, 10.0);
        spec.pulses = PulseCount::Fixed(3);
        assert_eq!(spec.schedule(1.5).unwrap().pulse_times().len(), 3);
        spec.pulses = PulseCount::FillHorizon;
        assert_eq!(spec.schedule(1.5).unwrap().pulse_times().len(), 6);
    }

    #[test]
    fn csv_has_summary_line() {
        let r = Reservoir::Common(ModeSet::single(1.0, 0.2).unwrap());
        let spec = ScanSpec::new(1.0, 2.0, 3, Metric::CAtHorizon, 6.0);
        let csv = scan_tau(&r, &spec).unwrap().to_csv();
        assert!(csv.starts_with("tau_s_scaled,metric_value\n"));
        assert!(csv.lines().last().unwrap().starts_with("# best_tau="));
        assert_eq!(csv.lines().count(), 5);
    }
}
