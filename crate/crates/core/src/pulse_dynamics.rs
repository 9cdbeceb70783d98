//! Closed-form decoherence exponent and concurrence of a Bell pair dephasing in a bosonic
//! reservoir, with ideal instantaneous pi pulses applied to both qubits at once.
//!
//! For a common reservoir the pair's concurrence is `exp(-2 sum_k |alpha_k(t)|^2)`; for
//! one reservoir per qubit it is `prod_n exp(-1/2 sum_{k_n} |alpha_{k_n}(t)|^2)`. The
//! printed formulas carry an extra prefactor 1/2 which is kept behind
//! [`Normalization::PaperLiteral`].
//!
//! All public times are scaled, `t~ = omega_ref t`, where `omega_ref` comes from the
//! [`ModeSet`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::csv::{parse_rows, write_row};
use crate::error::{Error, Result};
use crate::measures::entropy_from_concurrence;
use crate::reservoir::{CouplingFunction, ModeSet, Shape};

#[derive(Clone, Debug, PartialEq)]
pub enum PulseSchedule {
    /// `count` pulses at `interval, 2 interval, ..., count * interval`.
    Uniform { count: usize, interval: f64 },
    /// Pulses at strictly ascending positive times.
    Explicit { times: Vec<f64> },
}

impl PulseSchedule {
    pub fn none() -> Self {
        PulseSchedule::Explicit { times: Vec::new() }
    }

    pub fn uniform(count: usize, interval: f64) -> Result<Self> {
        let s = PulseSchedule::Uniform { count, interval };
        s.validate()?;
        Ok(s)
    }

    /// As many pulses as fit in `[0, horizon]`: `floor(horizon / interval)`.
    pub fn fill(horizon: f64, interval: f64) -> Result<Self> {
        if !(interval.is_finite() && interval > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "pulse interval must be positive, got {interval}"
            )));
        }
        Self::uniform((horizon / interval).floor().max(0.0) as usize, interval)
    }

    pub fn explicit(times: Vec<f64>) -> Result<Self> {
        let s = PulseSchedule::Explicit { times };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PulseSchedule::Uniform { interval, .. } => {
                if !(interval.is_finite() && *interval > 0.0) {
                    return Err(Error::InvalidSchedule(format!(
                        "pulse interval must be positive, got {interval}"
                    )));
                }
            }
            PulseSchedule::Explicit { times } => {
                if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                    return Err(Error::InvalidSchedule("pulse times must be positive".into()));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidSchedule(
                        "pulse times must be strictly ascending".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn pulse_times(&self) -> Vec<f64> {
        match self {
            PulseSchedule::Uniform { count, interval } => {
                (1..=*count).map(|j| j as f64 * interval).collect()
            }
            PulseSchedule::Explicit { times } => times.clone(),
        }
    }

    /// Number of pulses applied at or before `t`.
    pub fn applied_by(&self, t: f64) -> usize {
        match self {
            PulseSchedule::Uniform { count, interval } => {
                ((t / interval).floor().max(0.0) as usize).min(*count)
            }
            PulseSchedule::Explicit { times } => times.partition_point(|&p| p <= t),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `C(0) = 1`, the Wootters concurrence of the reduced two-qubit state.
    #[default]
    Physical,
    /// The printed formula with its leading factor 1/2, so `C(0) = 1/2`.
    PaperLiteral,
}

impl Normalization {
    pub fn prefactor(self) -> f64 {
        match self {
            Normalization::Physical => 1.0,
            Normalization::PaperLiteral => 0.5,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::DomainError(format!("time must be nonnegative, got {t}")));
    }
    Ok(())
}

/// Displacement amplitude `alpha_k(t)` of one mode after the pulses applied by time `t`.
///
/// `omega` and `t` must be in reciprocal units. For a uniform train the pulses already
/// applied are `N_eff = min(N, floor(t / tau))`; an explicit schedule is handled through
/// the equivalent sign-toggling sum over free-evolution segments, which agrees with the
/// uniform expression in magnitude.
pub fn alpha_k(h_sq: f64, omega: f64, t: f64, schedule: &PulseSchedule) -> Result<Complex64> {
    check_time(t)?;
    let h = h_sq.sqrt();
    let phase = |x: f64| Complex64::from_polar(1.0, x);
    match schedule {
        PulseSchedule::Uniform { interval, .. } => {
            let tau = *interval;
            let n = schedule.applied_by(t);
            let rest = t - n as f64 * tau;
            let step = Complex64::new(1.0, 0.0) - phase(omega * tau);
            let mut bracket = Complex64::new(1.0, 0.0) - phase(omega * rest);
            let mut sign = -1.0;
            for m in 1..=n {
                bracket += sign * phase(-(m as f64) * omega * tau) * step;
                sign = -sign;
            }
            Ok(h * phase(-omega * rest) * bracket)
        }
        PulseSchedule::Explicit { times } => {
            let n = schedule.applied_by(t);
            let mut start = 0.0;
            let mut sign = 1.0;
            let mut acc = Complex64::new(0.0, 0.0);
            for &end in times[..n].iter().chain(std::iter::once(&t)) {
                acc += sign * (phase(omega * end) - phase(omega * start));
                start = end;
                sign = -sign;
            }
            Ok(h * acc)
        }
    }
}

/// `sum_k |alpha_k(t)|^2` at scaled time `t`.
pub fn alpha_norm_sq(modes: &ModeSet, t: f64, schedule: &PulseSchedule) -> Result<f64> {
    check_time(t)?;
    let w_ref = modes.omega_ref();
    let mut acc = 0.0;
    for m in modes.modes() {
        acc += alpha_k(m.h_sq, m.omega / w_ref, t, schedule)?.norm_sqr();
    }
    Ok(acc)
}

/// `Gamma(t) = 2 sum_k |alpha_k(t)|^2` for a reservoir shared by both qubits.
pub fn decoherence_exponent(modes: &ModeSet, t: f64, schedule: &PulseSchedule) -> Result<f64> {
    Ok(2.0 * alpha_norm_sq(modes, t, schedule)?)
}

pub fn concurrence_common(
    modes: &ModeSet,
    t: f64,
    schedule: &PulseSchedule,
    normalization: Normalization,
) -> Result<f64> {
    Ok(normalization.prefactor() * (-decoherence_exponent(modes, t, schedule)?).exp())
}

/// Exponent for one reservoir per qubit: `1/2 sum_{k_1} |alpha|^2 + 1/2 sum_{k_2} |alpha|^2`.
pub fn noncommon_exponent(
    first: &ModeSet,
    second: &ModeSet,
    t: f64,
    schedule: &PulseSchedule,
) -> Result<f64> {
    Ok(0.5 * alpha_norm_sq(first, t, schedule)? + 0.5 * alpha_norm_sq(second, t, schedule)?)
}

pub fn concurrence_noncommon(
    first: &ModeSet,
    second: &ModeSet,
    t: f64,
    schedule: &PulseSchedule,
    normalization: Normalization,
) -> Result<f64> {
    Ok(normalization.prefactor() * (-noncommon_exponent(first, second, t, schedule)?).exp())
}

/// Continuum free-decay exponent for a Gaussian coupling function extended over the
/// whole frequency line: `4 s (1 - cos(t~) exp(-gamma~^2 t~^2 / 4))`.
pub fn free_decay_closed_form(cf: &CouplingFunction, t: f64) -> Result<f64> {
    if cf.shape() != Shape::Gaussian {
        return Err(Error::ShapeUnsupported(cf.shape().name()));
    }
    check_time(t)?;
    let g = cf.gamma_p() / cf.omega_p();
    Ok(4.0 * cf.strength() * (1.0 - t.cos() * (-g * g * t * t / 4.0).exp()))
}

/// The qubits' reservoir arrangement.
#[derive(Clone, Debug, PartialEq)]
pub enum Reservoir {
    /// Both qubits couple to the same modes.
    Common(ModeSet),
    /// Each qubit has its own reservoir.
    NonCommon(ModeSet, ModeSet),
}

impl Reservoir {
    /// Exponent `Gamma` with `C_physical = exp(-Gamma)`.
    pub fn exponent(&self, t: f64, schedule: &PulseSchedule) -> Result<f64> {
        match self {
            Reservoir::Common(modes) => decoherence_exponent(modes, t, schedule),
            Reservoir::NonCommon(a, b) => noncommon_exponent(a, b, t, schedule),
        }
    }

    pub fn concurrence(
        &self,
        t: f64,
        schedule: &PulseSchedule,
        normalization: Normalization,
    ) -> Result<f64> {
        Ok(normalization.prefactor() * (-self.exponent(t, schedule)?).exp())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceSample {
    /// Scaled time.
    pub t: f64,
    pub gamma: f64,
    pub c_physical: f64,
    pub c_literal: f64,
    pub entropy: f64,
    pub purity: f64,
}

impl TraceSample {
    fn from_exponent(t: f64, gamma: f64) -> Result<Self> {
        let c_physical = (-gamma).exp();
        Ok(Self {
            t,
            gamma,
            c_physical,
            c_literal: 0.5 * c_physical,
            entropy: entropy_from_concurrence(c_physical)?,
            purity: 0.5 * (1.0 + c_physical * c_physical),
        })
    }
}

/// Time series of the closed-form evolution. Both normalisations are always recorded;
/// `normalization` selects which one [`Trace::concurrence`] reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub normalization: Normalization,
    pub samples: Vec<TraceSample>,
}

pub const TRACE_CSV_HEADER: [&str; 6] = [
    "t_scaled",
    "gamma",
    "c_physical",
    "c_literal",
    "entropy_log4",
    "purity",
];

impl Trace {
    pub fn concurrence(&self, index: usize) -> f64 {
        let s = &self.samples[index];
        match self.normalization {
            Normalization::Physical => s.c_physical,
            Normalization::PaperLiteral => s.c_literal,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = TRACE_CSV_HEADER.join(",");
        out.push('\n');
        for s in &self.samples {
            write_row(
                &mut out,
                &[s.t, s.gamma, s.c_physical, s.c_literal, s.entropy, s.purity],
            );
        }
        out
    }

    pub fn parse_csv(text: &str, normalization: Normalization) -> Result<Self> {
        let samples = parse_rows(text, &TRACE_CSV_HEADER)?
            .into_iter()
            .map(|r| TraceSample {
                t: r[0],
                gamma: r[1],
                c_physical: r[2],
                c_literal: r[3],
                entropy: r[4],
                purity: r[5],
            })
            .collect();
        Ok(Self {
            normalization,
            samples,
        })
    }
}

/// Check that a time grid is finite, nonnegative and ascending.
pub fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::DomainError("time grid must be finite and nonnegative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::DomainError("time grid must be ascending".into()));
    }
    Ok(())
}

/// `samples` uniformly spaced points on `[0, t_max]`, endpoints included.
pub fn uniform_grid(t_max: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n)
            .map(|i| t_max * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn trace(
    reservoir: &Reservoir,
    t_grid: &[f64],
    schedule: &PulseSchedule,
    normalization: Normalization,
) -> Result<Trace> {
    validate_grid(t_grid)?;
    schedule.validate()?;
    let samples = t_grid
        .iter()
        .map(|&t| TraceSample::from_exponent(t, reservoir.exponent(t, schedule)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trace {
        normalization,
        samples,
    })
}
