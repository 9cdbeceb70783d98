//! Coupling functions `h(omega)` and their discretisation into finite mode sets.
//!
//! All three shapes are normalised so that `integral h(omega) d omega = s` over their
//! untruncated support; `s` plays the role of a total coupling strength.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MODE_COUNT: usize = 1000;
pub const DEFAULT_SUPPORT_HALFWIDTH: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Gaussian,
    Lorentzian,
    SemiElliptic,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Gaussian => "gaussian",
            Shape::Lorentzian => "lorentzian",
            Shape::SemiElliptic => "semi-elliptic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingFunction {
    shape: Shape,
    strength: f64,
    omega_p: f64,
    gamma_p: f64,
}

impl CouplingFunction {
    pub fn new(shape: Shape, strength: f64, omega_p: f64, gamma_p: f64) -> Result<Self> {
        for (name, value) in [("s", strength), ("omega_p", omega_p), ("gamma_p", gamma_p)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::DomainError(format!(
                    "{name} must be finite and positive, got {value}"
                )));
            }
        }
        if shape == Shape::SemiElliptic && omega_p - gamma_p < 0.0 {
            return Err(Error::BadSupport(format!(
                "semi-elliptic support [{}, {}] reaches negative frequency",
                omega_p - gamma_p,
                omega_p + gamma_p
            )));
        }
        Ok(Self {
            shape,
            strength,
            omega_p,
            gamma_p,
        })
    }

    pub fn gaussian(strength: f64, omega_p: f64, gamma_p: f64) -> Result<Self> {
        Self::new(Shape::Gaussian, strength, omega_p, gamma_p)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn gamma_p(&self) -> f64 {
        self.gamma_p
    }

    pub fn evaluate(&self, omega: f64) -> f64 {
        let (s, g) = (self.strength, self.gamma_p);
        let d = omega - self.omega_p;
        match self.shape {
            Shape::Gaussian => s / (PI.sqrt() * g) * (-(d * d) / (g * g)).exp(),
            Shape::Lorentzian => s * g / PI / (d * d + g * g),
            Shape::SemiElliptic => {
                let r = g * g - d * d;
                if r > 0.0 {
                    2.0 * s / (PI * g * g) * r.sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    /// Midpoint-rule discretisation on `[max(eps, omega_p - w gamma_p), omega_p + w gamma_p]`
    /// with `eps = 1e-9 omega_p`. For the semi-elliptic shape the window is further
    /// intersected with its compact support.
    pub fn discretize(&self, mode_count: usize, support_halfwidth: f64) -> Result<ModeSet> {
        if mode_count == 0 {
            return Err(Error::DomainError("mode count must be at least 1".into()));
        }
        if !(support_halfwidth.is_finite() && support_halfwidth > 0.0) {
            return Err(Error::BadSupport(format!(
                "support half-width {support_halfwidth} must be positive"
            )));
        }
        let eps = 1e-9 * self.omega_p;
        let halfwidth = match self.shape {
            Shape::SemiElliptic => support_halfwidth.min(1.0),
            _ => support_halfwidth,
        } * self.gamma_p;
        let requested_lo = self.omega_p - halfwidth;
        let lo = requested_lo.max(eps);
        let hi = self.omega_p + halfwidth;
        if !(hi > lo) {
            return Err(Error::BadSupport(format!("empty support [{lo}, {hi}]")));
        }
        let clipped_mass = if requested_lo < eps {
            self.integrate(requested_lo, eps, 20_000)
        } else {
            0.0
        };

        let width = (hi - lo) / mode_count as f64;
        let modes = (0..mode_count)
            .map(|k| {
                let omega = lo + (k as f64 + 0.5) * width;
                Mode {
                    omega,
                    h_sq: self.evaluate(omega) * width,
                }
            })
            .collect();
        let mut set = ModeSet::new(self.omega_p, modes)?;
        set.clipped_mass = clipped_mass;
        Ok(set)
    }

    /// Composite Simpson quadrature of `h` over `[a, b]`.
    pub(crate) fn integrate(&self, a: f64, b: f64, cells: usize) -> f64 {
        let n = 2 * cells.max(1);
        let step = (b - a) / n as f64;
        let mut acc = self.evaluate(a) + self.evaluate(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.evaluate(a + i as f64 * step);
        }
        acc * step / 3.0
    }
}

/// A single reservoir mode: angular frequency and squared coupling `h_k^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub h_sq: f64,
}

/// A discretised reservoir.
///
/// `omega_ref` is the frequency that defines scaled time `t~ = omega_ref t`; everything
/// downstream works in scaled time and uses `omega / omega_ref`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    omega_ref: f64,
    modes: Vec<Mode>,
    clipped_mass: f64,
}

impl ModeSet {
    pub fn new(omega_ref: f64, modes: Vec<Mode>) -> Result<Self> {
        if !(omega_ref.is_finite() && omega_ref > 0.0) {
            return Err(Error::DomainError(format!(
                "reference frequency must be positive, got {omega_ref}"
            )));
        }
        for (k, mode) in modes.iter().enumerate() {
            if !(mode.omega.is_finite() && mode.omega > 0.0) {
                return Err(Error::DomainError(format!(
                    "mode {k}: frequency {} must be positive",
                    mode.omega
                )));
            }
            if !(mode.h_sq.is_finite() && mode.h_sq >= 0.0) {
                return Err(Error::DomainError(format!(
                    "mode {k}: h^2 = {} must be nonnegative",
                    mode.h_sq
                )));
            }
        }
        if modes.windows(2).any(|w| w[1].omega <= w[0].omega) {
            return Err(Error::DomainError(
                "mode frequencies must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            omega_ref,
            modes,
            clipped_mass: 0.0,
        })
    }

    /// One mode at `omega` with coupling `h_sq`, scaled time measured in units of `1/omega`.
    pub fn single(omega: f64, h_sq: f64) -> Result<Self> {
        Self::new(omega, vec![Mode { omega, h_sq }])
    }

    pub fn omega_ref(&self) -> f64 {
        self.omega_ref
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `sum_k h_k^2`.
    pub fn total_coupling(&self) -> f64 {
        self.modes.iter().map(|m| m.h_sq).sum()
    }

    /// Mass of the coupling function cut away by clipping the window at `omega > 0`.
    pub fn clipped_mass(&self) -> f64 {
        self.clipped_mass
    }

    /// Same modes with every coupling multiplied by `factor`.
    pub fn scaled_coupling(&self, factor: f64) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| Mode {
                omega: m.omega,
                h_sq: m.h_sq * factor,
            })
            .collect();
        Self::new(self.omega_ref, modes)
    }

    /// Two-column text export: `omega_k h_k_sq`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("omega_k,h_k_sq\n");
        for m in &self.modes {
            let _ = writeln!(out, "{:.11e},{:.11e}", m.omega, m.h_sq);
        }
        out
    }
}
