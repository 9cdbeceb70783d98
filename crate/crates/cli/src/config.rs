//! Run configuration: one TOML file per run plus `--set section.key=value` overrides.
//!
//! Frequencies are in units of `coupling.omega_p` and times in units of its inverse.

use std::fmt;
use std::path::{Path, PathBuf};

use bangbang_core::reservoir::{DEFAULT_MODE_COUNT, DEFAULT_SUPPORT_HALFWIDTH};
use bangbang_core::scan::DEFAULT_METRIC_SAMPLES;
use bangbang_core::{
    CouplingFunction, Metric, ModeSet, Normalization, OracleConfig, PulseCount, PulseSchedule,
    Reservoir, ScanSpec, Shape, Topology,
};
use serde::Deserialize;

/// A configuration problem; the CLI exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(key: &str, err: impl fmt::Display) -> ConfigError {
    ConfigError(format!("{key}: {err}"))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub topology: Topology,
    #[serde(default)]
    pub normalization: Normalization,
    pub coupling: CouplingSection,
    /// Reservoir of the second qubit under the non-common topology.
    pub coupling2: Option<CouplingSection>,
    #[serde(default)]
    pub discretization: DiscretizationSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub oracle: OracleSection,
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub compare: CompareSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    #[serde(default = "default_shape")]
    pub shape: Shape,
    pub s: f64,
    #[serde(default = "one")]
    pub omega_p: f64,
    /// Width in units of `omega_p`.
    pub gamma_p: f64,
}

fn default_shape() -> Shape {
    Shape::Gaussian
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSection {
    #[serde(rename = "K", default = "default_mode_count")]
    pub mode_count: usize,
    #[serde(default = "default_halfwidth")]
    pub support_halfwidth: f64,
}

fn default_mode_count() -> usize {
    DEFAULT_MODE_COUNT
}

fn default_halfwidth() -> f64 {
    DEFAULT_SUPPORT_HALFWIDTH
}

impl Default for DiscretizationSection {
    fn default() -> Self {
        Self {
            mode_count: DEFAULT_MODE_COUNT,
            support_halfwidth: DEFAULT_SUPPORT_HALFWIDTH,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    #[default]
    None,
    Uniform,
    Explicit,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    #[serde(default)]
    pub kind: ScheduleKind,
    /// Pulse count; omitted means as many as fit in `grid.t_max_scaled`.
    #[serde(rename = "N")]
    pub count: Option<usize>,
    pub tau_s_scaled: Option<f64>,
    pub times: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_t_max")]
    pub t_max_scaled: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_t_max() -> f64 {
    30.0
}

fn default_samples() -> usize {
    301
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            t_max_scaled: default_t_max(),
            samples: default_samples(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_fock_dim")]
    pub fock_dim: usize,
    #[serde(default, rename = "heisenberg_J")]
    pub heisenberg_j: f64,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
}

fn default_fock_dim() -> usize {
    40
}

fn default_omega0() -> f64 {
    bangbang_core::fock_oracle::DEFAULT_OMEGA0
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            enabled: false,
            fock_dim: default_fock_dim(),
            heisenberg_j: 0.0,
            omega0: default_omega0(),
        }
    }
}

/// `pulses = "fill"` or a fixed count.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PulsesField {
    Count(usize),
    Rule(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub grid_points: usize,
    pub metric: Metric,
    pub horizon: f64,
    pub pulses: Option<PulsesField>,
    pub samples: Option<usize>,
    #[serde(default)]
    pub refine: bool,
    pub bracket: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    1e-6
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            tolerance: default_tolerance(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Read `path`, apply `key=value` overrides and deserialise.
pub fn load(path: &Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse(&text, overrides).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

pub fn parse(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    // Deserialising the text directly keeps line numbers in the diagnostics.
    if overrides.is_empty() {
        return toml::from_str(text).map_err(|e: toml::de::Error| ConfigError(e.to_string()));
    }
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError(e.to_string()))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let cfg: RunConfig = doc
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError(e.to_string()))?;
    Ok(cfg)
}

fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("override {assignment:?} is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    // Anything that is not a TOML literal is taken as a bare string.
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().filter(|l| !l.is_empty()).ok_or_else(|| bad(key, "empty key"))?;
    let mut table = doc;
    for part in parts {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| bad(key, format!("{part} is not a section")))?;
    }
    table.insert(leaf.to_string(), value);
    Ok(())
}

impl CouplingSection {
    fn build(&self, key: &str) -> Result<CouplingFunction, ConfigError> {
        CouplingFunction::new(self.shape, self.s, self.omega_p, self.gamma_p * self.omega_p)
            .map_err(|e| bad(key, e))
    }
}

impl RunConfig {
    pub fn coupling(&self) -> Result<CouplingFunction, ConfigError> {
        self.coupling.build("coupling")
    }

    fn discretize(&self, cf: &CouplingFunction, key: &str) -> Result<ModeSet, ConfigError> {
        let d = &self.discretization;
        cf.discretize(d.mode_count, d.support_halfwidth)
            .map_err(|e| bad(key, e))
    }

    pub fn modes(&self) -> Result<ModeSet, ConfigError> {
        self.discretize(&self.coupling()?, "discretization")
    }

    /// Mode set of the second qubit: `coupling2` if present, else the first.
    pub fn second_modes(&self) -> Result<Option<ModeSet>, ConfigError> {
        match &self.coupling2 {
            None => Ok(None),
            Some(c) => {
                if self.topology == Topology::Common {
                    return Err(bad("coupling2", "only used with topology = \"non-common\""));
                }
                let cf = c.build("coupling2")?;
                if cf.omega_p() != self.coupling()?.omega_p() {
                    return Err(bad("coupling2.omega_p", "both reservoirs must share omega_p"));
                }
                Ok(Some(self.discretize(&cf, "coupling2")?))
            }
        }
    }

    pub fn reservoir(&self) -> Result<Reservoir, ConfigError> {
        let first = self.modes()?;
        Ok(match self.topology {
            Topology::Common => Reservoir::Common(first),
            Topology::NonCommon => {
                let second = self.second_modes()?.unwrap_or_else(|| first.clone());
                Reservoir::NonCommon(first, second)
            }
        })
    }

    pub fn schedule(&self) -> Result<PulseSchedule, ConfigError> {
        let s = &self.schedule;
        let sched = match s.kind {
            ScheduleKind::None => PulseSchedule::none(),
            ScheduleKind::Uniform => {
                let tau = s
                    .tau_s_scaled
                    .ok_or_else(|| bad("schedule.tau_s_scaled", "required for a uniform schedule"))?;
                match s.count {
                    Some(n) => PulseSchedule::uniform(n, tau),
                    None => PulseSchedule::fill(self.grid.t_max_scaled, tau),
                }
                .map_err(|e| bad("schedule", e))?
            }
            ScheduleKind::Explicit => {
                let times = s
                    .times
                    .clone()
                    .ok_or_else(|| bad("schedule.times", "required for an explicit schedule"))?;
                PulseSchedule::explicit(times).map_err(|e| bad("schedule.times", e))?
            }
        };
        Ok(sched)
    }

    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        let g = &self.grid;
        if !(g.t_max_scaled.is_finite() && g.t_max_scaled >= 0.0) {
            return Err(bad("grid.t_max_scaled", "must be finite and nonnegative"));
        }
        if g.samples == 0 {
            return Err(bad("grid.samples", "must be at least 1"));
        }
        Ok(bangbang_core::pulse_dynamics::uniform_grid(g.t_max_scaled, g.samples))
    }

    pub fn oracle(&self) -> Result<OracleConfig, ConfigError> {
        if !self.oracle.enabled {
            return Err(bad("oracle.enabled", "the oracle is disabled in this configuration"));
        }
        let mut cfg = OracleConfig::new(self.modes()?, self.oracle.fock_dim, self.schedule()?, self.grid()?)
            .with_topology(self.topology)
            .with_heisenberg(self.oracle.heisenberg_j)
            .with_omega0(self.oracle.omega0);
        if let Some(second) = self.second_modes()? {
            cfg = cfg.with_second_modes(second);
        }
        cfg.validate().map_err(|e| bad("oracle", e))?;
        Ok(cfg)
    }

    pub fn scan(&self) -> Result<(ScanSpec, Option<(f64, f64)>), ConfigError> {
        let s = self
            .scan
            .as_ref()
            .ok_or_else(|| bad("scan", "section missing"))?;
        let mut spec = ScanSpec::new(s.tau_lo, s.tau_hi, s.grid_points, s.metric, s.horizon);
        spec.samples = s.samples.unwrap_or(DEFAULT_METRIC_SAMPLES);
        spec.pulses = match &s.pulses {
            None => PulseCount::FillHorizon,
            Some(PulsesField::Count(n)) => PulseCount::Fixed(*n),
            Some(PulsesField::Rule(r)) if r == "fill" => PulseCount::FillHorizon,
            Some(PulsesField::Rule(r)) => {
                return Err(bad("scan.pulses", format!("expected \"fill\" or a count, got {r:?}")))
            }
        };
        spec.validate().map_err(|e| bad("scan", e))?;
        let bracket = match (s.refine, s.bracket) {
            (false, _) => None,
            (true, Some([lo, hi])) => Some((lo, hi)),
            (true, None) => Some((s.tau_lo, s.tau_hi)),
        };
        Ok((spec, bracket))
    }
}
