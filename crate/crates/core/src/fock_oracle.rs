//! Brute-force reference for the pulsed dephasing problem.
//!
//! The full qubit-pair (x) truncated-boson state is evolved exactly from
//! `(|11> + |00>)/sqrt(2) (x) |vac>` under
//!
//! ```text
//! H = omega0 (S1z + S2z) + sum_k omega_k b_k^dag b_k
//!     + sum_n S_nz sum_k h_k omega_k (b_k + b_k^dag)  [+ J S1.S2]
//! ```
//!
//! with instantaneous `X (x) X` pulses, then the bosons are traced out. Nothing here uses
//! the closed-form displacement amplitudes, so agreement with [`crate::pulse_dynamics`] is
//! an independent check of those formulas.
//!
//! Units: frequencies are divided by the mode set's `omega_ref` and times are scaled,
//! matching the rest of the crate; `hbar = 1`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::csv::{parse_rows, write_row};
use crate::error::{Error, Result};
use crate::linalg::{HermitianPropagator, Matrix4c};
use crate::measures::{concurrence, DensityMatrix, IDX_00, IDX_11};
use crate::pulse_dynamics::{validate_grid, PulseSchedule, Trace};
use crate::reservoir::ModeSet;

pub const DIMENSION_CAP: usize = 20_000;
pub const MAX_MODES: usize = 3;
pub const DEFAULT_OMEGA0: f64 = 10.0;
pub const DEFAULT_TRUNCATION_THRESHOLD: f64 = 1e-8;
const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// One set of modes coupled to `S1z + S2z`.
    #[default]
    Common,
    /// A separate register set per qubit.
    NonCommon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub modes: ModeSet,
    /// Reservoir of the second qubit under [`Topology::NonCommon`]; `None` reuses `modes`.
    pub second_modes: Option<ModeSet>,
    pub fock_dim: usize,
    pub schedule: PulseSchedule,
    /// Scaled sample times, ascending.
    pub t_grid: Vec<f64>,
    pub topology: Topology,
    /// Heisenberg exchange `J S1.S2`, in units of `omega_ref`.
    pub heisenberg_j: f64,
    /// Qubit splitting in units of `omega_ref`.
    pub omega0: f64,
    pub truncation_threshold: f64,
}

impl OracleConfig {
    pub fn new(modes: ModeSet, fock_dim: usize, schedule: PulseSchedule, t_grid: Vec<f64>) -> Self {
        Self {
            modes,
            second_modes: None,
            fock_dim,
            schedule,
            t_grid,
            topology: Topology::Common,
            heisenberg_j: 0.0,
            omega0: DEFAULT_OMEGA0,
            truncation_threshold: DEFAULT_TRUNCATION_THRESHOLD,
        }
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn with_second_modes(mut self, modes: ModeSet) -> Self {
        self.second_modes = Some(modes);
        self
    }

    pub fn with_heisenberg(mut self, j: f64) -> Self {
        self.heisenberg_j = j;
        self
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    fn registers(&self) -> Vec<Register> {
        let scaled = |set: &ModeSet, coupling: Coupling| -> Vec<Register> {
            set.modes()
                .iter()
                .map(|m| {
                    let omega = m.omega / set.omega_ref();
                    Register {
                        omega,
                        strength: m.h_sq.sqrt() * omega,
                        coupling,
                    }
                })
                .collect()
        };
        match self.topology {
            Topology::Common => scaled(&self.modes, Coupling::Both),
            Topology::NonCommon => {
                let mut regs = scaled(&self.modes, Coupling::First);
                let second = self.second_modes.as_ref().unwrap_or(&self.modes);
                regs.extend(scaled(second, Coupling::Second));
                regs
            }
        }
    }

    /// Full Hilbert-space dimension `4 d^R` with `R` boson registers, or `None` on overflow.
    pub fn dimension(&self) -> Option<usize> {
        let registers = match self.topology {
            Topology::Common => self.modes.len(),
            Topology::NonCommon => {
                self.modes.len() + self.second_modes.as_ref().unwrap_or(&self.modes).len()
            }
        };
        let mut dim: usize = 4;
        for _ in 0..registers {
            dim = dim.checked_mul(self.fock_dim)?;
        }
        Some(dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fock_dim < 2 {
            return Err(Error::DomainError(format!(
                "fock_dim must be at least 2, got {}",
                self.fock_dim
            )));
        }
        let sets = std::iter::once(&self.modes).chain(self.second_modes.as_ref());
        for set in sets {
            if set.len() > MAX_MODES {
                return Err(Error::DomainError(format!(
                    "the oracle takes at most {MAX_MODES} modes per reservoir, got {}",
                    set.len()
                )));
            }
        }
        if self.second_modes.is_some() && self.topology == Topology::Common {
            return Err(Error::DomainError(
                "a second mode set only applies to the non-common topology".into(),
            ));
        }
        match self.dimension() {
            Some(dim) if dim <= DIMENSION_CAP => {}
            dim => {
                return Err(Error::DimensionCap {
                    dim: dim.unwrap_or(usize::MAX),
                    cap: DIMENSION_CAP,
                })
            }
        }
        for (name, v) in [("heisenberg_j", self.heisenberg_j), ("omega0", self.omega0)] {
            if !v.is_finite() {
                return Err(Error::DomainError(format!("{name} must be finite")));
            }
        }
        if !(self.truncation_threshold > 0.0) {
            return Err(Error::DomainError("truncation threshold must be positive".into()));
        }
        self.schedule.validate()?;
        validate_grid(&self.t_grid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Coupling {
    Both,
    First,
    Second,
}

#[derive(Clone, Copy, Debug)]
struct Register {
    omega: f64,
    /// `h_k omega_k`
    strength: f64,
    coupling: Coupling,
}

/// `(S1z, S2z)` of qubit basis index `q` in the `|11>, |10>, |01>, |00>` ordering.
fn spin_z(q: usize) -> (f64, f64) {
    let s1 = if q < 2 { 0.5 } else { -0.5 };
    let s2 = if q % 2 == 0 { 0.5 } else { -0.5 };
    (s1, s2)
}

/// Sparse Hermitian Hamiltonian on `qubits (x) bosons`, qubit index major.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    dim: usize,
    boson_dim: usize,
    fock_dim: usize,
    registers: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl Hamiltonian {
    fn add(&mut self, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            *self
                .entries
                .entry((row, col))
                .or_insert(Complex64::new(0.0, 0.0)) += value;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the boson factor, `d^R`.
    pub fn boson_dim(&self) -> usize {
        self.boson_dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries
            .get(&(row, col))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Index of `|q> (x) |n_1 ... n_R>`; register 0 is the most significant digit.
    pub fn index(&self, qubit: usize, occupations: &[usize]) -> usize {
        let boson = occupations
            .iter()
            .fold(0, |acc, &n| acc * self.fock_dim + n);
        qubit * self.boson_dim + boson
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (&(r, c), &v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(r, c), &v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Index sets of the invariant subspaces (connected components of the coupling graph),
    /// each sorted ascending; components are ordered by their smallest index.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(r, c) in self.entries.keys() {
            if r != c {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.dim {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .block_propagators()
            .into_iter()
            .flat_map(|(_, p)| p.energies().iter().copied().collect::<Vec<_>>())
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    fn block_propagators(&self) -> Vec<(Vec<usize>, HermitianPropagator)> {
        self.blocks()
            .into_iter()
            .map(|idx| {
                let mut local = DMatrix::zeros(idx.len(), idx.len());
                for (a, &r) in idx.iter().enumerate() {
                    for (b, &c) in idx.iter().enumerate() {
                        local[(a, b)] = self.get(r, c);
                    }
                }
                (idx, HermitianPropagator::new(local))
            })
            .collect()
    }
}

pub fn build_hamiltonian(cfg: &OracleConfig) -> Result<Hamiltonian> {
    cfg.validate()?;
    let regs = cfg.registers();
    let d = cfg.fock_dim;
    let boson_dim = d.pow(regs.len() as u32);
    let mut h = Hamiltonian {
        dim: 4 * boson_dim,
        boson_dim,
        fock_dim: d,
        registers: regs.len(),
        entries: BTreeMap::new(),
    };
    // Stride of register r in the boson index.
    let strides: Vec<usize> = (0..regs.len())
        .map(|r| d.pow((regs.len() - 1 - r) as u32))
        .collect();

    for q in 0..4 {
        let (s1, s2) = spin_z(q);
        for b in 0..boson_dim {
            let row = q * boson_dim + b;
            let mut diag = cfg.omega0 * (s1 + s2);
            for (reg, &stride) in regs.iter().zip(&strides) {
                let n = (b / stride) % d;
                diag += reg.omega * n as f64;
                if n + 1 < d {
                    let coeff = match reg.coupling {
                        Coupling::Both => s1 + s2,
                        Coupling::First => s1,
                        Coupling::Second => s2,
                    };
                    let amp = reg.strength * coeff * ((n + 1) as f64).sqrt();
                    let col = row + stride;
                    h.add(row, col, amp);
                    h.add(col, row, amp);
                }
            }
            if cfg.heisenberg_j != 0.0 {
                // J/4 sigma_z sigma_z on the diagonal.
                diag += cfg.heisenberg_j * s1 * s2;
            }
            h.add(row, row, diag);
        }
    }
    if cfg.heisenberg_j != 0.0 {
        // J/4 (sigma_x sigma_x + sigma_y sigma_y) = J/2 (|10><01| + |01><10|).
        for b in 0..boson_dim {
            let (a, c) = (boson_dim + b, 2 * boson_dim + b);
            h.add(a, c, 0.5 * cfg.heisenberg_j);
            h.add(c, a, 0.5 * cfg.heisenberg_j);
        }
    }

    let residual = h.hermiticity_residual();
    if residual > 1e-12 {
        return Err(Error::NumericalFailure(format!(
            "Hamiltonian not Hermitian (residual {residual:e})"
        )));
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSample {
    pub t: f64,
    pub rho: DensityMatrix,
    /// `|rho_{11,00}|`
    pub offdiag_mag: f64,
    pub concurrence: f64,
    /// Largest population found in any register's top Fock level.
    pub truncation_leak: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedTrace {
    pub samples: Vec<ReducedSample>,
}

pub const REDUCED_CSV_HEADER: [&str; 12] = [
    "t_scaled",
    "rho_11_11_re",
    "rho_11_11_im",
    "rho_00_00_re",
    "rho_00_00_im",
    "rho_11_00_re",
    "rho_11_00_im",
    "rho_00_11_re",
    "rho_00_11_im",
    "offdiag_mag",
    "concurrence",
    "truncation_leak",
];

impl ReducedTrace {
    /// Synthesise the dephased-Bell states a closed-form trace predicts, with real
    /// coherence `C/2`. Useful as a like-for-like input to [`compare`].
    pub fn from_trace(trace: &Trace) -> Result<Self> {
        let samples = trace
            .samples
            .iter()
            .map(|s| {
                let rho = DensityMatrix::dephased_bell(0.5 * s.c_physical)?;
                Ok(ReducedSample {
                    t: s.t,
                    offdiag_mag: 0.5 * s.c_physical,
                    concurrence: concurrence(&rho)?,
                    rho,
                    truncation_leak: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { samples })
    }

    pub fn to_csv(&self) -> String {
        let mut out = REDUCED_CSV_HEADER.join(",");
        out.push('\n');
        for s in &self.samples {
            let e = |r, c| s.rho.get(r, c);
            let (a, b, x, y) = (e(IDX_11, IDX_11), e(IDX_00, IDX_00), e(IDX_11, IDX_00), e(IDX_00, IDX_11));
            write_row(
                &mut out,
                &[
                    s.t,
                    a.re,
                    a.im,
                    b.re,
                    b.im,
                    x.re,
                    x.im,
                    y.re,
                    y.im,
                    s.offdiag_mag,
                    s.concurrence,
                    s.truncation_leak,
                ],
            );
        }
        out
    }

    /// Rows of the CSV export as `(t, offdiag_mag, concurrence, truncation_leak)`.
    pub fn parse_csv_summary(text: &str) -> Result<Vec<[f64; 4]>> {
        Ok(parse_rows(text, &REDUCED_CSV_HEADER)?
            .into_iter()
            .map(|r| [r[0], r[9], r[10], r[11]])
            .collect())
    }
}

/// Run the oracle over `cfg.t_grid`.
pub fn evolve(cfg: &OracleConfig) -> Result<ReducedTrace> {
    let h = build_hamiltonian(cfg)?;
    let blocks = h.block_propagators();
    let boson_dim = h.boson_dim;
    let d = h.fock_dim;

    let mut psi = DVector::<Complex64>::zeros(h.dim);
    psi[IDX_11 * boson_dim] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    psi[IDX_00 * boson_dim] = Complex64::new(FRAC_1_SQRT_2, 0.0);

    // For each register, the boson indices sitting in its top Fock level.
    let top_levels: Vec<Vec<usize>> = (0..h.registers)
        .map(|r| {
            let stride = d.pow((h.registers - 1 - r) as u32);
            (0..boson_dim)
                .filter(|b| (b / stride) % d == d - 1)
                .collect()
        })
        .collect();

    let advance = |psi: &mut DVector<Complex64>, dt: f64| {
        if dt == 0.0 {
            return;
        }
        for (idx, prop) in &blocks {
            let mut local = DVector::from_iterator(idx.len(), idx.iter().map(|&i| psi[i]));
            prop.apply(&mut local, dt);
            for (&i, v) in idx.iter().zip(local.iter()) {
                psi[i] = *v;
            }
        }
    };
    // X (x) X maps qubit index q to 3 - q.
    let pulse = |psi: &mut DVector<Complex64>| {
        for b in 0..boson_dim {
            for (q, p) in [(0, 3), (1, 2)] {
                psi.swap_rows(q * boson_dim + b, p * boson_dim + b);
            }
        }
    };

    let pulses = cfg.schedule.pulse_times();
    let mut next_pulse = 0;
    let mut now = 0.0;
    let mut samples = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        while next_pulse < pulses.len() && pulses[next_pulse] <= t {
            advance(&mut psi, pulses[next_pulse] - now);
            now = pulses[next_pulse];
            pulse(&mut psi);
            next_pulse += 1;
        }
        advance(&mut psi, t - now);
        now = t;

        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NumericalFailure(format!(
                "state norm drifted to {norm} at t = {t}"
            )));
        }
        let leak = top_levels
            .iter()
            .map(|idx| {
                (0..4)
                    .map(|q| idx.iter().map(|&b| psi[q * boson_dim + b].norm_sqr()).sum::<f64>())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        if leak > cfg.truncation_threshold {
            return Err(Error::TruncationOverflow {
                t,
                leak,
                threshold: cfg.truncation_threshold,
            });
        }
        let rho = reduce(&psi, boson_dim)?;
        samples.push(ReducedSample {
            t,
            offdiag_mag: rho.get(IDX_11, IDX_00).norm(),
            concurrence: concurrence(&rho)?,
            rho,
            truncation_leak: leak,
        });
    }
    Ok(ReducedTrace { samples })
}

/// Partial trace over the bosons.
fn reduce(psi: &DVector<Complex64>, boson_dim: usize) -> Result<DensityMatrix> {
    let mut m = Matrix4c::zeros();
    for r in 0..4 {
        for c in r..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..boson_dim {
                acc += psi[r * boson_dim + b] * psi[c * boson_dim + b].conj();
            }
            m[(r, c)] = acc;
            m[(c, r)] = acc.conj();
        }
    }
    for i in 0..4 {
        m[(i, i)].im = 0.0;
    }
    let trace = m.trace().re;
    DensityMatrix::new(m / Complex64::new(trace, 0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub t: f64,
    pub analytic: f64,
    pub oracle_concurrence: f64,
    /// `2 |rho_{11,00}|`
    pub oracle_twice_offdiag: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub n_samples: usize,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub mean_abs_err: f64,
    pub mean_rel_err: f64,
    /// Errors of `2 |rho_{11,00}|` against the analytic value.
    pub offdiag_max_abs_err: f64,
    pub offdiag_max_rel_err: f64,
    /// The oracle is consistently twice the analytic value, the signature of the
    /// paper-literal normalisation.
    pub factor_two_discrepancy: bool,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_err < tolerance && self.offdiag_max_rel_err < tolerance
    }
}

fn rel(err: f64, reference: f64) -> f64 {
    if err == 0.0 {
        0.0
    } else {
        err / reference.abs().max(f64::MIN_POSITIVE)
    }
}

/// Per-sample errors between the analytic concurrence (in the trace's normalisation) and
/// the oracle. Relative errors are taken with respect to the oracle.
pub fn compare(analytic: &Trace, oracle: &ReducedTrace) -> Result<CompareReport> {
    let n = analytic.samples.len();
    if n != oracle.samples.len() {
        return Err(Error::GridMismatch(format!(
            "{} analytic samples vs {} oracle samples",
            n,
            oracle.samples.len()
        )));
    }
    let mut rows = Vec::with_capacity(n);
    let mut offdiag_max_abs_err: f64 = 0.0;
    let mut offdiag_max_rel_err: f64 = 0.0;
    let mut factor_two = n > 0;
    for (i, (a, o)) in analytic.samples.iter().zip(&oracle.samples).enumerate() {
        if (a.t - o.t).abs() > 1e-12 * a.t.abs().max(1.0) {
            return Err(Error::GridMismatch(format!(
                "sample {i}: analytic t = {} vs oracle t = {}",
                a.t, o.t
            )));
        }
        let value = analytic.concurrence(i);
        let abs_err = (value - o.concurrence).abs();
        let twice = 2.0 * o.offdiag_mag;
        let off_err = (value - twice).abs();
        offdiag_max_abs_err = offdiag_max_abs_err.max(off_err);
        offdiag_max_rel_err = offdiag_max_rel_err.max(rel(off_err, twice));
        if value > 1e-300 && (o.concurrence / value - 2.0).abs() > 1e-6 {
            factor_two = false;
        }
        rows.push(CompareRow {
            t: a.t,
            analytic: value,
            oracle_concurrence: o.concurrence,
            oracle_twice_offdiag: twice,
            abs_err,
            rel_err: rel(abs_err, o.concurrence),
        });
    }
    let max = |f: fn(&CompareRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let mean = |f: fn(&CompareRow) -> f64| {
        if rows.is_empty() {
            0.0
        } else {
            rows.iter().map(f).sum::<f64>() / rows.len() as f64
        }
    };
    Ok(CompareReport {
        n_samples: n,
        max_abs_err: max(|r| r.abs_err),
        max_rel_err: max(|r| r.rel_err),
        mean_abs_err: mean(|r| r.abs_err),
        mean_rel_err: mean(|r| r.rel_err),
        offdiag_max_abs_err,
        offdiag_max_rel_err,
        factor_two_discrepancy: factor_two,
        rows,
    })
}
