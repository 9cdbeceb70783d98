//! Entanglement of a Bell pair dephasing in a bosonic reservoir, and its protection by
//! trains of ideal pi pulses.
//!
//! * [`measures`]: concurrence (two routes), entropy and purity of two-qubit states.
//! * [`reservoir`]: coupling functions and their discretisation into modes.
//! * [`pulse_dynamics`]: closed-form concurrence under pulse trains.
//! * [`fock_oracle`]: brute-force truncated Fock-space evolution used as a reference.
//! * [`scan`]: pulse-interval sweeps and peak refinement.

pub mod csv;
pub mod error;
pub mod fock_oracle;
mod linalg;
pub mod measures;
pub mod pulse_dynamics;
pub mod reservoir;
pub mod scan;

pub use error::{Error, Result};
pub use fock_oracle::{
    build_hamiltonian, compare, evolve, CompareReport, OracleConfig, ReducedTrace, Topology,
};
pub use linalg::{Matrix4c, Vector4c};
pub use measures::{
    concurrence, concurrence_via_r, entropy_from_concurrence, entropy_log4, measure, purity,
    spin_flip, DensityMatrix, MeasureReport,
};
pub use pulse_dynamics::{
    alpha_k, concurrence_common, concurrence_noncommon, decoherence_exponent,
    free_decay_closed_form, trace, Normalization, PulseSchedule, Reservoir, Trace, TraceSample,
};
pub use reservoir::{CouplingFunction, Mode, ModeSet, Shape};
pub use scan::{refine_peak, scan_tau, Metric, PulseCount, ScanResult, ScanSpec};
