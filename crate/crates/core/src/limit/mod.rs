//! Limiting equations: the Schrödinger–Poisson pair and the Pauli equation.

mod pauli;
mod sp;

pub use pauli::{
    pauli_diagnostics, pauli_step, simulate_pauli, GaugeSource, PauliState, PauliTrajectory,
    RecordedGauge,
};
pub use sp::{
    kinetic_step, schrodinger_step, simulate_sp, simulate_sp_with, sp_step, LimitDiagnostics,
    LimitState, LimitTrajectory,
};
