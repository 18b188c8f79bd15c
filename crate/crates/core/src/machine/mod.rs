//! The two-qubit machine: parameters, Lindblad dynamics and steady states.

mod analytic;
mod dynamics;
mod params;
mod state;

pub use analytic::{steady_state_analytic, AnalyticModel};
pub use dynamics::{
    build_liouvillian, hamiltonian, jump_operators, occupation, rates, steady_state_numeric,
    time_evolve, E,
};
pub use params::{BathKind, Charge, Limit, MachineParams, Temperature, U_INF_PROXY};
pub use state::{canonicalize_x_state, TwoQubitState, XState, STATE_TOL, X_FORM_TOL};
