//! Markovianity of the reduced system dynamics.
//!
//! The system block obeys `σ̇_S = Ω𝓗_Sσ_S − σ_S𝓗_SΩ + B` with a noise matrix
//! `B` built from the exact cross-correlations, so the reduced equation is
//! always driven by a full-system trajectory, never closed on its own.

mod bures;
mod maps;
mod noise;
mod series;

pub use bures::{bures_distance, bures_velocity, bures_velocity_fd, fd_step, gaussian_fidelity, EPS_PURE};
pub use maps::{
    compose, cp_check, infinitesimal_pair, map_pair_evolve, CpCheck, MapPair, NoiseSource, CP_ABS_TOL, CP_REL_TOL,
};
pub use noise::{
    best_markovian_b, gamma_dot, noise_b, noise_b_xi, reduced_rhs, surrogate_b, system_hamiltonian, BestMarkovian,
    MarkovSurrogate, NoiseMatrix,
};
pub use series::{analyze, analyze_trajectory, non_markovian_violations, write_csv, MarkovSample};

use cho_symplectic::SymplecticError;
use cho_transport::TransportError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MarkovError {
    #[error("state is pure to within {EPS_PURE:e}; the Bures velocity is singular there")]
    PureStateSingularity,
    #[error(transparent)]
    NonPhysicalState(#[from] SymplecticError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
