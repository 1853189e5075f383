//! Simulation of digitized adiabatic evolution on Ising-type spin chains,
//! accelerated by counterdiabatic (CD) driving.
//!
//! The crate is organized around a small set of value types:
//!
//! - [`PauliSum`](pauli::PauliSum) — Hermitian operators as weighted sums of
//!   Pauli strings, with exact symbolic products, commutators and traces.
//! - [`AnnealingProblem`](models::AnnealingProblem) — an interpolation
//!   `H(λ) = (1−λ)H_i + λH_f` together with a schedule, a step width and
//!   initial/target states.
//! - [`CdTerm`](cd::CdTerm) — a rule producing the counterdiabatic Hamiltonian
//!   at each `(λ, λ̇)`: the exact single-spin form, local approximations, or
//!   the variational nested-commutator ansatz solved by action minimization.
//! - [`StateVector`](state::StateVector) — dense amplitudes driven either by
//!   a Trotterized plan ([`evolve`]), by compiled rotation/CNOT circuits
//!   ([`circuit`]), or by an exact time-ordered propagator used as an oracle.
//! - [`ResponseMatrix`](noise::ResponseMatrix) — readout-noise modeling and
//!   matrix-inversion measurement mitigation.
//!
//! All types are immutable values after construction and safe to share
//! across threads; operations are pure functions of their inputs.

pub mod cd;
pub mod circuit;
pub mod config;
pub mod dense;
pub mod evolve;
pub mod models;
pub mod noise;
pub mod pauli;
pub mod state;

pub use cd::{CdMethod, CdTerm, VariationalSolve};
pub use circuit::{compile, gate_stats, optimize, Circuit, Gate, GateStats};
pub use config::ExperimentConfig;
pub use evolve::{build_plan, exact_evolve, trotter_evolve, EvolutionResult, TrotterPlan};
pub use models::{AnnealingProblem, Boundary, Schedule, SpinChainSpec};
pub use noise::{CountsHistogram, ReadoutModel, ResponseMatrix};
pub use pauli::{PauliOp, PauliString, PauliSum};
pub use state::StateVector;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("register length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("register of {n} qubits too large for dense export (limit {limit})")]
    RegisterTooLarge { n: usize, limit: usize },
    #[error("invalid Pauli letter '{0}' (expected I, X, Y or Z)")]
    InvalidPauliLetter(char),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid basis label: {0}")]
    InvalidLabel(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unsupported plan term {0} (Pauli weight above 2)")]
    UnsupportedTerm(String),
    #[error("singular matrix: {0}")]
    SingularMatrix(String),
    #[error("propagator did not converge: achieved {achieved:e}, target {target:e}")]
    ConvergenceFailure { achieved: f64, target: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
