//! Exact dense simulation: statevectors with measurement branching, density
//! matrices with operator insertions, hybrid-program evaluation and sampling.

pub mod density;
pub mod hybrid;
pub mod kraus;
pub mod observable;
pub mod statevector;

pub use density::{apply_operator_terms, evolve_density, DensityMatrix};
pub use hybrid::{
    default_inputs, equivalence_check, run_hybrid, run_hybrid_exact, sample_hybrid,
    EquivalenceReport, Input,
};
pub use kraus::{kraus_to_stochastic, KrausChannel};
pub use observable::{expectation_from_distribution, parity_sign, Observable};
pub use statevector::{
    distribution_from_state, embed_free_state, initial_basis_state, measurement_distribution,
    simulate_statevector, StateVector,
};
