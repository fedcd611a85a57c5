//! Circuit, gate, classical-stage and hybrid-program data model.
//!
//! Qubits and classical wires are 0-based in memory; the JSON interchange
//! format in [`crate::io`] numbers them from 1.

pub mod basis;
pub mod circuit;
pub mod gate;
pub mod program;
pub mod stage;

pub use basis::{basis_index, BasisState};
pub use circuit::{validate_circuit, Circuit, Rule, Violation};
pub use gate::{ControlledView, Gate, GateKind};
pub use program::HybridProgram;
pub use stage::{compose_stages, ClassicalStage};
