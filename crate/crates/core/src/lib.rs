//! Hybrid simplification of quantum circuits at their preparation and
//! measurement boundaries.
//!
//! Incoherent operations next to a boundary are moved into classical pre- and
//! post-processing: basis permutations for phase-polynomial gates, stochastic
//! matrices for strictly incoherent ancilla interactions. Quasi-probability
//! cuts expose further boundaries, and an exact simulator checks every
//! rewrite.

pub mod caps;
pub mod cutting;
pub mod error;
pub mod io;
pub mod ir;
pub mod math;
pub mod passes;
pub mod phase_poly;
pub mod random;
pub mod sim;

pub use caps::Caps;
pub use error::{Error, Result};
