//! Width caps for dense tables and simulation.

use crate::error::{Error, Result};

/// Dense-representation limits. Exceeding any of them is a hard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Deterministic tables and phase-polynomial segments.
    pub table_width: usize,
    /// Dense stochastic matrices (`4^width` entries).
    pub stochastic_width: usize,
    pub statevector_width: usize,
    pub density_width: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            table_width: 16,
            stochastic_width: 10,
            statevector_width: 14,
            density_width: 10,
        }
    }
}

impl Caps {
    /// Defaults overridden by `QBOUNDARY_TABLE_CAP`, `QBOUNDARY_STOCHASTIC_CAP`,
    /// `QBOUNDARY_STATEVECTOR_CAP` and `QBOUNDARY_DENSITY_CAP`.
    pub fn from_env() -> Self {
        let d = Caps::default();
        let get = |key: &str, default: usize| {
            std::env::var(key)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(default)
        };
        Caps {
            table_width: get("QBOUNDARY_TABLE_CAP", d.table_width),
            stochastic_width: get("QBOUNDARY_STOCHASTIC_CAP", d.stochastic_width),
            statevector_width: get("QBOUNDARY_STATEVECTOR_CAP", d.statevector_width),
            density_width: get("QBOUNDARY_DENSITY_CAP", d.density_width),
        }
    }

    pub(crate) fn check(what: &'static str, width: usize, cap: usize) -> Result<()> {
        if width > cap {
            Err(Error::CapExceeded { what, width, cap })
        } else {
            Ok(())
        }
    }
}
