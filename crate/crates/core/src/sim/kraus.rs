use crate::error::{Error, Result};
use crate::ir::ClassicalStage;
use crate::math::{self, CMatrix};

const COMPLETENESS_TOL: f64 = 1e-10;
const COHERENCE_TOL: f64 = 1e-10;

/// Channel given by Kraus operators `K_n` with `Σ K_n† K_n = 1`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    width: usize,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| {
            Error::InvalidStage("channel needs at least one Kraus operator".into())
        })?;
        let dim = first.nrows();
        if !dim.is_power_of_two() || operators.iter().any(|k| k.shape() != (dim, dim)) {
            return Err(Error::InvalidStage(
                "Kraus operators must share a 2^n x 2^n shape".into(),
            ));
        }
        let sum = operators
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        let deviation = math::max_abs_diff(&sum, &math::identity(dim));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::Completeness { deviation });
        }
        Ok(KrausChannel {
            width: dim.trailing_zeros() as usize,
            operators,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Largest violation of "maps basis states to incoherent mixtures": the
    /// off-diagonal magnitude of `Σ_n K_n |j⟩⟨j| K_n†` over all `j`.
    pub fn coherence_deviation(&self) -> f64 {
        let dim = 1usize << self.width;
        let mut worst: f64 = 0.0;
        for j in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    if a == b {
                        continue;
                    }
                    let v: crate::math::Complex64 = self
                        .operators
                        .iter()
                        .map(|k| k[(a, j)] * k[(b, j)].conj())
                        .sum();
                    worst = worst.max(v.norm());
                }
            }
        }
        worst
    }

    pub fn is_strictly_incoherent(&self) -> bool {
        self.coherence_deviation() <= COHERENCE_TOL
    }
}

/// Classical stage `M_ij = Σ_n |⟨i|K_n|j⟩|²` describing the channel on basis
/// inputs followed by a computational-basis measurement. A channel that creates
/// coherence is still converted, with a warning: the result then only describes
/// the measured statistics.
pub fn kraus_to_stochastic(channel: &KrausChannel) -> Result<ClassicalStage> {
    let dim = 1usize << channel.width;
    if !channel.is_strictly_incoherent() {
        log::warn!(
            "channel creates coherence (deviation {:.3e}); stochastic map only reproduces measured statistics",
            channel.coherence_deviation()
        );
    }
    let mut m = vec![0.0; dim * dim];
    for k in &channel.operators {
        for i in 0..dim {
            for j in 0..dim {
                m[i * dim + j] += k[(i, j)].norm_sqr();
            }
        }
    }
    // completeness bounds column-sum drift by the channel tolerance
    for j in 0..dim {
        let s: f64 = (0..dim).map(|i| m[i * dim + j]).sum();
        for i in 0..dim {
            m[i * dim + j] /= s;
        }
    }
    ClassicalStage::stochastic(channel.width, m)
}
