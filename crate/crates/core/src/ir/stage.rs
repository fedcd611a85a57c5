use super::basis::{gather_bits, scatter_bits};
use crate::error::{Error, Result};

/// Column-sum and entry-range tolerance for stochastic stages.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Classical processing of an `width`-bit outcome (or preparation) string.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalStage {
    /// `x ↦ table[x]`.
    Deterministic { width: usize, table: Vec<usize> },
    /// Column-stochastic `M`, dense row-major: `matrix[i * 2^width + j] = M_ij`
    /// is the probability of output `i` given input `j`.
    Stochastic { width: usize, matrix: Vec<f64> },
}

impl ClassicalStage {
    pub fn identity(width: usize) -> Self {
        ClassicalStage::Deterministic {
            width,
            table: (0..1 << width).collect(),
        }
    }

    pub fn deterministic(width: usize, table: Vec<usize>) -> Result<Self> {
        let dim = 1usize << width;
        if table.len() != dim {
            return Err(Error::InvalidStage(format!(
                "table has {} entries, expected {dim}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&y| y >= dim) {
            return Err(Error::InvalidStage(format!(
                "table entry {bad} out of range"
            )));
        }
        Ok(ClassicalStage::Deterministic { width, table })
    }

    pub fn from_fn(width: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::deterministic(width, (0..1 << width).map(f).collect())
    }

    pub fn stochastic(width: usize, mut matrix: Vec<f64>) -> Result<Self> {
        let dim = 1usize << width;
        if matrix.len() != dim * dim {
            return Err(Error::InvalidStage(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                dim * dim
            )));
        }
        for v in matrix.iter_mut() {
            if !(-STOCHASTIC_TOL..=1.0 + STOCHASTIC_TOL).contains(v) {
                return Err(Error::InvalidStage(format!("entry {v} outside [0, 1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        for j in 0..dim {
            let s: f64 = (0..dim).map(|i| matrix[i * dim + j]).sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidStage(format!("column {j} sums to {s}")));
            }
        }
        Ok(ClassicalStage::Stochastic { width, matrix })
    }

    /// Lift a local bit function on `positions` to `width` bits, identity elsewhere.
    pub fn deterministic_on_bits(
        width: usize,
        positions: &[usize],
        local: &[usize],
    ) -> Result<Self> {
        Self::from_fn(width, |x| {
            scatter_bits(x, positions, local[gather_bits(x, positions)])
        })
    }

    /// Lift a local column-stochastic matrix (row-major over `2^positions.len()`)
    /// to `width` bits, identity elsewhere.
    pub fn stochastic_on_bits(width: usize, positions: &[usize], local: &[f64]) -> Result<Self> {
        let dim = 1usize << width;
        let ld = 1usize << positions.len();
        let mut m = vec![0.0; dim * dim];
        for x in 0..dim {
            let lx = gather_bits(x, positions);
            for ly in 0..ld {
                let p = local[ly * ld + lx];
                if p != 0.0 {
                    m[scatter_bits(x, positions, ly) * dim + x] += p;
                }
            }
        }
        Self::stochastic(width, m)
    }

    pub fn width(&self) -> usize {
        match self {
            ClassicalStage::Deterministic { width, .. }
            | ClassicalStage::Stochastic { width, .. } => *width,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.width()
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, ClassicalStage::Deterministic { .. })
    }

    pub fn is_identity(&self) -> bool {
        match self {
            ClassicalStage::Deterministic { table, .. } => {
                table.iter().enumerate().all(|(i, &y)| i == y)
            }
            ClassicalStage::Stochastic { .. } => {
                let d = self.dim();
                self.dense()
                    .iter()
                    .enumerate()
                    .all(|(k, &v)| v == if k / d == k % d { 1.0 } else { 0.0 })
            }
        }
    }

    pub fn is_bijection(&self) -> bool {
        match self {
            ClassicalStage::Deterministic { table, .. } => {
                let mut seen = vec![false; table.len()];
                table
                    .iter()
                    .all(|&y| !std::mem::replace(&mut seen[y], true))
            }
            ClassicalStage::Stochastic { .. } => false,
        }
    }

    /// `M_ij`; a deterministic `f` lifts to `Σ_x |f(x)⟩⟨x|`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            ClassicalStage::Deterministic { table, .. } => (table[j] == i) as u8 as f64,
            ClassicalStage::Stochastic { matrix, .. } => matrix[i * self.dim() + j],
        }
    }

    /// Dense row-major matrix.
    pub fn dense(&self) -> Vec<f64> {
        match self {
            ClassicalStage::Stochastic { matrix, .. } => matrix.clone(),
            ClassicalStage::Deterministic { table, .. } => {
                let d = table.len();
                let mut m = vec![0.0; d * d];
                for (x, &y) in table.iter().enumerate() {
                    m[y * d + x] = 1.0;
                }
                m
            }
        }
    }

    /// Output distribution for input `x`.
    pub fn column(&self, x: usize) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, x)).collect()
    }

    /// `M·p` for a probability (or sub-probability) vector `p`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if p.len() != d {
            return Err(Error::WidthMismatch {
                expected: d,
                found: p.len(),
            });
        }
        let mut out = vec![0.0; d];
        match self {
            ClassicalStage::Deterministic { table, .. } => {
                for (x, &y) in table.iter().enumerate() {
                    out[y] += p[x];
                }
            }
            ClassicalStage::Stochastic { matrix, .. } => {
                for (j, &pj) in p.iter().enumerate() {
                    if pj == 0.0 {
                        continue;
                    }
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += matrix[i * d + j] * pj;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Stage equal to running `first`, then `second`.
pub fn compose_stages(first: &ClassicalStage, second: &ClassicalStage) -> Result<ClassicalStage> {
    if first.width() != second.width() {
        return Err(Error::WidthMismatch {
            expected: first.width(),
            found: second.width(),
        });
    }
    let width = first.width();
    match (first, second) {
        (
            ClassicalStage::Deterministic { table: a, .. },
            ClassicalStage::Deterministic { table: b, .. },
        ) => Ok(ClassicalStage::Deterministic {
            width,
            table: a.iter().map(|&x| b[x]).collect(),
        }),
        _ => {
            let d = first.dim();
            let a = first.dense();
            let b = second.dense();
            let mut m = vec![0.0; d * d];
            for i in 0..d {
                for k in 0..d {
                    let bik = b[i * d + k];
                    if bik == 0.0 {
                        continue;
                    }
                    for j in 0..d {
                        m[i * d + j] += bik * a[k * d + j];
                    }
                }
            }
            ClassicalStage::stochastic(width, m)
        }
    }
}
