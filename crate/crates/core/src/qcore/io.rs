//! JSON file format for operators, channels and combs.
//!
//! ```json
//! {"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}
//! ```
//!
//! Channels add `dim_in`/`dim_out`; combs add `wires: [[din, dout], ...]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VqrdError};

use super::linalg::{c, CMat};
use super::operators::{ChoiOperator, CombChoi, DensityMatrix, HermitianOperator};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_out: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wires: Option<Vec<[usize; 2]>>,
}

impl OperatorFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let n = m.nrows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
        Self { dim: n, re, im, dim_in: None, dim_out: None, wires: None }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.dim;
        let rows_ok = |a: &Vec<Vec<f64>>| a.len() == n && a.iter().all(|r| r.len() == n);
        if !rows_ok(&self.re) || !rows_ok(&self.im) {
            return Err(VqrdError::dims(format!("`re` and `im` must both be {n}x{n}")));
        }
        Ok(CMat::from_fn(n, n, |i, j| c(self.re[i][j], self.im[i][j])))
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.to_matrix()?)
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix()?)
    }

    pub fn to_choi(&self) -> Result<ChoiOperator> {
        let (din, dout) = match (self.dim_in, self.dim_out) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(VqrdError::invalid("channel file needs `dim_in` and `dim_out`")),
        };
        ChoiOperator::new(din, dout, self.to_operator()?)
    }

    pub fn to_comb(&self) -> Result<CombChoi> {
        let wires = self.wires.as_ref().ok_or_else(|| VqrdError::invalid("comb file needs `wires`"))?;
        CombChoi::new(wires.iter().map(|w| (w[0], w[1])).collect(), self.to_operator()?)
    }

    pub fn from_choi(j: &ChoiOperator) -> Self {
        Self { dim_in: Some(j.dim_in()), dim_out: Some(j.dim_out()), ..Self::from_matrix(j.matrix()) }
    }

    pub fn from_comb(j: &CombChoi) -> Self {
        Self { wires: Some(j.wires().iter().map(|&(a, b)| [a, b]).collect()), ..Self::from_matrix(j.matrix()) }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}
