//! A non-Markovian process where system and environment meet through two
//! CNOTs per step and the environment is dephased between steps. Random
//! Z pairs on the system undo the dephasing virtually.
//!
//! Wire signature of an L-step comb: step 1 takes `S₁ ⊗ E₀`, the last step
//! emits `S_L ⊗ E_L`, and every other wire is a system qubit. For `L = 1`
//! the single step maps `S₁ ⊗ E₀` to `S₁ ⊗ E₁`.

use crate::error::{Result, VqrdError};
use crate::qcore::linalg::{self, CMat};
use crate::qcore::{link_product, objects, ChoiOperator, CombChoi, HermitianOperator, Linked};
use crate::sampler::QuasiDecomposition;

/// Largest supported number of steps (Choi dimension 256).
pub const MAX_STEPS: usize = 3;

/// `CNOT(E→S) · CNOT(S→E)` on `S ⊗ E`: system-controlled first, then
/// environment-controlled. With this order a Z on the system before and
/// after the pair equals a Z on the environment after it.
pub fn step_unitary() -> CMat {
    objects::cnot_reversed() * objects::cnot()
}

fn check(l: usize, p: f64) -> Result<()> {
    if l == 0 || l > MAX_STEPS {
        return Err(VqrdError::range(format!("L = {l} outside 1..={MAX_STEPS}")));
    }
    if !(0.0..0.5).contains(&p) {
        return Err(VqrdError::range(format!("p = {p} outside [0, 1/2)")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Factor {
    SIn(usize),
    SOut(usize),
    EIn(usize),
    EOut(usize),
}

/// Wire dimensions of the L-step comb.
pub fn wires(l: usize) -> Vec<(usize, usize)> {
    if l == 1 {
        return vec![(4, 4)];
    }
    let mut w = vec![(4, 2)];
    w.extend(std::iter::repeat_n((2, 2), l - 2));
    w.push((2, 4));
    w
}

fn wire_order(l: usize) -> Vec<Factor> {
    let mut order = vec![Factor::SIn(0), Factor::EIn(0), Factor::SOut(0)];
    for j in 1..l {
        order.push(Factor::SIn(j));
        order.push(Factor::SOut(j));
    }
    order.push(Factor::EOut(l - 1));
    order
}

/// `𝓩_p^E ⋆ CNOT-pair` for each step, linked along the environment.
pub fn build_dephasing_comb(l: usize, p: f64) -> Result<CombChoi> {
    check(l, p)?;
    let dephase = ChoiOperator::identity(2).tensor(&objects::dephasing(p)?);
    let step = ChoiOperator::from_unitary(&step_unitary()).then(&dephase)?;
    // Split each step into qubit factors S_in, E_in, S_out, E_out.
    let step = Linked { matrix: step.matrix().clone(), dims: vec![2; 4] };
    let mut acc = step.clone();
    let mut labels = vec![Factor::SIn(0), Factor::EIn(0), Factor::SOut(0), Factor::EOut(0)];
    for j in 1..l {
        let e_prev = labels.iter().position(|f| *f == Factor::EOut(j - 1)).expect("previous environment output");
        acc = link_product(&acc, &step, &[(e_prev, 1)])?;
        labels.remove(e_prev);
        labels.extend([Factor::SIn(j), Factor::SOut(j), Factor::EOut(j)]);
    }
    let pos = |f: Factor| labels.iter().position(|g| *g == f).expect("every factor present");
    let mut steps: Vec<(Vec<usize>, Vec<usize>)> = (0..l).map(|j| (vec![pos(Factor::SIn(j))], vec![pos(Factor::SOut(j))])).collect();
    steps[0].0.push(pos(Factor::EIn(0)));
    steps[l - 1].1.push(pos(Factor::EOut(l - 1)));
    acc.into_comb(&steps)
}

/// The noiseless target process.
pub fn target_comb(l: usize) -> Result<CombChoi> {
    build_dephasing_comb(l, 0.0)
}

/// Z before and after the CNOT pair on the system at the flagged steps.
pub fn apply_system_z(comb: &CombChoi, flags: &[bool]) -> Result<CombChoi> {
    let l = comb.steps();
    if flags.len() != l || comb.wires() != wires(l).as_slice() {
        return Err(VqrdError::dims("flags or wires do not match the dephasing comb"));
    }
    let order = wire_order(l);
    let z = objects::pauli_z();
    let id = linalg::eye(2);
    let factors: Vec<&CMat> = order
        .iter()
        .map(|f| match f {
            Factor::SIn(j) | Factor::SOut(j) if flags[*j] => &z,
            _ => &id,
        })
        .collect();
    // Z is real and diagonal, so the input-side transpose is Z itself.
    let u = linalg::kron_all(&factors);
    let mat = &u * comb.matrix() * &u;
    CombChoi::new(comb.wires().to_vec(), HermitianOperator::hermitian_part_of(&mat))
}

#[derive(Clone, Debug)]
pub struct CombTerm {
    /// Steps at which the Z pair is applied.
    pub flags: Vec<bool>,
    pub coefficient: f64,
    /// `Λ_i(Υ)`.
    pub comb: CombChoi,
}

#[derive(Clone, Debug)]
pub struct CombDecomposition {
    pub steps: usize,
    pub p: f64,
    pub terms: Vec<CombTerm>,
}

impl CombDecomposition {
    pub fn sum_abs(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// The terms as a quasi-mixture of channels from all inputs to all
    /// outputs.
    pub fn quasi(&self) -> Result<QuasiDecomposition> {
        let terms: Vec<(f64, ChoiOperator)> = self.terms.iter().map(|t| (t.coefficient, t.comb.as_channel())).collect();
        QuasiDecomposition::from_terms(&terms, 1)
    }
}

/// `Θ = Σ_i (−1)^{|i|}(1−p)^{L−|i|}p^{|i|}/(1−2p)^L · Λ_i(Υ)`.
///
/// Dropping the `(1−2p)^{−L}` factor leaves the sampling weights: each step
/// applies its Z pair with probability `p` and contributes a sign.
pub fn virtual_comb_decomposition(l: usize, p: f64) -> Result<CombDecomposition> {
    let noisy = build_dephasing_comb(l, p)?;
    let norm = (1.0 - 2.0 * p).powi(l as i32);
    let mut terms = Vec::new();
    for bits in 0..1usize << l {
        let flags: Vec<bool> = (0..l).map(|j| bits >> j & 1 == 1).collect();
        let k = flags.iter().filter(|f| **f).count();
        let w = (1.0 - p).powi((l - k) as i32) * p.powi(k as i32);
        if w == 0.0 {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(CombTerm { comb: apply_system_z(&noisy, &flags)?, flags, coefficient: sign * w / norm });
    }
    Ok(CombDecomposition { steps: l, p, terms })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verification {
    pub max_residual: f64,
    pub sum_abs: f64,
}

/// Elementwise distance between the recombined process and the target.
pub fn verify_decomposition(dec: &CombDecomposition) -> Result<Verification> {
    let target = target_comb(dec.steps)?;
    let mut acc = CMat::zeros(target.matrix().nrows(), target.matrix().ncols());
    for t in &dec.terms {
        acc += t.comb.matrix() * linalg::cr(t.coefficient);
    }
    Ok(Verification { max_residual: linalg::max_abs(&(acc - target.matrix())), sum_abs: dec.sum_abs() })
}
