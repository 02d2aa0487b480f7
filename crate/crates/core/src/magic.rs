//! Magic-state distillation over the stabilizer polytope: T states on
//! qubits and the Strange state on a qutrit.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::conic::{HermExpr, LinExpr, Model, SolveOptions};
use crate::error::{Result, VqrdError};
use crate::freesets::{self, FreeSetSpec};
use crate::monotones::{self, BoundReport};
use crate::qcore::linalg;
use crate::qcore::{objects, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MagicTarget {
    T,
    Strange,
}

impl MagicTarget {
    pub fn qudit_dim(self) -> usize {
        match self {
            MagicTarget::T => 2,
            MagicTarget::Strange => 3,
        }
    }

    pub fn state(self) -> DensityMatrix {
        match self {
            MagicTarget::T => objects::t_state(),
            MagicTarget::Strange => objects::strange_state(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MagicInstance {
    pub state: DensityMatrix,
    pub target: MagicTarget,
    pub m: usize,
    pub eps: f64,
}

impl MagicInstance {
    pub fn new(state: DensityMatrix, target: MagicTarget, m: usize, eps: f64) -> Result<Self> {
        monotones::check_eps(eps)?;
        match (target, m) {
            (MagicTarget::T, 1 | 2) | (MagicTarget::Strange, 1) => {}
            _ => return Err(VqrdError::Unsupported(format!("{target:?} target with m = {m}"))),
        }
        stabilizer_set(state.dim())?;
        Ok(Self { state, target, m, eps })
    }
}

/// Stabilizer polytope on a space of dimension `d`.
pub fn stabilizer_set(d: usize) -> Result<FreeSetSpec> {
    match d {
        2 => Ok(FreeSetSpec::qubit_stabilizer()),
        3 => Ok(FreeSetSpec::qutrit_stabilizer()),
        4 => Ok(FreeSetSpec::two_qubit_stabilizer()),
        _ => Err(VqrdError::Unsupported(format!("no stabilizer polytope for dimension {d}"))),
    }
}

/// Largest Bloch length reachable by twirling a stabilizer state onto the
/// T axis.
pub const P_TH: f64 = FRAC_1_SQRT_2;

/// Overhead of one T state from `pT + (1−p)I/2`, clamped at 1.
pub fn dephased_t_overhead(p: f64, eps: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&p) {
        return Err(VqrdError::range(format!("p = {p} outside [-1, 1]")));
    }
    if !(0.0..=0.5).contains(&eps) {
        return Err(VqrdError::range(format!("eps = {eps} outside [0, 1/2]")));
    }
    Ok(((1.0 - 2.0 * eps) / p.abs().max(P_TH)).max(1.0))
}

/// Average of ρ and its image under the Clifford `SX`, which fixes T and T̄
/// and projects every qubit state onto the axis through them.
pub fn t_twirl(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(VqrdError::dims(format!("T twirl acts on a qubit, got dimension {}", rho.dim())));
    }
    let u = objects::s_gate() * objects::pauli_x();
    rho.mix(&rho.conjugate(&u), 0.5)
}

/// Theorem 1 bracket with stabilizer polytopes on both sides.
pub fn stabilizer_overhead_lp(inst: &MagicInstance) -> Result<BoundReport> {
    let target = inst.target.state();
    let f_in = stabilizer_set(inst.state.dim())?;
    let f_out = stabilizer_set(inst.target.qudit_dim().pow(inst.m as u32))?;
    monotones::theorem1_bracket(&inst.state, &f_in, &target, &f_out, inst.m, inst.eps)
}

/// `max{Tr ρW : 0 ⪯ W ⪯ I, Tr(Wσ) ≤ F_STAB(S) for every stabilizer σ}`.
///
/// This relaxes the overlap reachable by stabilizer protocols: any such
/// protocol followed by the S measurement gives a feasible `W`.
pub fn strange_overlap(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 3 {
        return Err(VqrdError::dims(format!("Strange-state overlap needs a qutrit, got dimension {}", rho.dim())));
    }
    let f = FreeSetSpec::qutrit_stabilizer();
    let fs = freesets::free_fidelity(&objects::strange_state(), &f)?;
    let mut model = Model::new("strange_overlap");
    let w = model.psd_var(3);
    model.loewner_leq(&w, &HermExpr::constant(linalg::eye(3)));
    freesets::encode_sup_overlap_leq(&mut model, &w, &LinExpr::constant(fs), &f)?;
    model.maximize(&w.trace_with(rho.matrix()));
    Ok(model.solve(&SolveOptions::from_env())?.value.clamp(fs, 1.0))
}

/// `max{2(1−ε)/f − 1, 1}` with `f` from [`strange_overlap`].
pub fn strange_overhead(rho: &DensityMatrix, eps: f64) -> Result<f64> {
    monotones::overlap_lower_bound(strange_overlap(rho)?, eps)
}
