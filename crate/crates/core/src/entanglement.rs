//! Distilling Bell pairs `Φ^{⊗m}` from bipartite states.
//!
//! Separability is always relaxed to PPT. The exact program is the one for
//! PPT operations; the singlet-fraction route uses PPT-preserving maps.

use crate::conic::{HermExpr, LinExpr, Model, SolveOptions};
use crate::error::{Result, VqrdError};
use crate::freesets::{self, FreeSetSpec};
use crate::monotones::{self, OverheadSolution};
use crate::qcore::linalg;
use crate::qcore::{DensityMatrix, HermitianOperator, SchmidtVector};

#[derive(Clone, Debug)]
pub struct EntanglementInstance {
    pub state: DensityMatrix,
    pub dims: (usize, usize),
    pub m: usize,
    pub eps: f64,
}

impl EntanglementInstance {
    pub fn new(state: DensityMatrix, dims: (usize, usize), m: usize, eps: f64) -> Result<Self> {
        if dims.0 * dims.1 != state.dim() {
            return Err(VqrdError::dims(format!("bipartition {dims:?} does not match state dimension {}", state.dim())));
        }
        if m == 0 {
            return Err(VqrdError::range("m must be at least 1"));
        }
        monotones::check_eps(eps)?;
        Ok(Self { state, dims, m, eps })
    }

    pub fn free_set(&self) -> FreeSetSpec {
        FreeSetSpec::ppt(self.dims.0, self.dims.1)
    }
}

fn two_pow(m: usize) -> f64 {
    2f64.powi(m as i32)
}

/// Overhead under PPT operations.
///
/// The witness constraint is `‖Q±^Γ‖∞ ≤ μ±/2^m`, written as two LMIs. At
/// `ε = 0` this is the exact value; for `ε > 0` the target constraint is
/// relaxed to `Tr ρ(Q₊−Q₋) ≥ 1−ε`.
pub fn ppt_overhead_exact(inst: &EntanglementInstance) -> Result<OverheadSolution> {
    let (a, b) = inst.dims;
    let d = a * b;
    let k = two_pow(inst.m);
    monotones::signed_witness_program("ppt_overhead", &inst.state, inst.eps, |model, q, mu| {
        let qg = q.partial_transpose(&[a, b], &[1])?;
        let bound = HermExpr::identity_times(&(mu * (1.0 / k)), d);
        model.loewner_leq(&qg, &bound);
        model.loewner_leq(&-&qg, &bound);
        Ok(())
    })
}

/// `max{Tr ρW : 0 ⪯ W ⪯ I, Tr(Wσ) ≤ 2^{−m} for all PPT σ}`, the best
/// overlap with Φ^{⊗m} reachable by PPT-preserving maps.
pub fn ppt_singlet_fraction(rho: &DensityMatrix, dims: (usize, usize), m: usize) -> Result<f64> {
    let f = FreeSetSpec::ppt(dims.0, dims.1);
    let d = rho.dim();
    let mut model = Model::new("ppt_singlet_fraction");
    let w = model.psd_var(d);
    model.loewner_leq(&w, &HermExpr::constant(linalg::eye(d)));
    freesets::encode_sup_overlap_leq(&mut model, &w, &LinExpr::constant(1.0 / two_pow(m)), &f)?;
    model.maximize(&w.trace_with(rho.matrix()));
    Ok(model.solve(&SolveOptions::from_env())?.value.min(1.0))
}

/// `max{2(1−ε)/f − 1, 1}` with f the PPT singlet fraction.
pub fn overhead_via_fraction(rho: &DensityMatrix, dims: (usize, usize), m: usize, eps: f64) -> Result<f64> {
    monotones::overlap_lower_bound(ppt_singlet_fraction(rho, dims, m)?, eps)
}

/// The `K`-distillation norm of a Schmidt vector.
pub fn distillation_norm(s: &SchmidtVector, big_k: usize) -> f64 {
    let mut z = s.coeffs().to_vec();
    if z.len() < big_k {
        z.resize(big_k, 0.0);
    }
    let tail_sq = |from: usize| z[from..].iter().map(|v| v * v).sum::<f64>();
    let mut best = (f64::INFINITY, 1);
    for k in 1..=big_k {
        let v = tail_sq(big_k - k) / k as f64;
        if v < best.0 - 1e-15 {
            best = (v, k);
        }
    }
    let k = best.1;
    let head: f64 = z[..big_k - k].iter().sum();
    head + (k as f64).sqrt() * tail_sq(big_k - k).sqrt()
}

/// Closed-form overhead of a pure bipartite state.
pub fn pure_state_overhead(s: &SchmidtVector, m: usize, eps: f64) -> Result<f64> {
    monotones::check_eps(eps)?;
    let big_k = 1usize << m;
    let n = distillation_norm(s, big_k);
    Ok((2.0 * two_pow(m) * (1.0 - eps) / (n * n) - 1.0).max(1.0))
}

/// Closed-form overhead of the isotropic state `ρ^I_α(k)` for `m ≤ k`.
pub fn isotropic_overhead(alpha: f64, k: usize, m: usize, eps: f64) -> Result<f64> {
    if m == 0 || m > k {
        return Err(VqrdError::range(format!("need 1 ≤ m ≤ k, got m = {m}, k = {k}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(VqrdError::range(format!("alpha = {alpha} outside [0, 1]")));
    }
    monotones::check_eps(eps)?;
    let kk = two_pow(k);
    if alpha >= 1.0 - 1.0 / kk {
        return Ok((2.0 * two_pow(m) * (1.0 - eps) - 1.0).max(1.0));
    }
    let c = (kk - kk / two_pow(m)) / (kk - 1.0);
    Ok((2.0 * (1.0 - eps) / (1.0 - alpha * c) - 1.0).max(1.0))
}

/// E_H^ε(ρ) with the separable set relaxed to PPT, in bits.
///
/// The max–min collapses to `min c` over `0 ⪯ A ⪯ I`, `Tr Aρ ≥ 1−ε` and
/// `Tr(Aσ) ≤ c` for all PPT σ, giving `−log₂ c`.
pub fn hypothesis_testing_entropy(rho: &DensityMatrix, dims: (usize, usize), eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(VqrdError::range(format!("eps = {eps} outside [0, 1)")));
    }
    let f = FreeSetSpec::ppt(dims.0, dims.1);
    let d = rho.dim();
    if eps == 0.0 {
        // Tr Aρ = 1 with A ⪯ I forces A = I on the support of ρ, and the
        // support projector Π is then optimal. The program has no interior
        // point here, so evaluate max Tr(Πσ) directly.
        let pi = HermitianOperator::hermitian_part_of(&linalg::spectral_map(rho.matrix(), |v| if v > 1e-10 { 1.0 } else { 0.0 }));
        let c = freesets::max_overlap(&pi, &f)?;
        return Ok((-c.clamp(f64::MIN_POSITIVE, 1.0).log2()).max(0.0));
    }
    let mut model = Model::new("hypothesis_testing");
    let a = model.psd_var(d);
    let c = model.var();
    model.loewner_leq(&a, &HermExpr::constant(linalg::eye(d)));
    model.geq0(&(&a.trace_with(rho.matrix()) - (1.0 - eps)));
    freesets::encode_sup_overlap_leq(&mut model, &a, &c, &f)?;
    model.minimize(&c);
    let v = model.solve(&SolveOptions::from_env())?.value;
    Ok((-v.clamp(f64::MIN_POSITIVE, 1.0).log2()).max(0.0))
}

/// `2^{m − E_H + 1} − 1`, valid for `m ≥ E_H`.
pub fn overhead_bound_from_eh(eh: f64, m: usize) -> Result<f64> {
    if (m as f64) < eh - 1e-9 {
        return Err(VqrdError::range(format!("bound needs m ≥ E_H, got m = {m}, E_H = {eh}")));
    }
    Ok(2f64.powf(m as f64 - eh + 1.0) - 1.0)
}

/// `1/(2^{2 − E_H} − 1)²`.
pub fn rate_bound_from_eh(eh: f64) -> f64 {
    1.0 / (2f64.powf(2.0 - eh) - 1.0).powi(2)
}

pub fn eh_overhead_bound(rho: &DensityMatrix, dims: (usize, usize), m: usize, eps: f64) -> Result<f64> {
    overhead_bound_from_eh(hypothesis_testing_entropy(rho, dims, eps)?, m)
}

pub fn eh_rate_bound(rho: &DensityMatrix, dims: (usize, usize), eps: f64) -> Result<f64> {
    Ok(rate_bound_from_eh(hypothesis_testing_entropy(rho, dims, eps)?))
}

/// `‖ρ^Γ‖₁`.
pub fn negativity(rho: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let pt = linalg::partial_transpose(rho.matrix(), &[dims.0, dims.1], &[1])?;
    Ok(linalg::trace_norm(&pt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{objects, schmidt_of_vector, CVec};

    fn inst(rho: DensityMatrix, m: usize) -> EntanglementInstance {
        EntanglementInstance::new(rho, (2, 2), m, 0.0).unwrap()
    }

    #[test]
    fn exact_program_on_anchor_states() {
        let v = ppt_overhead_exact(&inst(objects::bell(), 1)).unwrap().value;
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let v = ppt_overhead_exact(&inst(DensityMatrix::maximally_mixed(4), 1)).unwrap().value;
        assert!((v - 3.0).abs() < 1e-6, "{v}");
        let v = ppt_overhead_exact(&inst(objects::isotropic(0.25, 1).unwrap(), 1)).unwrap().value;
        assert!((v - 5.0 / 3.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn singlet_fraction_anchors() {
        assert!((ppt_singlet_fraction(&objects::bell(), (2, 2), 1).unwrap() - 1.0).abs() < 1e-6);
        assert!((ppt_singlet_fraction(&DensityMatrix::maximally_mixed(4), (2, 2), 1).unwrap() - 0.5).abs() < 1e-6);
        let f = ppt_singlet_fraction(&objects::isotropic(0.3, 1).unwrap(), (2, 2), 1).unwrap();
        assert!((f - 0.7).abs() < 1e-6, "{f}");
    }

    #[test]
    fn closed_forms() {
        let c = |v: &[f64]| CVec::from_iterator(v.len(), v.iter().map(|x| linalg::cr(*x)));
        let bell = schmidt_of_vector(&c(&[FRAC, 0.0, 0.0, FRAC]), (2, 2)).unwrap();
        assert!((pure_state_overhead(&bell, 1, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let skew = schmidt_of_vector(&c(&[0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]), (2, 2)).unwrap();
        assert!((pure_state_overhead(&skew, 1, 0.0).unwrap() - (4.0 / 1.8 - 1.0)).abs() < 1e-12);
        let prod = schmidt_of_vector(&c(&[1.0, 0.0, 0.0, 0.0]), (2, 2)).unwrap();
        assert!((pure_state_overhead(&prod, 1, 0.0).unwrap() - 3.0).abs() < 1e-12);

        assert!((isotropic_overhead(0.75, 1, 1, 0.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((isotropic_overhead(0.25, 1, 1, 0.0).unwrap() - 5.0 / 3.0).abs() < 1e-12);
        assert!((isotropic_overhead(0.0, 2, 2, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(isotropic_overhead(0.1, 1, 2, 0.0).is_err());

        assert!((overhead_bound_from_eh(1.0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((rate_bound_from_eh(0.0) - 1.0 / 9.0).abs() < 1e-12);
        assert!((rate_bound_from_eh(1.0) - 1.0).abs() < 1e-12);
        assert!(overhead_bound_from_eh(1.5, 1).is_err());
    }

    const FRAC: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn hypothesis_testing_anchors() {
        let e0 = hypothesis_testing_entropy(&objects::bell(), (2, 2), 0.0).unwrap();
        assert!((e0 - 1.0).abs() < 1e-6, "{e0}");
        let e1 = hypothesis_testing_entropy(&objects::bell(), (2, 2), 0.1).unwrap();
        assert!(e1 >= e0 - 1e-7);
        let es = hypothesis_testing_entropy(&DensityMatrix::maximally_mixed(4), (2, 2), 0.0).unwrap();
        assert!(es.abs() < 1e-6, "{es}");
    }

    #[test]
    fn negativity_anchors() {
        assert!((negativity(&objects::bell(), (2, 2)).unwrap() - 2.0).abs() < 1e-12);
        assert!((negativity(&DensityMatrix::maximally_mixed(4), (2, 2)).unwrap() - 1.0).abs() < 1e-12);
    }
}
