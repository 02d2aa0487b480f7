//! Distilling `|+⟩^{⊗m}` under maximally incoherent (MIO) or
//! dephasing-covariant incoherent (DIO) operations.

use crate::error::{Result, VqrdError};
use crate::freesets::FreeSetSpec;
use crate::monotones::{self, OverheadSolution, ZetaVariant};
use crate::qcore::linalg::{self, CMat};
use crate::qcore::{objects, ChoiOperator, DensityMatrix};
use crate::sampler::QuasiDecomposition;

#[derive(Clone, Debug)]
pub struct CoherenceInstance {
    pub state: DensityMatrix,
    pub m: usize,
    pub eps: f64,
}

impl CoherenceInstance {
    pub fn new(state: DensityMatrix, m: usize, eps: f64) -> Result<Self> {
        if m == 0 {
            return Err(VqrdError::range("m must be at least 1"));
        }
        monotones::check_eps(eps)?;
        Ok(Self { state, m, eps })
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn free_set(&self) -> FreeSetSpec {
        FreeSetSpec::diagonal(self.dim())
    }
}

/// Exact overhead under MIO or DIO (both give the same program):
/// `Δ(Q±) = μ±/2^m · I` on top of the signed-witness constraints.
pub fn mio_dio_overhead(inst: &CoherenceInstance) -> Result<OverheadSolution> {
    let k = 2f64.powi(inst.m as i32);
    monotones::zeta_solution(&inst.state, k, inst.eps, ZetaVariant::Generalized, &inst.free_set())
}

/// DIO channels achieving the optimum of [`mio_dio_overhead`].
pub fn witness_decomposition(inst: &CoherenceInstance) -> Result<(OverheadSolution, QuasiDecomposition)> {
    let sol = mio_dio_overhead(inst)?;
    let dec = monotones::measure_prepare_decomposition(&sol, &objects::plus_power(inst.m), inst.m)?;
    Ok((sol, dec))
}

/// `Σ_{i≠j} |ρ_ij|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let x = rho.matrix();
    let d = x.nrows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += x[(i, j)].norm();
            }
        }
    }
    s
}

fn require_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 {
        return Err(VqrdError::dims(format!("closed forms need a qubit, got dimension {}", rho.dim())));
    }
    Ok(())
}

/// `max{(2^m(1−ε) − 1)/M_l1(ρ), 1}` for a qubit.
///
/// An incoherent input can only reach the target if `2^m(1−ε) ≤ 1`;
/// otherwise the overhead is infinite.
pub fn single_qubit_overhead(rho: &DensityMatrix, m: usize, eps: f64) -> Result<f64> {
    require_qubit(rho)?;
    monotones::check_eps(eps)?;
    if m == 0 {
        return Err(VqrdError::range("m must be at least 1"));
    }
    let num = 2f64.powi(m as i32) * (1.0 - eps) - 1.0;
    let c = l1_coherence(rho);
    if num <= 0.0 {
        return Ok(1.0);
    }
    if c < 1e-15 {
        return Ok(f64::INFINITY);
    }
    Ok((num / c).max(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitRate {
    pub rate: f64,
    /// Largest m reachable with overhead 1.
    pub m_tilde: u32,
}

/// `sup_m m / C^ε(ρ, m)²` for a qubit.
///
/// Every `m ≤ m̃` has overhead 1, and beyond that the ratio decreases, so
/// the supremum is the larger of `m̃` and the `m̃ + 1` term.
pub fn single_qubit_rate(rho: &DensityMatrix, eps: f64) -> Result<QubitRate> {
    require_qubit(rho)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(VqrdError::range(format!("eps = {eps} outside [0, 1)")));
    }
    let c = l1_coherence(rho);
    let m_tilde = (((c + 1.0) / (1.0 - eps)).log2() + 1e-12).floor().max(0.0) as u32;
    let next = f64::from(m_tilde + 1);
    let denom = 2f64.powi(m_tilde as i32 + 1) * (1.0 - eps) - 1.0;
    let rate = (next * c * c / (denom * denom)).max(f64::from(m_tilde));
    Ok(QubitRate { rate, m_tilde })
}

/// `X ↦ ½X + ½ σₓXσₓ`, which removes everything but the `|±⟩` populations
/// once the coherence is real.
fn twirl(x: &CMat) -> CMat {
    let px = objects::pauli_x();
    (x + &px * x * &px) * linalg::cr(0.5)
}

/// Explicit one-copy protocol built from Pauli X and Z.
///
/// After a diagonal phase makes `ρ₀₁ = β ≥ 0`, the twirl gives `I/2 + βX`
/// and a subsequent Z flips its sign. Mixing the two with weights `s` and
/// `−(s − 1)`, `s = (1 − 2ε)/(4β) + ½`, yields
/// `(1 − ε)|+⟩⟨+| + ε|−⟩⟨−|`. When `s ≤ 1` the mixture is convex.
pub fn one_qubit_decomposition(rho: &DensityMatrix, eps: f64) -> Result<QuasiDecomposition> {
    require_qubit(rho)?;
    monotones::check_eps(eps)?;
    let off = rho.matrix()[(0, 1)];
    let beta = off.norm();
    let target = 1.0 - 2.0 * eps;
    if beta < 1e-15 && target > 0.0 {
        return Err(VqrdError::Infeasible("incoherent input cannot approximate |+⟩ below eps = 1/2".into()));
    }
    // diag(1, e^{iφ}) maps ρ₀₁ to ρ₀₁e^{-iφ}.
    let u = objects::phase_gate(off.arg());
    let z = objects::pauli_z();
    let t = ChoiOperator::from_fn(2, 2, |x| twirl(&(&u * x * u.adjoint())));
    let zt = ChoiOperator::from_fn(2, 2, |x| {
        let y = twirl(&(&u * x * u.adjoint()));
        &z * y * &z
    });
    let s = if target > 0.0 { (target / (4.0 * beta) + 0.5).max(0.5) } else { 0.5 };
    if s > 1.0 {
        QuasiDecomposition::new(s, s - 1.0, t, zt, 1)
    } else {
        let mix = t.scale(s).add(&zt.scale(1.0 - s))?;
        QuasiDecomposition::plain(mix, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::c;

    fn qubit_with_offdiag(a: f64, off: f64) -> DensityMatrix {
        DensityMatrix::new(linalg::from_real(2, &[a, off, off, 1.0 - a])).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let rho = qubit_with_offdiag(0.5, 0.25);
        assert!((l1_coherence(&rho) - 0.5).abs() < 1e-15);
        assert_eq!(single_qubit_overhead(&rho, 1, 0.25).unwrap(), 1.0);
        assert!((single_qubit_overhead(&rho, 1, 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((single_qubit_overhead(&objects::plus_state(), 3, 0.0).unwrap() - 7.0).abs() < 1e-12);
        assert!(single_qubit_overhead(&DensityMatrix::basis(2, 0), 1, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn rate_examples() {
        let r = single_qubit_rate(&objects::plus_state(), 0.0).unwrap();
        assert_eq!(r.m_tilde, 1);
        assert!((r.rate - 1.0).abs() < 1e-12);
        let r = single_qubit_rate(&qubit_with_offdiag(0.5, 0.25), 0.0).unwrap();
        assert_eq!(r.m_tilde, 0);
        assert!((r.rate - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sdp_examples() {
        let rho = qubit_with_offdiag(0.5, 0.25);
        for (m, want) in [(1, 2.0), (2, 6.0)] {
            let v = mio_dio_overhead(&CoherenceInstance::new(rho.clone(), m, 0.0).unwrap()).unwrap().value;
            assert!((v - want).abs() < 1e-6, "m = {m}: {v}");
        }
        let v = mio_dio_overhead(&CoherenceInstance::new(objects::plus_state(), 1, 0.0).unwrap()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn one_qubit_protocol() {
        let d = one_qubit_decomposition(&qubit_with_offdiag(0.5, 0.25), 0.0).unwrap();
        assert!((d.lambda_plus() - 1.5).abs() < 1e-12 && (d.lambda_minus() - 0.5).abs() < 1e-12);
        let d = one_qubit_decomposition(&objects::plus_state(), 0.0).unwrap();
        assert_eq!((d.lambda_plus(), d.lambda_minus()), (1.0, 0.0));
        // Complex coherence with a phase.
        let rho = DensityMatrix::new(CMat::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.2), c(0.0, -0.2), c(0.4, 0.0)])).unwrap();
        let eps = 0.1;
        let d = one_qubit_decomposition(&rho, eps).unwrap();
        let eta = d.output(&rho).unwrap();
        let dist = 0.5 * linalg::trace_norm(&(eta.matrix() - objects::plus_state().matrix()));
        assert!(dist <= eps + 1e-12, "{dist}");
        assert!((d.gamma() - single_qubit_overhead(&rho, 1, eps).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn witness_channels_are_dio() {
        let inst = CoherenceInstance::new(qubit_with_offdiag(0.7, 0.3), 1, 0.05).unwrap();
        let (sol, dec) = witness_decomposition(&inst).unwrap();
        assert!((dec.gamma() - sol.value).abs() < 1e-6);
        let deph = objects::complete_dephasing(2);
        for ch in [dec.channel_plus(), dec.channel_minus()] {
            let a = ch.then(&deph).unwrap();
            let b = deph.then(ch).unwrap();
            assert!(linalg::max_abs(&(a.matrix() - b.matrix())) < 1e-7);
        }
        let eta = dec.output(&inst.state).unwrap();
        let dist = 0.5 * linalg::trace_norm(&(eta.matrix() - objects::plus_state().matrix()));
        assert!(dist <= inst.eps + 1e-6);
    }
}
