//! Reference states, gates and channels.
//!
//! Bipartite objects on `A ⊗ B` are ordered with every factor of A before
//! every factor of B, so `max_entangled(2^k)` is k Bell pairs regrouped as
//! `A₁…A_k B₁…B_k`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Result, VqrdError};

use super::linalg::{self, c, cr, CMat, CVec, ONE, ZERO};
use super::operators::{ChoiOperator, DensityMatrix, HermitianOperator};

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(VqrdError::range(format!("{name} = {p} must lie in [0, 1]")));
    }
    Ok(())
}

pub fn basis_vector(d: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[k] = ONE;
    v
}

pub fn pauli_x() -> CMat {
    linalg::from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> CMat {
    linalg::from_real(2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn hadamard() -> CMat {
    linalg::from_real(2, &[1.0, 1.0, 1.0, -1.0]).scale(FRAC_1_SQRT_2)
}

pub fn s_gate() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(0.0, 1.0)])
}

/// CNOT with the first qubit as control.
pub fn cnot() -> CMat {
    let mut m = linalg::zeros(4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// CNOT with the second qubit as control.
pub fn cnot_reversed() -> CMat {
    let mut m = linalg::zeros(4);
    m[(0, 0)] = ONE;
    m[(1, 3)] = ONE;
    m[(2, 2)] = ONE;
    m[(3, 1)] = ONE;
    m
}

pub fn plus_vector() -> CVec {
    CVec::from_element(2, cr(FRAC_1_SQRT_2))
}

pub fn plus_state() -> DensityMatrix {
    DensityMatrix::pure(&plus_vector()).expect("nonzero")
}

/// |+⟩^{⊗m}
pub fn plus_power(m: usize) -> DensityMatrix {
    let d = 1usize << m;
    DensityMatrix::pure(&CVec::from_element(d, cr(1.0 / (d as f64).sqrt()))).expect("nonzero")
}

/// (Σ_i |ii⟩)/√d.
pub fn max_entangled_vector(d: usize) -> CVec {
    let mut v = CVec::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = cr(a);
    }
    v
}

pub fn max_entangled(d: usize) -> DensityMatrix {
    DensityMatrix::pure(&max_entangled_vector(d)).expect("nonzero")
}

/// The two-qubit Bell projector Φ.
pub fn bell() -> DensityMatrix {
    max_entangled(2)
}

/// Φ^{⊗m} regrouped as `A₁…A_m B₁…B_m`.
pub fn bell_power(m: usize) -> DensityMatrix {
    max_entangled(1usize << m)
}

/// ρ_α^I(k) = (1−α)Φ^{⊗k} + α(I − Φ^{⊗k})/(4^k − 1).
pub fn isotropic(alpha: f64, k: usize) -> Result<DensityMatrix> {
    check_prob("alpha", alpha)?;
    if k == 0 {
        return Err(VqrdError::range("isotropic state needs k >= 1"));
    }
    let d = 1usize << k;
    let phi = max_entangled(d);
    let n = (d * d) as f64;
    let rest = (linalg::eye(d * d) - phi.matrix()).scale(alpha / (n - 1.0));
    DensityMatrix::new(phi.matrix().scale(1.0 - alpha) + rest)
}

pub fn t_vector() -> CVec {
    CVec::from_vec(vec![cr(FRAC_1_SQRT_2), c((PI / 4.0).cos(), (PI / 4.0).sin()) * FRAC_1_SQRT_2])
}

/// |T⟩⟨T| = (I + (X+Y)/√2)/2.
pub fn t_state() -> DensityMatrix {
    DensityMatrix::pure(&t_vector()).expect("nonzero")
}

/// T̄ = Z T Z, the state orthogonal to T on the twirl axis.
pub fn t_bar_state() -> DensityMatrix {
    t_state().conjugate(&pauli_z())
}

/// Bloch-length parametrisation: (1+p)/2·T + (1−p)/2·T̄ = pT + (1−p)I/2, p ∈ [−1, 1].
pub fn dephased_t(p: f64) -> Result<DensityMatrix> {
    if !(-1.0..=1.0).contains(&p) {
        return Err(VqrdError::range(format!("p = {p} must lie in [-1, 1]")));
    }
    let t = t_state();
    DensityMatrix::new(t.matrix().scale(p) + linalg::eye(2).scale((1.0 - p) / 2.0))
}

/// Noise parametrisation: (1−q)T + qI/2, so q = 0 is the pure T state.
pub fn depolarized_t(q: f64) -> Result<DensityMatrix> {
    check_prob("q", q)?;
    dephased_t(1.0 - q)
}

/// Qutrit Strange state (|1⟩ − |2⟩)/√2.
pub fn strange_vector() -> CVec {
    CVec::from_vec(vec![ZERO, cr(FRAC_1_SQRT_2), cr(-FRAC_1_SQRT_2)])
}

pub fn strange_state() -> DensityMatrix {
    DensityMatrix::pure(&strange_vector()).expect("nonzero")
}

/// Depolarizing channel 𝓓_p(ρ) = (1−p)ρ + p·Tr(ρ)·I/d.
pub fn depolarizing(d: usize, p: f64) -> Result<ChoiOperator> {
    check_prob("p", p)?;
    Ok(ChoiOperator::from_fn(d, d, |x| {
        let t = linalg::trace(x);
        x.scale(1.0 - p) + linalg::eye(d) * (t * (p / d as f64))
    }))
}

/// Qubit dephasing 𝓩_p(ρ) = (1−p)ρ + pZρZ.
pub fn dephasing(p: f64) -> Result<ChoiOperator> {
    check_prob("p", p)?;
    let z = pauli_z();
    Ok(ChoiOperator::from_kraus(&[linalg::eye(2).scale((1.0 - p).sqrt()), z.scale(p.sqrt())]))
}

/// Qubit amplitude damping 𝓐_γ.
pub fn amplitude_damping(gamma: f64) -> Result<ChoiOperator> {
    check_prob("gamma", gamma)?;
    let k0 = linalg::from_real(2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]);
    let k1 = linalg::from_real(2, &[0.0, gamma.sqrt(), 0.0, 0.0]);
    Ok(ChoiOperator::from_kraus(&[k0, k1]))
}

/// Stochastic replacement (1−p)ρ + p·Tr(ρ)·σ.
pub fn replacement(p: f64, sigma: &DensityMatrix) -> Result<ChoiOperator> {
    check_prob("p", p)?;
    let s = sigma.matrix().clone();
    let d = sigma.dim();
    Ok(ChoiOperator::from_fn(d, d, move |x| x.scale(1.0 - p) + &s * (linalg::trace(x) * p)))
}

pub fn unitary_channel(u: &CMat) -> ChoiOperator {
    ChoiOperator::from_unitary(u)
}

/// Diagonal phase unitary diag(1, e^{iφ}).
pub fn phase_gate(phi: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(phi.cos(), phi.sin())])
}

/// Completely dephasing map Δ in dimension d.
pub fn complete_dephasing(d: usize) -> ChoiOperator {
    ChoiOperator::from_fn(d, d, |x| CMat::from_diagonal(&x.diagonal()))
}

/// A catalogue of the named reference objects.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub bell: DensityMatrix,
    pub plus: DensityMatrix,
    pub t: DensityMatrix,
    pub t_bar: DensityMatrix,
    pub strange: DensityMatrix,
    pub pauli_x: HermitianOperator,
    pub pauli_y: HermitianOperator,
    pub pauli_z: HermitianOperator,
    pub hadamard: CMat,
    pub s_gate: CMat,
    pub cnot: CMat,
}

pub fn standard_objects() -> Catalog {
    Catalog {
        bell: bell(),
        plus: plus_state(),
        t: t_state(),
        t_bar: t_bar_state(),
        strange: strange_state(),
        pauli_x: HermitianOperator::hermitian_part_of(&pauli_x()),
        pauli_y: HermitianOperator::hermitian_part_of(&pauli_y()),
        pauli_z: HermitianOperator::hermitian_part_of(&pauli_z()),
        hadamard: hadamard(),
        s_gate: s_gate(),
        cnot: cnot(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_limits() {
        assert!(isotropic(0.0, 1).unwrap().operator().max_abs_diff(bell().operator()) < 1e-15);
        assert!(depolarized_t(0.0).unwrap().operator().max_abs_diff(t_state().operator()) < 1e-15);
        assert!(amplitude_damping(0.0).unwrap().operator().max_abs_diff(ChoiOperator::identity(2).operator()) < 1e-15);
    }

    #[test]
    fn t_state_has_expected_bloch_vector() {
        let expect = (linalg::eye(2) + (pauli_x() + pauli_y()).scale(FRAC_1_SQRT_2)).scale(0.5);
        assert!(linalg::max_abs(&(t_state().matrix() - expect)) < 1e-15);
        assert!(t_state().operator().overlap(t_bar_state().operator()).abs() < 1e-15);
    }

    #[test]
    fn full_depolarizing_outputs_maximally_mixed() {
        let e = depolarizing(2, 1.0).unwrap();
        let out = e.apply_state(&t_state()).unwrap();
        assert!(out.operator().max_abs_diff(DensityMatrix::maximally_mixed(2).operator()) < 1e-15);
    }

    #[test]
    fn dephasing_shrinks_coherence() {
        let p = 0.2;
        let out = dephasing(p).unwrap().apply_state(&plus_state()).unwrap();
        assert!((out.matrix()[(0, 1)].re - (1.0 - 2.0 * p) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn channels_are_cptp() {
        for e in [depolarizing(2, 0.3).unwrap(), dephasing(0.1).unwrap(), amplitude_damping(0.7).unwrap(), replacement(0.4, &DensityMatrix::basis(2, 0)).unwrap(), complete_dephasing(3)] {
            assert!(e.is_channel());
        }
    }

    #[test]
    fn out_of_range_parameters_are_rejected() {
        assert!(dephasing(1.5).is_err());
        assert!(isotropic(-0.1, 1).is_err());
        assert!(dephased_t(1.1).is_err());
    }

    #[test]
    fn gates_are_unitary() {
        for u in [hadamard(), s_gate(), cnot(), cnot_reversed(), pauli_y()] {
            let n = u.nrows();
            assert!(linalg::max_abs(&(&u * u.adjoint() - linalg::eye(n))) < 1e-15);
        }
    }
}
