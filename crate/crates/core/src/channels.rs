//! Distilling the identity channel from noisy memories and communication
//! channels by post-processing, plus the diamond-norm tools behind it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conic::{HermExpr, LinExpr, Model, SolveOptions, SolveStatus};
use crate::error::{Result, VqrdError};
use crate::monotones;
use crate::qcore::linalg::{self, CMat};
use crate::qcore::{objects, ChoiOperator, DensityMatrix};
use crate::sampler::QuasiDecomposition;

/// `‖Φ‖⋄` for a Hermitian-preserving map given by its Choi matrix:
/// `min ‖Tr_out(P + N)‖∞` over `J = P − N` with `P, N ⪰ 0`.
pub fn diamond_norm(j: &CMat, dim_in: usize, dim_out: usize) -> Result<f64> {
    let d = dim_in * dim_out;
    if j.nrows() != d || j.ncols() != d {
        return Err(VqrdError::dims(format!("Choi matrix must be {d}x{d}")));
    }
    // The norm is homogeneous; solving at unit scale keeps the zero map and
    // nearly equal channel pairs away from a degenerate program.
    let scale = linalg::max_abs(j);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut model = Model::new("diamond_norm");
    let p = model.psd_var(d);
    let n = model.psd_var(d);
    let t = model.var();
    model.herm_eq(&(&p - &n), &HermExpr::constant(linalg::hermitian_part(j) * linalg::cr(1.0 / scale)));
    let marg = (&p + &n).partial_trace(&[dim_in, dim_out], &[0])?;
    model.loewner_leq(&marg, &HermExpr::identity_times(&t, dim_in));
    model.minimize(&t);
    Ok(scale * model.solve(&SolveOptions::from_env())?.value.max(0.0))
}

/// `½‖𝓔₁ − 𝓔₂‖⋄`.
pub fn diamond_distance(a: &ChoiOperator, b: &ChoiOperator) -> Result<f64> {
    let diff = a.sub(b)?;
    Ok(0.5 * diamond_norm(diff.matrix(), a.dim_in(), a.dim_out())?)
}

#[derive(Clone, Debug)]
pub struct MemoryInstance {
    pub channel: ChoiOperator,
    pub m: usize,
    pub eps: f64,
}

impl MemoryInstance {
    pub fn new(channel: ChoiOperator, m: usize, eps: f64) -> Result<Self> {
        if channel.dim_in() != channel.dim_out() {
            return Err(VqrdError::dims("a memory maps a system to itself"));
        }
        if !channel.is_channel() {
            return Err(VqrdError::invalid("memory must be CPTP"));
        }
        if m == 0 {
            return Err(VqrdError::range("m must be at least 1"));
        }
        monotones::check_eps(eps)?;
        Ok(Self { channel, m, eps })
    }

    /// `𝓜^{⊗m}`.
    pub fn noisy(&self) -> ChoiOperator {
        let mut out = self.channel.clone();
        for _ in 1..self.m {
            out = out.tensor(&self.channel);
        }
        out
    }
}

/// Optimal correction pair: `λ±` and the CP maps `J±` with
/// `Tr_out J± = λ± I`.
#[derive(Clone, Debug)]
pub struct MemorySolution {
    pub value: f64,
    pub j_plus: CMat,
    pub j_minus: CMat,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

/// `min λ₊ + λ₋` such that `λ₊𝓝₊∘𝓜 − λ₋𝓝₋∘𝓜` is within diamond distance
/// `ε` of the identity, with `𝓝±` channels applied after the memory.
///
/// At `ε = 0` the composite must equal the identity exactly.
pub fn memory_overhead_sdp(inst: &MemoryInstance) -> Result<MemorySolution> {
    let noisy = inst.noisy();
    let d = noisy.dim_in();
    let dd = [d, d];
    let mut model = Model::new("memory_overhead");
    let mut composite = HermExpr::zero(d * d);
    let mut parts = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let j = model.psd_var(d * d);
        let lam = model.var();
        model.herm_eq(&j.partial_trace(&dd, &[0])?, &HermExpr::identity_times(&lam, d));
        composite = &composite + &(&j.link_after(noisy.matrix(), &dd, &dd, &[(1, 0)])? * sign);
        parts.push((j, lam));
    }
    let (jp, lp) = &parts[0];
    let (jm, lm) = &parts[1];
    model.eq(&(lp - lm), &LinExpr::constant(1.0));
    let ident = ChoiOperator::identity(d).matrix().clone();
    if inst.eps > 0.0 {
        let y = model.psd_var(d * d);
        model.loewner_leq(&(&composite - &ident), &y);
        model.loewner_leq(&y.partial_trace(&dd, &[0])?, &HermExpr::constant(linalg::eye(d) * linalg::cr(inst.eps)));
    } else {
        model.herm_eq(&composite, &HermExpr::constant(ident));
    }
    model.minimize(&(lp + lm));
    let sol = model.solve_raw(&SolveOptions::from_env());
    match sol.status {
        SolveStatus::Optimal => Ok(MemorySolution {
            value: sol.value,
            j_plus: sol.eval_herm(jp),
            j_minus: sol.eval_herm(jm),
            lambda_plus: sol.eval(lp),
            lambda_minus: sol.eval(lm),
        }),
        SolveStatus::Infeasible => Err(VqrdError::Infeasible(format!("memory cannot be virtually corrected at eps = {}", inst.eps))),
        status => Err(VqrdError::Solver { program: model.name().to_string(), status }),
    }
}

/// Closest channel to `j/λ`: negative eigenvalues dropped, then the input
/// side rescaled so that `Tr_out = I` holds exactly.
fn normalised_channel(j: &CMat, lambda: f64, d: usize) -> Result<ChoiOperator> {
    let psd = linalg::spectral_map(&(j * linalg::cr(1.0 / lambda)), |v| v.max(0.0));
    let t = linalg::partial_trace(&psd, &[d, d], &[0]).expect("square Choi");
    let a = linalg::spectral_map(&t, |v| if v > 1e-14 { v.powf(-0.5) } else { 0.0 });
    // Tr_out[(A ⊗ I)J(A ⊗ I)] = A·Tr_out[J]·A = I.
    let big = linalg::kron(&a, &linalg::eye(d));
    ChoiOperator::channel(d, d, crate::qcore::HermitianOperator::hermitian_part_of(&(&big * psd * &big)))
}

/// The optimal correction as a sampler decomposition of `m` memory uses.
pub fn memory_decomposition(sol: &MemorySolution, m: usize) -> Result<QuasiDecomposition> {
    let n = sol.j_plus.nrows();
    let d = (n as f64).sqrt().round() as usize;
    let plus = normalised_channel(&sol.j_plus, sol.lambda_plus, d)?;
    let lm = sol.lambda_minus.max(0.0);
    let minus = if lm > 1e-10 { normalised_channel(&sol.j_minus, lm, d)? } else { plus.clone() };
    let lm = if lm > 1e-10 { lm } else { 0.0 };
    QuasiDecomposition::new(1.0 + lm, lm, plus, minus, m)
}

/// The linear inverse of a channel as a (Hermitian-preserving) map.
pub fn inverse_map(e: &ChoiOperator) -> Result<ChoiOperator> {
    if e.dim_in() != e.dim_out() {
        return Err(VqrdError::dims("only maps between equal dimensions are inverted"));
    }
    let s = e.superoperator();
    let sv = s.clone().svd(false, false).singular_values;
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smin <= 1e-10 * smax.max(1.0) {
        return Err(VqrdError::NotInvertible(format!("transfer matrix has singular value {smin:.3e}")));
    }
    let inv = s.try_inverse().ok_or_else(|| VqrdError::NotInvertible("transfer matrix is singular".into()))?;
    ChoiOperator::from_superoperator(&inv, e.dim_in(), e.dim_out())
}

/// `C⁰(𝓔, 1) = ‖𝓔⁻¹‖⋄`.
pub fn inverse_overhead(e: &ChoiOperator) -> Result<f64> {
    let inv = inverse_map(e)?;
    diamond_norm(inv.matrix(), inv.dim_in(), inv.dim_out())
}

/// `(1 + (1 − 2/d²)p)/(1 − p)` for `(1−p)ρ + pI/d`.
pub fn depolarizing_inverse_overhead(d: usize, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(VqrdError::range(format!("p = {p} outside [0, 1)")));
    }
    let dd = (d * d) as f64;
    Ok((1.0 + (1.0 - 2.0 / dd) * p) / (1.0 - p))
}

/// `(1 + γ)/(1 − γ)`.
pub fn amplitude_damping_inverse_overhead(gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(VqrdError::range(format!("gamma = {gamma} outside [0, 1)")));
    }
    Ok((1.0 + gamma) / (1.0 - gamma))
}

/// `1/|1 − 2p|` for `(1−p)ρ + pZρZ`.
pub fn dephasing_inverse_overhead(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p == 0.5 {
        return Err(VqrdError::range(format!("p = {p} outside [0, 1] or not invertible")));
    }
    Ok(1.0 / (1.0 - 2.0 * p).abs())
}

fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// Quantum capacity `max_t [h₂((1−γ)t) − h₂(γt)]` of amplitude damping;
/// zero for `γ ≥ ½`.
pub fn amplitude_damping_capacity(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(VqrdError::range(format!("gamma = {gamma} outside [0, 1]")));
    }
    if gamma >= 0.5 {
        return Ok(0.0);
    }
    let f = |t: f64| h2((1.0 - gamma) * t) - h2(gamma * t);
    // Coarse grid to locate the peak, then golden-section on its bracket.
    const GRID: usize = 10_000;
    let step = 1.0 / GRID as f64;
    let best = (0..=GRID).max_by(|&a, &b| f(a as f64 * step).total_cmp(&f(b as f64 * step))).unwrap_or(0);
    let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
    lo = lo.max(0.0);
    hi = hi.min(1.0);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let peak = f(0.5 * (lo + hi)).max(f(best as f64 * step));
    Ok(peak.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateVsCapacity {
    /// `1/C⁰(𝓓_p, 1)²`.
    pub v_lower: f64,
    /// `max(1 − 4p, 0)`.
    pub q_upper: f64,
}

/// Virtual rate lower bound against the capacity upper bound for qubit
/// depolarizing noise `(1−p)ρ + pI/2`.
pub fn depolarizing_rate_vs_capacity(p: f64) -> Result<RateVsCapacity> {
    if !(0.0..=1.0).contains(&p) {
        return Err(VqrdError::range(format!("p = {p} outside [0, 1]")));
    }
    let v = ((1.0 - p) / (1.0 + p / 2.0)).powi(2);
    Ok(RateVsCapacity { v_lower: v, q_upper: (1.0 - 4.0 * p).max(0.0) })
}

/// The three noise families of the memory figure, in the figure's own
/// parametrisation where `p` is the weight of the undisturbed input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryFamily {
    /// `pρ + (1−p)I/2`.
    Depolarizing,
    /// `pρ + (1−p)ZρZ`.
    Dephasing,
    /// `pρ + (1−p)|0⟩⟨0|`.
    Replacement,
}

impl MemoryFamily {
    pub const ALL: [MemoryFamily; 3] = [MemoryFamily::Depolarizing, MemoryFamily::Dephasing, MemoryFamily::Replacement];

    pub fn name(self) -> &'static str {
        match self {
            MemoryFamily::Depolarizing => "depolarizing",
            MemoryFamily::Dephasing => "dephasing",
            MemoryFamily::Replacement => "replacement",
        }
    }

    pub fn channel(self, p: f64) -> Result<ChoiOperator> {
        match self {
            MemoryFamily::Depolarizing => objects::depolarizing(2, 1.0 - p),
            MemoryFamily::Dephasing => objects::dephasing(1.0 - p),
            MemoryFamily::Replacement => objects::replacement(1.0 - p, &DensityMatrix::basis(2, 0)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub family: MemoryFamily,
    pub noise_param: f64,
    /// `+∞` where no correction reaches the ε-ball.
    pub overhead: f64,
}

fn grid(points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![1.0; points];
    }
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

/// Memory overhead of the three families at `m = 1` on `points` evenly
/// spaced values of `p ∈ [0, 1]`.
pub fn fig2_data(eps: f64, points: usize) -> Result<Vec<Fig2Row>> {
    let jobs: Vec<(MemoryFamily, f64)> = MemoryFamily::ALL.iter().flat_map(|&f| grid(points).into_iter().map(move |p| (f, p))).collect();
    jobs.par_iter()
        .map(|&(family, p)| {
            let inst = MemoryInstance::new(family.channel(p)?, 1, eps)?;
            let overhead = match memory_overhead_sdp(&inst) {
                Ok(s) => s.value,
                Err(VqrdError::Infeasible(_)) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            Ok(Fig2Row { family, noise_param: p, overhead })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub gamma: f64,
    /// `1/C⁰(𝓐_γ, 1)²`; zero where the channel is not invertible.
    pub v_lower: f64,
    pub capacity: f64,
}

/// Rate lower bound against capacity for amplitude damping on `points`
/// evenly spaced values of `γ ∈ [0, 1]`.
pub fn fig3_data(points: usize) -> Result<Vec<Fig3Row>> {
    grid(points)
        .par_iter()
        .map(|&gamma| {
            let ch = objects::amplitude_damping(gamma)?;
            let v_lower = match inverse_overhead(&ch) {
                Ok(c) => 1.0 / (c * c),
                Err(VqrdError::NotInvertible(_)) => 0.0,
                Err(e) => return Err(e),
            };
            Ok(Fig3Row { gamma, v_lower, capacity: amplitude_damping_capacity(gamma)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_decomposition_corrects_dephasing() {
        let inst = MemoryInstance::new(objects::dephasing(0.2).unwrap(), 1, 0.0).unwrap();
        let sol = memory_overhead_sdp(&inst).unwrap();
        let dec = memory_decomposition(&sol, 1).unwrap();
        assert!((dec.gamma() - 1.0 / 0.6).abs() < 1e-6);
        let rho = objects::plus_state();
        let noisy = objects::dephasing(0.2).unwrap().apply_state(&rho).unwrap();
        let out = dec.output(&noisy).unwrap();
        assert!(linalg::max_abs(&(out.matrix() - rho.matrix())) < 1e-6);
    }

    #[test]
    fn diamond_examples() {
        let id = ChoiOperator::identity(2);
        assert!(diamond_distance(&id, &id).unwrap().abs() < 1e-7);
        let full = objects::depolarizing(2, 1.0).unwrap();
        assert!((diamond_distance(&id, &full).unwrap() - 0.75).abs() < 1e-6);
        let z = objects::dephasing(0.3).unwrap();
        assert!((diamond_distance(&id, &z).unwrap() - 0.3).abs() < 1e-6);
    }

    #[test]
    fn inverse_examples() {
        let v = inverse_overhead(&objects::depolarizing(2, 0.2).unwrap()).unwrap();
        assert!((v - 1.375).abs() < 1e-6, "{v}");
        let v = inverse_overhead(&objects::amplitude_damping(0.5).unwrap()).unwrap();
        assert!((v - 3.0).abs() < 1e-6, "{v}");
        assert!((inverse_overhead(&ChoiOperator::identity(2)).unwrap() - 1.0).abs() < 1e-6);
        assert!(matches!(inverse_overhead(&objects::amplitude_damping(1.0).unwrap()), Err(VqrdError::NotInvertible(_))));
    }

    #[test]
    fn memory_anchors() {
        for p in [0.1, 0.2, 0.4] {
            let v = memory_overhead_sdp(&MemoryInstance::new(objects::depolarizing(2, p).unwrap(), 1, 0.0).unwrap()).unwrap().value;
            assert!((v - (1.0 + p / 2.0) / (1.0 - p)).abs() < 1e-5, "p = {p}: {v}");
            let v = memory_overhead_sdp(&MemoryInstance::new(objects::dephasing(p).unwrap(), 1, 0.0).unwrap()).unwrap().value;
            assert!((v - 1.0 / (1.0 - 2.0 * p)).abs() < 1e-5, "p = {p}: {v}");
        }
        let v = memory_overhead_sdp(&MemoryInstance::new(ChoiOperator::identity(2), 1, 0.1).unwrap()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn memory_infeasible_for_erasing_noise() {
        let inst = MemoryInstance::new(objects::depolarizing(2, 1.0).unwrap(), 1, 0.0).unwrap();
        assert!(matches!(memory_overhead_sdp(&inst), Err(VqrdError::Infeasible(_))));
    }

    #[test]
    fn capacity_values() {
        assert!((amplitude_damping_capacity(0.0).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(amplitude_damping_capacity(0.5).unwrap(), 0.0);
        let q = amplitude_damping_capacity(0.25).unwrap();
        assert!(q > 0.0 && q < 1.0);
    }

    #[test]
    fn depolarizing_comparison() {
        let r = depolarizing_rate_vs_capacity(0.25).unwrap();
        assert!((r.v_lower - (0.75f64 / 1.125).powi(2)).abs() < 1e-12 && r.q_upper == 0.0);
        let r = depolarizing_rate_vs_capacity(0.1).unwrap();
        assert!(r.v_lower > r.q_upper);
    }
}
