//! Bounds on the virtual distillation overhead that hold in any convex
//! state theory: the signed-witness (ζ) programs, the dual witness form,
//! fidelity/robustness/weight lower bounds and virtual monotones.

use crate::conic::{HermExpr, LinExpr, Model, SolveOptions, SolveStatus};
use crate::error::{Result, VqrdError};
use crate::freesets::{self, FreeSetSpec};
use crate::qcore::linalg::{self, CMat};
use crate::qcore::{ChoiOperator, DensityMatrix, HermitianOperator};
use crate::sampler::QuasiDecomposition;

/// Optimal point of a signed-witness program.
///
/// `value = μ₊ + μ₋`; `Q₊`, `Q₋` are the effects `λ±Λ±†(target)` of an
/// optimal protocol.
#[derive(Clone, Debug)]
pub struct OverheadSolution {
    pub value: f64,
    pub q_plus: CMat,
    pub q_minus: CMat,
    pub mu_plus: f64,
    pub mu_minus: f64,
}

/// Which overlap constraint the ζ program uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaVariant {
    /// `Tr(Q±σ) ≤ μ±/k` for all free σ.
    Standard,
    /// `Tr(Q±σ) = μ±/k` for all free σ.
    Generalized,
}

/// `min μ₊+μ₋` over `0 ⪯ Q± ⪯ μ±I`, `μ₊−μ₋ = 1`, `Tr ρ(Q₊−Q₋) ≥ 1−ε`, plus
/// whatever `constrain(model, Q, μ)` adds for each sign.
///
/// Infeasibility is reported as [`VqrdError::Infeasible`].
pub fn signed_witness_program(
    name: &str,
    rho: &DensityMatrix,
    eps: f64,
    mut constrain: impl FnMut(&mut Model, &HermExpr, &LinExpr) -> Result<()>,
) -> Result<OverheadSolution> {
    check_eps(eps)?;
    let d = rho.dim();
    let mut model = Model::new(name);
    let mut parts = Vec::with_capacity(2);
    for _ in 0..2 {
        let q = model.psd_var(d);
        let mu = model.var();
        model.loewner_leq(&q, &HermExpr::identity_times(&mu, d));
        constrain(&mut model, &q, &mu)?;
        parts.push((q, mu));
    }
    let (qp, mp) = &parts[0];
    let (qm, mm) = &parts[1];
    model.eq(&(mp - mm), &LinExpr::constant(1.0));
    model.geq0(&(&(qp - qm).trace_with(rho.matrix()) - (1.0 - eps)));
    model.minimize(&(mp + mm));
    let sol = model.solve_raw(&SolveOptions::from_env());
    match sol.status {
        SolveStatus::Optimal => Ok(OverheadSolution {
            value: sol.value,
            q_plus: sol.eval_herm(qp),
            q_minus: sol.eval_herm(qm),
            mu_plus: sol.eval(mp),
            mu_minus: sol.eval(mm),
        }),
        SolveStatus::Infeasible => Err(VqrdError::Infeasible(format!("`{name}` has no feasible witness at eps = {eps}"))),
        status => Err(VqrdError::Solver { program: name.to_string(), status }),
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(VqrdError::range(format!("eps = {eps} outside [0, 1]")));
    }
    Ok(())
}

/// ζ^s_ε(ρ, k) or ζ^g_ε(ρ, k) with the overlap constraints taken over `f`.
pub fn zeta_solution(rho: &DensityMatrix, k: f64, eps: f64, variant: ZetaVariant, f: &FreeSetSpec) -> Result<OverheadSolution> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(VqrdError::range(format!("k = {k} must be a finite number ≥ 1")));
    }
    let name = match variant {
        ZetaVariant::Standard => "zeta_s",
        ZetaVariant::Generalized => "zeta_g",
    };
    signed_witness_program(name, rho, eps, |model, q, mu| {
        let c = mu * (1.0 / k);
        match variant {
            ZetaVariant::Standard => freesets::encode_sup_overlap_leq(model, q, &c, f),
            ZetaVariant::Generalized => freesets::encode_overlap_eq(model, q, &c, f),
        }
    })
}

pub fn zeta_program(rho: &DensityMatrix, k: f64, eps: f64, variant: ZetaVariant, f: &FreeSetSpec) -> Result<f64> {
    zeta_solution(rho, k, eps, variant, f).map(|s| s.value)
}

/// A bracket `lower ≤ C^ε ≤ upper` with the provenance of each side.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: String,
    pub upper_method: String,
    /// Both sides come from the same program, so the value is exact.
    pub exact: bool,
    /// `Q₊ − Q₋` of the upper-bound program when it was solved.
    pub certificate: Option<CMat>,
}

impl BoundReport {
    pub fn new(lower: f64, upper: f64, lower_method: impl Into<String>, upper_method: impl Into<String>) -> Result<Self> {
        if lower > upper + 1e-6 {
            return Err(VqrdError::Consistency(format!("lower bound {lower} exceeds upper bound {upper}")));
        }
        Ok(Self { lower, upper, lower_method: lower_method.into(), upper_method: upper_method.into(), exact: false, certificate: None })
    }
}

/// Theorem-1 bracket for distilling `ψ^{⊗m}` out of `ρ`.
///
/// `f_input` is the free set on ρ's space (it shapes the witnesses),
/// `f_target` the one on the target space (it fixes the two k values).
/// The generalized variant is used when ψ^{⊗m} has constant overlap with
/// every free state, the standard one otherwise; an infinite standard
/// robustness leaves the upper side at +∞.
pub fn theorem1_bracket(rho: &DensityMatrix, f_input: &FreeSetSpec, psi: &DensityMatrix, f_target: &FreeSetSpec, m: usize, eps: f64) -> Result<BoundReport> {
    if m == 0 {
        return Err(VqrdError::range("m must be at least 1"));
    }
    let target = psi.tensor_power(m);
    let fid = freesets::free_fidelity(&target, f_target)?;
    let k_low = 1.0 / fid;
    let (variant, k_up, tag) = if f_target.has_constant_overlap(target.matrix()) {
        (ZetaVariant::Generalized, freesets::generalized_robustness(&target, f_target)? + 1.0, "g")
    } else {
        (ZetaVariant::Standard, freesets::standard_robustness(&target, f_target)? + 1.0, "s")
    };
    let lower = zeta_program(rho, k_low, eps, variant, f_input)?;
    let lower_method = format!("zeta_{tag}(k = 1/F = {k_low:.9})");
    if !k_up.is_finite() {
        return BoundReport::new(lower, f64::INFINITY, lower_method, "standard robustness infinite");
    }
    let coincide = (k_low - k_up).abs() <= 1e-9 * k_low.max(1.0);
    let (upper, cert) = if coincide {
        let s = zeta_solution(rho, k_low, eps, variant, f_input)?;
        (lower, &s.q_plus - &s.q_minus)
    } else {
        let s = zeta_solution(rho, k_up, eps, variant, f_input)?;
        (s.value, &s.q_plus - &s.q_minus)
    };
    let mut rep = BoundReport::new(lower, upper, lower_method, format!("zeta_{tag}(k = 1+R = {k_up:.9})"))?;
    rep.exact = coincide;
    rep.certificate = Some(cert);
    Ok(rep)
}

/// Operation classes with a conic description of their Choi operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperationClass {
    /// Maximally incoherent: diagonal inputs go to diagonal outputs.
    Mio { din: usize, dout: usize },
    /// Dephasing covariant: commutes with complete dephasing.
    Dio { din: usize, dout: usize },
    /// Bipartite channels `AB → A'B'` whose Choi operator is PPT across `AA' : BB'`.
    Ppt { a: usize, b: usize, a_out: usize, b_out: usize },
}

impl OperationClass {
    pub fn dim_in(&self) -> usize {
        match *self {
            OperationClass::Mio { din, .. } | OperationClass::Dio { din, .. } => din,
            OperationClass::Ppt { a, b, .. } => a * b,
        }
    }

    pub fn dim_out(&self) -> usize {
        match *self {
            OperationClass::Mio { dout, .. } | OperationClass::Dio { dout, .. } => dout,
            OperationClass::Ppt { a_out, b_out, .. } => a_out * b_out,
        }
    }

    /// Constrains `J` to `t·` (Choi operators of the class), i.e. the cone.
    pub fn encode_cone(&self, model: &mut Model, j: &HermExpr, t: &LinExpr) -> Result<()> {
        let (din, dout) = (self.dim_in(), self.dim_out());
        if j.dim() != din * dout {
            return Err(VqrdError::dims(format!("Choi variable of dimension {} for a {din} -> {dout} class", j.dim())));
        }
        model.psd(j);
        model.herm_eq(&j.partial_trace(&[din, dout], &[0])?, &HermExpr::identity_times(t, din));
        let idx = |i: usize, k: usize| i * dout + k;
        match *self {
            OperationClass::Mio { .. } | OperationClass::Dio { .. } => {
                for i in 0..din {
                    for k in 0..dout {
                        for l in k + 1..dout {
                            let (re, im) = j.entry(idx(i, k), idx(i, l));
                            model.eq0(&re);
                            model.eq0(&im);
                        }
                    }
                }
                if matches!(self, OperationClass::Dio { .. }) {
                    for i in 0..din {
                        for jj in i + 1..din {
                            for k in 0..dout {
                                let (re, im) = j.entry(idx(i, k), idx(jj, k));
                                model.eq0(&re);
                                model.eq0(&im);
                            }
                        }
                    }
                }
            }
            OperationClass::Ppt { a, b, a_out, b_out } => {
                model.psd(&j.partial_transpose(&[a, b, a_out, b_out], &[1, 3])?);
            }
        }
        Ok(())
    }
}

/// Result of the witness form of the overhead.
#[derive(Clone, Debug)]
pub struct DualReport {
    /// Optimal `λ₊ + λ₋` of the primal.
    pub primal_value: f64,
    /// `2 Tr(W η̃) − 1` at the returned witness.
    pub dual_value: f64,
    /// The optimal approximate target η̃.
    pub eta: CMat,
    pub w: CMat,
    /// Range of `Tr(W Λ(ρ))` over normalised free Λ, which must lie in [0, 1].
    pub w_range: (f64, f64),
}

impl DualReport {
    pub fn gap(&self) -> f64 {
        (self.primal_value - self.dual_value).abs()
    }
}

fn channel_output(rho: &CMat, j: &HermExpr, din: usize, dout: usize) -> Result<HermExpr> {
    j.link_after(rho, &[din], &[din, dout], &[(0, 0)])
}

/// Optimal overhead through the primal over free Choi operators, then the
/// witness `W` of the dual form, computed at the primal-optimal η̃.
pub fn dual_overhead_value(rho: &DensityMatrix, target: &DensityMatrix, eps: f64, class: OperationClass) -> Result<DualReport> {
    check_eps(eps)?;
    let (din, dout) = (class.dim_in(), class.dim_out());
    if rho.dim() != din || target.dim() != dout {
        return Err(VqrdError::dims(format!("input {} / target {} do not fit a {din} -> {dout} class", rho.dim(), target.dim())));
    }
    let opts = SolveOptions::from_env();

    // primal with the ε-ball around the target
    let mut model = Model::new("virtual_overhead");
    let mut eta = HermExpr::zero(dout);
    let mut cost = LinExpr::constant(0.0);
    for sign in [1.0, -1.0] {
        let j = model.herm_var(din * dout);
        let t = model.nonneg_var();
        class.encode_cone(&mut model, &j, &t)?;
        eta = &eta + &(&channel_output(rho.matrix(), &j, din, dout)? * sign);
        cost = &cost + &t;
    }
    // Tr η̃ = λ₊ − λ₋ = 1.
    model.eq(&eta.trace(), &LinExpr::constant(1.0));
    if eps > 0.0 {
        let p = model.psd_var(dout);
        let n = model.psd_var(dout);
        model.herm_eq(&(&eta - target.matrix()), &(&p - &n));
        model.leq(&(&p.trace() + &n.trace()), &LinExpr::constant(2.0 * eps));
    } else {
        model.herm_eq(&eta, &HermExpr::constant(target.matrix().clone()));
    }
    model.minimize(&cost);
    let sol = model.solve(&opts)?;
    let eta_star = linalg::hermitian_part(&sol.eval_herm(&eta));

    // inner problem at fixed η̃; its equality multiplier is the witness
    let mut inner = Model::new("virtual_overhead_fixed_target");
    let mut out = HermExpr::zero(dout);
    let mut cost = LinExpr::constant(0.0);
    for sign in [1.0, -1.0] {
        let j = inner.herm_var(din * dout);
        let t = inner.nonneg_var();
        class.encode_cone(&mut inner, &j, &t)?;
        out = &out + &(&channel_output(rho.matrix(), &j, din, dout)? * sign);
        cost = &cost + &t;
    }
    let id = inner.herm_eq(&out, &HermExpr::constant(eta_star.clone()));
    inner.minimize(&cost);
    let isol = inner.solve(&opts)?;
    let h = -isol.herm_eq_dual(id).clone();
    let w = (&h + linalg::eye(dout)).scale(0.5);
    let dual_value = 2.0 * linalg::re_trace_prod(&w, &eta_star) - 1.0;

    let w_range = witness_range(rho, &w, class)?;
    Ok(DualReport { primal_value: sol.value, dual_value, eta: eta_star, w, w_range })
}

/// `min` and `max` of `Tr(W Λ(ρ))` over normalised free Λ.
pub fn witness_range(rho: &DensityMatrix, w: &CMat, class: OperationClass) -> Result<(f64, f64)> {
    let (din, dout) = (class.dim_in(), class.dim_out());
    let mut ends = [0.0; 2];
    for (slot, maximize) in [(0, false), (1, true)] {
        let mut model = Model::new("witness_range");
        let j = model.herm_var(din * dout);
        class.encode_cone(&mut model, &j, &LinExpr::constant(1.0))?;
        let val = channel_output(rho.matrix(), &j, din, dout)?.trace_with(w);
        if maximize {
            model.maximize(&val);
        } else {
            model.minimize(&val);
        }
        ends[slot] = model.solve(&SolveOptions::from_env())?.value;
    }
    Ok((ends[0], ends[1]))
}

/// `max{2(1−ε)/f − 1, 1}`.
pub fn overlap_lower_bound(f: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if !(f > 0.0 && f <= 1.0 + 1e-12) {
        return Err(VqrdError::range(format!("overlap f = {f} outside (0, 1]")));
    }
    Ok((2.0 * (1.0 - eps) / f - 1.0).max(1.0))
}

/// A lower bound on C^ε together with the overlap bound it came from.
#[derive(Clone, Copy, Debug)]
pub struct OverlapBound {
    pub bound: f64,
    /// Upper bound on the achievable overlap f_O(ρ, m).
    pub overlap_upper: f64,
}

/// Lower bound through `f ≤ F(ψ^{⊗m})(R^g(ρ)+1)`.
pub fn robustness_lower_bound(rho: &DensityMatrix, f_input: &FreeSetSpec, psi: &DensityMatrix, f_target: &FreeSetSpec, m: usize, eps: f64) -> Result<OverlapBound> {
    let fid = freesets::free_fidelity(&psi.tensor_power(m), f_target)?;
    let rg = freesets::generalized_robustness(rho, f_input)?;
    let overlap_upper = (fid * (rg + 1.0)).min(1.0);
    Ok(OverlapBound { bound: overlap_lower_bound(overlap_upper, eps)?, overlap_upper })
}

/// Lower bound through `f ≤ 1 − (1 − F(ψ^{⊗m})) W(ρ)`.
pub fn weight_lower_bound(rho: &DensityMatrix, f_input: &FreeSetSpec, psi: &DensityMatrix, f_target: &FreeSetSpec, m: usize, eps: f64) -> Result<OverlapBound> {
    let fid = freesets::free_fidelity(&psi.tensor_power(m), f_target)?;
    let w = freesets::weight(rho, f_input)?;
    let overlap_upper = 1.0 - (1.0 - fid) * w;
    Ok(OverlapBound { bound: overlap_lower_bound(overlap_upper, eps)?, overlap_upper })
}

/// Whether a free generalized twirl exists for ψ^{⊗m}, so that the overlap
/// lower bound is exact.
///
/// Checks `1/F = 1 + R^s`; when ψ^{⊗m} has the same overlap with every
/// free state the generalized robustness is used instead, since the
/// equality-constrained programs are then exact as well.
pub fn check_twirling_condition(psi: &DensityMatrix, m: usize, f: &FreeSetSpec) -> Result<bool> {
    let target = psi.tensor_power(m);
    let inv_f = 1.0 / freesets::free_fidelity(&target, f)?;
    let rs = freesets::standard_robustness(&target, f)?;
    if (inv_f - (1.0 + rs)).abs() <= 1e-7 * inv_f {
        return Ok(true);
    }
    if f.has_constant_overlap(target.matrix()) {
        let rg = freesets::generalized_robustness(&target, f)?;
        return Ok((inv_f - (1.0 + rg)).abs() <= 1e-7 * inv_f);
    }
    Ok(false)
}

/// `M(target^{⊗m}) / M(input)` for a virtual monotone M.
pub fn virtual_monotone_bound(m_target: f64, m_input: f64) -> Result<f64> {
    if !(m_input > 0.0) {
        return Err(VqrdError::invalid(format!("input monotone value {m_input} must be positive")));
    }
    Ok(m_target / m_input)
}

/// Measure-and-prepare channels realising an optimal witness pair.
///
/// `Λ±(ω) = Tr(E±ω) P + Tr((I − E±)ω) R` with `E± = Q±/μ±`, `P` the pure
/// target and `R = (I − P)/(D − 1)`. With the free-overlap constraints of the
/// program these maps are free, and the signed mixture outputs
/// `aP + (1 − a)R` with `a = Tr ρ(Q₊ − Q₋) ≥ 1 − ε`. A side with `μ = 0`
/// gets the channel preparing `I/D`.
pub fn measure_prepare_decomposition(sol: &OverheadSolution, target: &DensityMatrix, m: usize) -> Result<QuasiDecomposition> {
    let big_d = target.dim();
    if big_d < 2 {
        return Err(VqrdError::invalid("target must have dimension at least 2"));
    }
    let p = target.matrix();
    let id = linalg::eye(big_d);
    let r = (&id - p) * linalg::cr(1.0 / (big_d as f64 - 1.0));
    let build = |q: &CMat, mu: f64| -> Result<ChoiOperator> {
        let d = q.nrows();
        let j = if mu > 1e-12 {
            // Solver noise can push the effect slightly outside [0, I].
            let e = linalg::spectral_map(&(q * linalg::cr(1.0 / mu)), |v| v.clamp(0.0, 1.0));
            linalg::kron(&e.transpose(), p) + linalg::kron(&(linalg::eye(d) - e).transpose(), &r)
        } else {
            linalg::kron(&linalg::eye(d), &(&id * linalg::cr(1.0 / big_d as f64)))
        };
        ChoiOperator::new(d, big_d, HermitianOperator::hermitian_part_of(&j))
    };
    let plus = build(&sol.q_plus, sol.mu_plus)?;
    let minus = build(&sol.q_minus, sol.mu_minus)?;
    // The solver's μ± satisfy μ₊ − μ₋ = 1 only to its tolerance.
    let mu_minus = sol.mu_minus.max(0.0);
    QuasiDecomposition::new(1.0 + mu_minus, mu_minus, plus, minus, m)
}
