//! Free sets and the conic encodings every overhead program is built from.
//!
//! Three families are supported: diagonal (incoherent) states, PPT states on
//! a bipartition, and the convex hull of a finite list of pure states
//! (stabilizer polytopes).

pub mod stabilizer;

use std::fmt;

use crate::conic::{HermExpr, LinExpr, Model, SolveOptions, SolveStatus};
use crate::error::{Result, VqrdError};
use crate::qcore::linalg::{self, CMat, CVec};
use crate::qcore::{DensityMatrix, HermitianOperator};

#[derive(Clone, Debug)]
pub enum FreeSetKind {
    /// Diagonal states in a fixed basis of the given dimension.
    Diagonal(usize),
    /// States with positive partial transpose on `A ⊗ B`.
    Ppt(usize, usize),
    /// Convex hull of the listed pure states.
    Polytope(Vec<CVec>),
}

#[derive(Clone, Debug)]
pub struct FreeSetSpec {
    kind: FreeSetKind,
    description: String,
}

impl fmt::Display for FreeSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

impl FreeSetSpec {
    pub fn diagonal(d: usize) -> Self {
        Self { kind: FreeSetKind::Diagonal(d), description: format!("incoherent states, d = {d}") }
    }

    pub fn ppt(da: usize, db: usize) -> Self {
        Self { kind: FreeSetKind::Ppt(da, db), description: format!("PPT states on {da}x{db}") }
    }

    /// Convex hull of pure states; vectors are normalised here.
    pub fn polytope(vertices: Vec<CVec>, description: impl Into<String>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(VqrdError::invalid("polytope needs at least one vertex"));
        };
        let d = first.len();
        let mut out = Vec::with_capacity(vertices.len());
        for v in vertices {
            if v.len() != d {
                return Err(VqrdError::dims("polytope vertices of different dimension"));
            }
            let n = v.norm();
            if n < 1e-12 {
                return Err(VqrdError::invalid("zero vector in polytope"));
            }
            out.push(v.unscale(n));
        }
        Ok(Self { kind: FreeSetKind::Polytope(out), description: description.into() })
    }

    pub fn qubit_stabilizer() -> Self {
        Self::polytope(stabilizer::qubit(), "qubit stabilizer states").expect("nonempty")
    }

    pub fn two_qubit_stabilizer() -> Self {
        Self::polytope(stabilizer::two_qubit(), "two-qubit stabilizer states").expect("nonempty")
    }

    pub fn qutrit_stabilizer() -> Self {
        Self::polytope(stabilizer::qutrit(), "qutrit stabilizer states").expect("nonempty")
    }

    pub fn kind(&self) -> &FreeSetKind {
        &self.kind
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Ambient Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        match &self.kind {
            FreeSetKind::Diagonal(d) => *d,
            FreeSetKind::Ppt(a, b) => a * b,
            FreeSetKind::Polytope(v) => v[0].len(),
        }
    }

    fn check_dim(&self, d: usize, what: &str) -> Result<()> {
        if d != self.dim() {
            return Err(VqrdError::dims(format!("{what} has dimension {d}, free set `{}` lives in dimension {}", self.description, self.dim())));
        }
        Ok(())
    }

    pub fn vertices(&self) -> Option<&[CVec]> {
        match &self.kind {
            FreeSetKind::Polytope(v) => Some(v),
            _ => None,
        }
    }

    /// Whether ⟨ψ|σ|ψ⟩ is the same for every free σ.
    pub fn has_constant_overlap(&self, psi: &CMat) -> bool {
        let tol = 1e-9;
        match &self.kind {
            FreeSetKind::Diagonal(_) => {
                let d0 = psi[(0, 0)].re;
                psi.diagonal().iter().all(|v| (v.re - d0).abs() <= tol)
            }
            FreeSetKind::Ppt(..) => {
                let s = linalg::re_trace(psi) / psi.nrows() as f64;
                linalg::max_abs(&(psi - linalg::eye(psi.nrows()).scale(s))) <= tol
            }
            FreeSetKind::Polytope(vs) => {
                let ov: Vec<f64> = vs.iter().map(|v| v.dotc(&(psi * v)).re).collect();
                ov.iter().all(|o| (o - ov[0]).abs() <= tol)
            }
        }
    }

    /// Membership test for a state.
    pub fn contains(&self, rho: &DensityMatrix, tol: f64) -> Result<bool> {
        self.check_dim(rho.dim(), "state")?;
        match &self.kind {
            FreeSetKind::Diagonal(_) => {
                let m = rho.matrix();
                let off = (0..m.nrows()).flat_map(|i| (0..m.ncols()).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].norm()).fold(0.0, f64::max);
                Ok(off <= tol)
            }
            FreeSetKind::Ppt(a, b) => {
                let pt = linalg::partial_transpose(rho.matrix(), &[*a, *b], &[1])?;
                Ok(linalg::min_eigenvalue(&pt) >= -tol)
            }
            FreeSetKind::Polytope(_) => Ok(weight(rho, self)? >= 1.0 - tol.max(1e-7)),
        }
    }
}

/// Adds constraints equivalent to `max_{σ∈F} Tr(Qσ) ≤ c`.
///
/// PPT uses the dual of the PPT maximisation: `R ⪰ 0, cI − Q − R^Γ ⪰ 0`.
pub fn encode_sup_overlap_leq(model: &mut Model, q: &HermExpr, c: &LinExpr, f: &FreeSetSpec) -> Result<()> {
    f.check_dim(q.dim(), "Q")?;
    match &f.kind {
        FreeSetKind::Diagonal(d) => {
            for i in 0..*d {
                let qi = q.entry(i, i).0;
                model.leq(&qi, c);
            }
        }
        FreeSetKind::Polytope(vs) => {
            for v in vs {
                model.leq(&q.trace_with(&linalg::projector(v)), c);
            }
        }
        FreeSetKind::Ppt(a, b) => {
            let d = a * b;
            let r = model.psd_var(d);
            let rg = r.partial_transpose(&[*a, *b], &[1])?;
            let lhs = &(&HermExpr::identity_times(c, d) - q) - &rg;
            model.psd(&lhs);
        }
    }
    Ok(())
}

/// Adds constraints equivalent to `Tr(Qσ) = c` for every free σ.
///
/// PPT states span all Hermitian operators, so there this forces `Q = cI`.
pub fn encode_overlap_eq(model: &mut Model, q: &HermExpr, c: &LinExpr, f: &FreeSetSpec) -> Result<()> {
    f.check_dim(q.dim(), "Q")?;
    match &f.kind {
        FreeSetKind::Diagonal(d) => {
            for i in 0..*d {
                model.eq(&q.entry(i, i).0, c);
            }
        }
        FreeSetKind::Polytope(vs) => {
            for v in vs {
                model.eq(&q.trace_with(&linalg::projector(v)), c);
            }
        }
        FreeSetKind::Ppt(..) => {
            model.herm_eq(q, &HermExpr::identity_times(c, q.dim()));
        }
    }
    Ok(())
}

/// Constrains `S` to the cone generated by the free set.
pub fn encode_cone_membership(model: &mut Model, s: &HermExpr, f: &FreeSetSpec) -> Result<()> {
    f.check_dim(s.dim(), "S")?;
    match &f.kind {
        FreeSetKind::Diagonal(d) => {
            for i in 0..*d {
                model.geq0(&s.entry(i, i).0);
                for j in i + 1..*d {
                    let (re, im) = s.entry(i, j);
                    model.eq0(&re);
                    model.eq0(&im);
                }
            }
        }
        FreeSetKind::Ppt(a, b) => {
            model.psd(s);
            model.psd(&s.partial_transpose(&[*a, *b], &[1])?);
        }
        FreeSetKind::Polytope(vs) => {
            let mut hull = HermExpr::zero(s.dim());
            for v in vs {
                let w = model.nonneg_var();
                hull = &hull + &HermExpr::scaled_matrix(&w, &linalg::projector(v));
            }
            model.herm_eq(s, &hull);
        }
    }
    Ok(())
}

fn opts() -> SolveOptions {
    SolveOptions::from_env()
}

/// `max_{σ∈F} Tr(Qσ)`.
pub fn max_overlap(q: &HermitianOperator, f: &FreeSetSpec) -> Result<f64> {
    f.check_dim(q.dim(), "Q")?;
    let m = q.matrix();
    match &f.kind {
        FreeSetKind::Diagonal(_) => Ok(m.diagonal().iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)),
        FreeSetKind::Polytope(vs) => Ok(vs.iter().map(|v| v.dotc(&(m * v)).re).fold(f64::NEG_INFINITY, f64::max)),
        FreeSetKind::Ppt(..) => {
            let mut model = Model::new("ppt_max_overlap");
            let s = model.herm_var(f.dim());
            encode_cone_membership(&mut model, &s, f)?;
            model.eq(&s.trace(), &LinExpr::constant(1.0));
            model.maximize(&s.trace_with(m));
            Ok(model.solve(&opts())?.value)
        }
    }
}

/// F_F(ψ) = max_{σ∈F} ⟨ψ|σ|ψ⟩ for a pure target.
pub fn free_fidelity(psi: &DensityMatrix, f: &FreeSetSpec) -> Result<f64> {
    if psi.purity() < 1.0 - 1e-9 {
        return Err(VqrdError::invalid("free fidelity is defined here for pure targets"));
    }
    max_overlap(psi.operator(), f)
}

/// R^g_F(ρ) = min{Tr S − 1 : S ∈ cone(F), S ⪰ ρ}.
pub fn generalized_robustness(rho: &DensityMatrix, f: &FreeSetSpec) -> Result<f64> {
    f.check_dim(rho.dim(), "state")?;
    let mut model = Model::new("generalized_robustness");
    let s = model.herm_var(rho.dim());
    encode_cone_membership(&mut model, &s, f)?;
    model.psd(&(&s - rho.matrix()));
    model.minimize(&(&s.trace() - 1.0));
    Ok(model.solve(&opts())?.value.max(0.0))
}

/// R^s_F(ρ) = min{Tr S − 1 : S ∈ cone(F), S − ρ ∈ cone(F)}; +∞ when no
/// free mixture absorbs ρ.
pub fn standard_robustness(rho: &DensityMatrix, f: &FreeSetSpec) -> Result<f64> {
    f.check_dim(rho.dim(), "state")?;
    let mut model = Model::new("standard_robustness");
    let s = model.herm_var(rho.dim());
    encode_cone_membership(&mut model, &s, f)?;
    encode_cone_membership(&mut model, &(&s - rho.matrix()), f)?;
    model.minimize(&(&s.trace() - 1.0));
    let sol = model.solve_raw(&opts());
    match sol.status {
        SolveStatus::Optimal => Ok(sol.value.max(0.0)),
        SolveStatus::Infeasible => Ok(f64::INFINITY),
        status => Err(VqrdError::Solver { program: model.name().to_string(), status }),
    }
}

/// W_F(ρ) = max{Tr S : S ∈ cone(F), ρ − S ⪰ 0}.
pub fn weight(rho: &DensityMatrix, f: &FreeSetSpec) -> Result<f64> {
    f.check_dim(rho.dim(), "state")?;
    let mut model = Model::new("weight");
    let s = model.herm_var(rho.dim());
    encode_cone_membership(&mut model, &s, f)?;
    model.psd(&(&(-&s) + rho.matrix()));
    model.maximize(&s.trace());
    Ok(model.solve(&opts())?.value.clamp(0.0, 1.0))
}

/// ‖X‖_F = min{μ₊ + μ₋ : X = μ₊σ₊ − μ₋σ₋, σ± ∈ F}; +∞ if X is outside span(F).
pub fn base_norm(x: &HermitianOperator, f: &FreeSetSpec) -> Result<f64> {
    f.check_dim(x.dim(), "operator")?;
    let mut model = Model::new("base_norm");
    let p = model.herm_var(x.dim());
    let n = model.herm_var(x.dim());
    encode_cone_membership(&mut model, &p, f)?;
    encode_cone_membership(&mut model, &n, f)?;
    model.herm_eq(&(&p - &n), &HermExpr::constant(x.matrix().clone()));
    model.minimize(&(&p.trace() + &n.trace()));
    let sol = model.solve_raw(&opts());
    match sol.status {
        SolveStatus::Optimal => Ok(sol.value),
        SolveStatus::Infeasible => Ok(f64::INFINITY),
        status => Err(VqrdError::Solver { program: model.name().to_string(), status }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::objects;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn diagonal_overlap_of_plus() {
        let f = FreeSetSpec::diagonal(2);
        let v = max_overlap(objects::plus_state().operator(), &f).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!((free_fidelity(&objects::plus_power(3), &FreeSetSpec::diagonal(8)).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn ppt_overlap_of_bell() {
        let f = FreeSetSpec::ppt(2, 2);
        assert!((free_fidelity(&objects::bell(), &f).unwrap() - 0.5).abs() < 1e-7);
        let f2 = FreeSetSpec::ppt(4, 4);
        assert!((free_fidelity(&objects::bell_power(2), &f2).unwrap() - 0.25).abs() < 1e-7);
    }

    #[test]
    fn stabilizer_fidelity_of_t() {
        let f = FreeSetSpec::qubit_stabilizer();
        let v = free_fidelity(&objects::t_state(), &f).unwrap();
        assert!((v - (1.0 + FRAC_1_SQRT_2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn encoded_sup_overlap_is_tight_for_plus() {
        let f = FreeSetSpec::diagonal(2);
        let mut m = Model::new("sup");
        let c = m.var();
        encode_sup_overlap_leq(&mut m, &HermExpr::constant(objects::plus_state().matrix().clone()), &c, &f).unwrap();
        m.minimize(&c);
        assert!((m.solve(&SolveOptions::default()).unwrap().value - 0.5).abs() < 1e-8);
    }

    #[test]
    fn robustness_and_base_norm_of_bell() {
        let f = FreeSetSpec::ppt(2, 2);
        let rs = standard_robustness(&objects::bell(), &f).unwrap();
        let bn = base_norm(objects::bell().operator(), &f).unwrap();
        assert!((rs - 1.0).abs() < 1e-6, "{rs}");
        assert!((bn - 3.0).abs() < 1e-6, "{bn}");
        assert!((bn - (1.0 + 2.0 * rs)).abs() < 1e-6);
        let rg = generalized_robustness(&objects::bell(), &f).unwrap();
        assert!((rg - 1.0).abs() < 1e-6, "{rg}");
    }

    #[test]
    fn free_states_are_free() {
        let f = FreeSetSpec::ppt(2, 2);
        let sep = DensityMatrix::maximally_mixed(4);
        assert!(generalized_robustness(&sep, &f).unwrap() < 1e-7);
        assert!((weight(&sep, &f).unwrap() - 1.0).abs() < 1e-7);
        let fq = FreeSetSpec::qubit_stabilizer();
        let zero = DensityMatrix::basis(2, 0);
        assert!((weight(&zero, &fq).unwrap() - 1.0).abs() < 1e-7);
        assert!(fq.contains(&zero, 1e-7).unwrap());
        assert!(!fq.contains(&objects::t_state(), 1e-7).unwrap());
    }

    #[test]
    fn standard_robustness_of_plus_is_infinite() {
        let r = standard_robustness(&objects::plus_state(), &FreeSetSpec::diagonal(2)).unwrap();
        assert!(r.is_infinite());
        let g = generalized_robustness(&objects::plus_state(), &FreeSetSpec::diagonal(2)).unwrap();
        assert!((g - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(free_fidelity(&objects::bell(), &FreeSetSpec::diagonal(2)).is_err());
    }
}
