//! A small modelling layer over [`ConicProgram`]: scalar and Hermitian affine
//! expressions, constraints, and solution read-back in the original variables.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::embed::{embed_matrix, unembed_dual};
use super::program::{ConicProgram, LinearRow, PsdBlock};
use super::solver::{solve, ConicSolution, SolveOptions, SolveStatus};
use crate::error::{Result, VqrdError};
use crate::qcore::linalg::{self, CMat};

/// Affine real expression `constant + Σ coeff·x_var`.
#[derive(Clone, Debug, Default)]
pub struct LinExpr {
    pub constant: f64,
    pub terms: BTreeMap<usize, f64>,
}

impl LinExpr {
    pub fn constant(v: f64) -> Self {
        Self { constant: v, terms: BTreeMap::new() }
    }

    pub fn var(j: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(j, 1.0);
        Self { constant: 0.0, terms }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { constant: self.constant * s, terms: self.terms.iter().map(|(&j, &v)| (j, v * s)).collect() }
    }

    fn add_scaled(&mut self, o: &LinExpr, s: f64) {
        self.constant += s * o.constant;
        for (&j, &v) in &o.terms {
            *self.terms.entry(j).or_insert(0.0) += s * v;
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(&j, &v)| v * x[j]).sum::<f64>()
    }
}

impl From<f64> for LinExpr {
    fn from(v: f64) -> Self {
        LinExpr::constant(v)
    }
}

impl Add<&LinExpr> for &LinExpr {
    type Output = LinExpr;
    fn add(self, o: &LinExpr) -> LinExpr {
        let mut r = self.clone();
        r.add_scaled(o, 1.0);
        r
    }
}

impl Sub<&LinExpr> for &LinExpr {
    type Output = LinExpr;
    fn sub(self, o: &LinExpr) -> LinExpr {
        let mut r = self.clone();
        r.add_scaled(o, -1.0);
        r
    }
}

impl Add<f64> for &LinExpr {
    type Output = LinExpr;
    fn add(self, o: f64) -> LinExpr {
        let mut r = self.clone();
        r.constant += o;
        r
    }
}

impl Sub<f64> for &LinExpr {
    type Output = LinExpr;
    fn sub(self, o: f64) -> LinExpr {
        self + (-o)
    }
}

impl Mul<f64> for &LinExpr {
    type Output = LinExpr;
    fn mul(self, s: f64) -> LinExpr {
        self.scale(s)
    }
}

impl Neg for &LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scale(-1.0)
    }
}

/// Affine Hermitian-matrix expression `C + Σ x_j T_j`.
#[derive(Clone, Debug)]
pub struct HermExpr {
    dim: usize,
    pub constant: CMat,
    pub terms: BTreeMap<usize, CMat>,
}

impl HermExpr {
    pub fn constant(c: CMat) -> Self {
        Self { dim: c.nrows(), constant: c, terms: BTreeMap::new() }
    }

    pub fn zero(d: usize) -> Self {
        Self::constant(linalg::zeros(d))
    }

    /// `e · M` for a scalar expression `e` and a fixed matrix `M`.
    pub fn scaled_matrix(e: &LinExpr, m: &CMat) -> Self {
        Self {
            dim: m.nrows(),
            constant: m.scale(e.constant),
            terms: e.terms.iter().map(|(&j, &v)| (j, m.scale(v))).collect(),
        }
    }

    /// `e · I_d`.
    pub fn identity_times(e: &LinExpr, d: usize) -> Self {
        Self::scaled_matrix(e, &linalg::eye(d))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Applies a linear map to the constant and every coefficient matrix.
    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        let constant = f(&self.constant);
        let dim = constant.nrows();
        let terms = self.terms.iter().map(|(&j, m)| (j, f(m))).collect();
        Self { dim, constant, terms }
    }

    pub fn try_map(&self, f: impl Fn(&CMat) -> Result<CMat>) -> Result<Self> {
        let constant = f(&self.constant)?;
        let dim = constant.nrows();
        let mut terms = BTreeMap::new();
        for (&j, m) in &self.terms {
            terms.insert(j, f(m)?);
        }
        Ok(Self { dim, constant, terms })
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|m| m.scale(s))
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        self.try_map(|m| linalg::partial_trace(m, dims, keep))
    }

    pub fn partial_transpose(&self, dims: &[usize], sys: &[usize]) -> Result<Self> {
        self.try_map(|m| linalg::partial_transpose(m, dims, sys))
    }

    pub fn permute_factors(&self, dims: &[usize], perm: &[usize]) -> Result<Self> {
        self.try_map(|m| linalg::permute_factors(m, dims, perm))
    }

    /// `a ⊗ X`
    pub fn kron_left(&self, a: &CMat) -> Self {
        self.map(|m| linalg::kron(a, m))
    }

    /// `X ⊗ a`
    pub fn kron_right(&self, a: &CMat) -> Self {
        self.map(|m| linalg::kron(m, a))
    }

    /// `U X U†`
    pub fn conjugate(&self, u: &CMat) -> Self {
        self.map(|m| u * m * u.adjoint())
    }

    /// Link product with a fixed operator `b`; see [`linalg::link`].
    pub fn link_with(&self, a_dims: &[usize], b: &CMat, b_dims: &[usize], pairs: &[(usize, usize)]) -> Result<Self> {
        self.try_map(|m| linalg::link(m, a_dims, b, b_dims, pairs).map(|r| r.0))
    }

    /// Link product with a fixed operator `a` placed first.
    pub fn link_after(&self, a: &CMat, a_dims: &[usize], self_dims: &[usize], pairs: &[(usize, usize)]) -> Result<Self> {
        self.try_map(|m| linalg::link(a, a_dims, m, self_dims, pairs).map(|r| r.0))
    }

    /// `Re Tr(M X)`.
    pub fn trace_with(&self, m: &CMat) -> LinExpr {
        LinExpr {
            constant: linalg::re_trace_prod(m, &self.constant),
            terms: self.terms.iter().map(|(&j, t)| (j, linalg::re_trace_prod(m, t))).collect(),
        }
    }

    pub fn trace(&self) -> LinExpr {
        LinExpr {
            constant: linalg::re_trace(&self.constant),
            terms: self.terms.iter().map(|(&j, t)| (j, linalg::re_trace(t))).collect(),
        }
    }

    /// Real and imaginary parts of entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> (LinExpr, LinExpr) {
        let re = LinExpr { constant: self.constant[(i, j)].re, terms: self.terms.iter().map(|(&k, t)| (k, t[(i, j)].re)).collect() };
        let im = LinExpr { constant: self.constant[(i, j)].im, terms: self.terms.iter().map(|(&k, t)| (k, t[(i, j)].im)).collect() };
        (re, im)
    }

    pub fn eval(&self, x: &[f64]) -> CMat {
        let mut out = self.constant.clone();
        for (&j, t) in &self.terms {
            out += t.scale(x[j]);
        }
        out
    }

    fn combine(&self, o: &HermExpr, s: f64) -> Self {
        assert_eq!(self.dim, o.dim, "Hermitian expressions of different dimension");
        let mut r = self.clone();
        r.constant += o.constant.scale(s);
        for (&j, t) in &o.terms {
            match r.terms.get_mut(&j) {
                Some(m) => *m += t.scale(s),
                None => {
                    r.terms.insert(j, t.scale(s));
                }
            }
        }
        r
    }

    fn is_real(&self) -> bool {
        self.constant.iter().all(|v| v.im == 0.0) && self.terms.values().all(|t| t.iter().all(|v| v.im == 0.0))
    }
}

impl Add<&HermExpr> for &HermExpr {
    type Output = HermExpr;
    fn add(self, o: &HermExpr) -> HermExpr {
        self.combine(o, 1.0)
    }
}

impl Sub<&HermExpr> for &HermExpr {
    type Output = HermExpr;
    fn sub(self, o: &HermExpr) -> HermExpr {
        self.combine(o, -1.0)
    }
}

impl Add<&CMat> for &HermExpr {
    type Output = HermExpr;
    fn add(self, o: &CMat) -> HermExpr {
        let mut r = self.clone();
        r.constant += o;
        r
    }
}

impl Sub<&CMat> for &HermExpr {
    type Output = HermExpr;
    fn sub(self, o: &CMat) -> HermExpr {
        let mut r = self.clone();
        r.constant -= o;
        r
    }
}

impl Mul<f64> for &HermExpr {
    type Output = HermExpr;
    fn mul(self, s: f64) -> HermExpr {
        self.scale(s)
    }
}

impl Neg for &HermExpr {
    type Output = HermExpr;
    fn neg(self) -> HermExpr {
        self.scale(-1.0)
    }
}

/// Handles to constraints, for reading back their multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EqId(usize);
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IneqId(usize);
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LmiId(usize);
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HermEqId(usize);

#[derive(Clone, Debug)]
pub struct Model {
    name: String,
    nvars: usize,
    objective: LinExpr,
    maximize: bool,
    eqs: Vec<LinExpr>,
    ineqs: Vec<LinExpr>,
    lmis: Vec<HermExpr>,
    herm_eqs: Vec<HermExpr>,
}

/// Solution in model terms. Multipliers follow the minimisation form
/// (for a maximisation the objective is negated internally) with the
/// Lagrangian `obj + Σ y·(eq) − Σ z·(ineq) − Σ Tr(Z·lmi)`.
#[derive(Clone, Debug)]
pub struct ModelSolution {
    pub status: SolveStatus,
    pub value: f64,
    pub x: Vec<f64>,
    pub eq_duals: Vec<f64>,
    pub ineq_duals: Vec<f64>,
    pub lmi_duals: Vec<CMat>,
    pub herm_eq_duals: Vec<CMat>,
    pub gap: f64,
    pub iterations: usize,
}

impl ModelSolution {
    pub fn eval(&self, e: &LinExpr) -> f64 {
        e.eval(&self.x)
    }

    pub fn eval_herm(&self, e: &HermExpr) -> CMat {
        linalg::hermitian_part(&e.eval(&self.x))
    }

    pub fn eq_dual(&self, id: EqId) -> f64 {
        self.eq_duals[id.0]
    }

    pub fn ineq_dual(&self, id: IneqId) -> f64 {
        self.ineq_duals[id.0]
    }

    pub fn lmi_dual(&self, id: LmiId) -> &CMat {
        &self.lmi_duals[id.0]
    }

    pub fn herm_eq_dual(&self, id: HermEqId) -> &CMat {
        &self.herm_eq_duals[id.0]
    }
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), nvars: 0, objective: LinExpr::default(), maximize: false, eqs: Vec::new(), ineqs: Vec::new(), lmis: Vec::new(), herm_eqs: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn var(&mut self) -> LinExpr {
        self.nvars += 1;
        LinExpr::var(self.nvars - 1)
    }

    pub fn nonneg_var(&mut self) -> LinExpr {
        let v = self.var();
        self.geq0(&v);
        v
    }

    /// Free Hermitian d×d matrix, parametrised by d² real scalars.
    pub fn herm_var(&mut self, d: usize) -> HermExpr {
        let mut terms = BTreeMap::new();
        for i in 0..d {
            for j in i..d {
                if i == j {
                    let mut m = linalg::zeros(d);
                    m[(i, i)] = linalg::ONE;
                    terms.insert(self.nvars, m);
                    self.nvars += 1;
                } else {
                    let mut re = linalg::zeros(d);
                    re[(i, j)] = linalg::ONE;
                    re[(j, i)] = linalg::ONE;
                    terms.insert(self.nvars, re);
                    self.nvars += 1;
                    let mut im = linalg::zeros(d);
                    im[(i, j)] = linalg::I;
                    im[(j, i)] = -linalg::I;
                    terms.insert(self.nvars, im);
                    self.nvars += 1;
                }
            }
        }
        HermExpr { dim: d, constant: linalg::zeros(d), terms }
    }

    /// Real symmetric d×d matrix variable (d(d+1)/2 scalars).
    pub fn sym_var(&mut self, d: usize) -> HermExpr {
        let mut terms = BTreeMap::new();
        for i in 0..d {
            for j in i..d {
                let mut m = linalg::zeros(d);
                m[(i, j)] = linalg::ONE;
                m[(j, i)] = linalg::ONE;
                terms.insert(self.nvars, m);
                self.nvars += 1;
            }
        }
        HermExpr { dim: d, constant: linalg::zeros(d), terms }
    }

    pub fn psd_var(&mut self, d: usize) -> HermExpr {
        let x = self.herm_var(d);
        self.psd(&x);
        x
    }

    /// `e = 0`
    pub fn eq0(&mut self, e: &LinExpr) -> EqId {
        self.eqs.push(e.clone());
        EqId(self.eqs.len() - 1)
    }

    pub fn eq(&mut self, a: &LinExpr, b: &LinExpr) -> EqId {
        self.eq0(&(a - b))
    }

    /// `e ≥ 0`
    pub fn geq0(&mut self, e: &LinExpr) -> IneqId {
        self.ineqs.push(e.clone());
        IneqId(self.ineqs.len() - 1)
    }

    /// `a ≤ b`
    pub fn leq(&mut self, a: &LinExpr, b: &LinExpr) -> IneqId {
        self.geq0(&(b - a))
    }

    /// `e ⪰ 0`
    pub fn psd(&mut self, e: &HermExpr) -> LmiId {
        self.lmis.push(e.clone());
        LmiId(self.lmis.len() - 1)
    }

    /// `a ⪯ b`
    pub fn loewner_leq(&mut self, a: &HermExpr, b: &HermExpr) -> LmiId {
        self.psd(&(b - a))
    }

    /// `e = 0` as a Hermitian matrix identity.
    pub fn herm_eq0(&mut self, e: &HermExpr) -> HermEqId {
        self.herm_eqs.push(e.clone());
        HermEqId(self.herm_eqs.len() - 1)
    }

    pub fn herm_eq(&mut self, a: &HermExpr, b: &HermExpr) -> HermEqId {
        self.herm_eq0(&(a - b))
    }

    pub fn minimize(&mut self, e: &LinExpr) {
        self.objective = e.clone();
        self.maximize = false;
    }

    pub fn maximize(&mut self, e: &LinExpr) {
        self.objective = e.clone();
        self.maximize = true;
    }

    /// Lowers the model to solver standard form.
    pub fn program(&self) -> ConicProgram {
        let n = self.nvars;
        let mut p = ConicProgram::new(self.name.clone(), n);
        let sign = if self.maximize { -1.0 } else { 1.0 };
        for (&j, &v) in &self.objective.terms {
            p.c[j] += sign * v;
        }

        let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
        for e in &self.eqs {
            rows.push((e.terms.iter().map(|(&j, &v)| (j, v)).collect(), -e.constant));
        }
        for he in &self.herm_eqs {
            let d = he.dim;
            for i in 0..d {
                for j in i..d {
                    let (re, im) = he.entry(i, j);
                    rows.push((re.terms.into_iter().filter(|t| t.1 != 0.0).collect(), -re.constant));
                    if i != j {
                        rows.push((im.terms.into_iter().filter(|t| t.1 != 0.0).collect(), -im.constant));
                    }
                }
            }
        }
        let mut a = DMatrix::zeros(rows.len(), n);
        for (i, (coeffs, rhs)) in rows.iter().enumerate() {
            for &(j, v) in coeffs {
                a[(i, j)] += v;
            }
            p.b.push(*rhs);
        }
        p.a = a;

        for e in &self.ineqs {
            p.linear.push(LinearRow { coeffs: e.terms.iter().filter(|t| *t.1 != 0.0).map(|(&j, &v)| (j, -v)).collect(), h: e.constant });
        }

        for lmi in &self.lmis {
            let real = lmi.is_real();
            let lower = |m: &CMat| -> DMatrix<f64> {
                if real {
                    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)].re)
                } else {
                    embed_matrix(m)
                }
            };
            let h = lower(&linalg::hermitian_part(&lmi.constant));
            let dim = h.nrows();
            let mut cols = Vec::new();
            for (&j, t) in &lmi.terms {
                let g = lower(&linalg::hermitian_part(t));
                let entries: Vec<(usize, usize, f64)> = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).filter_map(|(r, c)| (g[(r, c)] != 0.0).then(|| (r, c, -g[(r, c)]))).collect();
                if !entries.is_empty() {
                    cols.push((j, entries));
                }
            }
            p.psd.push(PsdBlock { dim, h, cols });
        }
        p
    }

    /// Solves and reads back the solution whatever the status.
    pub fn solve_raw(&self, opts: &SolveOptions) -> ModelSolution {
        let p = self.program();
        super::program::record(&p);
        let sol = solve(&p, opts);
        self.read_back(&sol)
    }

    /// Solves, mapping any non-optimal status to [`VqrdError::Solver`].
    pub fn solve(&self, opts: &SolveOptions) -> Result<ModelSolution> {
        let s = self.solve_raw(opts);
        if s.status != SolveStatus::Optimal {
            return Err(VqrdError::Solver { program: self.name.clone(), status: s.status });
        }
        Ok(s)
    }

    fn read_back(&self, sol: &ConicSolution) -> ModelSolution {
        let value = self.objective.eval(&sol.x);
        let eq_duals = sol.y[..self.eqs.len()].to_vec();
        let mut k = self.eqs.len();
        let mut herm_eq_duals = Vec::new();
        for he in &self.herm_eqs {
            let d = he.dim;
            let mut h = linalg::zeros(d);
            for i in 0..d {
                for j in i..d {
                    if i == j {
                        h[(i, i)] = Complex64::new(sol.y[k], 0.0);
                        k += 1;
                    } else {
                        let v = Complex64::new(sol.y[k] / 2.0, sol.y[k + 1] / 2.0);
                        h[(i, j)] = v;
                        h[(j, i)] = v.conj();
                        k += 2;
                    }
                }
            }
            herm_eq_duals.push(h);
        }
        let lmi_duals = self
            .lmis
            .iter()
            .zip(&sol.z_psd)
            .map(|(lmi, z)| if z.nrows() == lmi.dim { z.map(|v| Complex64::new(v, 0.0)) } else { unembed_dual(z) })
            .collect();
        ModelSolution {
            status: sol.status,
            value,
            x: sol.x.clone(),
            eq_duals,
            ineq_duals: sol.z_linear.clone(),
            lmi_duals,
            herm_eq_duals,
            gap: sol.gap,
            iterations: sol.iterations,
        }
    }
}
