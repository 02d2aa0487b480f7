use std::fmt;

use crate::error::{Result, VqrdError};

use super::linalg::{self, CMat, CVec};

/// A square complex matrix equal to its adjoint up to `herm_tol`.
///
/// The stored matrix is the exact Hermitian part of the input.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMat,
    herm_tol: f64,
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianOperator(dim={}) {}", self.dim(), self.mat)
    }
}

impl HermitianOperator {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(mat: CMat) -> Result<Self> {
        Self::with_tolerance(mat, Self::DEFAULT_TOL)
    }

    pub fn with_tolerance(mat: CMat, herm_tol: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(VqrdError::dims(format!("operator must be square and nonempty, got {}x{}", mat.nrows(), mat.ncols())));
        }
        let defect = linalg::hermiticity_defect(&mat);
        if !(defect <= herm_tol) {
            return Err(VqrdError::invalid(format!("operator is not Hermitian (defect {defect:.3e} > {herm_tol:.1e})")));
        }
        Ok(Self { mat: linalg::hermitian_part(&mat), herm_tol })
    }

    /// Takes the Hermitian part of `mat` without checking how far it was from Hermitian.
    pub fn hermitian_part_of(mat: &CMat) -> Self {
        Self { mat: linalg::hermitian_part(mat), herm_tol: Self::DEFAULT_TOL }
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(VqrdError::dims(format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        Self::new(linalg::from_real(dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: linalg::eye(dim), herm_tol: Self::DEFAULT_TOL }
    }

    pub fn zero(dim: usize) -> Self {
        Self { mat: linalg::zeros(dim), herm_tol: Self::DEFAULT_TOL }
    }

    pub fn projector(v: &CVec) -> Self {
        Self::hermitian_part_of(&linalg::projector(v))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn herm_tol(&self) -> f64 {
        self.herm_tol
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        linalg::re_trace(&self.mat)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigenvalues(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.mat)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        linalg::max_eigenvalue(&self.mat)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm(&self.mat)
    }

    /// Re Tr(self · other).
    pub fn overlap(&self, other: &HermitianOperator) -> f64 {
        linalg::re_trace_prod(&self.mat, &other.mat)
    }

    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        Self { mat: linalg::kron(&self.mat, &other.mat), herm_tol: self.herm_tol }
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        Self { mat: self.mat.scale(s), herm_tol: self.herm_tol }
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        Self { mat: &self.mat + &other.mat, herm_tol: self.herm_tol }
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        Self { mat: &self.mat - &other.mat, herm_tol: self.herm_tol }
    }

    /// U X U†
    pub fn conjugate(&self, u: &CMat) -> HermitianOperator {
        Self::hermitian_part_of(&(u * &self.mat * u.adjoint()))
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<HermitianOperator> {
        Ok(Self::hermitian_part_of(&linalg::partial_trace(&self.mat, dims, keep)?))
    }

    pub fn partial_transpose(&self, dims: &[usize], sys: &[usize]) -> Result<HermitianOperator> {
        Ok(Self::hermitian_part_of(&linalg::partial_transpose(&self.mat, dims, sys)?))
    }

    /// Maximum elementwise distance to `other`.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        linalg::max_abs(&(&self.mat - &other.mat))
    }
}

/// Which side of a bipartition an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Partial transpose of a bipartite operator on the chosen side.
pub fn partial_transpose(x: &HermitianOperator, dims: (usize, usize), side: Side) -> Result<HermitianOperator> {
    let sys = match side {
        Side::Left => 0,
        Side::Right => 1,
    };
    x.partial_transpose(&[dims.0, dims.1], &[sys])
}

pub fn partial_trace(x: &HermitianOperator, dims: &[usize], keep: &[usize]) -> Result<HermitianOperator> {
    x.partial_trace(dims, keep)
}

pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    a.kron(b)
}

pub fn trace_norm(x: &HermitianOperator) -> f64 {
    x.trace_norm()
}

/// Uhlmann fidelity; for a pure argument this is the overlap ⟨ψ|σ|ψ⟩.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(VqrdError::dims(format!("fidelity between dims {} and {}", rho.dim(), sigma.dim())));
    }
    Ok(linalg::fidelity(rho.matrix(), sigma.matrix()))
}

/// A unit-trace positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-9;
    pub const PSD_TOL: f64 = 1e-9;

    pub fn new(mat: CMat) -> Result<Self> {
        Self::from_operator(HermitianOperator::new(mat)?)
    }

    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        let t = op.trace();
        if (t - 1.0).abs() > Self::TRACE_TOL {
            return Err(VqrdError::invalid(format!("density matrix has trace {t}")));
        }
        let lo = op.min_eigenvalue();
        if lo < -Self::PSD_TOL {
            return Err(VqrdError::invalid(format!("density matrix has eigenvalue {lo:.3e}")));
        }
        Ok(Self { op })
    }

    /// Normalised projector onto `v`.
    pub fn pure(v: &CVec) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) {
            return Err(VqrdError::invalid("zero state vector"));
        }
        Ok(Self { op: HermitianOperator::projector(&v.unscale(n)) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { op: HermitianOperator::identity(dim).scale(1.0 / dim as f64) }
    }

    /// Computational basis state |k⟩⟨k|.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = linalg::zeros(dim);
        m[(k, k)] = linalg::ONE;
        Self { op: HermitianOperator::hermitian_part_of(&m) }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn purity(&self) -> f64 {
        linalg::re_trace_prod(self.matrix(), self.matrix())
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self { op: self.op.kron(&other.op) }
    }

    pub fn tensor_power(&self, m: usize) -> DensityMatrix {
        let mut out = self.clone();
        for _ in 1..m {
            out = out.kron(self);
        }
        out
    }

    pub fn conjugate(&self, u: &CMat) -> DensityMatrix {
        Self { op: self.op.conjugate(u) }
    }

    /// Convex mixture `(1-t)·self + t·other`.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        Self::from_operator(self.op.scale(1.0 - t).add(&other.op.scale(t)))
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        Ok(Self { op: self.op.partial_trace(dims, keep)? })
    }
}

/// A linear map stored as its unnormalised Choi operator
/// `J = Σ_ij |i⟩⟨j| ⊗ 𝓔(|i⟩⟨j|)`, input factor first.
///
/// Hermitian-preserving maps that are not CP (inverse maps, differences of
/// channels) are representable; use [`ChoiOperator::is_channel`] to check.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiOperator {
    dim_in: usize,
    dim_out: usize,
    mat: HermitianOperator,
}

impl ChoiOperator {
    pub const CP_TOL: f64 = 1e-9;
    pub const TP_TOL: f64 = 1e-9;

    pub fn new(dim_in: usize, dim_out: usize, mat: HermitianOperator) -> Result<Self> {
        if mat.dim() != dim_in * dim_out {
            return Err(VqrdError::dims(format!("Choi of a {dim_in}->{dim_out} map must be {0}x{0}, got {1}", dim_in * dim_out, mat.dim())));
        }
        Ok(Self { dim_in, dim_out, mat })
    }

    pub(crate) fn from_matrix(dim_in: usize, dim_out: usize, mat: &CMat) -> Self {
        Self { dim_in, dim_out, mat: HermitianOperator::hermitian_part_of(mat) }
    }

    /// Checks CP and TP.
    pub fn channel(dim_in: usize, dim_out: usize, mat: HermitianOperator) -> Result<Self> {
        let c = Self::new(dim_in, dim_out, mat)?;
        if !c.is_cp(Self::CP_TOL) {
            return Err(VqrdError::invalid("Choi operator is not positive semidefinite"));
        }
        if !c.is_tp(Self::TP_TOL) {
            return Err(VqrdError::invalid("Choi operator is not trace preserving"));
        }
        Ok(c)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_unitary(&linalg::eye(d))
    }

    pub fn from_unitary(u: &CMat) -> Self {
        Self::from_kraus(std::slice::from_ref(u))
    }

    pub fn from_kraus(kraus: &[CMat]) -> Self {
        let (dout, din) = (kraus[0].nrows(), kraus[0].ncols());
        let mut j = linalg::zeros(din * dout);
        for k in kraus {
            let v = linalg::choi_vec(k);
            j += &v * v.adjoint();
        }
        Self::from_matrix(din, dout, &j)
    }

    /// Builds the Choi operator of `X ↦ map(X)` by evaluating it on matrix units.
    pub fn from_fn(dim_in: usize, dim_out: usize, map: impl Fn(&CMat) -> CMat) -> Self {
        let mut j = linalg::zeros(dim_in * dim_out);
        for i in 0..dim_in {
            for k in 0..dim_in {
                let mut e = CMat::zeros(dim_in, dim_in);
                e[(i, k)] = linalg::ONE;
                let out = map(&e);
                for a in 0..dim_out {
                    for b in 0..dim_out {
                        j[(i * dim_out + a, k * dim_out + b)] = out[(a, b)];
                    }
                }
            }
        }
        Self::from_matrix(dim_in, dim_out, &j)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.mat
    }

    pub fn matrix(&self) -> &CMat {
        self.mat.matrix()
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.mat.is_psd(tol)
    }

    /// Largest elementwise deviation of Tr_out J from the identity.
    pub fn tp_defect(&self) -> f64 {
        let r = linalg::partial_trace(self.matrix(), &[self.dim_in, self.dim_out], &[0]).expect("dims checked at construction");
        linalg::max_abs(&(r - linalg::eye(self.dim_in)))
    }

    pub fn is_tp(&self, tol: f64) -> bool {
        self.tp_defect() <= tol
    }

    pub fn is_channel(&self) -> bool {
        self.is_cp(Self::CP_TOL) && self.is_tp(Self::TP_TOL)
    }

    /// 𝓔(X) = Tr_in[(Xᵀ ⊗ I) J].
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.dim_in || x.ncols() != self.dim_in {
            return Err(VqrdError::dims(format!("map expects {0}x{0} input, got {1}x{2}", self.dim_in, x.nrows(), x.ncols())));
        }
        let (din, dout) = (self.dim_in, self.dim_out);
        let j = self.matrix();
        let mut out = CMat::zeros(dout, dout);
        for i in 0..din {
            for k in 0..din {
                let xv = x[(i, k)];
                if xv == linalg::ZERO {
                    continue;
                }
                for a in 0..dout {
                    for b in 0..dout {
                        out[(a, b)] += xv * j[(i * dout + a, k * dout + b)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply_operator(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        Ok(HermitianOperator::hermitian_part_of(&self.apply(x.matrix())?))
    }

    /// Output state of the channel; errors when the output is not a state.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_operator(self.apply_operator(rho.operator())?)
    }

    /// Heisenberg picture 𝓔†(W), so that Tr(W 𝓔(X)) = Tr(𝓔†(W) X).
    pub fn apply_adjoint(&self, w: &CMat) -> Result<CMat> {
        if w.nrows() != self.dim_out {
            return Err(VqrdError::dims(format!("adjoint map expects {0}x{0} input", self.dim_out)));
        }
        let (din, dout) = (self.dim_in, self.dim_out);
        let j = self.matrix();
        let mut out = CMat::zeros(din, din);
        for i in 0..din {
            for k in 0..din {
                let mut s = linalg::ZERO;
                for a in 0..dout {
                    for b in 0..dout {
                        s += j[(i * dout + a, k * dout + b)] * w[(b, a)];
                    }
                }
                out[(k, i)] = s;
            }
        }
        Ok(out)
    }

    /// Transfer matrix `S` acting on row-major vectorised operators:
    /// vec(𝓔(X)) = S vec(X).
    pub fn superoperator(&self) -> CMat {
        let (din, dout) = (self.dim_in, self.dim_out);
        let j = self.matrix();
        let mut s = CMat::zeros(dout * dout, din * din);
        for i in 0..din {
            for k in 0..din {
                for a in 0..dout {
                    for b in 0..dout {
                        s[(a * dout + b, i * din + k)] = j[(i * dout + a, k * dout + b)];
                    }
                }
            }
        }
        s
    }

    pub fn from_superoperator(s: &CMat, dim_in: usize, dim_out: usize) -> Result<Self> {
        if s.nrows() != dim_out * dim_out || s.ncols() != dim_in * dim_in {
            return Err(VqrdError::dims("transfer matrix shape does not match dimensions"));
        }
        let mut j = linalg::zeros(dim_in * dim_out);
        for i in 0..dim_in {
            for k in 0..dim_in {
                for a in 0..dim_out {
                    for b in 0..dim_out {
                        j[(i * dim_out + a, k * dim_out + b)] = s[(a * dim_out + b, i * dim_in + k)];
                    }
                }
            }
        }
        let mat = HermitianOperator::with_tolerance(j, 1e-8)?;
        Self::new(dim_in, dim_out, mat)
    }

    /// `then ∘ self` via the link product.
    pub fn then(&self, then: &ChoiOperator) -> Result<ChoiOperator> {
        if self.dim_out != then.dim_in {
            return Err(VqrdError::dims(format!("cannot compose {}->{} with {}->{}", self.dim_in, self.dim_out, then.dim_in, then.dim_out)));
        }
        let (m, _) = linalg::link(self.matrix(), &[self.dim_in, self.dim_out], then.matrix(), &[then.dim_in, then.dim_out], &[(1, 0)])?;
        Ok(Self::from_matrix(self.dim_in, then.dim_out, &m))
    }

    /// Parallel composition 𝓔 ⊗ 𝓕 with inputs (and outputs) ordered self first.
    pub fn tensor(&self, other: &ChoiOperator) -> ChoiOperator {
        let big = linalg::kron(self.matrix(), other.matrix());
        let dims = [self.dim_in, self.dim_out, other.dim_in, other.dim_out];
        let m = linalg::permute_factors(&big, &dims, &[0, 2, 1, 3]).expect("consistent dims");
        Self::from_matrix(self.dim_in * other.dim_in, self.dim_out * other.dim_out, &m)
    }

    pub fn scale(&self, s: f64) -> ChoiOperator {
        Self { dim_in: self.dim_in, dim_out: self.dim_out, mat: self.mat.scale(s) }
    }

    pub fn sub(&self, other: &ChoiOperator) -> Result<ChoiOperator> {
        self.check_same_shape(other)?;
        Ok(Self { dim_in: self.dim_in, dim_out: self.dim_out, mat: self.mat.sub(&other.mat) })
    }

    pub fn add(&self, other: &ChoiOperator) -> Result<ChoiOperator> {
        self.check_same_shape(other)?;
        Ok(Self { dim_in: self.dim_in, dim_out: self.dim_out, mat: self.mat.add(&other.mat) })
    }

    pub(crate) fn check_same_shape(&self, other: &ChoiOperator) -> Result<()> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(VqrdError::dims(format!("maps {}->{} and {}->{} differ in shape", self.dim_in, self.dim_out, other.dim_in, other.dim_out)));
        }
        Ok(())
    }
}

/// Applies a channel to a state.
pub fn apply_channel(e: &ChoiOperator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    e.apply_state(rho)
}

/// Choi operator of a multi-step process.
///
/// Tensor factors are ordered `in_1, out_1, in_2, out_2, …` with the
/// dimensions listed in `wires`.
#[derive(Clone, Debug, PartialEq)]
pub struct CombChoi {
    wires: Vec<(usize, usize)>,
    mat: HermitianOperator,
}

impl CombChoi {
    pub const CAUSAL_TOL: f64 = 1e-8;

    pub fn new(wires: Vec<(usize, usize)>, mat: HermitianOperator) -> Result<Self> {
        if wires.is_empty() {
            return Err(VqrdError::invalid("a comb needs at least one step"));
        }
        let n: usize = wires.iter().map(|(a, b)| a * b).product();
        if n != mat.dim() {
            return Err(VqrdError::dims(format!("wires {wires:?} need dimension {n}, got {}", mat.dim())));
        }
        Ok(Self { wires, mat })
    }

    pub fn from_channel(c: &ChoiOperator) -> Self {
        Self { wires: vec![(c.dim_in(), c.dim_out())], mat: c.operator().clone() }
    }

    pub fn steps(&self) -> usize {
        self.wires.len()
    }

    pub fn wires(&self) -> &[(usize, usize)] {
        &self.wires
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.wires.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.mat
    }

    pub fn matrix(&self) -> &CMat {
        self.mat.matrix()
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.mat.is_psd(tol)
    }

    /// Largest elementwise violation of the recursive causality conditions.
    pub fn causality_defect(&self) -> f64 {
        let mut cur = self.matrix().clone();
        let mut dims = self.factor_dims();
        let mut worst = 0.0_f64;
        while !dims.is_empty() {
            let n = dims.len();
            let din = dims[n - 2];
            let keep: Vec<usize> = (0..n - 1).collect();
            let traced_out = linalg::partial_trace(&cur, &dims, &keep).expect("dims consistent");
            let prev = if n == 2 {
                CMat::from_element(1, 1, linalg::cr(linalg::re_trace(&traced_out) / din as f64))
            } else {
                let keep_prev: Vec<usize> = (0..n - 2).collect();
                linalg::partial_trace(&traced_out, &dims[..n - 1], &keep_prev).expect("dims consistent").unscale(din as f64)
            };
            let rebuilt = linalg::kron(&prev, &linalg::eye(din));
            worst = worst.max(linalg::max_abs(&(traced_out - rebuilt)));
            cur = prev;
            dims.truncate(n - 2);
        }
        let tail = (cur[(0, 0)] - linalg::ONE).norm();
        worst.max(tail)
    }

    pub fn is_causal(&self, tol: f64) -> bool {
        self.causality_defect() <= tol
    }

    /// The comb viewed as a single map from all inputs to all outputs.
    pub fn as_channel(&self) -> ChoiOperator {
        let dims = self.factor_dims();
        let l = self.wires.len();
        let perm: Vec<usize> = (0..l).map(|k| 2 * k).chain((0..l).map(|k| 2 * k + 1)).collect();
        let m = linalg::permute_factors(self.matrix(), &dims, &perm).expect("dims consistent");
        let din = self.wires.iter().map(|w| w.0).product();
        let dout = self.wires.iter().map(|w| w.1).product();
        ChoiOperator::from_matrix(din, dout, &m)
    }

    pub fn max_abs_diff(&self, other: &CombChoi) -> Result<f64> {
        if self.wires != other.wires {
            return Err(VqrdError::dims("combs have different wire signatures"));
        }
        Ok(self.mat.max_abs_diff(&other.mat))
    }
}

/// Anything with a Choi matrix over an ordered list of tensor factors.
pub trait Linkable {
    fn factor_dims(&self) -> Vec<usize>;
    fn choi_matrix(&self) -> &CMat;
}

impl Linkable for ChoiOperator {
    fn factor_dims(&self) -> Vec<usize> {
        vec![self.dim_in, self.dim_out]
    }

    fn choi_matrix(&self) -> &CMat {
        self.matrix()
    }
}

impl Linkable for CombChoi {
    fn factor_dims(&self) -> Vec<usize> {
        CombChoi::factor_dims(self)
    }

    fn choi_matrix(&self) -> &CMat {
        self.matrix()
    }
}

/// Result of a link product: the free factors of `a` followed by those of
/// `b`, each in its original order.
#[derive(Clone, Debug)]
pub struct Linked {
    pub matrix: CMat,
    pub dims: Vec<usize>,
}

impl Linkable for Linked {
    fn factor_dims(&self) -> Vec<usize> {
        self.dims.clone()
    }

    fn choi_matrix(&self) -> &CMat {
        &self.matrix
    }
}

impl Linked {
    /// Reorders factors so that `order[k]` becomes factor `k`.
    pub fn permute(&self, order: &[usize]) -> Result<Linked> {
        let matrix = linalg::permute_factors(&self.matrix, &self.dims, order)?;
        Ok(Linked { matrix, dims: order.iter().map(|&k| self.dims[k]).collect() })
    }

    /// Groups the listed factors into one input and one output system.
    pub fn into_channel(self, inputs: &[usize], outputs: &[usize]) -> Result<ChoiOperator> {
        let order: Vec<usize> = inputs.iter().chain(outputs).copied().collect();
        check_cover(&order, self.dims.len())?;
        let p = self.permute(&order)?;
        let din = inputs.iter().map(|&k| self.dims[k]).product();
        let dout = outputs.iter().map(|&k| self.dims[k]).product();
        ChoiOperator::new(din, dout, HermitianOperator::hermitian_part_of(&p.matrix))
    }

    /// Groups factors into comb wires; `steps[j] = (inputs, outputs)`.
    pub fn into_comb(self, steps: &[(Vec<usize>, Vec<usize>)]) -> Result<CombChoi> {
        let order: Vec<usize> = steps.iter().flat_map(|(i, o)| i.iter().chain(o)).copied().collect();
        check_cover(&order, self.dims.len())?;
        let p = self.permute(&order)?;
        let size = |ks: &Vec<usize>| ks.iter().map(|&k| self.dims[k]).product::<usize>();
        let wires = steps.iter().map(|(i, o)| (size(i), size(o))).collect();
        CombChoi::new(wires, HermitianOperator::hermitian_part_of(&p.matrix))
    }
}

fn check_cover(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &k in order {
        if k >= n || std::mem::replace(&mut seen[k], true) {
            return Err(VqrdError::dims(format!("factor list {order:?} is not a permutation of 0..{n}")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(VqrdError::dims(format!("factor list {order:?} misses some of 0..{n}")));
    }
    Ok(())
}

/// `Tr_shared[a^{T_shared} · b]` with `shared` pairing factor indices of
/// `a` and `b`.
pub fn link_product(a: &impl Linkable, b: &impl Linkable, shared: &[(usize, usize)]) -> Result<Linked> {
    let (matrix, dims) = linalg::link(a.choi_matrix(), &a.factor_dims(), b.choi_matrix(), &b.factor_dims(), shared)?;
    Ok(Linked { matrix, dims })
}

/// Schmidt coefficients of a pure bipartite state, nonincreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtVector {
    coeffs: Vec<f64>,
}

impl SchmidtVector {
    pub const NORM_TOL: f64 = 1e-9;

    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !(*c >= 0.0)) {
            return Err(VqrdError::invalid("Schmidt coefficients must be nonnegative"));
        }
        if coeffs.windows(2).any(|w| w[0] < w[1]) {
            return Err(VqrdError::invalid("Schmidt coefficients must be nonincreasing"));
        }
        let s: f64 = coeffs.iter().map(|c| c * c).sum();
        if (s - 1.0).abs() > Self::NORM_TOL {
            return Err(VqrdError::invalid(format!("Schmidt coefficients have squared norm {s}")));
        }
        Ok(Self { coeffs })
    }

    /// Sorts and normalises arbitrary nonnegative weights.
    pub fn from_unsorted(mut coeffs: Vec<f64>) -> Result<Self> {
        coeffs.sort_by(|a, b| b.total_cmp(a));
        let n = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(VqrdError::invalid("zero Schmidt vector"));
        }
        Self::new(coeffs.into_iter().map(|c| c / n).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }
}

/// Schmidt decomposition of a bipartite pure state vector with factor dims `(da, db)`.
pub fn schmidt_of_vector(psi: &CVec, dims: (usize, usize)) -> Result<SchmidtVector> {
    let (da, db) = dims;
    if psi.len() != da * db {
        return Err(VqrdError::dims(format!("state of length {} is not {da}x{db}", psi.len())));
    }
    let coeff = CMat::from_fn(da, db, |i, j| psi[i * db + j]);
    let sv = coeff.singular_values();
    SchmidtVector::from_unsorted(sv.iter().copied().collect())
}

/// Schmidt coefficients of a pure bipartite density matrix.
pub fn schmidt(psi: &DensityMatrix, dims: (usize, usize)) -> Result<SchmidtVector> {
    if psi.dim() != dims.0 * dims.1 {
        return Err(VqrdError::dims(format!("state of dim {} is not {}x{}", psi.dim(), dims.0, dims.1)));
    }
    let purity = psi.purity();
    if (purity - 1.0).abs() > 1e-9 {
        return Err(VqrdError::invalid(format!("state is not pure (purity {purity})")));
    }
    let (_, vecs) = linalg::herm_eig(psi.matrix());
    let top = vecs.column(vecs.ncols() - 1).into_owned();
    schmidt_of_vector(&top, dims)
}
