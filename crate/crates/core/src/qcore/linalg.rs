//! Dense complex matrix kernels on raw `DMatrix<Complex64>`.
//!
//! Multipartite operators are addressed by a list of tensor factor
//! dimensions, first factor most significant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, VqrdError};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn eye(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn zeros(d: usize) -> CMat {
    CMat::zeros(d, d)
}

pub fn from_real(d: usize, entries: &[f64]) -> CMat {
    CMat::from_row_iterator(d, d, entries.iter().map(|&v| cr(v)))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(ops: &[&CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for op in ops {
        out = out.kronecker(*op);
    }
    out
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

/// |v⟩⟨v|
pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

pub fn trace(x: &CMat) -> Complex64 {
    x.trace()
}

pub fn re_trace(x: &CMat) -> f64 {
    x.trace().re
}

/// Re Tr(a b) without forming the product.
pub fn re_trace_prod(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)] * b[(j, i)];
            s += x.re;
        }
    }
    s
}

pub fn hermitian_part(x: &CMat) -> CMat {
    (x + x.adjoint()).scale(0.5)
}

pub fn max_abs(x: &CMat) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
}

pub fn hermiticity_defect(x: &CMat) -> f64 {
    let n = x.nrows();
    let mut m = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            m = m.max((x[(i, j)] - x[(j, i)].conj()).norm());
        }
    }
    m
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn check_dims(x: &CMat, dims: &[usize]) -> Result<()> {
    let n = product(dims);
    if x.nrows() != n || x.ncols() != n {
        return Err(VqrdError::dims(format!(
            "operator is {}x{} but factors {:?} multiply to {}",
            x.nrows(),
            x.ncols(),
            dims,
            n
        )));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// For every composite index of `dims`, the composite index obtained after
/// reordering the factors so that new factor `k` is old factor `perm[k]`.
fn permuted_index_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    let mut pos_of = vec![0; dims.len()];
    for (k, &p) in perm.iter().enumerate() {
        pos_of[p] = k;
    }
    let n = product(dims);
    let mut map = vec![0; n];
    let mut digits = vec![0usize; dims.len()];
    for (idx, slot) in map.iter_mut().enumerate() {
        let mut rem = idx;
        for k in (0..dims.len()).rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        let mut t = 0;
        for k in 0..dims.len() {
            t += digits[k] * new_strides[pos_of[k]];
        }
        *slot = t;
    }
    map
}

/// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of `x`.
pub fn permute_factors(x: &CMat, dims: &[usize], perm: &[usize]) -> Result<CMat> {
    check_dims(x, dims)?;
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(VqrdError::dims(format!("{perm:?} is not a permutation of {} factors", dims.len())));
    }
    let map = permuted_index_map(dims, perm);
    let n = x.nrows();
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = x[(i, j)];
        }
    }
    Ok(out)
}

pub fn permute_vector(v: &CVec, dims: &[usize], perm: &[usize]) -> CVec {
    let map = permuted_index_map(dims, perm);
    let mut out = CVec::zeros(v.len());
    for i in 0..v.len() {
        out[map[i]] = v[i];
    }
    out
}

/// Partial trace keeping the factors listed in `keep` (in their original order).
pub fn partial_trace(x: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    check_dims(x, dims)?;
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(VqrdError::dims(format!("keep set {keep:?} out of range for {} factors", dims.len())));
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();
    let perm: Vec<usize> = keep_sorted.iter().chain(traced.iter()).copied().collect();
    let y = permute_factors(x, dims, &perm)?;
    let dk: usize = keep_sorted.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    let mut out = CMat::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut s = ZERO;
            for t in 0..dt {
                s += y[(i * dt + t, j * dt + t)];
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Transpose on each factor listed in `sys`.
pub fn partial_transpose(x: &CMat, dims: &[usize], sys: &[usize]) -> Result<CMat> {
    check_dims(x, dims)?;
    if sys.iter().any(|&k| k >= dims.len()) {
        return Err(VqrdError::dims(format!("factor set {sys:?} out of range for {} factors", dims.len())));
    }
    let n = x.nrows();
    let st = strides(dims);
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (mut a, mut b) = (i, j);
            for &k in sys {
                let di = (i / st[k]) % dims[k];
                let dj = (j / st[k]) % dims[k];
                a = a - di * st[k] + dj * st[k];
                b = b - dj * st[k] + di * st[k];
            }
            out[(a, b)] = x[(i, j)];
        }
    }
    Ok(out)
}

/// Eigen-decomposition of the Hermitian part of `x`, eigenvalues ascending.
pub fn herm_eig(x: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(x);
    let n = h.nrows();
    let mut eig = h.clone().symmetric_eigen();
    // The QL iteration occasionally yields NaN on highly degenerate input
    // with many exact zeros. A diagonal shift leaves the eigenvectors alone
    // and breaks the offending pattern.
    let scale = 1.0 + max_abs(&h);
    let mut attempt = 1.0;
    while eig.eigenvalues.iter().any(|v| !v.is_finite()) && attempt < 8.0 {
        let shift = scale * (0.5 + 0.37 * attempt);
        eig = (&h + eye(n) * cr(shift)).symmetric_eigen();
        eig.eigenvalues.add_scalar_mut(-shift);
        attempt += 1.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(k));
    }
    (vals, vecs)
}

pub fn eigenvalues(x: &CMat) -> Vec<f64> {
    herm_eig(x).0
}

pub fn min_eigenvalue(x: &CMat) -> f64 {
    eigenvalues(x).first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(x: &CMat) -> f64 {
    eigenvalues(x).last().copied().unwrap_or(0.0)
}

pub fn trace_norm(x: &CMat) -> f64 {
    eigenvalues(x).iter().map(|v| v.abs()).sum()
}

/// Largest absolute eigenvalue of a Hermitian operator.
pub fn operator_norm(x: &CMat) -> f64 {
    eigenvalues(x).iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Applies `f` to the spectrum of the Hermitian part of `x`.
pub fn spectral_map(x: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = herm_eig(x);
    let mut scaled = vecs.clone();
    for (k, v) in vals.iter().enumerate() {
        let fv = cr(f(*v));
        for r in 0..scaled.nrows() {
            scaled[(r, k)] *= fv;
        }
    }
    &scaled * vecs.adjoint()
}

pub fn psd_sqrt(x: &CMat) -> CMat {
    spectral_map(x, |v| v.max(0.0).sqrt())
}

/// Positive and negative parts `x = p - n`, both PSD with orthogonal supports.
pub fn jordan_split(x: &CMat) -> (CMat, CMat) {
    (spectral_map(x, |v| v.max(0.0)), spectral_map(x, |v| (-v).max(0.0)))
}

/// Uhlmann fidelity (Tr √(√ρ σ √ρ))².
pub fn fidelity(rho: &CMat, sigma: &CMat) -> f64 {
    let s = psd_sqrt(rho);
    let inner = &s * sigma * &s;
    let t: f64 = eigenvalues(&inner).iter().map(|v| v.max(0.0).sqrt()).sum();
    (t * t).clamp(0.0, 1.0)
}

/// Vectorisation with the input index first, `|K⟩⟩[(i, a)] = K[a, i]`, so
/// that the Choi operator of `ρ ↦ KρK†` is |K⟩⟩⟨⟨K|.
pub fn choi_vec(k: &CMat) -> CVec {
    let (dout, din) = (k.nrows(), k.ncols());
    let mut v = CVec::zeros(din * dout);
    for i in 0..din {
        for a in 0..dout {
            v[i * dout + a] = k[(a, i)];
        }
    }
    v
}

/// Link product of two multipartite operators.
///
/// `pairs` lists (factor of `a`, factor of `b`) wires that are contracted.
/// The result's factors are the free factors of `a` followed by the free
/// factors of `b`, each in original order.
pub fn link(a: &CMat, a_dims: &[usize], b: &CMat, b_dims: &[usize], pairs: &[(usize, usize)]) -> Result<(CMat, Vec<usize>)> {
    check_dims(a, a_dims)?;
    check_dims(b, b_dims)?;
    for &(ka, kb) in pairs {
        if ka >= a_dims.len() || kb >= b_dims.len() || a_dims[ka] != b_dims[kb] {
            return Err(VqrdError::dims(format!("cannot link factor {ka} of {a_dims:?} with factor {kb} of {b_dims:?}")));
        }
    }
    let a_shared: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let b_shared: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let a_free: Vec<usize> = (0..a_dims.len()).filter(|k| !a_shared.contains(k)).collect();
    let b_free: Vec<usize> = (0..b_dims.len()).filter(|k| !b_shared.contains(k)).collect();

    let pa: Vec<usize> = a_free.iter().chain(a_shared.iter()).copied().collect();
    let pb: Vec<usize> = b_shared.iter().chain(b_free.iter()).copied().collect();
    let ap = permute_factors(a, a_dims, &pa)?;
    let bp = permute_factors(b, b_dims, &pb)?;

    let dx: usize = a_free.iter().map(|&k| a_dims[k]).product();
    let dy: usize = a_shared.iter().map(|&k| a_dims[k]).product();
    let dz: usize = b_free.iter().map(|&k| b_dims[k]).product();

    // out[(x,z),(x',z')] = Σ_{y,y'} A[(x,y'),(x',y)] B[(y',z),(y,z')]
    let mut out = CMat::zeros(dx * dz, dx * dz);
    for y in 0..dy {
        for yp in 0..dy {
            for x in 0..dx {
                for xp in 0..dx {
                    let av = ap[(x * dy + yp, xp * dy + y)];
                    if av == ZERO {
                        continue;
                    }
                    for z in 0..dz {
                        let row = x * dz + z;
                        for zp in 0..dz {
                            let bv = bp[(yp * dz + z, y * dz + zp)];
                            out[(row, xp * dz + zp)] += av * bv;
                        }
                    }
                }
            }
        }
    }
    let dims: Vec<usize> = a_free.iter().map(|&k| a_dims[k]).chain(b_free.iter().map(|&k| b_dims[k])).collect();
    Ok((out, dims))
}
