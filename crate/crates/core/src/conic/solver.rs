//! Primal-dual interior point method on the homogeneous self-dual embedding,
//! Nesterov–Todd scaling, Mehrotra predictor-corrector.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use super::program::ConicProgram;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-8, feas_tol: 1e-8, max_iter: 200, verbose: false }
    }
}

impl SolveOptions {
    /// Defaults, with both tolerances overridden by `VQRD_TOL` when set.
    pub fn from_env() -> Self {
        let mut o = Self::default();
        if let Some(t) = std::env::var("VQRD_TOL").ok().and_then(|v| v.parse::<f64>().ok()) {
            if t > 0.0 {
                o.gap_tol = t;
                o.feas_tol = t;
            }
        }
        o
    }

    pub fn with_tol(tol: f64) -> Self {
        Self { gap_tol: tol, feas_tol: tol, ..Self::default() }
    }
}

/// Primal/dual point of `min cᵀx s.t. Ax=b, s = h−Gx ∈ K` and its dual
/// `max −bᵀy − hᵀz s.t. Aᵀy + Gᵀz + c = 0, z ∈ K`.
///
/// For infeasible problems `(y, z)` is a Farkas certificate; for unbounded
/// ones `x` is a recession direction.
#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z_linear: Vec<f64>,
    pub z_psd: Vec<DMatrix<f64>>,
    pub s_linear: Vec<f64>,
    pub s_psd: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
struct ConeVec {
    lin: DVector<f64>,
    mats: Vec<DMatrix<f64>>,
}

impl ConeVec {
    fn zeros(p: &ConicProgram) -> Self {
        Self { lin: DVector::zeros(p.linear.len()), mats: p.psd.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect() }
    }

    fn identity(p: &ConicProgram) -> Self {
        Self { lin: DVector::from_element(p.linear.len(), 1.0), mats: p.psd.iter().map(|b| DMatrix::identity(b.dim, b.dim)).collect() }
    }

    fn h(p: &ConicProgram) -> Self {
        Self { lin: DVector::from_iterator(p.linear.len(), p.linear.iter().map(|r| r.h)), mats: p.psd.iter().map(|b| b.h.clone()).collect() }
    }

    fn dot(&self, o: &ConeVec) -> f64 {
        self.lin.dot(&o.lin) + self.mats.iter().zip(&o.mats).map(|(a, b)| a.dot(b)).sum::<f64>()
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    fn axpy(&mut self, a: f64, o: &ConeVec) {
        self.lin.axpy(a, &o.lin, 1.0);
        for (m, om) in self.mats.iter_mut().zip(&o.mats) {
            m.zip_apply(om, |u, v| *u += a * v);
        }
    }

    fn scaled(&self, a: f64) -> ConeVec {
        Self { lin: &self.lin * a, mats: self.mats.iter().map(|m| m * a).collect() }
    }

    fn sub(&self, o: &ConeVec) -> ConeVec {
        let mut r = self.clone();
        r.axpy(-1.0, o);
        r
    }

    /// Jordan product u∘v.
    fn jordan(&self, o: &ConeVec) -> ConeVec {
        Self {
            lin: self.lin.component_mul(&o.lin),
            mats: self
                .mats
                .iter()
                .zip(&o.mats)
                .map(|(a, b)| {
                    let ab = a * b;
                    (&ab + ab.transpose()) * 0.5
                })
                .collect(),
        }
    }

    /// Smallest α ≥ 0 with self + αe in the cone; negative when interior.
    fn shift_to_interior(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for v in self.lin.iter() {
            worst = worst.max(-v);
        }
        for m in &self.mats {
            let ev = sym_eigenvalues(m);
            worst = worst.max(-ev.iter().copied().fold(f64::INFINITY, f64::min));
        }
        worst
    }
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    sym(m).symmetric_eigenvalues().iter().copied().collect()
}

/// Cholesky factor of a symmetric matrix that should be positive definite,
/// lifting tiny or negative eigenvalues if the plain factorization fails.
fn robust_cholesky(m: &DMatrix<f64>) -> DMatrix<f64> {
    let s = sym(m);
    if let Some(ch) = Cholesky::new(s.clone()) {
        return ch.l();
    }
    let eig = s.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);
    let clipped = eig.eigenvalues.map(|v| v.max(1e-14 * top));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    Cholesky::new(sym(&rebuilt)).map(|c| c.l()).unwrap_or_else(|| DMatrix::from_diagonal(&clipped.map(f64::sqrt)))
}

struct BlockScaling {
    r: DMatrix<f64>,
    r_inv: DMatrix<f64>,
    lambda: DVector<f64>,
    /// (R Rᵀ)⁻¹
    m: DMatrix<f64>,
}

struct Scaling {
    w_lin: DVector<f64>,
    lambda_lin: DVector<f64>,
    blocks: Vec<BlockScaling>,
}

impl Scaling {
    fn identity(p: &ConicProgram) -> Self {
        let l = p.linear.len();
        Self {
            w_lin: DVector::from_element(l, 1.0),
            lambda_lin: DVector::from_element(l, 1.0),
            blocks: p
                .psd
                .iter()
                .map(|b| BlockScaling { r: DMatrix::identity(b.dim, b.dim), r_inv: DMatrix::identity(b.dim, b.dim), lambda: DVector::from_element(b.dim, 1.0), m: DMatrix::identity(b.dim, b.dim) })
                .collect(),
        }
    }

    fn nesterov_todd(s: &ConeVec, z: &ConeVec) -> Self {
        let w_lin = s.lin.zip_map(&z.lin, |a, b| (a / b).sqrt());
        let lambda_lin = s.lin.zip_map(&z.lin, |a, b| (a * b).sqrt());
        let blocks = s
            .mats
            .iter()
            .zip(&z.mats)
            .map(|(sm, zm)| {
                let l1 = robust_cholesky(sm);
                let l2 = robust_cholesky(zm);
                let svd = (l2.transpose() * &l1).svd(true, true);
                let v = svd.v_t.expect("requested").transpose();
                let lam = svd.singular_values.map(|x| x.max(1e-300));
                let inv_sqrt = DMatrix::from_diagonal(&lam.map(|x| 1.0 / x.sqrt()));
                let sqrt = DMatrix::from_diagonal(&lam.map(f64::sqrt));
                let r = &l1 * &v * &inv_sqrt;
                let l1_inv = l1.clone().solve_lower_triangular(&DMatrix::identity(l1.nrows(), l1.nrows())).unwrap_or_else(|| l1.clone().try_inverse().expect("triangular factor is invertible"));
                let r_inv = &sqrt * v.transpose() * l1_inv;
                let m = r_inv.transpose() * &r_inv;
                BlockScaling { r, r_inv, lambda: lam, m: sym(&m) }
            })
            .collect();
        Self { w_lin, lambda_lin, blocks }
    }

    fn lambda(&self) -> ConeVec {
        ConeVec { lin: self.lambda_lin.clone(), mats: self.blocks.iter().map(|b| DMatrix::from_diagonal(&b.lambda)).collect() }
    }

    /// W u
    fn w(&self, u: &ConeVec) -> ConeVec {
        ConeVec { lin: u.lin.component_mul(&self.w_lin), mats: self.blocks.iter().zip(&u.mats).map(|(b, m)| b.r.transpose() * m * &b.r).collect() }
    }

    /// Wᵀ u
    fn wt(&self, u: &ConeVec) -> ConeVec {
        ConeVec { lin: u.lin.component_mul(&self.w_lin), mats: self.blocks.iter().zip(&u.mats).map(|(b, m)| &b.r * m * b.r.transpose()).collect() }
    }

    /// W⁻ᵀ u
    fn w_inv_t(&self, u: &ConeVec) -> ConeVec {
        ConeVec { lin: u.lin.component_div(&self.w_lin), mats: self.blocks.iter().zip(&u.mats).map(|(b, m)| &b.r_inv * m * b.r_inv.transpose()).collect() }
    }

    /// (WᵀW)⁻¹ u
    fn wtw_inv(&self, u: &ConeVec) -> ConeVec {
        ConeVec {
            lin: u.lin.zip_map(&self.w_lin, |a, w| a / (w * w)),
            mats: self.blocks.iter().zip(&u.mats).map(|(b, m)| sym(&(&b.m * m * &b.m))).collect(),
        }
    }

    /// WᵀW u
    fn wtw(&self, u: &ConeVec) -> ConeVec {
        self.wt(&self.w(u))
    }

    /// λ \ d: the solution u of λ∘u = d.
    fn lambda_solve(&self, d: &ConeVec) -> ConeVec {
        ConeVec {
            lin: d.lin.component_div(&self.lambda_lin),
            mats: self
                .blocks
                .iter()
                .zip(&d.mats)
                .map(|(b, m)| DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| 2.0 * m[(i, j)] / (b.lambda[i] + b.lambda[j])))
                .collect(),
        }
    }
}

fn g_mul(p: &ConicProgram, x: &DVector<f64>) -> ConeVec {
    let mut out = ConeVec::zeros(p);
    for (i, row) in p.linear.iter().enumerate() {
        out.lin[i] = row.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
    }
    for (blk, m) in p.psd.iter().zip(out.mats.iter_mut()) {
        for (j, entries) in &blk.cols {
            let xj = x[*j];
            if xj == 0.0 {
                continue;
            }
            for &(r, c, v) in entries {
                m[(r, c)] += v * xj;
            }
        }
    }
    out
}

fn gt_mul(p: &ConicProgram, z: &ConeVec) -> DVector<f64> {
    let mut out = DVector::zeros(p.num_vars());
    for (i, row) in p.linear.iter().enumerate() {
        for &(j, v) in &row.coeffs {
            out[j] += v * z.lin[i];
        }
    }
    for (blk, m) in p.psd.iter().zip(&z.mats) {
        for (j, entries) in &blk.cols {
            out[*j] += entries.iter().map(|&(r, c, v)| v * m[(r, c)]).sum::<f64>();
        }
    }
    out
}

/// Factorization of the reduced KKT system
/// `[[H, Aᵀ], [A, 0]]` with `H = Gᵀ(WᵀW)⁻¹G`.
struct Kkt {
    h: DMatrix<f64>,
    k2: Cholesky<f64, Dyn>,
    schur: Option<Cholesky<f64, Dyn>>,
    a: DMatrix<f64>,
}

impl Kkt {
    fn new(p: &ConicProgram, a: &DMatrix<f64>, w: &Scaling) -> Option<Self> {
        let n = p.num_vars();
        let mut h = DMatrix::<f64>::zeros(n, n);
        for (i, row) in p.linear.iter().enumerate() {
            let wi = 1.0 / (w.w_lin[i] * w.w_lin[i]);
            for &(ja, va) in &row.coeffs {
                for &(jb, vb) in &row.coeffs {
                    h[(ja, jb)] += wi * va * vb;
                }
            }
        }
        for (blk, sc) in p.psd.iter().zip(&w.blocks) {
            let k = blk.dim;
            let m = &sc.m;
            for (jb, entries) in &blk.cols {
                let mut y = DMatrix::<f64>::zeros(k, k);
                for &(r, c, v) in entries {
                    for a_ in 0..k {
                        let mar = m[(a_, r)] * v;
                        if mar == 0.0 {
                            continue;
                        }
                        for b_ in 0..k {
                            y[(a_, b_)] += mar * m[(c, b_)];
                        }
                    }
                }
                for (ja, ea) in &blk.cols {
                    let s: f64 = ea.iter().map(|&(r, c, v)| v * y[(c, r)]).sum();
                    h[(*ja, *jb)] += s;
                }
            }
        }
        let h = sym(&h);
        let at = a.transpose();
        let mut k2 = &h + &at * a;
        let scale = (0..n).map(|i| k2[(i, i)].abs()).fold(1.0_f64, f64::max);
        let mut reg = 1e-13 * scale;
        let chol = loop {
            let mut t = k2.clone();
            for i in 0..n {
                t[(i, i)] += reg;
            }
            if let Some(c) = Cholesky::new(t) {
                break c;
            }
            reg *= 100.0;
            if reg > 1e-2 * scale {
                return None;
            }
        };
        for i in 0..n {
            k2[(i, i)] += reg;
        }
        let schur = if a.nrows() > 0 {
            let kinv_at = chol.solve(&at);
            let s = a * kinv_at;
            let sscale = (0..s.nrows()).map(|i| s[(i, i)].abs()).fold(1e-300_f64, f64::max);
            let mut sreg = 1e-14 * sscale;
            loop {
                let mut t = sym(&s);
                for i in 0..t.nrows() {
                    t[(i, i)] += sreg;
                }
                if let Some(c) = Cholesky::new(t) {
                    break Some(c);
                }
                sreg *= 100.0;
                if sreg > 1e-2 * sscale {
                    return None;
                }
            }
        } else {
            None
        };
        Some(Self { h, k2: chol, schur, a: a.clone() })
    }

    fn solve_reduced_once(&self, r1: &DVector<f64>, r2: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let rhs1 = r1 + self.a.transpose() * r2;
        match &self.schur {
            None => (self.k2.solve(&rhs1), DVector::zeros(0)),
            Some(s) => {
                let t = self.k2.solve(&rhs1);
                let uy = s.solve(&(&self.a * &t - r2));
                let ux = self.k2.solve(&(rhs1 - self.a.transpose() * &uy));
                (ux, uy)
            }
        }
    }

    /// Solves `H ux + Aᵀ uy = r1, A ux = r2` with iterative refinement.
    fn solve_reduced(&self, r1: &DVector<f64>, r2: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let (mut ux, mut uy) = self.solve_reduced_once(r1, r2);
        for _ in 0..3 {
            let e1 = r1 - (&self.h * &ux + self.a.transpose() * &uy);
            let e2 = r2 - &self.a * &ux;
            let err = e1.amax().max(if e2.is_empty() { 0.0 } else { e2.amax() });
            if err < 1e-14 * (1.0 + r1.amax().max(if r2.is_empty() { 0.0 } else { r2.amax() })) {
                break;
            }
            let (dx, dy) = self.solve_reduced_once(&e1, &e2);
            ux += dx;
            uy += dy;
        }
        (ux, uy)
    }

    /// Solves `[[0, Aᵀ, Gᵀ], [A, 0, 0], [G, 0, −WᵀW]] u = (bx, by, bz)`.
    fn solve(&self, p: &ConicProgram, w: &Scaling, bx: &DVector<f64>, by: &DVector<f64>, bz: &ConeVec) -> (DVector<f64>, DVector<f64>, ConeVec) {
        let (mut ux, mut uy, mut uz) = self.solve_once(p, w, bx, by, bz);
        // Refinement on the full system: the reduced solve loses accuracy
        // when the scaling is badly conditioned near the boundary.
        for _ in 0..2 {
            let ex = bx - (self.a.transpose() * &uy + gt_mul(p, &uz));
            let ey = by - &self.a * &ux;
            let mut ez = bz.sub(&g_mul(p, &ux));
            ez.axpy(1.0, &w.wtw(&uz));
            let (dx, dy, dz) = self.solve_once(p, w, &ex, &ey, &ez);
            ux += dx;
            uy += dy;
            uz.axpy(1.0, &dz);
        }
        (ux, uy, uz)
    }

    fn solve_once(&self, p: &ConicProgram, w: &Scaling, bx: &DVector<f64>, by: &DVector<f64>, bz: &ConeVec) -> (DVector<f64>, DVector<f64>, ConeVec) {
        let r1 = bx + gt_mul(p, &w.wtw_inv(bz));
        let (ux, uy) = self.solve_reduced(&r1, by);
        let uz = w.wtw_inv(&g_mul(p, &ux).sub(bz));
        (ux, uy, uz)
    }
}

/// Largest α ∈ [0, cap] keeping `v + α dv` in the cone.
fn max_step(v: &ConeVec, dv: &ConeVec, cap: f64) -> f64 {
    let mut alpha = cap;
    for (a, da) in v.lin.iter().zip(dv.lin.iter()) {
        if *da < 0.0 {
            alpha = alpha.min(-a / da);
        }
    }
    for (m, dm) in v.mats.iter().zip(&dv.mats) {
        let l = robust_cholesky(m);
        let li = l.clone().solve_lower_triangular(&DMatrix::identity(l.nrows(), l.nrows())).unwrap_or_else(|| l.try_inverse().expect("triangular factor is invertible"));
        let t = &li * dm * li.transpose();
        let lo = sym_eigenvalues(&t).into_iter().fold(f64::INFINITY, f64::min);
        if lo < 0.0 {
            alpha = alpha.min(-1.0 / lo);
        }
    }
    alpha.max(0.0)
}

/// Drops linearly dependent equality rows (modified Gram–Schmidt with a
/// 1e-12 relative pivot threshold). Returns kept row indices, or `None` if a
/// dropped row is inconsistent with the right-hand side.
fn independent_rows(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<usize>> {
    let n = a.ncols();
    let mut basis: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut kept = Vec::new();
    for i in 0..a.nrows() {
        let mut r: DVector<f64> = a.row(i).transpose();
        let mut rb = b[i];
        let scale = r.norm().max(rb.abs()).max(1e-300);
        for _ in 0..2 {
            for (q, qb) in &basis {
                let t = q.dot(&r);
                r.axpy(-t, q, 1.0);
                rb -= t * qb;
            }
        }
        let nr = r.norm();
        if nr > 1e-12 * scale.max(1.0) && nr > 0.0 {
            basis.push((r / nr, rb / nr));
            kept.push(i);
        } else if rb.abs() > 1e-9 * (1.0 + b[i].abs()) {
            return None;
        }
    }
    debug_assert!(kept.len() <= n.max(kept.len()));
    Some(kept)
}

pub fn solve(p: &ConicProgram, opts: &SolveOptions) -> ConicSolution {
    let n = p.num_vars();
    let Some(kept) = independent_rows(&p.a, &p.b) else {
        return infeasible_equalities(p);
    };
    let a = p.a.select_rows(kept.iter());
    let b = DVector::from_iterator(kept.len(), kept.iter().map(|&i| p.b[i]));
    let c = DVector::from_column_slice(&p.c);
    let h = ConeVec::h(p);
    let e = ConeVec::identity(p);
    let nu = p.degree() as f64;

    let norm_b = b.norm().max(1.0);
    let norm_c = c.norm().max(1.0);
    let norm_h = h.norm().max(1.0);

    let ident = Scaling::identity(p);
    let Some(kkt0) = Kkt::new(p, &a, &ident) else {
        return failed(p, &kept, 0);
    };
    let zero_n = DVector::zeros(n);
    let zero_p = DVector::zeros(a.nrows());
    let (mut x, _, zt) = kkt0.solve(p, &ident, &zero_n, &b, &h);
    let mut s = zt.scaled(-1.0);
    let shift = s.shift_to_interior();
    if shift >= -1e-8 * s.norm().max(1.0) {
        s.axpy(1.0 + shift, &e);
    }
    let (_, mut y, mut z) = kkt0.solve(p, &ident, &(-&c), &zero_p, &ConeVec::zeros(p));
    let shift = z.shift_to_interior();
    if shift >= -1e-8 * z.norm().max(1.0) {
        z.axpy(1.0 + shift, &e);
    }
    let mut tau = 1.0;
    let mut kappa = 1.0;

    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    let mut stalls = 0;
    for iter in 0..=opts.max_iter {
        iterations = iter;
        let gx = g_mul(p, &x);
        let gtz = gt_mul(p, &z);
        let aty = a.transpose() * &y;
        let ax = &a * &x;
        let r1 = &aty + &gtz + &c * tau;
        let r2 = -&ax + &b * tau;
        let mut r3 = h.scaled(tau);
        r3.axpy(-1.0, &gx);
        r3.axpy(-1.0, &s);
        let cx = c.dot(&x);
        let by_hz = b.dot(&y) + h.dot(&z);
        let r4 = -cx - by_hz - kappa;

        let pres = (r2.norm() / norm_b).max(r3.norm() / norm_h) / tau;
        let dres = r1.norm() / norm_c / tau;
        let pcost = cx / tau;
        let dcost = -by_hz / tau;
        let gap = s.dot(&z) / (tau * tau);
        let relgap = gap.max((pcost - dcost).abs()) / pcost.abs().min(dcost.abs()).max(1.0);
        if opts.verbose {
            eprintln!("{iter:3} pcost {pcost:+.9e} dcost {dcost:+.9e} gap {gap:.2e} pres {pres:.2e} dres {dres:.2e} tau {tau:.2e} kappa {kappa:.2e}");
        }
        if pres <= opts.feas_tol && dres <= opts.feas_tol && relgap <= opts.gap_tol {
            status = SolveStatus::Optimal;
            break;
        }
        if tau < kappa {
            let dual_ray = (&aty + &gtz).norm();
            if by_hz < 0.0 && dual_ray / (-by_hz) <= opts.feas_tol {
                status = SolveStatus::Infeasible;
                break;
            }
            let mut gxs = gx.clone();
            gxs.axpy(1.0, &s);
            let primal_ray = (ax.norm() / norm_b).max(gxs.norm() / norm_h);
            if cx < 0.0 && primal_ray / (-cx) <= opts.feas_tol {
                status = SolveStatus::Unbounded;
                break;
            }
        }
        if iter == opts.max_iter {
            break;
        }

        let w = Scaling::nesterov_todd(&s, &z);
        let Some(kkt) = Kkt::new(p, &a, &w) else {
            break;
        };
        let lambda = w.lambda();
        let (x1, y1, z1) = kkt.solve(p, &w, &(-&c), &b, &h);
        let denom_base = kappa / tau - c.dot(&x1) - b.dot(&y1) - h.dot(&z1);

        let direction = |eta: f64, ds: &ConeVec, dk: f64| {
            let mut bz = r3.scaled(eta);
            bz.axpy(-1.0, &w.wt(&w.lambda_solve(ds)));
            let (x2, y2, z2) = kkt.solve(p, &w, &(&r1 * -eta), &(&r2 * eta), &bz);
            let dtau = (-eta * r4 + dk / tau + c.dot(&x2) + b.dot(&y2) + h.dot(&z2)) / denom_base;
            let dx = &x1 * dtau + x2;
            let dy = &y1 * dtau + y2;
            let mut dz = z1.scaled(dtau);
            dz.axpy(1.0, &z2);
            // Third block row solved for Δs directly; exact in the primal residual.
            let mut ds_vec = h.scaled(dtau);
            ds_vec.axpy(-1.0, &g_mul(p, &dx));
            ds_vec.axpy(eta, &r3);
            let dkappa = (dk - kappa * dtau) / tau;
            (dx, dy, dz, ds_vec, dtau, dkappa)
        };

        let step_len = |ds_: &ConeVec, dz_: &ConeVec, dtau: f64, dkappa: f64| {
            let mut a_ = max_step(&s, ds_, 1.0).min(max_step(&z, dz_, 1.0));
            if dtau < 0.0 {
                a_ = a_.min(-tau / dtau);
            }
            if dkappa < 0.0 {
                a_ = a_.min(-kappa / dkappa);
            }
            a_
        };

        let ll = lambda.jordan(&lambda);
        let (_, _, dz_a, ds_a, dtau_a, dkappa_a) = direction(1.0, &ll.scaled(-1.0), -tau * kappa);
        let alpha_aff = step_len(&ds_a, &dz_a, dtau_a, dkappa_a);
        let sigma = (1.0 - alpha_aff).clamp(0.0, 1.0).powi(3);
        let mu = (s.dot(&z) + tau * kappa) / (nu + 1.0);

        let mut ds = ll.scaled(-1.0);
        ds.axpy(-1.0, &w.w_inv_t(&ds_a).jordan(&w.w(&dz_a)));
        ds.axpy(sigma * mu, &e);
        let dk = -tau * kappa - dtau_a * dkappa_a + sigma * mu;
        let (dx, dy, dz, dsv, dtau, dkappa) = direction(1.0 - sigma, &ds, dk);
        let alpha = (0.99 * step_len(&dsv, &dz, dtau, dkappa)).min(1.0);

        if alpha < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
        x.axpy(alpha, &dx, 1.0);
        y.axpy(alpha, &dy, 1.0);
        z.axpy(alpha, &dz);
        s.axpy(alpha, &dsv);
        tau += alpha * dtau;
        kappa += alpha * dkappa;
    }

    finish(p, &kept, status, iterations, x, y, z, s, tau, &a, &b, &c, &h)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    p: &ConicProgram,
    kept: &[usize],
    status: SolveStatus,
    iterations: usize,
    x: DVector<f64>,
    y: DVector<f64>,
    z: ConeVec,
    s: ConeVec,
    tau: f64,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
    h: &ConeVec,
) -> ConicSolution {
    let scale = match status {
        SolveStatus::Optimal | SolveStatus::MaxIter => 1.0 / tau,
        SolveStatus::Infeasible => 1.0 / (-(b.dot(&y) + h.dot(&z))).max(1e-300),
        SolveStatus::Unbounded => 1.0 / (-c.dot(&x)).max(1e-300),
    };
    let (x, y, z, s) = (&x * scale, &y * scale, z.scaled(scale), s.scaled(scale));
    let gap = s.dot(&z);
    let pobj = c.dot(&x);
    let dobj = -(b.dot(&y) + h.dot(&z));
    let mut r3 = h.clone();
    r3.axpy(-1.0, &g_mul(p, &x));
    r3.axpy(-1.0, &s);
    let pres = ((a * &x - b).norm() / b.norm().max(1.0)).max(r3.norm() / h.norm().max(1.0));
    let dres = (a.transpose() * &y + gt_mul(p, &z) + c).norm() / c.norm().max(1.0);
    let mut y_full = vec![0.0; p.num_eqs()];
    for (k, &i) in kept.iter().enumerate() {
        y_full[i] = y[k];
    }
    ConicSolution {
        status,
        x: x.iter().copied().collect(),
        y: y_full,
        z_linear: z.lin.iter().copied().collect(),
        z_psd: z.mats,
        s_linear: s.lin.iter().copied().collect(),
        s_psd: s.mats,
        primal_objective: pobj,
        dual_objective: dobj,
        gap,
        primal_residual: pres,
        dual_residual: dres,
        iterations,
    }
}

fn infeasible_equalities(p: &ConicProgram) -> ConicSolution {
    ConicSolution {
        status: SolveStatus::Infeasible,
        x: vec![0.0; p.num_vars()],
        y: vec![0.0; p.num_eqs()],
        z_linear: vec![0.0; p.linear.len()],
        z_psd: p.psd.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect(),
        s_linear: vec![0.0; p.linear.len()],
        s_psd: p.psd.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect(),
        primal_objective: f64::INFINITY,
        dual_objective: f64::INFINITY,
        gap: f64::NAN,
        primal_residual: f64::INFINITY,
        dual_residual: f64::NAN,
        iterations: 0,
    }
}

fn failed(p: &ConicProgram, _kept: &[usize], iterations: usize) -> ConicSolution {
    ConicSolution { status: SolveStatus::MaxIter, iterations, ..infeasible_equalities(p) }
}
