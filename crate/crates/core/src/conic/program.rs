use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Mutex;

use nalgebra::DMatrix;

/// One cone of the slack space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    Free(usize),
    Nonnegative(usize),
    Psd(usize),
}

/// A sparse row `g` of the inequality `h − gᵀx ≥ 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, f64)>,
    pub h: f64,
}

/// A linear matrix inequality `h − Σ_j x_j G_j ⪰ 0` on real symmetric matrices.
///
/// Each `G_j` is listed by its nonzero entries, both triangles included.
#[derive(Clone, Debug)]
pub struct PsdBlock {
    pub dim: usize,
    pub h: DMatrix<f64>,
    pub cols: Vec<(usize, Vec<(usize, usize, f64)>)>,
}

/// `min cᵀx  s.t.  Ax = b,  h − Gx ∈ K` with `x` free and `K` a product of a
/// nonnegative orthant and PSD cones.
#[derive(Clone, Debug)]
pub struct ConicProgram {
    pub name: String,
    pub c: Vec<f64>,
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub linear: Vec<LinearRow>,
    pub psd: Vec<PsdBlock>,
}

impl ConicProgram {
    pub fn new(name: impl Into<String>, n: usize) -> Self {
        Self { name: name.into(), c: vec![0.0; n], a: DMatrix::zeros(0, n), b: Vec::new(), linear: Vec::new(), psd: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_eqs(&self) -> usize {
        self.b.len()
    }

    pub fn cone_signature(&self) -> Vec<Cone> {
        let mut out = vec![Cone::Free(self.num_vars())];
        if !self.linear.is_empty() {
            out.push(Cone::Nonnegative(self.linear.len()));
        }
        out.extend(self.psd.iter().map(|b| Cone::Psd(b.dim)));
        out
    }

    /// Barrier degree of the cone: orthant size plus the PSD block orders.
    pub fn degree(&self) -> usize {
        self.linear.len() + self.psd.iter().map(|b| b.dim).sum::<usize>()
    }

    pub fn push_eq(&mut self, coeffs: &[(usize, f64)], rhs: f64) {
        let n = self.num_vars();
        let p = self.a.nrows();
        self.a = self.a.clone().insert_row(p, 0.0);
        for &(j, v) in coeffs {
            self.a[(p, j)] += v;
        }
        self.b.push(rhs);
        debug_assert_eq!(self.a.ncols(), n);
    }

    /// Text dump: objective, triplet equalities, cones.
    pub fn dump_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# program {}", self.name);
        let _ = writeln!(s, "vars {}", self.num_vars());
        let _ = writeln!(s, "objective");
        for (j, v) in self.c.iter().enumerate() {
            if *v != 0.0 {
                let _ = writeln!(s, "{j} {v:e}");
            }
        }
        let _ = writeln!(s, "equalities {}", self.num_eqs());
        for i in 0..self.a.nrows() {
            for j in 0..self.a.ncols() {
                let v = self.a[(i, j)];
                if v != 0.0 {
                    let _ = writeln!(s, "{i} {j} {v:e}");
                }
            }
        }
        let _ = writeln!(s, "rhs");
        for (i, v) in self.b.iter().enumerate() {
            let _ = writeln!(s, "{i} {v:e}");
        }
        let _ = writeln!(s, "cones {:?}", self.cone_signature());
        let _ = writeln!(s, "nonnegative {}", self.linear.len());
        for (i, row) in self.linear.iter().enumerate() {
            let _ = writeln!(s, "row {i} h {:e}", row.h);
            for (j, v) in &row.coeffs {
                let _ = writeln!(s, "{i} {j} {v:e}");
            }
        }
        for (k, blk) in self.psd.iter().enumerate() {
            let _ = writeln!(s, "psd {k} dim {}", blk.dim);
            for r in 0..blk.dim {
                for c in r..blk.dim {
                    let v = blk.h[(r, c)];
                    if v != 0.0 {
                        let _ = writeln!(s, "h {r} {c} {v:e}");
                    }
                }
            }
            for (j, entries) in &blk.cols {
                for &(r, c, v) in entries {
                    if r <= c {
                        let _ = writeln!(s, "g {j} {r} {c} {v:e}");
                    }
                }
            }
        }
        s
    }
}

static DUMP_SINK: Mutex<Option<PathBuf>> = Mutex::new(None);

/// Appends the text dump of every program solved through [`Model`] to
/// `path`, or stops doing so with `None`.
///
/// [`Model`]: super::Model
pub fn set_dump_sink(path: Option<PathBuf>) {
    *DUMP_SINK.lock().unwrap_or_else(|e| e.into_inner()) = path;
}

pub(crate) fn record(p: &ConicProgram) {
    let guard = DUMP_SINK.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(path) = guard.as_ref() {
        // Best effort: a failed debug dump must not change the result.
        if let Ok(mut f) = std::fs::OpenOptions::new().create(true).append(true).open(path) {
            let _ = f.write_all(p.dump_text().as_bytes());
        }
    }
}
