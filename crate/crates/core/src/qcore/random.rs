//! Random states, unitaries and channels for tests and sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{self, c, CMat, CVec};
use super::operators::{ChoiOperator, DensityMatrix, HermitianOperator};

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let qr = ginibre(rng, d, d).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for k in 0..d {
        let ph = r[(k, k)] / r[(k, k)].norm();
        for i in 0..d {
            u[(i, k)] *= ph;
        }
    }
    u
}

pub fn pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVec {
    let v: CVec = ginibre(rng, d, 1).column(0).into_owned();
    let n = v.norm();
    v.unscale(n)
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    DensityMatrix::pure(&pure_vector(rng, d)).expect("nonzero")
}

/// Induced-measure mixed state of the given rank.
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, d, rank.max(1));
    let w = &g * g.adjoint();
    let t = linalg::re_trace(&w);
    DensityMatrix::new(w.unscale(t)).expect("Wishart matrices are states after normalisation")
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermitianOperator {
    HermitianOperator::hermitian_part_of(&ginibre(rng, d, d))
}

/// Random CPTP map with (at least) `kraus` Kraus operators.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize, kraus: usize) -> ChoiOperator {
    let kraus = kraus.max(din.div_ceil(dout)).max(1);
    let rows = dout * kraus;
    let v = unitary(rng, rows);
    let iso = v.view((0, 0), (rows, din)).into_owned();
    let ks: Vec<CMat> = (0..kraus).map(|k| iso.view((k * dout, 0), (dout, din)).into_owned()).collect();
    ChoiOperator::from_kraus(&ks)
}
