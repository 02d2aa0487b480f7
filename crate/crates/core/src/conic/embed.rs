use nalgebra::DMatrix;

use crate::qcore::{CMat, HermitianOperator};

/// Real symmetric embedding `[[Re, −Im], [Im, Re]]` of a Hermitian matrix.
///
/// Each eigenvalue of `x` appears twice in the spectrum of the embedding.
pub fn hermitian_embed(x: &HermitianOperator) -> DMatrix<f64> {
    embed_matrix(x.matrix())
}

pub(crate) fn embed_matrix(x: &CMat) -> DMatrix<f64> {
    let d = x.nrows();
    DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        let v = x[(r % d, c % d)];
        match (r < d, c < d) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    })
}

/// Inverse of the pairing: the Hermitian `Y` with `Re Tr(Y T) = Tr(Z embed(T))`.
pub(crate) fn unembed_dual(z: &DMatrix<f64>) -> CMat {
    let d = z.nrows() / 2;
    CMat::from_fn(d, d, |i, j| {
        let re = z[(i, j)] + z[(i + d, j + d)];
        let im = z[(i + d, j)] - z[(i, j + d)];
        num_complex::Complex64::new(re, im)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{linalg, objects};

    fn sorted_eigs(m: &DMatrix<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn real_input_duplicates_blocks() {
        let x = HermitianOperator::from_real(2, &[1.0, 2.0, 2.0, -3.0]).unwrap();
        let e = hermitian_embed(&x);
        assert_eq!(e.view((0, 0), (2, 2)), e.view((2, 2), (2, 2)));
        assert!(e.view((0, 2), (2, 2)).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = HermitianOperator::new(objects::pauli_y()).unwrap();
        let ev = sorted_eigs(&hermitian_embed(&y));
        for (a, b) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_preserves_psd() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let rho = crate::qcore::random::density(&mut rng, 3, 2);
            let e = hermitian_embed(rho.operator());
            assert!(sorted_eigs(&e)[0] > -1e-12);
        }
    }

    #[test]
    fn dual_pairing_matches_trace() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let t = crate::qcore::random::hermitian(&mut rng, 3).into_matrix();
        let zc = crate::qcore::random::hermitian(&mut rng, 6).into_matrix();
        let z = DMatrix::from_fn(6, 6, |i, j| zc[(i, j)].re);
        let lhs = z.dot(&embed_matrix(&t));
        let rhs = linalg::re_trace_prod(&unembed_dual(&z), &t);
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
