//! The comb built from link products against a gate-level simulation of
//! the same circuit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use vqrd::combs::{build_dephasing_comb, virtual_comb_decomposition};

type M = DMatrix<Complex64>;

/// CNOT on an n-qubit register, qubit 0 most significant.
fn cnot(n: usize, control: usize, target: usize) -> M {
    let d = 1 << n;
    let bit = |k: usize| 1 << (n - 1 - k);
    let mut u = M::zeros(d, d);
    for x in 0..d {
        let y = if x & bit(control) != 0 { x ^ bit(target) } else { x };
        u[(y, x)] = Complex64::new(1.0, 0.0);
    }
    u
}

fn z_on(n: usize, k: usize) -> M {
    let d = 1 << n;
    M::from_fn(d, d, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i & (1 << (n - 1 - k)) != 0 {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Register (S₁, E, S₂): step 1 on (S₁, E), step 2 on (S₂, E), each
/// followed by dephasing E. Z pairs on S₁ and S₂ where flagged.
fn simulate(rho: &M, p: f64, flags: [bool; 2]) -> M {
    let (s1, e, s2) = (0, 1, 2);
    let mut r = rho.clone();
    for (step, s) in [s1, s2].into_iter().enumerate() {
        let z = z_on(3, s);
        let mut u = cnot(3, e, s) * cnot(3, s, e);
        if flags[step] {
            u = &z * u * &z;
        }
        r = &u * r * u.adjoint();
        let ze = z_on(3, e);
        r = r.clone() * Complex64::new(1.0 - p, 0.0) + &ze * r * &ze * Complex64::new(p, 0.0);
    }
    r
}

/// Choi matrix over inputs (S₁, E₀, S₂) and outputs (S₁, S₂, E₂).
fn oracle_choi(p: f64, flags: [bool; 2]) -> M {
    // Input basis index in wire order (S₁, E₀, S₂) equals the register index.
    let mut j = M::zeros(64, 64);
    for a in 0..8 {
        for b in 0..8 {
            let mut x = M::zeros(8, 8);
            x[(a, b)] = Complex64::new(1.0, 0.0);
            let y = simulate(&x, p, flags);
            // Register (S₁, E, S₂) to output order (S₁, S₂, E).
            let perm = |i: usize| (i & 4) | ((i & 1) << 1) | ((i & 2) >> 1);
            for k in 0..8 {
                for l in 0..8 {
                    j[(a * 8 + perm(k), b * 8 + perm(l))] = y[(k, l)];
                }
            }
        }
    }
    j
}

fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn two_step_comb_matches_circuit() {
    let p = 0.1;
    let comb = build_dephasing_comb(2, p).unwrap();
    assert_eq!(comb.wires(), &[(4, 2), (2, 4)]);
    let got = comb.as_channel();
    assert!(max_diff(got.matrix(), &oracle_choi(p, [false, false])) < 1e-12);
}

#[test]
fn decomposition_terms_match_circuit() {
    let p = 0.1;
    let dec = virtual_comb_decomposition(2, p).unwrap();
    let mut sum = M::zeros(64, 64);
    for t in &dec.terms {
        let flags = [t.flags[0], t.flags[1]];
        let want = oracle_choi(p, flags);
        assert!(max_diff(t.comb.as_channel().matrix(), &want) < 1e-12, "{flags:?}");
        sum += want * Complex64::new(t.coefficient, 0.0);
    }
    // Oracle recombination equals the noiseless circuit.
    assert!(max_diff(&sum, &oracle_choi(0.0, [false, false])) < 1e-12);
}

#[test]
fn quasi_channel_mixture() {
    let dec = virtual_comb_decomposition(1, 0.1).unwrap();
    let q = dec.quasi().unwrap();
    assert!((q.gamma() - 1.25).abs() < 1e-12);
    assert!((q.lambda_plus() - 1.125).abs() < 1e-12);
}

#[test]
fn each_term_is_a_valid_comb_touching_only_system_wires() {
    let l = 2;
    let noisy = build_dephasing_comb(l, 0.2).unwrap();
    let dims = vec![2; 2 * l + 2];
    let env = [1, 2 * l + 1];
    let want = noisy.operator().partial_trace(&dims, &env).unwrap();
    for t in &virtual_comb_decomposition(l, 0.2).unwrap().terms {
        assert!(t.comb.is_psd(1e-10) && t.comb.is_causal(1e-10), "{:?}", t.flags);
        let got = t.comb.operator().partial_trace(&dims, &env).unwrap();
        assert!(max_diff(got.matrix(), want.matrix()) < 1e-12, "{:?}", t.flags);
    }
}
