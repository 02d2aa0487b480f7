//! Pure stabilizer states by exhaustive Clifford orbit from |0…0⟩.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::PI;

use crate::qcore::linalg::{self, c, CMat, CVec};
use crate::qcore::objects;

/// Orbit of `start` under the group generated by `gens`, up to global phase.
pub fn orbit(start: &CVec, gens: &[CMat]) -> Vec<CVec> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    let s = canonical(start);
    seen.insert(key(&s));
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        for g in gens {
            let w = canonical(&(g * &v));
            if seen.insert(key(&w)) {
                queue.push_back(w);
            }
        }
        out.push(v);
    }
    out
}

/// Removes the global phase: the first non-negligible amplitude becomes real positive.
fn canonical(v: &CVec) -> CVec {
    let v = v.unscale(v.norm());
    match v.iter().find(|a| a.norm() > 1e-8) {
        Some(a) => {
            let ph = a.conj() / a.norm();
            v.map(|x| x * ph)
        }
        None => v,
    }
}

fn key(v: &CVec) -> Vec<(i64, i64)> {
    v.iter().map(|a| ((a.re * 1e7).round() as i64, (a.im * 1e7).round() as i64)).collect()
}

/// The 6 single-qubit stabilizer states.
pub fn qubit() -> Vec<CVec> {
    orbit(&objects::basis_vector(2, 0), &[objects::hadamard(), objects::s_gate()])
}

/// The 60 two-qubit stabilizer states.
pub fn two_qubit() -> Vec<CVec> {
    let i2 = linalg::eye(2);
    let gens = [
        linalg::kron(&objects::hadamard(), &i2),
        linalg::kron(&i2, &objects::hadamard()),
        linalg::kron(&objects::s_gate(), &i2),
        linalg::kron(&i2, &objects::s_gate()),
        objects::cnot(),
    ];
    orbit(&objects::basis_vector(4, 0), &gens)
}

/// The 12 single-qutrit stabilizer states.
pub fn qutrit() -> Vec<CVec> {
    let w = 2.0 * PI / 3.0;
    let s = 1.0 / 3f64.sqrt();
    let fourier = CMat::from_fn(3, 3, |j, k| c((w * (j * k) as f64).cos() * s, (w * (j * k) as f64).sin() * s));
    // |j⟩ ↦ ω^{j(j−1)/2}|j⟩
    let phase = CMat::from_diagonal(&CVec::from_fn(3, |j, _| {
        let e = (j * j.saturating_sub(1) / 2) as f64;
        c((w * e).cos(), (w * e).sin())
    }));
    orbit(&objects::basis_vector(3, 0), &[fourier, phase])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_sizes() {
        assert_eq!(qubit().len(), 6);
        assert_eq!(two_qubit().len(), 60);
        assert_eq!(qutrit().len(), 12);
    }

    #[test]
    fn orbits_are_normalised_and_distinct() {
        for set in [qubit(), two_qubit(), qutrit()] {
            for (i, a) in set.iter().enumerate() {
                assert!((a.norm() - 1.0).abs() < 1e-12);
                for b in &set[i + 1..] {
                    assert!(a.dotc(b).norm() < 1.0 - 1e-6);
                }
            }
        }
    }
}
