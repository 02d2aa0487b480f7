use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vqrd::conic::{self, HermExpr, LinExpr, Model, SolveOptions, SolveStatus};
use vqrd::qcore::linalg::{self, CMat};
use vqrd::qcore::random;

/// Eigenvalues straight from nalgebra, bypassing the library wrapper.
fn spectrum(c: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = c.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn herm(seed: u64, d: usize) -> CMat {
    random::hermitian(&mut ChaCha8Rng::seed_from_u64(seed), d).into_matrix()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ground_energy_over_states(seed in any::<u64>(), d in 2usize..5) {
        let c = herm(seed, d);
        let mut m = Model::new("ground");
        let rho = m.psd_var(d);
        m.eq(&rho.trace(), &LinExpr::constant(1.0));
        m.minimize(&rho.trace_with(&c));
        let s = m.solve(&SolveOptions::default()).unwrap();
        prop_assert!((s.value - spectrum(&c)[0]).abs() < 1e-7);
        // The returned point is a state.
        let x = s.eval_herm(&rho);
        prop_assert!(linalg::min_eigenvalue(&x) > -1e-7);
        prop_assert!((linalg::re_trace(&x) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn lmi_bound_is_top_eigenvalue(seed in any::<u64>(), d in 2usize..5) {
        // min t s.t. C ⪯ tI.
        let c = herm(seed, d);
        let mut m = Model::new("top");
        let t = m.var();
        m.loewner_leq(&HermExpr::constant(c.clone()), &HermExpr::identity_times(&t, d));
        m.minimize(&t);
        let s = m.solve(&SolveOptions::default()).unwrap();
        let top = *spectrum(&c).last().unwrap();
        prop_assert!((s.value - top).abs() < 1e-7);
        prop_assert!(linalg::max_eigenvalue(&(&c - linalg::eye(d) * linalg::cr(s.eval(&t)))) < 1e-6);
    }

    #[test]
    fn box_lp_and_weak_duality(c in prop::collection::vec(-3.0f64..3.0, 1..8)) {
        let mut m = Model::new("box");
        let mut obj = LinExpr::constant(0.0);
        for &ci in &c {
            let x = m.nonneg_var();
            m.leq(&x, &LinExpr::constant(1.0));
            obj = &obj + &x.scale(ci);
        }
        m.minimize(&obj);
        let raw = conic::solve(&m.program(), &SolveOptions::default());
        prop_assert_eq!(raw.status, SolveStatus::Optimal);
        let want: f64 = c.iter().map(|v| v.min(0.0)).sum();
        prop_assert!((raw.primal_objective - want).abs() < 1e-7);
        prop_assert!(raw.primal_objective >= raw.dual_objective - 1e-7);
        prop_assert!(raw.primal_residual <= 1e-6 && raw.dual_residual <= 1e-6);
    }
}

#[test]
fn conflicting_equalities_are_infeasible() {
    let mut m = Model::new("clash");
    let x = m.var();
    m.eq(&x, &LinExpr::constant(1.0));
    m.eq(&x, &LinExpr::constant(2.0));
    m.minimize(&x);
    assert_eq!(m.solve_raw(&SolveOptions::default()).status, SolveStatus::Infeasible);
}
