use nalgebra::DMatrix;
use proptest::prelude::*;
use tdpf::linalg::{self, OperatorMatrix};
use tdpf::mpf::{moment_residual, solve_coefficients};
use tdpf::resources::{choose_trotter_steps, steps_for_power_law};
use tdpf::{models, oracle, suzuki_plan, Family, Pauli, PauliSum, C64};

fn matrix(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
        .prop_map(move |v| DMatrix::from_iterator(dim, dim, v.into_iter().map(|(re, im)| C64::new(re, im))))
}

fn hermitian(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    matrix(dim).prop_map(|a| (&a + a.adjoint()) * C64::new(0.5, 0.0))
}

fn norm(a: &OperatorMatrix) -> f64 {
    linalg::spectral_norm(a).unwrap()
}

fn svd_norm(a: &OperatorMatrix) -> f64 {
    a.clone().svd(false, false).singular_values.max()
}

fn pauli_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    let string = (prop::collection::vec(0usize..4, n), -1.0f64..1.0, -1.0f64..1.0);
    prop::collection::vec(string, 1..6).prop_map(move |strings| {
        let mut s = PauliSum::zero(n);
        for (labels, re, im) in strings {
            let sites: Vec<(usize, Pauli)> = labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l > 0)
                .map(|(i, &l)| (i, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][l]))
                .collect();
            s.add_scaled(&PauliSum::from_string(&sites, n, C64::new(re, im)).unwrap(), C64::new(1.0, 0.0));
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_is_a_submultiplicative_norm(a in matrix(4), b in matrix(4), c in -3.0f64..3.0) {
        let (na, nb) = (norm(&a), norm(&b));
        prop_assert!((norm(&(&a * C64::new(c, 0.0))) - c.abs() * na).abs() <= 1e-12 * (1.0 + na));
        prop_assert!(norm(&(&a + &b)) <= (na + nb) * (1.0 + 1e-12));
        prop_assert!(norm(&(&a * &b)) <= na * nb * (1.0 + 1e-12));
        prop_assert!((na - svd_norm(&a)).abs() <= 1e-10 * na);
    }

    #[test]
    fn large_hermitian_norm_matches_svd(h in hermitian(72)) {
        let (lanczos, dense) = (norm(&h), svd_norm(&h));
        prop_assert!((lanczos - dense).abs() <= 1e-10 * dense, "{} vs {}", lanczos, dense);
    }

    #[test]
    fn skew_hermitian_exponential_is_unitary(h in hermitian(6), s in -4.0f64..4.0) {
        let u = linalg::matrix_exp(&(&h * C64::new(0.0, -s))).unwrap();
        let back = linalg::matrix_exp(&(&h * C64::new(0.0, s))).unwrap();
        let id = linalg::identity(6);
        prop_assert!(norm(&(u.adjoint() * &u - &id)) <= 1e-10);
        prop_assert!(norm(&(&u * back - id)) <= 1e-10);
    }

    #[test]
    fn commutator_is_antisymmetric_and_satisfies_jacobi(a in matrix(3), b in matrix(3), c in matrix(3)) {
        let comm = |x: &OperatorMatrix, y: &OperatorMatrix| linalg::commutator(x, y).unwrap();
        prop_assert!(norm(&(comm(&a, &b) + comm(&b, &a))) <= 1e-12);
        let jacobi = comm(&a, &comm(&b, &c)) + comm(&b, &comm(&c, &a)) + comm(&c, &comm(&a, &b));
        prop_assert!(norm(&jacobi) <= 1e-11);
    }

    #[test]
    fn pauli_algebra_matches_dense(a in pauli_sum(3), b in pauli_sum(3)) {
        let (da, db) = (a.to_dense(), b.to_dense());
        prop_assert!(norm(&(a.mul(&b).to_dense() - &da * &db)) <= 1e-12);
        prop_assert!(norm(&(a.commutator(&b).to_dense() - (&da * &db - &db * &da))) <= 1e-12);
        prop_assert!(norm(&(a.adjoint().to_dense() - da.adjoint())) <= 1e-14);
        prop_assert!((a.norm() - norm(&da)).abs() <= 1e-10 * (1.0 + norm(&da)));
    }

    #[test]
    fn sparse_pauli_norm_matches_dense(a in pauli_sum(7), b in pauli_sum(7)) {
        let g = a.commutator(&b);
        if !g.is_empty() {
            let dense = svd_norm(&g.to_dense());
            prop_assert!((g.norm() - dense).abs() <= 1e-9 * dense);
        }
    }

    #[test]
    fn chosen_steps_are_minimal(c in 0.01f64..100.0, p in 1usize..5, t in 0.1f64..5.0, eps in 1e-6f64..1e-1) {
        let bound = |tau: f64| Ok(c * tau.powi(p as i32 + 1));
        let r = choose_trotter_steps(bound, t, eps).unwrap();
        let total = |r: u64| r as f64 * bound(t / r as f64).unwrap();
        prop_assert!(total(r) <= eps);
        if r > 1 {
            prop_assert!(total(r - 1) > eps);
        }
        prop_assert_eq!(steps_for_power_law(c, p, t, eps).unwrap(), r);
    }

    #[test]
    fn mpf_coefficients_cancel_low_moments(mut k in prop::collection::btree_set(1usize..12, 1..6)) {
        let k: Vec<usize> = std::mem::take(&mut k).into_iter().collect();
        let c = solve_coefficients(&k).unwrap();
        prop_assert!((c.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(moment_residual(&k, &c) <= 1e-8);
    }

    #[test]
    fn plans_cover_every_term_once(p in prop::sample::select(vec![1usize, 2, 4, 6]), gamma in 1usize..5) {
        for family in [Family::ExactSegment, Family::Instantaneous] {
            let plan = suzuki_plan(p, gamma, family).unwrap();
            for g in 0..gamma {
                let total: f64 = plan.stages.iter().filter(|s| s.gamma == g).map(|s| s.alpha).sum();
                prop_assert!((total - 1.0).abs() <= 1e-12, "γ={} total {}", g, total);
            }
        }
    }

    #[test]
    fn oracle_composes(t0 in 0.0f64..1.0, d1 in 0.05f64..0.8, d2 in 0.05f64..0.8) {
        let h = models::driven_chain(2, 6).unwrap();
        let tol = 1e-12;
        let a = oracle::evolve_hamiltonian(&h, t0, t0 + d1, tol).unwrap();
        let b = oracle::evolve_hamiltonian(&h, t0 + d1, t0 + d1 + d2, tol).unwrap();
        let whole = oracle::evolve_hamiltonian(&h, t0, t0 + d1 + d2, tol).unwrap();
        prop_assert!(norm(&(b * a - whole)) <= 1e-10);
    }
}
