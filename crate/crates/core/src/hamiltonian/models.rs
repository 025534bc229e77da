//! Shipped models used by tests, benches and the CLI defaults.

use crate::error::Result;
use crate::linalg::{Pauli, C64};
use crate::pauli::PauliSum;
use crate::time_functions::ScalarCurve;

use super::{build_nn_chain, Field, Hamiltonian, ModelMeta, Operator, OperatorCurve};

/// XX + 0.5 YY + 0.25 ZZ
pub fn xxz_bond() -> Vec<(Pauli, Pauli, f64)> {
    vec![(Pauli::X, Pauli::X, 1.0), (Pauli::Y, Pauli::Y, 0.5), (Pauli::Z, Pauli::Z, 0.25)]
}

fn drive_field(budget: usize) -> Field {
    Field { pauli: Pauli::Z, curve: ScalarCurve::trig(0.8, 1.9, 0.3, budget) }
}

/// Open chain with bond-dependent couplings J_i(τ) = 1 + 0.5 cos(1.3τ + 0.7i)
/// and a field 0.8 cos(1.9τ + 0.3) Σ Z_i.
pub fn driven_chain(n: usize, budget: usize) -> Result<Hamiltonian> {
    let couplings: Vec<_> =
        (0..n.saturating_sub(1)).map(|i| ScalarCurve::offset_trig(1.0, 0.5, 1.3, 0.7 * i as f64, budget)).collect();
    build_nn_chain(n, &xxz_bond(), &couplings, false, Some(&drive_field(budget)), budget)
}

/// Periodic chain with uniform couplings 1 + 0.5 cos(1.3τ); every site is equivalent, so
/// commutator sums grow linearly in N.
pub fn ring_chain(n: usize, budget: usize) -> Result<Hamiltonian> {
    let bonds = if n > 2 { n } else { n - 1 };
    let couplings = vec![ScalarCurve::offset_trig(1.0, 0.5, 1.3, 0.0, budget); bonds];
    build_nn_chain(n, &xxz_bond(), &couplings, true, Some(&drive_field(budget)), budget)
}

fn single_term(n: usize, sites: &[(usize, Pauli)], curve: ScalarCurve, budget: usize) -> Result<OperatorCurve> {
    let op = PauliSum::from_string(sites, n, C64::new(1.0, 0.0))?;
    OperatorCurve::from_summands(1 << n, budget, vec![(Operator::Pauli(op), curve)])
}

fn custom(n: usize, terms: Vec<OperatorCurve>) -> Result<Hamiltonian> {
    let gates = terms.iter().map(|t| t.summands().len()).sum();
    let mut meta = ModelMeta::custom(gates);
    meta.n_qubits = Some(n);
    Hamiltonian::new(terms, meta)
}

/// H_1 = a X, H_2 = b Z on one qubit.
pub fn static_xz(a: f64, b: f64, budget: usize) -> Result<Hamiltonian> {
    custom(
        1,
        vec![
            single_term(1, &[(0, Pauli::X)], ScalarCurve::constant(a, budget), budget)?,
            single_term(1, &[(0, Pauli::Z)], ScalarCurve::constant(b, budget), budget)?,
        ],
    )
}

/// H_1 = Z⊗I, H_2 = I⊗Z.
pub fn commuting_pair(budget: usize) -> Result<Hamiltonian> {
    custom(
        2,
        vec![
            single_term(2, &[(0, Pauli::Z)], ScalarCurve::constant(1.0, budget), budget)?,
            single_term(2, &[(1, Pauli::Z)], ScalarCurve::constant(0.7, budget), budget)?,
        ],
    )
}

/// Γ commuting static terms Z_0, Z_1, Z_0 Z_1, ...
pub fn commuting_static(gamma: usize, budget: usize) -> Result<Hamiltonian> {
    let strings: [&[(usize, Pauli)]; 3] = [&[(0, Pauli::Z)], &[(1, Pauli::Z)], &[(0, Pauli::Z), (1, Pauli::Z)]];
    let terms = (0..gamma)
        .map(|g| {
            let c = ScalarCurve::constant(0.9 - 0.2 * g as f64, budget);
            single_term(2, strings[g % 3], c, budget)
        })
        .collect::<Result<_>>()?;
    custom(2, terms)
}

/// Single-mode drive: H_1 = Δ·Z (static), H_2 = A cos(ωτ)·X on one qubit, and on two qubits
/// H_1 = Δ(Z_0 + Z_1) + J Z_0 Z_1, H_2 = A cos(ωτ)(X_0 + X_1).
pub fn cosine_drive(n: usize, omega: f64, budget: usize) -> Result<Hamiltonian> {
    const DELTA: f64 = 0.6;
    const AMP: f64 = 0.8;
    const J: f64 = 0.4;
    let dim = 1 << n;
    let one = C64::new(1.0, 0.0);
    let mut static_op = PauliSum::zero(n);
    let mut drive_op = PauliSum::zero(n);
    for i in 0..n {
        static_op.add_scaled(&PauliSum::from_string(&[(i, Pauli::Z)], n, one)?, C64::new(DELTA, 0.0));
        drive_op.add_scaled(&PauliSum::from_string(&[(i, Pauli::X)], n, one)?, one);
    }
    if n == 2 {
        static_op.add_scaled(&PauliSum::from_string(&[(0, Pauli::Z), (1, Pauli::Z)], n, one)?, C64::new(J, 0.0));
    }
    let h1 = OperatorCurve::from_summands(
        dim,
        budget,
        vec![(Operator::Pauli(static_op), ScalarCurve::constant(1.0, budget))],
    )?;
    let h2 = OperatorCurve::from_summands(
        dim,
        budget,
        vec![(Operator::Pauli(drive_op), ScalarCurve::trig(AMP, omega, 0.0, budget))],
    )?;
    custom(n, vec![h1, h2])
}

/// Single qubit H_1 = f(τ) X, H_2 = g(τ) Z.
pub fn single_qubit(f: ScalarCurve, g: ScalarCurve, budget: usize) -> Result<Hamiltonian> {
    custom(1, vec![single_term(1, &[(0, Pauli::X)], f, budget)?, single_term(1, &[(0, Pauli::Z)], g, budget)?])
}
