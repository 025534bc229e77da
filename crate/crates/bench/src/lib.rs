//! Benchmark fixtures shared by the criterion benches.

use tdpf::{models, Hamiltonian};

/// The open driven chain at the sizes the scaling experiments use.
pub fn chain(n: usize) -> Hamiltonian {
    models::driven_chain(n, 6).expect("driven chain builds")
}
