//! Fermion-to-qubit mapping (Jordan-Wigner, interleaved spin-orbitals:
//! qubit `2p` is orbital `p` alpha, `2p + 1` is beta), measurement grouping
//! and Z2 symmetries for post-measurement verification.

pub mod fermion;
pub mod grouping;
pub mod operator;
pub mod pauli;

pub use fermion::{fermion_hamiltonian, jordan_wigner, spin_orbital, FermionOperator, Ladder};
pub use grouping::{
    attach_symmetries, find_z2_symmetries, partition_commuting, MeasurementGroup, Symmetry,
};
pub use operator::{QubitOperator, PRUNE_TOL};
pub use pauli::{Pauli, PauliString};

use crate::hamiltonian::MolecularHamiltonian;
use crate::Result;

/// Qubit Hamiltonian of `ham` with real, pruned coefficients.
pub fn qubit_hamiltonian(ham: &MolecularHamiltonian) -> Result<QubitOperator> {
    jordan_wigner(&fermion_hamiltonian(ham)).hermitian_canonical(1e-10)
}
