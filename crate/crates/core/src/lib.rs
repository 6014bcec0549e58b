//! Quantum-embedding workbench for protein-ligand binding energies.
//!
//! The pipeline runs restricted Hartree-Fock on a ligand (optionally inside a
//! field of fixed point charges), partitions it with density matrix embedding
//! theory, and solves one fragment with a simulated variational quantum
//! eigensolver using the single-parameter YXXX ansatz. Shot noise, readout
//! noise and gate noise are emulated, and the results can be post-processed
//! with symmetry verification and readout (SPAM) correction.
//!
//! Modules, bottom-up:
//!
//! - [`integrals`]: geometry/charge ingestion, STO-3G basis, one- and
//!   two-electron integrals (McMurchie-Davidson).
//! - [`scf`]: RHF with DIIS, Löwdin orthogonalization, localized 1-RDM.
//! - [`dmet`]: fragments, bath orbitals, embedding Hamiltonians, the exact
//!   diagonalization solver and the chemical-potential loop.
//! - [`qubitmap`]: fermionic operators, Jordan-Wigner, measurement grouping
//!   and Z2 symmetries.
//! - [`qsim`]: circuits, statevector simulation, shot sampling with noise.
//! - [`vqe`]: the VQE fragment solver and error mitigation.
//! - [`workflow`]: binding energies, ranking statistics, run configs and
//!   reports.
//! - [`oracle`]: brute-force reference implementations used for
//!   cross-checks.

pub mod dmet;
pub mod error;
pub mod hamiltonian;
pub mod integrals;
pub mod linalg;
pub mod oracle;
pub mod qsim;
pub mod qubitmap;
pub mod scf;
pub mod vqe;
pub mod workflow;

pub use error::{Error, Result};
pub use hamiltonian::MolecularHamiltonian;
