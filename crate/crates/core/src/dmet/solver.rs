use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::integrals::IntegralSet;
use crate::linalg::mean_field_rdm2;
use crate::scf::{run_rhf, ScfOptions, ScfSolution};
use crate::Result;

use super::active::fold_active_space;
use super::fci::{fci_ground_state, MAX_SPIN_ORBITALS};
use super::plan::ActiveSpace;
use super::problem::{fragment_energy, EmbeddingProblem};

/// Sampling diagnostics attached by stochastic solvers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    /// Standard error of the embedding-Hamiltonian energy.
    pub energy_std: f64,
    pub survival_fraction: Option<f64>,
    pub spam_condition: Option<f64>,
    pub parameters: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FragmentSolution {
    /// Spin-summed 1-RDM over the embedding orbitals.
    pub rdm1: DMatrix<f64>,
    /// Spin-summed 2-RDM, row-major `[p,q,r,s]`.
    pub rdm2: Vec<f64>,
    pub e_frag: f64,
    pub n_frag_elec: f64,
    /// Ground-state energy of the embedding Hamiltonian at the current mu.
    pub e_embedding: f64,
    /// Mean-field energy of the same Hamiltonian.
    pub e_mean_field: f64,
    pub diagnostics: Option<SolverDiagnostics>,
}

impl FragmentSolution {
    pub fn from_rdms(
        prob: &EmbeddingProblem,
        rdm1: DMatrix<f64>,
        rdm2: Vec<f64>,
        e_embedding: f64,
        e_mean_field: f64,
    ) -> Self {
        Self {
            e_frag: fragment_energy(prob, &rdm1, &rdm2),
            n_frag_elec: prob.fragment_electrons(&rdm1),
            rdm1,
            rdm2,
            e_embedding,
            e_mean_field,
            diagnostics: None,
        }
    }

    /// Correlation energy of the embedding Hamiltonian.
    pub fn e_corr(&self) -> f64 {
        self.e_embedding - self.e_mean_field
    }
}

/// A method that solves an embedding problem for its RDMs.
///
/// `solve` is called repeatedly inside the chemical-potential search;
/// `finalize` runs once at the converged potential and may replace the
/// solution (e.g. by a sampled evaluation).
pub trait FragmentSolver: Send + Sync {
    fn name(&self) -> String;

    fn solve(&self, prob: &EmbeddingProblem) -> Result<FragmentSolution>;

    fn finalize(&self, prob: &EmbeddingProblem, solution: FragmentSolution) -> Result<FragmentSolution> {
        let _ = prob;
        Ok(solution)
    }
}

/// Hartree-Fock of the embedding Hamiltonian, seeded with the projected
/// mean-field density.
pub fn embedding_mean_field(prob: &EmbeddingProblem) -> Result<ScfSolution> {
    let ints = IntegralSet::orthonormal(prob.h_emb.clone(), prob.eri.clone(), 0.0);
    let opts = ScfOptions {
        initial_density: Some(prob.guess.clone()),
        ..ScfOptions::default()
    };
    match run_rhf(&ints, prob.n_elec, &opts) {
        Ok(s) => Ok(s),
        // the projected guess can sit on a saddle at large |mu|; fall back
        Err(_) => run_rhf(&ints, prob.n_elec, &ScfOptions::default()),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeanFieldSolver;

impl FragmentSolver for MeanFieldSolver {
    fn name(&self) -> String {
        "mean-field".into()
    }

    fn solve(&self, prob: &EmbeddingProblem) -> Result<FragmentSolution> {
        let scf = embedding_mean_field(prob)?;
        let rdm2 = mean_field_rdm2(&scf.density);
        Ok(FragmentSolution::from_rdms(
            prob,
            scf.density.clone(),
            rdm2,
            scf.e_total,
            scf.e_total,
        ))
    }
}

/// Exact diagonalization, optionally in an active window around the
/// embedding mean-field Fermi level.
#[derive(Debug, Clone, Copy, Default)]
pub struct FciSolver {
    pub active_space: Option<ActiveSpace>,
}

impl FragmentSolver for FciSolver {
    fn name(&self) -> String {
        match self.active_space {
            None => "exact-diagonalization".into(),
            Some(a) => format!("exact-diagonalization({}e,{}so)", a.n_elec, a.n_spin_orbitals),
        }
    }

    fn solve(&self, prob: &EmbeddingProblem) -> Result<FragmentSolution> {
        let scf = embedding_mean_field(prob)?;
        let ham = prob.hamiltonian();
        match self.active_space {
            None => {
                let sol = fci_ground_state(&ham)?;
                Ok(FragmentSolution::from_rdms(prob, sol.rdm1, sol.rdm2, sol.energy, scf.e_total))
            }
            Some(space) => {
                if space.n_spin_orbitals > MAX_SPIN_ORBITALS {
                    return Err(crate::Error::SpaceTooLarge {
                        n_spin_orbitals: space.n_spin_orbitals,
                        limit: MAX_SPIN_ORBITALS,
                    });
                }
                let act = fold_active_space(&ham, &scf.mo_coeffs, &space)?;
                let sol = fci_ground_state(&act.hamiltonian)?;
                let (d1, d2) = act.expand_rdms(&sol.rdm1, &sol.rdm2);
                Ok(FragmentSolution::from_rdms(prob, d1, d2, sol.energy, scf.e_total))
            }
        }
    }
}

/// Exact solution of the full embedding problem.
pub fn solve_fragment_fci(prob: &EmbeddingProblem) -> Result<FragmentSolution> {
    FciSolver::default().solve(prob)
}
