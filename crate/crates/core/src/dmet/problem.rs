use nalgebra::DMatrix;

use crate::hamiltonian::MolecularHamiltonian;
use crate::integrals::IntegralSet;
use crate::linalg::{coulomb_exchange, Eri};
use crate::{Error, Result};

use super::bath::EmbeddingBasis;

/// Interacting Hamiltonian over `[fragment | bath]` orbitals. The first
/// `frag_indices.len()` orbitals belong to the fragment.
#[derive(Debug, Clone)]
pub struct EmbeddingProblem {
    /// Bare one-electron integrals projected into the embedding space.
    pub h_core: DMatrix<f64>,
    /// Mean-field Coulomb and exchange field of the frozen environment electrons.
    pub v_env: DMatrix<f64>,
    /// `h_core + v_env - mu` on the fragment diagonal.
    pub h_emb: DMatrix<f64>,
    pub eri: Eri,
    pub n_elec: usize,
    pub mu: f64,
    pub frag_indices: Vec<usize>,
    /// Per-spin mean-field 1-RDM in this basis; used as an SCF guess.
    pub guess: DMatrix<f64>,
}

impl EmbeddingProblem {
    pub fn n_orbitals(&self) -> usize {
        self.h_core.nrows()
    }

    pub fn n_frag(&self) -> usize {
        self.frag_indices.len()
    }

    /// Same problem with the fragment potential shifted to `mu`.
    pub fn with_mu(&self, mu: f64) -> Self {
        let mut out = self.clone();
        out.mu = mu;
        out.h_emb = &self.h_core + &self.v_env;
        for &i in &self.frag_indices {
            out.h_emb[(i, i)] -= mu;
        }
        out
    }

    pub fn hamiltonian(&self) -> MolecularHamiltonian {
        MolecularHamiltonian {
            h: self.h_emb.clone(),
            eri: self.eri.clone(),
            constant: 0.0,
            n_elec: self.n_elec,
        }
    }

    pub fn fragment_electrons(&self, rdm1: &DMatrix<f64>) -> f64 {
        self.frag_indices.iter().map(|&i| rdm1[(i, i)]).sum()
    }
}

/// Project the full problem onto the embedding orbitals at potential `mu`.
pub fn build_embedding_problem(
    ints: &IntegralSet,
    x: &DMatrix<f64>,
    basis: &EmbeddingBasis,
    mu: f64,
) -> Result<EmbeddingProblem> {
    let n = ints.n_ao();
    if x.nrows() != n || basis.frag_orbitals.nrows() != n {
        return Err(Error::Dimension(format!(
            "integrals over {n} AOs, Löwdin transform {}x{}, embedding basis over {} orbitals",
            x.nrows(),
            x.ncols(),
            basis.frag_orbitals.nrows()
        )));
    }
    let c = x * basis.orbitals();
    let h_core = c.transpose() * &ints.h_core * &c;
    let x_core = x * &basis.env_occupied;
    let d_env = &x_core * x_core.transpose() * 2.0;
    let v_env = if basis.env_occupied.ncols() == 0 {
        DMatrix::zeros(c.ncols(), c.ncols())
    } else {
        let (j, k) = coulomb_exchange(&ints.eri, &d_env);
        let v = j - k * 0.5;
        c.transpose() * v * &c
    };
    let n_frag = basis.n_frag();
    let prob = EmbeddingProblem {
        h_emb: h_core.clone(),
        h_core,
        v_env,
        eri: ints.eri.transform(&c),
        n_elec: basis.n_elec_emb,
        mu: 0.0,
        frag_indices: (0..n_frag).collect(),
        guess: basis.gamma_emb.clone(),
    };
    Ok(prob.with_mu(mu))
}

/// Fragment-attributed energy from spin-summed embedding RDMs:
///
/// `sum_{p in A} [ sum_q (h + v_env/2)_pq g_pq + 1/2 sum_qrs (pq|rs) G_pqrs ]`
pub fn fragment_energy(prob: &EmbeddingProblem, rdm1: &DMatrix<f64>, rdm2: &[f64]) -> f64 {
    let n = prob.n_orbitals();
    let mut e = 0.0;
    for &p in &prob.frag_indices {
        for q in 0..n {
            e += (prob.h_core[(p, q)] + 0.5 * prob.v_env[(p, q)]) * rdm1[(p, q)];
        }
        let base = p * n * n * n;
        let eri = &prob.eri.as_slice()[base..base + n * n * n];
        let g = &rdm2[base..base + n * n * n];
        e += 0.5 * eri.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
    }
    e
}
