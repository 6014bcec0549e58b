use nalgebra::DMatrix;

use crate::linalg::Eri;

/// Spin-free electronic Hamiltonian over an orthonormal set of spatial
/// orbitals:
///
/// `H = constant + sum_pq h_pq E_pq + 1/2 sum_pqrs (pq|rs) (E_pq E_rs - delta_qr E_ps)`
///
/// The common currency between the embedding, the exact solver and the
/// qubit mapping.
#[derive(Debug, Clone)]
pub struct MolecularHamiltonian {
    pub h: DMatrix<f64>,
    pub eri: Eri,
    pub constant: f64,
    pub n_elec: usize,
}

impl MolecularHamiltonian {
    pub fn n_orbitals(&self) -> usize {
        self.h.nrows()
    }

    /// Energy of a state described by spin-summed RDMs
    /// (`rdm2[p,q,r,s] = sum_{st} <a+_ps a+_rt a_st a_qs>`).
    pub fn energy_from_rdms(&self, rdm1: &DMatrix<f64>, rdm2: &[f64]) -> f64 {
        let n = self.n_orbitals();
        let mut e = self.constant;
        for p in 0..n {
            for q in 0..n {
                e += self.h[(p, q)] * rdm1[(p, q)];
            }
        }
        let eri = self.eri.as_slice();
        let two: f64 = eri.iter().zip(rdm2).map(|(a, b)| a * b).sum();
        e + 0.5 * two
    }

    /// Rotate into a new orthonormal orbital set given by the columns of `c`.
    pub fn rotated(&self, c: &DMatrix<f64>) -> MolecularHamiltonian {
        MolecularHamiltonian {
            h: c.transpose() * &self.h * c,
            eri: self.eri.transform(c),
            constant: self.constant,
            n_elec: self.n_elec,
        }
    }
}
