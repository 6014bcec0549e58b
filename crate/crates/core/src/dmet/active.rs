use nalgebra::DMatrix;

use crate::hamiltonian::MolecularHamiltonian;
use crate::linalg::{mean_field_rdm2, Eri};
use crate::{Error, Result};

use super::plan::ActiveSpace;

/// A Hamiltonian restricted to an active orbital window, with the doubly
/// occupied orbitals below it folded into `hamiltonian.h` and
/// `hamiltonian.constant`.
#[derive(Debug, Clone)]
pub struct ActiveSpaceProblem {
    pub hamiltonian: MolecularHamiltonian,
    /// Doubly occupied orbitals, columns over the parent basis.
    pub core: DMatrix<f64>,
    /// Active orbitals, columns over the parent basis.
    pub active: DMatrix<f64>,
}

/// Fold the orbitals below the window into an effective Hamiltonian.
/// `mo` holds orthonormal orbitals of `ham` in ascending energy.
pub fn fold_active_space(
    ham: &MolecularHamiltonian,
    mo: &DMatrix<f64>,
    space: &ActiveSpace,
) -> Result<ActiveSpaceProblem> {
    let n = ham.n_orbitals();
    let n_act = space.n_orbitals();
    if space.n_elec > ham.n_elec || (ham.n_elec - space.n_elec) % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "active space with {} electrons incompatible with {} electrons",
            space.n_elec, ham.n_elec
        )));
    }
    let n_core = (ham.n_elec - space.n_elec) / 2;
    if n_core + n_act > n {
        return Err(Error::InvalidArgument(format!(
            "active space needs {} orbitals beyond {n_core} core orbitals but only {n} exist",
            n_act
        )));
    }
    if space.n_elec > 2 * n_act {
        return Err(Error::InvalidArgument(format!(
            "{} electrons do not fit in {n_act} active orbitals",
            space.n_elec
        )));
    }
    let core = mo.columns(0, n_core).clone_owned();
    let active = mo.columns(n_core, n_act).clone_owned();
    let window = mo.columns(0, n_core + n_act).clone_owned();
    let sub = ham.rotated(&window);
    let eri = &sub.eri;

    let mut e_core = ham.constant;
    for i in 0..n_core {
        e_core += 2.0 * sub.h[(i, i)];
        for j in 0..n_core {
            e_core += 2.0 * eri.get(i, i, j, j) - eri.get(i, j, j, i);
        }
    }
    let mut h_eff = DMatrix::zeros(n_act, n_act);
    let mut eri_act = Eri::zeros(n_act);
    for t in 0..n_act {
        for u in 0..n_act {
            let (tt, uu) = (n_core + t, n_core + u);
            let mut v = sub.h[(tt, uu)];
            for i in 0..n_core {
                v += 2.0 * eri.get(tt, uu, i, i) - eri.get(tt, i, i, uu);
            }
            h_eff[(t, u)] = v;
            for w in 0..n_act {
                for x in 0..n_act {
                    eri_act.set(t, u, w, x, eri.get(tt, uu, n_core + w, n_core + x));
                }
            }
        }
    }
    Ok(ActiveSpaceProblem {
        hamiltonian: MolecularHamiltonian {
            h: h_eff,
            eri: eri_act,
            constant: e_core,
            n_elec: space.n_elec,
        },
        core,
        active,
    })
}

impl ActiveSpaceProblem {
    /// Spin-summed RDMs over the parent basis for the product of a doubly
    /// occupied core and the given active-space RDMs.
    pub fn expand_rdms(&self, rdm1_act: &DMatrix<f64>, rdm2_act: &[f64]) -> (DMatrix<f64>, Vec<f64>) {
        let n = self.core.nrows();
        let d_c = &self.core * self.core.transpose() * 2.0;
        let d_a = &self.active * rdm1_act * self.active.transpose();
        let n_act = self.active.ncols();
        let g_act = Eri::from_vec(n_act, rdm2_act.to_vec()).transform(&self.active.transpose());
        let mut rdm2 = mean_field_rdm2(&d_c);
        let g = g_act.as_slice();
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let i = ((p * n + q) * n + r) * n + s;
                        rdm2[i] += d_c[(p, q)] * d_a[(r, s)] + d_a[(p, q)] * d_c[(r, s)]
                            - 0.5 * (d_c[(p, s)] * d_a[(r, q)] + d_a[(p, s)] * d_c[(r, q)])
                            + g[i];
                    }
                }
            }
        }
        (d_c + d_a, rdm2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmet::fci::fci_ground_state;
    use crate::linalg::sym_eigen;

    fn model(n: usize, n_elec: usize) -> MolecularHamiltonian {
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = -2.0 + 0.6 * i as f64;
            if i + 1 < n {
                h[(i, i + 1)] = -0.4;
                h[(i + 1, i)] = -0.4;
            }
        }
        let mut eri = Eri::zeros(n);
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        let v = if p == q && r == s {
                            0.7 / (1.0 + (p as f64 - r as f64).abs())
                        } else {
                            0.02 / (1.0 + (p + q + r + s) as f64)
                        };
                        eri.set_sym8(p, q, r, s, v);
                    }
                }
            }
        }
        MolecularHamiltonian { h, eri, constant: 0.3, n_elec }
    }

    #[test]
    fn full_window_is_identity_fold() {
        let ham = model(3, 2);
        let (_, mo) = sym_eigen(&ham.h);
        let space = ActiveSpace { n_elec: 2, n_spin_orbitals: 6 };
        let act = fold_active_space(&ham, &mo, &space).unwrap();
        let a = fci_ground_state(&act.hamiltonian).unwrap();
        let b = fci_ground_state(&ham).unwrap();
        assert!((a.energy - b.energy).abs() < 1e-10);
    }

    #[test]
    fn expanded_rdms_reproduce_energy() {
        let ham = model(4, 4);
        let (_, mo) = sym_eigen(&ham.h);
        let act = fold_active_space(&ham, &mo, &ActiveSpace::HOMO_LUMO).unwrap();
        let sol = fci_ground_state(&act.hamiltonian).unwrap();
        let (d1, d2) = act.expand_rdms(&sol.rdm1, &sol.rdm2);
        assert!((d1.trace() - 4.0).abs() < 1e-10);
        assert!((ham.energy_from_rdms(&d1, &d2) - sol.energy).abs() < 1e-10);
    }
}
