//! Gaussian basis functions and molecular integrals, including the
//! electrostatic field of fixed external point charges.
//!
//! All internal quantities are atomic units (bohr, Hartree); files are read
//! in Ångström.

pub mod basis;
pub mod md;
pub mod molecule;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use basis::{build_basis, AngularMomentum, AtomicOrbital, BasisSet, Shell};
pub use molecule::{
    atomic_number, distance, load_geometry, load_point_charges, to_xyz, Atom, Molecule,
    PointCharge, PointChargeEnvironment, BOHR_PER_ANGSTROM,
};

use crate::linalg::Eri;
use md::{pair_coulomb, pair_repulsion, primitive_kinetic, primitive_overlap, PrimitivePair};

/// AO-basis integrals for one molecule in one point-charge environment.
///
/// `e_nuc` holds nucleus-nucleus and nucleus-point-charge repulsion. The
/// charge-charge self energy of the environment is not included.
#[derive(Debug, Clone)]
pub struct IntegralSet {
    pub overlap: DMatrix<f64>,
    pub h_core: DMatrix<f64>,
    pub eri: Eri,
    pub e_nuc: f64,
}

impl IntegralSet {
    pub fn n_ao(&self) -> usize {
        self.overlap.nrows()
    }

    /// Integrals expressed over an already orthonormal orbital set.
    pub fn orthonormal(h_core: DMatrix<f64>, eri: Eri, e_nuc: f64) -> Self {
        let n = h_core.nrows();
        Self {
            overlap: DMatrix::identity(n, n),
            h_core,
            eri,
            e_nuc,
        }
    }

    /// Reorder AOs (new index `i` takes old AO `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n_ao();
        let pm = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(perm[i], perm[j])]);
        Self {
            overlap: pm(&self.overlap),
            h_core: pm(&self.h_core),
            eri: self.eri.permuted(perm),
            e_nuc: self.e_nuc,
        }
    }
}

fn pair_primitives(a: &AtomicOrbital, b: &AtomicOrbital) -> Vec<PrimitivePair> {
    let mut out = Vec::with_capacity(a.primitives.len() * b.primitives.len());
    for &(ea, ca) in &a.primitives {
        for &(eb, cb) in &b.primitives {
            out.push(PrimitivePair::new(
                ea, a.powers, a.center, eb, b.powers, b.center, ca * cb,
            ));
        }
    }
    out
}

pub fn overlap_matrix(basis: &BasisSet) -> DMatrix<f64> {
    one_electron(basis, |a, b| {
        let mut s = 0.0;
        for &(ea, ca) in &a.primitives {
            for &(eb, cb) in &b.primitives {
                s += ca * cb * primitive_overlap(ea, a.powers, a.center, eb, b.powers, b.center);
            }
        }
        s
    })
}

pub fn kinetic_matrix(basis: &BasisSet) -> DMatrix<f64> {
    one_electron(basis, |a, b| {
        let mut s = 0.0;
        for &(ea, ca) in &a.primitives {
            for &(eb, cb) in &b.primitives {
                s += ca * cb * primitive_kinetic(ea, a.powers, a.center, eb, b.powers, b.center);
            }
        }
        s
    })
}

/// Attraction of an electron to a set of positive charges `(q, position)`:
/// `-sum_C q_C <a|1/|r-C||b>`.
pub fn attraction_matrix(basis: &BasisSet, charges: &[(f64, [f64; 3])]) -> DMatrix<f64> {
    one_electron(basis, |a, b| {
        let pairs = pair_primitives(a, b);
        let mut v = 0.0;
        for &(q, c) in charges {
            let mut acc = 0.0;
            for pp in &pairs {
                acc += pp.coef * pair_coulomb(pp, c);
            }
            v -= q * acc;
        }
        v
    })
}

fn one_electron(
    basis: &BasisSet,
    f: impl Fn(&AtomicOrbital, &AtomicOrbital) -> f64 + Sync,
) -> DMatrix<f64> {
    let n = basis.n_ao;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = f(&basis.aos[i], &basis.aos[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Two-electron repulsion integrals `(pq|rs)`; each unique quartet is
/// computed once and scattered to its eight equivalent positions.
pub fn repulsion_tensor(basis: &BasisSet) -> Eri {
    let n = basis.n_ao;
    let mut pair_index = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            pair_index.push((i, j));
        }
    }
    let pairs: Vec<Vec<PrimitivePair>> = pair_index
        .iter()
        .map(|&(i, j)| pair_primitives(&basis.aos[i], &basis.aos[j]))
        .collect();
    // rows are independent, so the parallel result does not depend on scheduling
    let rows: Vec<Vec<f64>> = (0..pairs.len())
        .into_par_iter()
        .map(|ij| {
            (0..=ij)
                .map(|kl| {
                    let mut v = 0.0;
                    for a in &pairs[ij] {
                        for b in &pairs[kl] {
                            v += a.coef * b.coef * pair_repulsion(a, b);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let mut eri = Eri::zeros(n);
    for (ij, row) in rows.iter().enumerate() {
        let (i, j) = pair_index[ij];
        for (kl, &v) in row.iter().enumerate() {
            let (k, l) = pair_index[kl];
            eri.set_sym8(i, j, k, l, v);
        }
    }
    eri
}

pub fn compute_integrals(
    mol: &Molecule,
    basis: &BasisSet,
    env: &PointChargeEnvironment,
) -> IntegralSet {
    let overlap = overlap_matrix(basis);
    let kinetic = kinetic_matrix(basis);
    let nuclei: Vec<(f64, [f64; 3])> = mol
        .atoms
        .iter()
        .map(|a| (a.z as f64, a.position))
        .collect();
    let mut h_core = kinetic + attraction_matrix(basis, &nuclei);
    if !env.is_empty() {
        let ext: Vec<(f64, [f64; 3])> = env.charges.iter().map(|c| (c.q, c.position)).collect();
        h_core += attraction_matrix(basis, &ext);
    }
    let mut e_nuc = mol.nuclear_repulsion();
    for a in &mol.atoms {
        for c in &env.charges {
            e_nuc += a.z as f64 * c.q / distance(&a.position, &c.position);
        }
    }
    IntegralSet {
        overlap,
        h_core,
        eri: repulsion_tensor(basis),
        e_nuc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, sym_eigen, symmetry_error};

    fn h2() -> Molecule {
        Molecule::from_bohr(&[("H", [0.0, 0.0, 0.0]), ("H", [0.0, 0.0, 1.4])], 0).unwrap()
    }

    fn water() -> Molecule {
        Molecule::from_bohr(
            &[
                ("O", [0.0, 0.0, 0.2217]),
                ("H", [0.0, 1.4309, -0.8867]),
                ("H", [0.0, -1.4309, -0.8867]),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn single_h_normalized() {
        let mol = Molecule::from_bohr(&[("H", [0.3, -0.2, 1.0])], -1).unwrap();
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let ints = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
        assert!((ints.overlap[(0, 0)] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn h2_nuclear_repulsion() {
        let mol = h2();
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let ints = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
        assert!((ints.e_nuc - 1.0 / 1.4).abs() < 1e-12);
        // textbook value for STO-3G H2 at 1.4 bohr
        assert!((ints.overlap[(0, 1)] - 0.6593).abs() < 1e-4);
    }

    #[test]
    fn water_symmetries_and_normalization() {
        let mol = water();
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let ints = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
        for i in 0..basis.n_ao {
            assert!((ints.overlap[(i, i)] - 1.0).abs() < 1e-10);
        }
        assert!(symmetry_error(&ints.overlap) < 1e-12);
        assert!(symmetry_error(&ints.h_core) < 1e-12);
        assert!(ints.eri.symmetry_error() < 1e-12);
        let (vals, _) = sym_eigen(&ints.overlap);
        assert!(vals[0] > 0.0);
    }

    #[test]
    fn translation_invariance() {
        let mol = water();
        let env = PointChargeEnvironment {
            charges: vec![PointCharge {
                q: -0.8,
                position: [1.0, 3.0, 2.5],
            }],
        };
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let a = compute_integrals(&mol, &basis, &env);
        let shift = [0.7, -1.3, 2.9];
        let mol2 = mol.translated(shift);
        let basis2 = build_basis(&mol2, "sto-3g").unwrap();
        let b = compute_integrals(&mol2, &basis2, &env.translated(shift));
        assert!(max_abs(&(&a.overlap - &b.overlap)) < 1e-10);
        assert!(max_abs(&(&a.h_core - &b.h_core)) < 1e-10);
        let d = a
            .eri
            .as_slice()
            .iter()
            .zip(b.eri.as_slice())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(d < 1e-10);
        assert!((a.e_nuc - b.e_nuc).abs() < 1e-10);
    }

    #[test]
    fn zero_charges_reproduce_vacuum() {
        let mol = water();
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let vac = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
        let env = PointChargeEnvironment {
            charges: vec![
                PointCharge { q: 0.0, position: [4.0, 0.0, 0.0] },
                PointCharge { q: 0.0, position: [0.0, -5.0, 1.0] },
            ],
        };
        let zero = compute_integrals(&mol, &basis, &env);
        assert!(max_abs(&(&vac.h_core - &zero.h_core)) < 1e-12);
        assert!((vac.e_nuc - zero.e_nuc).abs() < 1e-12);
    }

    #[test]
    fn charge_on_nucleus_scales_attraction() {
        let mol = water();
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let o = &mol.atoms[0];
        let q = -0.37;
        let with_q = attraction_matrix(&basis, &[(q, o.position)]);
        let nucleus = attraction_matrix(&basis, &[(o.z as f64, o.position)]);
        let scaled = nucleus * (q / o.z as f64);
        assert!(max_abs(&(with_q - scaled)) < 1e-10);
    }
}
