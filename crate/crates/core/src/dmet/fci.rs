//! Determinant-based exact diagonalization in the `S_z = 0` sector.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::hamiltonian::MolecularHamiltonian;
use crate::linalg::sym_eigen;
use crate::{Error, Result};

pub const MAX_SPIN_ORBITALS: usize = 16;
const DENSE_LIMIT: usize = 400;

#[derive(Debug, Clone)]
pub struct FciSolution {
    /// Includes `ham.constant`.
    pub energy: f64,
    pub rdm1: DMatrix<f64>,
    pub rdm2: Vec<f64>,
    pub n_determinants: usize,
}

/// Spin-orbital `2p + s`, `s = 0` for alpha.
#[inline]
fn mode(p: usize, spin: usize) -> usize {
    2 * p + spin
}

#[inline]
fn annihilate(det: u32, m: usize) -> Option<(u32, f64)> {
    if det >> m & 1 == 0 {
        return None;
    }
    let sign = if (det & ((1u32 << m) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((det ^ (1 << m), sign))
}

#[inline]
fn create(det: u32, m: usize) -> Option<(u32, f64)> {
    if det >> m & 1 == 1 {
        return None;
    }
    let sign = if (det & ((1u32 << m) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((det | (1 << m), sign))
}

fn combinations(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << n)).filter(|c| c.count_ones() as usize == k).collect()
}

struct Space {
    n: usize,
    dets: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl Space {
    fn new(n: usize, n_elec: usize) -> Self {
        let half = n_elec / 2;
        let strings = combinations(n, half);
        let mut dets = Vec::with_capacity(strings.len() * strings.len());
        for &a in &strings {
            for &b in &strings {
                let mut d = 0u32;
                for p in 0..n {
                    if a >> p & 1 == 1 {
                        d |= 1 << mode(p, 0);
                    }
                    if b >> p & 1 == 1 {
                        d |= 1 << mode(p, 1);
                    }
                }
                dets.push(d);
            }
        }
        dets.sort_unstable();
        let index = dets.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        Self { n, dets, index }
    }

    /// Visit every `a+_P a_Q` image of `det` as `(target, sign, p, q)`.
    fn for_each_single(&self, det: u32, mut f: impl FnMut(usize, f64, usize, usize)) {
        for q in 0..self.n {
            for s in 0..2 {
                let Some((d1, s1)) = annihilate(det, mode(q, s)) else { continue };
                for p in 0..self.n {
                    let Some((d2, s2)) = create(d1, mode(p, s)) else { continue };
                    f(self.index[&d2], s1 * s2, p, q);
                }
            }
        }
    }

    /// Visit every `a+_P a+_R a_S a_Q` image of `det` as
    /// `(target, sign, p, q, r, s)`; P and Q share one spin, R and S another.
    fn for_each_double(&self, det: u32, mut f: impl FnMut(usize, f64, usize, usize, usize, usize)) {
        let n = self.n;
        for q in 0..n {
            for sq in 0..2 {
                let Some((d1, s1)) = annihilate(det, mode(q, sq)) else { continue };
                for s in 0..n {
                    for ss in 0..2 {
                        let Some((d2, s2)) = annihilate(d1, mode(s, ss)) else { continue };
                        for r in 0..n {
                            let Some((d3, s3)) = create(d2, mode(r, ss)) else { continue };
                            for p in 0..n {
                                let Some((d4, s4)) = create(d3, mode(p, sq)) else { continue };
                                f(self.index[&d4], s1 * s2 * s3 * s4, p, q, r, s);
                            }
                        }
                    }
                }
            }
        }
    }
}

type SparseRow = Vec<(usize, f64)>;

fn build_rows(space: &Space, ham: &MolecularHamiltonian) -> Vec<SparseRow> {
    let dim = space.dets.len();
    (0..dim)
        .into_par_iter()
        .map_init(
            || (vec![0.0; dim], Vec::<usize>::new()),
            |(acc, touched), j| {
                let det = space.dets[j];
                let mut add = |k: usize, v: f64| {
                    if acc[k] == 0.0 {
                        touched.push(k);
                    }
                    acc[k] += v;
                    if acc[k] == 0.0 {
                        // keep the entry tracked even if it cancels to zero
                        acc[k] = f64::MIN_POSITIVE;
                    }
                };
                add(j, ham.constant);
                space.for_each_single(det, |k, sign, p, q| add(k, sign * ham.h[(p, q)]));
                space.for_each_double(det, |k, sign, p, q, r, s| {
                    add(k, 0.5 * sign * ham.eri.get(p, q, r, s))
                });
                touched.sort_unstable();
                let row: SparseRow = touched.iter().map(|&k| (k, acc[k])).collect();
                for &k in touched.iter() {
                    acc[k] = 0.0;
                }
                touched.clear();
                row
            },
        )
        .collect()
}

fn apply(rows: &[SparseRow], x: &DVector<f64>) -> DVector<f64> {
    let out: Vec<f64> = rows
        .par_iter()
        .map(|row| row.iter().map(|&(k, v)| v * x[k]).sum())
        .collect();
    DVector::from_vec(out)
}

/// Lowest eigenpair of a sparse symmetric matrix by Davidson iteration with
/// a diagonal preconditioner.
fn davidson(rows: &[SparseRow], tol: f64, max_iter: usize) -> Result<(f64, DVector<f64>)> {
    let dim = rows.len();
    let diag: Vec<f64> = rows
        .iter()
        .enumerate()
        .map(|(j, r)| r.iter().find(|&&(k, _)| k == j).map_or(0.0, |&(_, v)| v))
        .collect();
    let start = (0..dim).min_by(|&a, &b| diag[a].total_cmp(&diag[b])).unwrap_or(0);
    let mut basis: Vec<DVector<f64>> = vec![DVector::from_fn(dim, |i, _| if i == start { 1.0 } else { 0.0 })];
    let mut sigmas: Vec<DVector<f64>> = vec![apply(rows, &basis[0])];
    let max_basis = 40;
    for _ in 0..max_iter {
        let m = basis.len();
        let sub = DMatrix::from_fn(m, m, |i, j| basis[i].dot(&sigmas[j]));
        let (vals, vecs) = sym_eigen(&sub);
        let theta = vals[0];
        let y = vecs.column(0);
        let mut x = DVector::zeros(dim);
        let mut hx = DVector::zeros(dim);
        for i in 0..m {
            x.axpy(y[i], &basis[i], 1.0);
            hx.axpy(y[i], &sigmas[i], 1.0);
        }
        let r = &hx - &x * theta;
        if r.norm() < tol {
            return Ok((theta, x));
        }
        let mut t = DVector::from_fn(dim, |i, _| {
            let d = theta - diag[i];
            if d.abs() < 1e-8 { r[i] / 1e-8_f64.copysign(d) } else { r[i] / d }
        });
        if basis.len() >= max_basis {
            basis = vec![x.clone()];
            sigmas = vec![hx.clone()];
        }
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&t);
                t.axpy(-c, b, 1.0);
            }
        }
        let norm = t.norm();
        if norm < 1e-12 {
            // preconditioned residual collapsed into the subspace
            t = r.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&t);
                    t.axpy(-c, b, 1.0);
                }
            }
            if t.norm() < 1e-14 {
                return Ok((theta, x));
            }
        }
        let t = t.normalize();
        sigmas.push(apply(rows, &t));
        basis.push(t);
    }
    Err(Error::InvalidArgument(format!(
        "Davidson did not converge in {max_iter} iterations"
    )))
}

/// Ground state of `ham` with `ham.n_elec` electrons, `S_z = 0`.
pub fn fci_ground_state(ham: &MolecularHamiltonian) -> Result<FciSolution> {
    let n = ham.n_orbitals();
    if 2 * n > MAX_SPIN_ORBITALS {
        return Err(Error::SpaceTooLarge {
            n_spin_orbitals: 2 * n,
            limit: MAX_SPIN_ORBITALS,
        });
    }
    if ham.n_elec % 2 == 1 {
        return Err(Error::OddElectronCount(ham.n_elec));
    }
    if ham.n_elec > 2 * n {
        return Err(Error::InvalidArgument(format!(
            "{} electrons do not fit in {n} orbitals",
            ham.n_elec
        )));
    }
    let space = Space::new(n, ham.n_elec);
    let rows = build_rows(&space, ham);
    let dim = rows.len();
    let (energy, vec) = if dim <= DENSE_LIMIT {
        let mut m = DMatrix::zeros(dim, dim);
        for (j, row) in rows.iter().enumerate() {
            for &(k, v) in row {
                m[(k, j)] = v;
            }
        }
        let (vals, vecs) = sym_eigen(&m);
        (vals[0], vecs.column(0).clone_owned())
    } else {
        davidson(&rows, 1e-9, 500)?
    };
    let (rdm1, rdm2) = rdms(&space, &vec);
    Ok(FciSolution {
        energy,
        rdm1,
        rdm2,
        n_determinants: dim,
    })
}

/// Spin-summed RDMs of a normalized CI vector.
fn rdms(space: &Space, c: &DVector<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = space.n;
    let mut rdm1 = DMatrix::zeros(n, n);
    let mut rdm2 = vec![0.0; n * n * n * n];
    for (j, &det) in space.dets.iter().enumerate() {
        let cj = c[j];
        if cj == 0.0 {
            continue;
        }
        space.for_each_single(det, |k, sign, p, q| rdm1[(p, q)] += sign * c[k] * cj);
        space.for_each_double(det, |k, sign, p, q, r, s| {
            rdm2[((p * n + q) * n + r) * n + s] += sign * c[k] * cj;
        });
    }
    (rdm1, rdm2)
}
