use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::QubitOperator;
use super::pauli::{Pauli, PauliString};
use crate::hamiltonian::MolecularHamiltonian;

/// `(mode, is_creation)`.
pub type Ladder = (usize, bool);

/// Spin-orbital index of spatial orbital `p`, spin `s` (0 = alpha).
#[inline]
pub fn spin_orbital(p: usize, s: usize) -> usize {
    2 * p + s
}

/// Real linear combination of products of ladder operators, each product
/// applied right to left.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FermionOperator {
    pub n_modes: usize,
    pub terms: BTreeMap<Vec<Ladder>, f64>,
}

impl FermionOperator {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, ops: Vec<Ladder>, c: f64) {
        if c == 0.0 {
            return;
        }
        assert!(ops.iter().all(|&(m, _)| m < self.n_modes), "mode out of range");
        *self.terms.entry(ops).or_default() += c;
    }

    /// `a+_p a_q`.
    pub fn hopping(n_modes: usize, p: usize, q: usize, c: f64) -> Self {
        let mut op = Self::zero(n_modes);
        op.add_term(vec![(p, true), (q, false)], c);
        op
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (ops, c) in &self.terms {
            let rev: Vec<Ladder> = ops.iter().rev().map(|&(m, d)| (m, !d)).collect();
            out.add_term(rev, *c);
        }
        out
    }

    /// Occupation-number matrix with mode `j` as bit `j` of the basis index
    /// and the sign convention `a+_j |n> = (-1)^{sum_{k<j} n_k} |n + e_j>`.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n_modes;
        let mut m = DMatrix::zeros(dim, dim);
        for (ops, c) in &self.terms {
            for b in 0..dim {
                let mut state = b as u64;
                let mut sign = 1.0;
                let mut alive = true;
                for &(mode, dag) in ops.iter().rev() {
                    let occ = state >> mode & 1 == 1;
                    if occ == dag {
                        alive = false;
                        break;
                    }
                    if (state & ((1u64 << mode) - 1)).count_ones() % 2 == 1 {
                        sign = -sign;
                    }
                    state ^= 1 << mode;
                }
                if alive {
                    m[(state as usize, b)] += c * sign;
                }
            }
        }
        m
    }
}

/// Second-quantized form of `ham` over `2 n` interleaved spin-orbitals:
///
/// `E0 + sum h_pq a+_{ps} a_{qs} + 1/2 sum (pq|rs) a+_{ps} a+_{rt} a_{st} a_{qs}`
///
/// The chemists' integral `(pq|rs)` pairs creation `p` with annihilation
/// `q` (electron 1) and `r` with `s` (electron 2).
pub fn fermion_hamiltonian(ham: &MolecularHamiltonian) -> FermionOperator {
    let n = ham.n_orbitals();
    let mut op = FermionOperator::zero(2 * n);
    op.add_term(vec![], ham.constant);
    for p in 0..n {
        for q in 0..n {
            let h = ham.h[(p, q)];
            if h.abs() < 1e-14 {
                continue;
            }
            for s in 0..2 {
                op.add_term(vec![(spin_orbital(p, s), true), (spin_orbital(q, s), false)], h);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ham.eri.get(p, q, r, s);
                    if v.abs() < 1e-14 {
                        continue;
                    }
                    for sa in 0..2 {
                        for sb in 0..2 {
                            let (pp, qq) = (spin_orbital(p, sa), spin_orbital(q, sa));
                            let (rr, ss) = (spin_orbital(r, sb), spin_orbital(s, sb));
                            if pp == rr || qq == ss {
                                continue;
                            }
                            op.add_term(vec![(pp, true), (rr, true), (ss, false), (qq, false)], 0.5 * v);
                        }
                    }
                }
            }
        }
    }
    op
}

fn ladder_jw(n: usize, mode: usize, dagger: bool) -> QubitOperator {
    // a+_j = (X_j - i Y_j)/2 Z_{<j}; a_j = (X_j + i Y_j)/2 Z_{<j}
    let mask = (1u64 << mode) - 1;
    let zs = PauliString::z_mask(mask);
    let x = zs.with(mode, Pauli::X);
    let y = zs.with(mode, Pauli::Y);
    let s = if dagger { -0.5 } else { 0.5 };
    let mut op = QubitOperator::zero(n);
    op.add_term(x, Complex64::new(0.5, 0.0));
    op.add_term(y, Complex64::new(0.0, s));
    op
}

pub fn jordan_wigner(op: &FermionOperator) -> QubitOperator {
    let n = op.n_modes;
    let mut out = QubitOperator::zero(n);
    for (ops, c) in &op.terms {
        let mut prod = QubitOperator::identity(n);
        for &(m, d) in ops {
            prod = &prod * &ladder_jw(n, m, d);
        }
        out = out + prod.scaled(Complex64::new(*c, 0.0));
    }
    out.pruned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Eri;

    fn qop(n: usize, terms: &[(&str, f64)]) -> QubitOperator {
        let v: Vec<(PauliString, f64)> = terms.iter().map(|(s, c)| (s.parse().unwrap(), *c)).collect();
        QubitOperator::from_real_terms(n, &v)
    }

    #[test]
    fn number_operator() {
        let n0 = FermionOperator::hopping(1, 0, 0, 1.0);
        assert_eq!(jordan_wigner(&n0), qop(1, &[("I", 0.5), ("Z0", -0.5)]));
    }

    #[test]
    fn hopping_pair() {
        let mut op = FermionOperator::hopping(2, 0, 1, 1.0);
        op.add_term(vec![(1, true), (0, false)], 1.0);
        assert_eq!(jordan_wigner(&op), qop(2, &[("X0 X1", 0.5), ("Y0 Y1", 0.5)]));
    }

    #[test]
    fn one_orbital_energy() {
        let ham = MolecularHamiltonian {
            h: DMatrix::from_element(1, 1, -0.7),
            eri: Eri::zeros(1),
            constant: 0.0,
            n_elec: 2,
        };
        let f = fermion_hamiltonian(&ham);
        let mut expect = FermionOperator::zero(2);
        expect.add_term(vec![(0, true), (0, false)], -0.7);
        expect.add_term(vec![(1, true), (1, false)], -0.7);
        assert_eq!(f, expect);
    }

    #[test]
    fn anticommutation_under_mapping() {
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let a = ladder_jw(n, i, false);
                let ad = ladder_jw(n, j, true);
                let anti = (&a * &ad + &ad * &a).pruned();
                let expect = if i == j { QubitOperator::identity(n) } else { QubitOperator::zero(n) };
                assert_eq!(anti, expect, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn jw_matches_occupation_matrix() {
        let mut op = FermionOperator::zero(4);
        op.add_term(vec![(3, true), (0, false)], 0.4);
        op.add_term(vec![(0, true), (3, false)], 0.4);
        op.add_term(vec![(2, true), (1, true), (0, false), (3, false)], -0.25);
        op.add_term(vec![(3, true), (0, true), (1, false), (2, false)], -0.25);
        let q = jordan_wigner(&op).to_matrix();
        let f = op.to_matrix();
        let diff = q - f.map(|v| Complex64::new(v, 0.0));
        assert!(diff.norm() < 1e-14);
    }
}
