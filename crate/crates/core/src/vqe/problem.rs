use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::hamiltonian::MolecularHamiltonian;
use crate::qsim::{build_yxxx_ansatz, simulate_statevector, Circuit, StateVector};
use crate::qubitmap::{
    attach_symmetries, find_z2_symmetries, jordan_wigner, partition_commuting, qubit_hamiltonian,
    spin_orbital, FermionOperator, MeasurementGroup, PauliString, QubitOperator, Symmetry,
};
use crate::{Error, Result};

/// Expectation values of individual Pauli strings.
pub type PauliExpectations = BTreeMap<PauliString, f64>;

/// A small active-space Hamiltonian prepared for the YXXX ansatz: qubit
/// operator, measurement groups with their symmetries, and the JW images of
/// the RDM elements.
#[derive(Debug, Clone)]
pub struct VqeProblem {
    pub hamiltonian: MolecularHamiltonian,
    pub qubit_op: QubitOperator,
    /// Coefficient of the identity string.
    pub constant: f64,
    pub energy_groups: Vec<MeasurementGroup>,
    pub symmetries: Vec<Symmetry>,
    /// Hartree-Fock reference: the lowest `n_elec` spin-orbitals occupied.
    pub reference: u64,
    pub n_qubits: usize,
    rdm1_ops: Vec<((usize, usize), QubitOperator)>,
    rdm2_ops: Vec<([usize; 4], QubitOperator)>,
}

impl VqeProblem {
    pub fn new(hamiltonian: MolecularHamiltonian) -> Result<Self> {
        let n = hamiltonian.n_orbitals();
        let n_qubits = 2 * n;
        if hamiltonian.n_elec % 2 == 1 {
            return Err(Error::OddElectronCount(hamiltonian.n_elec));
        }
        if hamiltonian.n_elec > n_qubits {
            return Err(Error::InvalidArgument(format!(
                "{} electrons in {n_qubits} spin-orbitals",
                hamiltonian.n_elec
            )));
        }
        let qubit_op = qubit_hamiltonian(&hamiltonian)?;
        let constant = qubit_op.constant();
        let half = hamiltonian.n_elec / 2;
        let symmetries = find_z2_symmetries(&qubit_op, half, half);
        let mut energy_groups = partition_commuting(&qubit_op)?;
        attach_symmetries(&mut energy_groups, &symmetries);
        let reference = (1u64 << hamiltonian.n_elec) - 1;

        let mut rdm1_ops = Vec::with_capacity(n * n);
        let mut rdm2_ops = Vec::with_capacity(n * n * n * n);
        for p in 0..n {
            for q in 0..n {
                let mut f = FermionOperator::zero(n_qubits);
                for s in 0..2 {
                    f.add_term(vec![(spin_orbital(p, s), true), (spin_orbital(q, s), false)], 1.0);
                }
                rdm1_ops.push(((p, q), jordan_wigner(&f).pruned()));
                for r in 0..n {
                    for t in 0..n {
                        let mut f = FermionOperator::zero(n_qubits);
                        for s1 in 0..2 {
                            for s2 in 0..2 {
                                let (ps, qs) = (spin_orbital(p, s1), spin_orbital(q, s1));
                                let (rt, tt) = (spin_orbital(r, s2), spin_orbital(t, s2));
                                if ps == rt || qs == tt {
                                    continue;
                                }
                                f.add_term(vec![(ps, true), (rt, true), (tt, false), (qs, false)], 1.0);
                            }
                        }
                        rdm2_ops.push(([p, q, r, t], jordan_wigner(&f).pruned()));
                    }
                }
            }
        }
        Ok(Self {
            hamiltonian,
            qubit_op,
            constant,
            energy_groups,
            symmetries,
            reference,
            n_qubits,
            rdm1_ops,
            rdm2_ops,
        })
    }

    pub fn n_orbitals(&self) -> usize {
        self.hamiltonian.n_orbitals()
    }

    pub fn circuit(&self, theta: f64) -> Result<Circuit> {
        build_yxxx_ansatz(theta, self.n_qubits, self.reference)
    }

    pub fn state(&self, theta: f64) -> Result<StateVector> {
        simulate_statevector(&self.circuit(theta)?)
    }

    /// Exact `<psi(theta)|H|psi(theta)>`.
    pub fn statevector_energy(&self, theta: f64) -> Result<f64> {
        Ok(self.qubit_op.expectation(&self.state(theta)?))
    }

    /// Energy of the Hartree-Fock reference.
    pub fn reference_energy(&self) -> Result<f64> {
        self.statevector_energy(0.0)
    }

    /// Every Pauli string needed for the energy and both RDMs.
    pub fn rdm_strings(&self) -> BTreeSet<PauliString> {
        let mut out: BTreeSet<PauliString> = self.qubit_op.terms().map(|(p, _)| *p).collect();
        for (_, op) in &self.rdm1_ops {
            out.extend(op.terms().map(|(p, _)| *p));
        }
        for (_, op) in &self.rdm2_ops {
            out.extend(op.terms().map(|(p, _)| *p));
        }
        out.remove(&PauliString::identity());
        out
    }

    /// Groups measuring every string of [`Self::rdm_strings`].
    pub fn rdm_groups(&self) -> Result<Vec<MeasurementGroup>> {
        let terms: Vec<(PauliString, f64)> = self.rdm_strings().into_iter().map(|p| (p, 1.0)).collect();
        let mut groups = partition_commuting(&QubitOperator::from_real_terms(self.n_qubits, &terms))?;
        attach_symmetries(&mut groups, &self.symmetries);
        Ok(groups)
    }

    /// Energy from per-string expectations.
    pub fn energy_from_expectations(&self, ex: &PauliExpectations) -> Result<f64> {
        let mut e = self.constant;
        for (p, c) in self.qubit_op.terms() {
            if p.is_identity() {
                continue;
            }
            e += c.re * lookup(ex, p)?;
        }
        Ok(e)
    }

    /// Spin-summed RDMs from per-string expectations. The real part of each
    /// element is taken, which equals the Hermitian average for a real state.
    pub fn rdms_from_expectations(&self, ex: &PauliExpectations) -> Result<(DMatrix<f64>, Vec<f64>)> {
        let n = self.n_orbitals();
        let eval = |op: &QubitOperator| -> Result<f64> {
            let mut v = Complex64::new(0.0, 0.0);
            for (p, c) in op.terms() {
                let x = if p.is_identity() { 1.0 } else { lookup(ex, p)? };
                v += c * x;
            }
            Ok(v.re)
        };
        let mut rdm1 = DMatrix::zeros(n, n);
        for ((p, q), op) in &self.rdm1_ops {
            rdm1[(*p, *q)] = eval(op)?;
        }
        let rdm1 = 0.5 * (&rdm1 + rdm1.transpose());
        let mut rdm2 = vec![0.0; n * n * n * n];
        for ([p, q, r, s], op) in &self.rdm2_ops {
            rdm2[((p * n + q) * n + r) * n + s] = eval(op)?;
        }
        Ok((rdm1, rdm2))
    }

    /// Exact per-string expectations in the ansatz state.
    pub fn exact_expectations(&self, theta: f64) -> Result<PauliExpectations> {
        let psi = self.state(theta)?;
        Ok(self
            .rdm_strings()
            .into_iter()
            .map(|p| {
                let v = QubitOperator::from_term(self.n_qubits, p, Complex64::new(1.0, 0.0)).expectation(&psi);
                (p, v)
            })
            .collect())
    }

    /// Exact RDMs of the ansatz state.
    pub fn statevector_rdms(&self, theta: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
        self.rdms_from_expectations(&self.exact_expectations(theta)?)
    }
}

fn lookup(ex: &PauliExpectations, p: &PauliString) -> Result<f64> {
    ex.get(p)
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("no estimate for Pauli string {p}")))
}

/// Per-string expectations from one mitigated distribution per group.
pub fn expectations_from_groups(groups: &[MeasurementGroup], probs: &[Vec<f64>]) -> PauliExpectations {
    let mut out = PauliExpectations::new();
    for (g, p) in groups.iter().zip(probs) {
        for (s, _) in &g.terms {
            let v: f64 = p
                .iter()
                .enumerate()
                .map(|(b, &w)| w * MeasurementGroup::outcome_sign(s, b as u64))
                .sum();
            out.insert(*s, v);
        }
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::integrals::{build_basis, compute_integrals, Molecule, PointChargeEnvironment};
    use crate::scf::{run_rhf, ScfOptions};

    /// H2/STO-3G at 1.4 bohr in the RHF molecular-orbital basis.
    pub(crate) fn h2_hamiltonian() -> MolecularHamiltonian {
        let mol = Molecule::from_bohr(&[("H", [0.0, 0.0, 0.0]), ("H", [0.0, 0.0, 1.4])], 0).unwrap();
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let ints = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
        let scf = run_rhf(&ints, 2, &ScfOptions::default()).unwrap();
        MolecularHamiltonian {
            h: ints.h_core.clone(),
            eri: ints.eri.clone(),
            constant: ints.e_nuc,
            n_elec: 2,
        }
        .rotated(&scf.mo_coeffs)
    }

    #[test]
    fn reference_is_hartree_fock() {
        let p = VqeProblem::new(h2_hamiltonian()).unwrap();
        assert_eq!(p.reference, 0b0011);
        let (d1, _) = p.statevector_rdms(0.0).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        assert!((d1 - expect).abs().max() < 1e-12);
    }

    #[test]
    fn rdm_partial_trace() {
        let p = VqeProblem::new(h2_hamiltonian()).unwrap();
        let n = 2;
        for theta in [-2.0, -0.7, 0.1, 0.9, 2.5] {
            let (d1, d2) = p.statevector_rdms(theta).unwrap();
            assert!((d1.trace() - 2.0).abs() < 1e-12);
            for a in 0..n {
                for b in 0..n {
                    let tr: f64 = (0..n).map(|r| d2[((a * n + b) * n + r) * n + r]).sum();
                    assert!((tr - d1[(a, b)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn grouped_expectations_equal_exact() {
        let p = VqeProblem::new(h2_hamiltonian()).unwrap();
        let groups = p.rdm_groups().unwrap();
        let psi = p.state(0.4).unwrap();
        let probs: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| {
                let c = p.circuit(0.4).unwrap().with_measurement_basis(&g.basis).unwrap();
                crate::qsim::probabilities(&simulate_statevector(&c).unwrap())
            })
            .collect();
        let ex = expectations_from_groups(&groups, &probs);
        let e = p.energy_from_expectations(&ex).unwrap();
        assert!((e - p.qubit_op.expectation(&psi)).abs() < 1e-12);
    }
}
