use super::operator::QubitOperator;
use super::pauli::{Pauli, PauliString};
use crate::Result;

/// A Z2 symmetry of the Hamiltonian and the sector the target state lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symmetry {
    pub label: String,
    pub string: PauliString,
    pub eigenvalue: i8,
}

impl Symmetry {
    /// Sector check on a measured bitstring (after the group's basis
    /// rotation, so the symmetry is diagonal).
    pub fn satisfied_by(&self, bits: u64) -> bool {
        let z = self.string.support();
        let parity = if (z & bits).count_ones().is_multiple_of(2) { 1 } else { -1 };
        parity == self.eigenvalue
    }
}

/// Terms measurable together in one product basis.
#[derive(Debug, Clone)]
pub struct MeasurementGroup {
    /// Measurement basis per qubit; qubits no term touches are measured in Z.
    pub basis: Vec<Pauli>,
    pub terms: Vec<(PauliString, f64)>,
    pub symmetries: Vec<Symmetry>,
}

impl MeasurementGroup {
    pub fn n_qubits(&self) -> usize {
        self.basis.len()
    }

    /// Eigenvalue of `p` on a measured outcome. All member strings are
    /// diagonal after the basis rotation, so only their support matters.
    pub fn outcome_sign(p: &PauliString, bits: u64) -> f64 {
        if (p.support() & bits).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Energy contribution from outcome probabilities (`probs[b]`).
    pub fn expectation_from_probabilities(&self, probs: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(p, c)| {
                let ev: f64 = probs
                    .iter()
                    .enumerate()
                    .map(|(b, pr)| pr * Self::outcome_sign(p, b as u64))
                    .sum();
                c * ev
            })
            .sum()
    }
}

/// Greedy first-fit qubit-wise-commuting partition in lexicographic term
/// order. The identity term is left out; it is added classically.
pub fn partition_commuting(op: &QubitOperator) -> Result<Vec<MeasurementGroup>> {
    let n = op.n_qubits;
    let mut bases: Vec<Vec<Option<Pauli>>> = Vec::new();
    let mut members: Vec<Vec<(PauliString, f64)>> = Vec::new();
    for (p, c) in op.real_terms()? {
        if p.is_identity() {
            continue;
        }
        let fits = |basis: &Vec<Option<Pauli>>| {
            p.ops().all(|(q, pq)| basis[q].is_none_or(|b| b == pq))
        };
        let slot = match bases.iter().position(fits) {
            Some(i) => i,
            None => {
                bases.push(vec![None; n]);
                members.push(Vec::new());
                bases.len() - 1
            }
        };
        for (q, pq) in p.ops() {
            bases[slot][q] = Some(pq);
        }
        members[slot].push((p, c));
    }
    Ok(bases
        .into_iter()
        .zip(members)
        .map(|(b, terms)| MeasurementGroup {
            basis: b.into_iter().map(|x| x.unwrap_or(Pauli::Z)).collect(),
            terms,
            symmetries: Vec::new(),
        })
        .collect())
}

/// Attach each symmetry to every group whose basis equals the symmetry's
/// operator on all of the symmetry's qubits.
pub fn attach_symmetries(groups: &mut [MeasurementGroup], symmetries: &[Symmetry]) {
    for g in groups.iter_mut() {
        g.symmetries = symmetries
            .iter()
            .filter(|s| s.string.ops().all(|(q, p)| g.basis[q] == p))
            .cloned()
            .collect();
    }
}

/// Spin-resolved and total number parities (interleaved JW encoding), each
/// kept only if it commutes with every term of `op`.
pub fn find_z2_symmetries(op: &QubitOperator, n_alpha: usize, n_beta: usize) -> Vec<Symmetry> {
    let n = op.n_qubits;
    let mut even = 0u64;
    let mut odd = 0u64;
    for q in 0..n {
        if q % 2 == 0 {
            even |= 1 << q;
        } else {
            odd |= 1 << q;
        }
    }
    let sign = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
    let candidates = [
        ("alpha-parity", even, sign(n_alpha)),
        ("beta-parity", odd, sign(n_beta)),
        ("total-parity", even | odd, sign(n_alpha + n_beta)),
    ];
    candidates
        .into_iter()
        .filter_map(|(label, mask, ev)| {
            let s = PauliString::z_mask(mask);
            if let Some((bad, _)) = op.terms().find(|(p, _)| !p.commutes(&s)) {
                log::warn!("candidate symmetry {label} ({s}) anticommutes with {bad}; excluded");
                return None;
            }
            Some(Symmetry {
                label: label.to_string(),
                string: s,
                eigenvalue: ev,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qop(n: usize, terms: &[(&str, f64)]) -> QubitOperator {
        let v: Vec<(PauliString, f64)> = terms.iter().map(|(s, c)| (s.parse().unwrap(), *c)).collect();
        QubitOperator::from_real_terms(n, &v)
    }

    #[test]
    fn all_z_terms_share_one_group() {
        let g = partition_commuting(&qop(2, &[("Z0", 1.0), ("Z1", 2.0), ("Z0 Z1", 3.0)])).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn anticommuting_terms_split() {
        let g = partition_commuting(&qop(1, &[("X0", 1.0), ("Z0", 2.0)])).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn identity_excluded_and_union_complete() {
        let op = qop(3, &[("I", -1.0), ("X0 X1", 0.2), ("Z2", 0.3), ("Y0 Y1", 0.2), ("Z0", 0.1)]);
        let g = partition_commuting(&op).unwrap();
        let mut rebuilt = QubitOperator::from_real_terms(3, &[(PauliString::identity(), -1.0)]);
        for grp in &g {
            rebuilt = rebuilt + QubitOperator::from_real_terms(3, &grp.terms);
            for (i, (a, _)) in grp.terms.iter().enumerate() {
                for (b, _) in &grp.terms[i + 1..] {
                    assert!(a.qubitwise_commutes(b));
                }
            }
        }
        assert_eq!(rebuilt, op);
    }

    #[test]
    fn two_electron_parities() {
        let op = qop(4, &[("Z0", 0.1), ("Z0 Z1", 0.2), ("X0 X1 Y2 Y3", 0.05)]);
        let s = find_z2_symmetries(&op, 1, 1);
        let text: Vec<(String, i8)> = s.iter().map(|x| (x.string.to_string(), x.eigenvalue)).collect();
        assert_eq!(
            text,
            [("Z0 Z2".to_string(), -1), ("Z1 Z3".to_string(), -1), ("Z0 Z1 Z2 Z3".to_string(), 1)]
        );
        // HF reference: qubits 0 and 1 occupied
        assert!(s.iter().all(|x| x.satisfied_by(0b0011)));
    }

    #[test]
    fn non_commuting_candidate_excluded() {
        let op = qop(2, &[("X0", 1.0)]);
        let s = find_z2_symmetries(&op, 1, 0);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].label, "beta-parity");
    }
}
