use std::fmt;

use serde::{Deserialize, Serialize};

use crate::integrals::{BasisSet, Molecule};
use crate::{Error, Result};

/// Which solver treats a fragment's embedding problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    MeanField,
    ExactDiagonalization,
    Vqe,
}

impl SolverKind {
    pub fn is_correlated(self) -> bool {
        !matches!(self, SolverKind::MeanField)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::MeanField => "mean-field",
            SolverKind::ExactDiagonalization => "exact-diagonalization",
            SolverKind::Vqe => "vqe",
        })
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean-field" | "hf" | "mean_field" => Ok(SolverKind::MeanField),
            "exact-diagonalization" | "fci" | "exact" => Ok(SolverKind::ExactDiagonalization),
            "vqe" => Ok(SolverKind::Vqe),
            other => Err(Error::Config(format!("unknown solver `{other}`"))),
        }
    }
}

/// Correlated treatment restricted to `n_elec` electrons in
/// `n_spin_orbitals` spin-orbitals around the Fermi level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSpace {
    pub n_elec: usize,
    pub n_spin_orbitals: usize,
}

impl ActiveSpace {
    /// Two electrons in four spin-orbitals (HOMO and LUMO).
    pub const HOMO_LUMO: ActiveSpace = ActiveSpace {
        n_elec: 2,
        n_spin_orbitals: 4,
    };

    pub fn n_orbitals(&self) -> usize {
        self.n_spin_orbitals / 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fragment {
    pub atoms: Vec<usize>,
    /// Löwdin orbital indices owned by this fragment.
    pub orbitals: Vec<usize>,
    pub solver: SolverKind,
    pub active_space: Option<ActiveSpace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentPlan {
    pub fragments: Vec<Fragment>,
    pub n_orbitals: usize,
}

impl FragmentPlan {
    /// A single fragment spanning every orbital.
    pub fn whole_molecule(mol: &Molecule, basis: &BasisSet, solver: SolverKind) -> Result<Self> {
        let all: Vec<usize> = (0..mol.atoms.len()).collect();
        define_fragments(mol, basis, &[all], &[solver])
    }

    pub fn with_active_space(mut self, fragment: usize, space: ActiveSpace) -> Result<Self> {
        let frag = self.fragments.get_mut(fragment).ok_or_else(|| {
            Error::InvalidPartition(format!("no fragment with index {fragment}"))
        })?;
        if !frag.solver.is_correlated() {
            return Err(Error::InvalidPartition(format!(
                "active space requested on mean-field fragment {fragment}"
            )));
        }
        if space.n_elec % 2 == 1 || space.n_spin_orbitals % 2 == 1 || space.n_elec == 0 {
            return Err(Error::InvalidArgument(format!(
                "active space ({}e, {}so) must have an even, non-zero electron count and even spin-orbital count",
                space.n_elec, space.n_spin_orbitals
            )));
        }
        frag.active_space = Some(space);
        Ok(self)
    }
}

/// Map an atom partition to Löwdin-orbital index sets via AO ownership.
pub fn define_fragments(
    mol: &Molecule,
    basis: &BasisSet,
    atom_partition: &[Vec<usize>],
    solvers: &[SolverKind],
) -> Result<FragmentPlan> {
    if atom_partition.len() != solvers.len() {
        return Err(Error::InvalidPartition(format!(
            "{} fragments but {} solver assignments",
            atom_partition.len(),
            solvers.len()
        )));
    }
    let n_atoms = mol.atoms.len();
    let mut owner = vec![None; n_atoms];
    for (f, atoms) in atom_partition.iter().enumerate() {
        if atoms.is_empty() {
            return Err(Error::InvalidPartition(format!("fragment {f} is empty")));
        }
        for &a in atoms {
            if a >= n_atoms {
                return Err(Error::InvalidPartition(format!(
                    "atom index {a} out of range (molecule has {n_atoms} atoms)"
                )));
            }
            if let Some(prev) = owner[a] {
                return Err(Error::InvalidPartition(format!(
                    "atom {a} appears in fragments {prev} and {f}"
                )));
            }
            owner[a] = Some(f);
        }
    }
    if let Some(a) = owner.iter().position(|o| o.is_none()) {
        return Err(Error::InvalidPartition(format!("atom {a} is not assigned to any fragment")));
    }
    let ao_atoms = basis.ao_atoms();
    let fragments = atom_partition
        .iter()
        .zip(solvers)
        .map(|(atoms, &solver)| {
            let mut atoms = atoms.clone();
            atoms.sort_unstable();
            let orbitals = ao_atoms
                .iter()
                .enumerate()
                .filter(|(_, a)| atoms.contains(a))
                .map(|(i, _)| i)
                .collect();
            Fragment {
                atoms,
                orbitals,
                solver,
                active_space: None,
            }
        })
        .collect();
    Ok(FragmentPlan {
        fragments,
        n_orbitals: basis.n_ao,
    })
}
