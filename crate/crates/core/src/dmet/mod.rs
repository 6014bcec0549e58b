//! Density-matrix embedding: fragments, bath orbitals, embedding
//! Hamiltonians, fragment solvers and the global chemical potential.

pub mod active;
pub mod bath;
pub mod fci;
pub mod plan;
pub mod problem;
pub mod solver;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use active::{fold_active_space, ActiveSpaceProblem};
pub use bath::{build_bath, EmbeddingBasis, BATH_THRESHOLD};
pub use fci::{fci_ground_state, FciSolution, MAX_SPIN_ORBITALS};
pub use plan::{define_fragments, ActiveSpace, Fragment, FragmentPlan, SolverKind};
pub use problem::{build_embedding_problem, fragment_energy, EmbeddingProblem};
pub use solver::{
    embedding_mean_field, solve_fragment_fci, FciSolver, FragmentSolution, FragmentSolver,
    MeanFieldSolver, SolverDiagnostics,
};

use crate::integrals::{compute_integrals, BasisSet, IntegralSet, Molecule, PointChargeEnvironment};
use crate::scf::{localized_rdm, lowdin_transform, run_rhf, LocalizedRdm, ScfOptions, ScfSolution};
use crate::{Error, Result};

/// Everything needed to evaluate the embedding at any chemical potential.
#[derive(Debug, Clone)]
pub struct DmetSystem {
    pub integrals: IntegralSet,
    pub scf: ScfSolution,
    pub rdm: LocalizedRdm,
    pub plan: FragmentPlan,
    pub bases: Vec<EmbeddingBasis>,
    /// Embedding problems at `mu = 0`.
    pub problems: Vec<EmbeddingProblem>,
    pub n_electrons: usize,
}

impl DmetSystem {
    pub fn new(
        mol: &Molecule,
        basis: &BasisSet,
        env: &PointChargeEnvironment,
        plan: FragmentPlan,
    ) -> Result<Self> {
        let ints = compute_integrals(mol, basis, env);
        Self::from_integrals(ints, mol.n_electrons, plan)
    }

    pub fn from_integrals(ints: IntegralSet, n_electrons: usize, plan: FragmentPlan) -> Result<Self> {
        if plan.n_orbitals != ints.n_ao() {
            return Err(Error::Dimension(format!(
                "fragment plan covers {} orbitals, integrals have {}",
                plan.n_orbitals,
                ints.n_ao()
            )));
        }
        let scf = run_rhf(&ints, n_electrons, &ScfOptions::default())?;
        let x = lowdin_transform(&ints.overlap)?;
        let rdm = localized_rdm(&scf, &x, &ints.overlap);
        let mut bases = Vec::with_capacity(plan.fragments.len());
        let mut problems = Vec::with_capacity(plan.fragments.len());
        for frag in &plan.fragments {
            let b = build_bath(&rdm, &frag.orbitals)?;
            problems.push(build_embedding_problem(&ints, &x, &b, 0.0)?);
            bases.push(b);
        }
        Ok(Self {
            integrals: ints,
            scf,
            rdm,
            plan,
            bases,
            problems,
            n_electrons,
        })
    }

    pub fn e_nuc(&self) -> f64 {
        self.integrals.e_nuc
    }

    pub fn e_hf(&self) -> f64 {
        self.scf.e_total
    }

    /// Solve every fragment at potential `mu`.
    pub fn evaluate(
        &self,
        solvers: &[&dyn FragmentSolver],
        mu: f64,
    ) -> Result<Vec<FragmentSolution>> {
        if solvers.len() != self.problems.len() {
            return Err(Error::InvalidArgument(format!(
                "{} solvers for {} fragments",
                solvers.len(),
                self.problems.len()
            )));
        }
        self.problems
            .par_iter()
            .zip(solvers.par_iter())
            .map(|(p, s)| s.solve(&p.with_mu(mu)))
            .collect()
    }

    /// Fragment electron count minus the molecular electron count.
    pub fn electron_residual(&self, solutions: &[FragmentSolution]) -> f64 {
        solutions.iter().map(|s| s.n_frag_elec).sum::<f64>() - self.n_electrons as f64
    }
}

/// Classical solver for a plan entry; `None` for VQE fragments, whose solver
/// lives with the quantum backends.
pub fn classical_solver(frag: &Fragment) -> Option<Box<dyn FragmentSolver>> {
    match frag.solver {
        SolverKind::MeanField => Some(Box::new(MeanFieldSolver)),
        SolverKind::ExactDiagonalization => Some(Box::new(FciSolver {
            active_space: frag.active_space,
        })),
        SolverKind::Vqe => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MuOptions {
    pub tol: f64,
    /// `|f(0)|` below this short-circuits the search.
    pub zero_tol: f64,
    pub initial_step: f64,
    pub max_abs_mu: f64,
    pub max_iter: usize,
}

impl Default for MuOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            zero_tol: 1e-8,
            initial_step: 0.2,
            max_abs_mu: 2.0,
            max_iter: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MuSolution {
    pub mu: f64,
    pub residual: f64,
    pub solutions: Vec<FragmentSolution>,
    /// Every `(mu, f(mu))` evaluated, in order.
    pub trace: Vec<(f64, f64)>,
}

fn format_trace(trace: &[(f64, f64)]) -> String {
    trace
        .iter()
        .map(|(m, f)| format!("f({m:+.4})={f:+.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Find `mu` with `sum_A n_A(mu) = N` by bracketing then Illinois regula
/// falsi with a bisection safeguard.
pub fn solve_chemical_potential(
    sys: &DmetSystem,
    solvers: &[&dyn FragmentSolver],
    opts: &MuOptions,
) -> Result<MuSolution> {
    let mut trace = Vec::new();
    let mut eval = |mu: f64| -> Result<(f64, Vec<FragmentSolution>)> {
        let sols = sys.evaluate(solvers, mu)?;
        let f = sys.electron_residual(&sols);
        log::debug!("mu = {mu:+.8}  f = {f:+.3e}");
        trace.push((mu, f));
        Ok((f, sols))
    };
    let (f0, s0) = eval(0.0)?;
    if f0.abs() < opts.zero_tol {
        return Ok(MuSolution { mu: 0.0, residual: f0, solutions: s0, trace });
    }
    // raising mu lowers fragment orbital energies and pulls electrons in
    let dir = if f0 < 0.0 { 1.0 } else { -1.0 };
    let (mut a, mut fa) = (0.0, f0);
    let mut step = opts.initial_step;
    let (mut b, mut fb) = loop {
        let mu = dir * step.min(opts.max_abs_mu);
        let (f, s) = eval(mu)?;
        if f.abs() < opts.tol {
            return Ok(MuSolution { mu, residual: f, solutions: s, trace });
        }
        if f * f0 < 0.0 {
            break (mu, f);
        }
        a = mu;
        fa = f;
        if step >= opts.max_abs_mu {
            return Err(Error::ChemicalPotential(format!(
                "no sign change of the electron-count residual within |mu| <= {}: {}",
                opts.max_abs_mu,
                format_trace(&trace)
            )));
        }
        step *= 2.0;
    };
    for _ in 0..opts.max_iter {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > lo && c < hi) || !c.is_finite() {
            c = 0.5 * (a + b);
        }
        let (fc, sc) = eval(c)?;
        if fc.abs() < opts.tol || (hi - lo) < 1e-12 {
            return Ok(MuSolution { mu: c, residual: fc, solutions: sc, trace });
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
    }
    Err(Error::ChemicalPotential(format!(
        "not converged in {} iterations: {}",
        opts.max_iter,
        format_trace(&trace)
    )))
}

/// `E_nuc + sum_A E_A`.
pub fn dmet_total_energy(e_nuc: f64, fragments: &[FragmentSolution]) -> f64 {
    e_nuc + fragments.iter().map(|f| f.e_frag).sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct DmetResult {
    pub mu: f64,
    pub energy: f64,
    pub residual: f64,
    pub fragments: Vec<FragmentSolution>,
    pub trace: Vec<(f64, f64)>,
}

/// Converge the chemical potential, let each solver finalize at the root,
/// and assemble the total energy.
pub fn run_dmet(sys: &DmetSystem, solvers: &[&dyn FragmentSolver], opts: &MuOptions) -> Result<DmetResult> {
    let mu = solve_chemical_potential(sys, solvers, opts)?;
    let fragments: Vec<FragmentSolution> = sys
        .problems
        .par_iter()
        .zip(solvers.par_iter())
        .zip(mu.solutions.into_par_iter())
        .map(|((p, s), sol)| s.finalize(&p.with_mu(mu.mu), sol))
        .collect::<Result<_>>()?;
    Ok(DmetResult {
        mu: mu.mu,
        energy: dmet_total_energy(sys.e_nuc(), &fragments),
        residual: sys.electron_residual(&fragments),
        fragments,
        trace: mu.trace,
    })
}

/// Central finite difference of the total energy with respect to `mu`;
/// a diagnostic for how strongly the residual electron-count error feeds
/// into the energy.
pub fn energy_derivative_mu(
    sys: &DmetSystem,
    solvers: &[&dyn FragmentSolver],
    mu: f64,
    h: f64,
) -> Result<f64> {
    let plus = dmet_total_energy(sys.e_nuc(), &sys.evaluate(solvers, mu + h)?);
    let minus = dmet_total_energy(sys.e_nuc(), &sys.evaluate(solvers, mu - h)?);
    Ok((plus - minus) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::build_basis;

    fn chain(n: usize, r: f64) -> Molecule {
        let atoms: Vec<(&str, [f64; 3])> = (0..n).map(|i| ("H", [0.0, 0.0, r * i as f64])).collect();
        Molecule::from_bohr(&atoms, 0).unwrap()
    }

    fn system(mol: &Molecule, parts: &[Vec<usize>], kinds: &[SolverKind]) -> DmetSystem {
        let basis = build_basis(mol, "sto-3g").unwrap();
        let plan = define_fragments(mol, &basis, parts, kinds).unwrap();
        DmetSystem::new(mol, &basis, &PointChargeEnvironment::vacuum(), plan).unwrap()
    }

    #[test]
    fn whole_molecule_mean_field_is_rhf() {
        let mol = chain(4, 1.7);
        let sys = system(&mol, &[vec![0, 1, 2, 3]], &[SolverKind::MeanField]);
        let r = run_dmet(&sys, &[&MeanFieldSolver], &MuOptions::default()).unwrap();
        assert_eq!(r.mu, 0.0);
        assert!((r.energy - sys.e_hf()).abs() < 1e-8, "{} vs {}", r.energy, sys.e_hf());
    }

    #[test]
    fn mean_field_fragments_sum_to_rhf() {
        let mol = chain(4, 1.7);
        let kinds = [SolverKind::MeanField; 2];
        let sys = system(&mol, &[vec![0, 1], vec![2, 3]], &kinds);
        let r = run_dmet(&sys, &[&MeanFieldSolver, &MeanFieldSolver], &MuOptions::default()).unwrap();
        assert!(r.mu.abs() < 1e-6);
        assert!((r.energy - sys.e_hf()).abs() < 1e-7, "{} vs {}", r.energy, sys.e_hf());
    }

    #[test]
    fn fci_fragments_converge_mu() {
        let mol = chain(6, 1.8);
        let kinds = [SolverKind::ExactDiagonalization; 3];
        let sys = system(&mol, &[vec![0, 1], vec![2, 3], vec![4, 5]], &kinds);
        let f = FciSolver::default();
        let r = run_dmet(&sys, &[&f, &f, &f], &MuOptions::default()).unwrap();
        assert!(r.residual.abs() < 1e-6);
        assert!(r.energy < sys.e_hf());
    }

    #[test]
    fn embedding_hf_reproduces_projected_density() {
        let mol = chain(4, 1.7);
        let sys = system(&mol, &[vec![0, 1], vec![2, 3]], &[SolverKind::MeanField; 2]);
        for (p, b) in sys.problems.iter().zip(&sys.bases) {
            let scf = embedding_mean_field(p).unwrap();
            let diff = &scf.density - &b.gamma_emb * 2.0;
            assert!(crate::linalg::max_abs(&diff) < 1e-7);
        }
    }
}
