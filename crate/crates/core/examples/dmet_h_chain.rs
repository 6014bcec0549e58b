//! DMET on a linear H8 chain with two-atom FCI fragments, compared with RHF
//! and the exact energy.

use qembed::dmet::{define_fragments, fci_ground_state, run_dmet, DmetSystem, FciSolver, FragmentSolver, MuOptions, SolverKind};
use qembed::integrals::{build_basis, PointChargeEnvironment};
use qembed::oracle::hydrogen_chain;
use qembed::MolecularHamiltonian;

fn main() -> qembed::Result<()> {
    let mol = hydrogen_chain(8, 1.8);
    let basis = build_basis(&mol, "sto-3g")?;
    let parts: Vec<Vec<usize>> = (0..4).map(|i| vec![2 * i, 2 * i + 1]).collect();
    let plan = define_fragments(&mol, &basis, &parts, &[SolverKind::ExactDiagonalization; 4])?;
    let sys = DmetSystem::new(&mol, &basis, &PointChargeEnvironment::vacuum(), plan)?;

    let fci = FciSolver::default();
    let solvers: Vec<&dyn FragmentSolver> = vec![&fci; 4];
    let res = run_dmet(&sys, &solvers, &MuOptions::default())?;

    let ham = MolecularHamiltonian {
        h: sys.integrals.h_core.clone(),
        eri: sys.integrals.eri.clone(),
        constant: sys.integrals.e_nuc,
        n_elec: 8,
    }
    .rotated(&sys.scf.mo_coeffs);
    let exact = fci_ground_state(&ham)?.energy;

    println!("RHF   {:.8}", sys.e_hf());
    println!("DMET  {:.8}  (mu = {:+.6}, residual {:.1e})", res.energy, res.mu, res.residual);
    println!("FCI   {:.8}", exact);
    for (i, f) in res.fragments.iter().enumerate() {
        println!("fragment {i}: E_frag {:.6}  n_elec {:.6}", f.e_frag, f.n_frag_elec);
    }
    Ok(())
}
