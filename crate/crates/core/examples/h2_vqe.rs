//! H2 at 1.4 bohr: YXXX-VQE on the statevector, then on 60k noiseless shots.

use qembed::integrals::{build_basis, compute_integrals, Molecule, PointChargeEnvironment};
use qembed::scf::{run_rhf, ScfOptions};
use qembed::vqe::{estimate_energy, vqe_minimize, Backend, VqeConfig, VqeProblem};
use qembed::MolecularHamiltonian;

fn main() -> qembed::Result<()> {
    let mol = Molecule::from_bohr(&[("H", [0.0, 0.0, 0.0]), ("H", [0.0, 0.0, 1.4])], 0)?;
    let basis = build_basis(&mol, "sto-3g")?;
    let ints = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
    let scf = run_rhf(&ints, 2, &ScfOptions::default())?;
    let ham = MolecularHamiltonian {
        h: ints.h_core.clone(),
        eri: ints.eri.clone(),
        constant: ints.e_nuc,
        n_elec: 2,
    }
    .rotated(&scf.mo_coeffs);

    let problem = VqeProblem::new(ham)?;
    let sv = vqe_minimize(&problem, &VqeConfig::default())?;
    println!("RHF          {:.8} Ha", scf.e_total);
    println!("VQE (exact)  {:.8} Ha at theta = {:.6}", sv.mean, sv.theta_star);
    println!("correlation  {:.8} Ha", sv.mean - scf.e_total);

    let shots = VqeConfig {
        backend: Backend::Shots,
        seed: 42,
        ..VqeConfig::default()
    };
    let est = estimate_energy(&problem, sv.theta_star, &shots)?;
    println!(
        "VQE (shots)  {:.8} +- {:.8} Ha over {} blocks",
        est.mean, est.std, est.n_blocks
    );
    Ok(())
}
