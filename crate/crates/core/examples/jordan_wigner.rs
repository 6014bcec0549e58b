//! Qubit Hamiltonian of H2, its measurement groups and Z2 symmetries.

use qembed::integrals::{build_basis, compute_integrals, PointChargeEnvironment};
use qembed::oracle::hydrogen_chain;
use qembed::qubitmap::{attach_symmetries, find_z2_symmetries, partition_commuting, qubit_hamiltonian};
use qembed::scf::{run_rhf, ScfOptions};
use qembed::MolecularHamiltonian;

fn main() -> qembed::Result<()> {
    let mol = hydrogen_chain(2, 1.4);
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

    let op = qubit_hamiltonian(&ham)?;
    println!("# {} Pauli terms (qubit 2p+s = spatial p, spin s)", op.len());
    print!("{}", op.to_text());

    let syms = find_z2_symmetries(&op, 1, 1);
    let mut groups = partition_commuting(&op)?;
    attach_symmetries(&mut groups, &syms);
    for (i, g) in groups.iter().enumerate() {
        let basis: String = g.basis.iter().map(|p| p.symbol()).collect();
        let s: Vec<&str> = g.symmetries.iter().map(|s| s.label.as_str()).collect();
        println!("group {i}: basis {basis}, {} terms, verifiable symmetries {s:?}", g.terms.len());
    }
    Ok(())
}
