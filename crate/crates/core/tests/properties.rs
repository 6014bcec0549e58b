use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use qembed::dmet::{define_fragments, run_dmet, DmetSystem, FragmentSolver, MeanFieldSolver, MuOptions, SolverKind};
use qembed::integrals::{
    attraction_matrix, build_basis, compute_integrals, Molecule, PointCharge, PointChargeEnvironment,
};
use qembed::oracle::{brute_force_fci, hydrogen_chain};
use qembed::qsim::{probabilities, sample_circuit, simulate_statevector, Angle, Circuit, Gate};
use qembed::qubitmap::{jordan_wigner, partition_commuting, qubit_hamiltonian, FermionOperator};
use qembed::scf::{run_rhf, ScfOptions};
use qembed::vqe::{estimate_energy, wrap_angle, Backend, VqeConfig, VqeProblem};
use qembed::workflow::{binding_energy, ranking_metric, LegEnergy};
use qembed::MolecularHamiltonian;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn triatomic(a: [f64; 3], b: [f64; 3]) -> Molecule {
    Molecule::from_bohr(&[("H", [0.0, 0.0, 0.0]), ("H", a), ("H", b)], 1).unwrap()
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0]
}

fn well_separated(a: &[f64; 3], b: &[f64; 3]) -> bool {
    let d = |u: &[f64; 3], v: &[f64; 3]| (0..3).map(|k| (u[k] - v[k]).powi(2)).sum::<f64>().sqrt();
    d(a, &[0.0; 3]) > 1.0 && d(b, &[0.0; 3]) > 1.0 && d(a, b) > 1.0
}

fn mo_hamiltonian(mol: &Molecule) -> (MolecularHamiltonian, f64) {
    let basis = build_basis(mol, "sto-3g").unwrap();
    let ints = compute_integrals(mol, &basis, &PointChargeEnvironment::vacuum());
    let scf = run_rhf(&ints, mol.n_electrons, &ScfOptions::default()).unwrap();
    let ham = MolecularHamiltonian {
        h: ints.h_core.clone(),
        eri: ints.eri.clone(),
        constant: ints.e_nuc,
        n_elec: mol.n_electrons,
    }
    .rotated(&scf.mo_coeffs);
    (ham, scf.e_total)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(cfg(12))]

    #[test]
    fn integrals_translation_invariant(a in point(), b in point(), c in point(), v in point()) {
        prop_assume!(well_separated(&a, &b));
        let mol = triatomic(a, b);
        let env = PointChargeEnvironment { charges: vec![PointCharge { q: -0.7, position: [c[0] + 5.0, c[1], c[2]] }] };
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let i0 = compute_integrals(&mol, &basis, &env);
        let (mol_t, env_t) = (mol.translated(v), env.translated(v));
        let i1 = compute_integrals(&mol_t, &build_basis(&mol_t, "sto-3g").unwrap(), &env_t);
        prop_assert!((&i0.overlap - &i1.overlap).abs().max() < 1e-10);
        prop_assert!((&i0.h_core - &i1.h_core).abs().max() < 1e-10);
        prop_assert!(max_diff(i0.eri.as_slice(), i1.eri.as_slice()) < 1e-10);
        prop_assert!((i0.e_nuc - i1.e_nuc).abs() < 1e-10);
    }

    #[test]
    fn integrals_symmetries(a in point(), b in point()) {
        prop_assume!(well_separated(&a, &b));
        let mol = triatomic(a, b);
        let ints = compute_integrals(&mol, &build_basis(&mol, "sto-3g").unwrap(), &PointChargeEnvironment::vacuum());
        prop_assert!((&ints.overlap - ints.overlap.transpose()).abs().max() < 1e-12);
        prop_assert!((&ints.h_core - ints.h_core.transpose()).abs().max() < 1e-12);
        prop_assert!(ints.overlap.clone().symmetric_eigen().eigenvalues.min() > 0.0);
        prop_assert!(ints.eri.symmetry_error() < 1e-12);
    }

    #[test]
    fn neutral_environment_is_vacuum(a in point(), b in point(), c in point()) {
        prop_assume!(well_separated(&a, &b));
        let mol = triatomic(a, b);
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let env = PointChargeEnvironment { charges: vec![PointCharge { q: 0.8, position: c }] }.scaled(0.0);
        let i0 = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
        let i1 = compute_integrals(&mol, &basis, &env);
        prop_assert!((&i0.h_core - &i1.h_core).abs().max() < 1e-12);
        prop_assert!((i0.e_nuc - i1.e_nuc).abs() < 1e-12);
    }

    #[test]
    fn charge_on_nucleus_scales_attraction(a in point(), b in point(), q in -1.5f64..1.5) {
        prop_assume!(well_separated(&a, &b));
        let mol = triatomic(a, b);
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let env = PointChargeEnvironment { charges: vec![PointCharge { q, position: a }] };
        let i0 = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
        let i1 = compute_integrals(&mol, &basis, &env);
        let z = mol.atoms[1].z as f64;
        let nucleus = attraction_matrix(&basis, &[(z, a)]);
        prop_assert!((&(&i1.h_core - &i0.h_core) - nucleus * (q / z)).abs().max() < 1e-10);
    }

    #[test]
    fn scf_idempotent_variational_and_order_free(r in 1.3f64..2.4, perm_seed in 0usize..24) {
        let mol = hydrogen_chain(4, r);
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let ints = compute_integrals(&mol, &basis, &PointChargeEnvironment::vacuum());
        let scf = run_rhf(&ints, 4, &ScfOptions::default()).unwrap();
        let plan = define_fragments(&mol, &basis, &[vec![0, 1], vec![2, 3]], &[SolverKind::MeanField; 2]).unwrap();
        let sys = DmetSystem::new(&mol, &basis, &PointChargeEnvironment::vacuum(), plan).unwrap();
        let g = &sys.rdm.gamma;
        prop_assert!((g * g - g).abs().max() < 1e-8);
        prop_assert!((g.trace() - 2.0).abs() < 1e-10);

        let (ham, _) = mo_hamiltonian(&mol);
        prop_assert!(scf.e_total >= brute_force_fci(&ham) - 1e-10);

        let mut perm: Vec<usize> = (0..4).collect();
        let mut k = perm_seed;
        for i in (1..4).rev() {
            perm.swap(i, k % (i + 1));
            k /= i + 1;
        }
        let e_perm = run_rhf(&ints.permuted(&perm), 4, &ScfOptions::default()).unwrap().e_total;
        prop_assert!((e_perm - scf.e_total).abs() < 1e-10);
    }

    #[test]
    fn dmet_mean_field_closure(r in 1.3f64..2.4, split in 1usize..4) {
        let mol = hydrogen_chain(4, r);
        let basis = build_basis(&mol, "sto-3g").unwrap();
        let parts = vec![(0..split).collect::<Vec<_>>(), (split..4).collect()];
        let plan = define_fragments(&mol, &basis, &parts, &[SolverKind::MeanField; 2]).unwrap();
        let sys = DmetSystem::new(&mol, &basis, &PointChargeEnvironment::vacuum(), plan).unwrap();
        for b in &sys.bases {
            prop_assert!(b.n_bath() <= b.n_frag());
            let c = b.orbitals();
            let ov = c.transpose() * &c;
            prop_assert!((ov - DMatrix::identity(c.ncols(), c.ncols())).abs().max() < 1e-8);
        }
        let solvers: [&dyn FragmentSolver; 2] = [&MeanFieldSolver, &MeanFieldSolver];
        let res = run_dmet(&sys, &solvers, &MuOptions::default()).unwrap();
        prop_assert!((res.energy - sys.e_hf()).abs() < 1e-8);
        prop_assert!(res.mu.abs() < 1e-8);
    }
}

fn random_hamiltonian(n: usize, vals: &[f64]) -> MolecularHamiltonian {
    let mut it = vals.iter().cycle().copied();
    let mut h = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..=p {
            let v = it.next().unwrap();
            h[(p, q)] = v;
            h[(q, p)] = v;
        }
    }
    let mut eri = qembed::linalg::Eri::zeros(n);
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * n + q >= r * n + s {
                        eri.set_sym8(p, q, r, s, 0.3 * it.next().unwrap());
                    }
                }
            }
        }
    }
    MolecularHamiltonian { h, eri, constant: 0.25, n_elec: 2 }
}

fn real_spectrum(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn qubit_matrix(op: &qembed::qubitmap::QubitOperator) -> DMatrix<Complex64> {
    op.to_matrix()
}

proptest! {
    #![proptest_config(cfg(16))]

    #[test]
    fn jordan_wigner_preserves_spectrum(vals in prop::collection::vec(-1.0f64..1.0, 30)) {
        let ham = random_hamiltonian(2, &vals);
        let q = qubit_hamiltonian(&ham).unwrap();
        let m = qubit_matrix(&q);
        prop_assert!(m.iter().all(|c| c.im.abs() < 1e-12));
        let ours = real_spectrum(m.map(|c| c.re));
        let reference = qembed::oracle::fock_space_spectrum(&ham);
        prop_assert!(max_diff(&ours, &reference) < 1e-8);
    }

    #[test]
    fn partition_is_complete(vals in prop::collection::vec(-1.0f64..1.0, 30)) {
        let ham = random_hamiltonian(2, &vals);
        let q = qubit_hamiltonian(&ham).unwrap();
        let groups = partition_commuting(&q).unwrap();
        let mut sum = qembed::qubitmap::QubitOperator::identity(4).scaled(Complex64::new(q.constant(), 0.0));
        for g in &groups {
            for (p, c) in &g.terms {
                prop_assert!(g.terms.iter().all(|(o, _)| o.qubitwise_commutes(p)));
                sum.add_term(*p, Complex64::new(*c, 0.0));
            }
        }
        prop_assert!((qubit_matrix(&sum) - qubit_matrix(&q)).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn statevector_norm_preserved(gates in prop::collection::vec((0usize..6, 0usize..4, 0usize..4, -3.0f64..3.0), 1..40)) {
        let mut c = Circuit::new(4);
        for (kind, a, b, t) in gates {
            let g = match kind {
                0 => Gate::X(a),
                1 => Gate::H(a),
                2 => Gate::S(a),
                3 => Gate::Sdg(a),
                4 => Gate::Rz(a, Angle::Fixed(t)),
                _ if a != b => Gate::Cnot { control: a, target: b },
                _ => Gate::H(b),
            };
            c.push(g).unwrap();
        }
        let norm: f64 = probabilities(&simulate_statevector(&c).unwrap()).iter().sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        let noise = qembed::qsim::NoiseModel::preset("nisq-2021").unwrap();
        prop_assert_eq!(sample_circuit(&c, 500, Some(&noise), 9).unwrap(), sample_circuit(&c, 500, Some(&noise), 9).unwrap());
    }

    #[test]
    fn wrap_angle_range(t in -100.0f64..100.0) {
        let w = wrap_angle(t);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((t - w) / (2.0 * PI)).fract().abs() < 1e-9 || (1.0 - ((t - w) / (2.0 * PI)).fract().abs()) < 1e-9);
    }

    #[test]
    fn binding_energy_leg_symmetry(p in -500.0f64..-1.0, s in -500.0f64..-1.0) {
        let (lp, ls) = (LegEnergy { energy: p, method: "m".into() }, LegEnergy { energy: s, method: "m".into() });
        prop_assert_eq!(binding_energy(&lp, &ls).unwrap(), -binding_energy(&ls, &lp).unwrap());
    }

    #[test]
    fn ranking_matrix_structure(e in prop::collection::vec(-1.0f64..1.0, 2..8)) {
        let series: Vec<(String, Option<f64>)> = e.iter().enumerate().map(|(i, v)| (format!("l{i}"), Some(*v))).collect();
        let r = ranking_metric(&series, "l0").unwrap();
        let n = e.len();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((r.m[i][j] - (e[i] - e[j])).abs() < 1e-12);
                prop_assert_eq!(r.m[i][j], -r.m[j][i]);
                for k in 0..n {
                    prop_assert!((r.m[i][j] + r.m[j][k] - r.m[i][k]).abs() < 1e-12);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(cfg(8))]

    #[test]
    fn vqe_rdm_trace_and_sinusoid(r in 1.0f64..3.0, theta in -PI..PI) {
        let (ham, e_hf) = mo_hamiltonian(&hydrogen_chain(2, r));
        let exact = brute_force_fci(&ham);
        let p = VqeProblem::new(ham).unwrap();
        let (rdm1, rdm2) = p.statevector_rdms(theta).unwrap();
        prop_assert!((rdm1.trace() - 2.0).abs() < 1e-10);
        let n = rdm1.nrows();
        for a in 0..n {
            for b in 0..n {
                let tr: f64 = (0..n).map(|c| rdm2[((a * n + b) * n + c) * n + c]).sum();
                prop_assert!((tr - rdm1[(a, b)]).abs() < 1e-10);
            }
        }
        // three samples fix a + b cos t + c sin t
        let e = |t: f64| p.statevector_energy(t).unwrap();
        let (e0, e1, e2) = (e(0.0), e(PI / 2.0), e(PI));
        let a = 0.5 * (e0 + e2);
        let model = a + (e0 - a) * theta.cos() + (e1 - a) * theta.sin();
        prop_assert!((model - e(theta)).abs() < 1e-10);
        prop_assert!(e(theta) >= exact - 1e-10);
        let best = qembed::vqe::vqe_minimize(&p, &VqeConfig::default()).unwrap().mean;
        prop_assert!(best <= e_hf + 1e-8 && best >= exact - 1e-8);
    }
}

#[test]
fn shot_noise_scales_as_inverse_sqrt() {
    let (ham, _) = mo_hamiltonian(&hydrogen_chain(2, 1.4));
    let p = VqeProblem::new(ham).unwrap();
    let mut points = Vec::new();
    for n in [1_000u64, 10_000, 100_000] {
        let energies: Vec<f64> = (0..40)
            .map(|seed| {
                let cfg = VqeConfig {
                    backend: Backend::Shots,
                    final_shots: n,
                    n_blocks: 10,
                    seed,
                    ..VqeConfig::default()
                };
                estimate_energy(&p, 0.4, &cfg).unwrap().mean
            })
            .collect();
        let mean = energies.iter().sum::<f64>() / 40.0;
        let sd = (energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 39.0).sqrt();
        points.push(((n as f64).ln(), sd.ln()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = points.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() < 0.1, "log-log slope {slope}");
}

#[test]
fn anticommutation_under_jordan_wigner() {
    let n = 4;
    let ladder = |m: usize, c: bool| {
        let mut op = FermionOperator::zero(n);
        op.add_term(vec![(m, c)], 1.0);
        qubit_matrix(&jordan_wigner(&op))
    };
    for i in 0..n {
        for j in 0..n {
            let (a, ad) = (ladder(i, false), ladder(j, true));
            let anti = &a * &ad + &ad * &a;
            let expect = if i == j { 1.0 } else { 0.0 };
            for r in 0..16 {
                for c in 0..16 {
                    let target = if r == c { expect } else { 0.0 };
                    assert!((anti[(r, c)] - Complex64::new(target, 0.0)).norm() < 1e-12);
                }
            }
            let (ai, aj) = (ladder(i, false), ladder(j, false));
            assert!((&ai * &aj + &aj * &ai).iter().all(|c| c.norm() < 1e-12));
        }
    }
}
