//! Brute-force reference implementations, kept deliberately separate from
//! the production code paths they check.
//!
//! - closed-form integrals over contracted s-type Gaussians,
//! - Roothaan SCF with Cholesky orthogonalization and no acceleration,
//! - exact diagonalization in the full Fock space built from explicit
//!   ladder-operator action on occupation bitstrings,
//! - environment-block eigenvalues as the bath-occupation reference,
//! - bisection-only root finding.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::dmet::{
    define_fragments, fci_ground_state, solve_chemical_potential, DmetSystem, FciSolver, FragmentSolver,
    MeanFieldSolver, MuOptions, SolverKind,
};
use crate::hamiltonian::MolecularHamiltonian;
use crate::integrals::{build_basis, compute_integrals, BasisSet, Molecule, PointChargeEnvironment};
use crate::linalg::Eri;
use crate::qubitmap::qubit_hamiltonian;
use crate::scf::{run_rhf, ScfOptions};
use crate::{Error, Result};

fn boys0(t: f64) -> f64 {
    if t < 1e-12 {
        1.0 - t / 3.0
    } else {
        0.5 * (PI / t).sqrt() * libm::erf(t.sqrt())
    }
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

fn centre(a: f64, ca: &[f64; 3], b: f64, cb: &[f64; 3]) -> [f64; 3] {
    let p = a + b;
    [0, 1, 2].map(|k| (a * ca[k] + b * cb[k]) / p)
}

/// Overlap, core Hamiltonian (kinetic plus attraction to `charges`) and
/// repulsion integrals for a basis made only of s functions.
pub fn s_integrals(basis: &BasisSet, charges: &[(f64, [f64; 3])]) -> Result<(DMatrix<f64>, DMatrix<f64>, Eri)> {
    if basis.aos.iter().any(|ao| ao.powers != [0, 0, 0]) {
        return Err(Error::InvalidArgument("closed-form oracle handles s functions only".into()));
    }
    let n = basis.n_ao;
    let mut s = DMatrix::zeros(n, n);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (ai, aj) = (&basis.aos[i], &basis.aos[j]);
            for &(a, ca) in &ai.primitives {
                for &(b, cb) in &aj.primitives {
                    let p = a + b;
                    let mu = a * b / p;
                    let r2 = dist2(&ai.center, &aj.center);
                    let ov = (PI / p).powf(1.5) * (-mu * r2).exp();
                    s[(i, j)] += ca * cb * ov;
                    let mut v = mu * (3.0 - 2.0 * mu * r2) * ov;
                    let pc = centre(a, &ai.center, b, &aj.center);
                    for (z, c) in charges {
                        v -= z * 2.0 * PI / p * (-mu * r2).exp() * boys0(p * dist2(&pc, c));
                    }
                    h[(i, j)] += ca * cb * v;
                }
            }
        }
    }
    let mut eri = Eri::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let aos = [&basis.aos[i], &basis.aos[j], &basis.aos[k], &basis.aos[l]];
                    let mut v = 0.0;
                    for &(a, ca) in &aos[0].primitives {
                        for &(b, cb) in &aos[1].primitives {
                            let p = a + b;
                            let pab = centre(a, &aos[0].center, b, &aos[1].center);
                            let kab = (-a * b / p * dist2(&aos[0].center, &aos[1].center)).exp();
                            for &(c, cc) in &aos[2].primitives {
                                for &(d, cd) in &aos[3].primitives {
                                    let q = c + d;
                                    let qcd = centre(c, &aos[2].center, d, &aos[3].center);
                                    let kcd = (-c * d / q * dist2(&aos[2].center, &aos[3].center)).exp();
                                    let pref = 2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt());
                                    v += ca * cb * cc * cd * pref * kab * kcd * boys0(p * q / (p + q) * dist2(&pab, &qcd));
                                }
                            }
                        }
                    }
                    eri.set(i, j, k, l, v);
                }
            }
        }
    }
    Ok((s, h, eri))
}

/// Closed-shell Roothaan iterations in the Cholesky-orthogonalized basis,
/// plain density mixing, no extrapolation. Returns the electronic plus
/// `e_nuc` energy.
pub fn roothaan_hf(
    s: &DMatrix<f64>,
    h: &DMatrix<f64>,
    eri: &Eri,
    e_nuc: f64,
    n_elec: usize,
) -> Result<f64> {
    let n = s.nrows();
    let n_occ = n_elec / 2;
    let l = s
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("overlap is not positive definite".into()))?
        .l();
    let x = l
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("singular Cholesky factor".into()))?
        .transpose();
    let density_of = |f: &DMatrix<f64>| -> DMatrix<f64> {
        let fp = x.transpose() * f * &x;
        let e = SymmetricEigen::new(fp);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let c = &x * &e.eigenvectors;
        let mut d = DMatrix::zeros(n, n);
        for &k in idx.iter().take(n_occ) {
            let col = c.column(k);
            d += 2.0 * col * col.transpose();
        }
        d
    };
    let fock = |d: &DMatrix<f64>| -> DMatrix<f64> {
        let mut f = h.clone();
        for p in 0..n {
            for q in 0..n {
                let mut v = 0.0;
                for r in 0..n {
                    for t in 0..n {
                        v += d[(r, t)] * (eri.get(p, q, r, t) - 0.5 * eri.get(p, r, t, q));
                    }
                }
                f[(p, q)] += v;
            }
        }
        f
    };
    let energy = |d: &DMatrix<f64>, f: &DMatrix<f64>| 0.5 * d.component_mul(&(h + f)).sum() + e_nuc;
    let mut d = density_of(h);
    let mut e_old = f64::INFINITY;
    for _ in 0..1000 {
        let f = fock(&d);
        let e = energy(&d, &f);
        let d_new = density_of(&f);
        let change = (&d_new - &d).abs().max();
        d = 0.5 * (&d + d_new);
        if (e - e_old).abs() < 1e-12 && change < 1e-9 {
            return Ok(e);
        }
        e_old = e;
    }
    Err(Error::InvalidArgument("reference SCF did not converge".into()))
}

/// Ladder operator on an occupation bitstring with the sign
/// `(-1)^{occupied modes below}`.
fn ladder(det: u64, mode: usize, create: bool) -> Option<(f64, u64)> {
    let bit = 1u64 << mode;
    if (det & bit != 0) == create {
        return None;
    }
    let sign = if (det & (bit - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, det ^ bit))
}

fn apply_string(det: u64, ops: &[(usize, bool)]) -> Option<(f64, u64)> {
    let mut d = det;
    let mut s = 1.0;
    for &(m, c) in ops.iter().rev() {
        let (sg, nd) = ladder(d, m, c)?;
        s *= sg;
        d = nd;
    }
    Some((s, d))
}

/// Dense Hamiltonian over the occupation states in `states`, spin-orbital
/// `2p + s`.
fn fock_matrix(ham: &MolecularHamiltonian, states: &[u64]) -> DMatrix<f64> {
    let n = ham.n_orbitals();
    let index: std::collections::HashMap<u64, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let dim = states.len();
    let mut m = DMatrix::zeros(dim, dim);
    for (j, &det) in states.iter().enumerate() {
        m[(j, j)] += ham.constant;
        for p in 0..n {
            for q in 0..n {
                for s in 0..2 {
                    if let Some((sg, d)) = apply_string(det, &[(2 * p + s, true), (2 * q + s, false)]) {
                        if let Some(&i) = index.get(&d) {
                            m[(i, j)] += sg * ham.h[(p, q)];
                        }
                    }
                }
                for r in 0..n {
                    for t in 0..n {
                        let v = ham.eri.get(p, q, r, t);
                        if v == 0.0 {
                            continue;
                        }
                        for s1 in 0..2 {
                            for s2 in 0..2 {
                                let ops = [(2 * p + s1, true), (2 * r + s2, true), (2 * t + s2, false), (2 * q + s1, false)];
                                if let Some((sg, d)) = apply_string(det, &ops) {
                                    if let Some(&i) = index.get(&d) {
                                        m[(i, j)] += 0.5 * sg * v;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Every eigenvalue of the Hamiltonian over the whole Fock space.
pub fn fock_space_spectrum(ham: &MolecularHamiltonian) -> Vec<f64> {
    let modes = 2 * ham.n_orbitals();
    let states: Vec<u64> = (0..1u64 << modes).collect();
    sorted_eigenvalues(fock_matrix(ham, &states))
}

/// Lowest eigenvalue among states with exactly `ham.n_elec` electrons.
pub fn brute_force_fci(ham: &MolecularHamiltonian) -> f64 {
    let modes = 2 * ham.n_orbitals();
    let states: Vec<u64> = (0..1u64 << modes)
        .filter(|s| s.count_ones() as usize == ham.n_elec)
        .collect();
    sorted_eigenvalues(fock_matrix(ham, &states))[0]
}

/// Eigenvalues of the environment block of an idempotent 1-RDM that lie
/// strictly inside `(tol, 1 - tol)`; these are the bath occupations.
pub fn environment_occupations(gamma: &DMatrix<f64>, fragment: &[usize], tol: f64) -> Vec<f64> {
    let env: Vec<usize> = (0..gamma.nrows()).filter(|i| !fragment.contains(i)).collect();
    let block = DMatrix::from_fn(env.len(), env.len(), |i, j| gamma[(env[i], env[j])]);
    let mut v: Vec<f64> = sorted_eigenvalues(block).into_iter().filter(|&x| x > tol && x < 1.0 - tol).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Root of `f` on `[lo, hi]` by bisection alone.
pub fn bisect(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidArgument(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Linear hydrogen chain with spacing `r` bohr.
pub fn hydrogen_chain(n: usize, r: f64) -> Molecule {
    let atoms: Vec<(&str, [f64; 3])> = (0..n).map(|i| ("H", [0.0, 0.0, r * i as f64])).collect();
    Molecule::from_bohr(&atoms, 0).expect("valid chain")
}

/// Planar hydrogen ring with nearest-neighbour distance `r` bohr.
pub fn hydrogen_ring(n: usize, r: f64) -> Molecule {
    let radius = r / (2.0 * (PI / n as f64).sin());
    let pos: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [radius * t.cos(), radius * t.sin(), 0.0]
        })
        .collect();
    let atoms: Vec<(&str, [f64; 3])> = pos.iter().map(|p| ("H", *p)).collect();
    Molecule::from_bohr(&atoms, 0).expect("valid ring")
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub reference: f64,
    pub value: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn deviation(&self) -> f64 {
        (self.value - self.reference).abs()
    }

    pub fn passed(&self) -> bool {
        self.deviation() <= self.tolerance
    }
}

fn check(name: impl Into<String>, reference: f64, value: f64, tolerance: f64) -> OracleCheck {
    OracleCheck {
        name: name.into(),
        reference,
        value,
        tolerance,
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Library results against the brute-force references on small hydrogen
/// systems.
pub fn run_cross_checks() -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    let vac = PointChargeEnvironment::vacuum();

    // integrals and SCF, H2 and H4 (the latter with a point charge)
    for (label, mol, env) in [
        ("H2", hydrogen_chain(2, 1.4), vac.clone()),
        (
            "H4+charge",
            hydrogen_chain(4, 1.6),
            crate::integrals::load_point_charges("0.0 1.5 1.0 -0.5\n")?,
        ),
    ] {
        let basis = build_basis(&mol, "sto-3g")?;
        let ints = compute_integrals(&mol, &basis, &env);
        let mut charges: Vec<(f64, [f64; 3])> = mol.atoms.iter().map(|a| (a.z as f64, a.position)).collect();
        charges.extend(env.charges.iter().map(|c| (c.q, c.position)));
        let (s, h, eri) = s_integrals(&basis, &charges)?;
        let ds = (&ints.overlap - &s).abs().max();
        let dh = (&ints.h_core - &h).abs().max();
        let de = max_dev(ints.eri.as_slice(), eri.as_slice());
        out.push(check(format!("{label} overlap max |dS|"), 0.0, ds, 1e-10));
        out.push(check(format!("{label} core Hamiltonian max |dh|"), 0.0, dh, 1e-10));
        out.push(check(format!("{label} repulsion max |d(pq|rs)|"), 0.0, de, 1e-10));
        let e_ref = roothaan_hf(&s, &h, &eri, ints.e_nuc, mol.n_electrons)?;
        let e = run_rhf(&ints, mol.n_electrons, &ScfOptions::default())?.e_total;
        out.push(check(format!("{label} RHF energy"), e_ref, e, 1e-8));
    }

    // FCI and JW spectrum on H2, FCI on H4
    for (label, mol) in [("H2", hydrogen_chain(2, 1.4)), ("H4", hydrogen_chain(4, 1.8))] {
        let basis = build_basis(&mol, "sto-3g")?;
        let ints = compute_integrals(&mol, &basis, &vac);
        let scf = run_rhf(&ints, mol.n_electrons, &ScfOptions::default())?;
        let ham = MolecularHamiltonian {
            h: ints.h_core.clone(),
            eri: ints.eri.clone(),
            constant: ints.e_nuc,
            n_elec: mol.n_electrons,
        }
        .rotated(&scf.mo_coeffs);
        out.push(check(format!("{label} FCI energy"), brute_force_fci(&ham), fci_ground_state(&ham)?.energy, 1e-10));
        if ham.n_orbitals() == 2 {
            let q = qubit_hamiltonian(&ham)?.to_matrix();
            let herm = DMatrix::from_fn(16, 16, |i, j| q[(i, j)].re);
            let imag = q.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
            let dev = max_dev(&sorted_eigenvalues(herm), &fock_space_spectrum(&ham)).max(imag);
            out.push(check(format!("{label} JW 16x16 spectrum max deviation"), 0.0, dev, 1e-10));
        }
    }

    // bath occupations on an H6 ring, two-atom fragment
    let ring = hydrogen_ring(6, 1.8);
    let basis = build_basis(&ring, "sto-3g")?;
    let plan = define_fragments(
        &ring,
        &basis,
        &[vec![0, 1], vec![2, 3], vec![4, 5]],
        &[SolverKind::MeanField; 3],
    )?;
    let sys = DmetSystem::new(&ring, &basis, &vac, plan)?;
    let frag = &sys.plan.fragments[0].orbitals;
    let occ = environment_occupations(&sys.rdm.gamma, frag, 1e-6);
    let mut lib = sys.bases[0].bath_occupations.clone();
    lib.sort_by(|a, b| b.total_cmp(a));
    out.push(check("H6 ring bath occupations max deviation", 0.0, max_dev(&occ, &lib), 1e-8));

    // chemical potential on H4 next to a charge: FCI on the first pair,
    // HF on the second
    let chain = hydrogen_chain(4, 1.8);
    let basis = build_basis(&chain, "sto-3g")?;
    let field = crate::integrals::load_point_charges("0.0 0.0 -1.2 0.4\n")?;
    let plan = define_fragments(
        &chain,
        &basis,
        &[vec![0, 1], vec![2, 3]],
        &[SolverKind::ExactDiagonalization, SolverKind::MeanField],
    )?;
    let sys = DmetSystem::new(&chain, &basis, &field, plan)?;
    let fci = FciSolver::default();
    let solvers: [&dyn FragmentSolver; 2] = [&fci, &MeanFieldSolver];
    let opts = MuOptions {
        tol: 1e-10,
        zero_tol: 0.0,
        ..MuOptions::default()
    };
    let mu = solve_chemical_potential(&sys, &solvers, &opts)?.mu;
    let f = |m: f64| -> Result<f64> { Ok(sys.electron_residual(&sys.evaluate(&solvers, m)?)) };
    let mu_ref = bisect(f, -1.0, 1.0, 1e-10)?;
    out.push(check("H4 chemical potential root", mu_ref, mu, 1e-6));
    Ok(out)
}
