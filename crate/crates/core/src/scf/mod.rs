//! Closed-shell Hartree-Fock, Löwdin orthogonalization and the localized
//! one-particle density matrix that seeds the embedding.

mod diis;

use nalgebra::DMatrix;

use crate::integrals::IntegralSet;
use crate::linalg::{coulomb_exchange, max_abs, sym_eigen};
use crate::{Error, Result};
use diis::Diis;

#[derive(Debug, Clone)]
pub struct ScfOptions {
    pub max_iter: usize,
    pub diis_size: usize,
    /// Convergence on `max |FDS - SDF|`.
    pub commutator_tol: f64,
    /// Convergence on the change of the total energy between iterations.
    pub energy_tol: f64,
    /// Per-spin starting density (occupations in [0, 1]); core-Hamiltonian
    /// guess when absent.
    pub initial_density: Option<DMatrix<f64>>,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            diis_size: 8,
            commutator_tol: 1e-8,
            energy_tol: 1e-10,
            initial_density: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScfSolution {
    /// MO coefficients, one column per orbital, ascending orbital energy.
    pub mo_coeffs: DMatrix<f64>,
    pub mo_energies: Vec<f64>,
    pub e_total: f64,
    pub e_electronic: f64,
    pub e_nuc: f64,
    pub n_occ: usize,
    pub converged: bool,
    pub n_iterations: usize,
    /// Spin-summed AO density `2 C_occ C_occ^T`.
    pub density: DMatrix<f64>,
    pub fock: DMatrix<f64>,
}

impl ScfSolution {
    pub fn occupied(&self) -> DMatrix<f64> {
        self.mo_coeffs.columns(0, self.n_occ).clone_owned()
    }
}

/// `X = S^{-1/2}` via symmetric eigendecomposition.
pub fn lowdin_transform(overlap: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (vals, vecs) = sym_eigen(overlap);
    if vals[0] < 1e-10 {
        return Err(Error::LinearDependence(vals[0]));
    }
    let d = DMatrix::from_diagonal(&vals.map(|v| 1.0 / v.sqrt()));
    let x = &vecs * d * vecs.transpose();
    Ok((&x + x.transpose()) * 0.5)
}

fn fock_matrix(ints: &IntegralSet, density: &DMatrix<f64>) -> DMatrix<f64> {
    let (j, k) = coulomb_exchange(&ints.eri, density);
    &ints.h_core + j - k * 0.5
}

fn electronic_energy(h: &DMatrix<f64>, f: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    0.5 * d.component_mul(&(h + f)).sum()
}

/// Restricted Hartree-Fock with DIIS.
pub fn run_rhf(ints: &IntegralSet, n_electrons: usize, opts: &ScfOptions) -> Result<ScfSolution> {
    if n_electrons % 2 == 1 {
        return Err(Error::OddElectronCount(n_electrons));
    }
    let n = ints.n_ao();
    let n_occ = n_electrons / 2;
    if n_occ > n {
        return Err(Error::InvalidArgument(format!(
            "{n_electrons} electrons do not fit in {n} orbitals"
        )));
    }
    let s = &ints.overlap;
    let x = lowdin_transform(s)?;
    let diagonalize = |f: &DMatrix<f64>| {
        let fp = x.transpose() * f * &x;
        let (eps, cp) = sym_eigen(&fp);
        let c = &x * cp;
        (eps.iter().copied().collect::<Vec<_>>(), c)
    };
    let density_of = |c: &DMatrix<f64>| {
        let occ = c.columns(0, n_occ);
        occ * occ.transpose() * 2.0
    };

    let mut density = match &opts.initial_density {
        Some(d) => {
            if d.nrows() != n || d.ncols() != n {
                return Err(Error::Dimension(format!(
                    "initial density is {}x{}, expected {n}x{n}",
                    d.nrows(),
                    d.ncols()
                )));
            }
            d * 2.0
        }
        None => density_of(&diagonalize(&ints.h_core).1),
    };

    let mut diis = Diis::new(opts.diis_size);
    let mut e_prev = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut e_el = 0.0;
    for iter in 1..=opts.max_iter {
        let f = fock_matrix(ints, &density);
        e_el = electronic_energy(&ints.h_core, &f, &density);
        let comm = &f * &density * s - s * &density * &f;
        residual = max_abs(&comm);
        let de = (e_el - e_prev).abs();
        if residual < opts.commutator_tol && (de < opts.energy_tol || n_occ == 0) {
            let (eps, c) = diagonalize(&f);
            return Ok(ScfSolution {
                mo_coeffs: c,
                mo_energies: eps,
                e_total: e_el + ints.e_nuc,
                e_electronic: e_el,
                e_nuc: ints.e_nuc,
                n_occ,
                converged: true,
                n_iterations: iter,
                density,
                fock: f,
            });
        }
        e_prev = e_el;
        let err = x.transpose() * &comm * &x;
        let f_ext = diis.extrapolate(f, err);
        let (_, c) = diagonalize(&f_ext);
        density = density_of(&c);
    }
    Err(Error::ScfNotConverged {
        iterations: opts.max_iter,
        energy: e_el + ints.e_nuc,
        residual,
    })
}

/// Löwdin transform together with the mean-field 1-RDM expressed in the
/// Löwdin-orthogonalized AO basis.
#[derive(Debug, Clone)]
pub struct LocalizedRdm {
    /// `S^{-1/2}`.
    pub x: DMatrix<f64>,
    /// Per-spin 1-RDM; eigenvalues 0 or 1, trace `N/2`.
    pub gamma: DMatrix<f64>,
}

impl LocalizedRdm {
    pub fn n_orbitals(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn idempotency_error(&self) -> f64 {
        max_abs(&(&self.gamma * &self.gamma - &self.gamma))
    }
}

/// `Gamma = C_loc C_loc^T` with `C_loc = S^{1/2} C_occ`.
pub fn localized_rdm(scf: &ScfSolution, x: &DMatrix<f64>, overlap: &DMatrix<f64>) -> LocalizedRdm {
    // S X = S^{1/2}
    let c_loc = overlap * x * scf.occupied();
    let g = &c_loc * c_loc.transpose();
    LocalizedRdm {
        x: x.clone(),
        gamma: (&g + g.transpose()) * 0.5,
    }
}
