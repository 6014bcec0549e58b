use nalgebra::DMatrix;

use crate::linalg::{select, sym_eigen};
use crate::scf::LocalizedRdm;
use crate::{Error, Result};

/// Singular values of the environment-fragment block of the 1-RDM below this
/// are treated as unentangled.
pub const BATH_THRESHOLD: f64 = 1e-6;

/// Fragment, bath and occupied-environment orbitals, as columns over the
/// Löwdin basis.
#[derive(Debug, Clone)]
pub struct EmbeddingBasis {
    pub frag_orbitals: DMatrix<f64>,
    pub bath_orbitals: DMatrix<f64>,
    pub env_occupied: DMatrix<f64>,
    /// Occupation (per spin) of each bath orbital; strictly inside (0, 1).
    pub bath_occupations: Vec<f64>,
    pub n_elec_emb: usize,
    /// Per-spin mean-field 1-RDM projected onto `[frag | bath]`.
    pub gamma_emb: DMatrix<f64>,
}

impl EmbeddingBasis {
    pub fn n_frag(&self) -> usize {
        self.frag_orbitals.ncols()
    }

    pub fn n_bath(&self) -> usize {
        self.bath_orbitals.ncols()
    }

    /// `[frag | bath]` columns.
    pub fn orbitals(&self) -> DMatrix<f64> {
        let n = self.frag_orbitals.nrows();
        let (a, b) = (self.n_frag(), self.n_bath());
        let mut m = DMatrix::zeros(n, a + b);
        m.columns_mut(0, a).copy_from(&self.frag_orbitals);
        m.columns_mut(a, b).copy_from(&self.bath_orbitals);
        m
    }

    /// Per-spin environment density built from the fully occupied
    /// environment orbitals.
    pub fn gamma_env(&self) -> DMatrix<f64> {
        &self.env_occupied * self.env_occupied.transpose()
    }
}

/// Bath construction from the mean-field RDM: the left singular vectors of
/// the environment x fragment block with non-negligible singular values.
pub fn build_bath(rdm: &LocalizedRdm, frag: &[usize]) -> Result<EmbeddingBasis> {
    let gamma = &rdm.gamma;
    let n = gamma.nrows();
    let idem = rdm.idempotency_error();
    if idem > 1e-6 {
        return Err(Error::NotIdempotent(idem));
    }
    if frag.is_empty() || frag.iter().any(|&i| i >= n) {
        return Err(Error::InvalidPartition(format!(
            "fragment orbitals {frag:?} invalid for {n} orbitals"
        )));
    }
    let env: Vec<usize> = (0..n).filter(|i| !frag.contains(i)).collect();
    let n_a = frag.len();
    let mut frag_orbitals = DMatrix::zeros(n, n_a);
    for (c, &i) in frag.iter().enumerate() {
        frag_orbitals[(i, c)] = 1.0;
    }

    let (bath_env, core_env, bath_occupations) = if env.is_empty() {
        (DMatrix::zeros(0, 0), DMatrix::zeros(0, 0), vec![])
    } else {
        let g_ea = select(gamma, &env, frag);
        let g_ee = select(gamma, &env, &env);
        let svd = g_ea.clone().svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let mut keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > BATH_THRESHOLD)
            .collect();
        keep.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let n_b = keep.len();
        let mut bath = DMatrix::zeros(env.len(), n_b);
        for (c, &k) in keep.iter().enumerate() {
            bath.set_column(c, &u.column(k));
        }
        // singular values pair up occupations l and 1 - l, so rotate to the
        // eigenbasis of Gamma_EE inside the bath span
        let (occ_vals, rot) = sym_eigen(&(bath.transpose() * &g_ee * &bath));
        let mut order: Vec<usize> = (0..n_b).collect();
        order.sort_by(|&a, &b| occ_vals[b].total_cmp(&occ_vals[a]));
        let rotated = &bath * rot;
        let mut occ = Vec::with_capacity(n_b);
        for (c, &k) in order.iter().enumerate() {
            let mut col = rotated.column(k).clone_owned();
            let imax = col.iamax();
            if col[imax] < 0.0 {
                col.neg_mut();
            }
            bath.set_column(c, &col);
            occ.push(occ_vals[k]);
        }
        // occupied environment: eigenvectors of Gamma_EE on the complement
        // of the bath with occupation ~1
        let q = DMatrix::identity(env.len(), env.len()) - &bath * bath.transpose();
        let (vals, vecs) = sym_eigen(&(&q * &g_ee * &q));
        let core_cols: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 0.5).collect();
        let mut core = DMatrix::zeros(env.len(), core_cols.len());
        for (c, &k) in core_cols.iter().enumerate() {
            core.set_column(c, &vecs.column(k));
        }
        (bath, core, occ)
    };

    let embed = |block: &DMatrix<f64>| {
        let mut m = DMatrix::zeros(n, block.ncols());
        for (r, &i) in env.iter().enumerate() {
            for c in 0..block.ncols() {
                m[(i, c)] = block[(r, c)];
            }
        }
        m
    };
    let bath_orbitals = embed(&bath_env);
    let env_occupied = embed(&core_env);

    let mut basis = EmbeddingBasis {
        frag_orbitals,
        bath_orbitals,
        env_occupied,
        bath_occupations,
        n_elec_emb: 0,
        gamma_emb: DMatrix::zeros(0, 0),
    };
    let b = basis.orbitals();
    let g_emb = b.transpose() * gamma * &b;
    let raw = 2.0 * g_emb.trace();
    let mut n_elec = raw.round() as i64;
    if n_elec % 2 != 0 {
        let shifted = if raw > n_elec as f64 { n_elec + 1 } else { n_elec - 1 };
        log::warn!(
            "embedding electron count {raw:.6} rounds to odd {n_elec}; using {shifted}"
        );
        n_elec = shifted;
    }
    basis.n_elec_emb = n_elec.max(0) as usize;
    basis.gamma_emb = g_emb;
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn rdm(gamma: DMatrix<f64>) -> LocalizedRdm {
        let n = gamma.nrows();
        LocalizedRdm {
            x: DMatrix::identity(n, n),
            gamma,
        }
    }

    #[test]
    fn h2_single_bath_orbital() {
        let g = DMatrix::from_element(2, 2, 0.5);
        let b = build_bath(&rdm(g), &[0]).unwrap();
        assert_eq!(b.n_bath(), 1);
        assert!((b.bath_occupations[0] - 0.5).abs() < 1e-12);
        assert_eq!(b.n_elec_emb, 2);
        assert_eq!(b.env_occupied.ncols(), 0);
    }

    #[test]
    fn whole_system_has_no_bath() {
        let g = DMatrix::from_element(2, 2, 0.5);
        let b = build_bath(&rdm(g), &[0, 1]).unwrap();
        assert_eq!(b.n_bath(), 0);
        assert_eq!(b.n_elec_emb, 2);
        assert!(max_abs(&(b.orbitals() - DMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn non_idempotent_rejected() {
        let g = DMatrix::from_diagonal_element(2, 2, 0.5);
        assert!(matches!(build_bath(&rdm(g), &[0]), Err(Error::NotIdempotent(_))));
    }
}
