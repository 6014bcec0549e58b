use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::qsim::{derive_seed, sample_circuit, Circuit, Distribution, Gate, NoiseModel, ShotTable};
use crate::qubitmap::{MeasurementGroup, Symmetry};
use crate::{Error, Result};

/// Largest register the full transfer-matrix calibration accepts.
pub const MAX_SPAM_QUBITS: usize = 6;

/// Drop bitstrings outside the symmetry sector.
pub fn pmsv_filter(table: &ShotTable, symmetries: &[Symmetry]) -> Result<ShotTable> {
    let mut out = table.clone();
    out.counts.retain(|&b, _| symmetries.iter().all(|s| s.satisfied_by(b)));
    out.n_shots_recorded = out.total();
    if out.n_shots_recorded == 0 {
        return Err(Error::Starvation(format!(
            "post-selection removed all {} shots of group {}",
            table.total(),
            table.group_id
        )));
    }
    out.mitigation.push("pmsv".into());
    Ok(out)
}

/// Post-selection on a probability vector; returns the renormalized
/// distribution and the retained mass.
pub fn pmsv_filter_distribution(dist: &Distribution, symmetries: &[Symmetry]) -> Result<(Distribution, f64)> {
    let mut probs = dist.probs.clone();
    for (b, p) in probs.iter_mut().enumerate() {
        if !symmetries.iter().all(|s| s.satisfied_by(b as u64)) {
            *p = 0.0;
        }
    }
    let kept: f64 = probs.iter().sum();
    if kept <= 0.0 {
        return Err(Error::Starvation("post-selection removed all probability mass".into()));
    }
    for p in probs.iter_mut() {
        *p /= kept;
    }
    Ok((Distribution { n_qubits: dist.n_qubits, probs }, kept))
}

/// Readout transfer matrix, `matrix[(measured, prepared)]`.
#[derive(Debug, Clone)]
pub struct SpamProfile {
    pub n_qubits: usize,
    pub matrix: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub shots_per_state: u64,
    pub condition_number: f64,
    pub pseudo_inverse: bool,
}

impl SpamProfile {
    pub fn identity(n_qubits: usize) -> Self {
        Self::from_matrix(DMatrix::identity(1 << n_qubits, 1 << n_qubits), 0)
            .expect("identity is a valid transfer matrix")
    }

    pub fn from_matrix(matrix: DMatrix<f64>, shots_per_state: u64) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "transfer matrix must be square with power-of-two size, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let sv = matrix.clone().svd(true, true);
        let smax = sv.singular_values.max();
        let smin = sv.singular_values.min();
        let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        let singular = smin <= 1e-12 * smax;
        let inverse = if singular {
            log::warn!("SPAM transfer matrix is singular (condition {condition_number:.3e}); using pseudo-inverse");
            sv.pseudo_inverse(1e-12 * smax)
                .map_err(|e| Error::InvalidArgument(format!("pseudo-inverse failed: {e}")))?
        } else {
            matrix
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::InvalidArgument("transfer matrix inversion failed".into()))?
        };
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
            inverse,
            shots_per_state,
            condition_number,
            pseudo_inverse: singular,
        })
    }
}

/// Estimate the transfer matrix by preparing every basis state with X gates
/// and measuring it.
pub fn spam_calibrate(
    noise: Option<&NoiseModel>,
    n_qubits: usize,
    shots_per_state: u64,
    seed: u64,
) -> Result<SpamProfile> {
    if n_qubits == 0 || n_qubits > MAX_SPAM_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "SPAM calibration supports 1..={MAX_SPAM_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let dim = 1usize << n_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let mut c = Circuit::new(n_qubits);
        for q in 0..n_qubits {
            if s >> q & 1 == 1 {
                c.push(Gate::X(q))?;
            }
        }
        let counts = sample_circuit(&c, shots_per_state, noise, derive_seed(seed, &[s as u64]))?;
        for (b, k) in counts {
            m[(b as usize, s)] = k as f64 / shots_per_state as f64;
        }
    }
    SpamProfile::from_matrix(m, shots_per_state)
}

/// `M^{-1} f`, negative entries clipped to zero and renormalized.
pub fn spam_correct(dist: &Distribution, profile: &SpamProfile) -> Result<Distribution> {
    if dist.n_qubits != profile.n_qubits || dist.probs.len() != profile.matrix.nrows() {
        return Err(Error::Dimension(format!(
            "distribution over {} qubits, SPAM profile over {}",
            dist.n_qubits, profile.n_qubits
        )));
    }
    let f = DVector::from_column_slice(&dist.probs);
    let mut p: Vec<f64> = (&profile.inverse * f).iter().map(|v| v.max(0.0)).collect();
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::Starvation("SPAM correction left no probability mass".into()));
    }
    for v in p.iter_mut() {
        *v /= total;
    }
    Ok(Distribution { n_qubits: dist.n_qubits, probs: p })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MitigationOrder {
    #[default]
    PmsvFirst,
    SpamFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mitigation {
    pub pmsv: bool,
    pub spam: bool,
    pub order: MitigationOrder,
}

impl Mitigation {
    pub const NONE: Mitigation = Mitigation {
        pmsv: false,
        spam: false,
        order: MitigationOrder::PmsvFirst,
    };
    pub const PMSV: Mitigation = Mitigation {
        pmsv: true,
        spam: false,
        order: MitigationOrder::PmsvFirst,
    };
    pub const PMSV_SPAM: Mitigation = Mitigation {
        pmsv: true,
        spam: true,
        order: MitigationOrder::PmsvFirst,
    };
    pub const SPAM_PMSV: Mitigation = Mitigation {
        pmsv: true,
        spam: true,
        order: MitigationOrder::SpamFirst,
    };
}

/// Mitigated outcome distribution of one group and the fraction of shots
/// (or probability mass) that survived post-selection.
pub fn mitigate(
    table: &ShotTable,
    group: &MeasurementGroup,
    mitigation: Mitigation,
    spam: Option<&SpamProfile>,
) -> Result<(Distribution, f64)> {
    let use_pmsv = mitigation.pmsv && !group.symmetries.is_empty();
    let spam = if mitigation.spam { spam } else { None };
    if mitigation.spam && spam.is_none() {
        return Err(Error::InvalidArgument("SPAM mitigation requested without a profile".into()));
    }
    match mitigation.order {
        MitigationOrder::PmsvFirst => {
            let (dist, kept) = if use_pmsv {
                let t = pmsv_filter(table, &group.symmetries)?;
                (Distribution::from_table(&t)?, t.total() as f64 / table.total() as f64)
            } else {
                (Distribution::from_table(table)?, 1.0)
            };
            let dist = match spam {
                Some(p) => spam_correct(&dist, p)?,
                None => dist,
            };
            Ok((dist, kept))
        }
        MitigationOrder::SpamFirst => {
            let mut dist = Distribution::from_table(table)?;
            if let Some(p) = spam {
                dist = spam_correct(&dist, p)?;
            }
            if use_pmsv {
                pmsv_filter_distribution(&dist, &group.symmetries)
            } else {
                Ok((dist, 1.0))
            }
        }
    }
}
