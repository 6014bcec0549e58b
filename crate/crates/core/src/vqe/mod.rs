//! Variational quantum eigensolver with the single-parameter YXXX ansatz,
//! shot-based estimation in blocks, and symmetry/readout error mitigation.

pub mod mitigation;
pub mod optimize;
pub mod problem;

use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use mitigation::{
    mitigate, pmsv_filter, pmsv_filter_distribution, spam_calibrate, spam_correct, Mitigation,
    MitigationOrder, SpamProfile, MAX_SPAM_QUBITS,
};
pub use optimize::{
    golden_section, parameter_shift_gradient, rotosolve, scan, wrap_angle, OptimizeResult,
    OptimizerKind,
};
pub use problem::{expectations_from_groups, PauliExpectations, VqeProblem};

use crate::dmet::{
    embedding_mean_field, fold_active_space, ActiveSpace, EmbeddingProblem, FragmentSolution,
    FragmentSolver, SolverDiagnostics,
};
use crate::qsim::{derive_seed, sample_shots, NoiseModel};
use crate::qubitmap::MeasurementGroup;
use crate::{Error, Result};

// seed-stream tags
const TAG_ITERATION: u64 = 1;
const TAG_SPAM: u64 = 2;
const TAG_FINAL: u64 = 3;
const TAG_RDM: u64 = 4;

/// Statevector gradient tolerance for accepting an optimum.
pub const GRADIENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Backend {
    #[default]
    #[serde(rename = "statevector")]
    Statevector,
    #[serde(rename = "shots")]
    Shots,
    #[serde(rename = "shots+noise")]
    NoisyShots,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Statevector => "statevector",
            Backend::Shots => "shots",
            Backend::NoisyShots => "shots+noise",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statevector" => Ok(Backend::Statevector),
            "shots" => Ok(Backend::Shots),
            "shots+noise" | "noisy" => Ok(Backend::NoisyShots),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeConfig {
    pub optimizer: OptimizerKind,
    pub shots_per_iteration: u64,
    /// Shots per measurement group for the final evaluation, split evenly
    /// across `n_blocks`.
    pub final_shots: u64,
    pub n_blocks: usize,
    pub backend: Backend,
    /// Preset used by the `shots+noise` backend unless `noise` is given.
    pub noise_preset: String,
    pub noise: Option<NoiseModel>,
    pub pmsv: bool,
    pub spam: bool,
    pub mitigation_order: MitigationOrder,
    pub spam_shots_per_state: u64,
    /// Optimize on the sampling backend instead of reusing the statevector
    /// optimum.
    pub optimize_on_backend: bool,
    pub initial_theta: f64,
    pub seed: u64,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerKind::Rotosolve,
            shots_per_iteration: 6000,
            final_shots: 60000,
            n_blocks: 10,
            backend: Backend::Statevector,
            noise_preset: "nisq-2021".into(),
            noise: None,
            pmsv: true,
            spam: true,
            mitigation_order: MitigationOrder::PmsvFirst,
            spam_shots_per_state: 10000,
            optimize_on_backend: false,
            initial_theta: 0.0,
            seed: 0,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_blocks == 0 || self.final_shots == 0 || !self.final_shots.is_multiple_of(self.n_blocks as u64) {
            return Err(Error::Config(format!(
                "final_shots ({}) must be a positive multiple of n_blocks ({})",
                self.final_shots, self.n_blocks
            )));
        }
        if self.shots_per_iteration == 0 || self.spam_shots_per_state == 0 {
            return Err(Error::Config("shot counts must be positive".into()));
        }
        if let Some(n) = self.noise_model()? {
            n.validate()?;
        }
        Ok(())
    }

    /// Noise applied by the backend, `None` when sampling is ideal.
    pub fn noise_model(&self) -> Result<Option<NoiseModel>> {
        match self.backend {
            Backend::NoisyShots => match &self.noise {
                Some(n) => Ok(Some(n.clone())),
                None => NoiseModel::preset(&self.noise_preset).map(Some),
            },
            _ => Ok(None),
        }
    }

    pub fn mitigation(&self) -> Mitigation {
        Mitigation {
            pmsv: self.pmsv,
            spam: self.spam,
            order: self.mitigation_order,
        }
    }

    /// Short label such as `shots+noise[pmsv,spam]`.
    pub fn label(&self) -> String {
        let mut tags = Vec::new();
        if self.backend != Backend::Statevector {
            if self.pmsv {
                tags.push("pmsv");
            }
            if self.spam {
                tags.push("spam");
            }
        }
        if tags.is_empty() {
            self.backend.to_string()
        } else {
            format!("{}[{}]", self.backend, tags.join(","))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub mean: f64,
    /// Sample standard deviation of the block energies.
    pub std: f64,
    pub n_blocks: usize,
    /// Post-selected shots over raw shots in the groups that carry
    /// symmetries; 1 when nothing was post-selected.
    pub survival_fraction: f64,
    pub theta_star: f64,
    pub block_energies: Vec<f64>,
    pub spam_condition: Option<f64>,
}

impl EnergyEstimate {
    fn exact(theta: f64, energy: f64) -> Self {
        Self {
            mean: energy,
            std: 0.0,
            n_blocks: 1,
            survival_fraction: 1.0,
            theta_star: theta,
            block_energies: vec![energy],
            spam_condition: None,
        }
    }

    fn from_blocks(theta: f64, blocks: Vec<(f64, u64, u64)>, spam_condition: Option<f64>) -> Self {
        let n = blocks.len();
        let energies: Vec<f64> = blocks.iter().map(|b| b.0).collect();
        let mean = energies.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let raw: u64 = blocks.iter().map(|b| b.1).sum();
        let kept: u64 = blocks.iter().map(|b| b.2).sum();
        Self {
            mean,
            std,
            n_blocks: n,
            survival_fraction: if raw == 0 { 1.0 } else { kept as f64 / raw as f64 },
            theta_star: theta,
            block_energies: energies,
            spam_condition,
        }
    }
}

/// One sampled pass over `groups`: per-string expectations plus raw and
/// surviving shot counts of the post-selected groups.
pub fn sample_expectations(
    problem: &VqeProblem,
    groups: &[MeasurementGroup],
    theta: f64,
    shots_per_group: u64,
    noise: Option<&NoiseModel>,
    mitigation: Mitigation,
    spam: Option<&SpamProfile>,
    seed: u64,
) -> Result<(PauliExpectations, u64, u64)> {
    let circ = problem.circuit(theta)?;
    let mut probs = Vec::with_capacity(groups.len());
    let (mut raw, mut kept) = (0u64, 0u64);
    for (gi, g) in groups.iter().enumerate() {
        let table = sample_shots(&circ, g, gi, shots_per_group, noise, derive_seed(seed, &[gi as u64]))?;
        let (dist, frac) = mitigate(&table, g, mitigation, spam)?;
        if mitigation.pmsv && !g.symmetries.is_empty() {
            raw += table.total();
            kept += (frac * table.total() as f64).round() as u64;
        }
        probs.push(dist.probs);
    }
    Ok((expectations_from_groups(groups, &probs), raw, kept))
}

fn calibrate(problem: &VqeProblem, cfg: &VqeConfig, noise: Option<&NoiseModel>) -> Result<Option<SpamProfile>> {
    if cfg.backend == Backend::Statevector || !cfg.spam {
        return Ok(None);
    }
    let p = spam_calibrate(noise, problem.n_qubits, cfg.spam_shots_per_state, derive_seed(cfg.seed, &[TAG_SPAM]))?;
    Ok(Some(p))
}

fn block_estimate(
    problem: &VqeProblem,
    groups: &[MeasurementGroup],
    theta: f64,
    cfg: &VqeConfig,
    tag: u64,
) -> Result<(EnergyEstimate, PauliExpectations)> {
    cfg.validate()?;
    let noise = cfg.noise_model()?;
    let spam = calibrate(problem, cfg, noise.as_ref())?;
    let per_block = cfg.final_shots / cfg.n_blocks as u64;
    let blocks: Vec<(PauliExpectations, u64, u64)> = (0..cfg.n_blocks)
        .into_par_iter()
        .map(|b| {
            sample_expectations(
                problem,
                groups,
                theta,
                per_block,
                noise.as_ref(),
                cfg.mitigation(),
                spam.as_ref(),
                derive_seed(cfg.seed, &[tag, b as u64]),
            )
        })
        .collect::<Result<_>>()?;
    let mut avg = PauliExpectations::new();
    let mut summary = Vec::with_capacity(blocks.len());
    for (ex, raw, kept) in &blocks {
        summary.push((problem.energy_from_expectations(ex)?, *raw, *kept));
        for (p, v) in ex {
            *avg.entry(*p).or_default() += v / blocks.len() as f64;
        }
    }
    let est = EnergyEstimate::from_blocks(theta, summary, spam.as_ref().map(|s| s.condition_number));
    Ok((est, avg))
}

/// Energy at fixed `theta` on the configured backend.
pub fn estimate_energy(problem: &VqeProblem, theta: f64, cfg: &VqeConfig) -> Result<EnergyEstimate> {
    if cfg.backend == Backend::Statevector {
        return Ok(EnergyEstimate::exact(theta, problem.statevector_energy(theta)?));
    }
    Ok(block_estimate(problem, &problem.energy_groups, theta, cfg, TAG_FINAL)?.0)
}

fn run_optimizer(
    kind: OptimizerKind,
    f: &mut impl FnMut(f64) -> Result<f64>,
    theta0: f64,
    exact: bool,
) -> Result<OptimizeResult> {
    match kind {
        OptimizerKind::Rotosolve => rotosolve(f, theta0, if exact { 4 } else { 2 }, 1e-12),
        OptimizerKind::GoldenSection => {
            golden_section(f, theta0 - std::f64::consts::PI, theta0 + std::f64::consts::PI, 1e-10, 200)
        }
        OptimizerKind::Scan => scan(f, 64, 1e-10),
    }
}

/// Optimal ansatz angle. Uses the exact energy unless the configuration
/// asks to optimize on a sampling backend.
pub fn optimize_theta(problem: &VqeProblem, cfg: &VqeConfig) -> Result<OptimizeResult> {
    if cfg.optimize_on_backend && cfg.backend != Backend::Statevector {
        cfg.validate()?;
        let noise = cfg.noise_model()?;
        let spam = calibrate(problem, cfg, noise.as_ref())?;
        let mut counter = 0u64;
        let mut f = |t: f64| -> Result<f64> {
            counter += 1;
            let (ex, _, _) = sample_expectations(
                problem,
                &problem.energy_groups,
                t,
                cfg.shots_per_iteration,
                noise.as_ref(),
                cfg.mitigation(),
                spam.as_ref(),
                derive_seed(cfg.seed, &[TAG_ITERATION, counter]),
            )?;
            problem.energy_from_expectations(&ex)
        };
        return run_optimizer(cfg.optimizer, &mut f, cfg.initial_theta, false);
    }
    let mut f = |t: f64| problem.statevector_energy(t);
    let mut r = run_optimizer(cfg.optimizer, &mut f, cfg.initial_theta, true)?;
    let g = parameter_shift_gradient(&mut f, r.theta)?;
    if g.abs() >= GRADIENT_TOL {
        log::warn!("gradient {g:.3e} at theta {:.6} after {:?}; refining", r.theta, cfg.optimizer);
        let mut refined = golden_section(&mut f, r.theta - 0.5, r.theta + 0.5, 1e-12, 400)?;
        let g2 = parameter_shift_gradient(&mut f, refined.theta)?;
        r.trace.append(&mut refined.trace);
        if g2.abs() >= GRADIENT_TOL {
            let trace = r
                .trace
                .iter()
                .map(|(t, e)| format!("E({t:+.6})={e:.10}"))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::Optimizer(format!("gradient {g2:.3e} remains above {GRADIENT_TOL:e}: {trace}")));
        }
        refined.trace = r.trace;
        refined.evaluations = refined.trace.len();
        return Ok(refined);
    }
    Ok(r)
}

/// Optimize the ansatz and evaluate the energy at the optimum.
pub fn vqe_minimize(problem: &VqeProblem, cfg: &VqeConfig) -> Result<EnergyEstimate> {
    let opt = optimize_theta(problem, cfg)?;
    estimate_energy(problem, opt.theta, cfg)
}

/// `E_vqe - E_hf`; a positive value is allowed but logged.
pub fn correlation_energy(estimate: &EnergyEstimate, mean_field_energy: f64) -> f64 {
    let e = estimate.mean - mean_field_energy;
    if e > 0.0 {
        log::warn!("positive correlation energy {e:.6} Ha (sampling noise exceeds correlation)");
    }
    e
}

#[derive(Debug, Clone)]
pub struct VqeRdms {
    pub rdm1: DMatrix<f64>,
    pub rdm2: Vec<f64>,
    pub estimate: EnergyEstimate,
}

/// Spin-summed RDMs of the ansatz state at `theta`; exact on the statevector
/// backend, otherwise from block-averaged Pauli expectations.
pub fn rdms_from_vqe(problem: &VqeProblem, theta: f64, cfg: &VqeConfig) -> Result<VqeRdms> {
    if cfg.backend == Backend::Statevector {
        let (rdm1, rdm2) = problem.statevector_rdms(theta)?;
        return Ok(VqeRdms {
            rdm1,
            rdm2,
            estimate: EnergyEstimate::exact(theta, problem.statevector_energy(theta)?),
        });
    }
    let groups = problem.rdm_groups()?;
    let (estimate, avg) = block_estimate(problem, &groups, theta, cfg, TAG_RDM)?;
    let (rdm1, rdm2) = problem.rdms_from_expectations(&avg)?;
    Ok(VqeRdms { rdm1, rdm2, estimate })
}

/// DMET fragment solver: HF of the embedding problem, fold to the active
/// window, VQE on the folded Hamiltonian, expand the RDMs back.
///
/// `solve` always works on the statevector; sampled backends are applied
/// once in `finalize` at the converged chemical potential.
#[derive(Debug, Clone)]
pub struct VqeSolver {
    pub config: VqeConfig,
    pub active_space: ActiveSpace,
}

impl VqeSolver {
    pub fn new(config: VqeConfig) -> Self {
        Self {
            config,
            active_space: ActiveSpace::HOMO_LUMO,
        }
    }

    /// Active-space problem of `prob`, the VQE problem built on it and the
    /// embedding mean-field energy.
    pub fn fold(&self, prob: &EmbeddingProblem) -> Result<(crate::dmet::ActiveSpaceProblem, VqeProblem, f64)> {
        let scf = embedding_mean_field(prob)?;
        let act = fold_active_space(&prob.hamiltonian(), &scf.mo_coeffs, &self.active_space)?;
        let vp = VqeProblem::new(act.hamiltonian.clone())?;
        Ok((act, vp, scf.e_total))
    }

    fn solution(
        &self,
        prob: &EmbeddingProblem,
        act: &crate::dmet::ActiveSpaceProblem,
        rdms: VqeRdms,
        e_mf: f64,
    ) -> FragmentSolution {
        let (d1, d2) = act.expand_rdms(&rdms.rdm1, &rdms.rdm2);
        let mut sol = FragmentSolution::from_rdms(prob, d1, d2, rdms.estimate.mean, e_mf);
        sol.diagnostics = Some(SolverDiagnostics {
            energy_std: rdms.estimate.std,
            survival_fraction: (self.config.backend != Backend::Statevector)
                .then_some(rdms.estimate.survival_fraction),
            spam_condition: rdms.estimate.spam_condition,
            parameters: vec![rdms.estimate.theta_star],
        });
        sol
    }
}

impl FragmentSolver for VqeSolver {
    fn name(&self) -> String {
        format!("vqe-yxxx({})", self.config.label())
    }

    fn solve(&self, prob: &EmbeddingProblem) -> Result<FragmentSolution> {
        let (act, vp, e_mf) = self.fold(prob)?;
        let exact = VqeConfig {
            backend: Backend::Statevector,
            optimize_on_backend: false,
            ..self.config.clone()
        };
        let theta = optimize_theta(&vp, &exact)?.theta;
        let rdms = rdms_from_vqe(&vp, theta, &exact)?;
        Ok(self.solution(prob, &act, rdms, e_mf))
    }

    fn finalize(&self, prob: &EmbeddingProblem, solution: FragmentSolution) -> Result<FragmentSolution> {
        if self.config.backend == Backend::Statevector {
            return Ok(solution);
        }
        let (act, vp, e_mf) = self.fold(prob)?;
        let theta = optimize_theta(&vp, &self.config)?.theta;
        let rdms = rdms_from_vqe(&vp, theta, &self.config)?;
        Ok(self.solution(prob, &act, rdms, e_mf))
    }
}

/// One row of the mitigation comparison: energies from the same raw shots
/// under each post-processing chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationRecord {
    pub trial: usize,
    pub seed: u64,
    pub theta: f64,
    pub e_statevector: f64,
    pub e_raw: f64,
    pub e_pmsv: f64,
    pub e_pmsv_spam: f64,
    pub e_spam_pmsv: f64,
    pub survival_fraction: f64,
}

impl MitigationRecord {
    pub fn dev_raw(&self) -> f64 {
        (self.e_raw - self.e_statevector).abs()
    }
    pub fn dev_pmsv(&self) -> f64 {
        (self.e_pmsv - self.e_statevector).abs()
    }
    pub fn dev_pmsv_spam(&self) -> f64 {
        (self.e_pmsv_spam - self.e_statevector).abs()
    }
    pub fn dev_spam_pmsv(&self) -> f64 {
        (self.e_spam_pmsv - self.e_statevector).abs()
    }
}

/// Sample the energy groups once at `theta` with `cfg.final_shots` shots per
/// group and post-process the same tables four ways.
pub fn mitigation_trial(problem: &VqeProblem, theta: f64, cfg: &VqeConfig, trial: usize) -> Result<MitigationRecord> {
    let noise = match cfg.noise_model()? {
        Some(n) => Some(n),
        None => Some(NoiseModel::preset(&cfg.noise_preset)?),
    };
    let seed = derive_seed(cfg.seed, &[trial as u64]);
    let spam = spam_calibrate(noise.as_ref(), problem.n_qubits, cfg.spam_shots_per_state, derive_seed(seed, &[TAG_SPAM]))?;
    let circ = problem.circuit(theta)?;
    let tables = problem
        .energy_groups
        .iter()
        .enumerate()
        .map(|(gi, g)| sample_shots(&circ, g, gi, cfg.final_shots, noise.as_ref(), derive_seed(seed, &[TAG_FINAL, gi as u64])))
        .collect::<Result<Vec<_>>>()?;
    let energy = |m: Mitigation| -> Result<(f64, u64, u64)> {
        let mut probs = Vec::with_capacity(tables.len());
        let (mut raw, mut kept) = (0u64, 0u64);
        for (t, g) in tables.iter().zip(&problem.energy_groups) {
            let (d, frac) = mitigate(t, g, m, Some(&spam))?;
            if m.pmsv && !g.symmetries.is_empty() {
                raw += t.total();
                kept += (frac * t.total() as f64).round() as u64;
            }
            probs.push(d.probs);
        }
        let ex = expectations_from_groups(&problem.energy_groups, &probs);
        Ok((problem.energy_from_expectations(&ex)?, raw, kept))
    };
    let (e_raw, _, _) = energy(Mitigation::NONE)?;
    let (e_pmsv, raw, kept) = energy(Mitigation::PMSV)?;
    let (e_pmsv_spam, _, _) = energy(Mitigation::PMSV_SPAM)?;
    let (e_spam_pmsv, _, _) = energy(Mitigation::SPAM_PMSV)?;
    Ok(MitigationRecord {
        trial,
        seed,
        theta,
        e_statevector: problem.statevector_energy(theta)?,
        e_raw,
        e_pmsv,
        e_pmsv_spam,
        e_spam_pmsv,
        survival_fraction: if raw == 0 { 1.0 } else { kept as f64 / raw as f64 },
    })
}

/// `n_trials` independent [`mitigation_trial`]s at the statevector optimum.
pub fn mitigation_comparison(problem: &VqeProblem, cfg: &VqeConfig, n_trials: usize) -> Result<Vec<MitigationRecord>> {
    let exact = VqeConfig {
        backend: Backend::Statevector,
        ..cfg.clone()
    };
    let theta = optimize_theta(problem, &exact)?.theta;
    (0..n_trials)
        .into_par_iter()
        .map(|t| mitigation_trial(problem, theta, cfg, t))
        .collect()
}

pub fn write_mitigation_csv<W: Write>(records: &[MitigationRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "seed",
        "theta",
        "e_statevector",
        "e_raw",
        "e_pmsv",
        "e_pmsv_spam",
        "e_spam_pmsv",
        "dev_raw",
        "dev_pmsv",
        "dev_pmsv_spam",
        "dev_spam_pmsv",
        "survival_fraction",
    ])?;
    for r in records {
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            format!("{:.10}", r.theta),
            format!("{:.10}", r.e_statevector),
            format!("{:.10}", r.e_raw),
            format!("{:.10}", r.e_pmsv),
            format!("{:.10}", r.e_pmsv_spam),
            format!("{:.10}", r.e_spam_pmsv),
            format!("{:.10}", r.dev_raw()),
            format!("{:.10}", r.dev_pmsv()),
            format!("{:.10}", r.dev_pmsv_spam()),
            format!("{:.10}", r.dev_spam_pmsv()),
            format!("{:.6}", r.survival_fraction),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::problem::tests::h2_hamiltonian;
    use super::*;
    use crate::dmet::fci_ground_state;

    #[test]
    fn h2_statevector_equals_fci() {
        let ham = h2_hamiltonian();
        let fci = fci_ground_state(&ham).unwrap();
        let p = VqeProblem::new(ham).unwrap();
        let est = vqe_minimize(&p, &VqeConfig::default()).unwrap();
        assert!((est.mean - fci.energy).abs() < 1e-8);
        assert!(est.mean <= p.reference_energy().unwrap() + 1e-8);
        for kind in [OptimizerKind::GoldenSection, OptimizerKind::Scan] {
            let cfg = VqeConfig { optimizer: kind, ..VqeConfig::default() };
            assert!((vqe_minimize(&p, &cfg).unwrap().mean - fci.energy).abs() < 1e-8);
        }
    }

    #[test]
    fn optimum_is_fixed_point() {
        let p = VqeProblem::new(h2_hamiltonian()).unwrap();
        let a = optimize_theta(&p, &VqeConfig::default()).unwrap();
        let cfg = VqeConfig { initial_theta: a.theta, ..VqeConfig::default() };
        let b = optimize_theta(&p, &cfg).unwrap();
        assert!(wrap_angle(a.theta - b.theta).abs() < 1e-10);
        assert!((a.energy - b.energy).abs() < 1e-12);
    }

    #[test]
    fn shot_estimate_near_exact() {
        let p = VqeProblem::new(h2_hamiltonian()).unwrap();
        let exact = vqe_minimize(&p, &VqeConfig::default()).unwrap();
        let cfg = VqeConfig { backend: Backend::Shots, seed: 3, ..VqeConfig::default() };
        let est = estimate_energy(&p, exact.theta_star, &cfg).unwrap();
        assert_eq!(est.n_blocks, 10);
        assert!(est.std > 0.0);
        assert!((est.mean - exact.mean).abs() < 0.01);
        assert!((est.survival_fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_rdms_close_to_exact() {
        let p = VqeProblem::new(h2_hamiltonian()).unwrap();
        let theta = optimize_theta(&p, &VqeConfig::default()).unwrap().theta;
        let exact = rdms_from_vqe(&p, theta, &VqeConfig::default()).unwrap();
        let cfg = VqeConfig { backend: Backend::Shots, seed: 9, ..VqeConfig::default() };
        let s = rdms_from_vqe(&p, theta, &cfg).unwrap();
        assert!((s.rdm1.clone() - exact.rdm1).abs().max() < 0.02);
        assert!((s.rdm1.trace() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn config_rejects_uneven_blocks() {
        let cfg = VqeConfig { final_shots: 1001, ..VqeConfig::default() };
        assert!(cfg.validate().is_err());
        let bad: Result<VqeConfig, _> = toml::from_str("shots = 3");
        assert!(bad.is_err());
        let ok: VqeConfig = toml::from_str("backend = \"shots+noise\"\npmsv = false").unwrap();
        assert_eq!(ok.backend, Backend::NoisyShots);
        assert!(!ok.pmsv);
    }

    #[test]
    fn diagonal_hamiltonian_has_no_correlation() {
        let mut ham = h2_hamiltonian();
        let n = ham.n_orbitals();
        let mut eri = crate::linalg::Eri::zeros(n);
        for p in 0..n {
            for q in 0..n {
                eri.set(p, p, q, q, ham.eri.get(p, p, q, q));
            }
        }
        ham.eri = eri;
        ham.h = DMatrix::from_diagonal(&ham.h.diagonal());
        let p = VqeProblem::new(ham).unwrap();
        let est = vqe_minimize(&p, &VqeConfig::default()).unwrap();
        assert!(correlation_energy(&est, p.reference_energy().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mitigation_csv_has_header() {
        let p = VqeProblem::new(h2_hamiltonian()).unwrap();
        let cfg = VqeConfig { backend: Backend::NoisyShots, final_shots: 2000, spam_shots_per_state: 500, ..VqeConfig::default() };
        let recs = mitigation_comparison(&p, &cfg, 2).unwrap();
        let mut buf = Vec::new();
        write_mitigation_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("trial,seed,theta,e_statevector,e_raw"));
        assert_eq!(text.lines().count(), 3);
        assert!(recs[0].survival_fraction < 1.0);
    }
}
