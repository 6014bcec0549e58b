//! End-to-end binding energies: for every ligand, a DMET calculation in the
//! protein point-charge shell and one in the solvent environment, their
//! difference, and ranking statistics against experimental potency.

pub mod analysis;
pub mod config;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use analysis::{
    analyze_fixtures, binding_energy, discrimination_stats, rank_and_correlate, ranking_metric,
    Correlation, Discrimination, FixtureAnalysis, Fixtures, LegEnergy, RankingMatrix, WEAK_BINDERS,
};
pub use config::{FragmentSpec, LegSpec, LigandEntry, RunConfig};

use crate::dmet::{
    classical_solver, define_fragments, run_dmet, DmetSystem, FragmentPlan, FragmentSolver, SolverKind,
};
use crate::integrals::{build_basis, load_geometry, load_point_charges, Molecule, PointChargeEnvironment};
use crate::qsim::derive_seed;
use crate::vqe::{VqeProblem, VqeSolver};
use crate::{Error, Result};

/// Differences from a full binding-energy protocol, written into every
/// report.
pub const MODEL_NOTES: [&str; 3] = [
    "ligand geometry is identical in both legs (no solvent-leg re-optimization)",
    "the solvent leg uses the configured environment only; no continuum solvation",
    "point-charge self-interaction is left out of the nuclear constant (cancels in relative rankings)",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentReport {
    pub solver: String,
    pub atoms: Vec<usize>,
    pub e_frag: f64,
    pub n_elec: f64,
    pub e_corr: f64,
    pub energy_std: f64,
    pub survival_fraction: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegResult {
    pub environment: String,
    pub method: String,
    pub energy: f64,
    pub e_hf: f64,
    pub mu: f64,
    pub electron_residual: f64,
    /// Correlation energy of the correlated fragments' embedding problems.
    pub e_corr: f64,
    /// Combined block standard deviation of the sampled fragments.
    pub energy_std: f64,
    pub fragments: Vec<FragmentReport>,
}

impl LegResult {
    pub fn leg_energy(&self) -> LegEnergy {
        LegEnergy {
            energy: self.energy,
            method: self.method.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LigandReport {
    pub id: String,
    pub charge: i32,
    pub pic50: Option<f64>,
    pub n_atoms: usize,
    pub protein: Option<LegResult>,
    pub solvent: Option<LegResult>,
    pub e_bind: Option<f64>,
    pub error: Option<String>,
}

impl LigandReport {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BindingReport {
    pub name: String,
    pub method: String,
    pub seed: u64,
    pub notes: Vec<String>,
    pub ligands: Vec<LigandReport>,
    pub ranking: Option<RankingMatrix>,
    /// Ligand ids, strongest binder first.
    pub ordering: Vec<String>,
    pub correlation: Option<Correlation>,
    pub discrimination: Option<Discrimination>,
}

impl BindingReport {
    pub fn n_failed(&self) -> usize {
        self.ligands.iter().filter(|l| l.failed()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn load_environment(cfg: &RunConfig, leg: &LegSpec) -> Result<PointChargeEnvironment> {
    if leg.is_vacuum() {
        return Ok(PointChargeEnvironment::vacuum());
    }
    load_point_charges(&std::fs::read_to_string(cfg.resolve(Path::new(&leg.environment)))?)
}

fn build_plan(cfg: &RunConfig, mol: &Molecule) -> Result<FragmentPlan> {
    let basis = build_basis(mol, &cfg.basis)?;
    let parts = cfg.atom_partition(mol.atoms.len())?;
    let kinds: Vec<SolverKind> = cfg.fragments.iter().map(|f| f.solver).collect();
    let mut plan = define_fragments(mol, &basis, &parts, &kinds)?;
    for (i, f) in cfg.fragments.iter().enumerate() {
        if let Some(a) = f.active_space {
            plan = plan.with_active_space(i, a)?;
        }
    }
    Ok(plan)
}

/// Solvers for each fragment; VQE fragments get a seed derived from
/// `seed_path`.
fn build_solvers(cfg: &RunConfig, plan: &FragmentPlan, seed_path: &[u64]) -> Vec<Box<dyn FragmentSolver>> {
    plan.fragments
        .iter()
        .enumerate()
        .map(|(i, f)| {
            classical_solver(f).unwrap_or_else(|| {
                let mut path = seed_path.to_vec();
                path.push(i as u64);
                let mut v = VqeSolver::new(crate::vqe::VqeConfig {
                    seed: derive_seed(cfg.seed, &path),
                    ..cfg.vqe.clone()
                });
                if let Some(a) = f.active_space {
                    v.active_space = a;
                }
                Box::new(v) as Box<dyn FragmentSolver>
            })
        })
        .collect()
}

/// Full DMET energy of `mol` in `env`.
pub fn run_leg(
    cfg: &RunConfig,
    mol: &Molecule,
    env: &PointChargeEnvironment,
    env_label: &str,
    seed_path: &[u64],
) -> Result<LegResult> {
    let plan = build_plan(cfg, mol)?;
    let basis = build_basis(mol, &cfg.basis)?;
    let solvers = build_solvers(cfg, &plan, seed_path);
    let refs: Vec<&dyn FragmentSolver> = solvers.iter().map(|s| s.as_ref()).collect();
    let sys = DmetSystem::new(mol, &basis, env, plan.clone())?;
    let res = run_dmet(&sys, &refs, &cfg.mu)?;
    let mut e_corr = 0.0;
    let mut var = 0.0;
    let fragments = res
        .fragments
        .iter()
        .zip(&plan.fragments)
        .zip(&solvers)
        .map(|((s, f), solver)| {
            let d = s.diagnostics.clone().unwrap_or_default();
            if f.solver.is_correlated() {
                e_corr += s.e_corr();
            }
            var += d.energy_std * d.energy_std;
            FragmentReport {
                solver: solver.name(),
                atoms: f.atoms.clone(),
                e_frag: s.e_frag,
                n_elec: s.n_frag_elec,
                e_corr: s.e_corr(),
                energy_std: d.energy_std,
                survival_fraction: d.survival_fraction,
                theta: d.parameters.first().copied(),
            }
        })
        .collect();
    Ok(LegResult {
        environment: env_label.to_string(),
        method: cfg.method_fingerprint(),
        energy: res.energy,
        e_hf: sys.e_hf(),
        mu: res.mu,
        electron_residual: res.residual,
        e_corr,
        energy_std: var.sqrt(),
        fragments,
    })
}

/// Which energy leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Protein,
    Solvent,
}

/// The folded VQE problems of one ligand and leg at the converged chemical
/// potential (statevector solvers), in fragment order.
pub fn vqe_fragment_problems(cfg: &RunConfig, ligand: &str, leg: Leg) -> Result<Vec<VqeProblem>> {
    let lig = cfg
        .ligands
        .iter()
        .find(|l| l.id == ligand)
        .ok_or_else(|| Error::Config(format!("unknown ligand `{ligand}`")))?;
    let mol = load_geometry(&std::fs::read_to_string(cfg.resolve(&lig.xyz))?, lig.charge)?;
    let spec = match leg {
        Leg::Protein => &cfg.protein,
        Leg::Solvent => &cfg.solvent,
    };
    let env = load_environment(cfg, spec)?;
    let exact = RunConfig {
        vqe: crate::vqe::VqeConfig {
            backend: crate::vqe::Backend::Statevector,
            ..cfg.vqe.clone()
        },
        ..cfg.clone()
    };
    let plan = build_plan(&exact, &mol)?;
    let basis = build_basis(&mol, &exact.basis)?;
    let solvers = build_solvers(&exact, &plan, &[]);
    let refs: Vec<&dyn FragmentSolver> = solvers.iter().map(|s| s.as_ref()).collect();
    let sys = DmetSystem::new(&mol, &basis, &env, plan.clone())?;
    let res = run_dmet(&sys, &refs, &exact.mu)?;
    let mut out = Vec::new();
    for (i, f) in plan.fragments.iter().enumerate() {
        if f.solver == SolverKind::Vqe {
            let mut v = VqeSolver::new(exact.vqe.clone());
            if let Some(a) = f.active_space {
                v.active_space = a;
            }
            out.push(v.fold(&sys.problems[i].with_mu(res.mu))?.1);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no VQE fragment in the plan".into()));
    }
    Ok(out)
}

fn run_ligand(cfg: &RunConfig, index: usize, lig: &LigandEntry) -> LigandReport {
    let mut rep = LigandReport {
        id: lig.id.clone(),
        charge: lig.charge,
        pic50: lig.pic50,
        n_atoms: 0,
        protein: None,
        solvent: None,
        e_bind: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let text = std::fs::read_to_string(cfg.resolve(&lig.xyz))?;
        let mol = load_geometry(&text, lig.charge)?;
        rep.n_atoms = mol.atoms.len();
        let legs = [(&cfg.protein, 0u64), (&cfg.solvent, 1u64)];
        let out: Vec<LegResult> = legs
            .par_iter()
            .map(|(leg, tag)| {
                let env = load_environment(cfg, leg)?;
                run_leg(cfg, &mol, &env, &leg.environment, &[index as u64, *tag])
            })
            .collect::<Result<_>>()?;
        let [p, s]: [LegResult; 2] = out.try_into().expect("two legs");
        rep.e_bind = Some(binding_energy(&p.leg_energy(), &s.leg_energy())?);
        rep.protein = Some(p);
        rep.solvent = Some(s);
        Ok(())
    })();
    if let Err(e) = result {
        log::error!("ligand {}: {e}", lig.id);
        rep.error = Some(e.to_string());
    }
    rep
}

/// Run every ligand (in parallel) and aggregate. Failed ligands are kept in
/// the report with their error; statistics use the successful ones.
pub fn run_workflow(cfg: &RunConfig) -> Result<BindingReport> {
    cfg.validate()?;
    let ligands: Vec<LigandReport> = cfg
        .ligands
        .par_iter()
        .enumerate()
        .map(|(i, l)| run_ligand(cfg, i, l))
        .collect();
    let mut report = BindingReport {
        name: cfg.name.clone(),
        method: cfg.method_fingerprint(),
        seed: cfg.seed,
        notes: MODEL_NOTES.iter().map(|s| s.to_string()).collect(),
        ligands,
        ranking: None,
        ordering: Vec::new(),
        correlation: None,
        discrimination: None,
    };
    aggregate(&mut report, cfg.reference.as_deref(), &cfg.weak_binders)?;
    Ok(report)
}

/// Fill in ranking, correlation and discrimination from the per-ligand
/// binding energies.
pub fn aggregate(report: &mut BindingReport, reference: Option<&str>, weak: &[String]) -> Result<()> {
    let ok: Vec<&LigandReport> = report.ligands.iter().filter(|l| l.e_bind.is_some()).collect();
    let mut order: Vec<&LigandReport> = ok.clone();
    order.sort_by(|a, b| a.e_bind.unwrap().total_cmp(&b.e_bind.unwrap()));
    report.ordering = order.iter().map(|l| l.id.clone()).collect();
    report.ranking = match reference {
        Some(r) if ok.iter().any(|l| l.id == r) => {
            let e: Vec<(String, Option<f64>)> = ok.iter().map(|l| (l.id.clone(), l.e_bind)).collect();
            Some(ranking_metric(&e, r)?)
        }
        Some(r) => {
            log::warn!("reference ligand {r} failed; no ranking matrix");
            None
        }
        None => None,
    };
    let with_p: Vec<&&LigandReport> = ok.iter().filter(|l| l.pic50.is_some()).collect();
    report.correlation = if with_p.len() >= 3 {
        let e: Vec<f64> = with_p.iter().map(|l| l.e_bind.unwrap()).collect();
        let p: Vec<f64> = with_p.iter().map(|l| l.pic50.unwrap()).collect();
        rank_and_correlate(&e, &p).ok()
    } else {
        None
    };
    report.discrimination = if weak.is_empty() {
        None
    } else {
        let e: Vec<f64> = ok.iter().map(|l| l.e_bind.unwrap()).collect();
        let w: Vec<usize> = (0..ok.len()).filter(|&i| weak.contains(&ok[i].id)).collect();
        let s: Vec<usize> = (0..ok.len()).filter(|&i| !weak.contains(&ok[i].id)).collect();
        discrimination_stats(&e, &w, &s).ok()
    };
    Ok(())
}

/// Plain-text overview of a report.
pub fn summary_text(r: &BindingReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "run: {}", r.name);
    let _ = writeln!(s, "method: {}", r.method);
    let _ = writeln!(s, "seed: {}", r.seed);
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<10} {:>16} {:>16} {:>12} {:>11} {:>11}",
        "ligand", "E_protein", "E_solvent", "E_bind", "Ecorr_p", "Ecorr_s"
    );
    for l in &r.ligands {
        match (&l.protein, &l.solvent, l.e_bind) {
            (Some(p), Some(q), Some(e)) => {
                let _ = writeln!(
                    s,
                    "{:<10} {:>16.8} {:>16.8} {:>12.6} {:>11.6} {:>11.6}",
                    l.id, p.energy, q.energy, e, p.e_corr, q.e_corr
                );
                if p.e_corr > 0.0 || q.e_corr > 0.0 {
                    let _ = writeln!(s, "{:<10} warning: positive correlation energy", "");
                }
            }
            _ => {
                let _ = writeln!(s, "{:<10} FAILED: {}", l.id, l.error.as_deref().unwrap_or("unknown"));
            }
        }
    }
    if !r.ordering.is_empty() {
        let _ = writeln!(s, "\nranking (strongest first): {}", r.ordering.join(" > "));
    }
    if let Some(c) = &r.correlation {
        let _ = writeln!(
            s,
            "R^2 vs pIC50: {:.4} (n = {}, slope {:.6}, intercept {:.6})",
            c.r_squared, c.n, c.slope, c.intercept
        );
    }
    if let Some(d) = &r.discrimination {
        let _ = writeln!(
            s,
            "weak mean {:.6}, strong mean {:.6}, shift {:.6}, misordered pairs {:.3}",
            d.weak_mean, d.strong_mean, d.shift, d.misordered_fraction
        );
    }
    s
}

/// `report.json`, `ligands.csv`, `fragments.csv`, `scatter.csv`,
/// `ranking.csv` (when available) and `summary.txt`.
pub fn write_report(r: &BindingReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), r.to_json()?)?;
    std::fs::write(dir.join("summary.txt"), summary_text(r))?;

    let mut w = csv::Writer::from_path(dir.join("ligands.csv"))?;
    w.write_record([
        "ligand", "status", "e_protein", "e_solvent", "e_bind", "e_hf_protein", "e_hf_solvent",
        "e_corr_protein", "e_corr_solvent", "std_protein", "std_solvent", "mu_protein", "mu_solvent",
    ])?;
    let f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.10}"));
    for l in &r.ligands {
        let p = l.protein.as_ref();
        let q = l.solvent.as_ref();
        w.write_record([
            l.id.clone(),
            if l.failed() { "failed".into() } else { "ok".into() },
            f(p.map(|x| x.energy)),
            f(q.map(|x| x.energy)),
            f(l.e_bind),
            f(p.map(|x| x.e_hf)),
            f(q.map(|x| x.e_hf)),
            f(p.map(|x| x.e_corr)),
            f(q.map(|x| x.e_corr)),
            f(p.map(|x| x.energy_std)),
            f(q.map(|x| x.energy_std)),
            f(p.map(|x| x.mu)),
            f(q.map(|x| x.mu)),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("fragments.csv"))?;
    w.write_record([
        "ligand", "leg", "fragment", "solver", "e_frag", "n_elec", "e_corr", "energy_std", "survival_fraction", "theta",
    ])?;
    for l in &r.ligands {
        for (leg, res) in [("protein", &l.protein), ("solvent", &l.solvent)] {
            let Some(res) = res else { continue };
            for (i, fr) in res.fragments.iter().enumerate() {
                w.write_record([
                    l.id.clone(),
                    leg.to_string(),
                    i.to_string(),
                    fr.solver.clone(),
                    format!("{:.10}", fr.e_frag),
                    format!("{:.8}", fr.n_elec),
                    format!("{:.10}", fr.e_corr),
                    format!("{:.10}", fr.energy_std),
                    f(fr.survival_fraction),
                    f(fr.theta),
                ])?;
            }
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("scatter.csv"))?;
    w.write_record(["ligand", "pic50", "e_bind", "e_bind_std"])?;
    for l in &r.ligands {
        if let Some(e) = l.e_bind {
            let std = l
                .protein
                .iter()
                .chain(&l.solvent)
                .map(|x| x.energy_std * x.energy_std)
                .sum::<f64>()
                .sqrt();
            w.write_record([l.id.clone(), f(l.pic50), format!("{e:.10}"), format!("{std:.10}")])?;
        }
    }
    w.flush()?;

    if let Some(m) = &r.ranking {
        let mut w = csv::Writer::from_path(dir.join("ranking.csv"))?;
        let mut head = vec![format!("m[i][j] (reference {})", m.reference)];
        head.extend(m.ids.iter().cloned());
        w.write_record(&head)?;
        for (id, row) in m.ids.iter().zip(&m.m) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| format!("{v:.10}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    Ok(())
}

/// Statistics over an existing report or a fixture directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub source: String,
    pub ordering: Vec<String>,
    pub correlation: Option<Correlation>,
    pub discrimination: Option<Discrimination>,
}

pub fn analyze_report(r: &BindingReport, weak: &[String]) -> Result<AnalysisSummary> {
    let mut copy = r.clone();
    aggregate(&mut copy, None, weak)?;
    if copy.ordering.is_empty() {
        return Err(Error::Analysis("report has no successful ligands".into()));
    }
    Ok(AnalysisSummary {
        source: r.name.clone(),
        ordering: copy.ordering,
        correlation: copy.correlation,
        discrimination: copy.discrimination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn toy_dir() -> tempfile::TempDir {
        let d = tempfile::tempdir().unwrap();
        std::fs::write(d.path().join("h2.xyz"), "2\n\nH 0 0 0\nH 0 0 0.74\n").unwrap();
        std::fs::write(d.path().join("h2b.xyz"), "2\n\nH 0 0 0\nH 0 0 0.80\n").unwrap();
        std::fs::write(d.path().join("h4.xyz"), "4\n\nH 0 0 0\nH 0 0 0.9\nH 0 0 1.8\nH 0 0 2.7\n").unwrap();
        d
    }

    fn toy_config(dir: &Path, extra: &str) -> RunConfig {
        let text = format!(
            r#"
name = "toy"
reference = "a"
{extra}
[[ligands]]
id = "a"
xyz = "h2.xyz"
[[ligands]]
id = "b"
xyz = "h2b.xyz"
[protein]
environment = "vacuum"
[solvent]
environment = "vacuum"
[[fragments]]
solver = "vqe"
"#
        );
        RunConfig::from_toml(&text, dir).unwrap()
    }

    #[test]
    fn identical_legs_bind_zero() {
        let d = toy_dir();
        let r = run_workflow(&toy_config(d.path(), "")).unwrap();
        assert_eq!(r.n_failed(), 0);
        for l in &r.ligands {
            assert_eq!(l.e_bind, Some(0.0));
            let p = l.protein.as_ref().unwrap();
            assert!(p.e_corr < 0.0);
        }
        let m = r.ranking.as_ref().unwrap();
        assert_eq!(m.m[0][1], 0.0);
    }

    #[test]
    fn failed_ligand_is_reported() {
        let d = toy_dir();
        let mut cfg = toy_config(d.path(), "");
        cfg.ligands[1].xyz = PathBuf::from("missing.xyz");
        let r = run_workflow(&cfg).unwrap();
        assert_eq!(r.n_failed(), 1);
        assert!(r.ligands[1].error.is_some());
        assert!(r.ligands[0].e_bind.is_some());
        let out = d.path().join("out");
        write_report(&r, &out).unwrap();
        let s = std::fs::read_to_string(out.join("summary.txt")).unwrap();
        assert!(s.contains("FAILED"));
    }

    #[test]
    fn report_round_trip() {
        let d = toy_dir();
        let r = run_workflow(&toy_config(d.path(), "")).unwrap();
        let back = BindingReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn multi_fragment_leg() {
        let d = toy_dir();
        let text = r#"
name = "h4"
[[ligands]]
id = "h4"
xyz = "h4.xyz"
[protein]
environment = "vacuum"
[solvent]
environment = "vacuum"
[[fragments]]
atoms = [0, 1]
solver = "vqe"
[[fragments]]
solver = "mean-field"
"#;
        let cfg = RunConfig::from_toml(text, d.path()).unwrap();
        let r = run_workflow(&cfg).unwrap();
        let p = r.ligands[0].protein.as_ref().unwrap();
        assert!(p.electron_residual.abs() < 1e-5);
        assert!(p.energy < p.e_hf);
        assert_eq!(r.ligands[0].e_bind, Some(0.0));
    }
}
