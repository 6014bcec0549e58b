use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qembed::oracle::run_cross_checks;
use qembed::vqe::{mitigation_comparison, write_mitigation_csv};
use qembed::workflow::{
    analyze_fixtures, analyze_report, run_workflow, summary_text, vqe_fragment_problems, write_report,
    BindingReport, Fixtures, Leg, RunConfig, WEAK_BINDERS,
};
use qembed::Result;

#[derive(Parser)]
#[command(name = "qembed", version, about = "DMET + VQE binding-energy workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LegArg {
    Protein,
    Solvent,
}

#[derive(Subcommand)]
enum Command {
    /// Run every ligand of a config and write the report.
    Run {
        config: PathBuf,
        /// Overrides the output directory of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ranking and correlation statistics of a report or fixture set.
    Analyze {
        /// report.json written by `run`.
        #[arg(long, conflicts_with = "fixtures")]
        report: Option<PathBuf>,
        /// Directory with pic50.csv, correlation_energies.csv and
        /// binding_energies.csv. Without either flag the built-in
        /// fixtures are used.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Weak-binder ids.
        #[arg(long, num_args = 1..)]
        weak: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Raw vs mitigated energies over repeated noisy trials of one VQE fragment.
    MitigationReport {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        ligand: String,
        #[arg(long, value_enum, default_value = "protein")]
        leg: LegArg,
        #[arg(long, default_value_t = 0)]
        fragment: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// CSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the library against brute-force references.
    Oracle,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let report = run_workflow(&cfg)?;
            let dir = out.unwrap_or_else(|| cfg.output_dir());
            write_report(&report, &dir)?;
            print!("{}", summary_text(&report));
            println!("report written to {}", dir.display());
            if report.n_failed() > 0 {
                eprintln!("{} ligand(s) failed", report.n_failed());
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Analyze {
            report,
            fixtures,
            weak,
            json,
        } => {
            if let Some(path) = report {
                let r = BindingReport::from_json(&std::fs::read_to_string(path)?)?;
                let s = analyze_report(&r, &weak)?;
                if json {
                    println!("{}", serde_json::to_string_pretty(&s)?);
                } else {
                    println!("ordering (strongest first): {}", s.ordering.join(" "));
                    match &s.correlation {
                        Some(c) => println!("R^2 = {:.4} over {} ligands, slope {:.4}", c.r_squared, c.n, c.slope),
                        None => println!("R^2 unavailable (fewer than 3 ligands with potency)"),
                    }
                    if let Some(d) = &s.discrimination {
                        println!(
                            "weak - strong shift = {:.6} Ha, misordered pairs {:.3}",
                            d.shift, d.misordered_fraction
                        );
                    }
                }
            } else {
                let f = match fixtures {
                    Some(dir) => Fixtures::from_dir(&dir)?,
                    None => Fixtures::builtin(),
                };
                let weak: Vec<&str> = if weak.is_empty() {
                    WEAK_BINDERS.to_vec()
                } else {
                    weak.iter().map(String::as_str).collect()
                };
                let a = analyze_fixtures(&f, &weak)?;
                if json {
                    println!("{}", serde_json::to_string_pretty(&a)?);
                } else {
                    println!("ligands: {}", f.ligands.len());
                    println!("R^2 statevector   = {:.6}", a.statevector.r_squared);
                    println!("R^2 transmon      = {:.6}", a.transmon.r_squared);
                    println!(
                        "R^2 trapped-ion   = {:.6} ({} ligands)",
                        a.trapped_ion.r_squared,
                        a.trapped_ion_ligands.len()
                    );
                    println!("weak binders: {}", a.weak.join(" "));
                    println!("shift statevector = {:.6} Ha", a.discrimination_statevector.shift);
                    println!("shift transmon    = {:.6} Ha", a.discrimination_transmon.shift);
                }
            }
        }
        Command::MitigationReport {
            config,
            ligand,
            leg,
            fragment,
            trials,
            out,
        } => {
            let cfg = RunConfig::load(&config)?;
            let leg = match leg {
                LegArg::Protein => Leg::Protein,
                LegArg::Solvent => Leg::Solvent,
            };
            let problems = vqe_fragment_problems(&cfg, &ligand, leg)?;
            let problem = problems.get(fragment).ok_or_else(|| {
                qembed::Error::InvalidArgument(format!("ligand has {} VQE fragment(s)", problems.len()))
            })?;
            let records = mitigation_comparison(problem, &cfg.vqe, trials)?;
            match out {
                Some(path) => write_mitigation_csv(&records, std::fs::File::create(path)?)?,
                None => write_mitigation_csv(&records, std::io::stdout().lock())?,
            }
            let n = records.len() as f64;
            let mean = |f: fn(&qembed::vqe::MitigationRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
            eprintln!(
                "mean |dev| raw {:.5}  pmsv {:.5}  pmsv+spam {:.5}  spam+pmsv {:.5}  survival {:.4}",
                mean(|r| r.dev_raw()),
                mean(|r| r.dev_pmsv()),
                mean(|r| r.dev_pmsv_spam()),
                mean(|r| r.dev_spam_pmsv()),
                mean(|r| r.survival_fraction)
            );
        }
        Command::Oracle => {
            let checks = run_cross_checks()?;
            let mut failed = 0;
            for c in &checks {
                let tag = if c.passed() { "ok  " } else { "FAIL" };
                failed += usize::from(!c.passed());
                println!(
                    "{tag} {:<44} ref {:>18.12} got {:>18.12} dev {:.2e} (tol {:.0e})",
                    c.name,
                    c.reference,
                    c.value,
                    c.deviation(),
                    c.tolerance
                );
            }
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
