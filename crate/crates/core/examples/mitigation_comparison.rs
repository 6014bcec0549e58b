//! Raw vs PMSV vs PMSV+SPAM energies of the mini-oxazine VQE fragment under
//! the default noise preset.

use std::path::Path;

use qembed::vqe::{mitigation_comparison, Backend, VqeConfig};
use qembed::workflow::{vqe_fragment_problems, Leg, RunConfig};

fn main() -> qembed::Result<()> {
    let cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_oxazine/run.toml"))?;
    let problem = vqe_fragment_problems(&cfg, "mox-h", Leg::Protein)?.remove(0);
    let vqe = VqeConfig {
        backend: Backend::NoisyShots,
        seed: 5,
        ..cfg.vqe.clone()
    };
    let recs = mitigation_comparison(&problem, &vqe, 20)?;
    println!("trial  raw        pmsv       pmsv+spam  (deviation from statevector, Ha)");
    for r in &recs {
        println!("{:>5}  {:+.6}  {:+.6}  {:+.6}", r.trial, r.e_raw - r.e_statevector, r.e_pmsv - r.e_statevector, r.e_pmsv_spam - r.e_statevector);
    }
    let n = recs.len() as f64;
    println!(
        "mean |dev|: raw {:.5}  pmsv {:.5}  pmsv+spam {:.5}",
        recs.iter().map(|r| r.dev_raw()).sum::<f64>() / n,
        recs.iter().map(|r| r.dev_pmsv()).sum::<f64>() / n,
        recs.iter().map(|r| r.dev_pmsv_spam()).sum::<f64>() / n
    );
    Ok(())
}
