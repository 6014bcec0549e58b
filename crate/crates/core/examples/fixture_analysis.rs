//! Ranking statistics over the bundled reference binding energies.

use qembed::workflow::{analyze_fixtures, ranking_metric, Fixtures, WEAK_BINDERS};

fn main() -> qembed::Result<()> {
    let f = Fixtures::builtin();
    let a = analyze_fixtures(&f, &WEAK_BINDERS)?;
    println!("R^2 statevector {:.4}, transmon {:.4}, trapped ion {:.4} ({} ligands)",
        a.statevector.r_squared, a.transmon.r_squared, a.trapped_ion.r_squared, a.trapped_ion_ligands.len());
    println!("ordering (strongest first): {}", a.statevector.ordering.iter().map(|&i| f.ligands[i].as_str()).collect::<Vec<_>>().join(" "));
    let d = &a.discrimination_statevector;
    println!("weak {:.4} +- {:.4}, strong {:.4} +- {:.4}, shift {:.4} Ha", d.weak_mean, d.weak_std, d.strong_mean, d.strong_std, d.shift);

    let series: Vec<(String, Option<f64>)> = f.ligands.iter().cloned().zip(f.e_bind_statevector.iter().map(|&e| Some(e))).collect();
    let m = ranking_metric(&series, "1b")?;
    for (id, v) in m.relative_to_reference() {
        println!("m({id}, 1b) = {v:+.4}");
    }
    Ok(())
}
