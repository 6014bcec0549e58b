//! Full pipeline on the bundled mini-oxazine series; writes the report to a
//! temporary directory.

use std::path::Path;

use qembed::workflow::{run_workflow, summary_text, write_report, RunConfig};

fn main() -> qembed::Result<()> {
    let cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_oxazine/run.toml"))?;
    let report = run_workflow(&cfg)?;
    print!("{}", summary_text(&report));
    let out = std::env::temp_dir().join("qembed-mini-oxazine");
    write_report(&report, &out)?;
    println!("files in {}", out.display());
    Ok(())
}
