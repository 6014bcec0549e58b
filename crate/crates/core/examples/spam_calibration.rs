//! Readout calibration under the default noise preset, then correction of a
//! noisy |0011> histogram.

use qembed::qsim::{build_yxxx_ansatz, format_bitstring, sample_circuit, Distribution, NoiseModel, ShotTable};
use qembed::vqe::{spam_calibrate, spam_correct};

fn main() -> qembed::Result<()> {
    let noise = NoiseModel::preset("nisq-2021")?;
    let profile = spam_calibrate(Some(&noise), 4, 20_000, 11)?;
    println!("transfer matrix condition number {:.4}", profile.condition_number);
    println!("diagonal: {:?}", (0..16).map(|i| format!("{:.3}", profile.matrix[(i, i)])).collect::<Vec<_>>());

    let circ = build_yxxx_ansatz(0.0, 4, 0b0011)?;
    let table = ShotTable::from_counts(4, sample_circuit(&circ, 50_000, Some(&noise), 12)?);
    let raw = Distribution::from_table(&table)?;
    let fixed = spam_correct(&raw, &profile)?;
    println!("bitstring  raw      corrected");
    for b in 0..16 {
        if raw.probs[b] > 0.002 || fixed.probs[b] > 0.002 {
            println!("{}     {:.4}   {:.4}", format_bitstring(b as u64, 4), raw.probs[b], fixed.probs[b]);
        }
    }
    Ok(())
}
