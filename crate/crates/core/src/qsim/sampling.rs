use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};

use super::circuit::{format_bitstring, parse_bitstring, Circuit, Gate};
use super::noise::NoiseModel;
use super::statevector::{apply_gate, apply_pauli, check_circuit, probabilities, simulate_statevector, zero_state};
use crate::qubitmap::{MeasurementGroup, Pauli};
use crate::{Error, Result};

/// Independent stream seed from a master seed and a path of counters.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    path.iter().fold(mix(master), |acc, &c| mix(acc ^ mix(c)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Measured counts for one measurement group. Bitstring keys use bit `q`
/// for qubit `q`; text output lists qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotTable {
    pub group_id: usize,
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub n_shots_requested: u64,
    pub n_shots_recorded: u64,
    pub seed: u64,
    pub noise: String,
    pub mitigation: Vec<String>,
}

impl ShotTable {
    pub fn from_counts(n_qubits: usize, counts: BTreeMap<u64, u64>) -> Self {
        let total = counts.values().sum();
        Self {
            group_id: 0,
            n_qubits,
            counts,
            n_shots_requested: total,
            n_shots_recorded: total,
            seed: 0,
            noise: "none".into(),
            mitigation: Vec::new(),
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Dense outcome frequencies.
    pub fn frequencies(&self) -> Result<Vec<f64>> {
        let total = self.total();
        if total == 0 {
            return Err(Error::Starvation(format!(
                "shot table for group {} holds no shots",
                self.group_id
            )));
        }
        let mut f = vec![0.0; 1 << self.n_qubits];
        for (&b, &c) in &self.counts {
            f[b as usize] = c as f64 / total as f64;
        }
        Ok(f)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# group: {}\n", self.group_id));
        s.push_str(&format!("# qubits: {}\n", self.n_qubits));
        s.push_str(&format!("# requested: {}\n", self.n_shots_requested));
        s.push_str(&format!("# recorded: {}\n", self.n_shots_recorded));
        s.push_str(&format!("# seed: {}\n", self.seed));
        s.push_str(&format!("# noise: {}\n", self.noise));
        s.push_str(&format!("# mitigation: {}\n", self.mitigation.join(",")));
        for (&b, &c) in &self.counts {
            s.push_str(&format!("{} {}\n", format_bitstring(b, self.n_qubits), c));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut t = ShotTable::from_counts(0, BTreeMap::new());
        let mut recorded = None;
        let mut requested = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let (k, v) = h.split_once(':').ok_or_else(|| perr(format!("bad header `{line}`")))?;
                let v = v.trim();
                let num = |v: &str| v.parse::<u64>().map_err(|e| perr(format!("{k}: {e}")));
                match k.trim() {
                    "group" => t.group_id = num(v)? as usize,
                    "qubits" => t.n_qubits = num(v)? as usize,
                    "requested" => requested = Some(num(v)?),
                    "recorded" => recorded = Some(num(v)?),
                    "seed" => t.seed = num(v)?,
                    "noise" => t.noise = v.to_string(),
                    "mitigation" => {
                        t.mitigation = v.split(',').filter(|s| !s.is_empty()).map(String::from).collect()
                    }
                    _ => {}
                }
                continue;
            }
            let (bits, count) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| perr(format!("expected `bitstring count`, got `{line}`")))?;
            if bits.len() != t.n_qubits {
                return Err(perr(format!("bitstring `{bits}` does not have {} qubits", t.n_qubits)));
            }
            let b = parse_bitstring(bits).map_err(|e| perr(e.to_string()))?;
            let c: u64 = count.trim().parse().map_err(|e| perr(format!("bad count: {e}")))?;
            *t.counts.entry(b).or_default() += c;
        }
        let total = t.total();
        t.n_shots_recorded = recorded.unwrap_or(total);
        t.n_shots_requested = requested.unwrap_or(total);
        if t.n_shots_recorded != total || t.n_shots_recorded > t.n_shots_requested {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "counts sum to {total}, header says recorded {} of {} requested",
                    t.n_shots_recorded, t.n_shots_requested
                ),
            });
        }
        Ok(t)
    }
}

/// Multinomial draw as a chain of conditional binomials.
pub fn sample_multinomial(probs: &[f64], n: u64, rng: &mut impl Rng) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    let mut remaining = n;
    let mut mass: f64 = probs.iter().sum();
    for (b, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let frac = if mass <= p { 1.0 } else { (p / mass).clamp(0.0, 1.0) };
        let k = if frac >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, frac).expect("valid binomial").sample(rng)
        };
        if k > 0 {
            out.insert(b as u64, k);
        }
        remaining -= k;
        mass -= p;
    }
    out
}

fn gate_error_probability(g: &Gate, noise: &NoiseModel) -> f64 {
    if g.is_two_qubit() {
        noise.depol_2q
    } else {
        noise.depol_1q
    }
}

fn insert_error(state: &mut [num_complex::Complex64], g: &Gate, rng: &mut impl Rng) {
    const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    match g.qubits() {
        (q, None) => apply_pauli(state, q, PAULIS[rng.random_range(1..4)]),
        (a, Some(b)) => {
            let k = rng.random_range(1..16);
            apply_pauli(state, a, PAULIS[k % 4]);
            apply_pauli(state, b, PAULIS[k / 4]);
        }
    }
}

fn sample_index(probs: &[f64], rng: &mut impl Rng) -> u64 {
    let u: f64 = rng.random::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    for (b, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return b as u64;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64
}

/// Counts from measuring every qubit of `circ` in Z.
///
/// Gate noise uses stochastic trajectories: the number of error-free shots
/// is drawn first and sampled from the exact distribution; each remaining
/// shot gets its own error pattern (at least one error) and trajectory.
pub fn sample_circuit(
    circ: &Circuit,
    n_shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<BTreeMap<u64, u64>> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be positive".into()));
    }
    check_circuit(circ)?;
    let mut rng = rng_from_seed(seed);
    let ideal = probabilities(&simulate_statevector(circ)?);
    let Some(noise) = noise.filter(|n| !n.is_noiseless()) else {
        return Ok(sample_multinomial(&ideal, n_shots, &mut rng));
    };
    noise.validate()?;
    let n = circ.n_qubits;
    let p_err: Vec<f64> = circ.gates.iter().map(|g| gate_error_probability(g, noise)).collect();
    let p_clean: f64 = p_err.iter().map(|p| 1.0 - p).product();
    let n_clean = if p_clean >= 1.0 {
        n_shots
    } else {
        Binomial::new(n_shots, p_clean).expect("valid binomial").sample(&mut rng)
    };
    let mut counts = sample_multinomial(&noise.apply_readout(&ideal, n), n_clean, &mut rng);

    // distribution of the first erroneous gate, given at least one error
    let mut first = Vec::with_capacity(p_err.len());
    let mut survive = 1.0;
    for &p in &p_err {
        first.push(survive * p);
        survive *= 1.0 - p;
    }
    for _ in n_clean..n_shots {
        let g0 = sample_index(&first, &mut rng) as usize;
        let mut state = zero_state(n);
        for (i, g) in circ.gates.iter().enumerate() {
            apply_gate(&mut state, g);
            if i == g0 || (i > g0 && rng.random::<f64>() < p_err[i]) {
                insert_error(&mut state, g, &mut rng);
            }
        }
        let mut b = sample_index(&probabilities(&state), &mut rng);
        for q in 0..n {
            let (p10, p01) = noise.readout(q);
            let flip = if b >> q & 1 == 0 { p10 } else { p01 };
            if flip > 0.0 && rng.random::<f64>() < flip {
                b ^= 1 << q;
            }
        }
        *counts.entry(b).or_default() += 1;
    }
    Ok(counts)
}

/// Measure `circ` in the product basis of `group`.
pub fn sample_shots(
    circ: &Circuit,
    group: &MeasurementGroup,
    group_id: usize,
    n_shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<ShotTable> {
    let measured = circ.with_measurement_basis(&group.basis)?;
    let counts = sample_circuit(&measured, n_shots, noise, seed)?;
    Ok(ShotTable {
        group_id,
        n_qubits: circ.n_qubits,
        n_shots_requested: n_shots,
        n_shots_recorded: counts.values().sum(),
        counts,
        seed,
        noise: noise.map_or_else(|| "none".to_string(), |n| n.fingerprint()),
        mitigation: Vec::new(),
    })
}

/// Outcome probabilities for one group, possibly after mitigation.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub n_qubits: usize,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn from_table(table: &ShotTable) -> Result<Self> {
        Ok(Self {
            n_qubits: table.n_qubits,
            probs: table.frequencies()?,
        })
    }
}

/// `constant + sum_groups sum_terms c <P>` from one distribution per group.
pub fn expectation_from_distributions(
    dists: &[Distribution],
    groups: &[MeasurementGroup],
    constant: f64,
) -> Result<f64> {
    if dists.len() != groups.len() {
        return Err(Error::Dimension(format!(
            "{} distributions for {} groups",
            dists.len(),
            groups.len()
        )));
    }
    Ok(constant
        + dists
            .iter()
            .zip(groups)
            .map(|(d, g)| g.expectation_from_probabilities(&d.probs))
            .sum::<f64>())
}

pub fn expectation_from_shots(
    tables: &[ShotTable],
    groups: &[MeasurementGroup],
    constant: f64,
) -> Result<f64> {
    let dists = tables.iter().map(Distribution::from_table).collect::<Result<Vec<_>>>()?;
    expectation_from_distributions(&dists, groups, constant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::circuit::Gate;
    use crate::qubitmap::{partition_commuting, PauliString, QubitOperator};

    fn z_group(n: usize, terms: &[(&str, f64)]) -> MeasurementGroup {
        let v: Vec<(PauliString, f64)> = terms.iter().map(|(s, c)| (s.parse().unwrap(), *c)).collect();
        partition_commuting(&QubitOperator::from_real_terms(n, &v)).unwrap().remove(0)
    }

    #[test]
    fn deterministic_state_single_outcome() {
        let mut c = Circuit::new(4);
        c.push(Gate::X(0)).unwrap();
        c.push(Gate::X(1)).unwrap();
        let counts = sample_circuit(&c, 1000, None, 7).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&3], 1000);
    }

    #[test]
    fn bell_frequencies() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        let n = 1_000_000u64;
        let counts = sample_circuit(&c, n, None, 11).unwrap();
        let sigma = (0.25 / n as f64).sqrt();
        for b in [0u64, 3] {
            assert!((counts[&b] as f64 / n as f64 - 0.5).abs() < 5.0 * sigma);
        }
        assert_eq!(counts.len(), 2);
    }

    #[test]
    fn readout_flip_fraction() {
        let c = Circuit::new(4);
        let noise = NoiseModel::readout_only(0.02, 0.02);
        let n = 200_000u64;
        let counts = sample_circuit(&c, n, Some(&noise), 3).unwrap();
        let flipped = n - counts.get(&0).copied().unwrap_or(0);
        let p = 1.0 - 0.98f64.powi(4);
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((flipped as f64 / n as f64 - p).abs() < 5.0 * sigma);
    }

    #[test]
    fn seeded_runs_identical() {
        let c = crate::qsim::circuit::build_yxxx_ansatz(0.7, 4, 3).unwrap();
        let noise = NoiseModel::preset("nisq-2021").unwrap();
        let g = z_group(4, &[("Z0", 1.0)]);
        let a = sample_shots(&c, &g, 0, 5000, Some(&noise), 99).unwrap();
        let b = sample_shots(&c, &g, 0, 5000, Some(&noise), 99).unwrap();
        assert_eq!(a, b);
        let d = sample_shots(&c, &g, 0, 5000, Some(&noise), 100).unwrap();
        assert_ne!(a.counts, d.counts);
    }

    #[test]
    fn simple_expectations() {
        let g = z_group(1, &[("Z0", 1.0)]);
        let t = ShotTable::from_counts(1, BTreeMap::from([(0, 50)]));
        assert_eq!(expectation_from_shots(&[t], &[g], 0.0).unwrap(), 1.0);
        let g = z_group(2, &[("Z0 Z1", 1.0)]);
        let t = ShotTable::from_counts(2, BTreeMap::from([(0, 50), (3, 50)]));
        assert_eq!(expectation_from_shots(std::slice::from_ref(&t), &[g], 0.0).unwrap(), 1.0);
        let g = z_group(2, &[("Z0", 1.0)]);
        assert_eq!(expectation_from_shots(&[t], &[g], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn empty_table_is_starvation() {
        let g = z_group(1, &[("Z0", 1.0)]);
        let t = ShotTable::from_counts(1, BTreeMap::new());
        assert!(matches!(expectation_from_shots(&[t], &[g], 0.0), Err(Error::Starvation(_))));
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(sample_circuit(&Circuit::new(1), 0, None, 0).is_err());
    }

    #[test]
    fn table_text_round_trip() {
        let mut t = ShotTable::from_counts(4, BTreeMap::from([(3, 900), (1, 100)]));
        t.seed = 42;
        t.n_shots_requested = 1200;
        t.mitigation = vec!["pmsv".into()];
        t.noise = NoiseModel::preset("nisq-2021").unwrap().fingerprint();
        let text = t.to_text();
        assert!(text.contains("1100 900"));
        assert_eq!(ShotTable::from_text(&text).unwrap(), t);
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..4).map(|i| derive_seed(1, &[i])).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_eq!(derive_seed(5, &[1, 2]), derive_seed(5, &[1, 2]));
        assert_ne!(derive_seed(5, &[1, 2]), derive_seed(5, &[2, 1]));
    }
}
