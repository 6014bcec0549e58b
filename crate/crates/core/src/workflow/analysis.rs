use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Energy of one leg together with a fingerprint of how it was computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegEnergy {
    pub energy: f64,
    pub method: String,
}

/// `E(ligand in protein) - E(ligand in solvent)`. More negative binds
/// more strongly.
pub fn binding_energy(protein: &LegEnergy, solvent: &LegEnergy) -> Result<f64> {
    if protein.method != solvent.method {
        return Err(Error::MethodMismatch(protein.method.clone(), solvent.method.clone()));
    }
    Ok(protein.energy - solvent.energy)
}

/// Antisymmetric matrix of pairwise binding-energy differences
/// `m[i][j] = E_bind(i) - E_bind(j)`, all evaluated in the environment of
/// the reference ligand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingMatrix {
    pub reference: String,
    pub ids: Vec<String>,
    pub m: Vec<Vec<f64>>,
}

impl RankingMatrix {
    /// Row of the reference ligand: every ligand relative to it, negated.
    pub fn relative_to_reference(&self) -> Vec<(String, f64)> {
        let r = self.ids.iter().position(|i| *i == self.reference).expect("reference present");
        self.ids.iter().enumerate().map(|(j, id)| (id.clone(), self.m[j][r])).collect()
    }
}

pub fn ranking_metric(e_bind: &[(String, Option<f64>)], reference: &str) -> Result<RankingMatrix> {
    if !e_bind.iter().any(|(id, _)| id == reference) {
        return Err(Error::Analysis(format!("reference ligand `{reference}` is not in the series")));
    }
    let mut e = Vec::with_capacity(e_bind.len());
    for (id, v) in e_bind {
        e.push(v.ok_or_else(|| Error::Analysis(format!("ligand `{id}` has no binding energy")))?);
    }
    let m = e.iter().map(|ei| e.iter().map(|ej| ei - ej).collect()).collect();
    Ok(RankingMatrix {
        reference: reference.to_string(),
        ids: e_bind.iter().map(|(id, _)| id.clone()).collect(),
        m,
    })
}

/// Least-squares line `e_bind = slope * potency + intercept` and ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub n: usize,
    pub r_squared: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Indices sorted by ascending binding energy (strongest first).
    pub ordering: Vec<usize>,
}

pub fn rank_and_correlate(e_bind: &[f64], potency: &[f64]) -> Result<Correlation> {
    if e_bind.len() != potency.len() {
        return Err(Error::Analysis(format!(
            "{} binding energies for {} potencies",
            e_bind.len(),
            potency.len()
        )));
    }
    let n = e_bind.len();
    if n < 3 {
        return Err(Error::Analysis(format!("need at least 3 ligands, got {n}")));
    }
    let nf = n as f64;
    let mx = potency.iter().sum::<f64>() / nf;
    let my = e_bind.iter().sum::<f64>() / nf;
    let sxx: f64 = potency.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = e_bind.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = potency.iter().zip(e_bind).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Analysis("potency values have zero variance".into()));
    }
    if syy <= 0.0 {
        return Err(Error::Analysis("binding energies have zero variance".into()));
    }
    let slope = sxy / sxx;
    let mut ordering: Vec<usize> = (0..n).collect();
    ordering.sort_by(|&a, &b| e_bind[a].total_cmp(&e_bind[b]).then(a.cmp(&b)));
    Ok(Correlation {
        n,
        r_squared: sxy * sxy / (sxx * syy),
        slope,
        intercept: my - slope * mx,
        ordering,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrimination {
    pub weak_mean: f64,
    pub weak_std: f64,
    pub strong_mean: f64,
    pub strong_std: f64,
    /// `weak_mean - strong_mean`; positive when weak binders sit higher.
    pub shift: f64,
    /// Fraction of (weak, strong) pairs in which the weak ligand has the
    /// lower binding energy.
    pub misordered_fraction: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = if v.len() > 1 {
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (m, s)
}

pub fn discrimination_stats(e_bind: &[f64], weak: &[usize], strong: &[usize]) -> Result<Discrimination> {
    if weak.is_empty() || strong.is_empty() {
        return Err(Error::Analysis("weak and strong groups must be non-empty".into()));
    }
    if let Some(i) = weak.iter().chain(strong).find(|&&i| i >= e_bind.len()) {
        return Err(Error::Analysis(format!("ligand index {i} out of range")));
    }
    let w: Vec<f64> = weak.iter().map(|&i| e_bind[i]).collect();
    let s: Vec<f64> = strong.iter().map(|&i| e_bind[i]).collect();
    let (weak_mean, weak_std) = mean_std(&w);
    let (strong_mean, strong_std) = mean_std(&s);
    let bad = w.iter().flat_map(|a| s.iter().map(move |b| (a < b) as usize)).sum::<usize>();
    Ok(Discrimination {
        weak_mean,
        weak_std,
        strong_mean,
        strong_std,
        shift: weak_mean - strong_mean,
        misordered_fraction: bad as f64 / (w.len() * s.len()) as f64,
    })
}

/// Reference per-ligand values: potencies, state-vector correlation
/// energies and binding energies with hardware deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixtures {
    pub ligands: Vec<String>,
    pub pic50: Vec<f64>,
    pub e_corr_protein: Vec<f64>,
    pub e_corr_solvent: Vec<f64>,
    pub e_bind_statevector: Vec<f64>,
    pub delta_transmon: Vec<f64>,
    pub delta_trapped_ion: Vec<Option<f64>>,
}

const PIC50_CSV: &str = include_str!("../../fixtures/pic50.csv");
const CORR_CSV: &str = include_str!("../../fixtures/correlation_energies.csv");
const BIND_CSV: &str = include_str!("../../fixtures/binding_energies.csv");

fn read_table(text: &str) -> Result<BTreeMap<String, Vec<String>>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let id = rec.get(0).unwrap_or("").trim().to_string();
        out.insert(id, rec.iter().skip(1).map(|s| s.trim().to_string()).collect());
    }
    Ok(out)
}

fn num(s: &str, what: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Analysis(format!("bad {what} value `{s}`")))
}

impl Fixtures {
    /// The tables compiled into the library.
    pub fn builtin() -> Self {
        Self::parse(PIC50_CSV, CORR_CSV, BIND_CSV).expect("bundled fixtures parse")
    }

    /// `pic50.csv`, `correlation_energies.csv` and `binding_energies.csv`
    /// from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let read = |f: &str| std::fs::read_to_string(dir.join(f));
        Self::parse(
            &read("pic50.csv")?,
            &read("correlation_energies.csv")?,
            &read("binding_energies.csv")?,
        )
    }

    pub fn parse(pic50: &str, corr: &str, bind: &str) -> Result<Self> {
        // ligand order follows the potency table
        let mut order = Vec::new();
        let mut r = csv::Reader::from_reader(pic50.as_bytes());
        let mut p = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            order.push(rec.get(0).unwrap_or("").trim().to_string());
            p.push(num(rec.get(1).unwrap_or(""), "pic50")?);
        }
        let corr = read_table(corr)?;
        let bind = read_table(bind)?;
        let mut f = Fixtures {
            ligands: order.clone(),
            pic50: p,
            e_corr_protein: Vec::new(),
            e_corr_solvent: Vec::new(),
            e_bind_statevector: Vec::new(),
            delta_transmon: Vec::new(),
            delta_trapped_ion: Vec::new(),
        };
        for id in &order {
            let missing = |t: &str| Error::Analysis(format!("ligand `{id}` missing from {t}"));
            let c = corr.get(id).ok_or_else(|| missing("correlation energies"))?;
            let b = bind.get(id).ok_or_else(|| missing("binding energies"))?;
            if c.len() < 2 || b.len() < 3 {
                return Err(Error::Analysis(format!("short fixture row for ligand `{id}`")));
            }
            f.e_corr_protein.push(num(&c[0], "correlation")?);
            f.e_corr_solvent.push(num(&c[1], "correlation")?);
            f.e_bind_statevector.push(num(&b[0], "binding energy")?);
            f.delta_transmon.push(num(&b[1], "transmon deviation")?);
            f.delta_trapped_ion.push(match b[2].as_str() {
                "" | "-" => None,
                s => Some(num(s, "trapped-ion deviation")?),
            });
        }
        Ok(f)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ligands.iter().position(|l| l == id)
    }

    pub fn e_bind_transmon(&self) -> Vec<f64> {
        self.e_bind_statevector.iter().zip(&self.delta_transmon).map(|(e, d)| e + d).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureAnalysis {
    pub statevector: Correlation,
    pub transmon: Correlation,
    pub trapped_ion: Correlation,
    pub trapped_ion_ligands: Vec<String>,
    pub discrimination_statevector: Discrimination,
    pub discrimination_transmon: Discrimination,
    pub weak: Vec<String>,
}

/// Default weak binders of the reference series.
pub const WEAK_BINDERS: [&str; 2] = ["67", "109"];

pub fn analyze_fixtures(f: &Fixtures, weak_ids: &[&str]) -> Result<FixtureAnalysis> {
    let weak: Vec<usize> = weak_ids
        .iter()
        .map(|id| f.index_of(id).ok_or_else(|| Error::Analysis(format!("unknown ligand `{id}`"))))
        .collect::<Result<_>>()?;
    let strong: Vec<usize> = (0..f.ligands.len()).filter(|i| !weak.contains(i)).collect();
    let transmon = f.e_bind_transmon();
    let ti: Vec<usize> = (0..f.ligands.len()).filter(|&i| f.delta_trapped_ion[i].is_some()).collect();
    let ti_e: Vec<f64> = ti
        .iter()
        .map(|&i| f.e_bind_statevector[i] + f.delta_trapped_ion[i].unwrap_or(0.0))
        .collect();
    let ti_p: Vec<f64> = ti.iter().map(|&i| f.pic50[i]).collect();
    Ok(FixtureAnalysis {
        statevector: rank_and_correlate(&f.e_bind_statevector, &f.pic50)?,
        transmon: rank_and_correlate(&transmon, &f.pic50)?,
        trapped_ion: rank_and_correlate(&ti_e, &ti_p)?,
        trapped_ion_ligands: ti.iter().map(|&i| f.ligands[i].clone()).collect(),
        discrimination_statevector: discrimination_stats(&f.e_bind_statevector, &weak, &strong)?,
        discrimination_transmon: discrimination_stats(&transmon, &weak, &strong)?,
        weak: weak_ids.iter().map(|s| s.to_string()).collect(),
    })
}
