use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dmet::{ActiveSpace, MuOptions, SolverKind};
use crate::vqe::VqeConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LigandEntry {
    pub id: String,
    /// XYZ file, relative to the config file.
    pub xyz: PathBuf,
    #[serde(default)]
    pub charge: i32,
    /// Experimental potency (pIC50), if known.
    #[serde(default)]
    pub pic50: Option<f64>,
}

/// Point charges of one energy leg: a charge file or `"vacuum"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegSpec {
    pub environment: String,
}

impl LegSpec {
    pub fn vacuum() -> Self {
        Self {
            environment: "vacuum".into(),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.environment == "vacuum"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentSpec {
    /// Atom indices; omitted means every atom not claimed by another
    /// fragment.
    #[serde(default)]
    pub atoms: Option<Vec<usize>>,
    pub solver: SolverKind,
    #[serde(default)]
    pub active_space: Option<ActiveSpace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    #[serde(default = "default_basis")]
    pub basis: String,
    pub ligands: Vec<LigandEntry>,
    pub protein: LegSpec,
    pub solvent: LegSpec,
    pub fragments: Vec<FragmentSpec>,
    #[serde(default)]
    pub vqe: VqeConfig,
    #[serde(default)]
    pub mu: MuOptions,
    /// Reference ligand of the pairwise ranking metric.
    #[serde(default)]
    pub reference: Option<String>,
    /// Ligand ids treated as weak binders in the discrimination statistics.
    #[serde(default)]
    pub weak_binders: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, relative to the config file.
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Directory paths in the config are resolved against; set by
    /// [`RunConfig::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_basis() -> String {
    "sto-3g".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::from_toml(&text, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ligands.is_empty() {
            return Err(Error::Config("no ligands".into()));
        }
        let mut ids: Vec<&str> = self.ligands.iter().map(|l| l.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate ligand id `{}`", w[0])));
        }
        if let Some(r) = &self.reference {
            if !ids.contains(&r.as_str()) {
                return Err(Error::Config(format!("reference ligand `{r}` is not listed")));
            }
        }
        for w in &self.weak_binders {
            if !ids.contains(&w.as_str()) {
                return Err(Error::Config(format!("weak binder `{w}` is not listed")));
            }
        }
        if self.fragments.is_empty() {
            return Err(Error::Config("no fragments".into()));
        }
        if self.fragments.iter().filter(|f| f.atoms.is_none()).count() > 1 {
            return Err(Error::Config("at most one fragment may take the remaining atoms".into()));
        }
        for (i, f) in self.fragments.iter().enumerate() {
            if f.active_space.is_some() && f.solver == SolverKind::MeanField {
                return Err(Error::Config(format!("fragment {i}: active space on a mean-field fragment")));
            }
        }
        self.vqe.validate()
    }

    /// Atom partition for a molecule with `n_atoms` atoms.
    pub fn atom_partition(&self, n_atoms: usize) -> Result<Vec<Vec<usize>>> {
        let claimed: Vec<usize> = self.fragments.iter().flat_map(|f| f.atoms.clone().unwrap_or_default()).collect();
        self.fragments
            .iter()
            .map(|f| match &f.atoms {
                Some(a) => Ok(a.clone()),
                None => {
                    let rest: Vec<usize> = (0..n_atoms).filter(|a| !claimed.contains(a)).collect();
                    if rest.is_empty() {
                        Err(Error::InvalidPartition("remainder fragment is empty".into()))
                    } else {
                        Ok(rest)
                    }
                }
            })
            .collect()
    }

    /// Stable description of the method shared by both legs.
    pub fn method_fingerprint(&self) -> String {
        let frags: Vec<String> = self
            .fragments
            .iter()
            .map(|f| {
                let atoms = match &f.atoms {
                    Some(a) => format!("{a:?}"),
                    None => "rest".into(),
                };
                match (f.solver, f.active_space) {
                    (SolverKind::Vqe, a) => {
                        let a = a.unwrap_or(ActiveSpace::HOMO_LUMO);
                        format!("{atoms}:vqe({}e{}so,{})", a.n_elec, a.n_spin_orbitals, self.vqe.label())
                    }
                    (s, Some(a)) => format!("{atoms}:{s}({}e{}so)", a.n_elec, a.n_spin_orbitals),
                    (s, None) => format!("{atoms}:{s}"),
                }
            })
            .collect();
        format!("{}|{}|mu_tol={:e}", self.basis, frags.join(";"), self.mu.tol)
    }
}
