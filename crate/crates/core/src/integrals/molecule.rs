use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const BOHR_PER_ANGSTROM: f64 = 1.8897259886;

const ELEMENTS: [&str; 18] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar",
];

/// Nuclear charge for an element symbol (case-insensitive).
pub fn atomic_number(symbol: &str) -> Result<u32> {
    ELEMENTS
        .iter()
        .position(|e| e.eq_ignore_ascii_case(symbol))
        .map(|i| i as u32 + 1)
        .ok_or_else(|| Error::UnknownElement(symbol.to_string()))
}

pub fn element_symbol(z: u32) -> &'static str {
    ELEMENTS.get(z as usize - 1).copied().unwrap_or("X")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    pub z: u32,
    /// Position in bohr.
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub net_charge: i32,
    pub n_electrons: usize,
}

impl Molecule {
    pub fn new(atoms: Vec<Atom>, net_charge: i32) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMolecule("no atoms".into()));
        }
        for a in &atoms {
            if a.position.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidMolecule(format!("non-finite position for {}", a.symbol)));
            }
        }
        for i in 0..atoms.len() {
            for j in 0..i {
                if distance(&atoms[i].position, &atoms[j].position) < 1e-6 {
                    return Err(Error::InvalidMolecule(format!("atoms {j} and {i} coincide")));
                }
            }
        }
        let total_z: i64 = atoms.iter().map(|a| a.z as i64).sum();
        let n = total_z - net_charge as i64;
        if n < 0 {
            return Err(Error::InvalidMolecule(format!(
                "net charge {net_charge} exceeds total nuclear charge {total_z}"
            )));
        }
        Ok(Self {
            atoms,
            net_charge,
            n_electrons: n as usize,
        })
    }

    /// Build from `(symbol, position in bohr)` pairs.
    pub fn from_bohr(atoms: &[(&str, [f64; 3])], net_charge: i32) -> Result<Self> {
        let atoms = atoms
            .iter()
            .map(|(s, p)| {
                Ok(Atom {
                    symbol: s.to_string(),
                    z: atomic_number(s)?,
                    position: *p,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, net_charge)
    }

    pub fn nuclear_repulsion(&self) -> f64 {
        let mut e = 0.0;
        for i in 0..self.atoms.len() {
            for j in 0..i {
                let r = distance(&self.atoms[i].position, &self.atoms[j].position);
                e += (self.atoms[i].z * self.atoms[j].z) as f64 / r;
            }
        }
        e
    }

    pub fn translated(&self, v: [f64; 3]) -> Molecule {
        let mut m = self.clone();
        for a in &mut m.atoms {
            for k in 0..3 {
                a.position[k] += v[k];
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointCharge {
    /// Charge in units of e.
    pub q: f64,
    /// Position in bohr.
    pub position: [f64; 3],
}

/// Fixed point charges felt by the electrons and nuclei (protein, explicit
/// water). Empty means vacuum.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointChargeEnvironment {
    pub charges: Vec<PointCharge>,
}

impl PointChargeEnvironment {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }

    pub fn total_charge(&self) -> f64 {
        self.charges.iter().map(|c| c.q).sum()
    }

    pub fn translated(&self, v: [f64; 3]) -> Self {
        let mut e = self.clone();
        for c in &mut e.charges {
            for k in 0..3 {
                c.position[k] += v[k];
            }
        }
        e
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut e = self.clone();
        for c in &mut e.charges {
            c.q *= factor;
        }
        e
    }
}

pub fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a number, found `{tok}`"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite value `{tok}`"),
        });
    }
    Ok(v)
}

/// Parse a standard XYZ file (coordinates in Ångström).
///
/// Line numbers in errors are 1-based.
pub fn load_geometry(xyz_text: &str, net_charge: i32) -> Result<Molecule> {
    let mut lines = xyz_text.lines().enumerate();
    let (_, count_line) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let count: usize = count_line.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        msg: format!("expected atom count, found `{}`", count_line.trim()),
    })?;
    if count == 0 {
        return Err(Error::InvalidMolecule("no atoms".into()));
    }
    // comment line, may be absent only when there are no atoms
    lines.next().ok_or(Error::Parse {
        line: 2,
        msg: "missing comment line".into(),
    })?;
    let mut atoms = Vec::with_capacity(count);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if atoms.len() == count {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("more atom records than the declared {count}"),
            });
        }
        if toks.len() < 4 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `element x y z`, found {} fields", toks.len()),
            });
        }
        let z = atomic_number(toks[0])?;
        let mut pos = [0.0; 3];
        for k in 0..3 {
            pos[k] = parse_f64(toks[k + 1], lineno)? * BOHR_PER_ANGSTROM;
        }
        atoms.push(Atom {
            symbol: element_symbol(z).to_string(),
            z,
            position: pos,
        });
    }
    if atoms.len() != count {
        return Err(Error::Parse {
            line: xyz_text.lines().count(),
            msg: format!("declared {count} atoms, found {}", atoms.len()),
        });
    }
    Molecule::new(atoms, net_charge)
}

/// Serialize back to XYZ (Ångström).
pub fn to_xyz(mol: &Molecule, comment: &str) -> String {
    let mut s = format!("{}\n{}\n", mol.atoms.len(), comment);
    for a in &mol.atoms {
        s.push_str(&format!(
            "{} {:.8} {:.8} {:.8}\n",
            a.symbol,
            a.position[0] / BOHR_PER_ANGSTROM,
            a.position[1] / BOHR_PER_ANGSTROM,
            a.position[2] / BOHR_PER_ANGSTROM
        ));
    }
    s
}

/// Parse a point-charge file: one `x y z q` record per line, Ångström and e.
/// Blank lines and `#` comments are skipped.
pub fn load_point_charges(charge_text: &str) -> Result<PointChargeEnvironment> {
    let mut charges = Vec::new();
    for (idx, raw) in charge_text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `x y z q`, found {} fields", toks.len()),
            });
        }
        let mut pos = [0.0; 3];
        for k in 0..3 {
            pos[k] = parse_f64(toks[k], lineno)? * BOHR_PER_ANGSTROM;
        }
        let q = parse_f64(toks[3], lineno)?;
        charges.push(PointCharge { q, position: pos });
    }
    Ok(PointChargeEnvironment { charges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h2_from_xyz() {
        let mol = load_geometry("2\n\nH 0 0 0\nH 0 0 0.7408", 0).unwrap();
        assert_eq!(mol.atoms.len(), 2);
        assert_eq!(mol.n_electrons, 2);
        let r = distance(&mol.atoms[0].position, &mol.atoms[1].position);
        assert!((r - 1.4000).abs() < 1e-4, "r = {r}");
    }

    #[test]
    fn empty_atom_list_is_error() {
        assert!(load_geometry("0\n\n", 0).is_err());
        assert!(load_geometry("", 0).is_err());
    }

    #[test]
    fn cation_electron_count() {
        let mol = load_geometry("1\nhelium\nHe 0 0 0", 1).unwrap();
        assert_eq!(mol.n_electrons, 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match load_geometry("2\n\nH 0 0 0\nH 0 zero 0.74", 0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_geometry("1\n\nQq 0 0 0", 0),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn point_charge_files() {
        assert!(load_point_charges("").unwrap().is_empty());
        let env = load_point_charges("0 0 10.0 -1.0\n").unwrap();
        assert_eq!(env.charges.len(), 1);
        assert!((env.charges[0].position[2] - 18.897259886).abs() < 1e-9);
        assert_eq!(env.charges[0].q, -1.0);
        assert!(matches!(
            load_point_charges("0 0 1.0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(load_point_charges("0 0 a 1\n").is_err());
    }
}
