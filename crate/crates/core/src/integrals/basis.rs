//! STO-3G basis construction.

use serde::{Deserialize, Serialize};

use super::molecule::Molecule;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngularMomentum {
    S,
    P,
}

impl AngularMomentum {
    pub fn l(self) -> u32 {
        match self {
            AngularMomentum::S => 0,
            AngularMomentum::P => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub center: usize,
    pub am: AngularMomentum,
    /// `(exponent, contraction coefficient)` for normalized primitives.
    pub primitives: Vec<(f64, f64)>,
}

/// One contracted Cartesian atomic orbital.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicOrbital {
    pub atom: usize,
    pub center: [f64; 3],
    pub powers: [u32; 3],
    /// `(exponent, coefficient)` with primitive normalization and the
    /// contraction renormalization folded into the coefficient.
    pub primitives: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub name: String,
    pub shells: Vec<Shell>,
    pub aos: Vec<AtomicOrbital>,
    pub n_ao: usize,
}

impl BasisSet {
    /// Atom owning each AO, in AO order.
    pub fn ao_atoms(&self) -> Vec<usize> {
        self.aos.iter().map(|ao| ao.atom).collect()
    }
}

const S1_COEFS: [f64; 3] = [0.1543289673, 0.5353281423, 0.4446345422];
const S2_COEFS: [f64; 3] = [-0.09996722919, 0.3995128261, 0.7001154689];
const P2_COEFS: [f64; 3] = [0.155916275, 0.6076837186, 0.3919573931];
const S3_COEFS: [f64; 3] = [-0.2196203690, 0.2255954336, 0.9003984260];
const P3_COEFS: [f64; 3] = [0.01058760429, 0.5951670053, 0.4620010120];

struct ElementBasis {
    s: Vec<([f64; 3], [f64; 3])>,
    p: Vec<([f64; 3], [f64; 3])>,
}

fn sto3g(z: u32) -> Option<ElementBasis> {
    let one = |e: [f64; 3]| (e, S1_COEFS);
    let second_row = |e1: [f64; 3], e2: [f64; 3]| ElementBasis {
        s: vec![one(e1), (e2, S2_COEFS)],
        p: vec![(e2, P2_COEFS)],
    };
    Some(match z {
        1 => ElementBasis {
            s: vec![one([3.425250914, 0.6239137298, 0.1688554040])],
            p: vec![],
        },
        2 => ElementBasis {
            s: vec![one([6.362421394, 1.158922999, 0.3136497915])],
            p: vec![],
        },
        6 => second_row(
            [71.61683735, 13.04509632, 3.530512160],
            [2.941249355, 0.6834830964, 0.2222899159],
        ),
        7 => second_row(
            [99.10616896, 18.05231239, 4.885660238],
            [3.780455879, 0.8784966449, 0.2857143744],
        ),
        8 => second_row(
            [130.7093214, 23.80886605, 6.443608313],
            [5.033151319, 1.169596125, 0.3803889600],
        ),
        9 => second_row(
            [166.6791340, 30.36081233, 8.216820672],
            [6.464803249, 1.502281245, 0.4885884864],
        ),
        16 => {
            let e2 = [33.32975173, 7.745117521, 2.518952599];
            let e3 = [2.029194274, 0.5661400518, 0.2215833792];
            ElementBasis {
                s: vec![
                    one([533.1257359, 97.10951830, 26.28162542]),
                    (e2, S2_COEFS),
                    (e3, S3_COEFS),
                ],
                p: vec![(e2, P2_COEFS), (e3, P3_COEFS)],
            }
        }
        _ => return None,
    })
}

fn double_factorial(n: i32) -> f64 {
    if n <= 0 {
        1.0
    } else {
        (1..=n).rev().step_by(2).map(|k| k as f64).product()
    }
}

/// Normalization of a Cartesian primitive `x^l y^m z^n exp(-a r^2)`.
pub fn primitive_norm(a: f64, powers: [u32; 3]) -> f64 {
    let lsum: u32 = powers.iter().sum();
    let denom: f64 = powers
        .iter()
        .map(|&l| double_factorial(2 * l as i32 - 1))
        .product();
    (2.0 * a / std::f64::consts::PI).powf(0.75) * (4.0 * a).powf(lsum as f64 / 2.0) / denom.sqrt()
}

/// Self-overlap of a contraction of normalized primitives with the same
/// Cartesian powers on one center.
fn contracted_self_overlap(prims: &[(f64, f64)], powers: [u32; 3]) -> f64 {
    let mut s = 0.0;
    for &(a, ca) in prims {
        for &(b, cb) in prims {
            let p = a + b;
            // <x^l e^{-a x^2} | x^l e^{-b x^2}> per axis, times primitive norms
            let mut ov = (std::f64::consts::PI / p).powf(1.5);
            for &l in &powers {
                ov *= double_factorial(2 * l as i32 - 1) / (2.0 * p).powi(l as i32);
            }
            s += ca * cb * primitive_norm(a, powers) * primitive_norm(b, powers) * ov;
        }
    }
    s
}

/// Build a basis for `mol`. Only `sto-3g` is available.
///
/// AO order is atom-major; within an atom all s functions precede the p
/// functions, and p functions are ordered x, y, z.
pub fn build_basis(mol: &Molecule, name: &str) -> Result<BasisSet> {
    if !name.eq_ignore_ascii_case("sto-3g") {
        return Err(Error::UnsupportedBasis(name.to_string()));
    }
    let mut shells = Vec::new();
    let mut aos = Vec::new();
    for (ia, atom) in mol.atoms.iter().enumerate() {
        let data = sto3g(atom.z).ok_or_else(|| Error::UnsupportedElement {
            element: atom.symbol.clone(),
            basis: "sto-3g".into(),
        })?;
        let mut push = |am: AngularMomentum, exps: [f64; 3], coefs: [f64; 3]| {
            let prims: Vec<(f64, f64)> = exps.iter().copied().zip(coefs.iter().copied()).collect();
            let comps: &[[u32; 3]] = match am {
                AngularMomentum::S => &[[0, 0, 0]],
                AngularMomentum::P => &[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            };
            for &powers in comps {
                let scale = contracted_self_overlap(&prims, powers).sqrt().recip();
                aos.push(AtomicOrbital {
                    atom: ia,
                    center: atom.position,
                    powers,
                    primitives: prims
                        .iter()
                        .map(|&(a, c)| (a, c * scale * primitive_norm(a, powers)))
                        .collect(),
                });
            }
            shells.push(Shell {
                center: ia,
                am,
                primitives: prims,
            });
        };
        for (e, c) in data.s {
            push(AngularMomentum::S, e, c);
        }
        for (e, c) in data.p {
            push(AngularMomentum::P, e, c);
        }
    }
    let n_ao = aos.len();
    Ok(BasisSet {
        name: "sto-3g".into(),
        shells,
        aos,
        n_ao,
    })
}
