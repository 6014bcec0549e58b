use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::PauliString;
use crate::{Error, Result};

pub const PRUNE_TOL: f64 = 1e-12;

/// Linear combination of Pauli strings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QubitOperator {
    pub n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::from_term(n_qubits, PauliString::identity(), Complex64::new(1.0, 0.0))
    }

    pub fn from_term(n_qubits: usize, p: PauliString, c: Complex64) -> Self {
        let mut op = Self::zero(n_qubits);
        op.add_term(p, c);
        op
    }

    pub fn from_real_terms(n_qubits: usize, terms: &[(PauliString, f64)]) -> Self {
        let mut op = Self::zero(n_qubits);
        for &(p, c) in terms {
            op.add_term(p, Complex64::new(c, 0.0));
        }
        op
    }

    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        assert!(
            p.min_qubits() <= self.n_qubits,
            "term {p} does not fit in {} qubits",
            self.n_qubits
        );
        *self.terms.entry(p).or_default() += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn constant(&self) -> f64 {
        self.coefficient(&PauliString::identity()).re
    }

    /// Drop terms with `|c| < PRUNE_TOL`.
    pub fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
        self
    }

    pub fn scaled(mut self, s: Complex64) -> Self {
        for c in self.terms.values_mut() {
            *c *= s;
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(p, c)| (*p, c.conj())).collect(),
        }
    }

    pub fn max_imaginary(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.im.abs()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imaginary() <= tol
    }

    /// Real coefficients of a Hermitian operator.
    pub fn real_terms(&self) -> Result<Vec<(PauliString, f64)>> {
        let im = self.max_imaginary();
        if im > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "operator is not Hermitian (imaginary coefficient {im:.3e})"
            )));
        }
        Ok(self.terms.iter().map(|(p, c)| (*p, c.re)).collect())
    }

    /// Drop imaginary parts below `tol`; error if any are larger.
    pub fn hermitian_canonical(self, tol: f64) -> Result<Self> {
        let im = self.max_imaginary();
        if im > tol {
            return Err(Error::InvalidArgument(format!(
                "operator is not Hermitian (imaginary coefficient {im:.3e})"
            )));
        }
        let terms = self
            .terms
            .into_iter()
            .map(|(p, c)| (p, Complex64::new(c.re, 0.0)))
            .collect();
        Ok(Self { n_qubits: self.n_qubits, terms }.pruned())
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            for b in 0..dim {
                let (ph, b2) = p.apply_to_basis(b);
                m[(b2, b)] += c * ph;
            }
        }
        m
    }

    pub fn apply(&self, state: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); state.len()];
        for (p, c) in &self.terms {
            for (b, amp) in state.iter().enumerate() {
                if *amp == Complex64::default() {
                    continue;
                }
                let (ph, b2) = p.apply_to_basis(b);
                out[b2] += c * ph * amp;
            }
        }
        out
    }

    /// `<psi|O|psi>` for a normalized statevector; real part.
    pub fn expectation(&self, state: &[Complex64]) -> f64 {
        let o = self.apply(state);
        state.iter().zip(&o).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// One term per line: `+0.5 Z0 Z1`, preceded by a `# qubits: n` header.
    pub fn to_text(&self) -> String {
        let mut s = format!("# qubits: {}\n", self.n_qubits);
        for (p, c) in &self.terms {
            if c.im == 0.0 {
                s.push_str(&format!("{:+} {}\n", c.re, p));
            } else {
                s.push_str(&format!("{:+}{:+}i {}\n", c.re, c.im, p));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_qubits = None;
        let mut parsed = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(n) = rest.trim().strip_prefix("qubits:") {
                    n_qubits = Some(n.trim().parse::<usize>().map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: format!("bad qubit count: {e}"),
                    })?);
                }
                continue;
            }
            let (coef, ops) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let c = parse_coefficient(coef).ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("bad coefficient `{coef}`"),
            })?;
            let p: PauliString = ops.parse().map_err(|e: Error| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            parsed.push((p, c));
        }
        let needed = parsed.iter().map(|(p, _)| p.min_qubits()).max().unwrap_or(0);
        let n = n_qubits.unwrap_or(needed);
        if n < needed {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {n} qubits but terms need {needed}"),
            });
        }
        let mut op = Self::zero(n);
        for (p, c) in parsed {
            op.add_term(p, c);
        }
        Ok(op)
    }
}

fn parse_coefficient(s: &str) -> Option<Complex64> {
    if let Some(body) = s.strip_suffix('i') {
        // split "re±im" at the last sign that is not an exponent sign
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
        let re: f64 = body[..split].parse().ok()?;
        let im: f64 = body[split..].parse().ok()?;
        Some(Complex64::new(re, im))
    } else {
        s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0))
    }
}

impl Add for QubitOperator {
    type Output = QubitOperator;
    fn add(mut self, rhs: QubitOperator) -> QubitOperator {
        self.n_qubits = self.n_qubits.max(rhs.n_qubits);
        for (p, c) in rhs.terms {
            *self.terms.entry(p).or_default() += c;
        }
        self
    }
}

impl Mul for &QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: &QubitOperator) -> QubitOperator {
        let mut out = QubitOperator::zero(self.n_qubits.max(rhs.n_qubits));
        for (p, a) in &self.terms {
            for (q, b) in &rhs.terms {
                let (ph, r) = p.mul(q);
                *out.terms.entry(r).or_default() += a * b * ph;
            }
        }
        out
    }
}

impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubitmap::pauli::Pauli;

    #[test]
    fn text_round_trip_is_exact() {
        let mut op = QubitOperator::zero(4);
        op.add_term("Z0 Z1".parse().unwrap(), Complex64::new(0.5, 0.0));
        op.add_term("I".parse().unwrap(), Complex64::new(-1.0 / 3.0, 0.0));
        op.add_term("X0 Y1 Y2 X3".parse().unwrap(), Complex64::new(1e-7, -2.5e-3));
        let back = QubitOperator::from_text(&op.to_text()).unwrap();
        assert_eq!(op, back);
        assert!(op.to_text().contains("+0.5 Z0 Z1"));
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = QubitOperator::from_text("+1 Z0\nfoo X1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn matrix_of_product_matches_product_of_matrices() {
        let a = QubitOperator::from_real_terms(
            2,
            &[(PauliString::single(0, Pauli::X), 0.3), (PauliString::from_ops(&[(0, Pauli::Y), (1, Pauli::Z)]), -1.2)],
        );
        let b = QubitOperator::from_real_terms(2, &[(PauliString::single(1, Pauli::Y), 0.7), (PauliString::identity(), 2.0)]);
        let lhs = (&a * &b).to_matrix();
        let rhs = a.to_matrix() * b.to_matrix();
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
