use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::{Error, Result};

/// Ordered `I < X < Y < Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis on up to 64 qubits, stored in
/// symplectic form: `Y = i X Z` on qubits where both bits are set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    x: u64,
    z: u64,
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        Self::identity().with(q, p)
    }

    pub fn from_ops(ops: &[(usize, Pauli)]) -> Self {
        ops.iter().fold(Self::identity(), |s, &(q, p)| s.with(q, p))
    }

    /// Z on every qubit set in `mask`.
    pub fn z_mask(mask: u64) -> Self {
        Self { x: 0, z: mask }
    }

    pub fn with(mut self, q: usize, p: Pauli) -> Self {
        assert!(q < 64, "qubit index {q} exceeds 63");
        let (x, z) = p.bits();
        let bit = 1u64 << q;
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
        self
    }

    pub fn op(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    /// Only I and Z factors.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Highest qubit touched plus one.
    pub fn min_qubits(&self) -> usize {
        64 - self.support().leading_zeros() as usize
    }

    pub fn ops(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        let s = self.support();
        (0..64).filter(move |q| s >> q & 1 == 1).map(move |q| (q, self.op(q)))
    }

    /// `self * other = phase * result`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        (i_pow(k), PauliString { x, z })
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Equal or identity on every qubit.
    pub fn qubitwise_commutes(&self, other: &PauliString) -> bool {
        let both = self.support() & other.support();
        (self.x ^ other.x) & both == 0 && (self.z ^ other.z) & both == 0
    }

    /// `P|b> = phase |b'>` for a computational basis index (qubit `q` is bit `q`).
    #[inline]
    pub fn apply_to_basis(&self, b: usize) -> (Complex64, usize) {
        let b64 = b as u64;
        let k = (self.x & self.z).count_ones() + 2 * (self.z & b64).count_ones();
        (i_pow(k), (b64 ^ self.x) as usize)
    }

    /// Eigenvalue of a diagonal string on a basis state.
    pub fn z_eigenvalue(&self, b: u64) -> i8 {
        debug_assert!(self.is_diagonal());
        if (self.z & b).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = (self.x ^ other.x) | (self.z ^ other.z);
        if diff == 0 {
            return Ordering::Equal;
        }
        let q = diff.trailing_zeros() as usize;
        self.op(q).cmp(&other.op(q))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for (q, p) in self.ops() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", p.symbol(), q)?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = PauliString::identity();
        for tok in s.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let p = match chars.next() {
                Some('X') => Pauli::X,
                Some('Y') => Pauli::Y,
                Some('Z') => Pauli::Z,
                _ => return Err(Error::InvalidArgument(format!("bad Pauli token `{tok}`"))),
            };
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad qubit index in `{tok}`")))?;
            if q >= 64 {
                return Err(Error::InvalidArgument(format!("qubit index {q} exceeds 63")));
            }
            if out.op(q) != Pauli::I {
                return Err(Error::InvalidArgument(format!("qubit {q} repeated in `{s}`")));
            }
            out = out.with(q, p);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_table() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        assert_eq!(p("X0").mul(&p("Y0")), (c(0.0, 1.0), p("Z0")));
        assert_eq!(p("Y0").mul(&p("X0")), (c(0.0, -1.0), p("Z0")));
        assert_eq!(p("Y0").mul(&p("Z0")), (c(0.0, 1.0), p("X0")));
        assert_eq!(p("Z0").mul(&p("X0")), (c(0.0, 1.0), p("Y0")));
        assert_eq!(p("Y0").mul(&p("Y0")), (c(1.0, 0.0), p("I")));
    }

    #[test]
    fn ordering_is_lexicographic_from_qubit_zero() {
        let mut v = [p("Z0"), p("X1"), p("X0 Z1"), p("I"), p("Y0"), p("X0")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["I", "X1", "X0", "X0 Z1", "Y0", "Z0"]);
    }

    #[test]
    fn commutation() {
        assert!(p("X0 X1").commutes(&p("Y0 Y1")));
        assert!(!p("X0 X1").qubitwise_commutes(&p("Y0 Y1")));
        assert!(!p("X0").commutes(&p("Z0")));
        assert!(p("Z0 Z1").qubitwise_commutes(&p("Z1 Z2")));
    }

    #[test]
    fn text_round_trip() {
        for s in ["I", "X0", "Y3 Z7", "X0 Y1 Z2 X63"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("X0 Y0".parse::<PauliString>().is_err());
        assert!("Q1".parse::<PauliString>().is_err());
    }

    #[test]
    fn basis_action_of_y() {
        // Y|0> = i|1>, Y|1> = -i|0>
        assert_eq!(p("Y0").apply_to_basis(0), (Complex64::new(0.0, 1.0), 1));
        assert_eq!(p("Y0").apply_to_basis(1), (Complex64::new(0.0, -1.0), 0));
    }
}
