use crate::qubitmap::Pauli;
use crate::{Error, Result};

/// Rotation angle: fixed, or `scale * params[slot]` once bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param { slot: usize, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    /// `diag(e^{-i t/2}, e^{i t/2})`.
    Rz(usize, Angle),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::X(q) | Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::Rz(q, _) => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            n_params: 0,
        }
    }

    pub fn push(&mut self, g: Gate) -> Result<&mut Self> {
        let (a, b) = g.qubits();
        if a >= self.n_qubits || b.is_some_and(|b| b >= self.n_qubits) {
            return Err(Error::Circuit(format!(
                "gate {g:?} addresses a qubit outside a {}-qubit register",
                self.n_qubits
            )));
        }
        if b == Some(a) {
            return Err(Error::Circuit(format!("CNOT control equals target in {g:?}")));
        }
        if let Gate::Rz(_, Angle::Param { slot, .. }) = g {
            self.n_params = self.n_params.max(slot + 1);
        }
        self.gates.push(g);
        Ok(self)
    }

    pub fn is_bound(&self) -> bool {
        !self
            .gates
            .iter()
            .any(|g| matches!(g, Gate::Rz(_, Angle::Param { .. })))
    }

    /// Resolve every parameter slot.
    pub fn bind(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.n_params {
            return Err(Error::Circuit(format!(
                "circuit has {} parameters, {} supplied",
                self.n_params,
                params.len()
            )));
        }
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Rz(q, Angle::Param { slot, scale }) => Gate::Rz(q, Angle::Fixed(scale * params[slot])),
                other => other,
            })
            .collect();
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates,
            n_params: 0,
        })
    }

    /// Append rotations so a Z-basis measurement reads out `basis`
    /// (X: H; Y: S-dagger then H).
    pub fn with_measurement_basis(&self, basis: &[Pauli]) -> Result<Circuit> {
        if basis.len() != self.n_qubits {
            return Err(Error::Circuit(format!(
                "measurement basis for {} qubits on a {}-qubit circuit",
                basis.len(),
                self.n_qubits
            )));
        }
        let mut c = self.clone();
        for (q, p) in basis.iter().enumerate() {
            match p {
                Pauli::X => {
                    c.push(Gate::H(q))?;
                }
                Pauli::Y => {
                    c.push(Gate::Sdg(q))?;
                    c.push(Gate::H(q))?;
                }
                Pauli::I | Pauli::Z => {}
            }
        }
        Ok(c)
    }
}

/// `exp(-i theta/2 Y0 X1 X2 X3)` applied to the computational basis state
/// `reference` (qubit `q` occupied when bit `q` is set). One parameter slot.
pub fn yxxx_template(n_qubits: usize, reference: u64) -> Result<Circuit> {
    if n_qubits != 4 {
        return Err(Error::Circuit(format!(
            "the YXXX ansatz acts on exactly 4 qubits, got {n_qubits}"
        )));
    }
    if reference >> 4 != 0 {
        return Err(Error::Circuit(format!("reference {reference:#b} exceeds 4 qubits")));
    }
    let mut c = Circuit::new(4);
    for q in 0..4 {
        if reference >> q & 1 == 1 {
            c.push(Gate::X(q))?;
        }
    }
    // rotate Y0 X1 X2 X3 onto Z0 Z1 Z2 Z3
    c.push(Gate::Sdg(0))?;
    c.push(Gate::H(0))?;
    for q in 1..4 {
        c.push(Gate::H(q))?;
    }
    for q in 0..3 {
        c.push(Gate::Cnot { control: q, target: q + 1 })?;
    }
    c.push(Gate::Rz(3, Angle::Param { slot: 0, scale: 1.0 }))?;
    for q in (0..3).rev() {
        c.push(Gate::Cnot { control: q, target: q + 1 })?;
    }
    c.push(Gate::H(0))?;
    c.push(Gate::S(0))?;
    for q in 1..4 {
        c.push(Gate::H(q))?;
    }
    Ok(c)
}

pub fn build_yxxx_ansatz(theta: f64, n_qubits: usize, reference: u64) -> Result<Circuit> {
    yxxx_template(n_qubits, reference)?.bind(&[theta])
}

/// Parse a text bitstring with qubit 0 first (`"1100"` is index 3).
pub fn parse_bitstring(s: &str) -> Result<u64> {
    if s.len() > 64 {
        return Err(Error::InvalidArgument(format!("bitstring `{s}` longer than 64")));
    }
    s.chars().enumerate().try_fold(0u64, |acc, (q, ch)| match ch {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << q),
        _ => Err(Error::InvalidArgument(format!("bad bitstring `{s}`"))),
    })
}

pub fn format_bitstring(b: u64, n_qubits: usize) -> String {
    (0..n_qubits).map(|q| if b >> q & 1 == 1 { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_convention() {
        assert_eq!(parse_bitstring("1100").unwrap(), 3);
        assert_eq!(format_bitstring(3, 4), "1100");
        assert_eq!(format_bitstring(parse_bitstring("0110").unwrap(), 4), "0110");
    }

    #[test]
    fn ansatz_shape() {
        let c = yxxx_template(4, 3).unwrap();
        assert_eq!(c.n_params, 1);
        assert!(!c.is_bound());
        assert!(build_yxxx_ansatz(0.3, 4, 3).unwrap().is_bound());
        assert!(yxxx_template(6, 3).is_err());
    }

    #[test]
    fn out_of_range_gate_rejected() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::X(2)).is_err());
        assert!(c.push(Gate::Cnot { control: 1, target: 1 }).is_err());
    }
}
