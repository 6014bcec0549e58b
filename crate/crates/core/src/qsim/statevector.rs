use num_complex::Complex64;

use super::circuit::{Angle, Circuit, Gate};
use crate::qubitmap::Pauli;
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 20;

pub type StateVector = Vec<Complex64>;

pub fn zero_state(n_qubits: usize) -> StateVector {
    let mut s = vec![Complex64::default(); 1 << n_qubits];
    s[0] = Complex64::new(1.0, 0.0);
    s
}

pub(crate) fn apply_gate(state: &mut [Complex64], g: &Gate) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match *g {
        Gate::X(q) => {
            let m = 1 << q;
            for b in 0..state.len() {
                if b & m == 0 {
                    state.swap(b, b | m);
                }
            }
        }
        Gate::H(q) => {
            let m = 1 << q;
            for b in 0..state.len() {
                if b & m == 0 {
                    let (a0, a1) = (state[b], state[b | m]);
                    state[b] = (a0 + a1) * r;
                    state[b | m] = (a0 - a1) * r;
                }
            }
        }
        Gate::S(q) => phase_one(state, q, Complex64::new(0.0, 1.0)),
        Gate::Sdg(q) => phase_one(state, q, Complex64::new(0.0, -1.0)),
        Gate::Rz(q, Angle::Fixed(t)) => {
            let m = 1 << q;
            let lo = Complex64::from_polar(1.0, -t / 2.0);
            let hi = Complex64::from_polar(1.0, t / 2.0);
            for (b, a) in state.iter_mut().enumerate() {
                *a *= if b & m == 0 { lo } else { hi };
            }
        }
        Gate::Rz(_, Angle::Param { .. }) => unreachable!("unbound parameter reached the simulator"),
        Gate::Cnot { control, target } => {
            let (c, t) = (1 << control, 1 << target);
            for b in 0..state.len() {
                if b & c != 0 && b & t == 0 {
                    state.swap(b, b | t);
                }
            }
        }
    }
}

fn phase_one(state: &mut [Complex64], q: usize, ph: Complex64) {
    let m = 1 << q;
    for (b, a) in state.iter_mut().enumerate() {
        if b & m != 0 {
            *a *= ph;
        }
    }
}

/// Apply a single-qubit Pauli (used for error insertion).
pub(crate) fn apply_pauli(state: &mut [Complex64], q: usize, p: Pauli) {
    match p {
        Pauli::I => {}
        Pauli::X => apply_gate(state, &Gate::X(q)),
        Pauli::Z => phase_one(state, q, Complex64::new(-1.0, 0.0)),
        Pauli::Y => {
            // Y = i X Z
            phase_one(state, q, Complex64::new(-1.0, 0.0));
            apply_gate(state, &Gate::X(q));
            for a in state.iter_mut() {
                *a *= Complex64::new(0.0, 1.0);
            }
        }
    }
}

pub fn check_circuit(circ: &Circuit) -> Result<()> {
    if circ.n_qubits > MAX_QUBITS {
        return Err(Error::Circuit(format!(
            "{} qubits exceeds the {MAX_QUBITS}-qubit statevector limit",
            circ.n_qubits
        )));
    }
    if !circ.is_bound() {
        return Err(Error::Circuit("circuit has unbound parameters".into()));
    }
    Ok(())
}

/// Final state from `|0...0>`; qubit `q` is bit `q` of the amplitude index.
pub fn simulate_statevector(circ: &Circuit) -> Result<StateVector> {
    check_circuit(circ)?;
    let mut s = zero_state(circ.n_qubits);
    for g in &circ.gates {
        apply_gate(&mut s, g);
    }
    Ok(s)
}

pub fn probabilities(state: &[Complex64]) -> Vec<f64> {
    state.iter().map(|a| a.norm_sqr()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::circuit::{build_yxxx_ansatz, Circuit};

    #[test]
    fn textbook_states() {
        let c = Circuit::new(2);
        let s = simulate_statevector(&c).unwrap();
        assert_eq!(s[0], Complex64::new(1.0, 0.0));
        let mut c = Circuit::new(2);
        c.push(Gate::X(0)).unwrap();
        assert_eq!(simulate_statevector(&c).unwrap()[1], Complex64::new(1.0, 0.0));
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        let s = simulate_statevector(&c).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (a, e) in s.iter().zip([r, 0.0, 0.0, r]) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn oversized_register_rejected() {
        assert!(simulate_statevector(&Circuit::new(21)).is_err());
    }

    #[test]
    fn yxxx_closed_form() {
        // exp(-i t/2 Y0X1X2X3)|1100> = cos(t/2)|1100> - sin(t/2)|0011>
        for &t in &[0.0, 0.4, -1.3, 2.9] {
            let s = simulate_statevector(&build_yxxx_ansatz(t, 4, 3).unwrap()).unwrap();
            let mut expect = vec![Complex64::default(); 16];
            expect[3] = Complex64::new((t / 2.0).cos(), 0.0);
            expect[12] = Complex64::new(-(t / 2.0).sin(), 0.0);
            let err: f64 = s.iter().zip(&expect).map(|(a, b)| (a - b).norm()).sum();
            assert!(err < 1e-12, "theta={t}: {s:?}");
        }
    }

    #[test]
    fn pauli_y_matches_matrix() {
        let mut s = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        apply_pauli(&mut s, 0, Pauli::Y);
        // Y (a, b) = (-i b, i a)
        assert!((s[0] - Complex64::new(0.8, 0.0)).norm() < 1e-15);
        assert!((s[1] - Complex64::new(0.0, 0.6)).norm() < 1e-15);
    }
}
