//! Circuits, exact statevector simulation and seeded shot sampling with an
//! optional readout/depolarizing noise model.
//!
//! Qubit `q` is bit `q` of every basis-state index (qubit 0 is the least
//! significant bit). Text bitstrings list qubit 0 first.

pub mod circuit;
pub mod noise;
pub mod sampling;
pub mod statevector;

pub use circuit::{
    build_yxxx_ansatz, format_bitstring, parse_bitstring, yxxx_template, Angle, Circuit, Gate,
};
pub use noise::NoiseModel;
pub use sampling::{
    derive_seed, expectation_from_distributions, expectation_from_shots, rng_from_seed,
    sample_circuit, sample_multinomial, sample_shots, Distribution, ShotTable,
};
pub use statevector::{probabilities, simulate_statevector, StateVector, MAX_QUBITS};
