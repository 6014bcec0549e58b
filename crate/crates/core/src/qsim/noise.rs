use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Readout bit flips plus depolarizing errors after every gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// `p(read 1 | prepared 0)`.
    pub p1_given_0: f64,
    /// `p(read 0 | prepared 1)`.
    pub p0_given_1: f64,
    /// Per-qubit `(p1_given_0, p0_given_1)` overrides.
    #[serde(default)]
    pub readout_overrides: BTreeMap<usize, (f64, f64)>,
    pub depol_1q: f64,
    pub depol_2q: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            p1_given_0: 0.0,
            p0_given_1: 0.0,
            readout_overrides: BTreeMap::new(),
            depol_1q: 0.0,
            depol_2q: 0.0,
        }
    }

    pub fn readout_only(p1_given_0: f64, p0_given_1: f64) -> Self {
        Self {
            p1_given_0,
            p0_given_1,
            ..Self::noiseless()
        }
    }

    /// `"noiseless"` or `"nisq-2021"`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "noiseless" | "none" => Ok(Self::noiseless()),
            "nisq-2021" => Ok(Self {
                p1_given_0: 0.02,
                p0_given_1: 0.03,
                readout_overrides: BTreeMap::new(),
                depol_1q: 1e-3,
                depol_2q: 1e-2,
            }),
            other => Err(Error::Config(format!("unknown noise preset `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = vec![self.p1_given_0, self.p0_given_1, self.depol_1q, self.depol_2q];
        for &(a, b) in self.readout_overrides.values() {
            all.push(a);
            all.push(b);
        }
        if let Some(bad) = all.iter().find(|p| !(0.0..=0.5).contains(*p)) {
            return Err(Error::InvalidArgument(format!(
                "noise probability {bad} outside [0, 0.5]"
            )));
        }
        Ok(())
    }

    pub fn readout(&self, q: usize) -> (f64, f64) {
        self.readout_overrides
            .get(&q)
            .copied()
            .unwrap_or((self.p1_given_0, self.p0_given_1))
    }

    pub fn has_gate_noise(&self) -> bool {
        self.depol_1q > 0.0 || self.depol_2q > 0.0
    }

    pub fn is_noiseless(&self) -> bool {
        !self.has_gate_noise()
            && self.p1_given_0 == 0.0
            && self.p0_given_1 == 0.0
            && self.readout_overrides.values().all(|&(a, b)| a == 0.0 && b == 0.0)
    }

    /// Compact identifier recorded with every shot table.
    pub fn fingerprint(&self) -> String {
        let mut s = format!(
            "ro={}/{};d1={};d2={}",
            self.p1_given_0, self.p0_given_1, self.depol_1q, self.depol_2q
        );
        for (q, (a, b)) in &self.readout_overrides {
            s.push_str(&format!(";ro{q}={a}/{b}"));
        }
        s
    }

    /// Apply the readout channel exactly to a probability vector.
    pub fn apply_readout(&self, probs: &[f64], n_qubits: usize) -> Vec<f64> {
        let mut p = probs.to_vec();
        for q in 0..n_qubits {
            let (p10, p01) = self.readout(q);
            if p10 == 0.0 && p01 == 0.0 {
                continue;
            }
            let m = 1 << q;
            for b in 0..p.len() {
                if b & m == 0 {
                    let (a0, a1) = (p[b], p[b | m]);
                    p[b] = (1.0 - p10) * a0 + p01 * a1;
                    p[b | m] = p10 * a0 + (1.0 - p01) * a1;
                }
            }
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        let n = NoiseModel::preset("nisq-2021").unwrap();
        assert_eq!((n.p1_given_0, n.p0_given_1, n.depol_1q, n.depol_2q), (0.02, 0.03, 1e-3, 1e-2));
        n.validate().unwrap();
        assert!(NoiseModel::preset("lab").is_err());
    }

    #[test]
    fn out_of_range_probability() {
        let mut n = NoiseModel::noiseless();
        n.depol_2q = 0.7;
        assert!(n.validate().is_err());
    }

    #[test]
    fn readout_channel_on_zero_state() {
        let n = NoiseModel::readout_only(0.1, 0.0);
        let p = n.apply_readout(&[1.0, 0.0, 0.0, 0.0], 2);
        let expect = [0.81, 0.09, 0.09, 0.01];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
