use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

/// Pulay DIIS on Fock matrices.
pub(super) struct Diis {
    size: usize,
    focks: VecDeque<DMatrix<f64>>,
    errors: VecDeque<DMatrix<f64>>,
}

impl Diis {
    pub fn new(size: usize) -> Self {
        Self {
            size: size.max(1),
            focks: VecDeque::new(),
            errors: VecDeque::new(),
        }
    }

    pub fn extrapolate(&mut self, fock: DMatrix<f64>, error: DMatrix<f64>) -> DMatrix<f64> {
        self.focks.push_back(fock);
        self.errors.push_back(error);
        if self.focks.len() > self.size {
            self.focks.pop_front();
            self.errors.pop_front();
        }
        while self.focks.len() >= 2 {
            if let Some(c) = self.coefficients() {
                let mut f = DMatrix::zeros(self.focks[0].nrows(), self.focks[0].ncols());
                for (ci, fi) in c.iter().zip(&self.focks) {
                    f += fi * *ci;
                }
                return f;
            }
            // ill-conditioned subspace: drop the oldest vector and retry
            self.focks.pop_front();
            self.errors.pop_front();
        }
        self.focks.back().cloned().expect("at least one stored Fock matrix")
    }

    fn coefficients(&self) -> Option<Vec<f64>> {
        let m = self.errors.len();
        let mut b = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..=i {
                let v = self.errors[i].dot(&self.errors[j]);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = DVector::zeros(m + 1);
        rhs[m] = -1.0;
        let sol = b.lu().solve(&rhs)?;
        let c: Vec<f64> = sol.iter().take(m).copied().collect();
        if c.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(c)
    }
}
