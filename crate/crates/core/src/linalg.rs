//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

/// Dense four-index tensor in chemists' notation, `(pq|rs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eri {
    n: usize,
    data: Vec<f64>,
}

impl Eri {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    /// Wrap a row-major `n^4` buffer.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n * n * n, "buffer length must be n^4");
        Self { n, data }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[self.index(p, q, r, s)]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let i = self.index(p, q, r, s);
        self.data[i] = v;
    }

    /// Store `v` at all eight permutationally equivalent positions.
    pub fn set_sym8(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.set(a, b, c, d, v);
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Transform all four indices with the columns of `c` (`n x m`).
    pub fn transform(&self, c: &DMatrix<f64>) -> Eri {
        assert_eq!(c.nrows(), self.n, "transform matrix rows must match tensor dimension");
        let n = self.n;
        let m = c.ncols();
        // (pq|rs) -> (aq|rs) -> (ab|rs) -> (ab|cs) -> (ab|cd), one index at a time.
        let mut t1 = vec![0.0; m * n * n * n];
        for a in 0..m {
            for p in 0..n {
                let cpa = c[(p, a)];
                if cpa == 0.0 {
                    continue;
                }
                let src = &self.data[p * n * n * n..(p + 1) * n * n * n];
                let dst = &mut t1[a * n * n * n..(a + 1) * n * n * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += cpa * s;
                }
            }
        }
        let mut t2 = vec![0.0; m * m * n * n];
        for a in 0..m {
            for b in 0..m {
                let dst = (a * m + b) * n * n;
                for q in 0..n {
                    let cqb = c[(q, b)];
                    if cqb == 0.0 {
                        continue;
                    }
                    let src = (a * n + q) * n * n;
                    for k in 0..n * n {
                        t2[dst + k] += cqb * t1[src + k];
                    }
                }
            }
        }
        drop(t1);
        let mut t3 = vec![0.0; m * m * m * n];
        for ab in 0..m * m {
            for cc in 0..m {
                let dst = (ab * m + cc) * n;
                for r in 0..n {
                    let crc = c[(r, cc)];
                    if crc == 0.0 {
                        continue;
                    }
                    let src = (ab * n + r) * n;
                    for s in 0..n {
                        t3[dst + s] += crc * t2[src + s];
                    }
                }
            }
        }
        drop(t2);
        let mut out = Eri::zeros(m);
        for abc in 0..m * m * m {
            for d in 0..m {
                let mut acc = 0.0;
                for s in 0..n {
                    acc += c[(s, d)] * t3[abc * n + s];
                }
                out.data[abc * m + d] = acc;
            }
        }
        out
    }

    /// Largest deviation from 8-fold permutational symmetry.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.n;
        let mut err: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.get(p, q, r, s);
                        err = err
                            .max((v - self.get(q, p, r, s)).abs())
                            .max((v - self.get(p, q, s, r)).abs())
                            .max((v - self.get(r, s, p, q)).abs());
                    }
                }
            }
        }
        err
    }

    /// Reorder every index by `perm` (new index `i` takes old index `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Eri {
        let n = self.n;
        let mut out = Eri::zeros(n);
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        out.set(p, q, r, s, self.get(perm[p], perm[q], perm[r], perm[s]));
                    }
                }
            }
        }
        out
    }
}

/// Coulomb and exchange matrices for a (spin-summed or per-spin) density `d`:
/// `J_pq = sum_rs (pq|rs) d_rs`, `K_pq = sum_rs (pr|qs) d_rs`.
pub fn coulomb_exchange(eri: &Eri, d: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = eri.dim();
    let mut j = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..=p {
            let mut jv = 0.0;
            let mut kv = 0.0;
            for r in 0..n {
                for s in 0..n {
                    let drs = d[(r, s)];
                    jv += eri.get(p, q, r, s) * drs;
                    kv += eri.get(p, r, q, s) * drs;
                }
            }
            j[(p, q)] = jv;
            j[(q, p)] = jv;
            k[(p, q)] = kv;
            k[(q, p)] = kv;
        }
    }
    (j, k)
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending and a
/// deterministic sign for each eigenvector (largest component positive).
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vals = DVector::zeros(n);
    let mut vecs = DMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vals[new] = eig.eigenvalues[old];
        let mut col = eig.eigenvectors.column(old).clone_owned();
        let mut imax = 0;
        for i in 0..n {
            if col[i].abs() > col[imax].abs() + 1e-12 {
                imax = i;
            }
        }
        if col[imax] < 0.0 {
            col.neg_mut();
        }
        vecs.set_column(new, &col);
    }
    (vals, vecs)
}

/// `f(A)` for a symmetric matrix via its eigendecomposition.
pub fn sym_matrix_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let fvals = DMatrix::from_diagonal(&vals.map(f));
    &vecs * fvals * vecs.transpose()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, &b| a.max(b.abs()))
}

pub fn symmetry_error(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// Sub-matrix picking `rows` x `cols`.
pub fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Spin-summed two-particle density matrix (chemists' index order) of a
/// single determinant with spin-summed one-particle density `d`.
pub fn mean_field_rdm2(d: &DMatrix<f64>) -> Vec<f64> {
    let n = d.nrows();
    let mut out = vec![0.0; n * n * n * n];
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    out[((p * n + q) * n + r) * n + s] =
                        d[(p, q)] * d[(r, s)] - 0.5 * d[(p, s)] * d[(r, q)];
                }
            }
        }
    }
    out
}
