//! McMurchie-Davidson Hermite-Gaussian machinery for primitive integrals.

use std::f64::consts::PI;

/// Boys function `F_n(t)` for `n = 0..=nmax`.
pub fn boys(nmax: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if t < 1e-14 {
        for (n, o) in out.iter_mut().enumerate() {
            *o = 1.0 / (2 * n + 1) as f64;
        }
        return out;
    }
    if t > 40.0 {
        // asymptotic upward recursion; exp(-t) terms are below 1e-17
        out[0] = 0.5 * (PI / t).sqrt();
        for n in 1..=nmax {
            out[n] = out[n - 1] * (2 * n - 1) as f64 / (2.0 * t);
        }
        return out;
    }
    // series for the highest order, positive terms only, then downward recursion
    let m = nmax as f64;
    let mut term = 1.0 / (2.0 * m + 1.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= 2.0 * t / (2.0 * m + 2.0 * k + 1.0);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
        k += 1.0;
    }
    let et = (-t).exp();
    out[nmax] = et * sum;
    for n in (0..nmax).rev() {
        out[n] = (2.0 * t * out[n + 1] + et) / (2 * n + 1) as f64;
    }
    out
}

/// Hermite expansion coefficients `E^{ij}_t` for `t = 0..=i+j` along one axis,
/// for Gaussians with exponents `a`, `b` and separation `qx = A_x - B_x`.
pub fn hermite_coefficients(i: u32, j: u32, qx: f64, a: f64, b: f64) -> Vec<f64> {
    let p = a + b;
    let mu = a * b / p;
    let (i, j) = (i as usize, j as usize);
    // table[ii][jj][t]
    let tmax = i + j + 1;
    let mut table = vec![vec![vec![0.0; tmax + 1]; j + 1]; i + 1];
    table[0][0][0] = (-mu * qx * qx).exp();
    let get = |tab: &Vec<Vec<Vec<f64>>>, ii: usize, jj: usize, t: isize| -> f64 {
        if t < 0 || t as usize > ii + jj {
            0.0
        } else {
            tab[ii][jj][t as usize]
        }
    };
    for ii in 0..=i {
        for jj in 0..=j {
            if ii == 0 && jj == 0 {
                continue;
            }
            for t in 0..=(ii + jj) {
                let ti = t as isize;
                let v = if ii > 0 {
                    (1.0 / (2.0 * p)) * get(&table, ii - 1, jj, ti - 1)
                        - (mu * qx / a) * get(&table, ii - 1, jj, ti)
                        + (t + 1) as f64 * get(&table, ii - 1, jj, ti + 1)
                } else {
                    (1.0 / (2.0 * p)) * get(&table, ii, jj - 1, ti - 1)
                        + (mu * qx / b) * get(&table, ii, jj - 1, ti)
                        + (t + 1) as f64 * get(&table, ii, jj - 1, ti + 1)
                };
                table[ii][jj][t] = v;
            }
        }
    }
    table[i][j][..=(i + j)].to_vec()
}

/// Hermite Coulomb integrals `R_{tuv}` (order 0) for all `t+u+v <= lmax`,
/// indexed as `[t][u][v]`.
pub struct HermiteCoulomb {
    lmax: usize,
    data: Vec<f64>,
}

impl HermiteCoulomb {
    pub fn new(lmax: usize, alpha: f64, pc: [f64; 3]) -> Self {
        let r2 = pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2];
        let f = boys(lmax, alpha * r2);
        let d = lmax + 1;
        // r[n][t][u][v]
        let idx = |n: usize, t: usize, u: usize, v: usize| ((n * d + t) * d + u) * d + v;
        let mut r = vec![0.0; d * d * d * d];
        let mut pow = 1.0;
        for n in 0..=lmax {
            r[idx(n, 0, 0, 0)] = pow * f[n];
            pow *= -2.0 * alpha;
        }
        // build increasing total order L = t+u+v; R^n_{tuv} needs order L-1 at n+1
        for l in 1..=lmax {
            for n in 0..=(lmax - l) {
                for t in 0..=l {
                    for u in 0..=(l - t) {
                        let v = l - t - u;
                        let val = if t > 0 {
                            let mut x = pc[0] * r[idx(n + 1, t - 1, u, v)];
                            if t > 1 {
                                x += (t - 1) as f64 * r[idx(n + 1, t - 2, u, v)];
                            }
                            x
                        } else if u > 0 {
                            let mut x = pc[1] * r[idx(n + 1, t, u - 1, v)];
                            if u > 1 {
                                x += (u - 1) as f64 * r[idx(n + 1, t, u - 2, v)];
                            }
                            x
                        } else {
                            let mut x = pc[2] * r[idx(n + 1, t, u, v - 1)];
                            if v > 1 {
                                x += (v - 1) as f64 * r[idx(n + 1, t, u, v - 2)];
                            }
                            x
                        };
                        r[idx(n, t, u, v)] = val;
                    }
                }
            }
        }
        let data = (0..d * d * d)
            .map(|k| {
                let t = k / (d * d);
                let u = (k / d) % d;
                let v = k % d;
                if t + u + v <= lmax {
                    r[idx(0, t, u, v)]
                } else {
                    0.0
                }
            })
            .collect();
        Self { lmax, data }
    }

    #[inline]
    pub fn get(&self, t: usize, u: usize, v: usize) -> f64 {
        let d = self.lmax + 1;
        self.data[(t * d + u) * d + v]
    }
}

/// Product of two primitives on centers `a_center`/`b_center`, with Hermite
/// coefficients along each axis.
#[derive(Debug, Clone)]
pub struct PrimitivePair {
    pub p: f64,
    pub center: [f64; 3],
    pub coef: f64,
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    pub ez: Vec<f64>,
}

impl PrimitivePair {
    pub fn new(
        a: f64,
        la: [u32; 3],
        ca: [f64; 3],
        b: f64,
        lb: [u32; 3],
        cb: [f64; 3],
        coef: f64,
    ) -> Self {
        let p = a + b;
        let center = [
            (a * ca[0] + b * cb[0]) / p,
            (a * ca[1] + b * cb[1]) / p,
            (a * ca[2] + b * cb[2]) / p,
        ];
        Self {
            p,
            center,
            coef,
            ex: hermite_coefficients(la[0], lb[0], ca[0] - cb[0], a, b),
            ey: hermite_coefficients(la[1], lb[1], ca[1] - cb[1], a, b),
            ez: hermite_coefficients(la[2], lb[2], ca[2] - cb[2], a, b),
        }
    }

    pub fn order(&self) -> usize {
        self.ex.len() + self.ey.len() + self.ez.len() - 3
    }
}

pub fn primitive_overlap(a: f64, la: [u32; 3], ca: [f64; 3], b: f64, lb: [u32; 3], cb: [f64; 3]) -> f64 {
    let p = a + b;
    let mut s = (PI / p).powf(1.5);
    for k in 0..3 {
        s *= hermite_coefficients(la[k], lb[k], ca[k] - cb[k], a, b)[0];
    }
    s
}

pub fn primitive_kinetic(a: f64, la: [u32; 3], ca: [f64; 3], b: f64, lb: [u32; 3], cb: [f64; 3]) -> f64 {
    let ltot = (lb[0] + lb[1] + lb[2]) as f64;
    let mut t = b * (2.0 * ltot + 3.0) * primitive_overlap(a, la, ca, b, lb, cb);
    for k in 0..3 {
        let mut up = lb;
        up[k] += 2;
        t -= 2.0 * b * b * primitive_overlap(a, la, ca, b, up, cb);
        if lb[k] >= 2 {
            let mut dn = lb;
            dn[k] -= 2;
            t -= 0.5 * (lb[k] * (lb[k] - 1)) as f64 * primitive_overlap(a, la, ca, b, dn, cb);
        }
    }
    t
}

/// `<a| 1/|r - C| |b>` summed over the Hermite expansion of the pair.
pub fn pair_coulomb(pair: &PrimitivePair, c: [f64; 3]) -> f64 {
    let pc = [
        pair.center[0] - c[0],
        pair.center[1] - c[1],
        pair.center[2] - c[2],
    ];
    let r = HermiteCoulomb::new(pair.order(), pair.p, pc);
    let mut v = 0.0;
    for (t, &et) in pair.ex.iter().enumerate() {
        for (u, &eu) in pair.ey.iter().enumerate() {
            for (w, &ev) in pair.ez.iter().enumerate() {
                v += et * eu * ev * r.get(t, u, w);
            }
        }
    }
    2.0 * PI / pair.p * v
}

/// `(ab|cd)` between two primitive pairs (coefficients not included).
pub fn pair_repulsion(ab: &PrimitivePair, cd: &PrimitivePair) -> f64 {
    let p = ab.p;
    let q = cd.p;
    let alpha = p * q / (p + q);
    let pq = [
        ab.center[0] - cd.center[0],
        ab.center[1] - cd.center[1],
        ab.center[2] - cd.center[2],
    ];
    let r = HermiteCoulomb::new(ab.order() + cd.order(), alpha, pq);
    let mut v = 0.0;
    for (t, &et) in ab.ex.iter().enumerate() {
        for (u, &eu) in ab.ey.iter().enumerate() {
            for (w, &ev) in ab.ez.iter().enumerate() {
                let e1 = et * eu * ev;
                if e1 == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for (tau, &ft) in cd.ex.iter().enumerate() {
                    for (nu, &fu) in cd.ey.iter().enumerate() {
                        for (phi, &fv) in cd.ez.iter().enumerate() {
                            let sign = if (tau + nu + phi) % 2 == 0 { 1.0 } else { -1.0 };
                            inner += sign * ft * fu * fv * r.get(t + tau, u + nu, w + phi);
                        }
                    }
                }
                v += e1 * inner;
            }
        }
    }
    2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt()) * v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boys_limits() {
        let f = boys(4, 0.0);
        assert!((f[0] - 1.0).abs() < 1e-15);
        assert!((f[2] - 0.2).abs() < 1e-15);
        // F0(t) = sqrt(pi/t)/2 erf(sqrt t); compare at t where erf ~ 1
        let f = boys(0, 50.0);
        assert!((f[0] - 0.5 * (PI / 50.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn boys_continuity_across_branch() {
        let a = boys(4, 40.0 - 1e-13);
        let b = boys(4, 40.0 + 1e-13);
        for n in 0..=4 {
            assert!((a[n] - b[n]).abs() < 1e-10 * a[n].abs(), "n={n}");
        }
    }

    #[test]
    fn boys_against_quadrature() {
        // F_n(t) = int_0^1 u^{2n} exp(-t u^2) du, Simpson with fine grid
        for &t in &[0.1, 1.3, 7.5, 22.0, 35.0] {
            let f = boys(3, t);
            for n in 0..=3 {
                let m = 20000;
                let h = 1.0 / m as f64;
                let g = |u: f64| u.powi(2 * n as i32) * (-t * u * u).exp();
                let mut s = g(0.0) + g(1.0);
                for k in 1..m {
                    let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                    s += w * g(k as f64 * h);
                }
                let q = s * h / 3.0;
                assert!((f[n] - q).abs() < 1e-11, "t={t} n={n}: {} vs {}", f[n], q);
            }
        }
    }
}
