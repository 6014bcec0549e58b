use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    #[default]
    Rotosolve,
    GoldenSection,
    Scan,
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub theta: f64,
    pub energy: f64,
    pub evaluations: usize,
    pub trace: Vec<(f64, f64)>,
}

/// Map into `(-pi, pi]`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Exact derivative of `a + b cos t + c sin t`.
pub fn parameter_shift_gradient(f: &mut impl FnMut(f64) -> Result<f64>, theta: f64) -> Result<f64> {
    Ok(0.5 * (f(theta + FRAC_PI_2)? - f(theta - FRAC_PI_2)?))
}

struct Recorder<'a, F> {
    f: &'a mut F,
    trace: Vec<(f64, f64)>,
}

impl<F: FnMut(f64) -> Result<f64>> Recorder<'_, F> {
    fn eval(&mut self, t: f64) -> Result<f64> {
        let e = (self.f)(t)?;
        self.trace.push((t, e));
        Ok(e)
    }
}

fn trace_text(trace: &[(f64, f64)]) -> String {
    trace
        .iter()
        .map(|(t, e)| format!("E({t:+.6})={e:.10}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Closed-form minimization of a sinusoid `a + b cos t + c sin t` from
/// three evaluations, repeated for `sweeps` passes.
pub fn rotosolve(
    f: &mut impl FnMut(f64) -> Result<f64>,
    theta0: f64,
    sweeps: usize,
    tol: f64,
) -> Result<OptimizeResult> {
    let mut r = Recorder { f, trace: Vec::new() };
    let mut theta = wrap_angle(theta0);
    let mut energy = f64::NAN;
    for _ in 0..sweeps.max(1) {
        let e0 = r.eval(theta)?;
        let ep = r.eval(theta + FRAC_PI_2)?;
        let em = r.eval(theta - FRAC_PI_2)?;
        let next = wrap_angle(theta + (ep - em).atan2(2.0 * e0 - ep - em) + PI);
        let step = wrap_angle(next - theta).abs();
        // predicted minimum of the fitted sinusoid
        let a = 0.5 * (ep + em);
        let amp = ((e0 - a).powi(2) + (0.5 * (ep - em)).powi(2)).sqrt();
        energy = a - amp;
        theta = next;
        if step < tol {
            break;
        }
    }
    if !energy.is_finite() {
        return Err(Error::Optimizer(format!("non-finite energy: {}", trace_text(&r.trace))));
    }
    let energy = r.eval(theta)?;
    Ok(OptimizeResult {
        theta,
        energy,
        evaluations: r.trace.len(),
        trace: r.trace,
    })
}

/// Golden-section search on `[a, b]`.
pub fn golden_section(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<OptimizeResult> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut r = Recorder { f, trace: Vec::new() };
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = r.eval(c)?;
    let mut fd = r.eval(d)?;
    let mut it = 0;
    while (b - a).abs() > tol {
        if it >= max_iter {
            return Err(Error::Optimizer(format!(
                "golden-section did not reach {tol:e} in {max_iter} iterations: {}",
                trace_text(&r.trace)
            )));
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = r.eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = r.eval(d)?;
        }
        it += 1;
    }
    let theta = 0.5 * (a + b);
    let energy = r.eval(theta)?;
    Ok(OptimizeResult {
        theta: wrap_angle(theta),
        energy,
        evaluations: r.trace.len(),
        trace: r.trace,
    })
}

/// Uniform grid over `(-pi, pi]` followed by golden-section refinement
/// around the best grid point.
pub fn scan(f: &mut impl FnMut(f64) -> Result<f64>, n_points: usize, tol: f64) -> Result<OptimizeResult> {
    let n = n_points.max(3);
    let h = 2.0 * PI / n as f64;
    let mut trace = Vec::with_capacity(n);
    let mut best = (0.0, f64::INFINITY);
    for k in 0..n {
        let t = -PI + h * (k as f64 + 1.0);
        let e = f(t)?;
        trace.push((t, e));
        if e < best.1 {
            best = (t, e);
        }
    }
    let mut refined = golden_section(f, best.0 - h, best.0 + h, tol, 200)?;
    trace.append(&mut refined.trace);
    refined.evaluations = trace.len();
    refined.trace = trace;
    Ok(refined)
}
