//! Dormand–Prince 5(4) stepper over plain `f64` vectors.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One step from (t, y) with f(t, y) = `k1`. Returns the fifth-order
/// solution, its derivative (FSAL) and the embedded error vector.
pub fn step<F>(f: &F, t: f64, y: &[f64], k1: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(k1.to_vec());
    let mut y_new = Vec::new();
    for s in 1..7 {
        let ys: Vec<f64> =
            (0..n).map(|i| y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()).collect();
        let ks = f(t + C[s] * h, &ys)?;
        if ks.len() != n {
            return Err(Error::Arity { what: "derivative components", expected: n, got: ks.len() });
        }
        k.push(ks);
        if s == 6 {
            y_new = ys;
        }
    }
    let err = (0..n).map(|i| h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>()).collect();
    let fsal = k.pop().expect("seven stages");
    Ok((y_new, fsal, err))
}

/// `steps` fixed steps of size `h`.
pub fn fixed_steps<F>(f: &F, t0: f64, y0: &[f64], h: f64, steps: usize) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let mut y = y0.to_vec();
    let mut k1 = f(t0, &y)?;
    for i in 0..steps {
        let (y1, k, _) = step(f, t0 + i as f64 * h, &y, &k1, h)?;
        y = y1;
        k1 = k;
    }
    Ok(y)
}

/// RMS norm of `err` against `atol + rtol·max(|y0|, |y1|)`.
pub fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    if err.is_empty() {
        return 0.0;
    }
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

/// PI step-size controller.
#[derive(Clone, Debug)]
pub struct Controller {
    err_old: f64,
}

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

impl Default for Controller {
    fn default() -> Self {
        Controller { err_old: 1e-4 }
    }
}

impl Controller {
    /// Next step size after an accepted step with error norm `err` ≤ 1.
    pub fn accept(&mut self, h: f64, err: f64) -> f64 {
        let fac = err.powf(EXPO) / self.err_old.powf(BETA) / SAFETY;
        self.err_old = err.max(1e-4);
        h / fac.clamp(1.0 / MAX_FACTOR, 1.0 / MIN_FACTOR)
    }

    pub fn reject(&self, h: f64, err: f64) -> f64 {
        let fac = err.powf(EXPO) / SAFETY;
        h / fac.min(1.0 / MIN_FACTOR)
    }
}

/// Initial step guess from the size of y and f(t0, y0).
pub fn initial_step(y: &[f64], f0: &[f64], rtol: f64, atol: f64, span: f64) -> f64 {
    let sc = |v: f64| atol + rtol * v.abs();
    let d0 = (y.iter().map(|v| (v / sc(*v)).powi(2)).sum::<f64>() / y.len().max(1) as f64).sqrt();
    let d1 = (f0.iter().zip(y).map(|(d, v)| (d / sc(*v)).powi(2)).sum::<f64>() / y.len().max(1) as f64).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span.abs()).max(1e-12)
}

/// y'' = −25(y − t²) + 2, with exact solution y = sin 5t + t².
fn manufactured(t: f64, y: &[f64]) -> Result<Vec<f64>> {
    Ok(vec![y[1], -25.0 * (y[0] - t * t) + 2.0])
}

fn manufactured_exact(t: f64) -> [f64; 2] {
    [(5.0 * t).sin() + t * t, 5.0 * (5.0 * t).cos() + 2.0 * t]
}

/// Global error at t = 2 of fixed-step integration of a manufactured
/// problem, for each step size.
pub fn manufactured_errors(hs: &[f64]) -> Vec<(f64, f64)> {
    let t1 = 2.0;
    hs.iter()
        .map(|&h| {
            let n = (t1 / h).round() as usize;
            let y = fixed_steps(&manufactured, 0.0, &manufactured_exact(0.0), t1 / n as f64, n)
                .expect("manufactured problem is smooth");
            let e = manufactured_exact(t1);
            (h, (y[0] - e[0]).abs().max((y[1] - e[1]).abs()))
        })
        .collect()
}

/// Least-squares slope of log error against log h.
pub fn order_slope(hs: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = manufactured_errors(hs).into_iter().map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
