//! Dormand-Prince 5(4) with proportional-integral step control, for complex
//! state vectors on a real interval.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, max_steps: 1_000_000 }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::with_tol(1e-11)
    }
}

#[derive(Clone, Debug)]
pub struct OdeOutcome {
    pub y: Vec<Complex64>,
    /// Accumulated absolute local-error estimates, per component.
    pub err: Vec<f64>,
    pub steps: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants (Hairer-Wanner)
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Integrates `y' = f(s, y)` from `s0` to `s1`.
pub fn integrate<F>(mut f: F, s0: f64, s1: f64, y0: Vec<Complex64>, opts: &OdeOptions) -> Result<OdeOutcome>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let span = s1 - s0;
    let dir = span.signum();
    let zero = Complex64::new(0.0, 0.0);
    let mut y = y0;
    let mut err_acc = vec![0.0; n];
    let mut k: Vec<Vec<Complex64>> = vec![vec![zero; n]; 7];
    let mut tmp = vec![zero; n];
    let mut ynew = vec![zero; n];
    let mut s = s0;
    f(s, &y, &mut k[0]);

    let mut h = initial_step(&mut f, s, &y, &k[0], span, opts);
    let mut facold: f64 = 1e-4;
    let mut steps = 0;
    let mut rejected = 0;
    let mut last_rejected = false;

    while (s1 - s) * dir > 0.0 {
        if steps + rejected > opts.max_steps {
            return Err(Error::StepUnderflow { at: s });
        }
        if h.abs() < 1e-14 * span.abs().max(1.0) {
            return Err(Error::StepUnderflow { at: s });
        }
        if (s + h - s1) * dir > 0.0 {
            h = s1 - s;
        }
        let stage = |k: &[Vec<Complex64>], coef: &[f64], y: &[Complex64], out: &mut [Complex64]| {
            for i in 0..y.len() {
                let mut acc = zero;
                for (kk, &c) in k.iter().zip(coef) {
                    if c != 0.0 {
                        acc += kk[i] * c;
                    }
                }
                out[i] = y[i] + acc * h;
            }
        };
        stage(&k[..1], &[A21], &y, &mut tmp);
        f(s + C2 * h, &tmp, &mut k[1]);
        stage(&k[..2], &[A31, A32], &y, &mut tmp);
        f(s + C3 * h, &tmp, &mut k[2]);
        stage(&k[..3], &[A41, A42, A43], &y, &mut tmp);
        f(s + C4 * h, &tmp, &mut k[3]);
        stage(&k[..4], &[A51, A52, A53, A54], &y, &mut tmp);
        f(s + C5 * h, &tmp, &mut k[4]);
        stage(&k[..5], &[A61, A62, A63, A64, A65], &y, &mut tmp);
        f(s + h, &tmp, &mut k[5]);
        stage(&k[..6], &[A71, 0.0, A73, A74, A75, A76], &y, &mut ynew);
        f(s + h, &ynew, &mut k[6]);

        let mut sq = 0.0;
        for i in 0..n {
            let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * h;
            tmp[i] = e;
            let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
            sq += (e.norm() / sc).powi(2);
        }
        let err = (sq / n as f64).sqrt();
        let fac11 = err.powf(EXPO1);

        if err <= 1.0 {
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            facold = err.max(1e-4);
            for i in 0..n {
                err_acc[i] += tmp[i].norm();
            }
            s += h;
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);
            steps += 1;
            let mut hnew = h / fac;
            if last_rejected {
                hnew = hnew.abs().min(h.abs()) * dir;
            }
            last_rejected = false;
            h = hnew;
        } else {
            let fac = (fac11 / SAFE).min(1.0 / FAC_MIN);
            h /= fac;
            rejected += 1;
            last_rejected = true;
        }
    }
    Ok(OdeOutcome { y, err: err_acc, steps, rejected })
}

fn initial_step<F>(f: &mut F, s: f64, y: &[Complex64], f0: &[Complex64], span: f64, opts: &OdeOptions) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len() as f64;
    let sc = |i: usize| opts.atol + opts.rtol * y[i].norm();
    let d0 = (y.iter().enumerate().map(|(i, v)| (v.norm() / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().enumerate().map(|(i, v)| (v.norm() / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span.abs());
    let y1: Vec<Complex64> = y.iter().zip(f0).map(|(a, b)| a + b * (h0 * span.signum())).collect();
    let mut f1 = vec![Complex64::new(0.0, 0.0); y.len()];
    f(s + h0 * span.signum(), &y1, &mut f1);
    let d2 = (f1.iter().zip(f0).enumerate().map(|(i, (a, b))| ((a - b).norm() / sc(i)).powi(2)).sum::<f64>() / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span.abs()) * span.signum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let i = Complex64::i();
        let out = integrate(
            |_, y, dy| {
                dy[0] = y[0] * (1.0 + i);
            },
            0.0,
            2.0,
            vec![Complex64::new(1.0, 0.0)],
            &OdeOptions::with_tol(1e-12),
        )
        .unwrap();
        let exact = (Complex64::new(2.0, 2.0)).exp();
        assert!((out.y[0] - exact).norm() < 1e-9 * exact.norm());
    }

    #[test]
    fn backwards() {
        let out = integrate(
            |s, _, dy| {
                dy[0] = Complex64::new(s.cos(), 0.0);
            },
            1.0,
            0.0,
            vec![Complex64::new(1.0f64.sin(), 0.0)],
            &OdeOptions::with_tol(1e-12),
        )
        .unwrap();
        assert!(out.y[0].norm() < 1e-10);
    }
}
