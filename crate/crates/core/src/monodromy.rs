//! Direct transport of the Fuchsian system for the truncated series, and the
//! residuals of the reality conditions and of the character-variety equation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::Matrix2;
use crate::deformation::{eval_x, DerivativeSeries};
use crate::error::{Error, Result};
use crate::iterints::{PathPiece, PathSpec, DEFAULT_TOL};
use crate::ode::{integrate, OdeOptions};
use crate::potential::{eta_from_values, ModuliConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub matrix: Matrix2,
    pub lambda: Complex64,
    pub t: f64,
    pub err: f64,
    pub det_residual: f64,
}

/// Transport `d Phi = Phi eta` from `Phi = Id` along `path` for fixed parameter values.
pub fn transport_values(
    cfg: &ModuliConfig,
    x: [Complex64; 3],
    t: f64,
    path: &PathSpec,
    tol: f64,
) -> Result<(Matrix2, f64)> {
    let pts = cfg.punctures();
    path.check_clearance(&pts)?;
    let opts = OdeOptions::with_tol(tol);
    let mut phi = Matrix2::identity();
    let mut err = 0.0;
    for piece in &path.pieces {
        let y0 = phi.m.iter().flatten().cloned().collect();
        let out = integrate(
            |s, y, dy| {
                let z = piece.point(s);
                let eta = eta_from_values(&pts, x, t, z).scale(piece.velocity(s));
                let cur = Matrix2::new(y[0], y[1], y[2], y[3]);
                let d = cur * eta;
                dy.copy_from_slice(&[d.m[0][0], d.m[0][1], d.m[1][0], d.m[1][1]]);
            },
            0.0,
            1.0,
            y0,
            &opts,
        )?;
        phi = Matrix2::new(out.y[0], out.y[1], out.y[2], out.y[3]);
        err += out.err.iter().cloned().fold(0.0, f64::max);
    }
    Ok((phi, err))
}

pub fn transport(
    cfg: &ModuliConfig,
    series: &DerivativeSeries,
    t: f64,
    lambda: Complex64,
    path: &PathSpec,
) -> Result<TransportResult> {
    transport_with_tol(cfg, series, t, lambda, path, DEFAULT_TOL)
}

pub fn transport_with_tol(
    cfg: &ModuliConfig,
    series: &DerivativeSeries,
    t: f64,
    lambda: Complex64,
    path: &PathSpec,
    tol: f64,
) -> Result<TransportResult> {
    let x = eval_x(series, t, lambda)?;
    let (matrix, err) = transport_values(cfg, x, t, path, tol)?;
    let det_residual = (matrix.det() - 1.0).norm();
    Ok(TransportResult { matrix, lambda, t, err, det_residual })
}

/// The three trace functions and the Fricke traces built from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Traces {
    pub p: Complex64,
    pub q: Complex64,
    pub r: Complex64,
    pub s12: Complex64,
    pub s23: Complex64,
    pub s13: Complex64,
}

/// Trace functions of the transports to 1 (`pm`) and to i (`qm`).
pub fn traces(pm: &Matrix2, qm: &Matrix2) -> Result<Traces> {
    for (name, m) in [("P", pm), ("Q", qm)] {
        let d = (m.det() - 1.0).norm();
        if d > 1e-8 {
            return Err(Error::Precondition(format!("det {name} - 1 = {d:e}")));
        }
    }
    let (p, q) = (&pm.m, &qm.m);
    let tp = p[0][0] * p[1][0] - p[0][1] * p[1][1];
    let tq = I * (q[0][0] * q[1][0] + q[0][1] * q[1][1]);
    let sq = |z: Complex64| z * z;
    let tr = (sq(p[1][1] * q[0][0] + p[0][1] * q[1][0]) + sq(p[1][1] * q[0][1] + p[0][1] * q[1][1])
        - sq(p[1][0] * q[0][0] + p[0][0] * q[1][0])
        - sq(p[1][0] * q[0][1] + p[0][0] * q[1][1]))
        * (I * 0.5);
    let s = |z: Complex64| 2.0 - 4.0 * z * z;
    Ok(Traces { p: tp, q: tq, r: tr, s12: s(tp), s23: s(tq), s13: s(tr) })
}

/// Both factors of the character-variety equation at weight `t`.
pub fn fricke_factors(tr: &Traces, t: f64) -> (Complex64, Complex64) {
    let s = 2.0 * (2.0 * PI * t).cos();
    let base = s * s + 4.0 * (tr.p * tr.p + tr.q * tr.q + tr.r * tr.r - 1.0);
    let prod = 8.0 * tr.p * tr.q * tr.r;
    (base - prod, base + prod)
}

/// `n` points on the unit circle at half-step offsets, `e^{2 pi i (k + 1/2)/n}`.
pub fn lambda_grid(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / n as f64)).collect()
}

/// One evaluation of the trace functions at `(t, lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromySample {
    pub t: f64,
    pub lambda: Complex64,
    pub traces: Traces,
    /// `f(lambda) - conj(f(-lambda))` for f = p, q, r.
    pub reality: [Complex64; 3],
    /// `sum_j x_j(t, lambda)^2 - 1`.
    pub constraint: Complex64,
    pub fricke_q1: Complex64,
    pub fricke_q2: Complex64,
    pub det_residual: f64,
    pub err: f64,
}

/// Evaluates all trace data at each `t` and each `lambda` of the grid (plus
/// the antipodes `-lambda` needed for the reality residual).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub samples: Vec<MonodromySample>,
}

fn trace_at(
    cfg: &ModuliConfig,
    series: &DerivativeSeries,
    t: f64,
    lambda: Complex64,
    tol: f64,
) -> Result<(Traces, f64, f64)> {
    let zero = Complex64::new(0.0, 0.0);
    let a = transport_with_tol(cfg, series, t, lambda, &PathSpec::segment(zero, Complex64::new(1.0, 0.0)), tol)?;
    let b = transport_with_tol(cfg, series, t, lambda, &PathSpec::segment(zero, I), tol)?;
    Ok((traces(&a.matrix, &b.matrix)?, a.det_residual.max(b.det_residual), a.err.max(b.err)))
}

pub fn reality_residual(
    cfg: &ModuliConfig,
    series: &DerivativeSeries,
    t: f64,
    grid: &[Complex64],
) -> Result<MonodromyReport> {
    reality_residual_with_tol(cfg, series, t, grid, DEFAULT_TOL)
}

pub fn reality_residual_with_tol(
    cfg: &ModuliConfig,
    series: &DerivativeSeries,
    t: f64,
    grid: &[Complex64],
    tol: f64,
) -> Result<MonodromyReport> {
    // distinct evaluation points: the grid and its antipodes
    let mut points: Vec<Complex64> = grid.to_vec();
    let mut partner = Vec::with_capacity(grid.len());
    for &l in grid {
        match points.iter().position(|&z| (z + l).norm() < 1e-12) {
            Some(k) => partner.push(k),
            None => {
                points.push(-l);
                partner.push(points.len() - 1);
            }
        }
    }
    let evals: Vec<(Traces, f64, f64)> =
        points.par_iter().map(|&l| trace_at(cfg, series, t, l, tol)).collect::<Result<Vec<_>>>()?;
    let samples = grid
        .iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let (tr, det_res, err) = evals[k];
            let anti = evals[partner[k]].0;
            let x = eval_x(series, t, lambda)?;
            let constraint = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0;
            let (q1, q2) = fricke_factors(&tr, t);
            Ok(MonodromySample {
                t,
                lambda,
                traces: tr,
                reality: [tr.p - anti.p.conj(), tr.q - anti.q.conj(), tr.r - anti.r.conj()],
                constraint,
                fricke_q1: q1,
                fricke_q2: q2,
                det_residual: det_res,
                err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonodromyReport { samples })
}

/// `(Q1, Q2)` of a sample at weight `t`.
pub fn fricke_residual(sample: &MonodromySample, t: f64) -> (Complex64, Complex64) {
    fricke_factors(&sample.traces, t)
}

/// Maximum residual magnitudes over a grid at one t.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "fricke_Q2")]
    pub fricke_q2: f64,
    /// Smallest `|Q1|` over the grid (the factor expected not to vanish).
    #[serde(rename = "fricke_Q1_min")]
    pub fricke_q1_min: f64,
}

impl MonodromyReport {
    pub fn summary(&self) -> ResidualSummary {
        let mut s = ResidualSummary { fricke_q1_min: f64::INFINITY, ..Default::default() };
        for x in &self.samples {
            s.p = s.p.max(x.reality[0].norm());
            s.q = s.q.max(x.reality[1].norm());
            s.r = s.r.max(x.reality[2].norm());
            s.k = s.k.max(x.constraint.norm());
            s.fricke_q2 = s.fricke_q2.max(x.fricke_q2.norm());
            s.fricke_q1_min = s.fricke_q1_min.min(x.fricke_q1.norm());
        }
        s
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

/// Residual sweep over several t with per-family slopes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub t: Vec<f64>,
    pub lambda: Vec<Complex64>,
    pub per_t: Vec<ResidualSummary>,
    pub slopes: Option<ResidualSummary>,
}

impl VerifyReport {
    pub fn to_json(&self) -> serde_json::Value {
        let fam = |f: &dyn Fn(&ResidualSummary) -> f64| -> Vec<f64> { self.per_t.iter().map(f).collect() };
        let slopes = self.slopes.map(|s| json!({"p": s.p, "q": s.q, "r": s.r, "K": s.k, "fricke_Q2": s.fricke_q2}));
        json!({
            "t": self.t,
            "lambda": self.lambda.iter().map(|l| json!({"re": l.re, "im": l.im})).collect::<Vec<_>>(),
            "residuals": {
                "p": fam(&|s| s.p),
                "q": fam(&|s| s.q),
                "r": fam(&|s| s.r),
                "K": fam(&|s| s.k),
                "fricke_Q2": fam(&|s| s.fricke_q2),
                "fricke_Q1_min": fam(&|s| s.fricke_q1_min),
            },
            "slopes": slopes,
        })
    }
}

pub fn verify(
    cfg: &ModuliConfig,
    series: &DerivativeSeries,
    t_list: &[f64],
    grid: &[Complex64],
    tol: f64,
) -> Result<VerifyReport> {
    let per_t = t_list
        .iter()
        .map(|&t| reality_residual_with_tol(cfg, series, t, grid, tol).map(|r| r.summary()))
        .collect::<Result<Vec<_>>>()?;
    let positive: Vec<usize> = (0..t_list.len()).filter(|&k| t_list[k] > 0.0).collect();
    let slopes = (positive.len() >= 2).then(|| {
        let ts: Vec<f64> = positive.iter().map(|&k| t_list[k]).collect();
        let fam = |f: &dyn Fn(&ResidualSummary) -> f64| {
            let ys: Vec<f64> = positive.iter().map(|&k| f(&per_t[k])).collect();
            loglog_slope(&ts, &ys)
        };
        ResidualSummary {
            p: fam(&|s| s.p),
            q: fam(&|s| s.q),
            r: fam(&|s| s.r),
            k: fam(&|s| s.k),
            fricke_q2: fam(&|s| s.fricke_q2),
            fricke_q1_min: fam(&|s| s.fricke_q1_min),
        }
    });
    Ok(VerifyReport { t: t_list.to_vec(), lambda: grid.to_vec(), per_t, slopes })
}

/// Finite loop around `p_k` (k = 1..4) based at the origin: out along the ray,
/// once counterclockwise around a small circle, back along the ray.
pub fn lasso(cfg: &ModuliConfig, k: usize) -> Result<PathSpec> {
    if !(1..=4).contains(&k) {
        return Err(Error::Precondition(format!("puncture index {k} not in 1..=4")));
    }
    let pts = cfg.punctures();
    let pk = pts[k - 1];
    let nearest =
        pts.iter().enumerate().filter(|&(j, _)| j != k - 1).map(|(_, &q)| (q - pk).norm()).fold(pk.norm(), f64::min);
    let radius = 0.3 * nearest;
    let dir = pk / pk.norm();
    let foot = pk - dir * radius;
    let start = (-dir).arg();
    let zero = Complex64::new(0.0, 0.0);
    Ok(PathSpec::segment(zero, foot)
        .then(PathPiece::Arc { center: pk, radius, start, sweep: 2.0 * PI })
        .then(PathPiece::Segment { from: foot, to: zero }))
}

pub fn loop_monodromy(
    cfg: &ModuliConfig,
    series: &DerivativeSeries,
    t: f64,
    lambda: Complex64,
    k: usize,
) -> Result<Matrix2> {
    let path = lasso(cfg, k)?;
    Ok(transport(cfg, series, t, lambda, &path)?.matrix)
}

/// Loop relations at one `(t, lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopReport {
    pub monodromies: [Matrix2; 4],
    /// `|M1 M2 M3 M4 - Id|`
    pub product_residual: f64,
    /// `|M3 - D M1 D^-1|`
    pub symmetry_residual: f64,
    /// `|tr M1 - 2 cos(2 pi t)|`
    pub trace_residual: f64,
    /// `|tr(M1 M3) - (2 - 4 r^2)|` with r from the trace formula
    pub s13_residual: f64,
}

pub fn loop_report(cfg: &ModuliConfig, series: &DerivativeSeries, t: f64, lambda: Complex64) -> Result<LoopReport> {
    let ms: Vec<Matrix2> =
        (1..=4usize).into_par_iter().map(|k| loop_monodromy(cfg, series, t, lambda, k)).collect::<Result<Vec<_>>>()?;
    let m = [ms[0], ms[1], ms[2], ms[3]];
    let prod = m[0] * m[1] * m[2] * m[3];
    let d = Matrix2::d_sym();
    let dinv = d.inverse().expect("invertible");
    let (tr, _, _) = trace_at(cfg, series, t, lambda, DEFAULT_TOL)?;
    Ok(LoopReport {
        monodromies: m,
        product_residual: prod.dist(&Matrix2::identity()),
        symmetry_residual: m[2].dist(&(d * m[0] * dinv)),
        trace_residual: (m[0].trace() - 2.0 * (2.0 * PI * t).cos()).norm(),
        s13_residual: ((m[0] * m[2]).trace() - tr.s13).norm(),
    })
}
