//! Order-by-order construction of the t-derivatives of the parameters.
//!
//! Convention: `x_j(t) = sum_n x_j^(n) t^n / n!`, so `x[n]` holds true
//! derivatives at t = 0.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{cramer3, least_squares, pauli_word, LaurentPoly, LpMatrix2, Matrix2, Word};
use crate::error::{Error, Result};
use crate::iterints::{OmegaPair, OmegaTable, MAX_DEPTH};
use crate::potential::{residues, CentralValues, ModuliConfig, R_MIN};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Highest order `derive` accepts; the solve at order n needs words of length n+1.
pub const MAX_ORDER: usize = MAX_DEPTH - 1;

/// Pivot guard: `|u v|` relative to `r^2` below which the division step is ill-posed.
pub const PIVOT_EPS: f64 = 1e-6;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Taylor data `x[n][j]` for `n = 0..=order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeSeries {
    pub cfg: ModuliConfig,
    pub central: CentralValues,
    x: Vec<[LaurentPoly; 3]>,
}

impl DerivativeSeries {
    /// Series holding only the central values.
    pub fn central(cfg: &ModuliConfig) -> Self {
        let central = CentralValues::from_uv(cfg.u, cfg.v);
        Self { cfg: *cfg, x: vec![central.xbar.clone()], central }
    }

    pub fn order(&self) -> usize {
        self.x.len() - 1
    }

    pub fn x(&self, n: usize, j: usize) -> &LaurentPoly {
        &self.x[n][j]
    }

    pub fn order_terms(&self, n: usize) -> &[LaurentPoly; 3] {
        &self.x[n]
    }

    pub fn push(&mut self, xn: [LaurentPoly; 3]) {
        self.x.push(xn);
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.x.truncate(n + 1);
        out
    }

    /// Largest coefficient of the n-th derivative of `sum_j x_j^2 - 1`, per order.
    pub fn constraint_residuals(&self) -> Vec<f64> {
        (0..=self.order())
            .map(|n| {
                let mut k = LaurentPoly::zero();
                for j in 0..3 {
                    for a in 0..=n {
                        k += &(&self.x[a][j] * &self.x[n - a][j]).scale(re(binom(n, a)));
                    }
                }
                if n == 0 {
                    k -= &LaurentPoly::one();
                }
                k.max_abs()
            })
            .collect()
    }

    /// `(lo, hi)` of every `x_j^(n)`, indexed `[n][j]`.
    pub fn degree_ranges(&self) -> Vec<[(i32, i32); 3]> {
        self.x.iter().map(|xn| std::array::from_fn(|j| (xn[j].lo(), xn[j].hi()))).collect()
    }

    /// Checks `lo >= 0` and `deg <= n + 1` for every order `n >= 1`.
    pub fn degree_bounds_hold(&self) -> bool {
        self.x
            .iter()
            .enumerate()
            .skip(1)
            .all(|(n, xn)| xn.iter().all(|p| p.is_zero() || (p.lo() >= 0 && p.hi() <= n as i32 + 1)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let x: Vec<Vec<serde_json::Value>> = self
            .x
            .iter()
            .enumerate()
            .map(|(n, xn)| {
                xn.iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let coeffs: Vec<[f64; 2]> = p.coeffs().iter().map(|c| [c.re, c.im]).collect();
                        json!({"n": n, "j": j + 1, "lo": p.lo(), "coeffs": coeffs})
                    })
                    .collect()
            })
            .collect();
        json!({
            "config": {
                "p": [self.cfg.p.re, self.cfg.p.im],
                "u": [self.cfg.u.re, self.cfg.u.im],
                "v": [self.cfg.v.re, self.cfg.v.im],
            },
            "N": self.order(),
            "x": x,
        })
    }
}

/// Memoized t-derivatives of products `x_{w_1} ... x_{w_l}` at t = 0.
struct ProductDerivatives<'a> {
    x: &'a [[LaurentPoly; 3]],
    memo: HashMap<(Vec<u8>, usize), LaurentPoly>,
}

impl<'a> ProductDerivatives<'a> {
    fn new(x: &'a [[LaurentPoly; 3]]) -> Self {
        Self { x, memo: HashMap::new() }
    }

    fn get(&mut self, w: &[u8], k: usize) -> LaurentPoly {
        if w.is_empty() {
            return if k == 0 { LaurentPoly::one() } else { LaurentPoly::zero() };
        }
        if let Some(v) = self.memo.get(&(w.to_vec(), k)) {
            return v.clone();
        }
        let head = (w[0] - 1) as usize;
        let mut acc = LaurentPoly::zero();
        for a in 0..=k {
            let tail = self.get(&w[1..], k - a);
            if tail.is_zero() {
                continue;
            }
            acc += &(&self.x[a][head] * &tail).scale(re(binom(k, a)));
        }
        self.memo.insert((w.to_vec(), k), acc.clone());
        acc
    }
}

/// m-th t-derivative at t = 0 of the transport to the table's endpoint.
///
/// Needs `x` through order `m - 1`. With `drop_top` the single-letter words,
/// the only terms carrying `x^(m-1)`, are left out.
pub fn pq_matrix_derivative(
    series: &DerivativeSeries,
    table: &OmegaTable,
    m: usize,
    drop_top: bool,
) -> Result<LpMatrix2> {
    if m == 0 {
        return Ok(LpMatrix2::identity());
    }
    if table.depth < m {
        return Err(Error::TableDepth { have: table.depth, need: m });
    }
    let need = if drop_top { m.saturating_sub(2) } else { m - 1 };
    if series.order() < need {
        return Err(Error::Precondition(format!("series order {} too low for derivative {m}", series.order())));
    }
    let mut pd = ProductDerivatives::new(&series.x);
    let mut out = LpMatrix2::zero();
    let first = if drop_top { 2 } else { 1 };
    for l in first..=m {
        let f = factorial(m) / factorial(m - l);
        for w in Word::all(l) {
            let d = pd.get(w.letters(), m - l);
            if d.is_zero() {
                continue;
            }
            let mat = pauli_word(&w).scale(table.get(&w) * f);
            out.add_scaled(&d, &mat);
        }
    }
    Ok(out)
}

/// Closed-form first derivative of the parameters.
pub fn first_order(cv: &CentralValues, pair: &OmegaPair) -> Result<[LaurentPoly; 3]> {
    if pair.depth() < 2 {
        return Err(Error::TableDepth { have: pair.depth(), need: 2 });
    }
    let im21 = pair.one.at(&[2, 1]).im;
    let im31 = pair.i.at(&[3, 1]).im;
    let xb = &cv.xbar;
    let pos = [
        (&xb[1] * &xb[2]).pos_part().scale(I * (4.0 / PI) * (im21 + im31)),
        (&xb[0] * &xb[2]).pos_part().scale(I * (-4.0 / PI) * im31),
        (&xb[0] * &xb[1]).pos_part().scale(I * (-4.0 / PI) * im21),
    ];
    let mut x_ = re(0.0);
    let mut y_ = re(0.0);
    for j in 0..3 {
        x_ += xb[j].coeff(-1) * pos[j].coeff(1);
        y_ += xb[j].coeff(-1) * pos[j].coeff(2) + xb[j].coeff(0) * pos[j].coeff(1);
    }
    // (u, v) recovered from the central values keep this self-contained
    let rho = cv.rho;
    let r2 = cv.r2;
    let uv = xb[0].coeff(-1);
    let v2mu2 = xb[1].coeff(-1) * 2.0;
    let u2pv2_i = xb[2].coeff(-1) * 2.0;
    let diff = xb[0].coeff(0).re / rho;
    let two_re = xb[1].coeff(0).re / rho;
    let two_im = xb[2].coeff(0).re / rho;
    let pre = re(-1.0 / (rho * r2 * r2));
    let c = [
        pre * (x_ * diff - y_ * uv * (2.0 * rho)),
        pre * (x_ * two_re - y_ * v2mu2 * rho),
        pre * (x_ * two_im - y_ * u2pv2_i * rho),
    ];
    Ok(std::array::from_fn(|j| {
        let mut p = pos[j].clone();
        p += &LaurentPoly::constant(c[j]);
        LaurentPoly::new(p.lo(), p.coeffs().to_vec())
    }))
}

/// Per-order diagnostics recorded by [`derive`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DeriveDiagnostics {
    /// Residual of the linear constraint equation at each order (index n-1).
    pub equation_residuals: Vec<f64>,
}

pub fn check_derive_preconditions(cfg: &ModuliConfig, order: usize, pair: &OmegaPair) -> Result<()> {
    cfg.validate()?;
    if order > MAX_ORDER {
        return Err(Error::DepthCap(order + 1));
    }
    if pair.depth() < order + 1 {
        return Err(Error::TableDepth { have: pair.depth(), need: order + 1 });
    }
    let r2 = cfg.r2();
    if r2.sqrt() < R_MIN {
        return Err(Error::RadiusTooSmall { r: r2.sqrt(), r_min: R_MIN });
    }
    if order >= 1 && (cfg.u * cfg.v).norm() < PIVOT_EPS * r2 {
        return Err(Error::PivotDegenerate((cfg.u * cfg.v).norm()));
    }
    Ok(())
}

/// t-derivatives of the parameters through `order`.
pub fn derive(cfg: &ModuliConfig, order: usize, pair: &OmegaPair) -> Result<DerivativeSeries> {
    derive_with_diagnostics(cfg, order, pair).map(|(s, _)| s)
}

pub fn derive_with_diagnostics(
    cfg: &ModuliConfig,
    order: usize,
    pair: &OmegaPair,
) -> Result<(DerivativeSeries, DeriveDiagnostics)> {
    check_derive_preconditions(cfg, order, pair)?;
    let mut series = DerivativeSeries::central(cfg);
    let cv = series.central.clone();
    let pj: [LaurentPoly; 3] = std::array::from_fn(|j| cv.pj(j));
    let lam = LaurentPoly::lambda();
    let mut pm = vec![LpMatrix2::identity()];
    let mut qm = vec![LpMatrix2::identity()];
    let mut diag = DeriveDiagnostics::default();
    let matrix: [[Complex64; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|j| cv.coeff(j, r as i32 - 1)));

    for n in 1..=order {
        pm.push(pq_matrix_derivative(&series, &pair.one, n, false)?);
        qm.push(pq_matrix_derivative(&series, &pair.i, n, false)?);
        let pl = pq_matrix_derivative(&series, &pair.one, n + 1, true)?;
        let ql = pq_matrix_derivative(&series, &pair.i, n + 1, true)?;

        // lower parts of the two trace derivatives of order n+1
        let mut p_low = pl.get(1, 0) - pl.get(0, 1);
        let mut q_low = (ql.get(1, 0) + ql.get(0, 1)).scale(I);
        for k in 1..=n {
            let c = re(binom(n + 1, k));
            let (a, b) = (&pm[k], &pm[n + 1 - k]);
            p_low += &(a.get(0, 0) * b.get(1, 0) - a.get(0, 1) * b.get(1, 1)).scale(c);
            let (a, b) = (&qm[k], &qm[n + 1 - k]);
            q_low += &(a.get(0, 0) * b.get(1, 0) + a.get(0, 1) * b.get(1, 1)).scale(c * I);
        }
        let lin = 1.0 / (2.0 * PI * (n + 1) as f64);
        let x3p = (p_low.neg_star() - p_low.pos_part()) * lin;
        let x2p = (q_low.neg_star() - q_low.pos_part()) * lin;

        let mut k_low = LaurentPoly::zero();
        for j in 0..3 {
            for k in 1..n {
                k_low += &(series.x(k, j) * series.x(n - k, j)).scale(re(binom(n, k)));
            }
        }
        let rhs = (&lam * &k_low) * -0.5 - &pj[1] * &x2p - &pj[2] * &x3p;
        let (quot, _) = rhs.divmod(&pj[0])?;
        let x1p = quot.pos_part();
        let t1 = &pj[0] * &x1p;
        let b: [Complex64; 3] = std::array::from_fn(|r| rhs.coeff(r as i32) - t1.coeff(r as i32));
        let c = cramer3(&matrix, &b)?;

        let parts = [x1p, x2p, x3p];
        let xn: [LaurentPoly; 3] = std::array::from_fn(|j| {
            let p = &parts[j] + &LaurentPoly::constant(c[j]);
            LaurentPoly::new(p.lo(), p.coeffs().to_vec())
        });

        let lhs = &pj[0] * &xn[0] + &pj[1] * &xn[1] + &pj[2] * &xn[2] + (&lam * &k_low) * 0.5;
        let scale = 1.0f64.max(rhs.max_abs()).max(k_low.max_abs());
        let residual = lhs.max_abs() / scale;
        diag.equation_residuals.push(residual);
        if residual > 1e-8 {
            return Err(Error::OrderInconsistency { order: n, residual });
        }
        series.push(xn);
    }
    Ok((series, diag))
}

/// Truncated Taylor sum `x_j(t, lambda)`.
pub fn eval_x(series: &DerivativeSeries, t: f64, lambda: Complex64) -> Result<[Complex64; 3]> {
    if lambda == re(0.0) {
        return Err(Error::ZeroLambda);
    }
    let mut out = [re(0.0); 3];
    let mut tn = 1.0;
    for n in 0..=series.order() {
        for (j, o) in out.iter_mut().enumerate() {
            *o += series.x(n, j).eval(lambda) * tn;
        }
        tn *= t / (n + 1) as f64;
    }
    Ok(out)
}

/// t-derivatives of the three trace functions, orders `0..=order+1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDerivatives {
    pub p: Vec<LaurentPoly>,
    pub q: Vec<LaurentPoly>,
    pub r: Vec<LaurentPoly>,
}

impl TraceDerivatives {
    /// `max_n |f^(n) - star(f^(n))|` over the three families.
    pub fn star_residuals(&self) -> Vec<[f64; 3]> {
        (0..self.p.len())
            .map(|n| {
                let d = |f: &LaurentPoly| (f - &f.star()).max_abs();
                [d(&self.p[n]), d(&self.q[n]), d(&self.r[n])]
            })
            .collect()
    }
}

/// Truncated t-series with Laurent coefficients, stored normalized (`a_n = f^(n)/n!`).
#[derive(Clone, Debug)]
struct TSeries(Vec<LaurentPoly>);

impl TSeries {
    fn mul(&self, o: &TSeries) -> TSeries {
        let n = self.0.len().min(o.0.len());
        TSeries(
            (0..n)
                .map(|k| {
                    let mut acc = LaurentPoly::zero();
                    for a in 0..=k {
                        acc += &(&self.0[a] * &o.0[k - a]);
                    }
                    acc
                })
                .collect(),
        )
    }

    fn add(&self, o: &TSeries) -> TSeries {
        TSeries(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, o: &TSeries) -> TSeries {
        TSeries(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    fn scale(&self, c: Complex64) -> TSeries {
        TSeries(self.0.iter().map(|a| a.scale(c)).collect())
    }

    fn square(&self) -> TSeries {
        self.mul(self)
    }

    fn derivatives(&self) -> Vec<LaurentPoly> {
        self.0.iter().enumerate().map(|(n, a)| a.scale(re(factorial(n)))).collect()
    }
}

/// Derivatives of the trace functions built from the full transport series,
/// up to order `series.order() + 1`.
pub fn trace_derivatives(series: &DerivativeSeries, pair: &OmegaPair) -> Result<TraceDerivatives> {
    let top = series.order() + 1;
    let build = |table: &OmegaTable| -> Result<Vec<LpMatrix2>> {
        (0..=top).map(|m| pq_matrix_derivative(series, table, m, false)).collect()
    };
    let (pm, qm) = (build(&pair.one)?, build(&pair.i)?);
    let entry = |mats: &[LpMatrix2], r: usize, c: usize| {
        TSeries(mats.iter().enumerate().map(|(n, m)| m.get(r, c).scale(re(1.0 / factorial(n)))).collect())
    };
    let p = |r, c| entry(&pm, r, c);
    let q = |r, c| entry(&qm, r, c);
    let tp = p(0, 0).mul(&p(1, 0)).sub(&p(0, 1).mul(&p(1, 1)));
    let tq = q(0, 0).mul(&q(1, 0)).add(&q(0, 1).mul(&q(1, 1))).scale(I);
    let s1 = p(1, 1).mul(&q(0, 0)).add(&p(0, 1).mul(&q(1, 0)));
    let s2 = p(1, 1).mul(&q(0, 1)).add(&p(0, 1).mul(&q(1, 1)));
    let s3 = p(1, 0).mul(&q(0, 0)).add(&p(0, 0).mul(&q(1, 0)));
    let s4 = p(1, 0).mul(&q(0, 1)).add(&p(0, 0).mul(&q(1, 1)));
    let tr = s1.square().add(&s2.square()).sub(&s3.square()).sub(&s4.square()).scale(I * 0.5);
    Ok(TraceDerivatives { p: tp.derivatives(), q: tq.derivatives(), r: tr.derivatives() })
}

/// Least-squares solution of `A' = [A, X]` with `A = A_1(xbar)`, `A' = A_1(x')`
/// and X polynomial in lambda.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaxWitness {
    pub x: LpMatrix2,
    pub residual: f64,
    pub rank: usize,
    pub unknowns: usize,
}

pub fn lax_solve(series: &DerivativeSeries) -> Result<LaxWitness> {
    lax_solve_with_degree(series, 2)
}

pub fn lax_solve_with_degree(series: &DerivativeSeries, max_deg: i32) -> Result<LaxWitness> {
    if series.order() < 1 {
        return Err(Error::Precondition("Lax witness needs the first-order terms".into()));
    }
    let a = residues(series.order_terms(0)).a[0].clone();
    let da = residues(series.order_terms(1)).a[0].clone();
    let (lo, hi) = (a.min_lo().min(0), (max_deg + a.max_hi()).max(da.max_hi()));
    let rows_per_entry = (hi - lo + 1) as usize;
    let unknowns = 4 * (max_deg as usize + 1);
    let mut mat = DMatrix::<Complex64>::zeros(4 * rows_per_entry, unknowns);
    let row = |r: usize, c: usize, deg: i32| (r * 2 + c) * rows_per_entry + (deg - lo) as usize;
    let mut col = 0;
    let mut basis = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            for d in 0..=max_deg {
                let mut e = LpMatrix2::zero();
                e.m[r][c] = LaurentPoly::monomial(d, re(1.0));
                let comm = a.commutator(&e);
                for rr in 0..2 {
                    for cc in 0..2 {
                        let p = comm.get(rr, cc);
                        for k in p.lo()..=p.hi() {
                            mat[(row(rr, cc, k), col)] = p.coeff(k);
                        }
                    }
                }
                basis.push((r, c, d));
                col += 1;
            }
        }
    }
    let mut rhs = DVector::<Complex64>::zeros(4 * rows_per_entry);
    for r in 0..2 {
        for c in 0..2 {
            let p = da.get(r, c);
            for k in p.lo()..=p.hi() {
                rhs[row(r, c, k)] = p.coeff(k);
            }
        }
    }
    let ls = least_squares(&mat, &rhs, 1e-12);
    let mut x = LpMatrix2::zero();
    for (&(r, c, d), v) in basis.iter().zip(&ls.x) {
        x.m[r][c] += &LaurentPoly::monomial(d, *v);
    }
    Ok(LaxWitness { x, residual: ls.residual, rank: ls.rank, unknowns })
}

trait DegreeSpan {
    fn min_lo(&self) -> i32;
    fn max_hi(&self) -> i32;
}

impl DegreeSpan for LpMatrix2 {
    fn min_lo(&self) -> i32 {
        self.m.iter().flatten().filter(|p| !p.is_zero()).map(|p| p.lo()).min().unwrap_or(0)
    }
    fn max_hi(&self) -> i32 {
        self.m.iter().flatten().filter(|p| !p.is_zero()).map(|p| p.hi()).max().unwrap_or(0)
    }
}

/// Value of the first t-derivative of the transport at z = endpoint, read
/// from depth-one table entries.
pub fn transport_first_derivative(cv: &CentralValues, table: &OmegaTable, lambda: Complex64) -> Matrix2 {
    let x = cv.eval(lambda);
    (0..3).fold(Matrix2::zero(), |acc, j| {
        acc + pauli_word(&Word::new(vec![j as u8 + 1]).unwrap()).scale(x[j] * table.at(&[j as u8 + 1]))
    })
}
