//! Geometry at and near the origin of the weight: the twisted holomorphic
//! symplectic form and its weight derivatives, the Eguchi-Hanson limit, the
//! energy series, the weight-zero Hodge maps and the polylogarithm identities.
//!
//! All 4x4 objects use the ordered frame `(u, ubar, v, vbar)`.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{LaurentPoly, Matrix2};
use crate::deformation::{derive, DerivativeSeries};
use crate::error::{Error, Result};
use crate::iterints::{zeta3, OmegaPair};
use crate::potential::{central_gradient, ModuliConfig};

type C = Complex64;
const I: C = Complex64::new(0.0, 1.0);
const ZERO: C = Complex64::new(0.0, 0.0);

pub const U: usize = 0;
pub const UB: usize = 1;
pub const V: usize = 2;
pub const VB: usize = 3;

/// Default finite-difference step in the real coordinates of `(u, v)`.
pub const FD_STEP: f64 = 1e-3;
/// Highest lambda-degree kept in the twisted-form series.
pub const KMAX: i32 = 4;

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// Complex conjugation on frame indices: u <-> ubar, v <-> vbar.
const CONJ_INDEX: [usize; 4] = [UB, U, VB, V];

/// A complex 2-form, stored as `M[a][b] = w(d_a, d_b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoForm4 {
    pub m: Matrix4<C>,
}

impl TwoForm4 {
    pub fn zero() -> Self {
        Self { m: Matrix4::zeros() }
    }

    /// Sum of `c * dx_a ^ dx_b` over the given triples.
    pub fn from_terms(terms: &[(usize, usize, C)]) -> Self {
        let mut w = Self::zero();
        for &(a, b, c) in terms {
            w.m[(a, b)] += c;
            w.m[(b, a)] -= c;
        }
        w
    }

    pub fn coeff(&self, a: usize, b: usize) -> C {
        self.m[(a, b)]
    }

    pub fn contract(&self, x: &[C; 4], y: &[C; 4]) -> C {
        (Vector4::from(*x).transpose() * self.m * Vector4::from(*y))[(0, 0)]
    }

    pub fn scale(&self, s: C) -> Self {
        Self { m: self.m * s }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (self.m - other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        (self.m + self.m.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M[conj a][conj b] - conj M[a][b]|`; zero for a real form.
    pub fn reality_residual(&self) -> f64 {
        Matrix4::from_fn(|a, b| self.m[(CONJ_INDEX[a], CONJ_INDEX[b])] - self.m[(a, b)].conj())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Pullback to the line `v = p u`, as the coefficient of `du ^ dubar`.
    pub fn restrict_to_line(&self, p: C) -> C {
        self.m[(U, UB)] + p.conj() * self.m[(U, VB)] + p * self.m[(V, UB)] + p.norm_sqr() * self.m[(V, VB)]
    }

    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        rows(&self.m)
    }
}

impl std::ops::Add for TwoForm4 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { m: self.m + o.m }
    }
}

impl std::ops::Sub for TwoForm4 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { m: self.m - o.m }
    }
}

fn rows(m: &Matrix4<C>) -> Vec<Vec<[f64; 2]>> {
    (0..4).map(|a| (0..4).map(|b| [m[(a, b)].re, m[(a, b)].im]).collect()).collect()
}

/// A linear operator on the tangent frame, acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame4Operator {
    pub m: Matrix4<C>,
}

impl Frame4Operator {
    pub fn identity() -> Self {
        Self { m: Matrix4::identity() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: self.m * other.m }
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (self.m - other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `|X^2 + Id|`
    pub fn complex_structure_residual(&self) -> f64 {
        (self.m * self.m + Matrix4::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        rows(&self.m)
    }
}

/// Weight-zero coefficients of the twisted form and the three Kahler forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistedFormT0 {
    /// lambda^-1, lambda^0, lambda^1 coefficients
    pub coeffs: [TwoForm4; 3],
    pub omega_i: TwoForm4,
    pub omega_j: TwoForm4,
    pub omega_k: TwoForm4,
}

fn rho_r6(u: C, v: C) -> (f64, f64) {
    let r2 = u.norm_sqr() + v.norm_sqr();
    (-(1.0 + 1.0 / (r2 * r2)).sqrt(), r2 * r2 * r2)
}

fn check_nonzero(u: C, v: C) -> Result<()> {
    if u.norm_sqr() + v.norm_sqr() == 0.0 {
        return Err(Error::Precondition("(u, v) = 0".into()));
    }
    Ok(())
}

pub fn twisted_form_t0(u: C, v: C) -> Result<TwistedFormT0> {
    check_nonzero(u, v)?;
    let (rho, r6) = rho_r6(u, v);
    let s = I * (32.0 * PI / (rho * r6));
    let omega_i = TwoForm4::from_terms(&[
        (U, UB, s * (r6 + v.norm_sqr())),
        (U, VB, -s * u.conj() * v),
        (UB, V, s * u * v.conj()),
        (V, VB, s * (r6 + u.norm_sqr())),
    ]);
    let omega_j = TwoForm4::from_terms(&[(U, V, I * (-32.0 * PI)), (UB, VB, I * (32.0 * PI))]);
    let omega_k = TwoForm4::from_terms(&[(U, V, c(-32.0 * PI)), (UB, VB, c(-32.0 * PI))]);
    let coeffs = [omega_j + omega_k.scale(I), omega_i.scale(c(-2.0)), (omega_j - omega_k.scale(I)).scale(c(-1.0))];
    Ok(TwistedFormT0 { coeffs, omega_i, omega_j, omega_k })
}

/// Constant lambda-coefficient of the twisted form, assembled from the
/// gradients of the central parameter values.
pub fn twisted_form0_from_central(u: C, v: C) -> Result<TwoForm4> {
    check_nonzero(u, v)?;
    let g = central_gradient(u, v);
    let x1m = u * v;
    if x1m.norm() < 1e-12 {
        return Err(Error::EnergyDegenerate);
    }
    let (rho, _) = rho_r6(u, v);
    let x10 = c(rho * (u.norm_sqr() - v.norm_sqr()));
    // gradient vectors of the coefficients involved, indexed by frame
    let d = |j: usize, k: i32| -> [C; 4] { std::array::from_fn(|a| g[a][j][(k + 1) as usize]) };
    let wedge = |x: [C; 4], y: [C; 4]| {
        let mut w = TwoForm4::zero();
        for a in 0..4 {
            for b in 0..4 {
                w.m[(a, b)] = x[a] * y[b] - x[b] * y[a];
            }
        }
        w
    };
    let (d2m, d3m, d20, d30) = (d(1, -1), d(2, -1), d(1, 0), d(2, 0));
    let w = wedge(d2m, d3m).scale(-x10 / x1m) + wedge(d20, d3m) + wedge(d2m, d30);
    Ok(w.scale(c(32.0 * PI) / x1m))
}

/// The Eguchi-Hanson Gram `G[a][b] = g(d_a, d_b)` and the three complex structures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EhMetric {
    pub gram: Frame4Operator,
    pub i: Frame4Operator,
    pub j: Frame4Operator,
    pub k: Frame4Operator,
}

/// Residuals of the quaternion relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuaternionChecks {
    pub i2: f64,
    pub j2: f64,
    pub k2: f64,
    pub ij_minus_k: f64,
}

impl QuaternionChecks {
    pub fn max(&self) -> f64 {
        self.i2.max(self.j2).max(self.k2).max(self.ij_minus_k)
    }
}

pub fn eh_metric(u: C, v: C) -> Result<EhMetric> {
    check_nonzero(u, v)?;
    let (rho, r6) = rho_r6(u, v);
    let r2 = u.norm_sqr() + v.norm_sqr();
    let pre = 32.0 * PI * (1.0 + 1.0 / (r2 * r2)).sqrt();
    let q = 1.0 / (r2 * (1.0 + r2 * r2));
    let mut g = Matrix4::zeros();
    let mut sym = |a: usize, b: usize, z: C| {
        g[(a, b)] += z;
        g[(b, a)] += z;
    };
    sym(U, UB, c(pre * (1.0 - q * u.norm_sqr())));
    sym(V, VB, c(pre * (1.0 - q * v.norm_sqr())));
    sym(U, VB, -u.conj() * v * (pre * q));
    sym(V, UB, -u * v.conj() * (pre * q));

    let i_op = Matrix4::from_diagonal(&Vector4::new(I, -I, I, -I));
    // the off-diagonal block in the order (u, v, ubar, vbar)
    let nb = [[-u * v.conj(), c(r6 + u.norm_sqr())], [c(-r6 - v.norm_sqr()), u.conj() * v]];
    let block = |pref: C, lower_sign: f64| {
        let mut b = Matrix4::zeros();
        for r in 0..2 {
            for s in 0..2 {
                b[(r, s + 2)] = pref * nb[r][s];
                b[(r + 2, s)] = pref * nb[r][s].conj() * lower_sign;
            }
        }
        // to the frame order (u, ubar, v, vbar)
        const POS: [usize; 4] = [0, 2, 1, 3];
        Matrix4::from_fn(|a, b2| b[(POS[a], POS[b2])])
    };
    let j_op = block(-I / (rho * r6), -1.0);
    let k_op = block(c(1.0 / (rho * r6)), 1.0);
    Ok(EhMetric {
        gram: Frame4Operator { m: g },
        i: Frame4Operator { m: i_op },
        j: Frame4Operator { m: j_op },
        k: Frame4Operator { m: k_op },
    })
}

impl EhMetric {
    pub fn checks(&self) -> QuaternionChecks {
        QuaternionChecks {
            i2: self.i.complex_structure_residual(),
            j2: self.j.complex_structure_residual(),
            k2: self.k.complex_structure_residual(),
            ij_minus_k: self.i.compose(&self.j).dist(&self.k),
        }
    }

    /// Eigenvalues of the Gram in the real coordinates `(Re u, Im u, Re v, Im v)`,
    /// together with the largest imaginary part encountered.
    pub fn real_eigenvalues(&self) -> ([f64; 4], f64) {
        let mut t = Matrix4::<C>::zeros();
        t[(U, 0)] = c(1.0);
        t[(UB, 0)] = c(1.0);
        t[(U, 1)] = I;
        t[(UB, 1)] = -I;
        t[(V, 2)] = c(1.0);
        t[(VB, 2)] = c(1.0);
        t[(V, 3)] = I;
        t[(VB, 3)] = -I;
        let gr = t.transpose() * self.gram.m * t;
        let imag = gr.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let real = gr.map(|z| z.re);
        let mut ev: Vec<f64> = SymmetricEigen::new(real).eigenvalues.iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        ([ev[0], ev[1], ev[2], ev[3]], imag)
    }
}

/// Gram recovered from a Kahler form and its complex structure: `G = -W X`.
pub fn gram_from_form(w: &TwoForm4, x: &Frame4Operator) -> Frame4Operator {
    Frame4Operator { m: -(w.m * x.m) }
}

/// Complex structure recovered from a Kahler form and the Gram: `X = -W^-1 G`.
pub fn structure_from_form(w: &TwoForm4, gram: &Frame4Operator) -> Result<Frame4Operator> {
    let inv = w.m.try_inverse().ok_or(Error::Singular { det: w.m.determinant() })?;
    Ok(Frame4Operator { m: -(inv * gram.m) })
}

/// Weight derivatives `d^m/dt^m` of the lambda-coefficients of the twisted form.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedFormSeries {
    pub order: usize,
    pub step: f64,
    /// `forms[m][k + 1]` for `k = -1..=KMAX`
    pub forms: Vec<Vec<TwoForm4>>,
}

impl TwistedFormSeries {
    pub fn get(&self, m: usize, k: i32) -> &TwoForm4 {
        &self.forms[m][(k + 1) as usize]
    }
}

/// Derivatives of `x_j^{(n)}/n!` in the frame directions, `out[a][n][j]`.
fn frame_derivatives(
    cfg: &ModuliConfig,
    order: usize,
    h: f64,
    pair: &OmegaPair,
) -> Result<(DerivativeSeries, Vec<Vec<[LaurentPoly; 3]>>)> {
    let base = derive(cfg, order, pair)?;
    let dirs = [(c(1.0), ZERO), (I, ZERO), (ZERO, c(1.0)), (ZERO, I)];
    let offsets = [-2.0, -1.0, 1.0, 2.0];
    let jobs: Vec<(usize, usize)> = (0..4).flat_map(|d| (0..4).map(move |o| (d, o))).collect();
    let shifted: Vec<DerivativeSeries> = jobs
        .par_iter()
        .map(|&(d, o)| {
            let (du, dv) = dirs[d];
            let s = offsets[o] * h;
            derive(&cfg.with_uv(cfg.u + du * s, cfg.v + dv * s), order, pair)
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = [1.0, -8.0, 8.0, -1.0];
    let mut fact = 1.0;
    let mut norm = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n > 0 {
            fact *= n as f64;
        }
        norm.push(1.0 / fact);
    }
    // real directional derivatives, then Wirtinger recombination
    let real: Vec<Vec<[LaurentPoly; 3]>> = (0..4)
        .map(|d| {
            (0..=order)
                .map(|n| {
                    std::array::from_fn(|j| {
                        let mut acc = LaurentPoly::zero();
                        for o in 0..4 {
                            acc += &shifted[4 * d + o].x(n, j).scale(c(weights[o] * norm[n] / (12.0 * h)));
                        }
                        acc
                    })
                })
                .collect()
        })
        .collect();
    let wirt = |a: usize, sign: f64| -> Vec<[LaurentPoly; 3]> {
        (0..=order)
            .map(|n| std::array::from_fn(|j| (&real[a][n][j] + &real[a + 1][n][j].scale(I * sign)).scale(c(0.5))))
            .collect()
    };
    Ok((base, vec![wirt(0, -1.0), wirt(0, 1.0), wirt(2, -1.0), wirt(2, 1.0)]))
}

/// Power-series quotient `num / den` on degrees `lo..=hi`; `den` has no
/// negative degrees and a nonzero constant term.
fn series_div(num: &LaurentPoly, den: &LaurentPoly, lo: i32, hi: i32) -> LaurentPoly {
    let d0 = den.coeff(0);
    let mut q: Vec<C> = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        let mut s = num.coeff(k);
        for j in 1..=(k - lo) {
            s -= den.coeff(j) * q[(k - j - lo) as usize];
        }
        q.push(s / d0);
    }
    LaurentPoly::from_raw(lo, q)
}

fn truncate(p: &LaurentPoly, hi: i32) -> LaurentPoly {
    if p.is_zero() || p.hi() <= hi {
        return p.clone();
    }
    let keep = (hi - p.lo() + 1).max(0) as usize;
    LaurentPoly::from_raw(p.lo(), p.coeffs()[..keep].to_vec())
}

/// Weight derivatives of the twisted form `32 pi dx_2 ^ dx_3 / x_1` up to
/// `order`, with `(u, v)`-derivatives by fourth-order central differences.
pub fn twisted_form_series(cfg: &ModuliConfig, order: usize, h: f64, pair: &OmegaPair) -> Result<TwistedFormSeries> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Precondition(format!("finite-difference step {h} must be positive")));
    }
    let (base, d) = frame_derivatives(cfg, order, h, pair)?;
    let mut fact = vec![1.0; order + 1];
    for n in 1..=order {
        fact[n] = fact[n - 1] * n as f64;
    }
    // lambda * x_1 as a normalized weight series
    let g: Vec<LaurentPoly> = (0..=order).map(|n| base.x(n, 0).shift(1).scale(c(1.0 / fact[n]))).collect();
    if g[0].coeff(0).norm() < 1e-12 {
        return Err(Error::EnergyDegenerate);
    }
    let mut forms = vec![vec![TwoForm4::zero(); (KMAX + 2) as usize]; order + 1];
    for a in 0..4 {
        for b in (a + 1)..4 {
            let mut w: Vec<LaurentPoly> = Vec::with_capacity(order + 1);
            for n in 0..=order {
                let mut f = LaurentPoly::zero();
                for k in 0..=n {
                    f += &(&d[a][k][1] * &d[b][n - k][2]);
                    f -= &(&d[b][k][1] * &d[a][n - k][2]);
                }
                let mut num = f.scale(c(32.0 * PI)).shift(1);
                for k in 1..=n {
                    num -= &truncate(&(&g[k] * &w[n - k]), KMAX);
                }
                w.push(series_div(&num, &g[0], -1, KMAX));
            }
            for (n, wn) in w.iter().enumerate() {
                for k in -1..=KMAX {
                    let val = wn.coeff(k) * fact[n];
                    let f = &mut forms[n][(k + 1) as usize];
                    f.m[(a, b)] = val;
                    f.m[(b, a)] = -val;
                }
            }
        }
    }
    Ok(TwistedFormSeries { order, step: h, forms })
}

/// Weight derivatives `E^{(n)}`, `n = 0..=N`, of the energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySeries {
    pub values: Vec<f64>,
    /// Imaginary parts discarded from each value.
    pub imag: Vec<f64>,
}

pub fn energy_series(series: &DerivativeSeries) -> Result<EnergySeries> {
    let x1m = series.central.coeff(0, -1);
    if x1m.norm() < 1e-6 {
        return Err(Error::EnergyDegenerate);
    }
    let (x2m, x3m) = (series.central.coeff(1, -1), series.central.coeff(2, -1));
    let mut values = vec![8.0 * PI * (1.0 - series.central.rho * series.central.r2)];
    let mut imag = vec![0.0];
    for n in 1..=series.order() {
        let e = (I / x1m) * (-x2m * series.x(n, 2).coeff(0) + series.x(n, 1).coeff(0) * x3m) * (8.0 * PI);
        values.push(e.re);
        imag.push(e.im);
    }
    Ok(EnergySeries { values, imag })
}

/// First weight derivative of the energy in terms of the two basic depth-2 integrals.
pub fn energy_first_closed(cfg: &ModuliConfig, pair: &OmegaPair) -> f64 {
    let (u, v) = (cfg.u, cfg.v);
    let (au, av) = (u.norm_sqr(), v.norm_sqr());
    let mixed = (u.conj() * u.conj() * v * v).re * 2.0;
    let a = au * au + av * av - 4.0 * au * av;
    8.0 * pair.one.at(&[2, 1]).im * (a - 3.0 * mixed) - 8.0 * pair.i.at(&[3, 1]).im * (a + 3.0 * mixed)
}

/// Second weight derivative of the energy at the symmetric point `p = e^{i pi/4}`.
pub fn energy_second_symmetric(u: C, v: C) -> f64 {
    let (rho, r6) = rho_r6(u, v);
    let r2 = u.norm_sqr() + v.norm_sqr();
    let (au, av) = (u.norm_sqr(), v.norm_sqr());
    let l2 = 2f64.ln().powi(2);
    -32.0 * PI / (rho * r6) * (au - av).powi(2) * (3.0 * r2.powi(4) + 2.0 * r2 * r2 + 4.0 * au * av) * l2
}

/// Third weight derivative of the energy on the nilpotent line `v = p u`, `p = e^{i pi/4}`.
pub fn energy_third_cone(u_abs: f64) -> f64 {
    let a2 = u_abs * u_abs;
    192.0 * PI * a2 * a2 * (127.0 * a2 * a2 + 20.0) * zeta3()
}

/// Third weight derivative of the constant twisted-form coefficient on the
/// nilpotent line, per unit `32 pi i`.
pub fn twisted_form_third_cone(u_abs: f64) -> f64 {
    let a2 = u_abs * u_abs;
    192.0 * zeta3() * (127.0 * a2 * a2 * a2 + 10.0 * a2)
}

fn ip(a: &Matrix2, b: &Matrix2) -> C {
    (*a * *b).trace() * -0.5
}

fn bracket(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    a.commutator(b).scale(c(0.5))
}

/// Weight-zero Hodge map from a nilpotent Higgs field to a `det = -1` matrix.
pub fn nahc_t0(psi: &Matrix2) -> Result<Matrix2> {
    let scale = psi.max_abs();
    if scale == 0.0 {
        return Err(Error::Precondition("zero Higgs field".into()));
    }
    let tol = 1e-10 * scale * scale;
    if psi.trace().norm() > 1e-10 * scale || psi.det().norm() > tol {
        return Err(Error::NotNilpotent(psi.det()));
    }
    let phi = *psi - psi.adjoint();
    let w = (*psi + psi.adjoint()).scale(I);
    let n = bracket(&phi, &w);
    let nn = ip(&n, &n).sqrt();
    if nn.norm() < tol {
        return Err(Error::NotNilpotent(psi.det()));
    }
    let n = n.scale(nn.inv());
    Ok(n.scale((1.0 + ip(&phi, &phi)).sqrt() * I) + phi)
}

/// Inverse of [`nahc_t0`].
pub fn nahc_t0_inv(a: &Matrix2) -> Result<Matrix2> {
    let scale = a.max_abs().max(1.0);
    if a.trace().norm() > 1e-10 * scale || (a.det() + 1.0).norm() > 1e-10 * scale * scale {
        return Err(Error::Precondition(format!("expected trace 0 and det -1, got {} and {}", a.trace(), a.det())));
    }
    let phi = (*a - a.adjoint()).scale(c(0.5));
    if phi.max_abs() < 1e-12 * scale {
        return Err(Error::HermitianInput);
    }
    let xi = (*a + a.adjoint()).scale(c(0.5));
    let n = xi.scale(-I / (-ip(&xi, &xi)).sqrt());
    Ok((phi - bracket(&n, &phi).scale(I)).scale(c(0.5)))
}

/// Nilpotent Higgs field of the central fibre at `(u, v)`.
pub fn nilpotent_higgs(u: C, v: C) -> Matrix2 {
    Matrix2::new(u * v, -u * u, v * v, -u * v)
}

/// One polylogarithm identity: both sides and their difference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: C,
    pub rhs: C,
    pub residual: f64,
}

pub fn identity_suite(pair: &OmegaPair) -> Result<Vec<IdentityCheck>> {
    if pair.depth() < 3 {
        return Err(Error::TableDepth { have: pair.depth(), need: 3 });
    }
    let o = |w: &[u8]| pair.one.at(w);
    let t = |w: &[u8]| pair.i.at(w);
    let pi2 = PI * PI;
    let pi3 = pi2 * PI;
    let pi4 = pi2 * pi2;
    let tp = 2.0 * PI;
    let mut out = Vec::new();
    let mut push = |name: &str, lhs: C, rhs: C| {
        out.push(IdentityCheck { name: name.into(), lhs, rhs, residual: (lhs - rhs).norm() });
    };

    push("depth2_sum", o(&[2, 3]) + t(&[3, 2]), o(&[2, 1]) + t(&[3, 1]));
    push("depth3_one", o(&[2, 2, 3]) + o(&[3, 1, 1]), -(I / tp) * o(&[2, 1]).powi(2));
    push("depth3_i", t(&[2, 1, 1]) + t(&[3, 3, 2]), (I / tp) * t(&[3, 1]).powi(2));
    push("depth3_mixed", o(&[2, 2, 3]) - t(&[3, 3, 2]), -(I / tp) * (o(&[2, 1]) + t(&[3, 1])).powi(2) + I * pi3 / 6.0);

    let (o21, t31) = (o(&[2, 1]), t(&[3, 1]));
    let i1 = (o(&[3, 3, 3]) - t(&[2, 2, 2])) * (6.0 * PI)
        + I * (o21 * o21 + t31 * t31)
        + (o(&[2, 2, 3]) - t(&[3, 3, 2])) * tp
        - (o(&[3, 1, 1]) - t(&[2, 1, 1])) * (8.0 * PI)
        + I * 10.0 * o21 * t31;
    let i2 = I * (o21 * o21 - t31 * t31) + (o(&[2, 2, 3]) + t(&[3, 3, 2]) + o(&[3, 1, 1]) + t(&[2, 1, 1])) * tp
        - (o(&[3, 3, 3]) + t(&[2, 2, 2])) * (4.0 * PI);
    let i3 = -I * (o21 * o21 + t31 * t31) + (o(&[3, 3, 3]) - t(&[2, 2, 2]) - o(&[2, 2, 3]) + t(&[3, 3, 2])) * tp
        - I * 2.0 * o21 * t31;
    push("constant_1", i1, -I * pi4 / 3.0);
    push("constant_2", i2, ZERO);
    push("constant_3", i3, -I * pi4);

    let fp = 4.0 * PI;
    let (o1, o2, o3) = (o(&[1]), o(&[2]), o(&[3]));
    let (t1, t2, t3) = (t(&[1]), t(&[2]), t(&[3]));
    let (o12, o21_, o13, o31) = (o(&[1, 2]), o21, o(&[1, 3]), o(&[3, 1]));
    let (t12, t21, t13) = (t(&[1, 2]), t(&[2, 1]), t(&[1, 3]));

    let lhs_a = o(&[2, 1, 2]) - t(&[1, 2, 1]) - t(&[2, 1, 2]);
    let rhs_a = 0.5 * o1 * t12 - 0.5 * o1 * t21 + 0.5 * o1 * o(&[2, 2]) - I * o12 * o12 / fp
        + 3.0 * I * o21_ * o21_ / fp
        - 0.5 * o2 * o12
        + 0.5 * o2 * o21_
        - I * o12 * o21_ / tp
        - 0.5 * t2 * t(&[1, 1])
        - 0.5 * t1 * t(&[2, 2])
        + I * o2 * o2 * o1 * o1 / fp
        + 0.25 * I * PI * o1 * o1
        + 0.25 * o2 * o2 * o1
        - 0.25 * pi2 * o1
        + I * pi3 / 6.0;
    push("depth3_a", lhs_a, rhs_a);

    let lhs_b = o(&[1, 3, 1]) + o(&[3, 1, 3]) - t(&[3, 1, 3]);
    let rhs_b = -0.5 * o1 * o13 + 0.5 * o1 * o31 + 0.5 * o1 * o(&[3, 3]) + 0.5 * o3 * o(&[1, 1]) + 0.5 * I * PI * o13
        - 0.5 * I * PI * o31
        - I * t13 * t13 / fp
        + 3.0 * I * t31 * t31 / fp
        + 0.5 * t3 * t13
        - 0.5 * t3 * t31
        - I * t13 * t31 / tp
        - 0.5 * t1 * t(&[3, 3])
        + I * o1 * o1 * t3 * t3 / fp
        + 0.25 * o1 * t3 * t3
        + 0.25 * I * PI * o1 * o1
        + 0.75 * pi2 * o1
        - I * pi3 / 3.0;
    push("depth3_b", lhs_b, rhs_b);

    let (o32, t23) = (o(&[3, 2]), t(&[2, 3]));
    let lhs_c = o(&[2, 3, 2]) - t(&[3, 2, 3]);
    let rhs_c = -0.5 * t3 * o21_ - I * o21_ * t23 / tp + 3.0 * I * o21_ * t31 / tp + t3 * o(&[2, 3]) + 0.5 * t3 * o32
        - I * o32 * t23 / tp
        - I * o32 * t31 / tp
        + 3.0 * I * o21_ * o21_ / fp
        - I * o32 * o21_ / tp
        - I * PI * o21_
        - I * o32 * o32 / fp
        + 0.5 * o3 * o(&[2, 2])
        + 0.5 * o2 * o(&[2, 3])
        - 0.5 * o2 * o32
        - I * PI * o32
        - I * t23 * t23 / fp
        + 3.0 * I * t31 * t31 / fp
        + 0.5 * t3 * t23
        - I * PI * t23
        - 0.5 * t3 * t31
        - I * t23 * t31 / tp
        - I * PI * t31
        - 0.5 * t2 * t(&[3, 3])
        - pi2 * o2
        + pi2 * t3
        - I * pi3 / 3.0;
    push("depth3_c", lhs_c, rhs_c);
    Ok(out)
}
