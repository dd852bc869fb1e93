//! Moduli data at t = 0: central parameter values, residues of the Fuchsian
//! potential, the Higgs field, root diagnostics and the blow-up limit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{pauli, LaurentPoly, LpMatrix2, Matrix2};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this radius the series machinery refuses to run.
pub const R_MIN: f64 = 0.05;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Base point `(p, u, v)`: puncture generator in the open first quadrant and
/// a nonzero nilpotent residue parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliConfig {
    pub p: Complex64,
    pub u: Complex64,
    pub v: Complex64,
}

impl ModuliConfig {
    pub fn new(p: Complex64, u: Complex64, v: Complex64) -> Result<Self> {
        let cfg = Self { p, u, v };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.p, self.u, self.v].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !all_finite {
            return Err(Error::Config("non-finite input".into()));
        }
        if !(self.p.re > 0.0 && self.p.im > 0.0) {
            return Err(Error::Config(format!("p = {} must lie in the open first quadrant", self.p)));
        }
        if self.r2() == 0.0 {
            return Err(Error::Config("(u, v) = (0, 0)".into()));
        }
        let pts = self.punctures();
        for a in 0..4 {
            for b in a + 1..4 {
                if (pts[a] - pts[b]).norm() < 1e-12 {
                    return Err(Error::Config(format!("punctures p{} and p{} coincide", a + 1, b + 1)));
                }
            }
        }
        Ok(())
    }

    /// `p, -1/p, -p, 1/p`.
    pub fn punctures(&self) -> [Complex64; 4] {
        punctures(self.p)
    }

    pub fn r2(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    pub fn with_uv(&self, u: Complex64, v: Complex64) -> Self {
        Self { p: self.p, u, v }
    }
}

pub fn punctures(p: Complex64) -> [Complex64; 4] {
    [p, -1.0 / p, -p, 1.0 / p]
}

/// Sign patterns of the three logarithmic 1-forms over the four punctures.
pub const FORM_SIGNS: [[f64; 4]; 3] = [[1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0], [1.0, 1.0, -1.0, -1.0]];

/// dz-coefficients of the three 1-forms at `z`.
pub fn forms_at(pts: &[Complex64; 4], z: Complex64) -> [Complex64; 3] {
    let inv = [1.0 / (z - pts[0]), 1.0 / (z - pts[1]), 1.0 / (z - pts[2]), 1.0 / (z - pts[3])];
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (j, o) in out.iter_mut().enumerate() {
        for k in 0..4 {
            *o += inv[k] * FORM_SIGNS[j][k];
        }
    }
    out
}

/// The t = 0 parameters as Laurent polynomials of degree range [-1, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralValues {
    pub xbar: [LaurentPoly; 3],
    pub rho: f64,
    pub r2: f64,
}

impl CentralValues {
    pub fn from_uv(u: Complex64, v: Complex64) -> Self {
        let r2 = u.norm_sqr() + v.norm_sqr();
        let rho = -(1.0 + 1.0 / (r2 * r2)).sqrt();
        let low = [u * v, (v * v - u * u) / 2.0, I * (u * u + v * v) / 2.0];
        let uvb = u * v.conj();
        let mid = [rho * (u.norm_sqr() - v.norm_sqr()), 2.0 * rho * uvb.re, 2.0 * rho * uvb.im];
        let xbar = std::array::from_fn(|j| LaurentPoly::from_raw(-1, vec![low[j], c(mid[j]), -low[j].conj()]));
        Self { xbar, rho, r2 }
    }

    /// Coefficient of `lambda^k` of the j-th parameter (j = 0, 1, 2).
    pub fn coeff(&self, j: usize, k: i32) -> Complex64 {
        self.xbar[j].coeff(k)
    }

    /// `P_j = lambda * xbar_j`, an ordinary quadratic polynomial.
    pub fn pj(&self, j: usize) -> LaurentPoly {
        self.xbar[j].shift(1)
    }

    pub fn eval(&self, lambda: Complex64) -> [Complex64; 3] {
        std::array::from_fn(|j| self.xbar[j].eval(lambda))
    }
}

pub fn central_values(cfg: &ModuliConfig) -> CentralValues {
    CentralValues::from_uv(cfg.u, cfg.v)
}

/// Wirtinger derivatives of the central coefficients, in the frame order
/// (d/du, d/du-bar, d/dv, d/dv-bar). Entry `[a][j][k+1]` is the derivative of
/// the coefficient of `lambda^k` of parameter j.
pub fn central_gradient(u: Complex64, v: Complex64) -> [[[Complex64; 3]; 3]; 4] {
    let r2 = u.norm_sqr() + v.norm_sqr();
    let rho = -(1.0 + 1.0 / (r2 * r2)).sqrt();
    // d rho / d r2 = -r2^-3 / rho
    let drho = -1.0 / (r2 * r2 * r2 * rho);
    let z = Complex64::new(0.0, 0.0);
    // derivatives of r2 along the frame
    let dr2 = [u.conj(), u, v.conj(), v];
    let diff = u.norm_sqr() - v.norm_sqr();
    let ddiff = [u.conj(), u, -v.conj(), -v];
    let w = u * v.conj();
    let dw = [v.conj(), z, z, u];
    let dwb = [z, v, u.conj(), z];
    let dlow: [[Complex64; 3]; 4] = [[v, -u, I * u], [z, z, z], [u, v, I * v], [z, z, z]];
    std::array::from_fn(|a| {
        let dl = dlow[a];
        let dlb: [Complex64; 3] = {
            // derivative of conj(f) along a is conj of derivative of f along the conjugate direction
            let partner = a ^ 1;
            std::array::from_fn(|j| dlow[partner][j].conj())
        };
        let dmid = [
            drho * dr2[a] * diff + rho * ddiff[a],
            drho * dr2[a] * (w + w.conj()) + rho * (dw[a] + dwb[a]),
            (drho * dr2[a] * (w - w.conj()) + rho * (dw[a] - dwb[a])) * (-I),
        ];
        std::array::from_fn(|j| [dl[j], dmid[j], -dlb[j]])
    })
}

/// Residues `A_1..A_4` as matrices of Laurent polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueSet {
    pub a: [LpMatrix2; 4],
}

/// Residue patterns at the four punctures, applied to parameter values.
pub fn residue_values(x: [Complex64; 3]) -> [Matrix2; 4] {
    let [x1, x2, x3] = x;
    [
        Matrix2::new(x1, x2 + I * x3, x2 - I * x3, -x1),
        Matrix2::new(-x1, -x2 + I * x3, -x2 - I * x3, x1),
        Matrix2::new(x1, -x2 - I * x3, -x2 + I * x3, -x1),
        Matrix2::new(-x1, x2 - I * x3, x2 + I * x3, x1),
    ]
}

pub fn residues(x: &[LaurentPoly; 3]) -> ResidueSet {
    // A_k = sum_j x_j * sigma_jk * m_j
    let a = std::array::from_fn(|k| {
        let mut m = LpMatrix2::zero();
        for j in 0..3 {
            let pm = pauli(j as u8 + 1).expect("letter in range").scale(c(FORM_SIGNS[j][k]));
            m.add_scaled(&x[j], &pm);
        }
        m
    });
    ResidueSet { a }
}

/// dz-coefficient of the potential for already evaluated parameters.
pub fn eta_from_values(pts: &[Complex64; 4], x: [Complex64; 3], t: f64, z: Complex64) -> Matrix2 {
    let w = forms_at(pts, z);
    let s = [x[0] * w[0] * t, x[1] * w[1] * t, x[2] * w[2] * t];
    // s1 m1 + s2 m2 + s3 m3
    Matrix2::new(s[0], s[1] + I * s[2], s[1] - I * s[2], -s[0])
}

pub fn eta_coeff(cfg: &ModuliConfig, x: &[LaurentPoly; 3], t: f64, z: Complex64, lambda: Complex64) -> Result<Matrix2> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroLambda);
    }
    let pts = cfg.punctures();
    for (k, pk) in pts.iter().enumerate() {
        let dist = (z - pk).norm();
        if dist < 1e-8 {
            return Err(Error::Pole { z, index: k + 1, dist });
        }
    }
    let xv = std::array::from_fn(|j| x[j].eval(lambda));
    Ok(eta_from_values(&pts, xv, t, z))
}

/// Residues of the Higgs field at `p_1..p_4`.
pub fn higgs_residues(u: Complex64, v: Complex64, t: f64) -> [Matrix2; 4] {
    let (uv, u2, v2) = (u * v, u * u, v * v);
    [
        Matrix2::new(uv, -u2, v2, -uv),
        Matrix2::new(-uv, -v2, u2, uv),
        Matrix2::new(uv, u2, -v2, -uv),
        Matrix2::new(-uv, v2, -u2, uv),
    ]
    .map(|m| m.scale(c(t)))
}

/// dz-coefficient of the Higgs field (the lambda^-1 part of the potential).
pub fn higgs_field(cfg: &ModuliConfig, t: f64, z: Complex64) -> Matrix2 {
    let cv = central_values(cfg);
    let low = std::array::from_fn(|j| cv.coeff(j, -1));
    eta_from_values(&cfg.punctures(), low, t, z)
}

/// Closed form of the Higgs-field determinant.
pub fn higgs_det_closed(cfg: &ModuliConfig, t: f64, z: Complex64) -> Complex64 {
    let (u, v, p) = (cfg.u, cfg.v, cfg.p);
    let s = p * p + 1.0 / (p * p);
    let num = (u.powi(4) - s * u * u * v * v + v.powi(4)) * (-4.0 * t * t);
    num / (z.powi(4) - s * z * z + 1.0)
}

/// Cross-ratio of the residue eigenlines, `-4u^2v^2/(u^2-v^2)^2`.
pub fn cross_ratio(u: Complex64, v: Complex64) -> Result<Complex64> {
    let d = u * u - v * v;
    if d.norm() <= 1e-14 * (u.norm_sqr() + v.norm_sqr()) {
        return Err(Error::DegenerateParabolic);
    }
    Ok(-4.0 * u * u * v * v / (d * d))
}

/// Cross-ratio computed from the four eigenline coordinates directly.
pub fn cross_ratio_from_lines(u: Complex64, v: Complex64) -> Complex64 {
    let (z1, z2, z3, z4) = (u / v, -v / u, -u / v, v / u);
    (z3 - z1) * (z4 - z2) / ((z3 - z2) * (z4 - z1))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HiggsData {
    pub residues: [Matrix2; 4],
    /// Largest relative mismatch between the summed determinant and its closed form.
    pub det_residual: f64,
    pub cross_ratio: Option<Complex64>,
}

/// Residues, a determinant check at fixed sample points, and the cross-ratio
/// (absent when the parabolic structure degenerates).
pub fn higgs_data(cfg: &ModuliConfig, t: f64) -> HiggsData {
    let samples =
        [Complex64::new(0.0, 0.0), Complex64::new(0.31, -0.17), Complex64::new(-0.6, 0.45), Complex64::new(1.3, 1.9)];
    let det_residual = samples
        .iter()
        .map(|&z| {
            let a = higgs_field(cfg, t, z).det();
            let b = higgs_det_closed(cfg, t, z);
            (a - b).norm() / b.norm().max(1e-300).max(a.norm())
        })
        .fold(0.0, f64::max);
    HiggsData { residues: higgs_residues(cfg.u, cfg.v, t), det_residual, cross_ratio: cross_ratio(cfg.u, cfg.v).ok() }
}

/// Root of `P_j = lambda * xbar_j` inside the unit disc; absent when the
/// constant coefficient vanishes (both roots then lie on the circle).
pub fn mu_root(cv: &CentralValues, j: usize) -> Option<Complex64> {
    let b = cv.coeff(j, 0).re;
    if b == 0.0 {
        return None;
    }
    let a = cv.coeff(j, 1);
    let z = 4.0 * a.norm_sqr() / (b * b);
    // (sqrt(1+z)-1)/z written without cancellation
    let f = 1.0 / ((1.0 + z).sqrt() + 1.0);
    Some(2.0 * a.conj() / b * f)
}

/// Limit of the constant coefficients as `(u, v) = r (ut, vt)` shrinks to 0.
pub fn blowup_limit(ut: Complex64, vt: Complex64) -> Result<[f64; 3]> {
    let n = ut.norm_sqr() + vt.norm_sqr();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("|ut|^2 + |vt|^2 = {n}, expected 1")));
    }
    let w = ut * vt.conj();
    Ok([-(ut.norm_sqr() - vt.norm_sqr()), -2.0 * w.re, -2.0 * w.im])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_values_at_unit_u() {
        let cv = CentralValues::from_uv(c(1.0), c(0.0));
        let s2 = 2f64.sqrt();
        assert!((cv.rho + s2).abs() < 1e-15);
        assert!((cv.xbar[0].coeff(0) - c(-s2)).norm() < 1e-15);
        assert!(cv.xbar[0].coeff(-1).norm() == 0.0 && cv.xbar[0].coeff(1).norm() == 0.0);
        assert!((cv.xbar[1].coeff(-1) - c(-0.5)).norm() < 1e-15);
        assert!((cv.xbar[1].coeff(1) - c(0.5)).norm() < 1e-15);
        assert!((cv.xbar[2].coeff(-1) - I * 0.5).norm() < 1e-15);
        assert!((cv.xbar[2].coeff(1) - I * 0.5).norm() < 1e-15);
        let prod = &cv.xbar[1] * &cv.xbar[2];
        assert!((prod.coeff(-2) + I * 0.25).norm() < 1e-15);
        assert!((prod.coeff(2) - I * 0.25).norm() < 1e-15);
        assert!(prod.coeff(0).norm() < 1e-15);
    }

    #[test]
    fn unit_residue_pattern() {
        let x = [LaurentPoly::one(), LaurentPoly::zero(), LaurentPoly::zero()];
        let rs = residues(&x);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(rs.a[0].eval(one), Matrix2::diag(one, -one));
        assert_eq!(rs.a[1].eval(one), Matrix2::diag(-one, one));
        // residue_values must agree with the algebraic assembly
        let xv = [c(0.3), Complex64::new(0.1, 0.7), Complex64::new(-1.2, 0.4)];
        let xs = xv.map(LaurentPoly::constant);
        let rs = residues(&xs);
        for (a, b) in rs.a.iter().zip(residue_values(xv)) {
            assert!(a.eval(one).dist(&b) < 1e-15);
        }
    }

    #[test]
    fn mu_root_linear_case() {
        let cv = CentralValues::from_uv(c(1.0), c(0.0));
        assert_eq!(mu_root(&cv, 0), Some(Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn blowup_examples() {
        assert_eq!(blowup_limit(c(1.0), c(0.0)).unwrap(), [-1.0, -0.0, -0.0]);
        assert!(blowup_limit(c(2.0), c(0.0)).is_err());
    }

    #[test]
    fn crossratio_degenerate() {
        assert_eq!(cross_ratio(c(1.0), c(1.0)), Err(Error::DegenerateParabolic));
    }

    #[test]
    fn higgs_det_at_origin() {
        let p = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let cfg = ModuliConfig::new(p, c(1.0), c(0.0)).unwrap();
        assert!((higgs_det_closed(&cfg, 1.0, c(0.0)) - c(-4.0)).norm() < 1e-14);
        assert!((higgs_field(&cfg, 1.0, c(0.0)).det() - c(-4.0)).norm() < 1e-13);
    }

    #[test]
    fn gradient_matches_differences() {
        let (u, v) = (Complex64::new(0.7, -0.4), Complex64::new(0.3, 0.9));
        let g = central_gradient(u, v);
        let h = 1e-5;
        let f = |u: Complex64, v: Complex64| CentralValues::from_uv(u, v);
        let dirs = [(c(h), c(0.0)), (I * h, c(0.0)), (c(0.0), c(h)), (c(0.0), I * h)];
        let mut real = Vec::new();
        for (du, dv) in dirs {
            let (a, b) = (f(u + du, v + dv), f(u - du, v - dv));
            real.push(std::array::from_fn::<_, 3, _>(|j| {
                std::array::from_fn::<_, 3, _>(|k| (a.coeff(j, k as i32 - 1) - b.coeff(j, k as i32 - 1)) / (2.0 * h))
            }));
        }
        for j in 0..3 {
            for k in 0..3 {
                let du = 0.5 * (real[0][j][k] - I * real[1][j][k]);
                let dub = 0.5 * (real[0][j][k] + I * real[1][j][k]);
                let dv = 0.5 * (real[2][j][k] - I * real[3][j][k]);
                let dvb = 0.5 * (real[2][j][k] + I * real[3][j][k]);
                for (a, want) in [du, dub, dv, dvb].into_iter().enumerate() {
                    assert!((g[a][j][k] - want).norm() < 1e-8, "a={a} j={j} k={k}");
                }
            }
        }
    }
}
