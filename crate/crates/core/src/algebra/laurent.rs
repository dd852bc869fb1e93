use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TRIM_REL: f64 = 1e-14;

/// Finite Laurent polynomial `sum_k c_k lambda^k` with dense storage from `lo`.
///
/// The zero polynomial has no coefficients and `lo == 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    lo: i32,
    coeffs: Vec<Complex64>,
}

impl Default for LaurentPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl LaurentPoly {
    /// Builds a polynomial, trimming end coefficients below `1e-14 * max|c|`.
    pub fn new(lo: i32, coeffs: Vec<Complex64>) -> Self {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Self::strip(lo, coeffs, TRIM_REL * scale)
    }

    /// Builds a polynomial dropping only exactly-zero end coefficients.
    pub fn from_raw(lo: i32, coeffs: Vec<Complex64>) -> Self {
        Self::strip(lo, coeffs, 0.0)
    }

    fn strip(mut lo: i32, mut coeffs: Vec<Complex64>, thresh: f64) -> Self {
        let keep = |c: &Complex64| c.norm() > thresh;
        match coeffs.iter().position(keep) {
            None => Self::zero(),
            Some(first) => {
                let last = coeffs.iter().rposition(keep).unwrap();
                coeffs.truncate(last + 1);
                coeffs.drain(..first);
                lo += first as i32;
                Self { lo, coeffs }
            }
        }
    }

    pub fn zero() -> Self {
        Self { lo: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(k: i32, c: Complex64) -> Self {
        Self::from_raw(k, vec![c])
    }

    /// The spectral parameter itself.
    pub fn lambda() -> Self {
        Self::monomial(1, Complex64::new(1.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest degree; `lo - 1` for the zero polynomial.
    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i32) -> Complex64 {
        let i = k - self.lo;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        // Horner in lambda, then shift by lambda^lo.
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * lambda + c;
        }
        acc * lambda.powi(self.lo)
    }

    /// Multiplication by `lambda^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(self.lo, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn conj_coeffs(&self) -> Self {
        Self::from_raw(self.lo, self.coeffs.iter().map(|a| a.conj()).collect())
    }

    /// `f*(lambda) = conj(f(-1/conj(lambda)))`: `c_k` at degree k goes to
    /// `(-1)^k conj(c_k)` at degree -k.
    pub fn star(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let coeffs = (self.lo..=self.hi())
            .rev()
            .map(|k| {
                let c = self.coeff(k).conj();
                if k.rem_euclid(2) == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        Self::from_raw(-self.hi(), coeffs)
    }

    fn window(&self, from: i32, to: i32) -> Self {
        if from > to {
            return Self::zero();
        }
        Self::from_raw(from, (from..=to).map(|k| self.coeff(k)).collect())
    }

    /// Part supported on degrees < 0.
    pub fn neg_part(&self) -> Self {
        self.window(self.lo, self.hi().min(-1))
    }

    /// Part supported on degrees > 0.
    pub fn pos_part(&self) -> Self {
        self.window(self.lo.max(1), self.hi())
    }

    pub fn const_part(&self) -> Complex64 {
        self.coeff(0)
    }

    pub fn split(&self) -> (Self, Complex64, Self) {
        (self.neg_part(), self.const_part(), self.pos_part())
    }

    /// `star` of the negative part, supported on positive degrees.
    pub fn neg_star(&self) -> Self {
        self.neg_part().star()
    }

    /// Euclidean division of ordinary polynomials: `self = d*q + r`, `deg r < deg d`.
    pub fn divmod(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if self.lo < 0 || d.lo < 0 {
            return Err(Error::Precondition("divmod needs polynomials without negative powers".into()));
        }
        let dc: Vec<Complex64> = (0..=d.hi()).map(|k| d.coeff(k)).collect();
        let dd = dc.len() - 1;
        let lead = dc[dd];
        if self.is_zero() || self.hi() < d.hi() {
            return Ok((Self::zero(), self.clone()));
        }
        let mut r: Vec<Complex64> = (0..=self.hi()).map(|k| self.coeff(k)).collect();
        let nq = r.len() - dd;
        let mut q = vec![Complex64::new(0.0, 0.0); nq];
        for i in (0..nq).rev() {
            let c = r[i + dd] / lead;
            q[i] = c;
            for (j, dj) in dc.iter().enumerate() {
                r[i + j] -= c * dj;
            }
        }
        r.truncate(dd);
        Ok((Self::from_raw(0, q), Self::from_raw(0, r)))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = (self.lo..=self.hi())
            .filter(|&k| self.coeff(k) != Complex64::new(0.0, 0.0))
            .map(|k| {
                let c = self.coeff(k);
                format!("({:.6e}{:+.6e}i)λ^{}", c.re, c.im, k)
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn add_impl(a: &LaurentPoly, b: &LaurentPoly, sign: f64) -> LaurentPoly {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return b.scale(Complex64::new(sign, 0.0));
    }
    let lo = a.lo.min(b.lo);
    let hi = a.hi().max(b.hi());
    LaurentPoly::from_raw(lo, (lo..=hi).map(|k| a.coeff(k) + b.coeff(k) * sign).collect())
}

fn mul_impl(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() || b.is_zero() {
        return LaurentPoly::zero();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    LaurentPoly::from_raw(a.lo + b.lo, out)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                $body(self, rhs)
            }
        }
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                $body(&self, &rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                $body(&self, rhs)
            }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                $body(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| add_impl(a, b, 1.0));
binop!(Sub, sub, |a, b| add_impl(a, b, -1.0));
binop!(Mul, mul, mul_impl);

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        *self = add_impl(self, rhs, 1.0);
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        *self = add_impl(self, rhs, -1.0);
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Mul<Complex64> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, c: Complex64) -> LaurentPoly {
        self.scale(c)
    }
}

impl Mul<Complex64> for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, c: Complex64) -> LaurentPoly {
        self.scale(c)
    }
}

impl Mul<f64> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, c: f64) -> LaurentPoly {
        self.scale(Complex64::new(c, 0.0))
    }
}

impl Mul<f64> for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, c: f64) -> LaurentPoly {
        self.scale(Complex64::new(c, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn degree_cancellation() {
        let a = LaurentPoly::monomial(-1, c(1.0, 0.0));
        let p = &a * &LaurentPoly::lambda();
        assert_eq!(p, LaurentPoly::one());
    }

    #[test]
    fn star_rules() {
        let r = LaurentPoly::constant(c(2.5, 0.0));
        assert_eq!(r.star(), r);
        assert_eq!(LaurentPoly::lambda().star(), LaurentPoly::monomial(-1, c(-1.0, 0.0)));
    }

    #[test]
    fn split_and_neg_star() {
        let f = LaurentPoly::new(-1, vec![c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let (n, k, p) = f.split();
        assert_eq!(n, LaurentPoly::monomial(-1, c(2.0, 0.0)));
        assert_eq!(k, c(3.0, 0.0));
        assert_eq!(p, LaurentPoly::monomial(1, c(4.0, 0.0)));
        let g = LaurentPoly::monomial(-1, c(0.0, 2.0));
        assert_eq!(g.neg_star(), LaurentPoly::monomial(1, c(0.0, 2.0)));
    }

    #[test]
    fn divide_difference_of_squares() {
        let f = LaurentPoly::new(0, vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let d = LaurentPoly::new(0, vec![c(-1.0, 0.0), c(1.0, 0.0)]);
        let (q, r) = f.divmod(&d).unwrap();
        assert_eq!(q, LaurentPoly::new(0, vec![c(1.0, 0.0), c(1.0, 0.0)]));
        assert!(r.is_zero());
        assert_eq!(f.divmod(&LaurentPoly::zero()), Err(Error::ZeroDivisor));
    }

    #[test]
    fn trim_only_at_construction() {
        let tiny = LaurentPoly::new(0, vec![c(1.0, 0.0), c(1e-17, 0.0)]);
        assert_eq!(tiny.hi(), 0);
        let raw = LaurentPoly::from_raw(0, vec![c(1.0, 0.0), c(1e-17, 0.0)]);
        assert_eq!(raw.hi(), 1);
        let sum = &raw + &LaurentPoly::monomial(2, c(1e-20, 0.0));
        assert_eq!(sum.hi(), 2);
    }

    #[test]
    fn eval_matches_terms() {
        let f = LaurentPoly::new(-1, vec![c(1.0, 1.0), c(0.5, 0.0), c(0.0, -2.0)]);
        let l = c(0.3, 0.7);
        let direct = c(1.0, 1.0) / l + c(0.5, 0.0) + c(0.0, -2.0) * l;
        assert!((f.eval(l) - direct).norm() < 1e-14);
    }
}
