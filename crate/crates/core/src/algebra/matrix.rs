use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LaurentPoly;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub m: [[Complex64; 2]; 2],
}

impl Matrix2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    /// Symmetry generator `diag(i, -i)`.
    pub fn d_sym() -> Self {
        Self::diag(Complex64::i(), -Complex64::i())
    }

    /// Symmetry generator `[[0, i], [i, 0]]`.
    pub fn c_sym() -> Self {
        Self::new(ZERO, Complex64::i(), Complex64::i(), ZERO)
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.m[r][c]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|x| x * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == ZERO {
            return None;
        }
        Some(Self::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0]).scale(1.0 / d))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.m[0][0].conj(), self.m[1][0].conj(), self.m[0][1].conj(), self.m[1][1].conj())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Add for Matrix2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl Sub for Matrix2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Matrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl Mul for Matrix2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<Complex64> for Matrix2 {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        self.scale(s)
    }
}

/// 2x2 matrix with Laurent-polynomial entries.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LpMatrix2 {
    pub m: [[LaurentPoly; 2]; 2],
}

impl LpMatrix2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        out.m[0][0] = LaurentPoly::one();
        out.m[1][1] = LaurentPoly::one();
        out
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.m[r][c]
    }

    /// `self += f * mat` entrywise.
    pub fn add_scaled(&mut self, f: &LaurentPoly, mat: &Matrix2) {
        for r in 0..2 {
            for c in 0..2 {
                let k = mat.m[r][c];
                if k != ZERO {
                    self.m[r][c] += &f.scale(k);
                }
            }
        }
    }

    pub fn eval(&self, lambda: Complex64) -> Matrix2 {
        let e = |r: usize, c: usize| self.m[r][c].eval(lambda);
        Matrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = &self.m[r][0] * &o.m[0][c] + &self.m[r][1] * &o.m[1][c];
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] -= &o.m[r][c];
            }
        }
        out
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> LaurentPoly {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn det(&self) -> LaurentPoly {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|p| p.max_abs()).fold(0.0, f64::max)
    }
}
