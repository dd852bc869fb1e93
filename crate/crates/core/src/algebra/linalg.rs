use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn det3(m: &[[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cramer's rule for a 3x3 complex system.
///
/// The singularity guard is relative to the Hadamard bound (product of row norms).
pub fn cramer3(m: &[[Complex64; 3]; 3], b: &[Complex64; 3]) -> Result<[Complex64; 3]> {
    let det = det3(m);
    let scale: f64 = m.iter().map(|row| row.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).product();
    if det.norm().is_nan() || det.norm() <= 1e-12 * scale {
        return Err(Error::Singular { det });
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut mk = *m;
        for r in 0..3 {
            mk[r][k] = b[r];
        }
        *xk = det3(&mk) / det;
    }
    Ok(x)
}

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: Vec<Complex64>,
    /// Euclidean norm of `A x - b`.
    pub residual: f64,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Minimum-norm least-squares solution via SVD; singular values below
/// `rcond * s_max` count as zero.
pub fn least_squares(a: &DMatrix<Complex64>, b: &DVector<Complex64>, rcond: f64) -> LeastSquares {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = rcond * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let x = svd.solve(b, eps).expect("u and v were computed");
    let residual = (a * &x - b).norm();
    LeastSquares {
        x: x.iter().cloned().collect(),
        residual,
        rank,
        singular_values: svd.singular_values.iter().cloned().collect(),
    }
}
