//! Finite Laurent polynomials in the spectral parameter, 2x2 matrices over
//! Pauli words, and the two small linear solves the recursion needs.

mod laurent;
mod linalg;
mod matrix;
mod word;

pub use laurent::LaurentPoly;
pub use linalg::{cramer3, det3, least_squares, LeastSquares};
pub use matrix::{LpMatrix2, Matrix2};
pub use word::{pauli, pauli_word, Word};
