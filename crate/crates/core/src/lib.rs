//! Perturbative twistor lines on the symmetric four-punctured sphere.
//!
//! The parabolic weight `t` is the expansion parameter. At `t = 0` the data is
//! a nilpotent Higgs field parametrized by `(u, v)`; [`deformation::derive`]
//! produces the t-derivatives of the three parameter polynomials, and the
//! [`monodromy`] and [`geometry`] modules check them against independent
//! computations.

pub mod algebra;
pub mod deformation;
pub mod error;
pub mod geometry;
pub mod iterints;
pub mod monodromy;
pub mod ode;
pub mod potential;
pub mod sample;

pub use error::{Error, Result};
pub use num_complex::Complex64;
