use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero polynomial")]
    ZeroDivisor,
    #[error("near-singular linear system (det = {det})")]
    Singular { det: Complex64 },
    #[error("pauli letter {0} not in 1..=3")]
    BadLetter(u8),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("pole: z = {z} lies within {dist:e} of puncture p{index}")]
    Pole { z: Complex64, index: usize, dist: f64 },
    #[error("path-singularity: path passes within {dist:.4} of puncture p{index}")]
    PathSingularity { index: usize, dist: f64 },
    #[error("depth cap: requested depth {0} exceeds 6")]
    DepthCap(usize),
    #[error("table depth {have} insufficient, need {need}")]
    TableDepth { have: usize, need: usize },
    #[error("step-size underflow at s = {at}")]
    StepUnderflow { at: f64 },
    #[error("degenerate parabolic structure (u^2 = v^2)")]
    DegenerateParabolic,
    #[error("log argument {0} lies on the negative real axis")]
    BranchCut(Complex64),
    #[error("order-{order} inconsistency: residual {residual:e}")]
    OrderInconsistency { order: usize, residual: f64 },
    #[error("radius r = {r} below r_min = {r_min}")]
    RadiusTooSmall { r: f64, r_min: f64 },
    #[error("pivot degenerate: |x1 coefficient at lambda^-1| = {0:e} (uv ~ 0)")]
    PivotDegenerate(f64),
    #[error("energy formula degenerate (uv ~ 0)")]
    EnergyDegenerate,
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("input is not nilpotent (det = {0})")]
    NotNilpotent(Complex64),
    #[error("Phi = (A - A^H)/2 = 0: input is hermitian-symmetric")]
    HermitianInput,
    #[error("input fails a precondition: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
