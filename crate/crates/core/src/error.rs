use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {0} is not inside the open unit disk")]
    OutsideDisk(Complex64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbols are outside the coupled family a+bz, d+cz+bz^2: {0}")]
    FamilyMismatch(String),

    #[error("conjugated symbol is not a polynomial (remainder {remainder:e})")]
    NotPolynomial { remainder: f64 },

    #[error("symbols are not hermitian: {0}")]
    NotHermitian(String),

    #[error("psi1({point}) = {value} is not zero")]
    NotAZero { point: Complex64, value: Complex64 },

    #[error("zero {0} of psi1 is not simple")]
    NotSimple(Complex64),

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("power series coefficients exceeded the overflow guard at degree {0}")]
    SeriesDivergence(usize),

    #[error("QR iteration did not converge after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        partial: Vec<Complex64>,
    },

    #[error("parse error: {0}")]
    Parse(String),
}
