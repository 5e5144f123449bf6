//! Toolkit for first-order differential operators `E(psi0, psi1) f = psi0 f + psi1 f'`
//! on the Hardy space H^2 of the unit disk.
//!
//! Elements of H^2 are handled through their Taylor coefficients, which makes
//! the monomials `z^n` an orthonormal basis and turns every inner product into
//! an exact finite sum for polynomial data.

pub mod cli;
pub mod conjugation;
pub mod diffop;
pub mod eigen;
pub mod error;
pub mod hardy;
pub mod json;
pub mod parse;
pub mod poly;
pub mod spectrum;
pub mod symmetry;

pub use conjugation::{AntiLinearMatrix, CAlphaBeta, ConjugationSpec, JBetaLambda};
pub use diffop::{KernelCombination, OperatorMatrix, SymbolPair};
pub use error::{Error, Result};
pub use hardy::{HardyElement, KernelSpec};
pub use num_complex::Complex64;
pub use poly::{c64, Poly};
