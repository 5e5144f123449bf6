//! Closed-form classifiers for hermitian and conjugation-selfadjoint maximal
//! operators, and a numeric residual that cross-checks each verdict on finite
//! sections.
//!
//! The classifiers describe the maximal operator. On smaller domains these
//! operators are never selfadjoint in either sense, so every verdict here
//! implicitly refers to the maximal domain.
//!
//! | property                   | psi0    | psi1              | constraint                        |
//! |----------------------------|---------|-------------------|-----------------------------------|
//! | hermitian                  | a + b z | conj(b) + c z + b z^2 | a, c real                     |
//! | C_{alpha,beta}-selfadjoint | a + b z | b beta + c z + b z^2  | none (alpha does not enter)   |
//! | J_{beta,lambda}-selfadjoint| a + b z | d + c z + b z^2       | d = -lambda b / conj(lambda) - lambda c |
//!
//! The zero operator satisfies all three.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conjugation::{CAlphaBeta, ConjugationSpec, JBetaLambda};
use crate::diffop::{truncated_matrix, FamilyParams, SymbolPair, SYMBOLIC_TOLERANCE};
use crate::error::{Error, Result};
use crate::hardy::{kernel, HardyElement};
use crate::json::{complex, complex_opt};

/// Smallest truncation accepted by [`residual`].
pub const MIN_RESIDUAL_TRUNCATION: usize = 32;

/// Internal section size of the sandwich path, as a multiple of `N`.
pub const SANDWICH_PADDING: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict<W> {
    pub holds: bool,
    pub witness: Option<W>,
    pub violation: Option<String>,
}

impl<W> Verdict<W> {
    fn yes(witness: W) -> Self {
        Self {
            holds: true,
            witness: Some(witness),
            violation: None,
        }
    }

    fn no(violation: impl Into<String>) -> Self {
        Self {
            holds: false,
            witness: None,
            violation: Some(violation.into()),
        }
    }
}

/// `psi0 = a + b z`, `psi1 = conj(b) + c z + b z^2` with real `a`, `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianWitness {
    pub a: f64,
    #[serde(with = "complex")]
    pub b: Complex64,
    pub c: f64,
}

impl HermitianWitness {
    pub fn symbols(&self) -> SymbolPair {
        FamilyParams {
            a: Complex64::new(self.a, 0.0),
            b: self.b,
            c: Complex64::new(self.c, 0.0),
            d: self.b.conj(),
        }
        .symbols()
    }
}

/// `psi0 = a + b z`, `psi1 = b beta + c z + b z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CWitness {
    #[serde(with = "complex")]
    pub a: Complex64,
    #[serde(with = "complex")]
    pub b: Complex64,
    #[serde(with = "complex")]
    pub c: Complex64,
}

impl CWitness {
    pub fn symbols(&self, beta: Complex64) -> SymbolPair {
        FamilyParams {
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.b * beta,
        }
        .symbols()
    }
}

/// `d` forced by the `J_{beta,lambda}` coupling.
pub fn j_coupled_d(b: Complex64, c: Complex64, lambda: Complex64) -> Complex64 {
    -lambda * b / lambda.conj() - lambda * c
}

fn within(x: Complex64, y: Complex64) -> bool {
    (x - y).norm() <= SYMBOLIC_TOLERANCE
}

/// Degree bounds plus the shared `b` coupling; returns the positional
/// parameters `(a, b, c, d)`.
fn coupled_params(symbols: &SymbolPair) -> std::result::Result<FamilyParams, String> {
    match symbols.family_params() {
        Ok(p) => Ok(p),
        Err(Error::FamilyMismatch(msg)) => Err(msg),
        Err(e) => Err(e.to_string()),
    }
}

pub fn classify_hermitian(symbols: &SymbolPair) -> Verdict<HermitianWitness> {
    let p = match coupled_params(symbols) {
        Ok(p) => p,
        Err(msg) => return Verdict::no(msg),
    };
    if p.a.im.abs() > SYMBOLIC_TOLERANCE {
        return Verdict::no(format!("constant term of psi0 is not real ({})", p.a));
    }
    if p.c.im.abs() > SYMBOLIC_TOLERANCE {
        return Verdict::no(format!("z coefficient of psi1 is not real ({})", p.c));
    }
    if !within(p.d, p.b.conj()) {
        return Verdict::no(format!(
            "constant term of psi1 ({}) differs from conj(b) = {}",
            p.d,
            p.b.conj()
        ));
    }
    Verdict::yes(HermitianWitness {
        a: p.a.re,
        b: p.b,
        c: p.c.re,
    })
}

pub fn classify_c_selfadjoint(symbols: &SymbolPair, beta: Complex64) -> Result<Verdict<CWitness>> {
    // validates |beta| = 1; alpha is irrelevant
    CAlphaBeta::new(Complex64::new(1.0, 0.0), beta)?;
    let p = match coupled_params(symbols) {
        Ok(p) => p,
        Err(msg) => return Ok(Verdict::no(msg)),
    };
    if !within(p.d, p.b * beta) {
        return Ok(Verdict::no(format!(
            "constant term of psi1 ({}) differs from b*beta = {}",
            p.d,
            p.b * beta
        )));
    }
    Ok(Verdict::yes(CWitness {
        a: p.a,
        b: p.b,
        c: p.c,
    }))
}

pub fn classify_j_selfadjoint(symbols: &SymbolPair, lambda: Complex64) -> Result<Verdict<FamilyParams>> {
    // validates 0 < |lambda| < 1; beta is irrelevant
    JBetaLambda::new(Complex64::new(1.0, 0.0), lambda)?;
    let p = match coupled_params(symbols) {
        Ok(p) => p,
        Err(msg) => return Ok(Verdict::no(msg)),
    };
    let d = j_coupled_d(p.b, p.c, lambda);
    if !within(p.d, d) {
        return Ok(Verdict::no(format!(
            "constant term of psi1 ({}) differs from -lambda b/conj(lambda) - lambda c = {d}",
            p.d
        )));
    }
    Ok(Verdict::yes(p))
}

/// The conjugation `C_{1,beta}` under which a hermitian operator is
/// `C`-selfadjoint: `beta = conj(b)/b`, or 1 when `b = 0`.
pub fn hermitian_to_conjugation(symbols: &SymbolPair) -> Result<CAlphaBeta> {
    let verdict = classify_hermitian(symbols);
    let w = match verdict.witness {
        Some(w) => w,
        None => return Err(Error::NotHermitian(verdict.violation.unwrap_or_default())),
    };
    let beta = if w.b.norm() <= SYMBOLIC_TOLERANCE {
        Complex64::new(1.0, 0.0)
    } else {
        let beta = w.b.conj() / w.b;
        beta / beta.norm()
    };
    CAlphaBeta::new(Complex64::new(1.0, 0.0), beta)
}

/// How [`residual`] evaluated `𝒞 E 𝒞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualPath {
    /// Finite section of the pushed-forward symbols.
    Exact,
    /// Conjugation matrix sandwich `M conj(E) conj(M)`.
    Sandwich,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `max_v ||(𝒞E𝒞 - E*) v||` over unit test vectors, on rows `<= N/2`.
    /// Infinite when the pushed-forward symbols are not polynomial.
    #[serde(serialize_with = "finite_or_null", deserialize_with = "null_as_infinity")]
    pub residual: f64,
    pub path: ResidualPath,
    pub exact: Option<f64>,
    pub sandwich: f64,
    /// Operator distance between the two paths on the test set, when both exist.
    pub path_agreement: Option<f64>,
    pub not_polynomial: bool,
}

fn finite_or_null<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

fn null_as_infinity<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// Unit test vectors: `K_w` and `K_w^{[1]}` on `|w| in {0.3, 0.6}` at five
/// angles each, plus monomials of degree `<= n/4`.
pub fn residual_test_vectors(n: usize) -> Vec<HardyElement> {
    let mut out = Vec::new();
    for r in [0.3, 0.6] {
        for k in 0..5 {
            let w = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / 5.0);
            for m in [0, 1] {
                let v = kernel(w, m, n).expect("grid inside the disk");
                let norm = v.norm();
                out.push(v.scaled(Complex64::new(1.0 / norm, 0.0)));
            }
        }
    }
    out.extend((0..=n / 4).map(|k| HardyElement::monomial(k, n)));
    out
}

/// `max_v ||(A v)[0..=rows]||`.
fn max_action(a: &DMatrix<Complex64>, vectors: &[HardyElement], rows: usize) -> f64 {
    vectors
        .iter()
        .map(|v| {
            let x = nalgebra::DVector::from_column_slice(v.coeffs());
            let y = a * x;
            y.rows(0, rows + 1).norm()
        })
        .fold(0.0, f64::max)
}

/// Numeric check of `𝒞 E 𝒞 = E*` on finite sections of size `n + 1`.
///
/// `E*` is the conjugate transpose of the finite section of `E`. `𝒞E𝒞` is
/// taken from the pushed-forward symbols when they are polynomial (exact
/// path), and is also always formed as the matrix sandwich. Both are compared
/// on rows `<= n/2` against [`residual_test_vectors`].
pub fn residual(symbols: &SymbolPair, conj: &ConjugationSpec, n: usize) -> Result<ResidualReport> {
    if n < MIN_RESIDUAL_TRUNCATION {
        return Err(Error::InvalidParameter(format!(
            "residual needs N >= {MIN_RESIDUAL_TRUNCATION}, got {n}"
        )));
    }
    let rows = n / 2;
    let vectors = residual_test_vectors(n);
    let e = truncated_matrix(symbols, n).matrix.entries;
    let adjoint = e.adjoint();

    // the sandwich is formed on a padded section so that the truncation tail of
    // the conjugation applied to the test vectors stays out of the interior rows
    let padded = SANDWICH_PADDING * n;
    let e_padded = truncated_matrix(symbols, padded).matrix.entries;
    let sandwich_op = conj
        .matrix(padded)
        .sandwich(&e_padded)
        .view((0, 0), (n + 1, n + 1))
        .into_owned();
    let sandwich = max_action(&(&sandwich_op - &adjoint), &vectors, rows);

    match conj.conjugated_symbols(symbols) {
        Ok(pushed) => {
            let exact_op = truncated_matrix(&pushed, n).matrix.entries;
            let exact = max_action(&(&exact_op - &adjoint), &vectors, rows);
            let agreement = max_action(&(&exact_op - &sandwich_op), &vectors, rows);
            Ok(ResidualReport {
                residual: exact,
                path: ResidualPath::Exact,
                exact: Some(exact),
                sandwich,
                path_agreement: Some(agreement),
                not_polynomial: false,
            })
        }
        Err(Error::NotPolynomial { .. }) => Ok(ResidualReport {
            residual: f64::INFINITY,
            path: ResidualPath::Sandwich,
            exact: None,
            sandwich,
            path_agreement: None,
            not_polynomial: true,
        }),
        Err(e) => Err(e),
    }
}

/// Numeric check of `E = E*` on finite sections, same test set and rows as
/// [`residual`].
pub fn hermitian_residual(symbols: &SymbolPair, n: usize) -> Result<f64> {
    if n < MIN_RESIDUAL_TRUNCATION {
        return Err(Error::InvalidParameter(format!(
            "residual needs N >= {MIN_RESIDUAL_TRUNCATION}, got {n}"
        )));
    }
    let e = truncated_matrix(symbols, n).matrix.entries;
    let diff = &e - e.adjoint();
    Ok(max_action(&diff, &residual_test_vectors(n), n / 2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVerdict {
    #[serde(with = "complex")]
    pub beta: Complex64,
    #[serde(flatten)]
    pub verdict: Verdict<CWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JVerdict {
    #[serde(with = "complex")]
    pub lambda: Complex64,
    #[serde(flatten)]
    pub verdict: Verdict<FamilyParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub hermitian: Verdict<HermitianWitness>,
    pub c_selfadjoint: CVerdict,
    pub j_selfadjoint: Option<JVerdict>,
    /// Residual under the conjugation the caller asked to verify, if any.
    pub numeric_residual: Option<ResidualReport>,
    #[serde(with = "complex_opt", default)]
    pub hermitian_beta: Option<Complex64>,
}

/// Runs every classifier; `verify` optionally adds a numeric residual at
/// truncation `n`.
pub fn classify(
    symbols: &SymbolPair,
    beta: Complex64,
    lambda: Option<Complex64>,
    verify: Option<(&ConjugationSpec, usize)>,
) -> Result<ClassificationReport> {
    let hermitian = classify_hermitian(symbols);
    let hermitian_beta = if hermitian.holds {
        Some(hermitian_to_conjugation(symbols)?.beta())
    } else {
        None
    };
    Ok(ClassificationReport {
        hermitian,
        c_selfadjoint: CVerdict {
            beta,
            verdict: classify_c_selfadjoint(symbols, beta)?,
        },
        j_selfadjoint: lambda
            .map(|l| {
                classify_j_selfadjoint(symbols, l).map(|verdict| JVerdict { lambda: l, verdict })
            })
            .transpose()?,
        numeric_residual: verify.map(|(c, n)| residual(symbols, c, n)).transpose()?,
        hermitian_beta,
    })
}
