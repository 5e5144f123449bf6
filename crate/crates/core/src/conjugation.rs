//! Weighted composition conjugations on H^2.
//!
//! * `C_{alpha,beta} f(z) = alpha conj(f(beta conj z))` with `|alpha| = |beta| = 1`.
//!   In coefficients: `a_n -> alpha conj(beta)^n conj(a_n)`.
//! * `J_{beta,lambda} f(z) = beta kappa(z) conj(f(conj(phi(z))))` with
//!   `kappa(z) = sqrt(1 - |lambda|^2) / (1 - z conj(lambda))` and
//!   `phi(z) = (conj(lambda)/lambda) (lambda - z) / (1 - z conj(lambda))`.
//!   Since `conj(f(conj(u))) = sum conj(a_n) u^n`, this is
//!   `beta kappa(z) sum_n conj(a_n) phi(z)^n`, evaluated by power-series
//!   composition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffop::SymbolPair;
use crate::error::{Error, Result};
use crate::hardy::HardyElement;
use crate::json::complex;
use crate::poly::Poly;

/// Unimodularity tolerance for `alpha` and `beta`.
pub const UNIMODULAR_TOLERANCE: f64 = 1e-12;

/// Remainder tolerance when reducing a conjugated symbol to a polynomial.
pub const REMAINDER_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_unimodular(name: &str, x: Complex64) -> Result<()> {
    if (x.norm() - 1.0).abs() <= UNIMODULAR_TOLERANCE {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("|{name}| = {} is not 1", x.norm())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CAlphaBeta {
    alpha: Complex64,
    beta: Complex64,
}

impl CAlphaBeta {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        check_unimodular("alpha", alpha)?;
        check_unimodular("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Diagonal of the coefficient action: `alpha conj(beta)^n`.
    fn weight(&self, n: usize) -> Complex64 {
        self.alpha * self.beta.conj().powu(n as u32)
    }

    /// Diagonal anti-linear matrix of size `n + 1`.
    pub fn matrix(&self, n: usize) -> AntiLinearMatrix {
        let mut w = self.alpha;
        let step = self.beta.conj();
        let diag = DVector::from_iterator(
            n + 1,
            (0..=n).map(|_| {
                let cur = w;
                w *= step;
                cur
            }),
        );
        AntiLinearMatrix::new(DMatrix::from_diagonal(&diag))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JBetaLambda {
    beta: Complex64,
    lambda: Complex64,
}

impl JBetaLambda {
    /// `lambda = 0` is rejected: that limit belongs to the `C` family.
    pub fn new(beta: Complex64, lambda: Complex64) -> Result<Self> {
        check_unimodular("beta", beta)?;
        let r = lambda.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} must satisfy 0 < |lambda| < 1"
            )));
        }
        Ok(Self { beta, lambda })
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    fn scale(&self) -> f64 {
        (1.0 - self.lambda.norm_sqr()).sqrt()
    }

    pub fn kappa(&self, z: Complex64) -> Complex64 {
        self.scale() / (ONE - z * self.lambda.conj())
    }

    pub fn kappa_prime(&self, z: Complex64) -> Complex64 {
        let q = ONE - z * self.lambda.conj();
        self.scale() * self.lambda.conj() / (q * q)
    }

    pub fn phi(&self, z: Complex64) -> Complex64 {
        let l = self.lambda;
        (l.conj() / l) * (l - z) / (ONE - z * l.conj())
    }

    pub fn phi_prime(&self, z: Complex64) -> Complex64 {
        let l = self.lambda;
        let q = ONE - z * l.conj();
        (l.conj() / l) * (l.norm_sqr() - 1.0) / (q * q)
    }

    /// Taylor coefficients of `kappa` to degree `n`.
    pub fn kappa_series(&self, n: usize) -> Vec<Complex64> {
        geometric(self.lambda.conj(), n)
            .into_iter()
            .map(|c| c * self.scale())
            .collect()
    }

    /// Taylor coefficients of `phi` to degree `n`.
    pub fn phi_series(&self, n: usize) -> Vec<Complex64> {
        let l = self.lambda;
        let lb = l.conj();
        let unit = lb / l;
        let mut out = Vec::with_capacity(n + 1);
        out.push(lb);
        let mut pow = ONE; // conj(lambda)^{k-1}
        for _ in 1..=n {
            out.push(unit * pow * (l.norm_sqr() - 1.0));
            pow *= lb;
        }
        out
    }

    /// Anti-linear matrix of size `n + 1`; column `j` holds the coefficients of
    /// `beta kappa phi^j` truncated to degree `n`.
    pub fn matrix(&self, n: usize) -> AntiLinearMatrix {
        let dim = n + 1;
        let phi = self.phi_series(n);
        let mut col: Vec<Complex64> = self
            .kappa_series(n)
            .into_iter()
            .map(|c| c * self.beta)
            .collect();
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for j in 0..dim {
            for (i, &c) in col.iter().enumerate() {
                m[(i, j)] = c;
            }
            col = series_mul(&col, &phi, n);
        }
        AntiLinearMatrix::new(m)
    }
}

fn geometric(ratio: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = ONE;
    for _ in 0..=n {
        out.push(c);
        c *= ratio;
    }
    out
}

/// Product of two power series truncated to degree `n`.
pub(crate) fn series_mul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n + 1];
    for (i, &x) in a.iter().enumerate().take(n + 1) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Either conjugation family; the JSON form is
/// `{"kind": "C", "alpha": [re,im], "beta": [re,im]}` or
/// `{"kind": "J", "beta": [re,im], "lambda": [re,im]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConjugation", into = "RawConjugation")]
pub enum ConjugationSpec {
    C(CAlphaBeta),
    J(JBetaLambda),
}

impl ConjugationSpec {
    /// Matrix of the conjugation on polynomials of degree `<= n`; exact for
    /// `C`, a finite section for `J`.
    pub fn matrix(&self, n: usize) -> AntiLinearMatrix {
        match self {
            ConjugationSpec::C(c) => c.matrix(n),
            ConjugationSpec::J(j) => j.matrix(n),
        }
    }

    /// Pushforward `(psi0, psi1) -> symbols of 𝒞 E 𝒞`.
    pub fn conjugated_symbols(&self, symbols: &SymbolPair) -> Result<SymbolPair> {
        match self {
            ConjugationSpec::C(c) => Ok(conjugated_symbols_c(c, symbols)),
            ConjugationSpec::J(j) => conjugated_symbols_j(j, symbols),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum RawConjugation {
    C {
        #[serde(with = "complex")]
        alpha: Complex64,
        #[serde(with = "complex")]
        beta: Complex64,
    },
    J {
        #[serde(with = "complex")]
        beta: Complex64,
        #[serde(with = "complex")]
        lambda: Complex64,
    },
}

impl TryFrom<RawConjugation> for ConjugationSpec {
    type Error = Error;

    fn try_from(raw: RawConjugation) -> Result<Self> {
        match raw {
            RawConjugation::C { alpha, beta } => CAlphaBeta::new(alpha, beta).map(Self::C),
            RawConjugation::J { beta, lambda } => JBetaLambda::new(beta, lambda).map(Self::J),
        }
    }
}

impl From<ConjugationSpec> for RawConjugation {
    fn from(spec: ConjugationSpec) -> Self {
        match spec {
            ConjugationSpec::C(c) => RawConjugation::C {
                alpha: c.alpha,
                beta: c.beta,
            },
            ConjugationSpec::J(j) => RawConjugation::J {
                beta: j.beta,
                lambda: j.lambda,
            },
        }
    }
}

/// Matrix `M` of an anti-linear map acting as `v -> M conj(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiLinearMatrix {
    pub entries: DMatrix<Complex64>,
}

impl AntiLinearMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Self {
        assert!(entries.is_square());
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, v: &HardyElement) -> HardyElement {
        let n = self.dim();
        let x = DVector::from_iterator(
            n,
            (0..n).map(|k| v.coeffs().get(k).copied().unwrap_or_default().conj()),
        );
        HardyElement::new((&self.entries * x).iter().copied().collect())
    }

    /// The linear map `self ∘ other`, i.e. `M1 conj(M2)`.
    pub fn compose(&self, other: &AntiLinearMatrix) -> DMatrix<Complex64> {
        &self.entries * other.entries.map(|c| c.conj())
    }

    /// The linear map `self ∘ L ∘ self` for a linear `L`: `M conj(L) conj(M)`.
    pub fn sandwich(&self, linear: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        &self.entries * linear.map(|c| c.conj()) * self.entries.map(|c| c.conj())
    }

    /// Axiom residuals on vectors of degree `<= test_degree`: every monomial
    /// plus a fixed set of seeded random vectors.
    pub fn axioms(&self, test_degree: usize) -> AxiomReport {
        let n = self.dim() - 1;
        let d = test_degree.min(n);
        let mut report = AxiomReport::default();
        for v in test_vectors(d, n) {
            let once = self.apply(&v);
            let twice = self.apply(&once);
            report.record(&v, &once, &twice, d);
        }
        report
    }
}
const RANDOM_TEST_VECTORS: usize = 16;
const TEST_SEED: u64 = 0x5eed_c0de;

/// Unit-norm test vectors of degree `<= degree`, padded to length `n + 1`.
fn test_vectors(degree: usize, n: usize) -> Vec<HardyElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(TEST_SEED);
    let mut out: Vec<HardyElement> = (0..=degree).map(|k| HardyElement::monomial(k, n)).collect();
    for _ in 0..RANDOM_TEST_VECTORS {
        let mut v = HardyElement::zeros(n);
        for c in v.coeffs_mut().iter_mut().take(degree + 1) {
            *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        let norm = v.norm();
        out.push(v.scaled(Complex64::new(1.0 / norm, 0.0)));
    }
    out
}

/// Residuals of the conjugation axioms on a set of unit test vectors `v` of
/// degree `<= d`.
///
/// * `isometry`: `max | ||Cv|| - ||v|| |`.
/// * `involution`: `max ||P_d C C v - v||`, where `P_d` keeps degrees `<= d`.
/// * `involution_full`: `max ||C C v - v||` over the whole truncated vector. For
///   `J` this also carries the truncation tail of `Jv` above degree `N`, which
///   does not vanish with the test degree.
///
/// Anti-linearity holds by construction of the `v -> M conj(v)` action and is
/// reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxiomReport {
    pub anti_linearity: f64,
    pub isometry: f64,
    pub involution: f64,
    pub involution_full: f64,
}

impl AxiomReport {
    pub fn max(&self) -> f64 {
        self.anti_linearity
            .max(self.isometry)
            .max(self.involution)
            .max(self.involution_full)
    }

    fn record(&mut self, v: &HardyElement, once: &HardyElement, twice: &HardyElement, d: usize) {
        self.isometry = self.isometry.max((once.norm() - v.norm()).abs());
        self.involution = self.involution.max(twice.resized(d).distance(&v.resized(d)));
        self.involution_full = self.involution_full.max(twice.distance(v));
    }
}

/// Axiom residuals at truncation `n` on test vectors of degree `<= test_degree`.
/// The `C` family is checked through [`apply_c`] directly.
pub fn conjugation_axioms(spec: &ConjugationSpec, n: usize, test_degree: usize) -> AxiomReport {
    match spec {
        ConjugationSpec::C(c) => {
            let d = test_degree.min(n);
            let mut report = AxiomReport::default();
            for v in test_vectors(d, n) {
                let once = apply_c(c, &v);
                let twice = apply_c(c, &once);
                report.record(&v, &once, &twice, d);
            }
            report
        }
        ConjugationSpec::J(j) => j.matrix(n).axioms(test_degree),
    }
}

/// Full-vector involution residual of `J_{beta,lambda}` at each truncation in
/// `truncations`, all measured on the same test vectors of degree `<= test_degree`.
pub fn involution_calibration(
    conj: &JBetaLambda,
    truncations: &[usize],
    test_degree: usize,
) -> Vec<(usize, f64)> {
    truncations
        .iter()
        .map(|&n| {
            let m = conj.matrix(n);
            let worst = test_vectors(test_degree.min(n), n)
                .iter()
                .map(|v| m.apply(&m.apply(v)).distance(v))
                .fold(0.0, f64::max);
            (n, worst)
        })
        .collect()
}

pub fn apply_c(conj: &CAlphaBeta, f: &HardyElement) -> HardyElement {
    HardyElement::new(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(n, a)| conj.weight(n) * a.conj())
            .collect(),
    )
}

/// `J_{beta,lambda} f` truncated to degree `n`.
pub fn apply_j(conj: &JBetaLambda, f: &HardyElement, n: usize) -> HardyElement {
    let phi = conj.phi_series(n);
    let mut power = vec![ZERO; n + 1];
    power[0] = ONE;
    let mut acc = vec![ZERO; n + 1];
    let last = f
        .coeffs()
        .iter()
        .rposition(|&c| c != ZERO)
        .unwrap_or(0);
    for (k, a) in f.coeffs().iter().enumerate().take(last + 1) {
        if k > 0 {
            power = series_mul(&power, &phi, n);
        }
        let w = a.conj();
        for (s, p) in acc.iter_mut().zip(&power) {
            *s += w * p;
        }
    }
    let out = series_mul(&conj.kappa_series(n), &acc, n);
    HardyElement::new(out.into_iter().map(|c| c * conj.beta).collect())
}

/// Symbols of `C E C`: `conj(psi0(beta conj z))` and `beta conj(psi1(beta conj z))`,
/// i.e. `p_k -> conj(p_k) conj(beta)^k`, times `beta` for `psi1`.
pub fn conjugated_symbols_c(conj: &CAlphaBeta, symbols: &SymbolPair) -> SymbolPair {
    let push = |p: &Poly, factor: Complex64| {
        Poly::new(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.conj() * conj.beta.conj().powu(k as u32) * factor)
                .collect(),
        )
    };
    SymbolPair::new(push(&symbols.psi0, ONE), push(&symbols.psi1, conj.beta))
}

/// `num / q^power` with `q(z) = 1 - conj(lambda) z`.
struct QRational {
    num: Poly,
    power: usize,
}

impl QRational {
    fn lift(&self, power: usize, q: &Poly) -> Poly {
        &self.num * &q.pow(power - self.power)
    }

    fn add(self, other: QRational, q: &Poly) -> QRational {
        let power = self.power.max(other.power);
        QRational {
            num: &self.lift(power, q) + &other.lift(power, q),
            power,
        }
    }

    /// Cancels factors of `q`; fails with the first nonvanishing remainder.
    fn into_poly(mut self, q: &Poly) -> Result<Poly> {
        while self.power > 0 {
            if self.num.is_zero() {
                return Ok(Poly::zero());
            }
            let scale = self.num.max_modulus().max(1.0);
            let (quot, rem) = self.num.div_rem(q);
            let r = rem.max_modulus();
            if r > REMAINDER_TOLERANCE * scale {
                return Err(Error::NotPolynomial { remainder: r });
            }
            self.num = quot;
            self.power -= 1;
        }
        Ok(self.num)
    }
}

/// `conj(psi(conj(phi(z))))` as a rational function in `q`.
fn compose_conj_phi(conj: &JBetaLambda, psi: &Poly, q: &Poly) -> QRational {
    let l = conj.lambda;
    let t = Poly::new(vec![l.conj(), -(l.conj() / l)]); // (conj λ/λ)(λ - z)
    let d = psi.degree_or_zero();
    let num = psi
        .coeffs()
        .iter()
        .enumerate()
        .fold(Poly::zero(), |acc, (k, p)| {
            &acc + &(&t.pow(k) * &q.pow(d - k)).scale(p.conj())
        });
    QRational { num, power: d }
}

/// Symbols of `J E J`:
///
/// ```text
/// psi0'(z) = conj(psi0(conj phi(z))) + lambda (1 - z conj λ) conj(psi1(conj phi(z))) / (1 - |λ|^2)
/// psi1'(z) = -lambda (1 - z conj λ)^2 conj(psi1(conj phi(z))) / (conj λ (1 - |λ|^2))
/// ```
///
/// computed exactly as rational functions with powers of `1 - z conj λ` in the
/// denominator, then reduced. `NotPolynomial` is returned when a remainder
/// survives; for degrees `(<= 1, <= 2)` that happens exactly when the `z^2`
/// coefficient of `psi1` differs from the `z` coefficient of `psi0`.
pub fn conjugated_symbols_j(conj: &JBetaLambda, symbols: &SymbolPair) -> Result<SymbolPair> {
    let l = conj.lambda;
    let rho = 1.0 - l.norm_sqr();
    let q = Poly::new(vec![ONE, -l.conj()]);

    let c0 = compose_conj_phi(conj, &symbols.psi0, &q);
    let c1 = compose_conj_phi(conj, &symbols.psi1, &q);

    let psi1 = QRational {
        num: (&q * &q).scale(-l / (l.conj() * rho)) * c1.num.clone(),
        power: c1.power,
    };
    let cross = QRational {
        num: q.scale(l / rho) * c1.num,
        power: c1.power,
    };
    let psi0 = c0.add(cross, &q);
    Ok(SymbolPair::new(psi0.into_poly(&q)?, psi1.into_poly(&q)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::kernel;
    use crate::poly::c64;
    use approx::assert_abs_diff_eq;

    fn el(c: &[Complex64]) -> HardyElement {
        HardyElement::new(c.to_vec())
    }

    #[test]
    fn construction_checks() {
        assert!(CAlphaBeta::new(c64(1.0, 0.0), c64(0.0, 1.0)).is_ok());
        assert!(CAlphaBeta::new(c64(1.1, 0.0), c64(0.0, 1.0)).is_err());
        assert!(JBetaLambda::new(c64(1.0, 0.0), c64(0.0, 0.0)).is_err());
        assert!(JBetaLambda::new(c64(1.0, 0.0), c64(1.0, 0.0)).is_err());
        assert!(JBetaLambda::new(c64(0.5, 0.0), c64(0.5, 0.0)).is_err());
        assert!(JBetaLambda::new(c64(-1.0, 0.0), c64(0.3, -0.4)).is_ok());
    }

    #[test]
    fn apply_c_examples() {
        let c = CAlphaBeta::new(c64(0.0, 1.0), c64(-1.0, 0.0)).unwrap();
        let f = el(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
        assert_eq!(apply_c(&c, &f), el(&[c64(0.0, 1.0), c64(0.0, -2.0)]));
        assert_eq!(apply_c(&c, &apply_c(&c, &f)), f);

        let id = CAlphaBeta::new(ONE, ONE).unwrap();
        let f = el(&[c64(1.5, 0.0), c64(-2.0, 0.0), c64(0.25, 0.0)]);
        assert_eq!(apply_c(&id, &f), f);
    }

    #[test]
    fn apply_c_maps_kernels_to_kernels() {
        let c = CAlphaBeta::new(c64(0.6, 0.8), c64(0.0, -1.0)).unwrap();
        let z = c64(0.3, -0.45);
        let got = apply_c(&c, &kernel(z, 0, 40).unwrap());
        let want = kernel(c.beta() * z.conj(), 0, 40).unwrap().scaled(c.alpha());
        for (a, b) in got.coeffs().iter().zip(want.coeffs()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn apply_j_examples() {
        let j = JBetaLambda::new(ONE, c64(0.5, 0.0)).unwrap();
        let s3 = 3f64.sqrt();
        let out = apply_j(&j, &HardyElement::monomial(0, 10), 10);
        for (n, c) in out.coeffs().iter().enumerate() {
            assert_abs_diff_eq!((c - s3 / 2.0 * 0.5f64.powi(n as i32)).norm(), 0.0, epsilon = 1e-15);
        }

        let k = kernel(c64(0.5, 0.0), 0, 128).unwrap();
        let out = apply_j(&j, &k, 128);
        assert_abs_diff_eq!((out.coeffs()[0] - 2.0 / s3).norm(), 0.0, epsilon = 1e-12);
        assert!(out.coeffs()[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn apply_j_is_involutive_on_low_degrees() {
        let j = JBetaLambda::new(ONE, c64(0.5, 0.0)).unwrap();
        for k in [0, 1, 5, 17, 24] {
            let e = HardyElement::monomial(k, 128);
            let back = apply_j(&j, &apply_j(&j, &e, 128), 128);
            assert!(back.distance(&e) < 1e-8, "k = {k}: {}", back.distance(&e));
        }
    }

    #[test]
    fn involution_defect_is_bounded_by_truncated_tail() {
        // J is an isometric involution, so ||J P_N J e_k - e_k|| <= ||(I - P_N) J e_k||.
        let j = JBetaLambda::new(ONE, c64(0.5, 0.0)).unwrap();
        let k = 32;
        let wide = apply_j(&j, &HardyElement::monomial(k, 512), 512);
        let tail = wide.coeffs()[129..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let e = HardyElement::monomial(k, 128);
        let back = apply_j(&j, &apply_j(&j, &e, 128), 128);
        assert!(back.distance(&e) <= tail * (1.0 + 1e-6));
        // and on the test subspace itself the defect is negligible
        assert!(back.resized(k).distance(&e.resized(k)) < 1e-8);
    }

    #[test]
    fn j_matrix_examples() {
        let j = JBetaLambda::new(ONE, c64(0.5, 0.0)).unwrap();
        let m = j.matrix(0);
        assert_abs_diff_eq!((m.entries[(0, 0)] - 3f64.sqrt() / 2.0).norm(), 0.0, epsilon = 1e-15);

        let m = j.matrix(128);
        let sq = m.compose(&m);
        for r in 0..=32 {
            for c in 0..=32 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((sq[(r, c)] - want).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn j_matrix_agrees_with_apply_j() {
        let j = JBetaLambda::new(c64(0.6, -0.8), c64(-0.2, 0.35)).unwrap();
        let m = j.matrix(64);
        let v = el(&(0..=32).map(|k| c64((k as f64).sin(), (k as f64 * 0.7).cos())).collect::<Vec<_>>());
        let a = m.apply(&v);
        let b = apply_j(&j, &v, 64);
        assert!(a.distance(&b) < 1e-8);
    }

    #[test]
    fn j_matrix_columns_decay_below_diagonal() {
        let lam = 0.5;
        let j = JBetaLambda::new(ONE, c64(lam, 0.0)).unwrap();
        let m = j.matrix(40);
        // |M[i][j]| <= C |lambda|^{i-j} with C fitted on the first 20 rows
        for col in 0..8 {
            let c = (col + 1..col + 20)
                .map(|i| m.entries[(i, col)].norm() / lam.powi((i - col) as i32))
                .fold(0.0, f64::max);
            for i in col + 20..=40 {
                let bound = c * lam.powi((i - col) as i32) * ((i - col) as f64).powi(col as i32 + 1);
                assert!(m.entries[(i, col)].norm() <= bound);
            }
        }
    }

    #[test]
    fn series_agree_with_closed_forms() {
        let j = JBetaLambda::new(ONE, c64(0.3, 0.4)).unwrap();
        let z = c64(0.1, -0.2);
        let eval = |s: &[Complex64]| Poly::from_raw(s.to_vec()).eval(z);
        assert_abs_diff_eq!((eval(&j.kappa_series(80)) - j.kappa(z)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((eval(&j.phi_series(80)) - j.phi(z)).norm(), 0.0, epsilon = 1e-14);
        let h = 1e-6;
        let fd = (j.phi(z + h) - j.phi(z - h)) / (2.0 * h);
        assert_abs_diff_eq!((fd - j.phi_prime(z)).norm(), 0.0, epsilon = 1e-8);
        let fd = (j.kappa(z + h) - j.kappa(z - h)) / (2.0 * h);
        assert_abs_diff_eq!((fd - j.kappa_prime(z)).norm(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn conjugated_symbols_c_examples() {
        let s = SymbolPair::new(Poly::from_real(&[1.0, -2.0]), Poly::from_real(&[0.5, 0.0, 3.0]));
        let id = CAlphaBeta::new(ONE, ONE).unwrap();
        assert_eq!(conjugated_symbols_c(&id, &s), s);

        let flip = CAlphaBeta::new(ONE, c64(-1.0, 0.0)).unwrap();
        let s = SymbolPair::new(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[1.0, 0.0, 1.0]));
        let got = conjugated_symbols_c(&flip, &s);
        assert_eq!(got.psi0, Poly::from_real(&[0.0, -1.0]));
        assert_eq!(got.psi1, Poly::from_real(&[-1.0, 0.0, -1.0]));

        assert!(conjugated_symbols_c(&flip, &SymbolPair::default()).is_zero());
    }

    #[test]
    fn conjugated_symbols_j_examples() {
        let j = JBetaLambda::new(ONE, c64(0.5, 0.0)).unwrap();
        let s = SymbolPair::new(Poly::zero(), Poly::from_real(&[-0.5, 1.0]));
        let got = conjugated_symbols_j(&j, &s).unwrap();
        assert!(got.psi1.distance(&Poly::from_real(&[0.0, 1.0, -0.5])) < 1e-12);
        assert!(got.psi0.distance(&Poly::from_real(&[0.0, -0.5])) < 1e-12);

        let a = c64(0.7, -1.3);
        let s = SymbolPair::new(Poly::constant(a), Poly::zero());
        let got = conjugated_symbols_j(&j, &s).unwrap();
        assert!(got.psi0.distance(&Poly::constant(a.conj())) < 1e-12);
        assert!(got.psi1.is_zero());
    }

    #[test]
    fn conjugated_symbols_j_uncoupled_quadratic_is_not_polynomial() {
        let j = JBetaLambda::new(ONE, c64(0.5, 0.0)).unwrap();
        let s = SymbolPair::new(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[0.0, 0.0, 2.0]));
        assert!(matches!(conjugated_symbols_j(&j, &s), Err(Error::NotPolynomial { .. })));
    }

    #[test]
    fn conjugated_symbols_j_of_constant_psi1() {
        // (0, 1) is outside the J-selfadjoint family, yet the pushforward is
        // polynomial: psi0' = λ(1 - zλ̄)/(1-|λ|²), psi1' = -λ(1 - zλ̄)²/(λ̄(1-|λ|²)).
        let l = 0.5;
        let j = JBetaLambda::new(ONE, c64(l, 0.0)).unwrap();
        let s = SymbolPair::new(Poly::zero(), Poly::from_real(&[1.0]));
        let got = conjugated_symbols_j(&j, &s).unwrap();
        let rho = 1.0 - l * l;
        assert!(got.psi0.distance(&Poly::from_real(&[l / rho, -l * l / rho])) < 1e-12);
        assert!(got.psi1.distance(&Poly::from_real(&[-1.0 / rho, 2.0 * l / rho, -l * l / rho])) < 1e-12);
        assert_ne!(Some(got), crate::diffop::adjoint_symbols(&s).ok());
    }

    #[test]
    fn c_axioms_are_exact() {
        // multiplication by ±1, ±i is exact in floating point
        let units = [ONE, c64(-1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0)];
        for a in units {
            for b in units {
                let spec = ConjugationSpec::C(CAlphaBeta::new(a, b).unwrap());
                assert_eq!(conjugation_axioms(&spec, 64, 32).max(), 0.0);
            }
        }
        // generic unimodular weights round at the last bit
        let spec = ConjugationSpec::C(CAlphaBeta::new(c64(0.6, 0.8), Complex64::from_polar(1.0, 2.4)).unwrap());
        assert!(conjugation_axioms(&spec, 64, 32).max() < 1e-14);
    }

    #[test]
    fn j_axioms_at_calibrated_truncation() {
        let spec = ConjugationSpec::J(JBetaLambda::new(c64(0.0, 1.0), c64(0.3, -0.4)).unwrap());
        let r = conjugation_axioms(&spec, 128, 32);
        assert!(r.isometry < 1e-8 && r.involution < 1e-8, "{r:?}");
    }

    #[test]
    fn calibration_decreases_with_truncation() {
        let j = JBetaLambda::new(ONE, c64(0.5, 0.0)).unwrap();
        let cal = involution_calibration(&j, &[32, 64, 128, 256], 32);
        for w in cal.windows(2) {
            assert!(w[1].1 < w[0].1, "{cal:?}");
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ConjugationSpec::J(JBetaLambda::new(c64(0.0, 1.0), c64(0.25, -0.5)).unwrap());
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"J","beta":[0.0,1.0],"lambda":[0.25,-0.5]}"#);
        let back: ConjugationSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);

        let c: ConjugationSpec = serde_json::from_str(r#"{"kind":"C","alpha":[1,0],"beta":[0,-1]}"#).unwrap();
        assert!(matches!(c, ConjugationSpec::C(_)));
        assert!(serde_json::from_str::<ConjugationSpec>(r#"{"kind":"C","alpha":[2,0],"beta":[1,0]}"#).is_err());
        assert!(serde_json::from_str::<ConjugationSpec>(r#"{"kind":"J","beta":[1,0],"lambda":[0,0]}"#).is_err());
    }
}
