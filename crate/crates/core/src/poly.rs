//! Dense complex polynomials in ascending-degree coefficient form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::json::complex_vec;

/// Coefficients with modulus at or below this are treated as zero when
/// trimming trailing terms.
pub const TRIM_TOLERANCE: f64 = 1e-13;

/// A polynomial `sum_k coeffs[k] z^k`.
///
/// The canonical form has a nonzero trailing coefficient; the zero polynomial
/// is stored with no coefficients at all.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "complex_vec")]
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial and brings it to canonical form.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.normalize();
        p
    }

    /// Builds a polynomial from its coefficients without trimming.
    pub fn from_raw(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// Drops trailing coefficients of modulus `<= TRIM_TOLERANCE`.
    pub fn normalize(&mut self) {
        while self
            .coeffs
            .last()
            .is_some_and(|c| c.norm() <= TRIM_TOLERANCE)
        {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero past the end.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as degree 0, which is what the
    /// degree-bound checks of the classifiers want.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, m: usize) -> Self {
        (0..m).fold(self.clone(), |p, _| p.derivative())
    }

    /// `p^{(m)}(z)` by repeated differentiation and Horner evaluation.
    pub fn derivative_at(&self, z: Complex64, m: usize) -> Complex64 {
        self.nth_derivative(m).eval(z)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Conjugates every coefficient: the polynomial `conj(p(conj z))`.
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Quotient and remainder of division by `divisor`.
    ///
    /// # Panics
    /// Panics if `divisor` is the zero polynomial.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Complex64::new(0.0, 0.0); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= q * d;
            }
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Largest coefficient modulus, zero for the zero polynomial.
    pub fn max_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Poly::constant(Complex64::new(1.0, 0.0)), |acc, _| &acc * self)
    }

    /// Coefficientwise distance `max_k |p_k - q_k|`.
    pub fn distance(&self, other: &Poly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<Complex64>> for Poly {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs)
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

macro_rules! forward_owned_binop {
    ($Op:ident, $op:ident) => {
        impl $Op for Poly {
            type Output = Poly;
            fn $op(self, rhs: Poly) -> Poly {
                (&self).$op(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            match k {
                0 => {}
                1 => write!(f, "*z")?,
                _ => write!(f, "*z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Shorthand for building complex scalars in tests and examples.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Poly::zero().eval(c64(0.3, 0.1)), c64(0.0, 0.0));
        assert_eq!(Poly::from_real(&[1.0, 2.0]).eval(c64(0.5, 0.0)), c64(2.0, 0.0));
        assert_eq!(Poly::from_real(&[2.0, 0.0, 1.0]).eval(c64(0.0, 1.0)), c64(1.0, 0.0));
    }

    #[test]
    fn derivative_examples() {
        assert!(Poly::from_real(&[5.0]).derivative().is_zero());
        assert_eq!(
            Poly::from_real(&[0.0, 0.0, 1.0]).derivative(),
            Poly::from_real(&[0.0, 2.0])
        );
        assert_eq!(
            Poly::from_real(&[1.0, 2.0, 3.0]).derivative(),
            Poly::from_real(&[2.0, 6.0])
        );
    }

    #[test]
    fn normalize_trims_tiny_tail() {
        let p = Poly::new(vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(1e-14, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        let z = Poly::new(vec![c64(1e-15, 0.0)]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn div_rem_recovers_factor() {
        let a = Poly::new(vec![c64(1.0, 2.0), c64(-0.5, 0.0), c64(0.0, 1.0)]);
        let b = Poly::new(vec![c64(1.0, 0.0), c64(-0.25, 0.5)]);
        let (q, r) = (&a * &b).div_rem(&b);
        assert!(q.distance(&a) < 1e-14);
        assert!(r.is_zero());

        let (q, r) = Poly::from_real(&[1.0, 0.0, 1.0]).div_rem(&Poly::from_real(&[-1.0, 1.0]));
        assert_eq!(q, Poly::from_real(&[1.0, 1.0]));
        assert_eq!(r, Poly::from_real(&[2.0]));
    }

    #[test]
    fn arithmetic() {
        let p = Poly::from_real(&[1.0, 1.0]);
        assert_eq!(p.pow(3), Poly::from_real(&[1.0, 3.0, 3.0, 1.0]));
        assert!((&p - &p).is_zero());
        assert_eq!(-&p, Poly::from_real(&[-1.0, -1.0]));
    }
}
