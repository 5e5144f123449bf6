//! Truncated elements of the Hardy space H^2 in the orthonormal monomial basis,
//! the H^2 inner product, and the derivative-reproducing kernels
//! `K_z^{[m]}(u) = m! u^m / (1 - conj(z) u)^{m+1}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::complex_vec;
use crate::poly::Poly;

/// Taylor coefficients `f_0, ..., f_N` of an element of H^2.
///
/// Monomials are orthonormal, so the inner product is the plain l^2 sum of
/// coefficient products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HardyElement {
    #[serde(with = "complex_vec")]
    coeffs: Vec<Complex64>,
}

impl HardyElement {
    /// # Panics
    /// Panics on an empty coefficient vector; the truncation degree must be
    /// at least 0.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a HardyElement needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n + 1],
        }
    }

    /// The monomial `z^k` truncated to degree `n` (zero if `k > n`).
    pub fn monomial(k: usize, n: usize) -> Self {
        let mut e = Self::zeros(n);
        if k <= n {
            e.coeffs[k] = Complex64::new(1.0, 0.0);
        }
        e
    }

    /// Coefficients of `p` padded or cut to degree `n`.
    pub fn from_poly(p: &Poly, n: usize) -> Self {
        Self {
            coeffs: (0..=n).map(|k| p.coeff(k)).collect(),
        }
    }

    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Same element re-truncated to degree `n`.
    pub fn resized(&self, n: usize) -> Self {
        Self {
            coeffs: (0..=n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or_default())
                .collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// `self + c * other`, padded to the longer truncation.
    pub fn add_scaled(&self, c: Complex64, other: &HardyElement) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_default()
                        + c * other.coeffs.get(k).copied().unwrap_or_default()
                })
                .collect(),
        }
    }

    /// `||self - other||` with zero padding.
    pub fn distance(&self, other: &HardyElement) -> f64 {
        self.add_scaled(Complex64::new(-1.0, 0.0), other).norm()
    }
}

/// `<f, g> = sum_n f_n conj(g_n)`; the shorter vector is zero-padded.
pub fn inner_product(f: &HardyElement, g: &HardyElement) -> Complex64 {
    f.coeffs
        .iter()
        .zip(&g.coeffs)
        .map(|(a, b)| a * b.conj())
        .sum()
}

/// The kernel `K_z^{[m]}`; `z` is checked to lie in the open disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    z: Complex64,
    m: usize,
}

impl KernelSpec {
    pub fn new(z: Complex64, m: usize) -> Result<Self> {
        check_in_disk(z)?;
        Ok(Self { z, m })
    }

    pub fn point(&self) -> Complex64 {
        self.z
    }

    pub fn order(&self) -> usize {
        self.m
    }
}

pub(crate) fn check_in_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDisk(z))
    }
}

/// Taylor coefficients of `K_z^{[m]}` up to degree `n`.
///
/// The coefficient of `u^k` is `0` for `k < m` and `m! C(k, m) conj(z)^{k-m}`
/// otherwise, generated by the multiplicative recurrence
/// `c_{k+1} = c_k (k+1)/(k+1-m) conj(z)`. If `n < m` the result is zero.
pub fn kernel_coefficients(spec: KernelSpec, n: usize) -> HardyElement {
    let m = spec.m;
    let zb = spec.z.conj();
    let mut out = HardyElement::zeros(n);
    if n < m {
        return out;
    }
    let mut c = Complex64::new((1..=m).map(|k| k as f64).product::<f64>(), 0.0);
    out.coeffs[m] = c;
    for k in m..n {
        c *= zb * ((k + 1) as f64 / (k + 1 - m) as f64);
        out.coeffs[k + 1] = c;
    }
    out
}

/// Shorthand for `kernel_coefficients(KernelSpec::new(z, m)?, n)`.
pub fn kernel(z: Complex64, m: usize, n: usize) -> Result<HardyElement> {
    Ok(kernel_coefficients(KernelSpec::new(z, m)?, n))
}

/// `f^{(m)}(z) = <f, K_z^{[m]}>` with the kernel cut at the truncation degree of `f`.
pub fn derivative_at(f: &HardyElement, z: Complex64, m: usize) -> Result<Complex64> {
    let k = kernel(z, m, f.truncation_degree())?;
    Ok(inner_product(f, &k))
}
