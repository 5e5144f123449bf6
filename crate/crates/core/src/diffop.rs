//! The differential expression `E(psi0, psi1) f = psi0 f + psi1 f'`, its finite
//! sections in the monomial basis, the closed-form adjoint of the coupled family
//! `psi0 = a + b z`, `psi1 = d + c z + b z^2`, and the action of the adjoint on
//! derivative kernels.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{check_in_disk, kernel, HardyElement};
use crate::json::{complex, complex_matrix};
use crate::poly::Poly;

/// Tolerance for matching coefficients against a closed-form symbol family.
pub const SYMBOLIC_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SymbolPair {
    pub psi0: Poly,
    pub psi1: Poly,
}

impl SymbolPair {
    pub fn new(psi0: Poly, psi1: Poly) -> Self {
        Self { psi0, psi1 }
    }

    pub fn is_zero(&self) -> bool {
        self.psi0.is_zero() && self.psi1.is_zero()
    }

    /// Coefficients `(a, b, c, d)` read positionally from
    /// `psi0 = a + b z`, `psi1 = d + c z + e z^2`, with `e` returned separately.
    /// Fails if the degrees exceed 1 and 2.
    pub fn quadratic_coeffs(&self) -> Result<(FamilyParams, Complex64)> {
        if self.psi0.degree_or_zero() > 1 || self.psi1.degree_or_zero() > 2 {
            return Err(Error::FamilyMismatch(format!(
                "degrees ({}, {}) exceed (1, 2)",
                self.psi0.degree_or_zero(),
                self.psi1.degree_or_zero()
            )));
        }
        let params = FamilyParams {
            a: self.psi0.coeff(0),
            b: self.psi0.coeff(1),
            c: self.psi1.coeff(1),
            d: self.psi1.coeff(0),
        };
        Ok((params, self.psi1.coeff(2)))
    }

    /// Parameters of the coupled family, or `FamilyMismatch` when the
    /// quadratic coefficient of `psi1` differs from the linear one of `psi0`.
    pub fn family_params(&self) -> Result<FamilyParams> {
        let (params, e) = self.quadratic_coeffs()?;
        if (e - params.b).norm() > SYMBOLIC_TOLERANCE {
            return Err(Error::FamilyMismatch(format!(
                "z^2 coefficient of psi1 ({e}) differs from z coefficient of psi0 ({})",
                params.b
            )));
        }
        Ok(params)
    }
}

/// `psi0 = a + b z`, `psi1 = d + c z + b z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(with = "complex")]
    pub a: Complex64,
    #[serde(with = "complex")]
    pub b: Complex64,
    #[serde(with = "complex")]
    pub c: Complex64,
    #[serde(with = "complex")]
    pub d: Complex64,
}

impl FamilyParams {
    pub fn symbols(&self) -> SymbolPair {
        SymbolPair::new(
            Poly::new(vec![self.a, self.b]),
            Poly::new(vec![self.d, self.c, self.b]),
        )
    }
}

/// `psi0 f + psi1 f'` in exact polynomial arithmetic.
pub fn apply(symbols: &SymbolPair, f: &Poly) -> Poly {
    &(&symbols.psi0 * f) + &(&symbols.psi1 * &f.derivative())
}

/// Applies `E` to a truncated element coefficientwise. Coefficients above the
/// truncation degree of `f` are dropped.
pub fn apply_truncated(symbols: &SymbolPair, f: &HardyElement) -> HardyElement {
    let full = apply(symbols, &Poly::from_raw(f.coeffs().to_vec()));
    HardyElement::from_poly(&full, f.truncation_degree())
}

/// Dense `(N+1) x (N+1)` matrix in the orthonormal monomial basis;
/// entry `(i, j)` is `<E e_j, e_i>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    #[serde(with = "complex_matrix")]
    pub entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Self {
        assert!(entries.is_square(), "operator matrices are square");
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Truncation degree `N = dim - 1`.
    pub fn degree(&self) -> usize {
        self.dim() - 1
    }

    /// Conjugate transpose: the finite section of the adjoint.
    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix::new(self.entries.adjoint())
    }

    pub fn apply(&self, v: &HardyElement) -> HardyElement {
        let n = self.dim();
        let x = nalgebra::DVector::from_iterator(
            n,
            (0..n).map(|k| v.coeffs().get(k).copied().unwrap_or_default()),
        );
        HardyElement::new((&self.entries * x).iter().copied().collect())
    }

    /// Leading `(k+1) x (k+1)` block.
    pub fn leading_block(&self, k: usize) -> DMatrix<Complex64> {
        self.entries.view((0, 0), (k + 1, k + 1)).into_owned()
    }

    pub fn is_upper_triangular(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (j + 1..n).all(|i| self.entries[(i, j)] == Complex64::new(0.0, 0.0)))
    }
}

/// How much of `E` was lost when projecting onto degrees `<= N`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpillReport {
    /// Number of nonzero coefficients that landed above degree `N`.
    pub count: usize,
    pub max_modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub matrix: OperatorMatrix,
    pub spill: SpillReport,
}

/// Finite section of `E` on polynomials of degree `<= n`: column `j` holds the
/// coefficients of `E z^j` up to degree `n`.
pub fn truncated_matrix(symbols: &SymbolPair, n: usize) -> Truncation {
    let dim = n + 1;
    let mut entries = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut spill = SpillReport::default();
    for j in 0..dim {
        let image = apply(symbols, &Poly::monomial(Complex64::new(1.0, 0.0), j));
        for (i, &c) in image.coeffs().iter().enumerate() {
            if i < dim {
                entries[(i, j)] = c;
            } else if c != Complex64::new(0.0, 0.0) {
                spill.count += 1;
                spill.max_modulus = spill.max_modulus.max(c.norm());
            }
        }
    }
    Truncation {
        matrix: OperatorMatrix::new(entries),
        spill,
    }
}

/// Closed-form adjoint of the coupled family:
/// `(a + b z, d + c z + b z^2) -> (conj a + conj d z, conj b + conj c z + conj d z^2)`.
pub fn adjoint_symbols(symbols: &SymbolPair) -> Result<SymbolPair> {
    let FamilyParams { a, b, c, d } = symbols.family_params()?;
    Ok(FamilyParams {
        a: a.conj(),
        b: d.conj(),
        c: c.conj(),
        d: b.conj(),
    }
    .symbols())
}

/// Adjoint of `E`: symbolic when the closed form applies, otherwise the
/// conjugate transpose of the finite section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Adjoint {
    Symbolic(SymbolPair),
    Numeric { matrix: OperatorMatrix },
}

pub fn adjoint(symbols: &SymbolPair, n: usize) -> Adjoint {
    match adjoint_symbols(symbols) {
        Ok(pair) => Adjoint::Symbolic(pair),
        Err(_) => Adjoint::Numeric {
            matrix: truncated_matrix(symbols, n).matrix.adjoint(),
        },
    }
}

/// `sum_k coeff_k K_w^{[order_k]}` at a single base point `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCombination {
    #[serde(with = "complex")]
    pub w: Complex64,
    pub terms: Vec<KernelTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub order: usize,
    #[serde(with = "complex")]
    pub coeff: Complex64,
}

impl KernelCombination {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `K_w^{[order]}`, zero if absent.
    pub fn coeff(&self, order: usize) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.order == order)
            .map_or(Complex64::new(0.0, 0.0), |t| t.coeff)
    }

    /// Taylor coefficients of the combination up to degree `n`.
    pub fn expand(&self, n: usize) -> HardyElement {
        self.terms.iter().fold(HardyElement::zeros(n), |acc, t| {
            let k = kernel(self.w, t.order, n).expect("base point checked at construction");
            acc.add_scaled(t.coeff, &k)
        })
    }
}

/// `n choose k` by the multiplicative recurrence.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `E^* K_w^{[m]}` as a combination of `K_w, K_w^{[1]}, ..., K_w^{[m+1]}`:
///
/// ```text
/// conj(psi0^{(m)}(w)) K_w
///   + sum_{j=1}^{m} conj(C(m,j) psi0^{(m-j)}(w) + C(m,j-1) psi1^{(m-j+1)}(w)) K_w^{[j]}
///   + conj(psi1(w)) K_w^{[m+1]}
/// ```
///
/// Terms with an exactly zero coefficient are omitted.
pub fn adjoint_on_kernel(symbols: &SymbolPair, w: Complex64, m: usize) -> Result<KernelCombination> {
    check_in_disk(w)?;
    let d0: Vec<Complex64> = (0..=m).map(|k| symbols.psi0.derivative_at(w, k)).collect();
    let d1: Vec<Complex64> = (0..=m + 1).map(|k| symbols.psi1.derivative_at(w, k)).collect();

    let mut terms = Vec::with_capacity(m + 2);
    terms.push(KernelTerm {
        order: 0,
        coeff: d0[m].conj(),
    });
    for j in 1..=m {
        let c = d0[m - j] * binomial(m, j) + d1[m - j + 1] * binomial(m, j - 1);
        terms.push(KernelTerm {
            order: j,
            coeff: c.conj(),
        });
    }
    terms.push(KernelTerm {
        order: m + 1,
        coeff: d1[0].conj(),
    });
    terms.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
    Ok(KernelCombination { w, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::inner_product;
    use crate::poly::c64;

    fn pair(p0: &[f64], p1: &[f64]) -> SymbolPair {
        SymbolPair::new(Poly::from_real(p0), Poly::from_real(p1))
    }

    fn cpoly(c: &[(f64, f64)]) -> Poly {
        Poly::new(c.iter().map(|&(r, i)| c64(r, i)).collect())
    }

    #[test]
    fn apply_examples() {
        let s = pair(&[2.0], &[0.0, 3.0]);
        assert_eq!(
            apply(&s, &Poly::from_real(&[0.0, 0.0, 0.0, 1.0])),
            Poly::from_real(&[0.0, 0.0, 0.0, 11.0])
        );
        assert!(apply(&SymbolPair::default(), &Poly::from_real(&[1.0, 2.0, 3.0])).is_zero());
        let s = pair(&[0.0, 1.0], &[1.0, 0.0, 1.0]);
        assert_eq!(apply(&s, &Poly::from_real(&[1.0])), Poly::from_real(&[0.0, 1.0]));
    }

    #[test]
    fn truncated_matrix_examples() {
        let t = truncated_matrix(&pair(&[2.0], &[0.0, 3.0]), 3);
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [2.0, 5.0, 8.0, 11.0].iter().map(|&x| c64(x, 0.0)).collect(),
        ));
        assert_eq!(t.matrix.entries, expected);
        assert_eq!(t.spill.count, 0);

        let t = truncated_matrix(&pair(&[0.0], &[-0.5, 1.0]), 2);
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, -0.5, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 2.0].map(|x| c64(x, 0.0)),
        );
        assert_eq!(t.matrix.entries, expected);

        let t = truncated_matrix(&pair(&[1.0], &[]), 5);
        assert_eq!(t.matrix.entries, DMatrix::identity(6, 6));
    }

    #[test]
    fn spill_is_reported() {
        // E z^j = z^{j+1} + ..., so the last column spills one coefficient.
        let t = truncated_matrix(&pair(&[0.0, 1.0], &[1.0, 0.0, 1.0]), 4);
        assert_eq!(t.spill.count, 1);
        assert_eq!(t.spill.max_modulus, 5.0);
    }

    #[test]
    fn adjoint_symbols_examples() {
        let s = SymbolPair::new(
            cpoly(&[(1.0, 0.0), (0.0, 1.0)]),
            cpoly(&[(3.0, 0.0), (2.0, 0.0), (0.0, 1.0)]),
        );
        let adj = adjoint_symbols(&s).unwrap();
        assert_eq!(adj.psi0, cpoly(&[(1.0, 0.0), (3.0, 0.0)]));
        assert_eq!(adj.psi1, cpoly(&[(0.0, -1.0), (2.0, 0.0), (3.0, 0.0)]));

        assert_eq!(adjoint_symbols(&SymbolPair::default()).unwrap(), SymbolPair::default());

        let s = pair(&[2.0], &[0.0, 3.0]);
        assert_eq!(adjoint_symbols(&s).unwrap(), s);
    }

    #[test]
    fn adjoint_symbols_rejects_uncoupled() {
        assert!(matches!(
            adjoint_symbols(&pair(&[0.0, 1.0], &[0.0, 0.0, 2.0])),
            Err(Error::FamilyMismatch(_))
        ));
        assert!(matches!(
            adjoint_symbols(&pair(&[0.0, 0.0, 1.0], &[])),
            Err(Error::FamilyMismatch(_))
        ));
        assert!(matches!(
            adjoint(&pair(&[0.0], &[0.0, 0.0, 0.0, 1.0]), 4),
            Adjoint::Numeric { .. }
        ));
    }

    #[test]
    fn adjoint_on_kernel_examples() {
        let s = pair(&[2.0], &[0.0, 3.0]);
        let comb = adjoint_on_kernel(&s, c64(0.5, 0.0), 0).unwrap();
        assert_eq!(comb.terms.len(), 2);
        assert_eq!(comb.coeff(0), c64(2.0, 0.0));
        assert_eq!(comb.coeff(1), c64(1.5, 0.0));

        assert!(adjoint_on_kernel(&SymbolPair::default(), c64(0.3, 0.2), 3)
            .unwrap()
            .is_empty());

        let s = pair(&[0.0, 1.0], &[1.0, 0.0, 1.0]);
        let comb = adjoint_on_kernel(&s, c64(0.0, 0.0), 1).unwrap();
        let orders: Vec<usize> = comb.terms.iter().map(|t| t.order).collect();
        assert_eq!(orders, vec![0, 2]);
        assert_eq!(comb.coeff(0), c64(1.0, 0.0));
        assert_eq!(comb.coeff(2), c64(1.0, 0.0));

        // <E g, K_0^{[1]}> = (E g)'(0) for g = 1, z, z^2, z^3
        let k1 = kernel(c64(0.0, 0.0), 1, 8).unwrap();
        for j in 0..4 {
            let g = Poly::monomial(c64(1.0, 0.0), j);
            let lhs = inner_product(&HardyElement::from_poly(&apply(&s, &g), 8), &k1);
            let direct = apply(&s, &g).derivative_at(c64(0.0, 0.0), 1);
            let rhs = inner_product(&HardyElement::from_poly(&g, 8), &comb.expand(8));
            assert_eq!(lhs, direct);
            assert!((lhs - rhs).norm() < 1e-14);
        }

        assert!(adjoint_on_kernel(&s, c64(1.0, 0.0), 0).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(30, 15), 155117520.0);
    }

    #[test]
    fn family_tridiagonal() {
        let s = SymbolPair::new(
            cpoly(&[(0.3, -1.0), (0.2, 0.7)]),
            cpoly(&[(1.5, 0.5), (-0.4, 0.1), (0.9, 0.0)]),
        );
        let m = truncated_matrix(&s, 12).matrix;
        for i in 0..13usize {
            for j in 0..13usize {
                if i.abs_diff(j) >= 2 {
                    assert_eq!(m.entries[(i, j)], c64(0.0, 0.0));
                }
            }
        }
    }
}
