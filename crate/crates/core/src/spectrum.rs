//! Point spectrum at a zero `u` of `psi1`: the candidate list
//! `psi0(u) + k psi1'(u)`, the triangular matrix of `E*` on
//! `K_u, K_u^{[1]}, ..., K_u^{[m]}`, power-series eigenfunctions, and
//! eigenvalues of finite sections.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conjugation::ConjugationSpec;
use crate::diffop::{adjoint_on_kernel, apply_truncated, truncated_matrix, OperatorMatrix, SymbolPair};
use crate::eigen::{eigenvalues, sort_lexicographic};
use crate::error::{Error, Result};
use crate::hardy::{check_in_disk, HardyElement};
use crate::json::{complex, complex_matrix, complex_vec};
use crate::poly::Poly;

/// Roots closer than this to the unit circle are not reported.
pub const BOUNDARY_BAND: f64 = 1e-10;
/// `|psi1^{(j)}(u)| / j!` at or below this (relative to the largest
/// coefficient) counts as vanishing.
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-8;
/// Largest `|psi1(u)|` accepted as a zero.
pub const ZERO_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_KMAX: usize = 16;
/// Coefficient modulus that aborts a power-series expansion.
pub const OVERFLOW_GUARD: f64 = 1e150;
/// Tail energy fractions (beyond degree `N/2`) separating the membership
/// verdicts.
pub const IN_TAIL_FRACTION: f64 = 1e-10;
pub const OUT_TAIL_FRACTION: f64 = 1e-2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const CLUSTER_RADIUS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    #[serde(with = "complex")]
    pub root: Complex64,
    pub multiplicity: usize,
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|i| i as f64).product()
}

/// Number of leading derivatives (from order 0) that vanish at `z`.
fn multiplicity_at(p: &Poly, z: Complex64) -> usize {
    let scale = p.max_modulus();
    let deg = p.degree_or_zero();
    (0..=deg)
        .take_while(|&j| p.derivative_at(z, j).norm() / factorial(j) <= MULTIPLICITY_TOLERANCE * scale)
        .count()
}

/// Newton on `p^{(m-1)}`, which has a simple root where `p` has an `m`-fold one.
fn polish(p: &Poly, z: Complex64, m: usize) -> Complex64 {
    let f = p.nth_derivative(m.saturating_sub(1));
    let df = f.derivative();
    let mut z = z;
    for _ in 0..8 {
        let (fz, dz) = (f.eval(z), df.eval(z));
        if dz == ZERO {
            break;
        }
        let next = z - fz / dz;
        if f.eval(next).norm() >= fz.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Eigenvalues of the companion matrix of `p`.
fn companion_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let c = p.coeffs();
    let lead = c[deg];
    let m = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            ONE
        } else {
            ZERO
        }
    });
    eigenvalues(&m)
}

/// Roots of `psi1` with `|root| < 1 - BOUNDARY_BAND`, sorted by `(re, im)`.
///
/// Companion eigenvalues within a small radius of each other are grouped, and
/// the group is accepted as one multiple root when the derivative test at its
/// mean confirms the group size.
pub fn zeros_in_disk(psi1: &Poly) -> Result<Vec<Zero>> {
    let mut roots = companion_roots(psi1)?;
    let mut out = Vec::new();
    while let Some(r) = roots.pop() {
        let radius = CLUSTER_RADIUS * r.norm().max(1.0);
        let (group, rest): (Vec<_>, Vec<_>) = roots.into_iter().partition(|s| (s - r).norm() <= radius);
        roots = rest;
        let size = group.len() + 1;
        let centre = (group.iter().sum::<Complex64>() + r) / size as f64;
        let m = multiplicity_at(psi1, centre);
        if size == 1 || m == size {
            let root = polish(psi1, centre, size);
            out.push(Zero { root, multiplicity: multiplicity_at(psi1, root).max(1) });
        } else {
            for s in group.into_iter().chain(std::iter::once(r)) {
                let root = polish(psi1, s, 1);
                out.push(Zero { root, multiplicity: multiplicity_at(psi1, root).max(1) });
            }
        }
    }
    out.retain(|z| z.root.norm() < 1.0 - BOUNDARY_BAND);
    out.sort_by(|a, b| a.root.re.total_cmp(&b.root.re).then(a.root.im.total_cmp(&b.root.im)));
    Ok(out)
}

/// Checks that `u` is a simple zero of `psi1` inside the disk.
fn check_simple_zero(symbols: &SymbolPair, u: Complex64) -> Result<Complex64> {
    check_in_disk(u)?;
    let value = symbols.psi1.eval(u);
    if value.norm() > ZERO_TOLERANCE {
        return Err(Error::NotAZero { point: u, value });
    }
    let slope = symbols.psi1.derivative_at(u, 1);
    if slope.norm() <= MULTIPLICITY_TOLERANCE * symbols.psi1.max_modulus() {
        return Err(Error::NotSimple(u));
    }
    Ok(slope)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    #[serde(with = "complex")]
    pub zero: Complex64,
    /// `psi0(u) + k psi1'(u)` for `k = 0..=kmax`.
    #[serde(with = "complex_vec")]
    pub candidates: Vec<Complex64>,
    /// Conjugates of the candidates: eigenvalues of `E*` at `K_u^{[k]}`.
    #[serde(with = "complex_vec")]
    pub adjoint: Vec<Complex64>,
    /// Eigenvalues of the finite section, empty unless requested.
    #[serde(with = "complex_vec")]
    pub numeric: Vec<Complex64>,
    /// Largest distance from a candidate to the nearest numeric eigenvalue.
    pub pairing_max_distance: Option<f64>,
}

/// Candidate eigenvalues at the simple zero `u`.
pub fn formula_spectrum(symbols: &SymbolPair, u: Complex64, kmax: usize) -> Result<SpectrumResult> {
    let slope = check_simple_zero(symbols, u)?;
    let base = symbols.psi0.eval(u);
    let candidates: Vec<Complex64> = (0..=kmax).map(|k| base + slope * k as f64).collect();
    let adjoint = candidates.iter().map(|c| c.conj()).collect();
    Ok(SpectrumResult {
        zero: u,
        candidates,
        adjoint,
        numeric: Vec::new(),
        pairing_max_distance: None,
    })
}

/// [`formula_spectrum`] plus the eigenvalues of the finite section of size
/// `n + 1` and the candidate-to-numeric distance.
pub fn spectrum(symbols: &SymbolPair, u: Complex64, kmax: usize, n: usize) -> Result<SpectrumResult> {
    let mut result = formula_spectrum(symbols, u, kmax)?;
    result.numeric = truncated_eigenvalues(&truncated_matrix(symbols, n).matrix)?;
    result.pairing_max_distance = Some(
        result
            .candidates
            .iter()
            .map(|c| result.numeric.iter().map(|x| (x - c).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max),
    );
    Ok(result)
}

/// `E*` restricted to `span{K_u, K_u^{[1]}, ..., K_u^{[m]}}` at a zero `u` of
/// `psi1`; column `j` holds the coefficients of `E* K_u^{[j]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangularKernelMatrix {
    #[serde(with = "complex")]
    pub zero: Complex64,
    #[serde(with = "complex_matrix")]
    pub entries: DMatrix<Complex64>,
}

impl TriangularKernelMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.entries.diagonal().iter().copied().collect()
    }

    /// Largest modulus strictly below the diagonal.
    pub fn lower_max(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .flat_map(|j| (j + 1..n).map(move |i| (i, j)))
            .map(|ij| self.entries[ij].norm())
            .fold(0.0, f64::max)
    }
}

pub fn kernel_basis_matrix(symbols: &SymbolPair, u: Complex64, m: usize) -> Result<TriangularKernelMatrix> {
    check_simple_zero(symbols, u)?;
    let mut entries = DMatrix::from_element(m + 1, m + 1, ZERO);
    for j in 0..=m {
        let comb = adjoint_on_kernel(symbols, u, j)?;
        for i in 0..=m {
            entries[(i, j)] = comb.coeff(i);
        }
    }
    Ok(TriangularKernelMatrix { zero: u, entries })
}

/// Heuristic H^2 membership of a power series from its leading coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    Inconclusive,
}

impl Membership {
    /// Verdict from the fraction of `||g||^2` carried by degrees above `n/2`.
    pub fn from_tail_fraction(fraction: f64) -> Self {
        if fraction <= IN_TAIL_FRACTION {
            Membership::In
        } else if fraction >= OUT_TAIL_FRACTION {
            Membership::Out
        } else {
            Membership::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    #[serde(with = "complex")]
    pub value: Complex64,
    /// Taylor coefficients up to degree `N`; absent when the solution is not
    /// analytic at the origin.
    pub coefficients: Option<HardyElement>,
    pub membership: Membership,
    pub tail_fraction: Option<f64>,
    /// `||(E g - value g)|| / ||g||` over degrees `< N`.
    pub residual: Option<f64>,
}

/// Order of vanishing at 0, treating coefficients below `1e-13 * max` as zero.
fn order_at_origin(p: &Poly) -> usize {
    let tol = 1e-13 * p.max_modulus();
    p.coeffs().iter().take_while(|c| c.norm() <= tol).count()
}

fn shift_down(p: &Poly, k: usize) -> Vec<Complex64> {
    p.coeffs().iter().skip(k).copied().collect()
}

/// Power series of `num / den` up to degree `n`; `den[0]` must be nonzero.
fn series_div(num: &[Complex64], den: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut q = vec![ZERO; n + 1];
    for i in 0..=n {
        let mut acc = num.get(i).copied().unwrap_or(ZERO);
        for j in 1..=i.min(den.len().saturating_sub(1)) {
            acc -= den[j] * q[i - j];
        }
        q[i] = acc / den[0];
    }
    q
}

/// `h` with `h(0) = 1` and `h' = q h`, up to degree `n`.
fn exp_integral(q: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let mut h = vec![ZERO; n + 1];
    h[0] = ONE;
    for m in 0..n {
        let s: Complex64 = (0..=m).map(|i| q[i] * h[m - i]).sum();
        h[m + 1] = s / (m + 1) as f64;
        if !h[m + 1].norm().is_finite() || h[m + 1].norm() > OVERFLOW_GUARD {
            return Err(Error::SeriesDivergence(m + 1));
        }
    }
    Ok(h)
}

/// Taylor coefficients (degree `<= n`) of a solution of `den h' = num h`
/// analytic at 0, or `None` if no nonzero solution is.
fn solve_log_derivative(num: &Poly, den: &Poly, n: usize) -> Result<Option<Vec<Complex64>>> {
    if num.is_zero() {
        let mut h = vec![ZERO; n + 1];
        h[0] = ONE;
        return Ok(Some(h));
    }
    let vd = order_at_origin(den);
    let vn = order_at_origin(num);
    if vd <= vn {
        let q = series_div(&shift_down(num, vd), &shift_down(den, vd), n);
        return exp_integral(&q, n).map(Some);
    }
    if vd - vn >= 2 {
        return Ok(None);
    }
    // simple pole: h = z^rho H with rho the residue of num/den at 0
    let r = series_div(&shift_down(num, vn), &shift_down(den, vd), n + 1);
    let rho = r[0];
    let k = rho.re.round();
    if k < 0.0 || (rho - Complex64::new(k, 0.0)).norm() > 1e-9 {
        return Ok(None);
    }
    let k = k as usize;
    let big_h = exp_integral(&r[1..], n)?;
    let mut h = vec![ZERO; n + 1];
    for (i, c) in big_h.into_iter().enumerate().take((n + 1).saturating_sub(k)) {
        h[i + k] = c;
    }
    Ok(Some(h))
}

fn finish(symbols: &SymbolPair, value: Complex64, coeffs: Option<Vec<Complex64>>, n: usize) -> Eigenfunction {
    let Some(coeffs) = coeffs else {
        return Eigenfunction {
            value,
            coefficients: None,
            membership: Membership::Out,
            tail_fraction: None,
            residual: None,
        };
    };
    let g = HardyElement::new(coeffs);
    let total = g.norm_sqr();
    let tail: f64 = g.coeffs().iter().skip(n / 2 + 1).map(|c| c.norm_sqr()).sum();
    let fraction = tail / total;
    let eg = apply_truncated(symbols, &g);
    let diff: f64 = (0..n)
        .map(|j| (eg.coeffs()[j] - value * g.coeffs()[j]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Eigenfunction {
        value,
        coefficients: Some(g),
        membership: Membership::from_tail_fraction(fraction),
        tail_fraction: Some(fraction),
        residual: Some(diff / total.sqrt()),
    }
}

/// Eigenfunction for `psi0(u) + k psi1'(u)` in the form `(z - u)^k h`, where
/// `h' / h = R / q` with `psi1 = (z - u) q` and
/// `R = (psi0(u) + k psi1'(u) - psi0 - k q) / (z - u)`.
pub fn eigenfunction(symbols: &SymbolPair, u: Complex64, k: usize, n: usize) -> Result<Eigenfunction> {
    let slope = check_simple_zero(symbols, u)?;
    let value = symbols.psi0.eval(u) + slope * k as f64;
    let linear = Poly::new(vec![-u, ONE]);
    let (q, _) = symbols.psi1.div_rem(&linear);
    let numerator = &(&Poly::constant(value) - &symbols.psi0) - &q.scale(Complex64::new(k as f64, 0.0));
    let (r, _) = numerator.div_rem(&linear);
    let coeffs = solve_log_derivative(&r, &q, n)?.map(|h| {
        let factor = linear.pow(k);
        let mut g = vec![ZERO; n + 1];
        for (i, &a) in factor.coeffs().iter().enumerate() {
            for (j, &b) in h.iter().enumerate().take((n + 1).saturating_sub(i)) {
                g[i + j] += a * b;
            }
        }
        g
    });
    Ok(finish(symbols, value, coeffs, n))
}

/// Power-series solution of `E g = value g` for an arbitrary trial value.
pub fn eigenfunction_for_value(symbols: &SymbolPair, value: Complex64, n: usize) -> Result<Eigenfunction> {
    if symbols.psi1.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let numerator = &Poly::constant(value) - &symbols.psi0;
    let coeffs = solve_log_derivative(&numerator, &symbols.psi1, n)?;
    Ok(finish(symbols, value, coeffs, n))
}

/// Eigenvalues of a finite section, ordered by `(re, im)`.
pub fn truncated_eigenvalues(matrix: &OperatorMatrix) -> Result<Vec<Complex64>> {
    eigenvalues(&matrix.entries)
}

/// Greedy nearest-neighbour matching of two equally long lists; returns the
/// largest matched distance.
pub fn pairing_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "pairing lists of different lengths");
    let mut pool: Vec<Complex64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for x in a {
        let (idx, d) = pool
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("lists of equal length");
        worst = worst.max(d);
        pool.swap_remove(idx);
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    /// Spectrum of the section of `CEC` against the conjugated spectrum of the
    /// section of `E`.
    pub similarity: f64,
    /// Spectrum of the section of `E` against its own conjugate.
    pub self_conjugate: f64,
}

/// Compares spectra on the leading `(block + 1)`-square of sections of size
/// `n + 1`; `conj` must have a polynomial pushforward of `symbols`.
pub fn conjugate_pairing(
    symbols: &SymbolPair,
    conj: &ConjugationSpec,
    n: usize,
    block: usize,
) -> Result<PairingReport> {
    let pushed = conj.conjugated_symbols(symbols)?;
    let lead = |s: &SymbolPair| -> Result<Vec<Complex64>> {
        let m = truncated_matrix(s, n).matrix.leading_block(block);
        eigenvalues(&m)
    };
    let spec_e = lead(symbols)?;
    let spec_cec = lead(&pushed)?;
    let mut conj_e: Vec<Complex64> = spec_e.iter().map(|c| c.conj()).collect();
    sort_lexicographic(&mut conj_e);
    Ok(PairingReport {
        similarity: pairing_distance(&spec_cec, &conj_e),
        self_conjugate: pairing_distance(&spec_e, &conj_e),
    })
}
