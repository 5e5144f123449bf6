use hardy_symm::conjugation::{apply_c, CAlphaBeta, ConjugationSpec, JBetaLambda};
use hardy_symm::diffop::{truncated_matrix, FamilyParams, SymbolPair};
use hardy_symm::eigen::eigenvalues;
use hardy_symm::hardy::{derivative_at, inner_product, kernel, HardyElement};
use hardy_symm::spectrum::{conjugate_pairing, kernel_basis_matrix};
use hardy_symm::symmetry::{
    classify, classify_c_selfadjoint, classify_hermitian, classify_j_selfadjoint, j_coupled_d, residual,
    ClassificationReport,
};
use hardy_symm::{c64, Complex64, Poly};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn complex_in(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..=r, -r..=r).prop_map(move |(a, b)| {
        let z = c64(a, b);
        if z.norm() > r {
            z * (r / z.norm())
        } else {
            z
        }
    })
}

fn unimodular() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(|t| Complex64::from_polar(1.0, t))
}

fn punctured_disk(r: f64) -> impl Strategy<Value = Complex64> {
    complex_in(r).prop_filter("away from 0", |z| z.norm() > 1e-3)
}

fn coeffs(max_deg: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex_in(1.0), 1..=max_deg + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reproducing_property(f in coeffs(24), z in complex_in(0.85), m in 0usize..=3) {
        let f = HardyElement::new(f);
        let k = kernel(z, m, f.truncation_degree()).unwrap();
        let direct = f.to_poly().derivative_at(z, m);
        prop_assert!((inner_product(&f, &k) - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
        prop_assert!((derivative_at(&f, z, m).unwrap() - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
    }

    #[test]
    fn kernel_norm(z in complex_in(0.9)) {
        let k = kernel(z, 0, 600).unwrap();
        let exact = 1.0 / (1.0 - z.norm_sqr());
        prop_assert!((k.norm_sqr() - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn hermitian_sections_are_selfadjoint(a in -2.0..2.0f64, c in -2.0..2.0f64, b in complex_in(2.0)) {
        let s = FamilyParams { a: c64(a, 0.0), b, c: c64(c, 0.0), d: b.conj() }.symbols();
        prop_assert!(classify_hermitian(&s).holds);
        let m = truncated_matrix(&s, 24).matrix.entries;
        prop_assert!((&m - m.adjoint()).camax() <= 1e-13);
    }

    #[test]
    fn witnesses_reproduce_symbols(a in complex_in(2.0), b in complex_in(2.0), c in complex_in(2.0),
                                   beta in unimodular(), lambda in punctured_disk(0.9)) {
        let s = FamilyParams { a, b, c, d: b * beta }.symbols();
        let w = classify_c_selfadjoint(&s, beta).unwrap().witness.unwrap();
        prop_assert!(w.symbols(beta).psi0.distance(&s.psi0) <= 1e-12);
        prop_assert!(w.symbols(beta).psi1.distance(&s.psi1) <= 1e-12);

        let s = FamilyParams { a, b, c, d: j_coupled_d(b, c, lambda) }.symbols();
        let w = classify_j_selfadjoint(&s, lambda).unwrap().witness.unwrap();
        prop_assert!(w.symbols().psi1.distance(&s.psi1) <= 1e-12);
    }

    #[test]
    fn c_conjugation_is_an_isometric_involution(v in coeffs(20), alpha in unimodular(), beta in unimodular()) {
        let c = CAlphaBeta::new(alpha, beta).unwrap();
        let v = HardyElement::new(v);
        let once = apply_c(&c, &v);
        prop_assert!((once.norm() - v.norm()).abs() <= 1e-14 * (1.0 + v.norm()));
        prop_assert!(apply_c(&c, &once).distance(&v) <= 1e-14 * (1.0 + v.norm()));
    }

    #[test]
    fn residual_is_alpha_independent(a in complex_in(2.0), b in complex_in(2.0), c in complex_in(2.0),
                                     d in complex_in(2.0), beta in unimodular()) {
        let s = FamilyParams { a, b, c, d }.symbols();
        let verdict = classify_c_selfadjoint(&s, beta).unwrap().holds;
        let values: Vec<f64> = [c64(1.0, 0.0), c64(0.0, 1.0), Complex64::from_polar(1.0, 2.4)]
            .into_iter()
            .map(|alpha| {
                let conj = ConjugationSpec::C(CAlphaBeta::new(alpha, beta).unwrap());
                residual(&s, &conj, 32).unwrap().residual
            })
            .collect();
        prop_assert!(values.iter().all(|r| (r - values[0]).abs() <= 1e-12), "{values:?} {verdict}");
    }

    #[test]
    fn j_pushforward_is_polynomial_in_the_coupled_shape(a in complex_in(2.0), b in complex_in(2.0),
                                                       c in complex_in(2.0), d in complex_in(2.0),
                                                       lambda in punctured_disk(0.5)) {
        let j = ConjugationSpec::J(JBetaLambda::new(c64(1.0, 0.0), lambda).unwrap());
        let s = FamilyParams { a, b, c, d }.symbols();
        prop_assert!(j.conjugated_symbols(&s).is_ok());
        let uncoupled = SymbolPair::new(Poly::new(vec![a, b + 0.5]), s.psi1.clone());
        prop_assert!(j.conjugated_symbols(&uncoupled).is_err());
    }

    #[test]
    fn kernel_basis_diagonal_law(a in complex_in(2.0), b in complex_in(2.0), u in complex_in(0.8),
                                 v in complex_in(3.0), m in 0usize..6) {
        prop_assume!((u - v).norm() > 1e-2);
        let psi1 = &(&Poly::new(vec![-u, c64(1.0, 0.0)]) * &Poly::new(vec![-v, c64(1.0, 0.0)])).scale(b);
        prop_assume!(b.norm() > 1e-2);
        let s = SymbolPair::new(Poly::new(vec![a, b]), psi1.clone());
        let x = kernel_basis_matrix(&s, u, m).unwrap();
        let slope = psi1.derivative_at(u, 1);
        for (j, d) in x.diagonal().into_iter().enumerate() {
            let want = (s.psi0.eval(u) + slope * j as f64).conj();
            prop_assert!((d - want).norm() <= 1e-10 * (1.0 + want.norm()));
        }
        prop_assert!(x.lower_max() <= 1e-12 * (1.0 + b.norm()));
    }

    #[test]
    fn conjugated_spectrum_matches(a in complex_in(2.0), b in complex_in(1.0), c in complex_in(2.0),
                                   beta in unimodular()) {
        let s = FamilyParams { a, b, c, d: b * beta }.symbols();
        let conj = ConjugationSpec::C(CAlphaBeta::new(c64(1.0, 0.0), beta).unwrap());
        let p = conjugate_pairing(&s, &conj, 32, 16).unwrap();
        prop_assert!(p.similarity <= 1e-8, "{p:?}");
    }

    #[test]
    fn triangular_eigenvalues_are_the_diagonal(diag in prop::collection::vec(complex_in(5.0), 1..10), upper in complex_in(1.0)) {
        let n = diag.len();
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else if j > i { upper * (j - i) as f64 } else { c64(0.0, 0.0) });
        let mut want = diag.clone();
        hardy_symm::eigen::sort_lexicographic(&mut want);
        prop_assert_eq!(eigenvalues(&m).unwrap(), want);
    }

    #[test]
    fn classification_report_round_trip(a in complex_in(2.0), b in complex_in(2.0), c in complex_in(2.0),
                                        d in complex_in(2.0), beta in unimodular(), lambda in punctured_disk(0.5)) {
        let s = FamilyParams { a, b, c, d }.symbols();
        let conj = ConjugationSpec::J(JBetaLambda::new(beta, lambda).unwrap());
        let report = classify(&s, beta, Some(lambda), Some((&conj, 32))).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: ClassificationReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, report);
    }

    #[test]
    fn symbol_pair_json_round_trip(p0 in coeffs(3), p1 in coeffs(4)) {
        let s = SymbolPair::new(Poly::new(p0), Poly::new(p1));
        let back: SymbolPair = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}
