mod common;

use common::{annihilator, c, dense_exp, max_abs};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use vibsim::encoding::{encode_basis_state, encode_mode_product, encode_operator, single_op, transition_matrix};
use vibsim::linalg::{expm, CMatrix};
use vibsim::pauli::multiply;
use vibsim::{
    BosonPolynomial, EncodingScheme, LadderKind, LadderOp, PauliString, PauliSum, PauliTerm, SchemeKind, StateVector,
};

fn axes(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
        .prop_map(|v| v.into_iter().collect())
}

fn term(n: usize) -> impl Strategy<Value = PauliTerm> {
    (axes(n), -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(a, re, im)| PauliTerm::new(Complex64::new(re, im), a.parse::<PauliString>().unwrap()))
}

fn random_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec(term(n), 0..12).prop_map(move |t| PauliSum::from_terms(n, t).unwrap())
}

fn term_matrix(t: &PauliTerm) -> CMatrix {
    PauliSum::from_terms(t.n_qubits(), vec![*t]).unwrap().to_matrix().unwrap()
}

proptest! {
    #[test]
    fn multiply_is_associative(a in term(3), b in term(3), d in term(3)) {
        let left = multiply(&multiply(&a, &b).unwrap(), &d).unwrap();
        let right = multiply(&a, &multiply(&b, &d).unwrap()).unwrap();
        prop_assert_eq!(left.string, right.string);
        prop_assert!((left.coefficient - right.coefficient).norm() < 1e-12);
    }

    #[test]
    fn multiply_matches_matrices(a in term(3), b in term(3)) {
        let p = multiply(&a, &b).unwrap();
        let diff = term_matrix(&p) - term_matrix(&a) * term_matrix(&b);
        prop_assert!(max_abs(&diff) < 1e-12);
    }

    #[test]
    fn hermitian_strings_square_to_identity(a in axes(4)) {
        let t = PauliTerm::parse(1.0, &a).unwrap();
        let sq = multiply(&t, &t).unwrap();
        prop_assert!(sq.string.is_identity());
        prop_assert!((sq.coefficient - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn simplify_preserves_matrix(s in random_sum(4)) {
        let diff = s.simplified().to_matrix().unwrap() - s.to_matrix().unwrap();
        prop_assert!(max_abs(&diff) < 1e-14);
    }

    #[test]
    fn real_sums_are_hermitian(s in random_sum(3)) {
        let real = PauliSum::from_terms(3, s.terms().iter().map(|t| PauliTerm::new(c(t.coefficient.re), t.string)).collect()).unwrap();
        let m = real.to_matrix().unwrap();
        prop_assert!(max_abs(&(&m - m.adjoint())) < 1e-14);
    }

    #[test]
    fn rotation_matches_expm(a in axes(4), theta in -3.2..3.2f64, seed in 0usize..16) {
        let p: PauliString = a.parse().unwrap();
        let mut s = common::superposition(4, &[seed, (seed * 7 + 3) % 16, 15 - seed]);
        let before = s.clone();
        s.apply_rotation(&p, theta).unwrap();
        let h = PauliSum::from_terms(4, vec![PauliTerm::new(c(1.0), p)]).unwrap();
        let oracle = common::apply_dense(&dense_exp(&h, theta), &before);
        prop_assert!(s.distance(&oracle).unwrap() < 1e-12);
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_matches_matrix(s in random_sum(3), seed in 0usize..8) {
        let v = common::superposition(3, &[seed, 7 - seed]);
        let got = s.apply(v.amplitudes()).unwrap();
        let want = s.to_matrix().unwrap() * nalgebra::DVector::from_column_slice(v.amplitudes());
        for (g, w) in got.iter().zip(want.iter()) {
            prop_assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip(s in random_sum(3)) {
        let s = s.simplified();
        let back = PauliSum::from_text(&s.to_text(), Some(3)).unwrap();
        prop_assert!(max_abs(&(back.to_matrix().unwrap() - s.to_matrix().unwrap())) < 1e-12);
    }

    #[test]
    fn expectation_within_spectrum(s in random_sum(3), seed in 0usize..8) {
        let h = PauliSum::from_terms(3, s.terms().iter().map(|t| PauliTerm::new(c(t.coefficient.re), t.string)).collect()).unwrap();
        let (values, _) = vibsim::linalg::hermitian_eigen(&h.to_matrix().unwrap(), 1e-12).unwrap();
        let v = common::superposition(3, &[seed, (seed + 3) % 8]);
        let e = v.expectation(&h).unwrap();
        prop_assert!(e >= values[0] - 1e-12 && e <= values[values.len() - 1] + 1e-12);
    }
}

#[test]
fn pauli_algebra_examples() {
    let xy = multiply(&PauliTerm::parse(1.0, "X").unwrap(), &PauliTerm::parse(1.0, "Y").unwrap()).unwrap();
    assert_eq!(xy.string.to_string(), "Z");
    assert_eq!(xy.coefficient, Complex64::new(0.0, 1.0));
    let s = common::sum(&[(0.5, "I"), (0.5, "Z")]);
    assert_eq!(s.to_matrix().unwrap(), DMatrix::from_diagonal(&nalgebra::dvector![c(1.0), c(0.0)]));
}

fn quadrature_matrix(kind: &str, d: usize) -> CMatrix {
    let a = annihilator(d);
    match kind {
        "q" => &a + a.adjoint(),
        "p" => (a.adjoint() - &a) * Complex64::new(0.0, 1.0),
        _ => unreachable!(),
    }
}

fn quadrature_poly(kind: &str) -> BosonPolynomial {
    let mut p = BosonPolynomial::new();
    match kind {
        "q" => {
            p.push(c(1.0), vec![LadderOp::annihilate(0)]);
            p.push(c(1.0), vec![LadderOp::create(0)]);
        }
        _ => {
            p.push(Complex64::new(0.0, 1.0), vec![LadderOp::create(0)]);
            p.push(Complex64::new(0.0, -1.0), vec![LadderOp::annihilate(0)]);
        }
    }
    p
}

fn restricted(p: &BosonPolynomial, scheme: &EncodingScheme) -> CMatrix {
    encode_operator(p, scheme).unwrap().restricted_matrix(&scheme.encoded_basis())
}

#[test]
fn ladder_reconstruction_both_schemes() {
    for d in [2, 3, 4, 8] {
        let a = annihilator(d);
        let n = a.adjoint() * &a;
        for kind in [SchemeKind::Direct, SchemeKind::Compact] {
            let scheme = EncodingScheme::new(kind, d, 1).unwrap();
            let cases = [
                (LadderKind::Annihilate, a.clone()),
                (LadderKind::Create, a.adjoint()),
                (LadderKind::Number, n.clone()),
            ];
            for (k, want) in cases {
                let got = restricted(&single_op(k, 0), &scheme);
                assert!(max_abs(&(got - want)) < 1e-14, "{kind} d={d} {k:?}");
            }
            for q in ["q", "p"] {
                let got = restricted(&quadrature_poly(q), &scheme);
                assert!(max_abs(&(got - quadrature_matrix(q, d))) < 1e-14, "{kind} d={d} {q}");
            }
        }
    }
}

#[test]
fn multi_mode_products_reconstruct() {
    for kind in [SchemeKind::Direct, SchemeKind::Compact] {
        let d = 3;
        let scheme = EncodingScheme::new(kind, d, 2).unwrap();
        let mut p = BosonPolynomial::new();
        p.push(c(0.7), vec![LadderOp::create(0), LadderOp::annihilate(1), LadderOp::create(1)]);
        p.push(c(-0.2), vec![LadderOp::annihilate(0), LadderOp::annihilate(0)]);
        let got = restricted(&p, &scheme);
        let want = p.to_fock_matrix(2, d).unwrap();
        assert!(max_abs(&(got - want)) < 1e-14, "{kind}");
    }
}

#[test]
fn compact_creation_is_half_x_minus_iy() {
    let scheme = EncodingScheme::compact(2, 1).unwrap();
    let s = encode_operator(&single_op(LadderKind::Create, 0), &scheme).unwrap();
    let mut want = common::sum(&[(0.5, "X")]);
    want.push(PauliTerm::new(Complex64::new(0.0, -0.5), "Y".parse().unwrap())).unwrap();
    assert!(max_abs(&(s.to_matrix().unwrap() - want.to_matrix().unwrap())) < 1e-15);
}

#[test]
fn direct_operators_keep_one_hot_subspace() {
    let d = 4;
    let scheme = EncodingScheme::direct(d, 2).unwrap();
    let mut p = BosonPolynomial::new();
    p.push(c(1.0), vec![LadderOp::create(0), LadderOp::annihilate(1)]);
    p.push(c(0.3), vec![LadderOp::annihilate(0)]);
    p.push(c(0.3), vec![LadderOp::number(1)]);
    let op = encode_operator(&p, &scheme).unwrap();
    let valid = scheme.encoded_basis();
    for &b in &valid {
        let out = op.apply(StateVector::basis(8, b).unwrap().amplitudes()).unwrap();
        for (k, v) in out.iter().enumerate() {
            if v.norm() > 1e-14 {
                assert!(valid.contains(&k), "{b} -> {k}");
            }
        }
    }
}

#[test]
fn basis_encoding_is_injective() {
    for kind in [SchemeKind::Direct, SchemeKind::Compact] {
        let scheme = EncodingScheme::new(kind, 3, 3).unwrap();
        let mut seen = std::collections::HashSet::new();
        for f in 0..scheme.fock_dim() {
            let bits = encode_basis_state(&scheme.occupations(f), &scheme).unwrap();
            assert!(seen.insert(bits.index()));
        }
    }
}

#[test]
fn creation_term_growth() {
    let counts = |kind| -> Vec<usize> {
        [2, 4, 8, 16]
            .iter()
            .map(|&d| {
                encode_operator(&single_op(LadderKind::Create, 0), &EncodingScheme::new(kind, d, 1).unwrap())
                    .unwrap()
                    .len()
            })
            .collect()
    };
    let direct = counts(SchemeKind::Direct);
    let compact = counts(SchemeKind::Compact);
    for w in direct.windows(2) {
        let r = w[1] as f64 / w[0] as f64;
        assert!((1.5..=3.0).contains(&r), "{direct:?}");
    }
    for w in compact.windows(2) {
        assert!(w[1] > w[0], "{compact:?}");
    }
    assert!(compact[3] > direct[3]);
}

#[test]
fn mode_product_matches_kron() {
    let scheme = EncodingScheme::compact(4, 2).unwrap();
    let t = transition_matrix(2, 1, 4).unwrap();
    let s = encode_mode_product(c(1.0), &[(1, t.clone())], &scheme).unwrap();
    let got = s.restricted_matrix(&scheme.encoded_basis());
    let want = vibsim::linalg::kron(&t, &CMatrix::identity(4, 4));
    assert!(max_abs(&(got - want)) < 1e-15);
}

#[test]
fn rotation_twice_by_half_pi_is_minus_identity() {
    let p: PauliString = "XZY".parse().unwrap();
    let s0 = common::superposition(3, &[1, 5, 6]);
    let mut s = s0.clone();
    s.apply_rotation(&p, std::f64::consts::FRAC_PI_2).unwrap();
    s.apply_rotation(&p, std::f64::consts::FRAC_PI_2).unwrap();
    assert!((s.fidelity(&s0).unwrap() - 1.0).abs() < 1e-12);
    let m = expm(
        &(PauliSum::from_terms(3, vec![PauliTerm::new(c(1.0), p)]).unwrap().to_matrix().unwrap()
            * Complex64::new(0.0, -std::f64::consts::PI)),
    );
    assert!(max_abs(&(m + CMatrix::identity(8, 8))) < 1e-12);
}
