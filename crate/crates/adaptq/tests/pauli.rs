mod common;

use std::collections::BTreeSet;

use adaptq::pauli::{
    commutator, commutes, jordan_wigner, jordan_wigner_op, multiply_strings, CommuteMode, FermionSum, LadderOp,
    PauliString, PauliSum,
};
use adaptq::Error;
use common::*;
use proptest::prelude::*;

fn word(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
        .prop_map(|v| v.into_iter().collect())
}

fn sized_pair() -> impl Strategy<Value = (String, String)> {
    (1usize..6).prop_flat_map(|n| (word(n), word(n)))
}

#[test]
fn worked_product_has_positive_phase() {
    let (ph, p) = multiply_strings(&ps("XZ"), &ps("ZX")).unwrap();
    assert_eq!(p, ps("YY"));
    assert_eq!(ph, c(1.0, 0.0));
    let dense = word_matrix("XZ") * word_matrix("ZX");
    assert!(max_abs(&(dense - word_matrix("YY"))) < 1e-15);
}

#[test]
fn string_order_is_lexicographic() {
    let mut v = vec![ps("ZI"), ps("IX"), ps("YZ"), ps("XX"), ps("II"), ps("IZ")];
    v.sort();
    let s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
    assert_eq!(s, ["II", "IX", "IZ", "XX", "YZ", "ZI"]);
}

#[test]
fn bad_words_are_rejected() {
    assert!(matches!("XQ".parse::<PauliString>(), Err(Error::Invalid(_))));
    assert!(matches!(multiply_strings(&ps("X"), &ps("XX")), Err(Error::Dimension(_))));
}

#[test]
fn ladder_operators_match_occupation_basis() {
    for n in 1..=4 {
        for j in 0..n {
            for op in [LadderOp::create(j), LadderOp::annihilate(j)] {
                let jw = jordan_wigner_op(op, n).unwrap();
                assert!(max_abs(&(sum_matrix(&jw) - ladder_matrix(op, n))) < 1e-14, "{op} on {n}");
            }
        }
    }
}

#[test]
fn canonical_anticommutation() {
    let n = 3;
    let id = M::identity(8, 8);
    for i in 0..n {
        for j in 0..n {
            let ai = sum_matrix(&jordan_wigner_op(LadderOp::annihilate(i), n).unwrap());
            let aj_dag = sum_matrix(&jordan_wigner_op(LadderOp::create(j), n).unwrap());
            let ac = &ai * &aj_dag + &aj_dag * &ai;
            let want = if i == j { id.clone() } else { M::zeros(8, 8) };
            assert!(max_abs(&(ac - want)) < 1e-14);
        }
    }
}

#[test]
fn transformed_excitation_is_antihermitian() {
    let t = FermionSum::single(
        c(1.0, 0.0),
        vec![LadderOp::create(3), LadderOp::create(2), LadderOp::annihilate(1), LadderOp::annihilate(0)],
    );
    let a = jordan_wigner(&t.minus_dagger(), 4).unwrap();
    assert!(a.is_antihermitian());
    assert_eq!(a.len(), 8);
    let dense = fermion_matrix(&t.minus_dagger(), 4);
    assert!(max_abs(&(sum_matrix(&a) - dense)) < 1e-14);
}

#[test]
fn strip_keeps_support() {
    let a = PauliSum::from_real_words(&[(1.0, "XZZY"), (0.5, "ZIXZ")]).unwrap();
    let support: BTreeSet<usize> = [0, 3].into_iter().collect();
    let s = a.strip_z_chain(&support);
    assert_eq!(s.coefficient(&ps("XIIY")), c(1.0, 0.0));
    assert_eq!(s.coefficient(&ps("ZIXZ")), c(0.5, 0.0));
}

proptest! {
    #[test]
    fn product_matches_dense((a, b) in sized_pair()) {
        let (ph, p) = multiply_strings(&ps(&a), &ps(&b)).unwrap();
        let dense = word_matrix(&a) * word_matrix(&b);
        let got = word_matrix(&p.to_string()) * ph;
        prop_assert!(max_abs(&(dense - got)) < 1e-14);
    }

    #[test]
    fn commutation_matches_dense((a, b) in sized_pair()) {
        let ma = word_matrix(&a);
        let mb = word_matrix(&b);
        let dense = max_abs(&(&ma * &mb - &mb * &ma)) < 1e-12;
        prop_assert_eq!(commutes(&ps(&a), &ps(&b), CommuteMode::General).unwrap(), dense);
        let qw = a.chars().zip(b.chars()).all(|(x, y)| x == 'I' || y == 'I' || x == y);
        prop_assert_eq!(commutes(&ps(&a), &ps(&b), CommuteMode::Qubitwise).unwrap(), qw);
        if qw {
            prop_assert!(dense);
        }
    }

    #[test]
    fn word_round_trip(w in (1usize..10).prop_flat_map(word)) {
        prop_assert_eq!(ps(&w).to_string(), w);
    }

    #[test]
    fn sum_product_and_commutator_match_dense(
        terms_a in proptest::collection::vec((word(3), -1.0f64..1.0, -1.0f64..1.0), 1..5),
        terms_b in proptest::collection::vec((word(3), -1.0f64..1.0, -1.0f64..1.0), 1..5),
    ) {
        let build = |t: &[(String, f64, f64)]| {
            PauliSum::from_terms(3, t.iter().map(|(w, re, im)| (ps(w), c(*re, *im)))).unwrap()
        };
        let a = build(&terms_a);
        let b = build(&terms_b);
        let (ma, mb) = (sum_matrix(&a), sum_matrix(&b));
        prop_assert!(max_abs(&(sum_matrix(&a.mul(&b).unwrap()) - &ma * &mb)) < 1e-12);
        prop_assert!(max_abs(&(sum_matrix(&commutator(&a, &b).unwrap()) - (&ma * &mb - &mb * &ma))) < 1e-12);
        prop_assert!(max_abs(&(sum_matrix(&a.dagger()) - ma.adjoint())) < 1e-15);
        prop_assert!(max_abs(&(sum_matrix(&a.add(&b).unwrap()) - (&ma + &mb))) < 1e-14);
    }

    #[test]
    fn jordan_wigner_matches_occupation_basis(
        terms in proptest::collection::vec(
            (proptest::collection::vec((0usize..4, any::<bool>()), 1..5), -1.0f64..1.0), 1..4)
    ) {
        let mut f = FermionSum::new();
        for (ops, coef) in &terms {
            f.push(c(*coef, 0.0), ops.iter().map(|&(o, d)| LadderOp { orbital: o, dagger: d }).collect());
        }
        let jw = jordan_wigner(&f, 4).unwrap();
        prop_assert!(max_abs(&(sum_matrix(&jw) - fermion_matrix(&f, 4))) < 1e-12);
    }
}
