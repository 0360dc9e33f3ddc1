use num_bigint::BigInt;
use proptest::prelude::*;
use torelli_core::deriv::{bracket_map, bracket_map_via_omega, derivation_bracket, dk_basis, DerivationElement};
use torelli_core::lie::{lyndon_words, LieElement};
use torelli_core::word::{magnus, FreeEndo, Generator, GroupWord};
use torelli_core::zlinalg::{elementary_divisors, kernel_basis, IntMatrix};

fn word_strategy(g: usize, max_len: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec((0..2 * g, prop::bool::ANY), 0..max_len).prop_map(move |letters| {
        let s: Vec<String> = letters
            .iter()
            .map(|&(c, inv)| {
                let z = Generator::from_code(c);
                if inv {
                    format!("{z}^-1")
                } else {
                    z.to_string()
                }
            })
            .collect();
        GroupWord::parse(&s.join(" "), g).unwrap()
    })
}

fn lie_strategy(g: usize, degree: usize) -> impl Strategy<Value = LieElement> {
    let words = lyndon_words(2 * g, degree);
    let n = words.len();
    prop::collection::vec(-3i64..=3, n).prop_map(move |cs| {
        let mut out = LieElement::zero(g, degree);
        for (w, c) in words.iter().zip(cs) {
            out.add_scaled(&LieElement::basis(g, w.clone()), &BigInt::from(c));
        }
        out
    })
}

fn dk_strategy(g: usize, k: usize) -> impl Strategy<Value = DerivationElement> {
    let basis = dk_basis(g, k).elements();
    let n = basis.len();
    prop::collection::vec(-2i64..=2, n).prop_map(move |cs| {
        let mut out = DerivationElement::zero(g, k);
        for (b, c) in basis.iter().zip(cs) {
            out.add_scaled(b, &BigInt::from(c));
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_round_trip_through_text(w in word_strategy(3, 12)) {
        prop_assert_eq!(GroupWord::parse(&w.to_string(), 3).unwrap(), w);
    }

    #[test]
    fn inverse_cancels(w in word_strategy(2, 12)) {
        prop_assert!(w.mul(&w.inverse()).is_identity());
        prop_assert!(w.inverse().inverse() == w);
    }

    #[test]
    fn magnus_respects_products(a in word_strategy(2, 8), b in word_strategy(2, 8)) {
        let lhs = magnus(&a.mul(&b), 3);
        let rhs = magnus(&a, 3).mul(&magnus(&b, 3));
        for d in 0..=3 {
            prop_assert_eq!(lhs.homogeneous(d), rhs.homogeneous(d));
        }
    }

    #[test]
    fn lie_tensor_round_trip(l in lie_strategy(2, 4)) {
        prop_assert_eq!(LieElement::from_tensor(&l.to_tensor()).unwrap(), l);
    }

    #[test]
    fn lie_bracket_antisymmetry_and_jacobi(a in lie_strategy(2, 1), b in lie_strategy(2, 2), c in lie_strategy(2, 1)) {
        prop_assert_eq!(a.bracket(&b).unwrap(), b.bracket(&a).unwrap().neg());
        let j = a.bracket(&b).unwrap().bracket(&c).unwrap()
            .add(&b.bracket(&c).unwrap().bracket(&a).unwrap())
            .add(&c.bracket(&a).unwrap().bracket(&b).unwrap());
        prop_assert!(j.is_zero());
    }

    #[test]
    fn endo_images_are_consistent(w in word_strategy(2, 6)) {
        let h = FreeEndo::identity(2);
        prop_assert_eq!(h.apply(&w).unwrap(), w);
    }

    #[test]
    fn derivation_bracket_stays_in_dk(a in dk_strategy(2, 1), b in dk_strategy(2, 1), c in dk_strategy(2, 1)) {
        let ab = derivation_bracket(&a, &b).unwrap();
        prop_assert!(bracket_map(&ab).is_zero());
        prop_assert!(dk_basis(2, 2).contains(&ab));
        prop_assert_eq!(ab.clone(), derivation_bracket(&b, &a).unwrap().neg());
        let j = derivation_bracket(&ab, &c).unwrap()
            .add(&derivation_bracket(&derivation_bracket(&b, &c).unwrap(), &a).unwrap())
            .add(&derivation_bracket(&derivation_bracket(&c, &a).unwrap(), &b).unwrap());
        prop_assert!(j.is_zero());
    }

    #[test]
    fn two_routes_to_beta_agree(d in dk_strategy(2, 2), l in lie_strategy(2, 3), z in 0usize..4) {
        prop_assert!(bracket_map_via_omega(&d).is_zero());
        let e = d.add(&DerivationElement::term(Generator::from_code(z), &l));
        prop_assert_eq!(bracket_map(&e), bracket_map_via_omega(&e));
    }

    #[test]
    fn kernel_vectors_are_annihilated(entries in prop::collection::vec(-4i64..=4, 24)) {
        let rows: Vec<Vec<i64>> = entries.chunks(6).map(|c| c.to_vec()).collect();
        let a = IntMatrix::from_i64(&rows);
        let k = kernel_basis(&a);
        for r in k.row_vecs() {
            prop_assert!(a.mul_vec(r).is_zero());
        }
        prop_assert_eq!(k.rows() + elementary_divisors(&a).len(), 6);
    }

    #[test]
    fn divisors_are_transpose_invariant(entries in prop::collection::vec(-5i64..=5, 20)) {
        let rows: Vec<Vec<i64>> = entries.chunks(5).map(|c| c.to_vec()).collect();
        let a = IntMatrix::from_i64(&rows);
        prop_assert_eq!(elementary_divisors(&a), elementary_divisors(&a.transpose()));
    }
}
