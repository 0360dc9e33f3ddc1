use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torelli_core::lie::{is_lyndon, lyndon_basis, lyndon_words, witt_dimension, LieElement};
use torelli_core::word::{lcs_class, lcs_degree, magnus, Generator, GroupWord, LcsDegree};

type Series = BTreeMap<Vec<Generator>, BigInt>;

fn all_words(n: usize, k: usize) -> Vec<Vec<Generator>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |c| {
                    let mut v = w.clone();
                    v.push(Generator::from_code(c));
                    v
                })
            })
            .collect();
    }
    out
}

fn lyndon_by_rotation(w: &[Generator]) -> bool {
    (1..w.len()).all(|i| {
        let rot: Vec<Generator> = w[i..].iter().chain(&w[..i]).copied().collect();
        w < rot.as_slice()
    })
}

#[test]
fn lyndon_words_match_rotation_definition() {
    for n in [2, 4] {
        for k in 1..=6 {
            let brute: BTreeSet<Vec<Generator>> = all_words(n, k).into_iter().filter(|w| lyndon_by_rotation(w)).collect();
            let fast: BTreeSet<Vec<Generator>> = lyndon_words(n, k).into_iter().collect();
            assert_eq!(brute, fast, "n={n} k={k}");
            assert_eq!(brute.len() as u128, witt_dimension(n, k));
            assert!(fast.iter().all(|w| is_lyndon(w)));
        }
    }
}

#[test]
fn lyndon_basis_is_sorted_and_standard() {
    let basis = lyndon_basis(4, 5);
    for pair in basis.windows(2) {
        assert!(pair[0].word < pair[1].word);
    }
    for b in &basis {
        let e = LieElement::basis(2, b.word.clone());
        // leading word of the expansion of a standard bracketing is the word itself, coefficient 1
        assert_eq!(e.to_tensor().coefficient(&b.word), BigInt::one());
    }
}

#[test]
fn witt_dimension_small_values() {
    assert_eq!(witt_dimension(2, 1), 2);
    assert_eq!(witt_dimension(2, 2), 1);
    assert_eq!(witt_dimension(2, 3), 2);
    assert_eq!(witt_dimension(4, 2), 6);
    assert_eq!(witt_dimension(4, 3), 20);
    assert_eq!(witt_dimension(6, 3), 70);
}

fn series_mul(a: &Series, b: &Series, t: usize) -> Series {
    let mut out = Series::new();
    for (u, c) in a {
        for (v, d) in b {
            if u.len() + v.len() > t {
                continue;
            }
            let mut w = u.clone();
            w.extend_from_slice(v);
            *out.entry(w).or_insert_with(BigInt::zero) += c * d;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn letter_series(g: Generator, inverse: bool, t: usize) -> Series {
    let mut s = Series::new();
    s.insert(Vec::new(), BigInt::one());
    if inverse {
        for j in 1..=t {
            s.insert(vec![g; j], if j % 2 == 0 { BigInt::one() } else { -BigInt::one() });
        }
    } else {
        s.insert(vec![g], BigInt::one());
    }
    s
}

fn naive_magnus(letters: &[(Generator, bool)], t: usize) -> Series {
    let mut s = Series::new();
    s.insert(Vec::new(), BigInt::one());
    for &(g, inv) in letters {
        s = series_mul(&s, &letter_series(g, inv, t), t);
    }
    s
}

fn random_letters(rng: &mut ChaCha8Rng, g: usize, len: usize) -> Vec<(Generator, bool)> {
    (0..len).map(|_| (Generator::from_code(rng.gen_range(0..2 * g)), rng.gen_bool(0.5))).collect()
}

fn word_of(letters: &[(Generator, bool)], g: usize) -> GroupWord {
    let s: Vec<String> = letters.iter().map(|(l, inv)| if *inv { format!("{l}^-1") } else { l.to_string() }).collect();
    GroupWord::parse(&s.join(" "), g).unwrap()
}

#[test]
fn magnus_matches_letterwise_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let g = rng.gen_range(1..=2);
        let t = rng.gen_range(1..=4);
        let len = rng.gen_range(0..8);
        let letters = random_letters(&mut rng, g, len);
        let expect = naive_magnus(&letters, t);
        let got = magnus(&word_of(&letters, g), t);
        for d in 0..=t {
            for w in all_words(2 * g, d) {
                let e = expect.get(&w).cloned().unwrap_or_default();
                assert_eq!(got.coefficient(&w), e, "word {w:?} in {letters:?}");
            }
        }
    }
}

#[test]
fn magnus_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let g = 2;
        let a = word_of(&random_letters(&mut rng, g, 6), g);
        let b = word_of(&random_letters(&mut rng, g, 6), g);
        let ab = magnus(&a.mul(&b), 4);
        let prod = magnus(&a, 4).mul(&magnus(&b, 4));
        for d in 0..=4 {
            assert_eq!(ab.homogeneous(d), prod.homogeneous(d));
        }
        let inv = magnus(&a, 4).mul(&magnus(&a.inverse(), 4));
        assert_eq!(inv.lowest_degree(), None);
    }
}

#[test]
fn commutator_classes_are_brackets() {
    let g = 2;
    let x1 = GroupWord::generator(g, Generator::x(1)).unwrap();
    let y1 = GroupWord::generator(g, Generator::y(1)).unwrap();
    let x2 = GroupWord::generator(g, Generator::x(2)).unwrap();
    let c = GroupWord::commutator(&x1, &y1);
    assert_eq!(lcs_degree(&c, 4), LcsDegree::Exact(2));
    let lx1 = LieElement::generator(g, Generator::x(1));
    let ly1 = LieElement::generator(g, Generator::y(1));
    let lx2 = LieElement::generator(g, Generator::x(2));
    let b = lx1.bracket(&ly1).unwrap();
    assert_eq!(lcs_class(&c, 2).unwrap(), b);
    let cc = GroupWord::commutator(&c, &x2);
    assert_eq!(lcs_degree(&cc, 4), LcsDegree::Exact(3));
    assert_eq!(lcs_class(&cc, 3).unwrap(), b.bracket(&lx2).unwrap());
    assert!(lcs_class(&cc, 2).unwrap().is_zero());
    assert!(lcs_class(&x1, 2).is_err());
    assert_eq!(lcs_degree(&GroupWord::identity(g), 3), LcsDegree::Identity);
}

#[test]
fn jacobi_and_antisymmetry_on_generators() {
    let g = 2;
    let gens: Vec<LieElement> = Generator::all(g).map(|z| LieElement::generator(g, z)).collect();
    for a in &gens {
        for b in &gens {
            let ab = a.bracket(b).unwrap();
            assert_eq!(ab, b.bracket(a).unwrap().neg());
            for c in &gens {
                let j = ab
                    .bracket(c)
                    .unwrap()
                    .add(&b.bracket(c).unwrap().bracket(a).unwrap())
                    .add(&c.bracket(a).unwrap().bracket(b).unwrap());
                assert!(j.is_zero());
            }
        }
    }
}
