use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torelli_core::deriv::{bracket_map, derivation_bracket, dk_basis, wedge3_to_d1, Wedge3Element};
use torelli_core::tree::{
    decompose, enumerate_trees, full_decompose, image_lattice, random_tree, tree_bracket, DecoratedTree, TreeError,
};
use torelli_core::word::Generator;

fn symbols(g: usize) -> Vec<Generator> {
    Generator::all(g).collect()
}

#[test]
fn tripods_are_wedges() {
    let g = 2;
    for [a, b, c] in Wedge3Element::triples(g) {
        let t = DecoratedTree::tripod(a, b, c);
        let w = wedge3_to_d1(&Wedge3Element::basis(g, a, b, c));
        let e = t.eta(g).unwrap();
        assert!(e == w || e == w.neg(), "{t}");
    }
}

#[test]
fn rerooting_gives_the_same_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let k = rng.gen_range(1..=4);
        let t = random_tree(&mut rng, &symbols(3), k);
        for (root, body) in t.rootings() {
            assert_eq!(DecoratedTree::planted(root, body).unwrap(), t);
        }
        assert_eq!(DecoratedTree::parse(&t.to_string()).unwrap(), t);
    }
}

#[test]
fn eta_lands_in_the_kernel_of_beta() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let g = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let t = random_tree(&mut rng, &symbols(g), k);
        let e = t.eta(g).unwrap();
        assert!(bracket_map(&e).is_zero(), "{t}");
        assert!(dk_basis(g, k).contains(&e));
    }
}

#[test]
fn flips_negate_eta() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..60 {
        let kt = rng.gen_range(1..=3);
        let t = random_tree(&mut rng, &symbols(2), kt);
        let e = t.eta(2).unwrap();
        for f in t.flips() {
            assert_eq!(f.eta(2).unwrap(), e.neg(), "{t} vs {f}");
        }
    }
}

#[test]
fn bracket_is_antisymmetric_and_matches_eta() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..60 {
        let g = 2;
        let ka = rng.gen_range(1..=2);
        let a = random_tree(&mut rng, &symbols(g), ka);
        let kb = rng.gen_range(1..=2);
        let b = random_tree(&mut rng, &symbols(g), kb);
        let ab = tree_bracket(&a, &b).eta(g).unwrap();
        let ba = tree_bracket(&b, &a).eta(g).unwrap();
        assert_eq!(ab, ba.neg());
        assert_eq!(ab, derivation_bracket(&a.eta(g).unwrap(), &b.eta(g).unwrap()).unwrap());
    }
}

#[test]
fn enumeration_counts_small_cases() {
    // one tripod per multiset of leaves, two when the three labels are distinct
    assert_eq!(enumerate_trees(1, 1).len(), 4);
    assert_eq!(enumerate_trees(2, 1).len(), 20 + 4);
    for t in enumerate_trees(2, 2) {
        assert_eq!(t.degree(), 2);
        assert_eq!(t.leaf_count(), 4);
    }
}

#[test]
fn genus_one_degree_two_has_index_two() {
    let r = image_lattice(1, 2).unwrap();
    assert_eq!(r.dk_rank, 1);
    assert_eq!(r.divisors, vec![BigInt::from(2)]);
    assert!(r.powers_of_two());
}

#[test]
fn decompose_rejects_bad_input() {
    let t = DecoratedTree::parse("(x1,y1,y2)").unwrap();
    assert!(matches!(decompose(&t, 3), Err(TreeError::NotLagrangian(_))));
    let t = DecoratedTree::parse("(y1,y2,y3)").unwrap();
    assert!(matches!(decompose(&t, 3), Err(TreeError::DegreeTooSmall)));
    let t = DecoratedTree::parse("(y1,(y2,y1),(y2,y1))").unwrap();
    assert!(matches!(decompose(&t, 2), Err(TreeError::NoFreshIndex(2))));
}

#[test]
fn full_decomposition_uses_tripods_only() {
    let t = DecoratedTree::parse("(y1,((y2,y3),y4),y1)").unwrap();
    let full = full_decompose(&t, 5).unwrap();
    assert!(full.expr.tripods().iter().all(|tr| tr.degree() == 1));
    assert_eq!(full.expr.tripods().len(), 3);
    assert_eq!(full.expr.eval(5).unwrap().scale(&BigInt::from(full.sign)), t.eta(5).unwrap());
}
