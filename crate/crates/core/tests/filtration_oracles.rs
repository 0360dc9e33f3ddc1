use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torelli_core::acceptance::level_two_pool;
use torelli_core::deriv::{bracket_map, project_to_lagrangian};
use torelli_core::filtration::{
    catalog, catalog_entry, discover, in_lagrangian_kernel, is_symplectic, johnson_hom, johnson_membership,
    lagrangian_hom, lagrangian_membership, linear_action, longitude_twist, meridian_twist, r_g, resolve_expression,
    separating_twist, sp_matrix, Condition, FiltrationError,
};
use torelli_core::heegaard::{first_homology, heegaard_presentation, is_homology_sphere};
use torelli_core::word::{FreeEndo, Generator, GroupWord};

#[test]
fn johnson_is_equivariant_under_conjugation() {
    let g = 2;
    let hs = [("sep_twist_1", separating_twist(g, 1)), ("sep_twist_2", separating_twist(g, 2))];
    for b in catalog(g).into_iter().filter(|e| e.rel_boundary) {
        let action = linear_action(&b.endo);
        for (name, h) in &hs {
            let conj = b.endo.conjugate(h).unwrap();
            let lhs = johnson_hom(&conj, 2).unwrap();
            let rhs = johnson_hom(h, 2).unwrap().map_linear(&action);
            assert_eq!(lhs, rhs, "{} acting on {name}", b.name);
        }
    }
}

#[test]
fn catalog_matrices_are_symplectic() {
    for g in 1..=3 {
        for e in catalog(g) {
            assert!(is_symplectic(&sp_matrix(&e.endo)), "{} at g={g}", e.name);
            if e.rel_boundary {
                assert!(e.endo.fixes_boundary(), "{} at g={g}", e.name);
            }
        }
    }
}

#[test]
fn membership_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let g = 2;
    let cat = catalog(g);
    let entries: Vec<_> = cat.iter().filter(|e| e.rel_boundary).collect();
    let pool = level_two_pool(g);
    for _ in 0..30 {
        let mut h = pool.choose(&mut rng).unwrap().1.clone();
        for _ in 0..rng.gen_range(0..3) {
            h = h.compose(&entries.choose(&mut rng).unwrap().endo).unwrap();
        }
        let mut prev_j = true;
        let mut prev_l = true;
        for k in 1..=4 {
            let j = johnson_membership(&h, k).unwrap().member;
            let l = lagrangian_membership(&h, k).member;
            assert!(prev_j || !j, "Johnson level {k} without level {}", k - 1);
            assert!(prev_l || !l, "Lagrangian level {k} without level {}", k - 1);
            assert!(!j || l, "Johnson level {k} but not Lagrangian level {k}");
            prev_j = j;
            prev_l = l;
        }
    }
}

#[test]
fn projection_of_johnson_is_lagrangian_value() {
    let g = 3;
    for (name, h) in level_two_pool(g).into_iter().take(12) {
        let j = johnson_hom(&h, 2).unwrap();
        let jl = lagrangian_hom(&h, 2).unwrap();
        assert_eq!(project_to_lagrangian(&j), jl, "{name}");
        assert!(in_lagrangian_kernel(&jl));
    }
}

#[test]
fn witnesses_explain_failures() {
    let g = 2;
    let t = longitude_twist(g, 1, true);
    let r = lagrangian_membership(&t, 1);
    assert!(!r.member);
    assert_eq!(r.witness.unwrap().condition, Condition::Abelianization);
    let r = johnson_membership(&meridian_twist(g, 1, true), 1).unwrap();
    assert!(!r.member);
    assert_eq!(r.witness.unwrap().condition, Condition::LowerCentralSeries);
    assert!(matches!(johnson_hom(&meridian_twist(g, 1, true), 2), Err(FiltrationError::NotMember(_))));
    let word = |s: &str| GroupWord::parse(s, g).unwrap();
    let images = BTreeMap::from([(Generator::x(1), word("x1 y2"))]);
    let inverse = BTreeMap::from([(Generator::x(1), word("x1 y2^-1"))]);
    let h = FreeEndo::from_map(g, &images, Some(&inverse)).unwrap();
    assert!(matches!(johnson_membership(&h, 1), Err(FiltrationError::BoundaryNotFixed)));
}

#[test]
fn r_g_fixes_boundary_and_swaps_handles() {
    for g in 1..=4 {
        let r = r_g(g);
        assert!(r.fixes_boundary());
        let m = sp_matrix(&r);
        assert!(is_symplectic(&m));
        assert!(!lagrangian_membership(&r, 1).member);
    }
}

#[test]
fn expressions_resolve_to_compositions() {
    let g = 2;
    let a = catalog_entry(g, "twist_x1").unwrap().endo;
    let b = catalog_entry(g, "sep_twist_2").unwrap().endo;
    let h = resolve_expression(g, "twist_x1 * sep_twist_2^-1").unwrap();
    assert_eq!(h, a.compose(&b.inverse().unwrap()).unwrap());
    assert!(resolve_expression(g, "no_such_map").is_err());
}

#[test]
fn discover_finds_twists_with_zero_values() {
    let g = 2;
    let entries: Vec<_> = catalog(g).into_iter().filter(|e| e.name.starts_with("twist_") && !e.name.ends_with("_inv")).collect();
    let res = discover(&entries, 2, 2).unwrap();
    // 8 letters, 8 + 8·7 reduced words
    assert_eq!(res.enumerated, 64);
    assert!(!res.hits.is_empty());
    for hit in &res.hits {
        assert!(hit.report.member);
        assert!(hit.value.is_zero() || in_lagrangian_kernel(&hit.value));
        assert!(hit.word.iter().all(|w| w.starts_with("twist_x")), "{:?}", hit.word);
    }
    let sep: Vec<_> = catalog(g).into_iter().filter(|e| e.name.starts_with("sep_twist")).collect();
    let res = discover(&sep, 2, 2).unwrap();
    assert_eq!(res.hits.len(), res.enumerated);
    assert!(res.hits.iter().all(|h| h.value.is_zero()));
}

#[test]
fn lagrangian_value_of_a_mixed_separating_twist() {
    let g = 2;
    let b = r_g(g).conjugate(&catalog_entry(g, "meridian_sum_1_2_plus").unwrap().endo).unwrap();
    let h = b.conjugate(&separating_twist(g, 1)).unwrap();
    let jl = lagrangian_hom(&h, 2).unwrap();
    assert_eq!(jl.to_string(), "1*y1|[y1y2y2] + 1*y2|[y1y1y2]");
    assert!(bracket_map(&jl).is_zero());
    assert_eq!(project_to_lagrangian(&johnson_hom(&h, 2).unwrap()), jl);
}

#[test]
fn heegaard_post_composition_can_change_homology() {
    let g = 1;
    let h = longitude_twist(g, 1, true);
    assert!(is_homology_sphere(&h));
    let t = meridian_twist(g, 1, true);
    let t_inv = meridian_twist(g, 1, false);
    let verdicts = [is_homology_sphere(&t.compose(&h).unwrap()), is_homology_sphere(&t_inv.compose(&h).unwrap())];
    assert!(verdicts.contains(&false));
    assert!(is_homology_sphere(&h.compose(&t).unwrap()));
    let report = first_homology(&heegaard_presentation(&t.compose(&t).unwrap().compose(&h).unwrap()));
    assert_eq!(report.divisors.len(), 1);
    assert!(report.determinant.is_some());
}
