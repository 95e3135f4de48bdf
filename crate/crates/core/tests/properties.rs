mod common;

use std::sync::OnceLock;

use cartdec::analysis::{theorem_a_check, theorem_main_report, ClassLabel};
use cartdec::atlas::atlas_load;
use cartdec::constructions::{build, Example, Instance};
use cartdec::factorisation::{is_strong_multiple_factorisation, product_order};
use cartdec::product::DirectFactorisation;
use cartdec::system::enumerate_invariant_decompositions;
use cartdec::{Group, Limits};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instances() -> &'static [Instance] {
    static CELL: OnceLock<Vec<Instance>> = OnceLock::new();
    CELL.get_or_init(|| {
        let l = Limits::default();
        vec![
            build(Example::FullFactorisation, "A6", 1, &l).unwrap(),
            build(Example::FullFactorisation, "A6", 2, &l).unwrap(),
            build(Example::FullFactorisation, "M12", 1, &l).unwrap(),
            build(Example::Strip, "A6", 2, &l).unwrap(),
            build(Example::M10, "A6", 1, &l).unwrap(),
        ]
    })
}

#[test]
fn systems_roundtrip_on_constructed_instances() {
    for inst in instances() {
        let (ok, detail) = system_roundtrip(inst);
        assert!(ok, "{detail}");
    }
}

#[test]
fn system_identities_on_constructed_instances() {
    for inst in instances() {
        let (ok, detail) = system_identities(inst);
        assert!(ok, "{detail}");
    }
}

#[test]
fn maximal_projections_force_cd1() {
    let mut premise_seen = false;
    for inst in instances().iter().filter(|i| i.simple == "A6") {
        let (ok, premise, detail) = maximal_projection_gives_cd1(inst);
        assert!(ok, "{detail}");
        premise_seen |= premise;
    }
    assert!(premise_seen, "no instance had a maximal projection");
}

#[test]
fn label_independent_of_base_point() {
    let m10 = &instances()[4];
    let labels = labels_from_base_points(m10, 10);
    assert_eq!(labels.len(), 10);
    assert!(labels.iter().all(|l| *l == ClassLabel::Cd2Sim), "{labels:?}");
}

#[test]
fn orbit_counts_bounded_on_enumerated_decompositions() {
    let l = Limits::default();
    for inst in instances().iter().filter(|i| i.g.degree() <= 200) {
        let found = enumerate_invariant_decompositions(&inst.g, &inst.m, 200).unwrap();
        assert!(found.contains(&inst.decomposition.canonical()), "{}", inst.label());
        for e in &found {
            let report = theorem_main_report(&inst.g, &inst.m, inst.omega, e, &l).unwrap();
            assert!(report.s <= 3, "{}: s = {}", inst.label(), report.s);
            if report.homogeneous {
                let bound = theorem_a_check(&inst.g, e, Some(&inst.m), &l).unwrap();
                assert!(bound.orbits <= 2);
            }
        }
    }
}

#[test]
fn strip_normaliser_matches_exhaustive_search_for_a6() {
    let two = atlas_load("A6-two-actions").unwrap();
    let tau = two.automorphism("tau").unwrap();
    for name in ["A", "A∩B"] {
        let h = two.subgroup(name).unwrap();
        let (ok, detail) = strip_normaliser_vs_brute(&two.group, h, tau);
        assert!(ok, "{name}: {detail}");
    }
}

#[test]
fn four_parts_are_never_a_strong_multiple_factorisation() {
    let two = atlas_load("A6-two-actions").unwrap();
    let a = two.subgroup("A").unwrap();
    let b = two.subgroup("B").unwrap();
    let d = DirectFactorisation::new(&two.group, &two.group).unwrap();
    let parts: Vec<Group> = [a, b, a, b].iter().map(|h| d.represent_group(h, Some(h.order())).unwrap()).collect();
    let r = is_strong_multiple_factorisation(&d, &parts, &Limits::default());
    assert!(!matches!(r, Ok(ref c) if c.holds));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scott_decomposition_recovers_the_blocks(seed in any::<u64>()) {
        let (ok, detail) = scott_roundtrip(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(ok, "{}", detail);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn disjoint_strip_products_never_factorise(seed in any::<u64>()) {
        let (ok, detail) = strip_pair_misses_m(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(ok, "{}", detail);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn a5_strip_normaliser_matches_exhaustive_search(sub in 0usize..8, phi in Just((0u32..5).collect::<Vec<_>>()).prop_shuffle()) {
        let t = Group::alternating(5);
        let (_, gens) = a5_subgroups().swap_remove(sub);
        let h = Group::new(5, gens).unwrap();
        let phi = cartdec::Perm::from_images(phi).unwrap();
        let (ok, detail) = strip_normaliser_vs_brute(&t, &h, &phi);
        prop_assert!(ok, "{}", detail);
    }

    #[test]
    fn products_of_subgroups_have_lagrange_orders(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 2 + (seed % 2) as usize;
        let a = random_strip_product(k, &mut rng);
        let b = random_strip_product(k, &mut rng);
        let (p, i) = product_order(&a, &b, &Limits::default()).unwrap();
        prop_assert_eq!(a.order() % i, 0);
        prop_assert_eq!(b.order() % i, 0);
        prop_assert!(p <= 60u128.pow(k as u32));
    }
}
