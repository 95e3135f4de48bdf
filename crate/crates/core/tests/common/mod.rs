//! Shared builders and oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cartdec::algebra::point_stabilizer;
use cartdec::analysis::{quotient_analysis, six_class_classify, theorem_main_report, ClassLabel};
use cartdec::constructions::Instance;
use cartdec::factorisation::product_order;
use cartdec::product::DirectFactorisation;
use cartdec::suites::{diagonal_strip, strip_normaliser_formula};
use cartdec::system::{
    decomposition_from_system, system_from_decomposition, verify_cartesian_system,
    verify_simple_factor_identity, SubgroupSpace,
};
use cartdec::{Group, Limits, Perm, Point};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn cyc(n: usize, cycles: &[&[Point]]) -> Perm {
    Perm::from_cycles(n, cycles).unwrap()
}

/// Subgroups of A5 on five points, by generators.
pub fn a5_subgroups() -> Vec<(&'static str, Vec<Perm>)> {
    vec![
        ("A5", vec![cyc(5, &[&[0, 1, 2]]), cyc(5, &[&[0, 1, 2, 3, 4]])]),
        ("A4", vec![cyc(5, &[&[0, 1, 2]]), cyc(5, &[&[0, 1], &[2, 3]])]),
        ("D10", vec![cyc(5, &[&[0, 1, 2, 3, 4]]), cyc(5, &[&[1, 4], &[2, 3]])]),
        ("S3", vec![cyc(5, &[&[0, 1, 2]]), cyc(5, &[&[0, 1], &[3, 4]])]),
        ("V4", vec![cyc(5, &[&[0, 1], &[2, 3]]), cyc(5, &[&[0, 2], &[1, 3]])]),
        ("C5", vec![cyc(5, &[&[0, 1, 2, 3, 4]])]),
        ("C3", vec![cyc(5, &[&[0, 1, 2]])]),
        ("C2", vec![cyc(5, &[&[0, 1], &[2, 3]])]),
    ]
}

/// `A5^k` on `5k` points, coordinate `c` on points `5c..5c+4`.
pub fn a5_power(k: usize) -> Group {
    let mut gens = Vec::new();
    for c in 0..k {
        gens.push(cyc(5, &[&[0, 1, 2]]).embed(5 * c, 5 * k));
        gens.push(cyc(5, &[&[0, 1, 2, 3, 4]]).embed(5 * c, 5 * k));
    }
    Group::with_order(5 * k, gens, 60u128.pow(k as u32)).unwrap()
}

/// The strip `{(h^{φ_1}, …, h^{φ_r})}` on the coordinates `support` of
/// `A5^k`, each `φ_i` conjugation by an element of S5.
pub fn a5_strip(k: usize, support: &[usize], h: &[Perm], phis: &[Perm]) -> Vec<Perm> {
    h.iter()
        .map(|x| {
            support.iter().zip(phis).fold(Perm::identity(5 * k), |acc, (&c, phi)| {
                acc.mul(&x.conjugate(phi).embed(5 * c, 5 * k))
            })
        })
        .collect()
}

/// A random partition of `0..k` into consecutive chunks of a shuffle.
pub fn random_partition<R: Rng>(k: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut coords: Vec<usize> = (0..k).collect();
    coords.shuffle(rng);
    let mut out = Vec::new();
    let mut i = 0;
    while i < k {
        let len = rng.gen_range(1..=k - i);
        let mut block = coords[i..i + len].to_vec();
        block.sort_unstable();
        out.push(block);
        i += len;
    }
    out.sort();
    out
}

fn random_s5<R: Rng>(rng: &mut R) -> Perm {
    let mut images: Vec<Point> = (0..5).collect();
    images.shuffle(rng);
    Perm::from_images(images).unwrap()
}

/// Product of random strips over disjoint supports of length at least two,
/// with a random subgroup of A5 on each.
pub fn random_strip_product<R: Rng>(k: usize, rng: &mut R) -> Group {
    let subs = a5_subgroups();
    let mut supports: Vec<Vec<usize>> = random_partition(k, rng).into_iter().filter(|b| b.len() >= 2).collect();
    if supports.is_empty() {
        let mut coords: Vec<usize> = (0..k).collect();
        coords.shuffle(rng);
        let mut b = coords[..2].to_vec();
        b.sort_unstable();
        supports.push(b);
    }
    let mut gens = Vec::new();
    let mut order = 1u128;
    for s in &supports {
        let (_, h) = &subs[rng.gen_range(0..subs.len())];
        let phis: Vec<Perm> = s.iter().map(|_| random_s5(rng)).collect();
        gens.extend(a5_strip(k, s, h, &phis));
        order *= Group::new(5, h.clone()).unwrap().order();
    }
    Group::with_order(5 * k, gens, order).unwrap()
}

/// Two random disjoint-strip products; `Ok(false)` means they factorise `A5^k`.
pub fn strip_pair_misses_m<R: Rng>(rng: &mut R) -> (bool, String) {
    let k = rng.gen_range(2..=4);
    let a = random_strip_product(k, rng);
    let b = random_strip_product(k, rng);
    let (p, i) = product_order(&a, &b, &Limits::default()).unwrap();
    let m = 60u128.pow(k as u32);
    (p < m, format!("k = {k}, |A| = {}, |B| = {}, |A∩B| = {i}, |AB| = {p}", a.order(), b.order()))
}

/// A random product of full diagonal strips of `A5^k` together with the
/// partition of coordinates it was built from.
pub fn random_subdirect<R: Rng>(k: usize, rng: &mut R) -> (Group, Vec<Vec<usize>>) {
    let full = a5_subgroups().remove(0).1;
    let blocks = random_partition(k, rng);
    let mut gens = Vec::new();
    for b in &blocks {
        let phis: Vec<Perm> = b.iter().map(|_| random_s5(rng)).collect();
        gens.extend(a5_strip(k, b, &full, &phis));
    }
    let order = 60u128.pow(blocks.len() as u32);
    (Group::with_order(5 * k, gens, order).unwrap(), blocks)
}

/// Scott decomposition of a random subdirect subgroup against the
/// partition it was built from.
pub fn scott_roundtrip<R: Rng>(rng: &mut R) -> (bool, String) {
    let k = rng.gen_range(1..=4);
    let m = a5_power(k);
    let (h, blocks) = random_subdirect(k, rng);
    let d = DirectFactorisation::new(&m, &m).unwrap();
    // Factor index of each coordinate, read off from where its generator lands.
    let coord_factor: Vec<usize> = (0..k)
        .map(|c| {
            let x = d.represent(&cyc(5, &[&[0, 1, 2]]).embed(5 * c, 5 * k)).unwrap();
            let moved = x.first_moved().unwrap() as usize;
            (0..d.num_factors()).find(|&i| d.support(i).contains(&moved)).unwrap()
        })
        .collect();
    let expected: BTreeSet<Vec<usize>> = blocks
        .iter()
        .map(|b| {
            let mut v: Vec<usize> = b.iter().map(|&c| coord_factor[c]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let hr = d.represent_group(&h, Some(h.order())).unwrap();
    let strips = d.scott_decompose(&hr).unwrap();
    let got: BTreeSet<Vec<usize>> = strips
        .iter()
        .map(|s| {
            let mut v = s.support.clone();
            v.sort_unstable();
            v
        })
        .collect();
    let product: u128 = strips.iter().map(|s| s.component.order()).product();
    let inside = strips.iter().all(|s| s.component.generators().iter().all(|x| hr.contains(x)));
    let ok = got == expected && product == h.order() && inside;
    (ok, format!("k = {k}, blocks {blocks:?}, strips {got:?}, expected {expected:?}"))
}

/// `N_{T×T}` of a strip by running over every element of `T × T`.
pub fn brute_normaliser_order(t: &Group, strip: &Group) -> u128 {
    let n = t.degree();
    let elems = t.elements(1 << 20).unwrap();
    let mut count = 0u128;
    for x in &elems {
        let xl = x.embed(0, 2 * n);
        for y in &elems {
            let g = xl.mul(&y.embed(n, 2 * n));
            if strip.generators().iter().all(|s| strip.contains(&s.conjugate(&g))) {
                count += 1;
            }
        }
    }
    count
}

/// Strip normaliser formula against exhaustive search: same order, and
/// every formula generator normalises the strip.
pub fn strip_normaliser_vs_brute(t: &Group, h: &Group, phi: &Perm) -> (bool, String) {
    let limits = Limits::default();
    let strip = diagonal_strip(t, h, phi).unwrap();
    let formula = strip_normaliser_formula(t, h, phi, &limits).unwrap();
    let brute = brute_normaliser_order(t, &strip);
    let normalises = formula
        .generators()
        .iter()
        .all(|g| strip.generators().iter().all(|s| strip.contains(&s.conjugate(g))));
    (
        brute == formula.order() && normalises,
        format!("|H| = {}, formula {}, exhaustive {brute}", h.order(), formula.order()),
    )
}

/// `G_ω` permutes the parts of the decomposition exactly as it permutes the
/// members of the system by conjugation, and the system maps back to the
/// decomposition.
pub fn system_roundtrip(inst: &Instance) -> (bool, String) {
    let e = inst.decomposition.canonical();
    let system = system_from_decomposition(&inst.m, inst.omega, &e).unwrap();
    let back = decomposition_from_system(&system).unwrap().canonical();
    if back != e {
        return (false, format!("{}: decomposition does not survive the roundtrip", inst.label()));
    }
    let stab = point_stabilizer(&inst.g, inst.omega).unwrap();
    for x in stab.generators() {
        for (i, part) in e.parts().iter().enumerate() {
            let on_parts = e.position(&part.image(x)).unwrap();
            let conj = system.members[i].conjugate(x);
            let on_members = system.members.iter().position(|k| k.same_as(&conj));
            if on_members != Some(on_parts) {
                return (false, format!("{}: actions differ on part {i}", inst.label()));
            }
        }
    }
    (true, format!("{}: {} parts", inst.label(), e.index()))
}

/// Intersection, product and per-factor identities on the system of an instance.
pub fn system_identities(inst: &Instance) -> (bool, String) {
    let limits = Limits::default();
    let system = system_from_decomposition(&inst.m, inst.omega, &inst.decomposition).unwrap();
    let space = SubgroupSpace::new(&inst.m, &inst.g, limits).unwrap();
    let check = verify_cartesian_system(&system, &space).unwrap();
    let ident = verify_simple_factor_identity(&system, &space).unwrap();
    (
        check.holds && ident.holds,
        format!("{}: system {:?}, factor identity {:?}", inst.label(), check.violation, ident.violation),
    )
}

/// `H < T` is maximal iff `⟨H, x⟩ = T` for every `x ∈ T \ H`.
pub fn is_maximal_by_search(t: &Group, h: &Group) -> bool {
    if h.order() == t.order() {
        return false;
    }
    t.elements(1 << 20).unwrap().iter().filter(|x| !h.contains(x)).all(|x| {
        let mut gens = h.generators().to_vec();
        gens.push(x.clone());
        Group::new(t.degree(), gens).unwrap().order() == t.order()
    })
}

/// Whenever a projection of a quotient subgroup `K_j` is maximal in its
/// factor, the quotient is labelled CD_1. Returns whether the premise was met.
pub fn maximal_projection_gives_cd1(inst: &Instance) -> (bool, bool, String) {
    let limits = Limits::default();
    let a = quotient_analysis(&inst.g, &inst.m, inst.omega, &inst.decomposition, &limits).unwrap();
    let report = theorem_main_report(&inst.g, &inst.m, inst.omega, &inst.decomposition, &limits).unwrap();
    let d = a.space.require_factorisation().unwrap();
    let mut premise = false;
    let mut ok = true;
    let mut notes = Vec::new();
    for (j, k) in a.k.iter().enumerate() {
        let lifted = a.space.lift(k).unwrap();
        let maximal = (0..d.num_factors()).any(|i| {
            let p = d.projection(&[i], &lifted).unwrap();
            is_maximal_by_search(d.factor(i), &p)
        });
        let label = report.orbits[j].classification.as_ref().map(|c| c.label.clone());
        if maximal {
            premise = true;
            ok &= label == Some(ClassLabel::Cd1);
        }
        notes.push(format!("K_{j}: maximal projection {maximal}, label {label:?}"));
    }
    (ok, premise, format!("{}: {}", inst.label(), notes.join("; ")))
}

/// Labels from several base points in the orbit of `ω`.
pub fn labels_from_base_points(inst: &Instance, count: usize) -> Vec<ClassLabel> {
    let limits = Limits::default();
    let orbit = inst.g.orbit(inst.omega).unwrap();
    orbit
        .iter()
        .step_by((orbit.len() / count).max(1))
        .take(count)
        .map(|&w| six_class_classify(&inst.g, &inst.m, w, &inst.decomposition, &limits).unwrap().label)
        .collect()
}
