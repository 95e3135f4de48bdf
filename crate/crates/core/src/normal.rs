//! Minimal normal subgroups, plinths, and centralisers in the symmetric group.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{centralizer, derived_subgroup, is_normal, normal_closure};
use crate::backtrack::Limits;
use crate::error::{Error, Result};
use crate::group::{Group, CHAIN_SEED};
use crate::perm::{Perm, Point};
use crate::primes::prime_divisors;
use crate::product::DirectFactorisation;

/// Largest abelian normal subgroup whose elements are listed.
const ABELIAN_CAP: u128 = 200_000;
const SEED_ATTEMPTS: usize = 64;

fn is_abelian(n: &Group) -> bool {
    let gens = n.reduced_generators();
    gens.iter().all(|a| gens.iter().all(|b| a.commutes_with(b)))
}

/// Orbits of `g` on the simple factors of `d`.
fn factor_orbits(d: &DirectFactorisation, g: &Group) -> Result<Vec<Vec<usize>>> {
    let k = d.num_factors();
    let owner = |p: usize| (0..k).find(|&c| d.support(c).contains(&p)).expect("point in a slice");
    let mut actions = Vec::new();
    for x in g.generators() {
        let r = d.represent(x)?;
        actions.push((0..k).map(|c| owner(r.apply(d.support(c).start as Point) as usize)).collect::<Vec<_>>());
    }
    let mut seen = vec![false; k];
    let mut orbits = Vec::new();
    for c in 0..k {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        let mut orb = vec![c];
        let mut i = 0;
        while i < orb.len() {
            for a in &actions {
                let e = a[orb[i]];
                if !seen[e] {
                    seen[e] = true;
                    orb.push(e);
                }
            }
            i += 1;
        }
        orb.sort_unstable();
        orbits.push(orb);
    }
    Ok(orbits)
}

/// Shrinks a non-trivial normal subgroup `n` of `g` to a minimal normal
/// subgroup of `g` inside it.
fn shrink(g: &Group, mut n: Group, limits: &Limits) -> Result<Group> {
    loop {
        if is_abelian(&n) {
            if n.order() > ABELIAN_CAP {
                return Err(Error::limit(format!(
                    "abelian normal subgroup of order {} is too large to certify",
                    n.order()
                )));
            }
            let mut best: Option<Group> = None;
            for y in n.elements(ABELIAN_CAP)? {
                let o = y.order();
                if !crate::primes::is_prime(o) {
                    continue;
                }
                let c = normal_closure(g, &[y])?;
                if best.as_ref().map_or(true, |b| c.order() < b.order()) {
                    best = Some(c);
                }
            }
            let best = best.ok_or_else(|| Error::Internal("abelian group without elements of prime order".into()))?;
            if best.order() == n.order() {
                return Ok(n);
            }
            n = best;
            continue;
        }
        match DirectFactorisation::new(&n, g) {
            Ok(d) => {
                let orbits = factor_orbits(&d, g)?;
                if orbits.len() == 1 {
                    return Ok(n);
                }
                let z = d.class_element(d.support(orbits[0][0]).start).clone();
                n = normal_closure(g, &[z])?;
            }
            Err(Error::Unsupported(_)) => {
                let dn = derived_subgroup(&n)?;
                if dn.order() > 1 && dn.order() < n.order() {
                    n = dn;
                    continue;
                }
                let z = centralizer(&n, &n, limits)?;
                if z.order() > 1 && z.order() < n.order() {
                    n = z;
                    continue;
                }
                return Err(Error::Unsupported(
                    "could not split a normal subgroup into simple factors".into(),
                ));
            }
            Err(e) => return Err(e),
        }
    }
}

/// Whether the normal subgroup `n` of `g` is minimal normal. Non-abelian
/// subgroups are split into simple factors and must have them permuted
/// transitively; abelian ones must be the normal closure of each of their
/// elements of prime order.
pub fn is_minimal_normal(g: &Group, n: &Group, limits: &Limits) -> Result<bool> {
    if n.order() == 1 || !is_normal(g, n) {
        return Ok(false);
    }
    Ok(shrink(g, n.clone(), limits)?.order() == n.order())
}

/// An element of prime order in `g` but outside `avoid`.
fn prime_order_element(g: &Group, avoid: &Group, rng: &mut ChaCha8Rng) -> Option<Perm> {
    let gens = g.reduced_generators();
    let randoms = (0..SEED_ATTEMPTS).map(|_| g.random_element(rng)).collect::<Vec<_>>();
    for x in gens.into_iter().chain(randoms) {
        let o = x.order();
        for p in prime_divisors(o as u128) {
            let y = x.pow(o / p);
            if !y.is_identity() && !avoid.contains(&y) {
                return Some(y);
            }
        }
    }
    None
}

/// Minimal normal subgroups of `g`. Each one after the first is searched
/// for in the centraliser of those already found, which finds all of them
/// when they are non-abelian. For abelian socles the list generates the
/// socle but need not contain every minimal normal subgroup.
pub fn minimal_normal_subgroups(g: &Group, limits: &Limits) -> Result<Vec<Group>> {
    if g.order() == 1 {
        return Err(Error::input("the trivial group has no minimal normal subgroups"));
    }
    let n = g.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(CHAIN_SEED);
    let mut found: Vec<Group> = Vec::new();
    let mut product = Group::trivial(n);
    let mut ambient = g.clone();
    while let Some(z) = prime_order_element(&ambient, &product, &mut rng) {
        let min = shrink(g, normal_closure(g, &[z])?, limits)?;
        if min.is_subgroup_of(&product) {
            break;
        }
        found.push(min);
        let gens: Vec<Perm> = found.iter().flat_map(|f| f.generators().iter().cloned()).collect();
        product = Group::new(n, gens)?;
        ambient = centralizer_in_group(g, &product, limits)?;
    }
    found.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.generators().cmp(b.generators())));
    Ok(found)
}

/// `C_G(H)`, using the centraliser in the symmetric group when `H` is
/// transitive.
fn centralizer_in_group(g: &Group, h: &Group, limits: &Limits) -> Result<Group> {
    if h.is_transitive() {
        let c = centralizer_in_sym(h, 0)?;
        let gens: Vec<Perm> = c.elements(u128::MAX)?.into_iter().filter(|x| g.contains(x)).collect();
        return Group::new(g.degree(), gens);
    }
    centralizer(g, h, limits)
}

/// Transitive minimal normal subgroups of `g`; empty when `g` is not
/// innately transitive.
pub fn is_innately_transitive(g: &Group, limits: &Limits) -> Result<Vec<Group>> {
    Ok(minimal_normal_subgroups(g, limits)?
        .into_iter()
        .filter(|n| n.is_transitive())
        .collect())
}

/// `C_{Sym Ω}(M)` for transitive `M`. Its elements correspond to the fixed
/// points `p` of `M_ω`: the element sending `ω^m` to `p^m`.
pub fn centralizer_in_sym(m: &Group, omega: Point) -> Result<Group> {
    m.check_point(omega)?;
    if !m.is_transitive() {
        return Err(Error::input("the centraliser in the symmetric group needs a transitive group"));
    }
    let n = m.degree();
    let chain = m.chain_with_base(&[omega])?;
    let stab = chain.stabilizer_generators(1);
    let fixed: Vec<Point> = (0..n as Point).filter(|&p| stab.iter().all(|x| x.apply(p) == p)).collect();
    let mut gens = Vec::new();
    for &p in &fixed {
        if p == omega {
            continue;
        }
        gens.push(translate(m, omega, p)?);
    }
    Group::with_order(n, gens, fixed.len() as u128)
}

/// The permutation `ω^m ↦ p^m`, built by walking the Schreier graph.
fn translate(m: &Group, omega: Point, p: Point) -> Result<Perm> {
    let n = m.degree();
    let mut img = vec![Point::MAX; n];
    img[omega as usize] = p;
    let mut queue = vec![omega];
    let mut i = 0;
    while i < queue.len() {
        let d = queue[i];
        for s in m.generators() {
            let e = s.apply(d);
            let v = s.apply(img[d as usize]);
            if img[e as usize] == Point::MAX {
                img[e as usize] = v;
                queue.push(e);
            } else if img[e as usize] != v {
                return Err(Error::Internal("fixed point of the stabiliser gave an inconsistent map".into()));
            }
        }
        i += 1;
    }
    Perm::from_images(img)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiprimitiveVerdict {
    pub centralizer_order: u128,
    /// `M` is the unique minimal normal subgroup (follows from a trivial
    /// centraliser, since another one would centralise `M`).
    pub unique_minimal_normal: bool,
    pub quasiprimitive: bool,
    pub simple_factors: usize,
    pub stabilizer_order: u128,
    pub stabilizer_subdirect: bool,
    /// Non-simple plinth with non-trivial, non-subdirect point stabiliser.
    pub type_pa: bool,
}

/// Quasiprimitivity read off from the plinth: `m` must be a transitive
/// minimal normal subgroup of `g`.
pub fn quasiprimitive_verdict(
    g: &Group,
    m: &Group,
    d: &DirectFactorisation,
    omega: Point,
    limits: &Limits,
) -> Result<QuasiprimitiveVerdict> {
    if !is_minimal_normal(g, m, limits)? || !m.is_transitive() {
        return Err(Error::input("M must be a transitive minimal normal subgroup"));
    }
    let c = centralizer_in_sym(m, omega)?;
    let unique = c.order() == 1;
    let chain = m.chain_with_base(&[omega])?;
    let stab_order = chain.order() / chain.basic_orbit(0).len() as u128;
    let stab = d.represent_group(&Group::new(m.degree(), chain.stabilizer_generators(1))?, Some(stab_order))?;
    let subdirect = stab_order > 1 && d.is_subdirect(&stab)?;
    let k = d.num_factors();
    Ok(QuasiprimitiveVerdict {
        centralizer_order: c.order(),
        unique_minimal_normal: unique,
        quasiprimitive: unique,
        simple_factors: k,
        stabilizer_order: stab_order,
        stabilizer_subdirect: subdirect,
        type_pa: unique && k >= 2 && stab_order > 1 && !subdirect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_cyclic_is_self_centralising() {
        let c4 = Group::new(4, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()]).unwrap();
        assert_eq!(centralizer_in_sym(&c4, 0).unwrap().order(), 4);
    }

    #[test]
    fn natural_a6() {
        let a6 = Group::alternating(6);
        assert_eq!(centralizer_in_sym(&a6, 0).unwrap().order(), 1);
        let mins = minimal_normal_subgroups(&a6, &Limits::default()).unwrap();
        assert_eq!(mins.len(), 1);
        assert_eq!(mins[0].order(), 360);
        assert_eq!(is_innately_transitive(&a6, &Limits::default()).unwrap().len(), 1);
    }

    #[test]
    fn a5_with_fixed_point() {
        let g = Group::new(
            6,
            vec![
                Perm::from_cycles(6, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(6, &[&[0, 1, 2, 3, 4]]).unwrap(),
            ],
        )
        .unwrap();
        assert!(is_innately_transitive(&g, &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn s4_has_klein_minimal_normal() {
        let s4 = Group::symmetric(4);
        let mins = minimal_normal_subgroups(&s4, &Limits::default()).unwrap();
        assert_eq!(mins.len(), 1);
        assert_eq!(mins[0].order(), 4);
    }
}
