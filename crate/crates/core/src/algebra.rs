//! Subgroup algebra: stabilisers, intersections, normalisers, centralisers,
//! normal closures and simplicity.

use std::collections::HashSet;

use crate::backtrack::{element_search, realizable, subgroup_search, Limits, Property};
use crate::chain::StabChain;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::{Perm, Point};

pub fn point_stabilizer(g: &Group, p: Point) -> Result<Group> {
    g.check_point(p)?;
    let chain = g.chain_with_base(&[p])?;
    let order = chain.order() / chain.basic_orbit(0).len() as u128;
    Group::with_order(g.degree(), chain.stabilizer_generators(1), order)
}

/// Pointwise stabiliser of `points`.
pub fn pointwise_stabilizer(g: &Group, points: &[Point]) -> Result<Group> {
    for &p in points {
        g.check_point(p)?;
    }
    let chain = g.chain_with_base(points)?;
    let mut distinct = points.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let depth = distinct.len();
    let order: u128 = chain.orbit_lengths()[depth.min(chain.num_levels())..]
        .iter()
        .map(|&l| l as u128)
        .product();
    Group::with_order(g.degree(), chain.stabilizer_generators(depth), order)
}

struct SetStab {
    member: Vec<bool>,
    set: Vec<Point>,
}

impl Property for SetStab {
    fn keep(&self, base: &[Point], images: &[Point]) -> bool {
        let l = images.len() - 1;
        self.member[base[l] as usize] == self.member[images[l] as usize]
    }
    fn test(&self, g: &Perm) -> bool {
        self.set.iter().all(|&p| self.member[g.apply(p) as usize])
    }
}

pub fn setwise_stabilizer(g: &Group, set: &[Point], limits: &Limits) -> Result<Group> {
    let mut member = vec![false; g.degree()];
    for &p in set {
        g.check_point(p)?;
        member[p as usize] = true;
    }
    let set: Vec<Point> = (0..g.degree() as Point).filter(|&p| member[p as usize]).collect();
    let prop = SetStab { member, set: set.clone() };
    // Base points inside the set first: their images are then constrained.
    let prefix: Vec<Point> = set.iter().copied().take(8).collect();
    subgroup_search(g, &prefix, &[], &prop, limits)
}

struct InH {
    h: Group,
    chain: StabChain,
}

impl Property for InH {
    fn keep(&self, base: &[Point], images: &[Point]) -> bool {
        realizable(&self.chain, base, images)
    }
    fn test(&self, g: &Perm) -> bool {
        self.h.contains(g)
    }
}

pub fn intersection(g: &Group, h: &Group, limits: &Limits) -> Result<Group> {
    if g.degree() != h.degree() {
        return Err(Error::input("intersection of groups of different degree"));
    }
    // Search the smaller group, pruning with the larger one.
    let (s, t) = if g.order() <= h.order() { (g, h) } else { (h, g) };
    if s.is_subgroup_of(t) {
        return Ok(s.clone());
    }
    let base = s.chain().base();
    let chain = t.chain_with_base(&base)?;
    let prop = InH { h: t.clone(), chain };
    subgroup_search(s, &base, &[], &prop, limits)
}

struct Normalizes {
    h: Group,
    orbit_len: Vec<usize>,
}

impl Property for Normalizes {
    fn keep(&self, base: &[Point], images: &[Point]) -> bool {
        let l = images.len() - 1;
        self.orbit_len[base[l] as usize] == self.orbit_len[images[l] as usize]
    }
    fn test(&self, g: &Perm) -> bool {
        self.h.generators().iter().all(|x| self.h.contains(&x.conjugate(g)))
    }
}

fn orbit_lengths(h: &Group) -> Vec<usize> {
    let mut len = vec![0; h.degree()];
    for orb in h.orbits() {
        for &p in &orb {
            len[p as usize] = orb.len();
        }
    }
    len
}

pub fn normalizer(g: &Group, h: &Group, limits: &Limits) -> Result<Group> {
    if g.degree() != h.degree() {
        return Err(Error::input("normalizer of a group of different degree"));
    }
    let known: Vec<Perm> = if h.is_subgroup_of(g) {
        h.reduced_generators()
    } else {
        Vec::new()
    };
    let prop = Normalizes {
        h: h.clone(),
        orbit_len: orbit_lengths(h),
    };
    subgroup_search(g, &[], &known, &prop, limits)
}

struct Centralizes {
    gens: Vec<Perm>,
    orbit_len: Vec<usize>,
}

impl Property for Centralizes {
    fn keep(&self, base: &[Point], images: &[Point]) -> bool {
        let l = images.len() - 1;
        if self.orbit_len[base[l] as usize] != self.orbit_len[images[l] as usize] {
            return false;
        }
        // (b^h)^g = (b^g)^h for every assigned pair.
        for h in &self.gens {
            for a in 0..images.len() {
                let bh = h.apply(base[a]);
                if let Some(c) = base[..images.len()].iter().position(|&b| b == bh) {
                    if images[c] != h.apply(images[a]) {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn test(&self, g: &Perm) -> bool {
        self.gens.iter().all(|h| h.commutes_with(g))
    }
}

pub fn centralizer(g: &Group, h: &Group, limits: &Limits) -> Result<Group> {
    if g.degree() != h.degree() {
        return Err(Error::input("centralizer of a group of different degree"));
    }
    let gens = h.reduced_generators();
    let known: Vec<Perm> = gens
        .iter()
        .filter(|x| g.contains(x) && gens.iter().all(|y| y.commutes_with(x)))
        .cloned()
        .collect();
    let prop = Centralizes {
        gens,
        orbit_len: orbit_lengths(h),
    };
    subgroup_search(g, &[], &known, &prop, limits)
}

/// Normal closure of `xs` under conjugation by `g`.
pub fn normal_closure(g: &Group, xs: &[Perm]) -> Result<Group> {
    let n = g.degree();
    let mut gens: Vec<Perm> = xs.iter().filter(|x| !x.is_identity()).cloned().collect();
    for x in &gens {
        if x.degree() != n {
            return Err(Error::input("normal closure of a permutation of the wrong degree"));
        }
    }
    let mut chain = StabChain::schreier_sims(n, &gens, &[]);
    let mut i = 0;
    while i < gens.len() {
        let x = gens[i].clone();
        for s in g.generators() {
            let c = x.conjugate(s);
            if !chain.contains(&c) {
                gens.push(c);
                chain = StabChain::schreier_sims(n, &gens, &[]);
            }
        }
        i += 1;
    }
    Group::with_order(n, gens, chain.order())
}

pub fn is_normal(g: &Group, h: &Group) -> bool {
    h.is_subgroup_of(g)
        && h
            .generators()
            .iter()
            .all(|x| g.generators().iter().all(|s| h.contains(&x.conjugate(s))))
}

pub fn commutator(a: &Perm, b: &Perm) -> Perm {
    a.inverse().mul(&b.inverse()).mul(a).mul(b)
}

pub fn derived_subgroup(g: &Group) -> Result<Group> {
    let gens = g.reduced_generators();
    let mut comms = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            comms.push(commutator(a, b));
        }
    }
    if comms.iter().all(|c| c.is_identity()) {
        return Ok(Group::trivial(g.degree()));
    }
    normal_closure(g, &comms)
}

/// Element `x` of `g` with `a^x = b` as subgroups, if any.
pub fn conjugating_element(g: &Group, a: &Group, b: &Group, limits: &Limits) -> Result<Option<Perm>> {
    if a.order() != b.order() {
        return Ok(None);
    }
    struct Conj {
        a_gens: Vec<Perm>,
        b: Group,
        a_len: Vec<usize>,
        b_len: Vec<usize>,
    }
    impl Property for Conj {
        fn keep(&self, base: &[Point], images: &[Point]) -> bool {
            let l = images.len() - 1;
            self.a_len[base[l] as usize] == self.b_len[images[l] as usize]
        }
        fn test(&self, g: &Perm) -> bool {
            self.a_gens.iter().all(|x| self.b.contains(&x.conjugate(g)))
        }
    }
    let prop = Conj {
        a_gens: a.reduced_generators(),
        b: b.clone(),
        a_len: orbit_lengths(a),
        b_len: orbit_lengths(b),
    };
    element_search(g, &[], &prop, limits)
}

/// Indexes elements by their positions in the basic orbits, so that large
/// groups can be scanned without storing every element.
pub(crate) struct ElementIndex {
    degree: usize,
    base: Vec<Point>,
    /// `pos[l][p]` = index of `p` in the basic orbit at level `l`.
    pos: Vec<Vec<u32>>,
    reps: Vec<Vec<Perm>>,
    inv_reps: Vec<Vec<Perm>>,
    radix: Vec<u64>,
    pub size: u64,
}

impl ElementIndex {
    pub fn new(g: &Group) -> Self {
        let chain = g.chain();
        let n = g.degree();
        let mut pos = Vec::new();
        let mut reps = Vec::new();
        let mut inv_reps = Vec::new();
        for l in 0..chain.num_levels() {
            let orbit = chain.basic_orbit(l);
            let mut p = vec![u32::MAX; n];
            let mut r = Vec::new();
            let mut ri = Vec::new();
            for (i, &d) in orbit.iter().enumerate() {
                p[d as usize] = i as u32;
                let u = chain.transversal(l, d).unwrap();
                ri.push(u.inverse());
                r.push(u);
            }
            pos.push(p);
            reps.push(r);
            inv_reps.push(ri);
        }
        let mut radix = vec![1u64; reps.len()];
        let mut size = 1u64;
        for l in (0..reps.len()).rev() {
            radix[l] = size;
            size *= reps[l].len() as u64;
        }
        ElementIndex {
            degree: n,
            base: chain.base(),
            pos,
            reps,
            inv_reps,
            radix,
            size,
        }
    }

    /// Index of a member of the group.
    pub fn index_of(&self, g: &Perm) -> u64 {
        let mut x = g.clone();
        let mut idx = 0;
        for l in 0..self.base.len() {
            let d = x.apply(self.base[l]);
            let i = self.pos[l][d as usize];
            idx += i as u64 * self.radix[l];
            x.mul_assign(&self.inv_reps[l][i as usize]);
        }
        idx
    }

    pub fn element(&self, mut idx: u64) -> Perm {
        let mut g = Perm::identity(self.degree);
        for l in 0..self.base.len() {
            let i = idx / self.radix[l];
            idx %= self.radix[l];
            g = self.reps[l][i as usize].mul(&g);
        }
        g
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[parent[x as usize] as usize];
        parent[x as usize] = p;
        x = p;
    }
    x
}

/// One representative for each conjugacy class of `g`.
pub fn conjugacy_class_reps(g: &Group, cap: u128) -> Result<Vec<Perm>> {
    let order = g.order();
    if order > cap {
        return Err(Error::limit(format!(
            "conjugacy classes of a group of order {order} exceed the cap {cap}"
        )));
    }
    let idx = ElementIndex::new(g);
    let size = idx.size as usize;
    let mut parent: Vec<u32> = (0..size as u32).collect();
    let gens: Vec<Perm> = g.reduced_generators();
    let invs: Vec<Perm> = gens.iter().map(|s| s.inverse()).collect();
    for e in 0..size {
        let x = idx.element(e as u64);
        for (s, si) in gens.iter().zip(&invs) {
            let c = si.mul(&x).mul(s);
            let f = idx.index_of(&c) as u32;
            let (a, b) = (find(&mut parent, e as u32), find(&mut parent, f));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut reps = Vec::new();
    for e in 0..size {
        if find(&mut parent, e as u32) == e as u32 {
            reps.push(idx.element(e as u64));
        }
    }
    Ok(reps)
}

/// Whether `g` is simple, decided exactly: every proper nontrivial normal
/// subgroup contains a whole class of elements of prime order, so it is
/// enough to take the normal closure of one element per such class.
pub fn is_simple(g: &Group, cap: u128) -> Result<bool> {
    let order = g.order();
    if order == 1 {
        return Ok(false);
    }
    if crate::primes::is_prime(order as u64) {
        return Ok(true);
    }
    let reps = conjugacy_class_reps(g, cap)?;
    let mut seen = HashSet::new();
    for x in reps {
        let o = x.order();
        if !crate::primes::is_prime(o) || !seen.insert(x.clone()) {
            continue;
        }
        if normal_closure(g, &[x])?.order() != order {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a6() -> Group {
        Group::new(
            6,
            vec![
                Perm::from_cycles(6, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(6, &[&[1, 2, 3, 4, 5]]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn stabilizers() {
        let g = a6();
        assert_eq!(point_stabilizer(&g, 0).unwrap().order(), 60);
        assert_eq!(pointwise_stabilizer(&g, &[0, 1]).unwrap().order(), 12);
        let s = setwise_stabilizer(&g, &[0, 1], &Limits::default()).unwrap();
        assert_eq!(s.order(), 24);
    }

    #[test]
    fn classes_and_simplicity() {
        let g = a6();
        assert_eq!(conjugacy_class_reps(&g, 1000).unwrap().len(), 7);
        assert!(is_simple(&g, 1000).unwrap());
        assert!(!is_simple(&Group::symmetric(5), 1000).unwrap());
        assert_eq!(derived_subgroup(&Group::symmetric(5)).unwrap().order(), 60);
    }

    #[test]
    fn centralizer_of_trivial_is_everything() {
        let g = a6();
        let c = centralizer(&g, &Group::trivial(6), &Limits::default()).unwrap();
        assert_eq!(c.order(), 360);
    }

    #[test]
    fn two_a5_classes_in_a6() {
        let g = a6();
        let a = point_stabilizer(&g, 0).unwrap();
        let b = Group::new(
            6,
            vec![
                Perm::from_cycles(6, &[&[0, 1, 2, 3, 4]]).unwrap(),
                Perm::from_cycles(6, &[&[0, 5], &[1, 4]]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(b.order(), 60);
        let lim = Limits::default();
        let d = intersection(&a, &b, &lim).unwrap();
        assert_eq!(d.order(), 10);
        assert_eq!(normalizer(&g, &d, &lim).unwrap().order(), 10);
        assert_eq!(centralizer(&g, &d, &lim).unwrap().order(), 1);
        assert!(conjugating_element(&g, &a, &b, &lim).unwrap().is_none());
        let c = point_stabilizer(&g, 3).unwrap();
        let x = conjugating_element(&g, &a, &c, &lim).unwrap().unwrap();
        assert!(a.conjugate(&x).same_as(&c));
    }
}
