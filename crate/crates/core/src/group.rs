//! Permutation groups given by generators, with a lazily built stabiliser chain.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use rand::Rng;

use crate::chain::StabChain;
use crate::error::{Error, Result};
use crate::perm::{Perm, Point};

/// Seed for every randomised chain construction, so runs are reproducible.
pub(crate) const CHAIN_SEED: u64 = 0x5eed_cafe;

#[derive(Clone)]
pub struct Group {
    degree: usize,
    gens: Vec<Perm>,
    /// An upper bound for the order that is known to be attained.
    order_hint: Option<u128>,
    chain: OnceLock<Arc<StabChain>>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Group")
            .field("degree", &self.degree)
            .field("gens", &self.gens)
            .finish()
    }
}

impl Group {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::input("degree must be positive"));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.degree() != degree {
                return Err(Error::input(format!(
                    "generator {i} has degree {} but the group has degree {degree}",
                    g.degree()
                )));
            }
        }
        Ok(Group {
            degree,
            gens,
            order_hint: None,
            chain: OnceLock::new(),
        })
    }

    /// Like [`Group::new`], but the chain is built by randomised Schreier–Sims
    /// and must reach `order`. The caller must know that `order` bounds the
    /// true order from above (for instance because the group is a homomorphic
    /// image of a group of that order, or a subgroup of that index); reaching
    /// the bound then certifies it.
    pub fn with_order(degree: usize, gens: Vec<Perm>, order: u128) -> Result<Self> {
        let mut g = Group::new(degree, gens)?;
        g.order_hint = Some(order);
        Ok(g)
    }

    pub fn trivial(degree: usize) -> Self {
        Group::new(degree, Vec::new()).expect("positive degree")
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            let cyc: Vec<Point> = (0..n as Point).collect();
            gens.push(Perm::from_cycles(n, &[&[0, 1]]).unwrap());
            gens.push(Perm::from_cycles(n, &[&cyc]).unwrap());
        }
        let order = (2..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i));
        Group::with_hint(n, gens, order)
    }

    pub fn alternating(n: usize) -> Self {
        let mut gens = Vec::new();
        for i in 2..n as Point {
            gens.push(Perm::from_cycles(n, &[&[0, 1, i]]).unwrap());
        }
        let order = (3..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i));
        Group::with_hint(n, gens, order)
    }

    /// Standard generators with the order attached when it is representable.
    fn with_hint(n: usize, gens: Vec<Perm>, order: Option<u128>) -> Self {
        let mut g = Group::new(n, gens).expect("valid generators");
        g.order_hint = order;
        g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(|g| g.is_identity())
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| Arc::new(self.build_chain(&[]).expect("chain construction")))
    }

    /// Fallible variant of [`Group::chain`]; reports a stalled randomised build
    /// instead of panicking.
    pub fn try_chain(&self) -> Result<&StabChain> {
        if let Some(c) = self.chain.get() {
            return Ok(c);
        }
        let c = self.build_chain(&[])?;
        let _ = self.chain.set(Arc::new(c));
        Ok(self.chain.get().unwrap())
    }

    fn known_order(&self) -> Option<u128> {
        self.chain.get().and_then(|c| c.checked_order()).or(self.order_hint)
    }

    fn build_chain(&self, prefix: &[Point]) -> Result<StabChain> {
        match self.known_order() {
            Some(order) => StabChain::with_known_order(self.degree, &self.gens, prefix, order, CHAIN_SEED),
            None => Ok(StabChain::schreier_sims(self.degree, &self.gens, prefix)),
        }
    }

    /// A fresh chain whose base starts with `prefix`.
    pub fn chain_with_base(&self, prefix: &[Point]) -> Result<StabChain> {
        for &p in prefix {
            self.check_point(p)?;
        }
        if self.known_order().is_none() {
            // Build the default chain first so the order is known; the prefixed
            // chain can then use the cheap randomised construction.
            self.try_chain()?;
        }
        self.build_chain(prefix)
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    /// The order, or a limit error when it does not fit in a `u128`.
    pub fn try_order(&self) -> Result<u128> {
        self.try_chain()?
            .checked_order()
            .ok_or_else(|| Error::limit(format!("the order of a group of degree {} exceeds 2^128", self.degree)))
    }

    pub fn check_point(&self, p: Point) -> Result<()> {
        if (p as usize) < self.degree {
            Ok(())
        } else {
            Err(Error::input(format!("point {p} out of range for degree {}", self.degree)))
        }
    }

    pub fn try_contains(&self, g: &Perm) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::input(format!(
                "permutation of degree {} tested against group of degree {}",
                g.degree(),
                self.degree
            )));
        }
        Ok(self.chain().contains(g))
    }

    /// Membership; permutations of the wrong degree are never members.
    pub fn contains(&self, g: &Perm) -> bool {
        self.try_contains(g).unwrap_or(false)
    }

    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.degree == other.degree && self.gens.iter().all(|g| other.contains(g))
    }

    /// Equality as sets of permutations.
    pub fn same_as(&self, other: &Group) -> bool {
        self.degree == other.degree && self.order() == other.order() && self.is_subgroup_of(other)
    }

    pub fn orbit(&self, p: Point) -> Result<Vec<Point>> {
        self.check_point(p)?;
        let mut seen = vec![false; self.degree];
        seen[p as usize] = true;
        let mut orbit = vec![p];
        let mut i = 0;
        while i < orbit.len() {
            let q = orbit[i];
            for g in &self.gens {
                let r = g.apply(q);
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    orbit.push(r);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        Ok(orbit)
    }

    /// All orbits, each sorted, ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<Point>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if seen[p] {
                continue;
            }
            seen[p] = true;
            let mut orb = vec![p as Point];
            let mut i = 0;
            while i < orb.len() {
                let q = orb[i];
                for g in &self.gens {
                    let r = g.apply(q);
                    if !seen[r as usize] {
                        seen[r as usize] = true;
                        orb.push(r);
                    }
                }
                i += 1;
            }
            orb.sort_unstable();
            out.push(orb);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).map(|o| o.len() == self.degree).unwrap_or(false)
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        self.chain().random_element(rng)
    }

    /// Every element, in chain order. Refuses groups larger than `cap`.
    pub fn elements(&self, cap: u128) -> Result<Vec<Perm>> {
        let order = self.order();
        if order > cap {
            return Err(Error::limit(format!("refusing to list {order} elements (cap {cap})")));
        }
        let chain = self.chain();
        let mut levels: Vec<Vec<Perm>> = Vec::new();
        for l in 0..chain.num_levels() {
            levels.push(
                chain
                    .basic_orbit(l)
                    .iter()
                    .map(|&d| chain.transversal(l, d).unwrap())
                    .collect(),
            );
        }
        let mut out = vec![Perm::identity(self.degree)];
        for reps in levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * reps.len());
            for g in &out {
                for u in reps {
                    next.push(g.mul(u));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Generators with identities and repeats removed.
    pub fn reduced_generators(&self) -> Vec<Perm> {
        let mut seen = HashSet::new();
        self.gens
            .iter()
            .filter(|g| !g.is_identity() && seen.insert((*g).clone()))
            .cloned()
            .collect()
    }

    /// Conjugate group `self^g`.
    pub fn conjugate(&self, g: &Perm) -> Group {
        let gens = self.gens.iter().map(|x| x.conjugate(g)).collect();
        let order = self.known_order();
        let mut h = Group::new(self.degree, gens).expect("same degree");
        h.order_hint = order;
        h
    }
}
