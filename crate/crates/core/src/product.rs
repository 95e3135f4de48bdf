//! Direct-product structure of a non-abelian plinth `M = T_1 × ⋯ × T_k`.
//!
//! Every computation on `M` and its subgroups happens in a small faithful
//! representation: the conjugation action on a class `Y` of prime-order
//! elements, each lying in a single factor. `Y` is closed under a group `G`
//! normalising `M`, so `G` acts on it too; the kernel of that action is
//! `C_G(M)`. Because each factor `T_c` acts only on its own slice `Y_c` of
//! `Y`, the projection `σ_I` is restriction of a permutation to the slices
//! in `I`.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::is_simple;
use crate::chain::StabChain;
use crate::error::{Error, Result};
use crate::group::{Group, CHAIN_SEED};
use crate::perm::{Perm, Point};
use crate::primes::prime_divisors;

/// Largest conjugacy class used for the representation, scaled down with the
/// degree so that a class stays within a few hundred megabytes.
fn class_cap(degree: usize) -> usize {
    (40_000_000 / degree.max(1)).clamp(64, 20_000)
}
/// Largest group handed to the exact simplicity test.
const SIMPLE_CAP: u128 = 5_000_000;
const CANDIDATES: usize = 6;
const ATTEMPTS: usize = 400;

#[derive(Clone, Debug)]
pub struct DirectFactorisation {
    /// Degree of the permutation domain the plinth was given on.
    degree: usize,
    /// The elements of `Y` as permutations of that domain.
    elements: Vec<Perm>,
    fingerprint: Vec<Point>,
    lookup: HashMap<Vec<Point>, u32>,
    /// `Y_c` is the range `ranges[c]` of `Y`.
    ranges: Vec<(usize, usize)>,
    m: Group,
    factors: Vec<Group>,
}

/// A strip of `M`: a subgroup projecting isomorphically onto the factors in
/// its support and trivially onto the others.
#[derive(Clone, Debug)]
pub struct Strip {
    pub support: Vec<usize>,
    pub component: Group,
}

#[derive(Clone, Debug, Serialize)]
pub struct StripSummary {
    pub support: Vec<usize>,
    pub order: u128,
}

impl Strip {
    pub fn summary(&self) -> StripSummary {
        StripSummary {
            support: self.support.clone(),
            order: self.component.order(),
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

fn conjugation_closure(z: &Perm, gens: &[Perm], cap: usize) -> Option<Vec<Perm>> {
    let mut seen: HashMap<Vec<Point>, ()> = HashMap::new();
    seen.insert(z.images().to_vec(), ());
    let mut class = vec![z.clone()];
    let mut i = 0;
    while i < class.len() {
        for s in gens {
            let c = class[i].conjugate(s);
            if !seen.contains_key(c.images()) {
                if class.len() >= cap {
                    return None;
                }
                seen.insert(c.images().to_vec(), ());
                class.push(c);
            }
        }
        i += 1;
    }
    Some(class)
}

/// Conjugation action of `x` on `class`, which must be closed under it.
fn act_on_class(class: &[Perm], index: &HashMap<Vec<Point>, u32>, x: &Perm) -> Result<Perm> {
    let images = class
        .iter()
        .map(|y| {
            index
                .get(y.conjugate(x).images())
                .copied()
                .ok_or_else(|| Error::Internal("class not closed under conjugation".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Perm::from_images(images)
}

fn index_class(class: &[Perm]) -> HashMap<Vec<Point>, u32> {
    class
        .iter()
        .enumerate()
        .map(|(i, y)| (y.images().to_vec(), i as u32))
        .collect()
}

/// Finds a prime-order element of `c` lying in a single simple factor of
/// `m`, returning it with its `m`-class and the order of that factor.
fn single_factor_element(m: &Group, c: &Group, rng: &mut ChaCha8Rng) -> Result<(Perm, Vec<Perm>, u128)> {
    let mut cands: Vec<(Perm, Vec<Perm>)> = Vec::new();
    for attempt in 0..ATTEMPTS {
        let x = c.random_element(rng);
        let o = x.order();
        if o == 1 {
            continue;
        }
        for p in prime_divisors(o as u128) {
            let z = x.pow(o / p);
            match conjugation_closure(&z, m.generators(), class_cap(m.degree())) {
                Some(class) if class.len() == 1 => {
                    return Err(Error::Unsupported(
                        "the plinth has a non-trivial centre; abelian plinths are not supported".into(),
                    ))
                }
                Some(class) => cands.push((z, class)),
                None => {}
            }
        }
        if cands.len() >= CANDIDATES || (attempt + 1 == ATTEMPTS && !cands.is_empty()) {
            cands.sort_by_key(|(_, cl)| cl.len());
            for (z, class) in cands.drain(..) {
                // `M` induces on the class the product of the factors in
                // which `z` has a non-trivial component.
                let index = index_class(&class);
                let gens = m
                    .generators()
                    .iter()
                    .map(|y| act_on_class(&class, &index, y))
                    .collect::<Result<Vec<_>>>()?;
                let n = Group::new(class.len(), gens)?;
                // A factor of prime order would be abelian.
                if !crate::primes::is_prime(n.order() as u64) && is_simple(&n, SIMPLE_CAP)? {
                    let order = n.order();
                    return Ok((z, class, order));
                }
            }
        }
    }
    Err(Error::Unsupported(
        "could not isolate an element of a single simple direct factor".into(),
    ))
}

impl DirectFactorisation {
    /// Decomposes `m` into its simple direct factors. `g` must normalise `m`
    /// (pass `m` itself when there is no larger group).
    pub fn new(m: &Group, g: &Group) -> Result<Self> {
        if m.degree() != g.degree() {
            return Err(Error::input("plinth and group have different degrees"));
        }
        if m.is_trivial() || m.order() == 1 {
            return Err(Error::input("the trivial group has no simple direct factors"));
        }
        let n = m.degree();
        let mut rng = ChaCha8Rng::seed_from_u64(CHAIN_SEED);
        let mut found: Vec<(Perm, Vec<Perm>, u128)> = Vec::new();
        let mut c = m.clone();
        while c.order() > 1 {
            let (z, class, t_order) = single_factor_element(m, &c, &mut rng)?;
            // Kernel of `c` acting on the class: the remaining factors.
            let index = index_class(&class);
            let gens = c
                .generators()
                .iter()
                .map(|x| Ok(x.direct_sum(&act_on_class(&class, &index, x)?)))
                .collect::<Result<Vec<_>>>()?;
            let prefix: Vec<Point> = (n as Point..(n + class.len()) as Point).collect();
            let chain = StabChain::with_known_order(n + class.len(), &gens, &prefix, c.order(), CHAIN_SEED)?;
            let rest = c.order() / t_order;
            let kernel: Vec<Perm> = chain
                .stabilizer_generators(class.len())
                .into_iter()
                .map(|x| x.restrict(0, n))
                .filter(|x| !x.is_identity())
                .collect();
            c = if rest == 1 {
                Group::trivial(n)
            } else {
                Group::with_order(n, kernel, rest)?
            };
            found.push((z, class, t_order));
        }
        let product: u128 = found.iter().map(|f| f.2).product();
        if product != m.order() {
            return Err(Error::Internal(format!(
                "factor orders multiply to {product}, not to |M| = {}",
                m.order()
            )));
        }

        // Close the chosen elements under `g` and sort them by factor.
        let mut all_gens: Vec<Perm> = g.generators().to_vec();
        all_gens.extend(m.generators().iter().cloned());
        let mut by_factor: Vec<Vec<Perm>> = vec![Vec::new(); found.len()];
        let mut seen: HashMap<Vec<Point>, ()> = HashMap::new();
        for (z, _, _) in &found {
            if seen.contains_key(z.images()) {
                continue;
            }
            let orbit = conjugation_closure(z, &all_gens, class_cap(n) * found.len())
                .ok_or_else(|| Error::limit("conjugacy class under the normalising group is too large"))?;
            for y in orbit {
                if seen.insert(y.images().to_vec(), ()).is_some() {
                    continue;
                }
                let f = found
                    .iter()
                    .position(|(_, class, _)| class.iter().any(|w| !w.commutes_with(&y)))
                    .ok_or_else(|| Error::Internal("element commutes with every factor".into()))?;
                by_factor[f].push(y);
            }
        }
        let mut elements = Vec::new();
        let mut ranges = Vec::new();
        for ys in by_factor {
            let start = elements.len();
            elements.extend(ys);
            ranges.push((start, elements.len()));
        }
        let fingerprint = separating_points(&elements);
        let lookup = elements
            .iter()
            .enumerate()
            .map(|(i, y)| (fingerprint.iter().map(|&f| y.apply(f)).collect(), i as u32))
            .collect();
        let mut fact = DirectFactorisation {
            degree: n,
            elements,
            fingerprint,
            lookup,
            ranges,
            m: Group::trivial(1),
            factors: Vec::new(),
        };
        let mgens = m
            .generators()
            .iter()
            .map(|x| fact.represent(x))
            .collect::<Result<Vec<_>>>()?;
        fact.m = Group::with_order(fact.rep_degree(), mgens, m.order())?;
        fact.factors = (0..found.len())
            .map(|c| {
                let gens = fact.m.generators().iter().map(|x| fact.project_perm(&[c], x)).collect();
                Group::with_order(fact.rep_degree(), gens, found[c].2)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(fact)
    }

    /// Degree of the domain the plinth was given on.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Degree of the conjugation representation.
    pub fn rep_degree(&self) -> usize {
        self.elements.len()
    }

    pub fn num_factors(&self) -> usize {
        self.ranges.len()
    }

    /// `M` in the conjugation representation.
    pub fn plinth(&self) -> &Group {
        &self.m
    }

    pub fn factor(&self, i: usize) -> &Group {
        &self.factors[i]
    }

    pub fn factor_order(&self, i: usize) -> u128 {
        self.factors[i].order()
    }

    /// Points of the representation moved by `T_i`.
    pub fn support(&self, i: usize) -> std::ops::Range<usize> {
        let (a, b) = self.ranges[i];
        a..b
    }

    /// The representing element of `Y` at position `i`, on the original domain.
    pub fn class_element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    /// Image of `x` in the conjugation representation. Fails if `x` does not
    /// normalise the class (so does not normalise `M`).
    pub fn represent(&self, x: &Perm) -> Result<Perm> {
        if x.degree() != self.degree {
            return Err(Error::input("permutation has the wrong degree"));
        }
        let xi = x.inverse();
        let mut key = vec![0; self.fingerprint.len()];
        let mut images = Vec::with_capacity(self.elements.len());
        for y in &self.elements {
            for (k, &f) in key.iter_mut().zip(&self.fingerprint) {
                *k = x.apply(y.apply(xi.apply(f)));
            }
            let j = self
                .lookup
                .get(&key)
                .copied()
                .ok_or_else(|| Error::input("permutation does not normalise the plinth"))?;
            images.push(j);
        }
        Perm::from_images(images).map_err(|_| Error::input("permutation does not normalise the plinth"))
    }

    /// Image of a subgroup; `order` is passed on when it is known and the
    /// subgroup meets `C_G(M)` trivially.
    pub fn represent_group(&self, h: &Group, order: Option<u128>) -> Result<Group> {
        let gens = h
            .generators()
            .iter()
            .map(|x| self.represent(x))
            .collect::<Result<Vec<_>>>()?;
        match order {
            Some(o) => Group::with_order(self.rep_degree(), gens, o),
            None => Group::new(self.rep_degree(), gens),
        }
    }

    fn check_indices(&self, set: &[usize]) -> Result<()> {
        if set.iter().any(|&i| i >= self.num_factors()) {
            return Err(Error::input(format!(
                "factor index out of range (there are {} factors)",
                self.num_factors()
            )));
        }
        Ok(())
    }

    /// `σ_I(x)` for `x` in the representation of `M`.
    pub fn project_perm(&self, set: &[usize], x: &Perm) -> Perm {
        let mut images: Vec<Point> = (0..self.rep_degree() as Point).collect();
        for &i in set {
            for p in self.support(i) {
                images[p] = x.apply(p as Point);
            }
        }
        Perm::from_images(images).expect("factor slices are invariant")
    }

    /// `σ_I(K)` for `K ≤ M` in the representation.
    pub fn projection(&self, set: &[usize], k: &Group) -> Result<Group> {
        self.check_indices(set)?;
        let gens = k.generators().iter().map(|x| self.project_perm(set, x)).collect();
        Group::new(self.rep_degree(), gens)
    }

    pub fn projection_order(&self, set: &[usize], k: &Group) -> Result<u128> {
        Ok(self.projection(set, k)?.order())
    }

    pub fn is_subdirect(&self, k: &Group) -> Result<bool> {
        for i in 0..self.num_factors() {
            if self.projection_order(&[i], k)? != self.factor_order(i) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Classes of the relation "σ_{i,j}(K) is the graph of an isomorphism"
    /// on the factors where `K` projects onto.
    fn diagonal_classes(&self, k: &Group) -> Result<(Vec<Vec<usize>>, Vec<bool>)> {
        let r = self.num_factors();
        let full: Vec<bool> = (0..r)
            .map(|i| Ok(self.projection_order(&[i], k)? == self.factor_order(i)))
            .collect::<Result<_>>()?;
        let mut class_of: Vec<Option<usize>> = vec![None; r];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..r {
            if !full[i] || class_of[i].is_some() {
                continue;
            }
            let c = classes.len();
            class_of[i] = Some(c);
            let mut cls = vec![i];
            for j in i + 1..r {
                if full[j]
                    && class_of[j].is_none()
                    && self.factor_order(j) == self.factor_order(i)
                    && self.projection_order(&[i, j], k)? == self.factor_order(i)
                {
                    class_of[j] = Some(c);
                    cls.push(j);
                }
            }
            classes.push(cls);
        }
        Ok((classes, full))
    }

    fn complement(&self, set: &[usize]) -> Vec<usize> {
        (0..self.num_factors()).filter(|i| !set.contains(i)).collect()
    }

    /// Scott decomposition of a subdirect subgroup into disjoint full strips.
    pub fn scott_decompose(&self, h: &Group) -> Result<Vec<Strip>> {
        let (classes, full) = self.diagonal_classes(h)?;
        if full.iter().any(|f| !f) {
            return Err(Error::input("Scott decomposition needs a subdirect subgroup"));
        }
        let mut strips = Vec::new();
        let mut product: u128 = 1;
        for s in classes {
            let component = self.projection(&s, h)?;
            product *= component.order();
            for x in component.generators() {
                if !h.try_contains(x)? {
                    return Err(Error::Internal("strip component is not contained in the subgroup".into()));
                }
            }
            strips.push(Strip { support: s, component });
        }
        if product != h.order() {
            return Err(Error::Internal(format!(
                "strips multiply to order {product}, subgroup has order {}",
                h.order()
            )));
        }
        Ok(strips)
    }

    /// The non-trivial full strips involved in `K`, i.e. full strips `X` of
    /// length at least two with `K = X × σ_rest(K)`.
    pub fn strips_involved(&self, k: &Group) -> Result<Vec<Strip>> {
        let (classes, _) = self.diagonal_classes(k)?;
        let mut out = Vec::new();
        for s in classes {
            if s.len() < 2 {
                continue;
            }
            let x = self.projection(&s, k)?;
            if x.order() != self.factor_order(s[0]) {
                continue;
            }
            let rest = self.complement(&s);
            let rest_order = if rest.is_empty() { 1 } else { self.projection_order(&rest, k)? };
            if x.order() * rest_order == k.order() {
                out.push(Strip { support: s, component: x });
            }
        }
        Ok(out)
    }
}

/// Points whose images tell every element of `ys` apart.
fn separating_points(ys: &[Perm]) -> Vec<Point> {
    let mut points: Vec<Point> = Vec::new();
    loop {
        let mut seen: HashMap<Vec<Point>, usize> = HashMap::new();
        let mut clash = None;
        for (i, y) in ys.iter().enumerate() {
            let key: Vec<Point> = points.iter().map(|&f| y.apply(f)).collect();
            if let Some(&j) = seen.get(&key) {
                clash = Some((j, i));
                break;
            }
            seen.insert(key, i);
        }
        match clash {
            None => return points,
            Some((a, b)) => {
                let p = (0..ys[a].degree() as Point)
                    .find(|&p| ys[a].apply(p) != ys[b].apply(p))
                    .expect("distinct elements");
                points.push(p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `A5^k` acting on `5k` points, one copy per block.
    fn a5_power(k: usize) -> Group {
        let n = 5 * k;
        let a = Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap();
        let b = Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        let mut gens = Vec::new();
        for i in 0..k {
            gens.push(a.embed(5 * i, n));
            gens.push(b.embed(5 * i, n));
        }
        Group::with_order(n, gens, 60u128.pow(k as u32)).unwrap()
    }

    #[test]
    fn factors_of_a5_cubed() {
        let m = a5_power(3);
        let d = DirectFactorisation::new(&m, &m).unwrap();
        assert_eq!(d.num_factors(), 3);
        for i in 0..3 {
            assert_eq!(d.factor_order(i), 60);
        }
        assert!(d.is_subdirect(d.plinth()).unwrap());
    }

    #[test]
    fn diagonal_strips() {
        let m = a5_power(4);
        let d = DirectFactorisation::new(&m, &m).unwrap();
        let a = Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap();
        let b = Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        // {(t, t, u, u)}
        let gens = vec![
            a.embed(0, 20).mul(&a.embed(5, 20)),
            b.embed(0, 20).mul(&b.embed(5, 20)),
            a.embed(10, 20).mul(&a.embed(15, 20)),
            b.embed(10, 20).mul(&b.embed(15, 20)),
        ];
        let h = d.represent_group(&Group::new(20, gens).unwrap(), None).unwrap();
        assert_eq!(h.order(), 3600);
        let strips = d.scott_decompose(&h).unwrap();
        let mut supports: Vec<Vec<usize>> = strips.iter().map(|s| s.support.clone()).collect();
        supports.sort();
        assert_eq!(supports.len(), 2);
        assert!(supports.iter().all(|s| s.len() == 2));
        assert_eq!(d.strips_involved(&h).unwrap().len(), 2);
    }

    #[test]
    fn abelian_plinth_rejected() {
        let c = Group::new(4, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()]).unwrap();
        assert!(matches!(DirectFactorisation::new(&c, &c), Err(Error::Unsupported(_))));
    }
}
