//! Backtrack search for subgroups defined by a property of their elements.
//!
//! The search walks base images level by level. A property supplies a cheap
//! necessary condition on partial base images (`keep`) and an exact test on
//! complete elements (`test`). Levels are processed bottom-up so that, at
//! level `i`, the part of the answer fixing the first `i` base points is
//! already known and only one candidate per orbit of it has to be tried.

use crate::chain::StabChain;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::{Perm, Point};

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_degree: usize,
    pub max_order: u128,
    /// Upper bound on visited search nodes per search.
    pub max_nodes: u64,
    /// Skip the degree/order refusal (the node budget still applies).
    pub override_guard: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_degree: 20_000,
            max_order: 1_000_000_000,
            max_nodes: 200_000_000,
            override_guard: false,
        }
    }
}

impl Limits {
    pub fn unguarded() -> Self {
        Limits {
            override_guard: true,
            ..Limits::default()
        }
    }

    pub fn check(&self, g: &Group) -> Result<()> {
        if self.override_guard {
            return Ok(());
        }
        if g.degree() > self.max_degree {
            return Err(Error::limit(format!(
                "backtrack search on degree {} exceeds the degree cap {}",
                g.degree(),
                self.max_degree
            )));
        }
        let order = g.order();
        if order > self.max_order {
            return Err(Error::limit(format!(
                "backtrack search in a group of order {order} exceeds the order cap {}",
                self.max_order
            )));
        }
        Ok(())
    }
}

pub(crate) trait Property {
    /// Necessary condition on the images of `base[..images.len()]`.
    fn keep(&self, base: &[Point], images: &[Point]) -> bool;
    fn test(&self, g: &Perm) -> bool;
}

struct Transversals<'a> {
    chain: &'a StabChain,
    cache: Vec<Vec<Option<Perm>>>,
}

impl<'a> Transversals<'a> {
    fn new(chain: &'a StabChain) -> Self {
        let n = chain.degree();
        Transversals {
            chain,
            cache: (0..chain.num_levels()).map(|_| vec![None; n]).collect(),
        }
    }

    fn get(&mut self, level: usize, d: Point) -> Perm {
        let slot = &mut self.cache[level][d as usize];
        if slot.is_none() {
            *slot = self.chain.transversal(level, d);
        }
        slot.clone().expect("point in basic orbit")
    }
}

/// The subgroup of `g` of all elements with `prop`. `known` must generate a
/// subgroup of that answer; it only speeds the search up.
pub(crate) fn subgroup_search(
    g: &Group,
    prefix: &[Point],
    known: &[Perm],
    prop: &dyn Property,
    limits: &Limits,
) -> Result<Group> {
    limits.check(g)?;
    let n = g.degree();
    let chain = if prefix.is_empty() {
        g.chain().clone()
    } else {
        g.chain_with_base(prefix)?
    };
    let base = chain.base();
    let r = base.len();
    let mut found: Vec<Perm> = known.iter().filter(|x| !x.is_identity()).cloned().collect();
    let mut res_chain = StabChain::schreier_sims(n, &found, &base);
    let mut trans = Transversals::new(&chain);
    let mut nodes = 0u64;

    for i in (0..r).rev() {
        let orbit: Vec<Point> = {
            let mut o = chain.basic_orbit(i).to_vec();
            o.sort_unstable();
            o
        };
        let mut done = vec![false; n];
        for &gamma in &orbit {
            if done[gamma as usize] || res_chain.levels[i].contains(gamma) {
                continue;
            }
            let mut images: Vec<Point> = base[..i].to_vec();
            let hit = dfs(
                &chain,
                &mut trans,
                &base,
                i,
                Some((i, gamma)),
                Perm::identity(n),
                &mut images,
                prop,
                &mut nodes,
                limits.max_nodes,
            )?;
            match hit {
                Some(x) => {
                    found.push(x);
                    res_chain = StabChain::schreier_sims(n, &found, &base);
                }
                None => {
                    // No element maps the base point into this orbit of the
                    // partial answer.
                    let gens = res_chain.stabilizer_generators(i);
                    let mut stack = vec![gamma];
                    done[gamma as usize] = true;
                    while let Some(p) = stack.pop() {
                        for s in &gens {
                            let q = s.apply(p);
                            if !done[q as usize] {
                                done[q as usize] = true;
                                stack.push(q);
                            }
                        }
                    }
                }
            }
        }
    }
    let order = res_chain.order();
    Group::with_order(n, found, order)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    chain: &StabChain,
    trans: &mut Transversals<'_>,
    base: &[Point],
    j: usize,
    forced: Option<(usize, Point)>,
    prefix_prod: Perm,
    images: &mut Vec<Point>,
    prop: &dyn Property,
    nodes: &mut u64,
    max_nodes: u64,
) -> Result<Option<Perm>> {
    *nodes += 1;
    if *nodes > max_nodes {
        return Err(Error::limit(format!("backtrack search exceeded {max_nodes} nodes")));
    }
    if j == base.len() {
        return Ok(if prop.test(&prefix_prod) { Some(prefix_prod) } else { None });
    }
    let candidates: Vec<Point> = match forced {
        Some((top, gamma)) if top == j => vec![gamma],
        _ => chain.basic_orbit(j).to_vec(),
    };
    for delta in candidates {
        let img = prefix_prod.apply(delta);
        images.push(img);
        if prop.keep(&base[..images.len()], images) {
            let u = trans.get(j, delta);
            let next = u.mul(&prefix_prod);
            if let Some(x) = dfs(chain, trans, base, j + 1, forced, next, images, prop, nodes, max_nodes)? {
                images.pop();
                return Ok(Some(x));
            }
        }
        images.pop();
    }
    Ok(None)
}

/// Searches `g` for one element with `prop`. The search base starts with
/// `from`, so properties that pin down images of those points prune early.
pub(crate) fn element_search(
    g: &Group,
    from: &[Point],
    prop: &dyn Property,
    limits: &Limits,
) -> Result<Option<Perm>> {
    limits.check(g)?;
    let chain = g.chain_with_base(from)?;
    let base = chain.base();
    let mut trans = Transversals::new(&chain);
    let mut nodes = 0u64;
    let mut images = Vec::new();
    let n = g.degree();
    dfs(
        &chain,
        &mut trans,
        &base,
        0,
        None,
        Perm::identity(n),
        &mut images,
        prop,
        &mut nodes,
        limits.max_nodes,
    )
}

/// Whether some element of the group behind `chain` maps `base[l]` to
/// `images[l]` for every assigned `l`. The chain's base must start with `base`.
pub(crate) fn realizable(chain: &StabChain, base: &[Point], images: &[Point]) -> bool {
    let mut x = images.to_vec();
    for l in 0..x.len() {
        if l >= chain.num_levels() {
            if x[l] != base[l] {
                return false;
            }
            continue;
        }
        let d = x[l];
        if !chain.levels[l].contains(d) {
            return false;
        }
        for m in (l + 1)..x.len() {
            x[m] = chain.transversal_inverse_apply(l, d, x[m]);
        }
    }
    true
}
