//! Block systems (invariant partitions) of permutation groups.

use std::collections::BTreeSet;

use crate::algebra::point_stabilizer;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::partition::Partition;
use crate::perm::{Perm, Point};

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = p;
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> Option<(u32, u32)> {
        let (x, y) = (self.find(a), self.find(b));
        if x == y {
            return None;
        }
        let (lo, hi) = (x.min(y), x.max(y));
        self.parent[hi as usize] = lo;
        Some((lo, hi))
    }
}

/// Finest partition invariant under `gens` with all of `seed` in one block.
pub fn minimal_block(degree: usize, gens: &[Perm], seed: &[Point]) -> Partition {
    let mut uf = UnionFind::new(degree);
    let mut queue = Vec::new();
    for w in seed.windows(2) {
        if let Some(pair) = uf.union(w[0], w[1]) {
            queue.push(pair);
        }
    }
    while let Some((a, b)) = queue.pop() {
        for g in gens {
            if let Some(pair) = uf.union(g.apply(a), g.apply(b)) {
                queue.push(pair);
            }
        }
    }
    let labels: Vec<u32> = (0..degree as u32).map(|p| uf.find(p)).collect();
    Partition::from_labels(&labels)
}

fn require_transitive(g: &Group) -> Result<()> {
    if !g.is_transitive() {
        return Err(Error::input("block systems are only computed for transitive groups"));
    }
    Ok(())
}

/// Representatives of the orbits of the stabiliser of 0, other than 0.
fn suborbit_reps(g: &Group) -> Result<Vec<Point>> {
    let h = point_stabilizer(g, 0)?;
    Ok(h.orbits()
        .into_iter()
        .map(|o| o[0])
        .filter(|&p| p != 0)
        .collect())
}

/// All minimal nontrivial block systems, canonically sorted.
pub fn minimal_block_systems(g: &Group) -> Result<Vec<Partition>> {
    require_transitive(g)?;
    let n = g.degree();
    let mut cands: BTreeSet<Partition> = BTreeSet::new();
    for p in suborbit_reps(g)? {
        let part = minimal_block(n, g.generators(), &[0, p]);
        if part.num_blocks() > 1 {
            cands.insert(part);
        }
    }
    let cands: Vec<Partition> = cands.into_iter().collect();
    let minimal: Vec<Partition> = cands
        .iter()
        .filter(|c| !cands.iter().any(|d| d != *c && d.refines(c)))
        .cloned()
        .collect();
    Ok(sort_systems(minimal))
}

/// Every block system, including the two trivial ones, canonically sorted.
pub fn all_block_systems(g: &Group) -> Result<Vec<Partition>> {
    require_transitive(g)?;
    let n = g.degree();
    let reps = suborbit_reps(g)?;
    let mut found: BTreeSet<Partition> = BTreeSet::new();
    found.insert(Partition::singletons(n));
    let mut frontier: Vec<Partition> = Vec::new();
    for &p in &reps {
        let part = minimal_block(n, g.generators(), &[0, p]);
        if found.insert(part.clone()) {
            frontier.push(part);
        }
    }
    // Every block through 0 is reached by adding one point at a time.
    while let Some(part) = frontier.pop() {
        let block = part.block_containing(0);
        for q in 0..n as Point {
            if part.block_of(q) == part.block_of(0) {
                continue;
            }
            let mut seed = block.clone();
            seed.push(q);
            let bigger = minimal_block(n, g.generators(), &seed);
            if found.insert(bigger.clone()) {
                frontier.push(bigger);
            }
        }
    }
    found.insert(Partition::whole(n));
    Ok(sort_systems(found.into_iter().collect()))
}

/// Canonical order: by block size, then by labelling.
pub fn sort_systems(mut v: Vec<Partition>) -> Vec<Partition> {
    v.sort_by(|a, b| {
        let sa = a.degree() / a.num_blocks();
        let sb = b.degree() / b.num_blocks();
        sa.cmp(&sb).then_with(|| a.cmp(b))
    });
    v
}

pub fn is_primitive(g: &Group) -> Result<bool> {
    Ok(g.degree() <= 2 || minimal_block_systems(g)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle() {
        let g = Group::new(4, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()]).unwrap();
        let min = minimal_block_systems(&g).unwrap();
        assert_eq!(min.len(), 1);
        assert_eq!(min[0].blocks(), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(all_block_systems(&g).unwrap().len(), 3);
    }

    #[test]
    fn natural_a6_is_primitive() {
        assert!(is_primitive(&Group::alternating(6)).unwrap());
    }

    #[test]
    fn intransitive_rejected() {
        let g = Group::new(3, vec![Perm::from_cycles(3, &[&[0, 1]]).unwrap()]).unwrap();
        assert!(minimal_block_systems(&g).is_err());
    }
}
