//! Partitions of `{0, .., n-1}` and Cartesian decompositions.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::{Perm, Point};

/// A partition in canonical form: block labels are assigned in order of the
/// least point of each block.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<u32>,
    num_blocks: usize,
}

impl Partition {
    /// Canonicalises an arbitrary labelling.
    pub fn from_labels(labels: &[u32]) -> Self {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut out = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = map.len() as u32;
            out.push(*map.entry(l).or_insert(next));
        }
        Partition {
            num_blocks: map.len(),
            labels: out,
        }
    }

    pub fn from_blocks(degree: usize, blocks: &[Vec<Point>]) -> Result<Self> {
        let mut labels = vec![u32::MAX; degree];
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::input(format!("block {i} is empty")));
            }
            for &p in b {
                if p as usize >= degree {
                    return Err(Error::input(format!("point {p} out of range for degree {degree}")));
                }
                if labels[p as usize] != u32::MAX {
                    return Err(Error::input(format!("point {p} lies in two blocks")));
                }
                labels[p as usize] = i as u32;
            }
        }
        if let Some(p) = labels.iter().position(|&l| l == u32::MAX) {
            return Err(Error::input(format!("point {p} is in no block")));
        }
        Ok(Partition::from_labels(&labels))
    }

    pub fn singletons(degree: usize) -> Self {
        Partition {
            labels: (0..degree as u32).collect(),
            num_blocks: degree,
        }
    }

    pub fn whole(degree: usize) -> Self {
        Partition {
            labels: vec![0; degree],
            num_blocks: 1,
        }
    }

    pub fn degree(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn block_of(&self, p: Point) -> u32 {
        self.labels[p as usize]
    }

    /// Blocks, each sorted, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<Point>> {
        let mut out = vec![Vec::new(); self.num_blocks];
        for (p, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(p as Point);
        }
        out
    }

    pub fn block_containing(&self, p: Point) -> Vec<Point> {
        let l = self.labels[p as usize];
        (0..self.degree() as Point).filter(|&q| self.labels[q as usize] == l).collect()
    }

    /// Image under `g`: the partition whose blocks are the images of blocks.
    pub fn image(&self, g: &Perm) -> Partition {
        let mut labels = vec![0u32; self.degree()];
        for (p, &l) in self.labels.iter().enumerate() {
            labels[g.apply(p as Point) as usize] = l;
        }
        Partition::from_labels(&labels)
    }

    pub fn is_invariant_under(&self, g: &Perm) -> bool {
        // g maps blocks to blocks iff the induced label map is well defined.
        let mut map = vec![u32::MAX; self.num_blocks];
        for (p, &l) in self.labels.iter().enumerate() {
            let m = self.labels[g.apply(p as Point) as usize];
            if map[l as usize] == u32::MAX {
                map[l as usize] = m;
            } else if map[l as usize] != m {
                return false;
            }
        }
        true
    }

    /// The permutation induced on blocks by `g`, which must preserve the partition.
    pub fn block_action(&self, g: &Perm) -> Option<Perm> {
        if !self.is_invariant_under(g) {
            return None;
        }
        let mut images = vec![0u32; self.num_blocks];
        for (p, &l) in self.labels.iter().enumerate() {
            images[l as usize] = self.labels[g.apply(p as Point) as usize];
        }
        Perm::from_images(images).ok()
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.degree() != other.degree() {
            return false;
        }
        let mut map = vec![u32::MAX; self.num_blocks];
        for (p, &l) in self.labels.iter().enumerate() {
            let m = other.labels[p];
            if map[l as usize] == u32::MAX {
                map[l as usize] = m;
            } else if map[l as usize] != m {
                return false;
            }
        }
        true
    }

    pub fn is_trivial(&self) -> bool {
        self.num_blocks == 1 || self.num_blocks == self.degree()
    }

    /// Uniform block size, if all blocks have the same size.
    pub fn block_size(&self) -> Option<usize> {
        let n = self.degree();
        if n % self.num_blocks != 0 {
            return None;
        }
        let mut count = vec![0usize; self.num_blocks];
        for &l in &self.labels {
            count[l as usize] += 1;
        }
        let s = n / self.num_blocks;
        count.iter().all(|&c| c == s).then_some(s)
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let blocks: Vec<Vec<Point>> = Vec::deserialize(d)?;
        let degree = blocks.iter().map(|b| b.len()).sum();
        Partition::from_blocks(degree, &blocks).map_err(serde::de::Error::custom)
    }
}

/// Coarsest common refinement: blocks are the nonempty intersections.
pub fn infimum(parts: &[Partition]) -> Result<Partition> {
    let first = parts.first().ok_or_else(|| Error::input("infimum of no partitions"))?;
    let n = first.degree();
    if parts.iter().any(|p| p.degree() != n) {
        return Err(Error::input("infimum of partitions of different degree"));
    }
    let mut key: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut labels = Vec::with_capacity(n);
    for p in 0..n {
        let t: Vec<u32> = parts.iter().map(|q| q.labels[p]).collect();
        let next = key.len() as u32;
        labels.push(*key.entry(t).or_insert(next));
    }
    Ok(Partition::from_labels(&labels))
}

/// Result of checking the Cartesian axiom. On failure `selection` picks one
/// block per partition whose intersection has `meet_size` points (0 or >= 2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartesianCheck {
    pub holds: bool,
    pub selection: Option<Vec<u32>>,
    pub meet_size: Option<usize>,
    pub reason: Option<String>,
}

impl CartesianCheck {
    fn pass() -> Self {
        CartesianCheck {
            holds: true,
            selection: None,
            meet_size: None,
            reason: None,
        }
    }
    fn fail(selection: Vec<u32>, meet: usize, reason: String) -> Self {
        CartesianCheck {
            holds: false,
            selection: Some(selection),
            meet_size: Some(meet),
            reason: Some(reason),
        }
    }
}

/// Checks that every selection of one block per partition meets in exactly
/// one point, using the point-to-selection map: it must be a bijection.
pub fn is_cartesian_decomposition(parts: &[Partition]) -> Result<CartesianCheck> {
    let first = parts
        .first()
        .ok_or_else(|| Error::input("a decomposition needs at least one partition"))?;
    let n = first.degree();
    if parts.iter().any(|p| p.degree() != n) {
        return Err(Error::input("partitions of different degree"));
    }
    let mut hit: HashMap<Vec<u32>, Point> = HashMap::new();
    for p in 0..n as Point {
        let t: Vec<u32> = parts.iter().map(|q| q.block_of(p)).collect();
        if let Some(&q) = hit.get(&t) {
            let meet = (0..n as Point)
                .filter(|&r| parts.iter().zip(&t).all(|(part, &b)| part.block_of(r) == b))
                .count();
            return Ok(CartesianCheck::fail(
                t,
                meet,
                format!("points {q} and {p} lie in the same blocks of every partition"),
            ));
        }
        hit.insert(t, p);
    }
    // Injective; bijective iff the product of block counts equals n.
    let mut product: u128 = 1;
    for q in parts {
        product = product.saturating_mul(q.num_blocks() as u128);
    }
    if product == n as u128 {
        return Ok(CartesianCheck::pass());
    }
    // Find a selection missed by every point, in lexicographic order.
    let sizes: Vec<u32> = parts.iter().map(|q| q.num_blocks() as u32).collect();
    let mut t = vec![0u32; parts.len()];
    loop {
        if !hit.contains_key(&t) {
            return Ok(CartesianCheck::fail(
                t,
                0,
                format!("product of block counts is {product}, not {n}"),
            ));
        }
        let mut i = t.len();
        loop {
            i -= 1;
            t[i] += 1;
            if t[i] < sizes[i] {
                break;
            }
            t[i] = 0;
        }
    }
}

/// A set of partitions satisfying the Cartesian axiom. Serialises as the
/// list of its partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianDecomposition {
    degree: usize,
    parts: Vec<Partition>,
}

impl Serialize for CartesianDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl CartesianDecomposition {
    pub fn new(parts: Vec<Partition>) -> Result<Self> {
        let check = is_cartesian_decomposition(&parts)?;
        if !check.holds {
            return Err(Error::input(format!(
                "not a Cartesian decomposition: {}",
                check.reason.unwrap_or_default()
            )));
        }
        let degree = parts[0].degree();
        if parts.len() >= 2 && parts.iter().any(|p| p.num_blocks() < 2) {
            return Err(Error::input("every partition must have at least two blocks"));
        }
        let mut seen = HashSet::new();
        if !parts.iter().all(|p| seen.insert(p.clone())) {
            return Err(Error::input("repeated partition"));
        }
        Ok(CartesianDecomposition { degree, parts })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn index(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Partition] {
        &self.parts
    }

    /// The index-one decomposition into singletons, accepted but flagged in reports.
    pub fn is_degenerate(&self) -> bool {
        self.parts.len() == 1
    }

    /// Same partitions in canonical order.
    pub fn canonical(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.sort();
        CartesianDecomposition {
            degree: self.degree,
            parts,
        }
    }

    pub fn position(&self, p: &Partition) -> Option<usize> {
        self.parts.iter().position(|q| q == p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionProperties {
    pub invariant: bool,
    /// First generator that maps some partition outside the decomposition.
    pub violating_generator: Option<usize>,
    pub homogeneous: bool,
    pub m: Option<usize>,
    /// Orbits of the group on partition indices.
    pub orbits: Vec<Vec<usize>>,
    pub transitive: bool,
    /// Permutation of partition indices induced by each generator.
    pub actions: Vec<Vec<u32>>,
}

pub fn decomposition_properties(e: &CartesianDecomposition, g: &Group) -> Result<DecompositionProperties> {
    if g.degree() != e.degree() {
        return Err(Error::input(format!(
            "group degree {} does not match decomposition degree {}",
            g.degree(),
            e.degree()
        )));
    }
    let l = e.index();
    let sizes: Vec<usize> = e.parts().iter().map(|p| p.num_blocks()).collect();
    let homogeneous = sizes.iter().all(|&s| s == sizes[0]);
    let m = homogeneous.then_some(sizes[0]);
    let mut actions = Vec::new();
    for (gi, x) in g.generators().iter().enumerate() {
        let mut act = Vec::with_capacity(l);
        for part in e.parts() {
            match e.position(&part.image(x)) {
                Some(j) => act.push(j as u32),
                None => {
                    return Ok(DecompositionProperties {
                        invariant: false,
                        violating_generator: Some(gi),
                        homogeneous,
                        m,
                        orbits: Vec::new(),
                        transitive: false,
                        actions,
                    })
                }
            }
        }
        actions.push(act);
    }
    let mut seen = vec![false; l];
    let mut orbits = Vec::new();
    for i in 0..l {
        if seen[i] {
            continue;
        }
        seen[i] = true;
        let mut orb = vec![i];
        let mut k = 0;
        while k < orb.len() {
            for act in &actions {
                let j = act[orb[k]] as usize;
                if !seen[j] {
                    seen[j] = true;
                    orb.push(j);
                }
            }
            k += 1;
        }
        orb.sort_unstable();
        orbits.push(orb);
    }
    Ok(DecompositionProperties {
        invariant: true,
        violating_generator: None,
        homogeneous,
        m,
        transitive: orbits.len() == 1,
        orbits,
        actions,
    })
}

/// Row and column partitions of an `r x c` grid with point `i*c + j` at (i, j).
pub fn grid(r: usize, c: usize) -> CartesianDecomposition {
    let rows: Vec<u32> = (0..r * c).map(|p| (p / c) as u32).collect();
    let cols: Vec<u32> = (0..r * c).map(|p| (p % c) as u32).collect();
    CartesianDecomposition::new(vec![Partition::from_labels(&rows), Partition::from_labels(&cols)])
        .expect("grid is Cartesian")
}
