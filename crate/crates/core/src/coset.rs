//! Action of a group on the right cosets of a subgroup.
//!
//! Each coset `Hx` is named by its lexicographically least element, found
//! greedily with a chain of `H` whose base is `0, 1, .., n-1`.

use std::collections::HashMap;

use crate::chain::StabChain;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::{Perm, Point};

pub const DEFAULT_INDEX_CAP: usize = 100_000;

pub struct CosetTable {
    h_chain: StabChain,
    reps: Vec<Perm>,
    index: HashMap<Vec<Point>, u32>,
    /// Images of the generators of the acting group, as permutations of cosets.
    images: Vec<Perm>,
}

impl CosetTable {
    /// Enumerates `[G:H]`. `H` must be a subgroup of `G`; this is not checked
    /// beyond the consistency of the resulting action.
    pub fn new(g: &Group, h: &Group, cap: usize) -> Result<Self> {
        if g.degree() != h.degree() {
            return Err(Error::input("coset action needs groups of the same degree"));
        }
        let n = g.degree();
        let full: Vec<Point> = (0..n as Point).collect();
        let h_chain = h.chain_with_base(&full)?;
        let mut table = CosetTable {
            h_chain,
            reps: Vec::new(),
            index: HashMap::new(),
            images: Vec::new(),
        };
        let id = Perm::identity(n);
        table.index.insert(id.images().to_vec(), 0);
        table.reps.push(id);
        let gens = g.generators();
        let mut img: Vec<Vec<Point>> = vec![Vec::new(); gens.len()];
        let mut i = 0;
        while i < table.reps.len() {
            for (k, s) in gens.iter().enumerate() {
                let y = table.canonical(&table.reps[i].mul(s));
                let j = match table.index.get(y.images()) {
                    Some(&j) => j,
                    None => {
                        let j = table.reps.len() as u32;
                        if table.reps.len() >= cap {
                            return Err(Error::limit(format!("coset index exceeds the cap {cap}")));
                        }
                        table.index.insert(y.images().to_vec(), j);
                        table.reps.push(y);
                        j
                    }
                };
                img[k].push(j);
            }
            i += 1;
        }
        table.images = img
            .into_iter()
            .map(Perm::from_images)
            .collect::<Result<Vec<_>>>()?;
        Ok(table)
    }

    /// Least element of `Hx`.
    pub fn canonical(&self, x: &Perm) -> Perm {
        let mut x = x.clone();
        for l in 0..self.h_chain.num_levels() {
            let orbit = self.h_chain.basic_orbit(l);
            if orbit.len() == 1 {
                continue;
            }
            let best = *orbit.iter().min_by_key(|&&d| x.apply(d)).unwrap();
            if best != orbit[0] {
                let u = self.h_chain.transversal(l, best).unwrap();
                x = u.mul(&x);
            }
        }
        x
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[Perm] {
        &self.reps
    }

    pub fn coset_of(&self, x: &Perm) -> Option<u32> {
        self.index.get(self.canonical(x).images()).copied()
    }

    pub fn generator_images(&self) -> &[Perm] {
        &self.images
    }

    /// Permutation of cosets induced by right multiplication by `x`.
    pub fn act(&self, x: &Perm) -> Result<Perm> {
        self.induced(|r| r.mul(x))
    }

    /// Permutation `Hr -> H f(r)` for a map `f` that sends `H` onto itself and
    /// respects cosets.
    pub fn induced<F: FnMut(&Perm) -> Perm>(&self, mut f: F) -> Result<Perm> {
        let mut images = Vec::with_capacity(self.reps.len());
        for r in &self.reps {
            let j = self
                .coset_of(&f(r))
                .ok_or_else(|| Error::input("image lies outside the enumerated cosets"))?;
            images.push(j);
        }
        Perm::from_images(images)
    }
}

/// The coset action of `g` on `[G:H]` as a permutation group. When `faithful`
/// is set the image is claimed to have the order of `g`, which makes the chain
/// cheap to build; a wrong claim surfaces as an error, never as a wrong order.
pub fn coset_action(g: &Group, h: &Group, cap: usize, faithful: bool) -> Result<(Group, CosetTable)> {
    let table = CosetTable::new(g, h, cap)?;
    let degree = table.index();
    let gens = table.generator_images().to_vec();
    let image = if faithful {
        Group::with_order(degree, gens, g.order())?
    } else {
        Group::new(degree, gens)?
    };
    Ok((image, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{intersection, point_stabilizer};
    use crate::backtrack::Limits;

    #[test]
    fn a6_on_cosets_of_order_ten() {
        let g = Group::new(
            6,
            vec![
                Perm::from_cycles(6, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(6, &[&[1, 2, 3, 4, 5]]).unwrap(),
            ],
        )
        .unwrap();
        let a = point_stabilizer(&g, 0).unwrap();
        let b = Group::new(
            6,
            vec![
                Perm::from_cycles(6, &[&[0, 1, 2, 3, 4]]).unwrap(),
                Perm::from_cycles(6, &[&[0, 5], &[1, 4]]).unwrap(),
            ],
        )
        .unwrap();
        let d = intersection(&a, &b, &Limits::default()).unwrap();
        let (img, table) = coset_action(&g, &d, DEFAULT_INDEX_CAP, true).unwrap();
        assert_eq!(table.index(), 36);
        assert!(img.is_transitive());
        assert_eq!(img.order(), 360);
    }

    #[test]
    fn whole_group_gives_degree_one() {
        let g = Group::symmetric(4);
        let (img, _) = coset_action(&g, &g, 10, false).unwrap();
        assert_eq!(img.degree(), 1);
    }
}
