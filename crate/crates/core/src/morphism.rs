//! Homomorphisms between permutation groups, given on generators.
//!
//! A map `g_i -> h_i` is stored through its graph `{(g, φ(g))}` acting on
//! `n + m` points. The map extends to a homomorphism exactly when the graph
//! group has the order of the source; evaluation sifts `(g, 1)` through a
//! chain of the graph whose base starts with a base of the source.

use crate::chain::StabChain;
use crate::coset::CosetTable;
use crate::error::{Error, Result};
use crate::group::{Group, CHAIN_SEED};
use crate::perm::{Perm, Point};

#[derive(Clone, Debug)]
pub struct GroupMorphism {
    source: Group,
    target: Group,
    images: Vec<Perm>,
    graph: StabChain,
}

impl GroupMorphism {
    pub fn new(source: &Group, target: &Group, images: Vec<Perm>) -> Result<Self> {
        let gens = source.generators();
        if images.len() != gens.len() {
            return Err(Error::InvalidMorphism(format!(
                "{} images for {} generators",
                images.len(),
                gens.len()
            )));
        }
        let (n, m) = (source.degree(), target.degree());
        for (i, h) in images.iter().enumerate() {
            if h.degree() != m || !target.try_contains(h)? {
                return Err(Error::InvalidMorphism(format!(
                    "image of generator {i} does not lie in the target"
                )));
            }
        }
        let graph_gens: Vec<Perm> = gens.iter().zip(&images).map(|(g, h)| g.direct_sum(h)).collect();
        let base = source.try_chain()?.base();
        let order = source.order();
        let mut graph = match StabChain::with_known_order(n + m, &graph_gens, &base, order, CHAIN_SEED) {
            Ok(c) => c,
            Err(Error::Internal(_)) => StabChain::schreier_sims(n + m, &graph_gens, &base),
            Err(e) => return Err(e),
        };
        // The randomised build is only trusted as a starting point.
        graph.complete();
        if graph.order() != order {
            return Err(Error::InvalidMorphism(format!(
                "generator images do not define a homomorphism: graph has order {} but the source has order {order}",
                graph.order()
            )));
        }
        Ok(GroupMorphism {
            source: source.clone(),
            target: target.clone(),
            images,
            graph,
        })
    }

    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    pub fn generator_images(&self) -> &[Perm] {
        &self.images
    }

    pub fn evaluate(&self, g: &Perm) -> Result<Perm> {
        let n = self.source.degree();
        let m = self.target.degree();
        if g.degree() != n || !self.source.try_contains(g)? {
            return Err(Error::input("element is not in the source group"));
        }
        let (res, _) = self.graph.sift_from(g.extend_to(n + m), 0);
        let z = res.restrict(n, m);
        if !res.restrict(0, n).is_identity() {
            return Err(Error::Internal("graph sift left a source component".into()));
        }
        Ok(z.inverse())
    }

    /// The subgroup generated by the images of the generators.
    pub fn image(&self) -> Result<Group> {
        Group::new(self.target.degree(), self.images.clone())
    }

    pub fn kernel(&self) -> Result<Group> {
        let n = self.source.degree();
        let m = self.target.degree();
        let order = self.graph.order();
        let gens: Vec<Perm> = self.graph.strong_generators().to_vec();
        let prefix: Vec<Point> = (n as Point..(n + m) as Point).collect();
        let c = StabChain::with_known_order(n + m, &gens, &prefix, order, CHAIN_SEED)?;
        let kgens: Vec<Perm> = c
            .stabilizer_generators(m)
            .into_iter()
            .map(|x| x.restrict(0, n))
            .collect();
        Group::new(n, kgens)
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(self.image()?.order() == self.source.order())
    }

    /// Whether this is an automorphism of its source.
    pub fn is_automorphism(&self) -> Result<bool> {
        Ok(self.target.same_as(&self.source) && self.is_injective()?)
    }

    /// The permutation `Hx -> Hφ(x)` of the cosets in `table`, for an
    /// automorphism `φ` with `φ(H) = H`.
    pub fn induced_coset_permutation(&self, h: &Group, table: &CosetTable) -> Result<Perm> {
        if !self.is_automorphism()? {
            return Err(Error::InvalidMorphism("not an automorphism of its source".into()));
        }
        for x in h.generators() {
            if !h.try_contains(&self.evaluate(x)?)? {
                return Err(Error::InvalidMorphism("the automorphism does not fix the subgroup".into()));
            }
        }
        let mut err = None;
        let p = table.induced(|r| match self.evaluate(r) {
            Ok(y) => y,
            Err(e) => {
                err.get_or_insert(e);
                r.clone()
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a5() -> Group {
        Group::new(
            5,
            vec![
                Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn conjugation_is_an_automorphism() {
        let g = a5();
        let c = Perm::from_cycles(5, &[&[0, 1]]).unwrap();
        let imgs = g.generators().iter().map(|x| x.conjugate(&c)).collect();
        let phi = GroupMorphism::new(&g, &g, imgs).unwrap();
        assert!(phi.is_automorphism().unwrap());
        let x = Perm::from_cycles(5, &[&[0, 3], &[2, 4]]).unwrap();
        assert_eq!(phi.evaluate(&x).unwrap(), x.conjugate(&c));
        assert_eq!(phi.kernel().unwrap().order(), 1);
    }

    #[test]
    fn rejects_non_homomorphism() {
        let g = a5();
        let imgs = vec![g.generators()[0].clone(), Perm::identity(5)];
        let err = GroupMorphism::new(&g, &g, imgs).unwrap_err();
        assert!(matches!(err, Error::InvalidMorphism(_)));
    }

    #[test]
    fn sign_map_has_kernel_a4() {
        let s4 = Group::symmetric(4);
        let t = Group::symmetric(2);
        let imgs = s4
            .generators()
            .iter()
            .map(|x| if x.is_even() { Perm::identity(2) } else { Perm::from_cycles(2, &[&[0, 1]]).unwrap() })
            .collect();
        let phi = GroupMorphism::new(&s4, &t, imgs).unwrap();
        assert_eq!(phi.kernel().unwrap().order(), 12);
        assert!(!phi.is_injective().unwrap());
    }
}
