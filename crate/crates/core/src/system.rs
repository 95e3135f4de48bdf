//! Cartesian systems of subgroups and their correspondence with invariant
//! Cartesian decompositions.
//!
//! A system for a transitive `M` with base point `ω` is a list `K_1..K_ℓ` with
//! `∩ K_i = M_ω` and `K_i (∩_{j≠i} K_j) = M` for every `i`. The decomposition
//! belonging to it has as `i`-th partition the `M`-translates of `ω^{K_i}`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::intersection;
use crate::backtrack::Limits;
use crate::blocks::{all_block_systems, minimal_block};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::partition::{is_cartesian_decomposition, CartesianDecomposition, Partition};
use crate::perm::{Perm, Point};
use crate::product::DirectFactorisation;

pub const ENUMERATION_DEGREE_CAP: usize = 5000;

/// Where subgroup algebra for a plinth happens. For a non-abelian plinth this
/// is the conjugation representation of its simple factors, which is small
/// and faithful on `M` and on point stabilisers of any group normalising `M`;
/// otherwise it is the original action.
pub struct SubgroupSpace {
    m: Group,
    rep: Option<DirectFactorisation>,
    m_rep: Group,
    pub limits: Limits,
}

impl SubgroupSpace {
    /// `g` must normalise `m`.
    pub fn new(m: &Group, g: &Group, limits: Limits) -> Result<Self> {
        match DirectFactorisation::new(m, g) {
            Ok(d) => Ok(SubgroupSpace {
                m: m.clone(),
                m_rep: d.plinth().clone(),
                rep: Some(d),
                limits,
            }),
            Err(Error::Unsupported(_)) => Ok(SubgroupSpace {
                m: m.clone(),
                m_rep: m.clone(),
                rep: None,
                limits,
            }),
            Err(e) => Err(e),
        }
    }

    pub fn plinth(&self) -> &Group {
        &self.m
    }

    /// `M` in the working representation.
    pub fn plinth_rep(&self) -> &Group {
        &self.m_rep
    }

    pub fn factorisation(&self) -> Option<&DirectFactorisation> {
        self.rep.as_ref()
    }

    pub fn require_factorisation(&self) -> Result<&DirectFactorisation> {
        self.rep
            .as_ref()
            .ok_or_else(|| Error::Unsupported("the plinth is abelian; it has no non-abelian simple factors".into()))
    }

    /// Image of `h` (which must meet the centraliser of `M` trivially) in the
    /// working representation, with the same order.
    pub fn lift(&self, h: &Group) -> Result<Group> {
        match &self.rep {
            Some(d) => d.represent_group(h, Some(h.order())),
            None => Ok(h.clone()),
        }
    }

    pub fn lift_perm(&self, x: &Perm) -> Result<Perm> {
        match &self.rep {
            Some(d) => d.represent(x),
            None => Ok(x.clone()),
        }
    }

    pub fn intersection(&self, a: &Group, b: &Group) -> Result<Group> {
        intersection(a, b, &self.limits)
    }

    pub fn intersection_all(&self, gs: &[&Group]) -> Result<Group> {
        let mut it = gs.iter();
        let mut acc = (*it.next().ok_or_else(|| Error::input("intersection of no subgroups"))?).clone();
        for g in it {
            acc = self.intersection(&acc, g)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug)]
pub struct CartesianSystem {
    pub m: Group,
    pub omega: Point,
    pub members: Vec<Group>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemCheck {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
    pub member_orders: Vec<u128>,
    pub intersection_order: u128,
    pub stabilizer_order: u128,
}

/// Stabiliser in `m` of the block of `part` containing `omega`, as
/// `⟨M_ω, u_δ : δ in the block⟩` where `u_δ` maps `ω` to `δ`.
pub fn block_stabilizer(m: &Group, omega: Point, part: &Partition) -> Result<Group> {
    m.check_point(omega)?;
    let chain = m.chain_with_base(&[omega])?;
    let orbit_len = chain.basic_orbit(0).len() as u128;
    let stab_order = chain.order() / orbit_len;
    let block = part.block_containing(omega);
    let mut gens = chain.stabilizer_generators(1);
    let n = m.degree();
    let mut reached = vec![false; n];
    let mut current = Group::new(n, gens.clone())?.orbit(omega)?;
    for &p in &current {
        reached[p as usize] = true;
    }
    for &d in &block {
        if reached[d as usize] {
            continue;
        }
        let u = chain
            .transversal(0, d)
            .ok_or_else(|| Error::input("the plinth is not transitive"))?;
        gens.push(u);
        current = Group::new(n, gens.clone())?.orbit(omega)?;
        for &p in &current {
            reached[p as usize] = true;
        }
    }
    if current.len() != block.len() {
        return Err(Error::input("the partition is not invariant under the plinth"));
    }
    gens.retain(|x| !x.is_identity());
    Group::with_order(n, gens, stab_order * block.len() as u128)
}

fn check_invariant(m: &Group, e: &CartesianDecomposition) -> Result<()> {
    for (i, part) in e.parts().iter().enumerate() {
        for (k, x) in m.generators().iter().enumerate() {
            if !part.is_invariant_under(x) {
                return Err(Error::input(format!(
                    "partition {i} is not an M-invariant partition: generator {k} of M breaks it"
                )));
            }
        }
    }
    Ok(())
}

pub fn system_from_decomposition(m: &Group, omega: Point, e: &CartesianDecomposition) -> Result<CartesianSystem> {
    if e.degree() != m.degree() {
        return Err(Error::input("decomposition and group have different degrees"));
    }
    if !m.is_transitive() {
        return Err(Error::input("the group must be transitive"));
    }
    check_invariant(m, e)?;
    let members = e
        .parts()
        .iter()
        .map(|p| block_stabilizer(m, omega, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(CartesianSystem {
        m: m.clone(),
        omega,
        members,
    })
}

/// The partition of the `M`-translates of `ω^K`.
pub fn partition_of_member(m: &Group, omega: Point, k: &Group) -> Result<Partition> {
    let orbit = k.orbit(omega)?;
    let part = minimal_block(m.degree(), m.generators(), &orbit);
    if part.block_containing(omega).len() != orbit.len() {
        return Err(Error::Internal("orbit of a system member is not a block".into()));
    }
    Ok(part)
}

pub fn decomposition_from_system(system: &CartesianSystem) -> Result<CartesianDecomposition> {
    let parts = system
        .members
        .iter()
        .map(|k| partition_of_member(&system.m, system.omega, k))
        .collect::<Result<Vec<_>>>()?;
    CartesianDecomposition::new(parts)
        .map_err(|e| Error::Internal(format!("translates of a verified system do not form a decomposition: {e}")))
}

impl CartesianSystem {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.members.len() == 1
    }

    /// Permutation of member indices induced by conjugation with `x`, if `x`
    /// permutes the members.
    pub fn action_of(&self, x: &Perm) -> Result<Option<Vec<usize>>> {
        let mut out = Vec::with_capacity(self.members.len());
        for k in &self.members {
            let conj = k.conjugate(x);
            let mut hit = None;
            for (j, l) in self.members.iter().enumerate() {
                if l.order() == conj.order() && conj.generators().iter().all(|g| l.contains(g)) {
                    hit = Some(j);
                    break;
                }
            }
            match hit {
                Some(j) => out.push(j),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// Checks `∩ K_i = M_ω` and `K_i (∩_{j≠i} K_j) = M` by orders, with the
/// intersections computed in `space`.
pub fn verify_cartesian_system(system: &CartesianSystem, space: &SubgroupSpace) -> Result<SystemCheck> {
    let m = &system.m;
    let chain = m.chain_with_base(&[system.omega])?;
    let stab_gens = chain.stabilizer_generators(1);
    let stab_order = chain.order() / chain.basic_orbit(0).len() as u128;
    let lifted = system
        .members
        .iter()
        .map(|k| space.lift(k))
        .collect::<Result<Vec<_>>>()?;
    let mut check = SystemCheck {
        holds: true,
        violation: None,
        member_orders: system.members.iter().map(|k| k.order()).collect(),
        intersection_order: 0,
        stabilizer_order: stab_order,
    };
    let fail = |mut c: SystemCheck, msg: String| {
        c.holds = false;
        c.violation = Some(msg);
        Ok(c)
    };
    if lifted.is_empty() {
        return fail(check, "a system needs at least one member".into());
    }
    for (i, k) in system.members.iter().enumerate() {
        if k.order() >= m.order() && system.members.len() > 1 {
            return fail(check, format!("member {i} is not proper"));
        }
        if !k.is_subgroup_of(m) {
            return fail(check, format!("member {i} is not contained in M"));
        }
        if stab_gens.iter().any(|x| !k.contains(x)) {
            return fail(check, format!("member {i} does not contain M_ω"));
        }
    }
    let refs: Vec<&Group> = lifted.iter().collect();
    let all = space.intersection_all(&refs)?;
    check.intersection_order = all.order();
    if all.order() != stab_order {
        let o = all.order();
        return fail(check, format!("the members intersect in order {o}, M_ω has order {stab_order}"));
    }
    if lifted.len() > 1 {
        for i in 0..lifted.len() {
            let others: Vec<&Group> = (0..lifted.len()).filter(|&j| j != i).map(|j| &lifted[j]).collect();
            let rest = space.intersection_all(&others)?;
            let p = lifted[i].order() / all.order() * rest.order();
            if p != m.order() {
                return fail(check, format!("member {i} times the intersection of the others has order {p}, |M| = {}", m.order()));
            }
        }
    }
    Ok(check)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

impl IdentityCheck {
    fn pass() -> Self {
        IdentityCheck {
            holds: true,
            violation: None,
        }
    }

    fn fail(msg: String) -> Self {
        IdentityCheck {
            holds: false,
            violation: Some(msg),
        }
    }
}

/// `σ_i(K_j) (∩_{j'≠j} σ_i(K_{j'})) = T_i` for every factor `i` and member `j`.
pub fn verify_simple_factor_identity(system: &CartesianSystem, space: &SubgroupSpace) -> Result<IdentityCheck> {
    let d = space.require_factorisation()?;
    if system.members.len() < 2 {
        return Ok(IdentityCheck::pass());
    }
    let lifted = system
        .members
        .iter()
        .map(|k| space.lift(k))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..d.num_factors() {
        let proj = lifted
            .iter()
            .map(|k| d.projection(&[i], k))
            .collect::<Result<Vec<_>>>()?;
        for j in 0..proj.len() {
            let others: Vec<&Group> = (0..proj.len()).filter(|&x| x != j).map(|x| &proj[x]).collect();
            let rest = space.intersection_all(&others)?;
            let meet = space.intersection(&proj[j], &rest)?;
            let p = proj[j].order() / meet.order() * rest.order();
            if p != d.factor_order(i) {
                return Ok(IdentityCheck::fail(format!(
                    "factor {i}, member {j}: product order {p}, |T_{i}| = {}",
                    d.factor_order(i)
                )));
            }
        }
    }
    Ok(IdentityCheck::pass())
}

/// For pairwise disjoint non-empty index sets `I_1..I_r`, with
/// `Q_a = ∩_{j∈I_a} L_j`, checks `Q_a (∩_{b≠a} Q_b) = M` for every `a`.
pub fn merged_system_check(
    system: &CartesianSystem,
    index_sets: &[Vec<usize>],
    space: &SubgroupSpace,
) -> Result<IdentityCheck> {
    let mut used = BTreeSet::new();
    for set in index_sets {
        if set.is_empty() {
            return Err(Error::input("index sets must be non-empty"));
        }
        for &j in set {
            if j >= system.members.len() {
                return Err(Error::input(format!("member index {j} out of range")));
            }
            if !used.insert(j) {
                return Err(Error::input(format!("index sets overlap in {j}")));
            }
        }
    }
    if index_sets.len() < 2 {
        return Ok(IdentityCheck::pass());
    }
    let lifted = system
        .members
        .iter()
        .map(|k| space.lift(k))
        .collect::<Result<Vec<_>>>()?;
    let q = index_sets
        .iter()
        .map(|set| {
            let refs: Vec<&Group> = set.iter().map(|&j| &lifted[j]).collect();
            space.intersection_all(&refs)
        })
        .collect::<Result<Vec<_>>>()?;
    let m_order = system.m.order();
    for a in 0..q.len() {
        let others: Vec<&Group> = (0..q.len()).filter(|&b| b != a).map(|b| &q[b]).collect();
        let rest = space.intersection_all(&others)?;
        let meet = space.intersection(&q[a], &rest)?;
        let p = q[a].order() / meet.order() * rest.order();
        if p != m_order {
            return Ok(IdentityCheck::fail(format!(
                "merged member {a}: product order {p}, |M| = {m_order}"
            )));
        }
    }
    Ok(IdentityCheck::pass())
}

/// All `g`-invariant Cartesian decompositions of index at least two whose
/// partitions are block systems of the plinth `m`.
pub fn enumerate_invariant_decompositions(
    g: &Group,
    m: &Group,
    degree_cap: usize,
) -> Result<Vec<CartesianDecomposition>> {
    let n = g.degree();
    if n > degree_cap {
        return Err(Error::limit(format!(
            "enumeration on degree {n} exceeds the cap {degree_cap}"
        )));
    }
    if m.degree() != n {
        return Err(Error::input("plinth and group have different degrees"));
    }
    let systems: Vec<Partition> = all_block_systems(m)?
        .into_iter()
        .filter(|p| !p.is_trivial() && p.num_blocks() > 1)
        .collect();
    // Orbits of g on the block systems.
    let mut orbit_of = vec![usize::MAX; systems.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for s in 0..systems.len() {
        if orbit_of[s] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        orbit_of[s] = id;
        let mut orb = vec![s];
        let mut i = 0;
        while i < orb.len() {
            for x in g.generators() {
                let img = systems[orb[i]].image(x);
                let j = systems
                    .iter()
                    .position(|p| *p == img)
                    .ok_or_else(|| Error::input("the group does not normalise the plinth"))?;
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    orb.push(j);
                }
            }
            i += 1;
        }
        orb.sort_unstable();
        orbits.push(orb);
    }
    // Orbit weight: product of block counts, which must divide n.
    let weights: Vec<u128> = orbits
        .iter()
        .map(|o| o.iter().map(|&s| systems[s].num_blocks() as u128).product())
        .collect();
    let mut found = Vec::new();
    let mut chosen = Vec::new();
    search(&systems, &orbits, &weights, 0, 1, n as u128, &mut chosen, &mut found)?;
    let mut out: Vec<CartesianDecomposition> = found.into_iter().map(|e| e.canonical()).collect();
    out.sort_by(|a, b| a.parts().cmp(b.parts()));
    out.dedup();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    systems: &[Partition],
    orbits: &[Vec<usize>],
    weights: &[u128],
    next: usize,
    product: u128,
    n: u128,
    chosen: &mut Vec<usize>,
    found: &mut Vec<CartesianDecomposition>,
) -> Result<()> {
    if product == n {
        let parts: Vec<Partition> = chosen
            .iter()
            .flat_map(|&o| orbits[o].iter().map(|&s| systems[s].clone()))
            .collect();
        if parts.len() >= 2 && is_cartesian_decomposition(&parts)?.holds {
            found.push(CartesianDecomposition::new(parts)?);
        }
        return Ok(());
    }
    for o in next..orbits.len() {
        let p = product.saturating_mul(weights[o]);
        if n % p == 0 {
            chosen.push(o);
            search(systems, orbits, weights, o + 1, p, n, chosen, found)?;
            chosen.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::grid;

    /// `A_6 × A_6` on the 6×6 grid.
    fn a6_squared() -> Group {
        let a = Perm::from_cycles(6, &[&[0, 1, 2]]).unwrap();
        let b = Perm::from_cycles(6, &[&[1, 2, 3, 4, 5]]).unwrap();
        let on_rows = |x: &Perm| Perm::from_images((0..36).map(|p| x.apply(p / 6) * 6 + p % 6).collect()).unwrap();
        let on_cols = |x: &Perm| Perm::from_images((0..36).map(|p| (p / 6) * 6 + x.apply(p % 6)).collect()).unwrap();
        Group::new(36, vec![on_rows(&a), on_rows(&b), on_cols(&a), on_cols(&b)]).unwrap()
    }

    #[test]
    fn grid_roundtrip() {
        let m = a6_squared();
        let e = grid(6, 6);
        let sys = system_from_decomposition(&m, 7, &e).unwrap();
        assert!(sys.members.iter().all(|k| k.order() == 360 * 60));
        let space = SubgroupSpace::new(&m, &m, Limits::default()).unwrap();
        assert!(verify_cartesian_system(&sys, &space).unwrap().holds);
        assert!(verify_simple_factor_identity(&sys, &space).unwrap().holds);
        let back = decomposition_from_system(&sys).unwrap();
        assert_eq!(back.canonical(), e.canonical());
    }

    #[test]
    fn repeated_member_fails() {
        let m = a6_squared();
        let e = grid(6, 6);
        let mut sys = system_from_decomposition(&m, 0, &e).unwrap();
        sys.members[1] = sys.members[0].clone();
        let space = SubgroupSpace::new(&m, &m, Limits::default()).unwrap();
        assert!(!verify_cartesian_system(&sys, &space).unwrap().holds);
    }

    #[test]
    fn grid_is_the_only_decomposition() {
        let m = a6_squared();
        let swap = Perm::from_images((0..36).map(|p| (p % 6) * 6 + p / 6).collect()).unwrap();
        let mut gens = m.generators().to_vec();
        gens.push(swap);
        let g = Group::new(36, gens).unwrap();
        let found = enumerate_invariant_decompositions(&g, &m, ENUMERATION_DEGREE_CAP).unwrap();
        assert_eq!(found, vec![grid(6, 6).canonical()]);
    }
}
