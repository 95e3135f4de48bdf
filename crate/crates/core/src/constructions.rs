//! Concrete innately transitive groups preserving intransitive Cartesian
//! decompositions.
//!
//! Every construction follows the same pattern. A prototype `M̂ = T̂^k` acts
//! on `k` copies of the points of `T̂`; subgroups `K̄_j ≤ M̂` are chosen, and
//! permutations inducing automorphisms of `M̂` that normalise every `K̄_j`
//! are adjoined to give `Ĝ`. The point set is `[Ĝ : Ŝ]` with
//! `Ŝ = ⟨∩K̄_j, extras⟩`, so `M̂` acts on `[M̂ : ∩K̄_j]`. The decomposition
//! is read off from the translates of the orbits of the point `0` under the
//! images of the `K̄_j`. Nothing is assumed: the plinth is re-certified as a
//! minimal normal subgroup after the build.

use serde::Serialize;

use crate::algebra::intersection;
use crate::atlas::{atlas_load, AtlasEntry};
use crate::backtrack::Limits;
use crate::catalog::Catalog;
use crate::coset::coset_action;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::normal::{centralizer_in_sym, is_minimal_normal};
use crate::partition::CartesianDecomposition;
use crate::perm::{Perm, Point};
use crate::system::partition_of_member;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Example {
    /// `K̄_1 = A^k`, `K̄_2 = B^k` for a factorisation `T = AB`.
    FullFactorisation,
    /// `K̄_1` a product of diagonal pairs, `K̄_2 = (A × B)^{k/2}`.
    Strip,
    /// `K̄_j = A_j^k` for a strong multiple factorisation `{A_1, A_2, A_3}`.
    StrongMultiple,
    /// A6 extended by a class-swapping automorphism of M10 type.
    M10,
}

impl Example {
    pub fn parse(s: &str) -> Result<Example> {
        match s {
            "fullex" => Ok(Example::FullFactorisation),
            "stex" => Ok(Example::Strip),
            "smf" => Ok(Example::StrongMultiple),
            "m10" => Ok(Example::M10),
            _ => Err(Error::input(format!("unknown example {s}; expected fullex, stex, smf or m10"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Example::FullFactorisation => "fullex",
            Example::Strip => "stex",
            Example::StrongMultiple => "smf",
            Example::M10 => "m10",
        }
    }
}

/// A constructed group with its plinth, base point and decomposition.
#[derive(Clone, Debug)]
pub struct Instance {
    pub example: Example,
    pub simple: String,
    pub k: usize,
    pub g: Group,
    pub m: Group,
    pub omega: Point,
    pub decomposition: CartesianDecomposition,
    /// The subgroups of `m` whose orbit translates give the parts, in order.
    pub members: Vec<Group>,
    /// Catalog row the local factorisation was matched to.
    pub catalog_row: Option<String>,
    /// Degree of the prototype `Ĝ` before passing to cosets.
    pub prototype_degree: usize,
    /// What was adjoined to the plinth.
    pub adjoined: Vec<String>,
}

/// Prototype data for the coset construction.
struct Blueprint {
    t: Group,
    k: usize,
    /// Partition-defining subgroups of `T̂^k`.
    members: Vec<Group>,
    /// Their common intersection, when known in closed form.
    core: Group,
    extras: Vec<(String, Perm)>,
}

/// `x` acting on coordinate `i` of `k` copies of `n` points.
fn at(x: &Perm, i: usize, k: usize) -> Perm {
    let n = x.degree();
    x.embed(i * n, n * k)
}

/// Product of subgroups of `T̂`, one per coordinate.
fn product(parts: &[&Group]) -> Result<Group> {
    let k = parts.len();
    let n = parts[0].degree();
    let mut gens = Vec::new();
    let mut order = 1u128;
    for (i, h) in parts.iter().enumerate() {
        gens.extend(h.generators().iter().map(|x| at(x, i, k)));
        order = order
            .checked_mul(h.order())
            .ok_or_else(|| Error::limit("group order overflows"))?;
    }
    if gens.is_empty() {
        return Ok(Group::trivial(n * k));
    }
    Group::with_order(n * k, gens, order)
}

/// Permutation moving coordinate `i` to `perm[i]`.
fn coordinate_perm(n: usize, perm: &[usize]) -> Result<Perm> {
    let k = perm.len();
    Perm::from_images((0..n * k).map(|p| (perm[p / n] * n + p % n) as Point).collect())
}

/// Coordinates `0` and `1` swapped, each point moved by `tau` on the way.
fn twisted_swap(tau: &Perm, k: usize) -> Result<Perm> {
    let n = tau.degree();
    let mut img: Vec<Point> = (0..(n * k) as Point).collect();
    for r in 0..n {
        img[r] = (n + tau.apply(r as Point) as usize) as Point;
        img[n + r] = tau.apply(r as Point);
    }
    Perm::from_images(img)
}

fn diagonal_pair(t: &Group, pair: usize, k: usize) -> Result<Group> {
    let gens = t
        .generators()
        .iter()
        .map(|x| at(x, 2 * pair, k).mul(&at(x, 2 * pair + 1, k)))
        .collect();
    Group::with_order(t.degree() * k, gens, t.order())
}

fn contains_all(h: &Group, xs: &[Perm]) -> bool {
    xs.iter().all(|x| h.contains(x))
}

fn catalog_match(tables: &[u8], t: &Group, parts: &[&Group]) -> Option<String> {
    let orders: Vec<u128> = parts.iter().map(|p| p.order()).collect();
    Catalog::builtin()
        .match_orders(tables, t.order(), &orders)
        .first()
        .map(|r| r.key.clone())
}

fn require_row(tables: &[u8], t: &Group, parts: &[&Group], simple: &str, what: &str) -> Result<String> {
    catalog_match(tables, t, parts).ok_or_else(|| {
        Error::input(format!(
            "{simple} admits no {what} in the catalog realised at atlas scale (tables {tables:?})"
        ))
    })
}

fn two_action_entry(simple: &str) -> Result<AtlasEntry> {
    match simple {
        "A6" => atlas_load("A6-two-actions"),
        "M12" => atlas_load("M12-two-actions"),
        _ => Err(Error::input(format!(
            "no two-action atlas data for {simple}; supported: A6, M12"
        ))),
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    Ok(())
}

pub fn build_full_fact_example(simple: &str, k: usize, limits: &Limits) -> Result<Instance> {
    check_k(k)?;
    let entry = two_action_entry(simple)?;
    let t = entry.group.clone();
    let (a, b) = (entry.subgroup("A")?, entry.subgroup("B")?);
    let row = require_row(&[4], &t, &[a, b], simple, "factorisation with the full-factorisation property")?;
    let ab = intersection(a, b, limits)?;
    let whole: Vec<&Group> = vec![&t; k];
    let mut members = Vec::new();
    for sub in [a, b] {
        for i in 0..k {
            let mut parts = whole.clone();
            parts[i] = sub;
            members.push(product(&parts)?);
        }
    }
    let core = product(&vec![&ab; k])?;
    let n = t.degree();
    let mut extras = Vec::new();
    if k > 1 {
        let cycle: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
        extras.push(("factor cycle".to_string(), coordinate_perm(n, &cycle)?));
    }
    if let Ok(c) = entry.automorphism("odd") {
        extras.push(("odd automorphism normalising A and B on factor 0".to_string(), at(c, 0, k)));
    }
    let bp = Blueprint { t, k, members, core, extras };
    finish(Example::FullFactorisation, simple, bp, Some(row), limits)
}

pub fn build_strip_example(simple: &str, k: usize, limits: &Limits) -> Result<Instance> {
    check_k(k)?;
    if k % 2 == 1 {
        return Err(Error::input(format!(
            "k = {k} is odd: the strip construction pairs up the factors, so k must be even"
        )));
    }
    let catalog_t = match simple {
        "A6" | "M12" => two_action_entry(simple)?,
        _ => {
            let e = atlas_load(simple)?;
            return Err(Error::input(format!(
                "{simple} (order {}) admits no factorisation into isomorphic subgroups in the catalog",
                e.group.order()
            )));
        }
    };
    let t = catalog_t.group.clone();
    let (a, b) = (catalog_t.subgroup("A")?, catalog_t.subgroup("B")?);
    let row = require_row(&[3], &t, &[a, b], simple, "factorisation into isomorphic subgroups")?;
    let tau = catalog_t.automorphism("tau").map_err(|_| {
        Error::Unsupported(format!("no automorphism exchanging A and B is shipped for {simple}"))
    })?;
    let ab = intersection(a, b, limits)?;
    let pairs = k / 2;
    let mut dgens = Vec::new();
    for p in 0..pairs {
        dgens.extend(diagonal_pair(&t, p, k)?.generators().iter().cloned());
    }
    let d = Group::with_order(t.degree() * k, dgens, t.order().pow(pairs as u32))?;
    let ab_parts: Vec<&Group> = (0..k).map(|i| if i % 2 == 0 { a } else { b }).collect();
    let kk = product(&ab_parts)?;
    let mut cgens = Vec::new();
    for p in 0..pairs {
        for x in ab.generators() {
            cgens.push(at(x, 2 * p, k).mul(&at(x, 2 * p + 1, k)));
        }
    }
    let core = Group::with_order(t.degree() * k, cgens, ab.order().pow(pairs as u32))?;
    let n = t.degree();
    let mut extras = vec![("(tau,tau,1,..,1)(1,2)".to_string(), twisted_swap(tau, k)?)];
    if k >= 4 {
        let cycle: Vec<usize> = (0..k).map(|i| (i + 2) % k).collect();
        extras.push(("(1,3,..,k-1)(2,4,..,k)".to_string(), coordinate_perm(n, &cycle)?));
    }
    let bp = Blueprint { t, k, members: vec![d, kk], core, extras };
    finish(Example::Strip, simple, bp, Some(row), limits)
}

pub fn build_smf_example(simple: &str, k: usize, limits: &Limits) -> Result<Instance> {
    check_k(k)?;
    let entry = atlas_load(simple)?;
    let t = entry.group.clone();
    let parts: Vec<&Group> = match simple {
        "Sp6(2)" => vec![entry.subgroup("G2(2)")?, entry.subgroup("O6-(2)")?, entry.subgroup("O6+(2)")?],
        _ => {
            return Err(Error::input(format!(
                "{simple} (order {}) admits no strong multiple factorisation in the catalog",
                t.order()
            )))
        }
    };
    let row = require_row(&[2], &t, &parts, simple, "strong multiple factorisation")?;
    let all = intersection(&intersection(parts[0], parts[1], limits)?, parts[2], limits)?;
    let mut members = Vec::new();
    for p in &parts {
        members.push(product(&vec![*p; k])?);
    }
    let core = product(&vec![&all; k])?;
    let mut extras = Vec::new();
    if k > 1 {
        let cycle: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
        extras.push(("factor cycle".to_string(), coordinate_perm(t.degree(), &cycle)?));
    }
    let bp = Blueprint { t, k, members, core, extras };
    finish(Example::StrongMultiple, simple, bp, Some(row), limits)
}

/// A6 with a class-swapping automorphism of M10 type on `[A6 : A ∩ B]`; the
/// two parts of the grid are exchanged.
pub fn build_m10_example(limits: &Limits) -> Result<Instance> {
    let entry = atlas_load("A6-two-actions")?;
    let t = entry.group.clone();
    let (a, b) = (entry.subgroup("A")?.clone(), entry.subgroup("B")?.clone());
    let row = catalog_match(&[1], &t, &[&a, &b]);
    let core = intersection(&a, &b, limits)?;
    let tau = entry.automorphism("tau")?.clone();
    let bp = Blueprint {
        t,
        k: 1,
        members: vec![a, b],
        core,
        extras: vec![("class-swapping automorphism tau".to_string(), tau)],
    };
    finish(Example::M10, "A6", bp, row, limits)
}

pub fn build(example: Example, simple: &str, k: usize, limits: &Limits) -> Result<Instance> {
    match example {
        Example::FullFactorisation => build_full_fact_example(simple, k, limits),
        Example::Strip => build_strip_example(simple, k, limits),
        Example::StrongMultiple => build_smf_example(simple, k, limits),
        Example::M10 => {
            if simple != "A6" || k != 1 {
                return Err(Error::input("the M10 example exists for A6 with k = 1 only"));
            }
            build_m10_example(limits)
        }
    }
}

fn finish(
    example: Example,
    simple: &str,
    bp: Blueprint,
    row: Option<String>,
    limits: &Limits,
) -> Result<Instance> {
    let Blueprint { t, k, members, core, extras } = bp;
    let deg = t.degree() * k;
    let mut mgens = Vec::new();
    for i in 0..k {
        mgens.extend(t.generators().iter().map(|x| at(x, i, k)));
    }
    let m_order = t
        .order()
        .checked_pow(k as u32)
        .ok_or_else(|| Error::limit("plinth order overflows"))?;
    let m_hat = Group::with_order(deg, mgens.clone(), m_order)?;

    let index = m_order / core.order();
    if index > limits.max_degree as u128 && !limits.override_guard {
        return Err(Error::limit(format!(
            "the construction acts on {index} points, above the degree cap {}",
            limits.max_degree
        )));
    }
    for (name, x) in &extras {
        // Members may be permuted (the M10 example swaps them).
        let ok = contains_all(&m_hat, m_hat.conjugate(x).generators())
            && members.iter().all(|h| {
                let c = h.conjugate(x);
                members.iter().any(|l| l.order() == h.order() && contains_all(l, c.generators()))
            })
            && contains_all(&core, core.conjugate(x).generators());
        if !ok {
            return Err(Error::Internal(format!("{name} does not normalise the plinth and the core while permuting the members")));
        }
    }
    for h in &members {
        if !contains_all(h, core.generators()) || !contains_all(&m_hat, h.generators()) {
            return Err(Error::Internal("inconsistent prototype subgroups".into()));
        }
    }

    let extra_perms: Vec<Perm> = extras.iter().map(|(_, x)| x.clone()).collect();
    let mut ggens = mgens.clone();
    ggens.extend(extra_perms.iter().cloned());
    let g_hat = Group::new(deg, ggens)?;
    let mut sgens = core.generators().to_vec();
    sgens.extend(extra_perms);
    let s_hat = Group::new(deg, sgens)?;
    // Ĝ = M̂Ŝ, so |Ŝ ∩ M̂| = |Ŝ||M̂|/|Ĝ| must be the core.
    if s_hat.order() * m_order / g_hat.order() != core.order() {
        return Err(Error::Internal("the adjoined automorphisms do not meet the plinth in the core".into()));
    }

    let cap = if limits.override_guard { usize::MAX } else { limits.max_degree };
    let (g, table) = coset_action(&g_hat, &s_hat, cap, true)?;
    let n = g.degree();
    let m = Group::with_order(n, g.generators()[..mgens.len()].to_vec(), m_order)?;
    let omega: Point = 0;
    let mut images = Vec::new();
    for h in &members {
        let gens = h.generators().iter().map(|x| table.act(x)).collect::<Result<Vec<_>>>()?;
        images.push(Group::with_order(n, gens, h.order())?);
    }
    let parts = images
        .iter()
        .map(|h| partition_of_member(&m, omega, h))
        .collect::<Result<Vec<_>>>()?;
    let decomposition = CartesianDecomposition::new(parts)?;

    if !is_minimal_normal(&g, &m, limits)? {
        return Err(Error::violation(
            "plinth is minimal normal",
            "the constructed plinth is not a minimal normal subgroup",
            serde_json::json!({ "example": example.name(), "simple": simple, "k": k }),
        ));
    }
    Ok(Instance {
        example,
        simple: simple.to_string(),
        k,
        g,
        m,
        omega,
        decomposition,
        members: images,
        catalog_row: row,
        prototype_degree: deg,
        adjoined: extras.into_iter().map(|(s, _)| s).collect(),
    })
}

impl Instance {
    pub fn label(&self) -> String {
        format!("{}({},{})", self.example.name(), self.simple, self.k)
    }

    /// Order of `C_{Sym Ω}(M)`.
    pub fn centralizer_order(&self) -> Result<u128> {
        Ok(centralizer_in_sym(&self.m, self.omega)?.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fullex_a6_1() {
        let inst = build_full_fact_example("A6", 1, &Limits::default()).unwrap();
        assert_eq!(inst.g.degree(), 36);
        assert_eq!(inst.g.order(), 720);
        assert_eq!(inst.decomposition.index(), 2);
        assert_eq!(inst.catalog_row.as_deref(), Some("T4R1"));
        assert_eq!(inst.centralizer_order().unwrap(), 1);
    }

    #[test]
    fn degrees() {
        let l = Limits::default();
        let cases = [
            (Example::FullFactorisation, "A6", 2, 1296),
            (Example::FullFactorisation, "M12", 1, 144),
            (Example::Strip, "A6", 2, 12960),
        ];
        for (ex, t, k, deg) in cases {
            let inst = build(ex, t, k, &l).unwrap();
            assert_eq!(inst.g.degree(), deg, "{}", inst.label());
        }
    }

    #[test]
    fn m10_instance() {
        let inst = build_m10_example(&Limits::default()).unwrap();
        assert_eq!((inst.g.degree(), inst.g.order()), (36, 720));
        let props = crate::partition::decomposition_properties(&inst.decomposition, &inst.g).unwrap();
        assert!(props.invariant && props.transitive);
    }

    #[test]
    fn rejections() {
        let l = Limits::default();
        assert!(matches!(build_strip_example("A6", 3, &l), Err(Error::Input(_))));
        assert!(matches!(build_strip_example("A5", 2, &l), Err(Error::Input(_))));
        assert!(matches!(build_smf_example("A6", 1, &l), Err(Error::Input(_))));
        assert!(matches!(build_full_fact_example("A6", 0, &l), Err(Error::Input(_))));
    }
}
