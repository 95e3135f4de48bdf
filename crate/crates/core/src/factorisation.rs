//! Factorisation predicates: plain, full, strong multiple and full strip.
//!
//! Products `AB = M` are decided by `|A||B| = |M||A ∩ B|`. All subgroups of a
//! plinth are passed in the conjugation representation of a
//! [`DirectFactorisation`], where projections are cheap.

use serde::Serialize;

use crate::algebra::{conjugating_element, derived_subgroup, intersection};
use crate::backtrack::Limits;
use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::morphism::GroupMorphism;
use crate::primes::prime_divisors;
use crate::product::{DirectFactorisation, StripSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorisationKind {
    Plain,
    Full,
    StrongMultiple,
    FullStrip,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorisationCertificate {
    pub kind: FactorisationKind,
    pub holds: bool,
    /// First failed condition when `holds` is false.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub group_order: u128,
    pub part_orders: Vec<u128>,
    /// Orders of the pairwise (or, for three parts, all) intersections used.
    pub intersection_orders: Vec<u128>,
    pub nontrivial: bool,
    /// `projection_orders[j][i] = |σ_i(K_j)|`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub projection_orders: Vec<Vec<u128>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub factor_orders: Vec<u128>,
    /// `prime_sets[j][i]`: primes dividing `|σ_i(K_j)|`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub prime_sets: Vec<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub strips: Vec<StripSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched_row: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
}

impl FactorisationCertificate {
    fn new(kind: FactorisationKind, group_order: u128, parts: &[&Group]) -> Self {
        FactorisationCertificate {
            kind,
            holds: true,
            reason: None,
            group_order,
            part_orders: parts.iter().map(|p| p.order()).collect(),
            intersection_orders: Vec::new(),
            nontrivial: parts.iter().all(|p| p.order() < group_order),
            projection_orders: Vec::new(),
            factor_orders: Vec::new(),
            prime_sets: Vec::new(),
            strips: Vec::new(),
            matched_row: None,
            caveats: Vec::new(),
        }
    }

    fn fail(mut self, reason: impl Into<String>) -> Self {
        if self.holds {
            self.holds = false;
            self.reason = Some(reason.into());
        }
        self
    }
}

fn same_degree(m: &Group, parts: &[&Group]) -> Result<()> {
    if parts.iter().any(|p| p.degree() != m.degree()) {
        return Err(Error::input("subgroups must act on the same points as the group"));
    }
    Ok(())
}

/// `|A||B| / |A ∩ B|`, with the intersection order.
pub fn product_order(a: &Group, b: &Group, limits: &Limits) -> Result<(u128, u128)> {
    let i = intersection(a, b, limits)?.order();
    Ok((a.order() / i * b.order(), i))
}

pub fn is_factorisation(m: &Group, a: &Group, b: &Group, limits: &Limits) -> Result<FactorisationCertificate> {
    same_degree(m, &[a, b])?;
    let mut cert = FactorisationCertificate::new(FactorisationKind::Plain, m.order(), &[a, b]);
    let (p, i) = product_order(a, b, limits)?;
    cert.intersection_orders.push(i);
    if p != m.order() {
        return Ok(cert.fail(format!("|A||B|/|A∩B| = {p} differs from |M| = {}", m.order())));
    }
    if !a.is_subgroup_of(m) || !b.is_subgroup_of(m) {
        return Ok(cert.fail("a part is not contained in the group"));
    }
    Ok(cert)
}

fn projection_data(d: &DirectFactorisation, parts: &[&Group], cert: &mut FactorisationCertificate) -> Result<()> {
    let k = d.num_factors();
    cert.factor_orders = (0..k).map(|i| d.factor_order(i)).collect();
    for p in parts {
        let orders = (0..k)
            .map(|i| d.projection_order(&[i], p))
            .collect::<Result<Vec<_>>>()?;
        cert.prime_sets.push(orders.iter().map(|&o| prime_divisors(o)).collect());
        cert.projection_orders.push(orders);
    }
    Ok(())
}

fn check_in_plinth(d: &DirectFactorisation, parts: &[&Group]) -> Result<()> {
    for p in parts {
        if p.degree() != d.rep_degree() || !p.is_subgroup_of(d.plinth()) {
            return Err(Error::input("subgroup is not given inside the plinth representation"));
        }
    }
    Ok(())
}

/// Rows of `tables` matching every factor's projection orders; the key is
/// recorded when all factors agree.
fn match_projections(cert: &FactorisationCertificate, tables: &[u8]) -> Option<String> {
    let catalog = Catalog::builtin();
    let mut key: Option<String> = None;
    for (i, &t) in cert.factor_orders.iter().enumerate() {
        let orders: Vec<u128> = cert.projection_orders.iter().map(|row| row[i]).collect();
        let hit = catalog.match_orders(tables, t, &orders).first()?.key.clone();
        match &key {
            Some(k) if *k != hit => return None,
            _ => key = Some(hit),
        }
    }
    key
}

pub fn is_full_factorisation(
    d: &DirectFactorisation,
    k1: &Group,
    k2: &Group,
    limits: &Limits,
) -> Result<FactorisationCertificate> {
    check_in_plinth(d, &[k1, k2])?;
    let m = d.plinth();
    let plain = is_factorisation(m, k1, k2, limits)?;
    let mut cert = FactorisationCertificate {
        kind: FactorisationKind::Full,
        ..plain
    };
    projection_data(d, &[k1, k2], &mut cert)?;
    if !cert.holds {
        return Ok(cert);
    }
    for i in 0..d.num_factors() {
        let t = d.factor_order(i);
        let tp = prime_divisors(t);
        for j in 0..2 {
            if cert.projection_orders[j][i] == t {
                return Ok(cert.fail(format!("σ_{i}(K_{j}) is the whole factor")));
            }
            if cert.prime_sets[j][i] != tp {
                let o = cert.projection_orders[j][i];
                return Ok(cert.fail(format!(
                    "|σ_{i}(K_{j})| = {o} and |T_{i}| = {t} have different prime divisors"
                )));
            }
        }
    }
    cert.matched_row = match_projections(&cert, &[1]);
    Ok(cert)
}

pub fn is_strong_multiple_factorisation(
    d: &DirectFactorisation,
    parts: &[Group],
    limits: &Limits,
) -> Result<FactorisationCertificate> {
    let refs: Vec<&Group> = parts.iter().collect();
    check_in_plinth(d, &refs)?;
    let m_order = d.plinth().order();
    let mut cert = FactorisationCertificate::new(FactorisationKind::StrongMultiple, m_order, &refs);
    if parts.len() != 3 {
        return Ok(cert.fail(format!(
            "requires three parts: a strong multiple factorisation contains exactly three subgroups, got {}",
            parts.len()
        )));
    }
    for a in 0..3 {
        for b in a + 1..3 {
            if parts[a].same_as(&parts[b]) {
                return Ok(cert.fail("the parts are not pairwise distinct"));
            }
        }
    }
    projection_data(d, &refs, &mut cert)?;
    for (j, row) in cert.projection_orders.iter().enumerate() {
        for (i, &o) in row.iter().enumerate() {
            if o == d.factor_order(i) {
                let msg = format!("σ_{i}(K_{j}) is the whole factor");
                return Ok(cert.fail(msg));
            }
        }
    }
    let all = intersection(&intersection(&parts[0], &parts[1], limits)?, &parts[2], limits)?;
    for j in 0..3 {
        let (a, b) = ((j + 1) % 3, (j + 2) % 3);
        let rest = intersection(&parts[a], &parts[b], limits)?;
        cert.intersection_orders.push(rest.order());
        // K_j ∩ (K_a ∩ K_b) is the triple intersection.
        let p = parts[j].order() / all.order() * rest.order();
        if p != m_order {
            return Ok(cert.fail(format!(
                "K_{j}(K_{a} ∩ K_{b}) has order {p}, not |M| = {m_order}"
            )));
        }
    }
    cert.intersection_orders.push(all.order());
    cert.matched_row = match_projections(&cert, &[2]);
    Ok(cert)
}

/// `(M, D, K)` with `D` a product of disjoint non-trivial full strips.
/// `ambient` (a group acting on the representation and normalising `M`) is
/// searched for elements carrying `σ_i(K)` to `σ_j(K)`; without such an
/// element the isomorphism of projections rests on equal orders only, which
/// is recorded as a caveat.
pub fn is_full_strip_factorisation(
    d: &DirectFactorisation,
    dstrips: &Group,
    k: &Group,
    ambient: Option<&Group>,
    limits: &Limits,
) -> Result<FactorisationCertificate> {
    check_in_plinth(d, &[dstrips, k])?;
    let m = d.plinth();
    let plain = is_factorisation(m, dstrips, k, limits)?;
    let mut cert = FactorisationCertificate {
        kind: FactorisationKind::FullStrip,
        ..plain
    };
    projection_data(d, &[dstrips, k], &mut cert)?;
    if !cert.holds {
        return Ok(cert);
    }
    if !cert.nontrivial {
        return Ok(cert.fail("D and K must be proper"));
    }
    let strips = d.strips_involved(dstrips)?;
    cert.strips = strips.iter().map(|s| s.summary()).collect();
    let covered: u128 = strips.iter().map(|s| s.component.order()).product();
    let used: Vec<usize> = strips.iter().flat_map(|s| s.support.iter().copied()).collect();
    if covered != dstrips.order() || strips.is_empty() {
        return Ok(cert.fail("D is not a direct product of non-trivial full strips"));
    }
    let mut sorted = used.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != used.len() {
        return Ok(cert.fail("the strips of D overlap"));
    }
    let kp = &cert.projection_orders[1];
    for (i, &o) in kp.iter().enumerate() {
        if o == d.factor_order(i) {
            return Ok(cert.fail(format!("σ_{i}(K) is the whole factor")));
        }
        if o != kp[0] {
            return Ok(cert.fail(format!("σ_0(K) and σ_{i}(K) have different orders")));
        }
    }
    if let Some(s) = strips.iter().find(|s| s.len() != 2) {
        return Err(Error::violation(
            "each full strip involved in D has length 2",
            format!("strip with support {:?}", s.support),
            serde_json::json!({ "support": s.support }),
        ));
    }
    // Isomorphism of the projections.
    let projections = (0..d.num_factors())
        .map(|i| d.projection(&[i], k))
        .collect::<Result<Vec<_>>>()?;
    let mut certified = true;
    for i in 1..projections.len() {
        let found = match ambient {
            Some(g) => conjugating_element(g, &projections[0], &projections[i], limits)?.is_some(),
            None => false,
        };
        certified &= found;
    }
    if !certified {
        cert.caveats
            .push("projections of K are isomorphic by order only; no conjugating element was found".into());
    }
    // For each strip, σ_a(K) · α⁻¹(σ_b(K)) = T_a where α: T_a → T_b is the
    // strip isomorphism.
    for s in &strips {
        let (a, b) = (s.support[0], s.support[1]);
        let pulled = pull_back(d, &s.component, a, b, &projections[b])?;
        let (p, _) = product_order(&projections[a], &pulled, limits)?;
        if p != d.factor_order(a) {
            return Err(Error::violation(
                "σ_a(K)·α⁻¹(σ_b(K)) = T_a for a full strip factorisation",
                format!("the product has order {p}, the factor {}", d.factor_order(a)),
                serde_json::json!({ "support": s.support, "product_order": p }),
            ));
        }
    }
    let orders = vec![kp[0], kp[kp.len().min(2) - 1]];
    cert.matched_row = Catalog::builtin()
        .match_orders(&[3], d.factor_order(0), &orders)
        .first()
        .map(|r| r.key.clone());
    Ok(cert)
}

/// `α⁻¹(h)` for the isomorphism `α: T_a → T_b` whose graph is the strip `x`.
fn pull_back(d: &DirectFactorisation, x: &Group, a: usize, b: usize, h: &Group) -> Result<Group> {
    let src_gens: Vec<_> = x.generators().iter().map(|g| d.project_perm(&[b], g)).collect();
    let dst_gens: Vec<_> = x.generators().iter().map(|g| d.project_perm(&[a], g)).collect();
    let source = Group::with_order(d.rep_degree(), src_gens, d.factor_order(b))?;
    let target = Group::with_order(d.rep_degree(), dst_gens.clone(), d.factor_order(a))?;
    let beta = GroupMorphism::new(&source, &target, dst_gens)?;
    let imgs = h
        .generators()
        .iter()
        .map(|y| beta.evaluate(y))
        .collect::<Result<Vec<_>>>()?;
    Group::with_order(d.rep_degree(), imgs, h.order())
}

/// `σ_1(K)′ × ⋯ × σ_k(K)′ ≤ K`, checked on generators.
pub fn derived_projections_contained(d: &DirectFactorisation, k: &Group) -> Result<bool> {
    for i in 0..d.num_factors() {
        let p = derived_subgroup(&d.projection(&[i], k)?)?;
        for x in p.generators() {
            if !k.try_contains(x)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
