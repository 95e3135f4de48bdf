//! Orbits of an innately transitive group on an invariant Cartesian
//! decomposition.
//!
//! Each orbit `Ξ_i` collapses to the partition `Ω_i`, the meet of its parts;
//! the plinth acts faithfully on the blocks of `Ω_i` and the parts of `Ξ_i`
//! become a transitive decomposition of that block set, which gets one of
//! six class labels. Everything the theory predicts about the quotients is
//! recomputed and any mismatch is reported as a theorem violation.

use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::json;

use crate::algebra::{conjugating_element, point_stabilizer};
use crate::backtrack::Limits;
use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::factorisation::{
    is_full_factorisation, is_full_strip_factorisation, is_strong_multiple_factorisation, FactorisationCertificate,
    FactorisationKind,
};
use crate::group::Group;
use crate::normal::{centralizer_in_sym, is_innately_transitive, is_minimal_normal, quasiprimitive_verdict};
use crate::partition::{
    decomposition_properties, infimum, is_cartesian_decomposition, CartesianDecomposition, DecompositionProperties,
    Partition,
};
use crate::perm::{Perm, Point};
use crate::product::{DirectFactorisation, StripSummary};
use crate::system::{block_stabilizer, system_from_decomposition, verify_cartesian_system, CartesianSystem, SubgroupSpace};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassLabel {
    Cd1,
    CdS,
    Cd1S,
    Cd2Sim,
    Cd2NSim,
    Cd3,
    /// A resource guard stopped the conjugacy search.
    Undecided(String),
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Cd1 => f.write_str("CD_1"),
            ClassLabel::CdS => f.write_str("CD_S"),
            ClassLabel::Cd1S => f.write_str("CD_1S"),
            ClassLabel::Cd2Sim => f.write_str("CD_2sim"),
            ClassLabel::Cd2NSim => f.write_str("CD_2nsim"),
            ClassLabel::Cd3 => f.write_str("CD_3"),
            ClassLabel::Undecided(r) => write!(f, "UNDECIDED({r})"),
        }
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Outcome of the `G_ω`-conjugacy test between the two subgroups of `F_i`.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyEvidence {
    /// `None` when the search was cut off.
    pub conjugate: Option<bool>,
    /// A conjugating element of `G_ω`, written in the factor representation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<Perm>,
    pub detail: String,
}

/// The sets `F_c` of proper projections of a Cartesian system, one per
/// simple factor.
#[derive(Clone, Debug, Serialize)]
pub struct FactorSets {
    pub sizes: Vec<usize>,
    /// Orders of the subgroups in `F_0`, sorted.
    pub orders: Vec<u128>,
    /// Member indices realising `F_0`.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub label: ClassLabel,
    pub index: usize,
    pub factor_sets: FactorSets,
    pub subdirect: Vec<bool>,
    /// Non-trivial full strips involved in each member.
    pub strips: Vec<Vec<StripSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugacy: Option<ConjugacyEvidence>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    Undecided,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub clause: String,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    fn new(clause: &str, status: Status, detail: impl Into<String>) -> Self {
        Verdict {
            clause: clause.to_string(),
            status,
            detail: detail.into(),
        }
    }

    fn check(clause: &str, ok: bool, detail: impl Into<String>) -> Self {
        Verdict::new(clause, if ok { Status::Holds } else { Status::Fails }, detail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    /// Indices of the parts of the decomposition in this orbit.
    pub parts: Vec<usize>,
    /// Number of blocks of the meet of those parts.
    pub blocks: usize,
    /// `ℓ_i` with `blocks = m^{ℓ_i}`, for homogeneous decompositions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
    /// Order of the stabiliser in `M` of the block containing `ω`.
    pub k_order: u128,
    pub quotient_group_order: u128,
    pub quotient_plinth_order: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitBound {
    pub orbits: usize,
    /// Whether `G` was certified innately transitive; the bound is only
    /// asserted for such groups.
    pub innately_transitive: bool,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralizerClaims {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralizer_order: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasiprimitive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type_pa: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub degree: usize,
    pub group_order: u128,
    pub plinth_order: u128,
    pub omega: Point,
    pub simple_factors: usize,
    pub factor_order: u128,
    pub index: usize,
    pub homogeneous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub s: usize,
    /// `s = 1`: the quotient decomposition is the index-one partition into
    /// singletons.
    pub degenerate_quotient: bool,
    pub orbits: Vec<OrbitReport>,
    /// `F_c` for the Cartesian system of the whole decomposition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_sets: Option<FactorSets>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorisation: Option<FactorisationCertificate>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_bound: Option<OrbitBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralizer: Option<CentralizerClaims>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn labels(&self) -> Vec<ClassLabel> {
        self.orbits
            .iter()
            .filter_map(|o| o.classification.as_ref().map(|c| c.label.clone()))
            .collect()
    }

    pub fn verdict(&self, clause: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.clause == clause)
    }

    /// Plain-text rendering of the structured report.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("degree {}  |G| = {}  |M| = {}  ω = {}", self.degree, self.group_order, self.plinth_order, self.omega));
        line(format!("simple factors: {} of order {}", self.simple_factors, self.factor_order));
        let hom = match self.m {
            Some(m) if self.homogeneous => format!("homogeneous, m = {m}"),
            _ => "inhomogeneous".to_string(),
        };
        line(format!("index {}  {hom}  s = {}", self.index, self.s));
        for (i, o) in self.orbits.iter().enumerate() {
            let label = o.classification.as_ref().map_or("-".to_string(), |c| c.label.to_string());
            let exp = o.exponent.map_or(String::new(), |e| format!("  ℓ = {e}"));
            line(format!(
                "orbit {i}: parts {:?}  blocks {}{exp}  |K| = {}  label {label}",
                o.parts, o.blocks, o.k_order
            ));
        }
        if let Some(c) = &self.factorisation {
            let row = c.matched_row.as_deref().unwrap_or("-");
            line(format!("factorisation {:?}: holds = {}  row {row}", c.kind, c.holds));
        }
        for v in &self.verdicts {
            line(format!("{:<22} {:?}  {}", v.clause, v.status, v.detail));
        }
        if let Some(b) = &self.orbit_bound {
            line(format!("orbit bound: {} orbits  {:?}", b.orbits, b.status));
        }
        if let Some(c) = &self.centralizer {
            line(format!("centraliser: {:?}  {}", c.status, c.detail));
        }
        for n in &self.notes {
            line(format!("note: {n}"));
        }
        out
    }
}

/// `G` acting on the blocks of `Ω_i`, with the parts of `Ξ_i` carried along.
#[derive(Clone, Debug)]
pub struct QuotientAction {
    pub parts: Vec<usize>,
    pub partition: Partition,
    pub g: Group,
    pub m: Group,
    pub omega: Point,
    pub decomposition: CartesianDecomposition,
}

/// Structural data behind a report.
pub struct Analysis {
    pub report: AnalysisReport,
    pub space: SubgroupSpace,
    pub system: CartesianSystem,
    /// `K_i`, acting on the original points.
    pub k: Vec<Group>,
    pub quotients: Vec<QuotientAction>,
    pub properties: DecompositionProperties,
}

fn violation(claim: &str, detail: impl Into<String>, witness: serde_json::Value) -> Error {
    Error::violation(claim, detail, witness)
}

fn contains_all(h: &Group, xs: &[Perm]) -> bool {
    xs.iter().all(|x| h.contains(x))
}

fn check_inputs(g: &Group, m: &Group, e: &CartesianDecomposition) -> Result<DecompositionProperties> {
    if m.degree() != g.degree() || e.degree() != g.degree() {
        return Err(Error::input(format!(
            "degrees differ: group {}, plinth {}, decomposition {}",
            g.degree(),
            m.degree(),
            e.degree()
        )));
    }
    let props = decomposition_properties(e, g)?;
    if let Some(i) = props.violating_generator {
        return Err(Error::input(format!(
            "the decomposition is not G-invariant: generator {i} maps a partition outside it"
        )));
    }
    Ok(props)
}

/// Divides `blocks` by `m` repeatedly; `None` unless it is a power of `m`.
fn integer_log(blocks: usize, m: usize) -> Option<u32> {
    if m < 2 {
        return None;
    }
    let (mut b, mut e) = (blocks, 0u32);
    while b > 1 {
        if b % m != 0 {
            return None;
        }
        b /= m;
        e += 1;
    }
    Some(e)
}

/// The partition of the blocks of `coarse`'s refinement `fine` induced by `part`.
fn induced_partition(fine: &Partition, part: &Partition) -> Partition {
    let mut labels = vec![u32::MAX; fine.num_blocks()];
    for p in 0..fine.degree() as Point {
        let b = fine.block_of(p) as usize;
        if labels[b] == u32::MAX {
            labels[b] = part.block_of(p);
        }
    }
    Partition::from_labels(&labels)
}

fn block_group(part: &Partition, gens: &[Perm]) -> Result<Group> {
    let images = gens
        .iter()
        .map(|x| part.block_action(x).ok_or_else(|| Error::Internal("generator does not preserve the partition".into())))
        .collect::<Result<Vec<_>>>()?;
    Group::new(part.num_blocks(), images)
}

/// Quotient construction: orbits `Ξ_i`, meets `Ω_i`, subgroups `K_i`, and
/// the quotient actions, with every structural prediction checked.
pub fn quotient_analysis(
    g: &Group,
    m: &Group,
    omega: Point,
    e: &CartesianDecomposition,
    limits: &Limits,
) -> Result<Analysis> {
    let props = check_inputs(g, m, e)?;
    g.check_point(omega)?;
    if !m.is_transitive() || !is_minimal_normal(g, m, limits)? {
        return Err(Error::input("M must be a transitive minimal normal subgroup of G"));
    }
    let space = SubgroupSpace::new(m, g, limits.clone())?;
    let system = system_from_decomposition(m, omega, e)?;
    let check = verify_cartesian_system(&system, &space)?;
    if !check.holds {
        return Err(violation(
            "the point stabilisers of the parts form a Cartesian system",
            check.violation.clone().unwrap_or_default(),
            json!({ "member_orders": check.member_orders }),
        ));
    }
    let lifted = system.members.iter().map(|k| space.lift(k)).collect::<Result<Vec<_>>>()?;
    let stab = point_stabilizer(g, omega)?;

    let mut k_groups = Vec::new();
    let mut quotients = Vec::new();
    let mut orbits = Vec::new();
    for (i, xi) in props.orbits.iter().enumerate() {
        let parts: Vec<Partition> = xi.iter().map(|&j| e.parts()[j].clone()).collect();
        let meet = infimum(&parts)?;
        if let Some(x) = g.generators().iter().position(|x| !meet.is_invariant_under(x)) {
            return Err(violation(
                "each quotient partition is G-invariant",
                format!("generator {x} of G does not preserve the meet of orbit {i}"),
                json!({ "orbit": i, "parts": xi, "generator": x }),
            ));
        }
        let ki = block_stabilizer(m, omega, &meet)?;
        let refs: Vec<&Group> = xi.iter().map(|&j| &lifted[j]).collect();
        let meet_of_members = space.intersection_all(&refs)?;
        let inside = xi.iter().all(|&j| contains_all(&system.members[j], ki.generators()));
        if meet_of_members.order() != ki.order() || !inside {
            return Err(violation(
                "K_i is the stabiliser of the quotient block containing ω",
                format!(
                    "block stabiliser has order {}, the intersection of the orbit's members {}",
                    ki.order(),
                    meet_of_members.order()
                ),
                json!({ "orbit": i, "block_stabilizer": ki.order(), "intersection": meet_of_members.order() }),
            ));
        }
        if let Some(x) = stab
            .generators()
            .iter()
            .position(|x| !contains_all(&ki, ki.conjugate(x).generators()))
        {
            return Err(violation(
                "K_i is normalised by G_ω",
                format!("generator {x} of G_ω does not normalise K_{i}"),
                json!({ "orbit": i, "stabilizer_generator": x }),
            ));
        }
        let gq = block_group(&meet, g.generators())?;
        let mq = block_group(&meet, m.generators())?;
        if mq.order() != m.order() {
            return Err(violation(
                "M acts faithfully on each quotient",
                format!("M has order {} but its image on the blocks of orbit {i} has order {}", m.order(), mq.order()),
                json!({ "orbit": i, "plinth_order": m.order(), "image_order": mq.order() }),
            ));
        }
        let bar: Vec<Partition> = parts.iter().map(|p| induced_partition(&meet, p)).collect();
        let bar = CartesianDecomposition::new(bar).map_err(|err| {
            violation(
                "the orbit's parts form a Cartesian decomposition of the quotient",
                err.to_string(),
                json!({ "orbit": i }),
            )
        })?;
        let bar_props = decomposition_properties(&bar, &gq)?;
        if !bar_props.invariant || !bar_props.transitive {
            return Err(violation(
                "G acts transitively on the quotient decomposition of each orbit",
                format!("orbit {i}: invariant {}, transitive {}", bar_props.invariant, bar_props.transitive),
                json!({ "orbit": i }),
            ));
        }
        let exponent = match props.m {
            Some(mm) if props.homogeneous => {
                let l = integer_log(meet.num_blocks(), mm);
                if l != Some(xi.len() as u32) {
                    return Err(violation(
                        "|Ω_i| = m^ℓ_i for homogeneous decompositions",
                        format!("orbit {i} has {} blocks, m = {mm}, ℓ_i = {}", meet.num_blocks(), xi.len()),
                        json!({ "orbit": i, "blocks": meet.num_blocks(), "m": mm, "parts": xi.len() }),
                    ));
                }
                l
            }
            _ => None,
        };
        orbits.push(OrbitReport {
            parts: xi.clone(),
            blocks: meet.num_blocks(),
            exponent,
            k_order: ki.order(),
            quotient_group_order: gq.order(),
            quotient_plinth_order: mq.order(),
            classification: None,
        });
        quotients.push(QuotientAction {
            parts: xi.clone(),
            omega: meet.block_of(omega) as Point,
            partition: meet,
            g: gq,
            m: mq,
            decomposition: bar,
        });
        k_groups.push(ki);
    }

    let meets: Vec<Partition> = quotients.iter().map(|q| q.partition.clone()).collect();
    let cart = is_cartesian_decomposition(&meets)?;
    if !cart.holds {
        return Err(violation(
            "the quotient partitions form a Cartesian decomposition",
            cart.reason.unwrap_or_default(),
            json!({ "selection": cart.selection, "meet_size": cart.meet_size }),
        ));
    }
    let quotient_system = CartesianSystem {
        m: m.clone(),
        omega,
        members: k_groups.clone(),
    };
    let qcheck = verify_cartesian_system(&quotient_system, &space)?;
    if !qcheck.holds {
        return Err(violation(
            "the K_i form the Cartesian system of the quotient decomposition",
            qcheck.violation.unwrap_or_default(),
            json!({ "member_orders": qcheck.member_orders }),
        ));
    }

    let (simple_factors, factor_order) = match space.factorisation() {
        Some(d) => (d.num_factors(), d.factor_order(0)),
        None => (0, 0),
    };
    let factor_sets = match space.factorisation() {
        Some(d) => Some(factor_sets(d, &lifted)?.0),
        None => None,
    };
    let s = orbits.len();
    let report = AnalysisReport {
        schema: REPORT_SCHEMA,
        degree: g.degree(),
        group_order: g.order(),
        plinth_order: m.order(),
        omega,
        simple_factors,
        factor_order,
        index: e.index(),
        homogeneous: props.homogeneous,
        m: props.m,
        s,
        degenerate_quotient: s == 1,
        orbits,
        factor_sets,
        factorisation: None,
        verdicts: Vec::new(),
        orbit_bound: None,
        centralizer: None,
        notes: Vec::new(),
    };
    Ok(Analysis {
        report,
        space,
        system,
        k: k_groups,
        quotients,
        properties: props,
    })
}

/// `F_c` for every factor, with the distinct proper projections of `F_0`.
fn factor_sets(d: &DirectFactorisation, members: &[Group]) -> Result<(FactorSets, Vec<Group>, Vec<bool>)> {
    let mut sizes = Vec::new();
    let mut order_sets: Vec<Vec<u128>> = Vec::new();
    let mut first: Vec<(usize, Group)> = Vec::new();
    let mut subdirect = vec![true; members.len()];
    for c in 0..d.num_factors() {
        let t = d.factor_order(c);
        let mut fc: Vec<(usize, Group)> = Vec::new();
        for (j, kj) in members.iter().enumerate() {
            let p = d.projection(&[c], kj)?;
            if p.order() < t {
                subdirect[j] = false;
                if !fc.iter().any(|(_, q)| q.same_as(&p)) {
                    fc.push((j, p));
                }
            }
        }
        sizes.push(fc.len());
        let mut orders: Vec<u128> = fc.iter().map(|(_, p)| p.order()).collect();
        orders.sort_unstable();
        order_sets.push(orders);
        if c == 0 {
            first = fc;
        }
    }
    if let Some(c) = (1..sizes.len()).find(|&c| order_sets[c] != order_sets[0]) {
        return Err(violation(
            "the sets F_i agree up to G_ω-conjugacy for all factors",
            format!("F_0 has orders {:?}, F_{c} has orders {:?}", order_sets[0], order_sets[c]),
            json!({ "factor": c, "sizes": sizes, "orders": order_sets }),
        ));
    }
    let sets = FactorSets {
        sizes,
        orders: order_sets[0].clone(),
        members: first.iter().map(|(j, _)| *j).collect(),
    };
    Ok((sets, first.into_iter().map(|(_, p)| p).collect(), subdirect))
}

fn conjugacy_evidence(
    space: &SubgroupSpace,
    g: &Group,
    omega: Point,
    a: &Group,
    b: &Group,
    limits: &Limits,
) -> Result<ConjugacyEvidence> {
    let stab = space.lift(&point_stabilizer(g, omega)?)?;
    Ok(match conjugating_element(&stab, a, b, limits) {
        Ok(Some(x)) => ConjugacyEvidence {
            conjugate: Some(true),
            element: Some(x),
            detail: format!("conjugating element found in G_ω (order {})", stab.order()),
        },
        Ok(None) => ConjugacyEvidence {
            conjugate: Some(false),
            element: None,
            detail: format!("exhaustive search of G_ω (order {}) found no conjugating element", stab.order()),
        },
        Err(Error::Limit(r)) => ConjugacyEvidence {
            conjugate: None,
            element: None,
            detail: r,
        },
        Err(err) => return Err(err),
    })
}

fn classify_in(
    space: &SubgroupSpace,
    g: &Group,
    omega: Point,
    e: &CartesianDecomposition,
    limits: &Limits,
) -> Result<Classification> {
    let d = space
        .factorisation()
        .ok_or_else(|| Error::input("class labels need a non-abelian plinth"))?;
    let system = system_from_decomposition(space.plinth(), omega, e)?;
    let members = system.members.iter().map(|k| space.lift(k)).collect::<Result<Vec<_>>>()?;
    let (sets, f0, subdirect) = factor_sets(d, &members)?;
    let strips = members
        .iter()
        .map(|k| Ok(d.strips_involved(k)?.iter().map(|s| s.summary()).collect()))
        .collect::<Result<Vec<Vec<StripSummary>>>>()?;
    let mut conjugacy = None;
    let label = match f0.len() {
        0 => ClassLabel::CdS,
        1 if strips.iter().any(|s| !s.is_empty()) => ClassLabel::Cd1S,
        1 => ClassLabel::Cd1,
        2 => {
            let ev = conjugacy_evidence(space, g, omega, &f0[0], &f0[1], limits)?;
            let label = match ev.conjugate {
                Some(true) => ClassLabel::Cd2Sim,
                Some(false) => ClassLabel::Cd2NSim,
                None => ClassLabel::Undecided(ev.detail.clone()),
            };
            conjugacy = Some(ev);
            label
        }
        3 => ClassLabel::Cd3,
        n => {
            return Err(violation(
                "a transitive decomposition has at most three proper projections per factor",
                format!("F_0 has {n} elements"),
                json!({ "sizes": sets.sizes, "orders": sets.orders }),
            ))
        }
    };
    Ok(Classification {
        label,
        index: e.index(),
        factor_sets: sets,
        subdirect,
        strips,
        conjugacy,
    })
}

/// The class label of a decomposition on which `G` is transitive.
pub fn six_class_classify(
    g: &Group,
    m: &Group,
    omega: Point,
    e: &CartesianDecomposition,
    limits: &Limits,
) -> Result<Classification> {
    let props = check_inputs(g, m, e)?;
    g.check_point(omega)?;
    if !props.transitive {
        return Err(Error::input(format!(
            "G has {} orbits on the decomposition; classification needs a transitive one",
            props.orbits.len()
        )));
    }
    if !m.is_transitive() {
        return Err(Error::input("the plinth must be transitive"));
    }
    let space = SubgroupSpace::new(m, g, limits.clone())?;
    classify_in(&space, g, omega, e, limits)
}

/// Orbit count of `G` on a homogeneous invariant decomposition; at most two
/// when `G` is innately transitive. With `m` given, it must be a transitive
/// minimal normal subgroup; otherwise innate transitivity is searched for.
pub fn theorem_a_check(
    g: &Group,
    e: &CartesianDecomposition,
    m: Option<&Group>,
    limits: &Limits,
) -> Result<OrbitBound> {
    if e.degree() != g.degree() {
        return Err(Error::input("group and decomposition have different degrees"));
    }
    let props = decomposition_properties(e, g)?;
    if let Some(i) = props.violating_generator {
        return Err(Error::input(format!(
            "the decomposition is not G-invariant: generator {i} maps a partition outside it"
        )));
    }
    if !props.homogeneous {
        return Err(Error::input("the orbit bound concerns homogeneous decompositions"));
    }
    let innate = match m {
        Some(m) => m.is_transitive() && is_minimal_normal(g, m, limits)?,
        None => !is_innately_transitive(g, limits)?.is_empty(),
    };
    let orbits = props.orbits.len();
    let status = if !innate {
        Status::NotApplicable
    } else if orbits <= 2 {
        Status::Holds
    } else {
        return Err(violation(
            "an innately transitive group has at most two orbits on a homogeneous invariant decomposition",
            format!("{orbits} orbits"),
            json!({ "orbits": props.orbits }),
        ));
    };
    Ok(OrbitBound {
        orbits,
        innately_transitive: innate,
        status,
    })
}

/// Trivial centraliser (and, for full strip factorisations, quasiprimitivity
/// of type Pa) for the atlas-scale rows where it is predicted.
pub fn verify_centralizer_claims(
    g: &Group,
    m: &Group,
    omega: Point,
    report: &AnalysisReport,
    limits: &Limits,
) -> Result<CentralizerClaims> {
    let gens = m.reduced_generators();
    if gens.iter().all(|a| gens.iter().all(|b| a.commutes_with(b))) {
        return Err(Error::input("the plinth must be non-abelian"));
    }
    let skipped = |detail: &str| CentralizerClaims {
        status: Status::NotApplicable,
        row: None,
        centralizer_order: None,
        quasiprimitive: None,
        type_pa: None,
        detail: detail.to_string(),
    };
    let Some(cert) = report.factorisation.as_ref().filter(|c| c.holds) else {
        return Ok(skipped("no certified factorisation of the plinth"));
    };
    let early_row = |key: &str, table: u8| {
        Catalog::builtin()
            .row(key)
            .filter(|r| r.table == table && r.row <= 3)
            .map(|r| r.key.clone())
    };
    let (row, strip_case) = match cert.kind {
        FactorisationKind::FullStrip => match cert.matched_row.as_deref().and_then(|k| early_row(k, 3)) {
            Some(r) => (r, true),
            None => return Ok(skipped("full strip factorisation outside the atlas-scale rows")),
        },
        FactorisationKind::Full if report.homogeneous => {
            let orders: Vec<u128> = cert.projection_orders.iter().map(|p| p[0]).collect();
            let hit = Catalog::builtin()
                .match_orders(&[4], report.factor_order, &orders)
                .into_iter()
                .find(|r| r.row <= 3)
                .map(|r| r.key.clone());
            match hit {
                Some(r) => (r, false),
                None => return Ok(skipped("homogeneous case outside the atlas-scale rows")),
            }
        }
        _ => return Ok(skipped("the centraliser is only predicted for full strip or homogeneous cases")),
    };
    let c = centralizer_in_sym(m, omega)?;
    if c.order() != 1 {
        return Err(violation(
            "the centraliser of the plinth in the symmetric group is trivial",
            format!("centraliser of order {} for row {row}", c.order()),
            json!({ "row": row, "centralizer_order": c.order(), "generators": c.generators() }),
        ));
    }
    let d = DirectFactorisation::new(m, g)?;
    let q = quasiprimitive_verdict(g, m, &d, omega, limits)?;
    if strip_case && !q.type_pa {
        return Err(violation(
            "the group is quasiprimitive of type Pa",
            "the point stabiliser in the plinth is trivial or subdirect",
            json!({ "row": row, "verdict": q }),
        ));
    }
    Ok(CentralizerClaims {
        status: Status::Holds,
        detail: format!("trivial centraliser for row {row}"),
        row: Some(row),
        centralizer_order: Some(1),
        quasiprimitive: Some(q.quasiprimitive),
        type_pa: Some(q.type_pa),
    })
}

/// Labels every quotient, certifies the factorisation the labels predict,
/// and records one verdict per claim. A failed claim is returned as a
/// theorem violation carrying the report.
pub fn theorem_main_report(
    g: &Group,
    m: &Group,
    omega: Point,
    e: &CartesianDecomposition,
    limits: &Limits,
) -> Result<AnalysisReport> {
    let analysis = quotient_analysis(g, m, omega, e, limits)?;
    let Analysis {
        mut report,
        space,
        k,
        quotients,
        ..
    } = analysis;
    let d = space
        .factorisation()
        .ok_or_else(|| Error::input("the plinth must be non-abelian"))?;
    for (o, q) in report.orbits.iter_mut().zip(&quotients) {
        let qspace = SubgroupSpace::new(&q.m, &q.g, limits.clone())?;
        o.classification = Some(classify_in(&qspace, &q.g, q.omega, &q.decomposition, limits)?);
    }
    let labels = report.labels();
    let shown = labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ");
    let s = report.s;
    let mut verdicts = Vec::new();
    verdicts.push(Verdict::check("orbit-count", s <= 3, format!("s = {s}")));

    let kl = k.iter().map(|x| space.lift(x)).collect::<Result<Vec<_>>>()?;
    let undecided = labels.iter().any(|l| matches!(l, ClassLabel::Undecided(_)));
    let count = |l: &ClassLabel| labels.iter().filter(|x| *x == l).count();

    if s == 1 {
        for clause in ["subdirect-orbit", "nonconjugate-pair", "excluded-classes", "homogeneous", "three-orbits"] {
            verdicts.push(Verdict::new(clause, Status::NotApplicable, "G is transitive on the decomposition"));
        }
    } else {
        // Certificate for the plinth and the K_i.
        let cert = if s == 3 {
            Some(is_strong_multiple_factorisation(d, &kl, limits)?)
        } else if s == 2 {
            match labels.iter().position(|l| *l == ClassLabel::CdS) {
                Some(i) => {
                    let ambient = d.represent_group(g, None)?;
                    Some(is_full_strip_factorisation(d, &kl[i], &kl[1 - i], Some(&ambient), limits)?)
                }
                None => Some(is_full_factorisation(d, &kl[0], &kl[1], limits)?),
            }
        } else {
            None
        };
        let holds = |c: &Option<FactorisationCertificate>| c.as_ref().is_some_and(|c| c.holds);

        // Subdirect orbit: s = 2, a full strip factorisation, partner in CD_1.
        if count(&ClassLabel::CdS) > 0 {
            let partner_ok = s == 2 && count(&ClassLabel::CdS) == 1 && count(&ClassLabel::Cd1) == 1;
            let ok = partner_ok && holds(&cert);
            let reason = cert.as_ref().and_then(|c| c.reason.clone()).unwrap_or_default();
            verdicts.push(Verdict::check(
                "subdirect-orbit",
                ok,
                format!("labels [{shown}]; full strip factorisation {} {reason}", holds(&cert)).trim_end().to_string(),
            ));
        } else {
            verdicts.push(Verdict::new("subdirect-orbit", Status::NotApplicable, "no orbit in CD_S"));
        }

        // Non-conjugate pair: s = 2, partner CD_1 in its own quotient, and the
        // factor with the subgroups of F_0 listed in the three-part table.
        if count(&ClassLabel::Cd2NSim) > 0 {
            let sets = report.factor_sets.as_ref().expect("non-abelian plinth");
            let rows = Catalog::builtin().match_some_orders(&[2], report.factor_order, &sets.orders);
            let ok = s == 2 && count(&ClassLabel::Cd2NSim) == 1 && count(&ClassLabel::Cd1) == 1 && !rows.is_empty();
            verdicts.push(Verdict::check(
                "nonconjugate-pair",
                ok,
                format!(
                    "labels [{shown}]; F_0 orders {:?}; rows {:?}",
                    sets.orders,
                    rows.iter().map(|r| r.key.as_str()).collect::<Vec<_>>()
                ),
            ));
            report.notes.push(
                "the partner orbit's label is taken in the action on its own quotient partition".into(),
            );
        } else {
            verdicts.push(Verdict::new("nonconjugate-pair", Status::NotApplicable, "no orbit in CD_2nsim"));
        }

        let excluded = [ClassLabel::Cd1S, ClassLabel::Cd2Sim, ClassLabel::Cd3];
        let bad: Vec<String> = labels.iter().filter(|l| excluded.contains(l)).map(|l| l.to_string()).collect();
        verdicts.push(if !bad.is_empty() {
            Verdict::check("excluded-classes", false, format!("labels {bad:?} occur"))
        } else if undecided {
            Verdict::new("excluded-classes", Status::Undecided, "a conjugacy search was cut off")
        } else {
            Verdict::check("excluded-classes", true, "no orbit in CD_1S, CD_2sim or CD_3")
        });

        if report.homogeneous {
            let ok = s == 2 && count(&ClassLabel::Cd1) == 2 && holds(&cert);
            verdicts.push(Verdict::check(
                "homogeneous",
                ok,
                format!("s = {s}, labels [{shown}], full factorisation {}", holds(&cert)),
            ));
        } else {
            verdicts.push(Verdict::new("homogeneous", Status::NotApplicable, "the decomposition is inhomogeneous"));
        }

        if s == 3 {
            let row = cert.as_ref().and_then(|c| c.matched_row.clone());
            let ok = count(&ClassLabel::Cd1) == 3 && holds(&cert) && row.is_some();
            verdicts.push(Verdict::check(
                "three-orbits",
                ok,
                format!(
                    "labels [{shown}], strong multiple factorisation {}, row {}",
                    holds(&cert),
                    row.as_deref().unwrap_or("none")
                ),
            ));
        } else {
            verdicts.push(Verdict::new("three-orbits", Status::NotApplicable, format!("s = {s}")));
        }
        report.factorisation = cert;
    }
    if undecided {
        for v in verdicts.iter_mut().filter(|v| v.status == Status::Fails) {
            v.status = Status::Undecided;
        }
    }
    report.verdicts = verdicts;
    if report.homogeneous {
        report.orbit_bound = Some(theorem_a_check(g, e, Some(m), limits)?);
    }
    if s >= 2 {
        report.centralizer = Some(verify_centralizer_claims(g, m, omega, &report, limits)?);
    }
    if let Some(v) = report.verdicts.iter().find(|v| v.status == Status::Fails) {
        return Err(violation(
            &v.clause,
            v.detail.clone(),
            serde_json::to_value(&report).unwrap_or(serde_json::Value::Null),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_full_fact_example, build_m10_example, build_strip_example};
    use crate::partition::grid;

    #[test]
    fn integer_logs() {
        assert_eq!(integer_log(36, 6), Some(2));
        assert_eq!(integer_log(1, 6), Some(0));
        assert_eq!(integer_log(12, 6), None);
    }

    #[test]
    fn full_factorisation_example() {
        let inst = build_full_fact_example("A6", 1, &Limits::default()).unwrap();
        let r = theorem_main_report(&inst.g, &inst.m, inst.omega, &inst.decomposition, &Limits::default()).unwrap();
        assert_eq!(r.s, 2);
        assert_eq!(r.labels(), [ClassLabel::Cd1, ClassLabel::Cd1]);
        assert!(r.orbits.iter().all(|o| o.blocks == 6 && o.k_order == 60));
        let cert = r.factorisation.as_ref().unwrap();
        assert!(cert.holds);
        assert_eq!(cert.kind, FactorisationKind::Full);
        assert_eq!(cert.matched_row.as_deref(), Some("T1R1"));
        assert_eq!(r.verdict("homogeneous").unwrap().status, Status::Holds);
        assert_eq!(r.orbit_bound.as_ref().unwrap().orbits, 2);
        let c = r.centralizer.as_ref().unwrap();
        assert_eq!((c.status, c.row.as_deref()), (Status::Holds, Some("T4R1")));
    }

    #[test]
    fn strip_example() {
        let inst = build_strip_example("A6", 2, &Limits::default()).unwrap();
        let r = theorem_main_report(&inst.g, &inst.m, inst.omega, &inst.decomposition, &Limits::default()).unwrap();
        assert_eq!(r.labels(), [ClassLabel::CdS, ClassLabel::Cd1]);
        assert_eq!(r.orbits.iter().map(|o| o.blocks).collect::<Vec<_>>(), [360, 36]);
        let cert = r.factorisation.as_ref().unwrap();
        assert!(cert.holds && cert.kind == FactorisationKind::FullStrip);
        assert!(cert.strips.iter().all(|s| s.support.len() == 2));
        assert!(cert.caveats.is_empty());
        let c = r.centralizer.as_ref().unwrap();
        assert_eq!((c.centralizer_order, c.type_pa), (Some(1), Some(true)));
    }

    #[test]
    fn m10_is_conjugate_pair() {
        let inst = build_m10_example(&Limits::default()).unwrap();
        let c = six_class_classify(&inst.g, &inst.m, inst.omega, &inst.decomposition, &Limits::default()).unwrap();
        assert_eq!(c.label, ClassLabel::Cd2Sim);
        assert_eq!(c.factor_sets.orders, [60, 60]);
        assert!(c.conjugacy.unwrap().element.is_some());
    }

    #[test]
    fn transitive_grid_is_degenerate() {
        let s6 = Group::symmetric(6);
        let a6 = Group::alternating(6);
        let lift = |x: &Perm, row: bool| {
            let img: Vec<Point> = (0..36u32)
                .map(|p| {
                    let (r, c) = (p / 6, p % 6);
                    if row { x.apply(r) * 6 + c } else { r * 6 + x.apply(c) }
                })
                .collect();
            Perm::from_images(img).unwrap()
        };
        let swap = Perm::from_images((0..36u32).map(|p| (p % 6) * 6 + p / 6).collect()).unwrap();
        let mut gens: Vec<Perm> = s6.generators().iter().map(|x| lift(x, true)).collect();
        gens.push(swap);
        let g = Group::new(36, gens).unwrap();
        let mgens: Vec<Perm> = a6
            .generators()
            .iter()
            .flat_map(|x| [lift(x, true), lift(x, false)])
            .collect();
        let m = Group::new(36, mgens).unwrap();
        let r = theorem_main_report(&g, &m, 0, &grid(6, 6), &Limits::default()).unwrap();
        assert_eq!(r.s, 1);
        assert!(r.degenerate_quotient);
        assert_eq!(r.orbits[0].blocks, 36);
        assert_eq!(r.labels(), [ClassLabel::Cd1]);
    }

    #[test]
    fn non_invariant_decomposition_names_generator() {
        let g = Group::symmetric(36);
        let err = quotient_analysis(&g, &g, 0, &grid(6, 6), &Limits::default()).err().expect("rejected");
        assert!(matches!(err, Error::Input(ref s) if s.contains("generator")), "{err}");
    }
}
