//! Shipped permutation data: groups, designated subgroups, and permutations
//! inducing outer automorphisms.
//!
//! Every entry is re-certified when loaded: group and subgroup orders,
//! catalog order formulas, orbit structure, and each automorphism through
//! [`GroupMorphism`]. A SHA-256 manifest guards the files themselves. The
//! programs that produced the data live in the test suite and re-derive it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{conjugating_element, point_stabilizer};
use crate::backtrack::Limits;
use crate::catalog::evaluate;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::morphism::GroupMorphism;
use crate::perm::{Perm, Point};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgroupData {
    pub order: u128,
    pub generators: Vec<Perm>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomorphismData {
    /// A permutation of the same points normalising the group.
    pub perm: Perm,
    #[serde(default)]
    pub swaps_orbits: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtlasFile {
    pub name: String,
    pub degree: usize,
    pub order: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog_order: Option<String>,
    pub generators: Vec<Perm>,
    /// Sorted orbit lengths.
    pub orbit_sizes: Vec<usize>,
    /// The two orbits carry inequivalent actions.
    #[serde(default)]
    pub two_actions: bool,
    #[serde(default)]
    pub subgroups: BTreeMap<String, SubgroupData>,
    #[serde(default)]
    pub automorphisms: BTreeMap<String, AutomorphismData>,
    pub provenance: String,
}

#[derive(Clone, Debug)]
pub struct AtlasEntry {
    pub name: String,
    pub group: Group,
    pub subgroups: BTreeMap<String, Group>,
    pub automorphisms: BTreeMap<String, Perm>,
    pub provenance: String,
}

impl AtlasEntry {
    pub fn subgroup(&self, name: &str) -> Result<&Group> {
        self.subgroups
            .get(name)
            .ok_or_else(|| Error::input(format!("{} has no designated subgroup {name}", self.name)))
    }

    pub fn automorphism(&self, name: &str) -> Result<&Perm> {
        self.automorphisms
            .get(name)
            .ok_or_else(|| Error::input(format!("{} has no designated automorphism {name}", self.name)))
    }
}

fn corrupt(entry: &str, reason: impl Into<String>) -> Error {
    Error::DataCorruption {
        entry: entry.to_string(),
        reason: reason.into(),
    }
}

fn check_degree(entry: &str, degree: usize, perms: &[Perm]) -> Result<()> {
    if perms.iter().any(|p| p.degree() != degree) {
        return Err(corrupt(entry, "permutation of the wrong degree"));
    }
    Ok(())
}

impl AtlasFile {
    pub fn parse(text: &str) -> Result<AtlasFile> {
        Ok(serde_json::from_str(text)?)
    }

    /// Re-certifies the data and builds the entry.
    pub fn certify(&self) -> Result<AtlasEntry> {
        let name = self.name.as_str();
        check_degree(name, self.degree, &self.generators)?;
        let group = Group::new(self.degree, self.generators.clone())?;
        if group.order() != self.order {
            return Err(corrupt(name, format!("order {} but {} recorded", group.order(), self.order)));
        }
        if let Some(expr) = &self.catalog_order {
            let v = evaluate(expr, &BTreeMap::new())?;
            if v != [self.order] {
                return Err(corrupt(name, format!("catalog formula {expr} disagrees with the order")));
            }
        }
        let orbits = group.orbits();
        let mut sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
        sizes.sort_unstable();
        if sizes != self.orbit_sizes {
            return Err(corrupt(name, format!("orbit lengths {sizes:?}, recorded {:?}", self.orbit_sizes)));
        }
        if self.two_actions {
            if orbits.len() != 2 {
                return Err(corrupt(name, "a two-action entry needs two orbits"));
            }
            let a = point_stabilizer(&group, orbits[0][0])?;
            let b = point_stabilizer(&group, orbits[1][0])?;
            if conjugating_element(&group, &a, &b, &Limits::default())?.is_some() {
                return Err(corrupt(name, "the two orbits carry equivalent actions"));
            }
        }
        let mut subgroups = BTreeMap::new();
        for (sname, s) in &self.subgroups {
            check_degree(name, self.degree, &s.generators)?;
            let h = Group::new(self.degree, s.generators.clone())?;
            if h.order() != s.order {
                return Err(corrupt(name, format!("subgroup {sname} has order {}, recorded {}", h.order(), s.order)));
            }
            if !h.is_subgroup_of(&group) {
                return Err(corrupt(name, format!("subgroup {sname} is not contained in the group")));
            }
            subgroups.insert(sname.clone(), h);
        }
        let mut automorphisms = BTreeMap::new();
        for (aname, a) in &self.automorphisms {
            check_degree(name, self.degree, std::slice::from_ref(&a.perm))?;
            let images: Vec<Perm> = group.generators().iter().map(|g| g.conjugate(&a.perm)).collect();
            if images.iter().any(|x| !group.contains(x)) {
                return Err(corrupt(name, format!("{aname} does not normalise the group")));
            }
            let phi = GroupMorphism::new(&group, &group, images)?;
            if !phi.is_automorphism()? {
                return Err(corrupt(name, format!("{aname} does not induce an automorphism")));
            }
            let swaps = orbits.len() == 2 && orbits[1].contains(&a.perm.apply(orbits[0][0]));
            if swaps != a.swaps_orbits {
                return Err(corrupt(name, format!("{aname}: orbit behaviour differs from the record")));
            }
            automorphisms.insert(aname.clone(), a.perm.clone());
        }
        Ok(AtlasEntry {
            name: self.name.clone(),
            group,
            subgroups,
            automorphisms,
            provenance: self.provenance.clone(),
        })
    }
}

pub const MANIFEST: &str = include_str!("../data/atlas/manifest.json");

/// Shipped files, by file name.
pub const FILES: &[(&str, &str)] = &[
    ("A5.json", include_str!("../data/atlas/A5.json")),
    ("A6.json", include_str!("../data/atlas/A6.json")),
    ("A6-two-actions.json", include_str!("../data/atlas/A6-two-actions.json")),
    ("M11.json", include_str!("../data/atlas/M11.json")),
    ("M12.json", include_str!("../data/atlas/M12.json")),
    ("M12-two-actions.json", include_str!("../data/atlas/M12-two-actions.json")),
    ("PSL2(11).json", include_str!("../data/atlas/PSL2(11).json")),
    ("S6wrS2-36.json", include_str!("../data/atlas/S6wrS2-36.json")),
    ("Sp6(2).json", include_str!("../data/atlas/Sp6(2).json")),
];

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Checks `files` against a manifest mapping file names to SHA-256 digests.
pub fn verify_manifest(manifest: &str, files: &[(&str, &str)]) -> Result<()> {
    let digests: BTreeMap<String, String> = serde_json::from_str(manifest)?;
    if digests.len() != files.len() {
        return Err(corrupt("manifest", "file count differs from the manifest"));
    }
    for (fname, text) in files {
        let want = digests
            .get(*fname)
            .ok_or_else(|| corrupt("manifest", format!("{fname} is not listed")))?;
        if *want != sha256_hex(text) {
            return Err(corrupt(fname, "checksum mismatch"));
        }
    }
    Ok(())
}

pub fn names() -> Vec<&'static str> {
    FILES.iter().map(|(f, _)| f.trim_end_matches(".json")).collect()
}

pub fn atlas_load(name: &str) -> Result<AtlasEntry> {
    verify_manifest(MANIFEST, FILES)?;
    let file = format!("{name}.json");
    let text = FILES
        .iter()
        .find(|(f, _)| *f == file)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::input(format!("unknown atlas entry {name}; known: {}", names().join(", "))))?;
    let data = AtlasFile::parse(text).map_err(|e| corrupt(name, e.to_string()))?;
    if data.name != name {
        return Err(corrupt(name, "entry name differs from its file"));
    }
    data.certify()
}

/// Point stabilisers of the first points of the two orbits of a two-action
/// entry, in orbit order.
pub fn orbit_stabilizers(entry: &AtlasEntry) -> Result<(Group, Group, Point, Point)> {
    let orbits = entry.group.orbits();
    if orbits.len() != 2 {
        return Err(Error::input(format!("{} does not have two orbits", entry.name)));
    }
    let (p, q) = (orbits[0][0], orbits[1][0]);
    Ok((point_stabilizer(&entry.group, p)?, point_stabilizer(&entry.group, q)?, p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_certifies() {
        let orders: Vec<(&str, u128)> = names().iter().map(|n| (*n, atlas_load(n).unwrap().group.order())).collect();
        let want = [
            ("A5", 60),
            ("A6", 360),
            ("A6-two-actions", 360),
            ("M11", 7920),
            ("M12", 95040),
            ("M12-two-actions", 95040),
            ("PSL2(11)", 660),
            ("S6wrS2-36", 1_036_800),
            ("Sp6(2)", 1_451_520),
        ];
        assert_eq!(orders, want);
        let m = atlas_load("M12-two-actions").unwrap();
        assert_eq!(m.group.orbits().iter().map(|o| o.len()).collect::<Vec<_>>(), [12, 12]);
    }

    #[test]
    fn unknown_name_is_input_error() {
        assert!(matches!(atlas_load("M24"), Err(Error::Input(_))));
    }

    #[test]
    fn tampering_is_detected() {
        let mut files: Vec<(&str, String)> = FILES.iter().map(|(f, t)| (*f, t.to_string())).collect();
        files[0].1 = files[0].1.replace("60", "61");
        let refs: Vec<(&str, &str)> = files.iter().map(|(f, t)| (*f, t.as_str())).collect();
        assert!(matches!(verify_manifest(MANIFEST, &refs), Err(Error::DataCorruption { .. })));

        // A wrong recorded order fails certification even with a fresh digest.
        let mut a6 = AtlasFile::parse(FILES[1].1).unwrap();
        a6.order = 720;
        assert!(matches!(a6.certify(), Err(Error::DataCorruption { .. })));
        let mut a6 = AtlasFile::parse(FILES[1].1).unwrap();
        a6.subgroups.get_mut("A5").unwrap().generators.push(Perm::from_cycles(6, &[&[0, 1]]).unwrap());
        assert!(a6.certify().is_err());
    }

    #[test]
    fn two_action_automorphisms() {
        let e = atlas_load("A6-two-actions").unwrap();
        let tau = e.automorphism("tau").unwrap();
        let (a, b, p, q) = orbit_stabilizers(&e).unwrap();
        assert_eq!((p, q), (0, 6));
        assert!(a.conjugate(tau).same_as(&b) && b.conjugate(tau).same_as(&a));
        assert!(e.subgroup("A∩B").unwrap().contains(&tau.mul(tau)));
        let odd = e.automorphism("odd").unwrap();
        assert!(!e.group.contains(odd));
        assert!(a.conjugate(odd).same_as(&a) && b.conjugate(odd).same_as(&b));
    }
}
