//! File formats: groups, partitions, decompositions, morphisms and systems,
//! all JSON. Parsing rejects trailing input and malformed permutations.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atlas::atlas_load;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::morphism::GroupMorphism;
use crate::partition::{CartesianDecomposition, Partition};
use crate::perm::{Perm, Point};
use crate::system::CartesianSystem;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub degree: usize,
    pub generators: Vec<Perm>,
    /// Generators of a transitive minimal normal subgroup, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plinth: Option<Vec<Perm>>,
}

fn check_degree(degree: usize, perms: &[Perm], what: &str) -> Result<()> {
    if let Some(p) = perms.iter().find(|p| p.degree() != degree) {
        return Err(Error::input(format!(
            "{what} of degree {} in a file of degree {degree}",
            p.degree()
        )));
    }
    Ok(())
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<GroupFile> {
        let f: GroupFile = serde_json::from_str(text)?;
        check_degree(f.degree, &f.generators, "generator")?;
        if let Some(p) = &f.plinth {
            check_degree(f.degree, p, "plinth generator")?;
        }
        Ok(f)
    }

    pub fn from_group(name: Option<&str>, g: &Group, plinth: Option<&Group>) -> GroupFile {
        GroupFile {
            name: name.map(str::to_string),
            degree: g.degree(),
            generators: g.generators().to_vec(),
            plinth: plinth.map(|m| m.generators().to_vec()),
        }
    }

    pub fn group(&self) -> Result<Group> {
        Group::new(self.degree, self.generators.clone())
    }

    pub fn plinth_group(&self) -> Result<Option<Group>> {
        self.plinth.as_ref().map(|p| Group::new(self.degree, p.clone())).transpose()
    }
}

pub fn parse_partition(text: &str) -> Result<Partition> {
    Ok(serde_json::from_str(text)?)
}

/// A list of partitions, each a list of blocks; they must form a Cartesian
/// decomposition.
pub fn parse_decomposition(text: &str) -> Result<CartesianDecomposition> {
    let parts: Vec<Partition> = serde_json::from_str(text)?;
    CartesianDecomposition::new(parts)
}

/// Canonical form: partitions sorted, each listing its blocks in order of
/// their least points.
pub fn decomposition_json(e: &CartesianDecomposition) -> String {
    to_json(&e.canonical())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismFile {
    pub source: String,
    pub target: String,
    pub generator_images: Vec<Perm>,
}

/// A morphism between atlas groups, given by the images of the source's
/// generators.
pub fn parse_morphism(text: &str) -> Result<GroupMorphism> {
    let f: MorphismFile = serde_json::from_str(text)?;
    let source = atlas_load(&f.source)?;
    let target = atlas_load(&f.target)?;
    GroupMorphism::new(&source.group, &target.group, f.generator_images)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub omega: Point,
    pub members: Vec<Vec<Perm>>,
}

impl SystemFile {
    pub fn from_system(s: &CartesianSystem) -> SystemFile {
        SystemFile {
            omega: s.omega,
            members: s.members.iter().map(|k| k.generators().to_vec()).collect(),
        }
    }

    pub fn system(&self, m: &Group) -> Result<CartesianSystem> {
        let members = self
            .members
            .iter()
            .map(|gens| {
                check_degree(m.degree(), gens, "member generator")?;
                Group::new(m.degree(), gens.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CartesianSystem {
            m: m.clone(),
            omega: self.omega,
            members,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable value");
    s.push('\n');
    s
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::grid;

    #[test]
    fn group_file_roundtrip() {
        let g = Group::alternating(5);
        let text = to_json(&GroupFile::from_group(Some("A5"), &g, Some(&g)));
        let f = GroupFile::parse(&text).unwrap();
        assert!(f.group().unwrap().same_as(&g));
        assert_eq!(f.plinth_group().unwrap().unwrap().order(), 60);
    }

    #[test]
    fn rejects_garbage_and_bad_bijections() {
        assert!(GroupFile::parse(r#"{"degree": 3, "generators": [[1, 2, 0]]} x"#).is_err());
        assert!(GroupFile::parse(r#"{"degree": 3, "generators": [[1, 1, 0]]}"#).is_err());
        assert!(GroupFile::parse(r#"{"degree": 3, "generators": [[1, 0]]}"#).is_err());
        assert!(GroupFile::parse(r#"{"degree": 2, "generators": [], "colour": 1}"#).is_err());
        assert!(parse_partition("[[0, 1], [1, 2]]").is_err());
        assert!(parse_decomposition("[[[0, 1], [2, 3]], [[0, 1], [2, 3]]]").is_err());
    }

    #[test]
    fn decomposition_roundtrip() {
        let e = grid(2, 3);
        let back = parse_decomposition(&decomposition_json(&e)).unwrap();
        assert_eq!(back, e.canonical());
    }

    #[test]
    fn morphism_file() {
        let a5 = atlas_load("A5").unwrap();
        let text = serde_json::json!({
            "source": "A5",
            "target": "A5",
            "generator_images": a5.group.generators(),
        })
        .to_string();
        assert!(parse_morphism(&text).unwrap().is_automorphism().unwrap());
    }
}
