pub mod algebra;
pub mod analysis;
pub mod atlas;
pub mod backtrack;
pub mod blocks;
pub mod catalog;
pub mod chain;
pub mod constructions;
pub mod coset;
pub mod error;
pub mod factorisation;
pub mod group;
pub mod io;
pub mod morphism;
pub mod normal;
pub mod partition;
pub mod perm;
pub mod primes;
pub mod suites;
pub mod product;
pub mod system;

pub use backtrack::Limits;
pub use error::{Error, Result};
pub use group::Group;
pub use perm::{Perm, Point};
