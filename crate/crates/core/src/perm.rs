//! Permutations of `{0, .., n-1}` acting on the right.
//!
//! The image of point `p` under `g` is written `p^g`; products compose left to
//! right, so `p^(g*h) = (p^g)^h`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = u32;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Point>", try_from = "Vec<Point>")]
pub struct Perm {
    images: Vec<Point>,
}

impl TryFrom<Vec<Point>> for Perm {
    type Error = Error;

    fn try_from(images: Vec<Point>) -> Result<Self> {
        Perm::from_images(images)
    }
}

impl From<Perm> for Vec<Point> {
    fn from(p: Perm) -> Self {
        p.images
    }
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as Point).collect(),
        }
    }

    /// Builds a permutation from its image sequence, rejecting anything that is
    /// not a bijection of `{0, .., len-1}`.
    pub fn from_images(images: Vec<Point>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for (i, &p) in images.iter().enumerate() {
            let p = p as usize;
            if p >= n {
                return Err(Error::input(format!(
                    "image {p} of point {i} out of range for degree {n}"
                )));
            }
            if seen[p] {
                return Err(Error::input(format!("point {p} is hit twice")));
            }
            seen[p] = true;
        }
        Ok(Perm { images })
    }

    /// Parses disjoint cycles (0-based) such as `[[0, 1, 2], [3, 4]]`.
    pub fn from_cycles(degree: usize, cycles: &[&[Point]]) -> Result<Self> {
        let mut images: Vec<Point> = (0..degree as Point).collect();
        let mut touched = vec![false; degree];
        for cyc in cycles {
            for (i, &p) in cyc.iter().enumerate() {
                let q = cyc[(i + 1) % cyc.len()];
                if p as usize >= degree || q as usize >= degree {
                    return Err(Error::input(format!("cycle point out of range for degree {degree}")));
                }
                if touched[p as usize] {
                    return Err(Error::input(format!("point {p} appears in two cycles")));
                }
                touched[p as usize] = true;
                images[p as usize] = q;
            }
        }
        Perm::from_images(images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        self.images[p as usize]
    }

    pub fn images(&self) -> &[Point] {
        &self.images
    }

    pub fn into_images(self) -> Vec<Point> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i as Point == p)
    }

    /// `self * other`: apply `self` first.
    pub fn mul(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&p| other.images[p as usize]).collect(),
        }
    }

    pub fn mul_assign(&mut self, other: &Perm) {
        for p in self.images.iter_mut() {
            *p = other.images[*p as usize];
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as Point;
        }
        Perm { images: inv }
    }

    /// `self^other = other^-1 * self * other`.
    pub fn conjugate(&self, other: &Perm) -> Perm {
        // p^(o^-1 s o): if p = q^o then p maps to (q^s)^o.
        let mut images = vec![0; self.degree()];
        for q in 0..self.degree() {
            images[other.images[q] as usize] = other.images[self.images[q] as usize];
        }
        Perm { images }
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &p)| other.images[p as usize] == self.images[other.images[i] as usize])
    }

    pub fn pow(&self, mut e: u64) -> Perm {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn cycles(&self) -> Vec<Vec<Point>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start as Point];
            seen[start] = true;
            let mut p = self.images[start];
            while p as usize != start {
                seen[p as usize] = true;
                cyc.push(p);
                p = self.images[p as usize];
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    /// Smallest point moved, if any.
    pub fn first_moved(&self) -> Option<Point> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &p)| *i as Point != p)
            .map(|(i, _)| i as Point)
    }

    /// Places `self` on `0..degree` and `other` on `degree..degree+other.degree`.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let off = self.degree() as Point;
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&p| p + off));
        Perm { images }
    }

    /// Extends by fixed points up to `degree`.
    pub fn extend_to(&self, degree: usize) -> Perm {
        assert!(degree >= self.degree());
        let mut images = self.images.clone();
        images.extend(self.degree() as Point..degree as Point);
        Perm { images }
    }

    /// Shifts the permutation onto `offset..offset+degree` inside `total` points.
    pub fn embed(&self, offset: usize, total: usize) -> Perm {
        let mut images: Vec<Point> = (0..total as Point).collect();
        for (i, &p) in self.images.iter().enumerate() {
            images[offset + i] = p + offset as Point;
        }
        Perm { images }
    }

    /// Restricts to `offset..offset+len`, which must be invariant.
    pub fn restrict(&self, offset: usize, len: usize) -> Perm {
        Perm {
            images: self.images[offset..offset + len]
                .iter()
                .map(|&p| p - offset as Point)
                .collect(),
        }
    }

    pub fn fixes_set(&self, set: &[Point]) -> bool {
        let mut mark = vec![false; self.degree()];
        for &p in set {
            mark[p as usize] = true;
        }
        set.iter().all(|&p| mark[self.apply(p) as usize])
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_action_composition() {
        let a = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        // 0 -a-> 1 -b-> 2
        assert_eq!(a.mul(&b).apply(0), 2);
        assert_eq!(a.mul(&b).order(), 3);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_images(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn conjugate_matches_product() {
        let a = Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap();
        let b = Perm::from_cycles(5, &[&[2, 3, 4], &[0, 1]]).unwrap();
        assert_eq!(a.conjugate(&b), b.inverse().mul(&a).mul(&b));
        assert!(!a.commutes_with(&b));
    }

    #[test]
    fn power_and_parity() {
        let c = Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(c.pow(6), Perm::identity(6));
        assert!(!c.is_even());
        assert_eq!(c.order(), 6);
    }
}
