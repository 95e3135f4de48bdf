//! Stabiliser chains (bases and strong generating sets).
//!
//! Transversals are stored as Schreier vectors so that large degrees stay
//! affordable. Two builders are provided: the deterministic Schreier–Sims
//! algorithm, and a randomised variant that is only used when an exact upper
//! bound for the group order is already known. A randomised chain whose order
//! reaches that bound is complete, since distinct base images give distinct
//! group elements.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::{Perm, Point};

const NONE: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub point: Point,
    /// Indices into `StabChain::gens` of the strong generators used at this level.
    pub gens: Vec<usize>,
    pub orbit: Vec<Point>,
    /// `label[d]` is the generator index `s` with `d = parent^s`, `ROOT` for the base point.
    label: Vec<u32>,
}

impl Level {
    fn new(point: Point, degree: usize) -> Self {
        let mut label = vec![NONE; degree];
        label[point as usize] = ROOT;
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            label,
        }
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.label[p as usize] != NONE
    }
}

#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    pub(crate) gens: Vec<Perm>,
    inv: Vec<Perm>,
    pub(crate) levels: Vec<Level>,
}

impl StabChain {
    fn empty(degree: usize) -> Self {
        StabChain {
            degree,
            gens: Vec::new(),
            inv: Vec::new(),
            levels: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<Point> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn basic_orbit(&self, level: usize) -> &[Point] {
        &self.levels[level].orbit
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Panics if the order does not fit in a `u128`; see [`StabChain::checked_order`].
    pub fn order(&self) -> u128 {
        self.checked_order().expect("group order exceeds the u128 range")
    }

    pub fn checked_order(&self) -> Option<u128> {
        self.levels
            .iter()
            .try_fold(1u128, |acc, l| acc.checked_mul(l.orbit.len() as u128))
    }

    /// Generators of the pointwise stabiliser of the first `level` base points.
    pub fn stabilizer_generators(&self, level: usize) -> Vec<Perm> {
        if level >= self.levels.len() {
            return Vec::new();
        }
        self.levels[level]
            .gens
            .iter()
            .map(|&i| self.gens[i].clone())
            .collect()
    }

    fn push_gen(&mut self, g: Perm) -> usize {
        self.inv.push(g.inverse());
        self.gens.push(g);
        self.gens.len() - 1
    }

    fn recompute_orbit(&mut self, level: usize) {
        let degree = self.degree;
        let lvl = &mut self.levels[level];
        for &p in &lvl.orbit {
            lvl.label[p as usize] = NONE;
        }
        lvl.label[lvl.point as usize] = ROOT;
        lvl.orbit.clear();
        lvl.orbit.push(lvl.point);
        let mut i = 0;
        while i < lvl.orbit.len() {
            let d = lvl.orbit[i];
            for &s in &lvl.gens {
                let e = self.gens[s].apply(d);
                if lvl.label[e as usize] == NONE {
                    lvl.label[e as usize] = s as u32;
                    lvl.orbit.push(e);
                }
            }
            i += 1;
        }
        debug_assert!(lvl.orbit.len() <= degree);
    }

    /// Transversal element mapping the base point of `level` to `d`.
    pub fn transversal(&self, level: usize, d: Point) -> Option<Perm> {
        let lvl = &self.levels[level];
        if !lvl.contains(d) {
            return None;
        }
        let mut path = Vec::new();
        let mut p = d;
        while lvl.label[p as usize] != ROOT {
            let s = lvl.label[p as usize] as usize;
            path.push(s);
            p = self.inv[s].apply(p);
        }
        let mut u = Perm::identity(self.degree);
        for &s in path.iter().rev() {
            u.mul_assign(&self.gens[s]);
        }
        Some(u)
    }

    /// Image of point `p` under the inverse of the transversal for `d`, without
    /// building the transversal.
    pub fn transversal_inverse_apply(&self, level: usize, d: Point, mut p: Point) -> Point {
        let lvl = &self.levels[level];
        let mut q = d;
        while lvl.label[q as usize] != ROOT {
            let s = lvl.label[q as usize] as usize;
            p = self.inv[s].apply(p);
            q = self.inv[s].apply(q);
        }
        p
    }

    /// Sifts `g` starting at `from`. Returns the residue and the level at which
    /// sifting stopped (`num_levels()` when it passed every level).
    pub fn sift_from(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (j, lvl) in self.levels.iter().enumerate().skip(from) {
            let mut d = g.apply(lvl.point);
            if !lvl.contains(d) {
                return (g, j);
            }
            while lvl.label[d as usize] != ROOT {
                let s = lvl.label[d as usize] as usize;
                g.mul_assign(&self.inv[s]);
                d = self.inv[s].apply(d);
            }
        }
        let n = self.levels.len();
        (g, n)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (r, _) = self.sift_from(g.clone(), 0);
        r.is_identity()
    }

    /// Uniformly random element (product of random transversal elements).
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.degree);
        for level in (0..self.levels.len()).rev() {
            let orbit = &self.levels[level].orbit;
            let d = orbit[rng.gen_range(0..orbit.len())];
            let u = self.transversal(level, d).expect("orbit point");
            g = g.mul(&u);
        }
        g
    }

    /// Prepares levels for `prefix` plus extra points so that no generator
    /// fixes every base point.
    fn init(degree: usize, gens: &[Perm], prefix: &[Point]) -> Self {
        let mut chain = StabChain::empty(degree);
        for &p in prefix {
            if !chain.levels.iter().any(|l| l.point == p) {
                chain.levels.push(Level::new(p, degree));
            }
        }
        for g in gens {
            if g.is_identity() || chain.gens.contains(g) {
                continue;
            }
            let idx = chain.push_gen(g.clone());
            chain.place_generator(idx);
        }
        for l in 0..chain.levels.len() {
            chain.recompute_orbit(l);
        }
        chain
    }

    /// Adds generator `idx` to every level whose base prefix it fixes,
    /// appending a base point if it fixes them all.
    fn place_generator(&mut self, idx: usize) {
        let g = &self.gens[idx];
        let mut depth = 0;
        while depth < self.levels.len() && g.apply(self.levels[depth].point) == self.levels[depth].point {
            depth += 1;
        }
        if depth == self.levels.len() {
            let p = g.first_moved().expect("non-identity generator");
            self.levels.push(Level::new(p, self.degree));
        }
        for l in 0..=depth {
            self.levels[l].gens.push(idx);
        }
    }

    /// Deterministic Schreier–Sims.
    pub fn schreier_sims(degree: usize, gens: &[Perm], prefix: &[Point]) -> Self {
        let mut chain = StabChain::init(degree, gens, prefix);
        chain.complete();
        chain
    }

    /// Runs the deterministic Schreier–Sims loop on an existing chain. On a
    /// chain that is already complete this only verifies it; otherwise the
    /// chain grows until it is.
    pub fn complete(&mut self) {
        let chain = self;
        let degree = chain.degree;
        if chain.levels.is_empty() {
            return;
        }
        let mut i = chain.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            let mut restart: Option<usize> = None;
            let orbit = chain.levels[lvl].orbit.clone();
            let lgens = chain.levels[lvl].gens.clone();
            'search: for &d in &orbit {
                let mut u: Option<Perm> = None;
                for &s in &lgens {
                    let e = chain.gens[s].apply(d);
                    if chain.levels[lvl].label[e as usize] == s as u32 {
                        // Tree edge: the Schreier generator is trivial.
                        continue;
                    }
                    let ud = u.get_or_insert_with(|| chain.transversal(lvl, d).unwrap());
                    let h = ud.mul(&chain.gens[s]);
                    let (res, j) = chain.sift_from(h, lvl);
                    if j < chain.levels.len() || !res.is_identity() {
                        let idx = chain.push_gen(res);
                        let new_level = j == chain.levels.len();
                        if new_level {
                            let p = chain.gens[idx].first_moved().unwrap();
                            chain.levels.push(Level::new(p, degree));
                        }
                        for l in (lvl + 1)..=j {
                            chain.levels[l].gens.push(idx);
                            chain.recompute_orbit(l);
                        }
                        restart = Some(j);
                        break 'search;
                    }
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    /// Randomised Schreier–Sims that stops once the chain order equals
    /// `order`. The caller guarantees `order` is an upper bound for the true
    /// group order; reaching it then certifies the chain.
    pub fn with_known_order(
        degree: usize,
        gens: &[Perm],
        prefix: &[Point],
        order: u128,
        seed: u64,
    ) -> Result<Self> {
        let mut chain = StabChain::init(degree, gens, prefix);
        if chain.order() == order {
            return Ok(chain);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        if pool.is_empty() {
            return Err(Error::input("known order > 1 for trivial generating set"));
        }
        let base_len = pool.len();
        while pool.len() < 10 {
            let g = pool[pool.len() % base_len].clone();
            pool.push(g);
        }
        let mut acc = Perm::identity(degree);
        let step = |rng: &mut ChaCha8Rng, pool: &mut Vec<Perm>, acc: &mut Perm| {
            let n = pool.len();
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n);
            while b == a {
                b = rng.gen_range(0..n);
            }
            let x = if rng.gen_bool(0.5) { pool[b].clone() } else { pool[b].inverse() };
            pool[a] = if rng.gen_bool(0.5) { pool[a].mul(&x) } else { x.mul(&pool[a]) };
            *acc = acc.mul(&pool[a]);
        };
        for _ in 0..40 {
            step(&mut rng, &mut pool, &mut acc);
        }
        let mut idle = 0usize;
        while chain.order() < order {
            step(&mut rng, &mut pool, &mut acc);
            let (res, j) = chain.sift_from(acc.clone(), 0);
            if j == chain.levels.len() && res.is_identity() {
                idle += 1;
                if idle > 400 {
                    return Err(Error::Internal(format!(
                        "randomised chain stalled at order {} below claimed order {order}",
                        chain.order()
                    )));
                }
                continue;
            }
            idle = 0;
            let idx = chain.push_gen(res);
            if j == chain.levels.len() {
                let p = chain.gens[idx].first_moved().unwrap();
                chain.levels.push(Level::new(p, degree));
            }
            for l in 1..=j {
                chain.levels[l].gens.push(idx);
                chain.recompute_orbit(l);
            }
        }
        if chain.order() != order {
            return Err(Error::Internal(format!(
                "chain order {} exceeds claimed order {order}",
                chain.order()
            )));
        }
        Ok(chain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym_gens(n: usize) -> Vec<Perm> {
        let cyc: Vec<Point> = (0..n as Point).collect();
        vec![
            Perm::from_cycles(n, &[&[0, 1]]).unwrap(),
            Perm::from_cycles(n, &[&cyc]).unwrap(),
        ]
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..8usize {
            let c = StabChain::schreier_sims(n, &sym_gens(n), &[]);
            let fact: u128 = (1..=n as u128).product();
            assert_eq!(c.order(), fact);
        }
    }

    #[test]
    fn prefix_is_respected() {
        let c = StabChain::schreier_sims(6, &sym_gens(6), &[4, 2]);
        assert_eq!(&c.base()[..2], &[4, 2]);
        assert_eq!(c.order(), 720);
        assert_eq!(c.stabilizer_generators(1).len() > 0, true);
    }

    #[test]
    fn randomised_matches_deterministic() {
        let gens = sym_gens(7);
        let c = StabChain::with_known_order(7, &gens, &[3], 5040, 7).unwrap();
        assert_eq!(c.order(), 5040);
        assert_eq!(c.base()[0], 3);
    }

    #[test]
    fn membership() {
        let a6 = vec![
            Perm::from_cycles(6, &[&[0, 1, 2]]).unwrap(),
            Perm::from_cycles(6, &[&[1, 2, 3, 4, 5]]).unwrap(),
        ];
        let c = StabChain::schreier_sims(6, &a6, &[]);
        assert_eq!(c.order(), 360);
        assert!(!c.contains(&Perm::from_cycles(6, &[&[0, 1]]).unwrap()));
        assert!(c.contains(&Perm::from_cycles(6, &[&[0, 1], &[2, 3]]).unwrap()));
    }
}
