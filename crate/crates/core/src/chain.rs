//! Deterministic Schreier-Sims.
//!
//! The chain keeps one global list of strong generators; level `i` uses the
//! generators that fix the first `i` base points. A new base point is always
//! the smallest point moved by the element that forced the extension, so the
//! base is a pure function of the input generator list.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::One;

use crate::perm::{PermError, Permutation};

#[derive(Debug, Clone)]
struct Level {
    /// 0-based base point.
    base_point: usize,
    /// Indices into `StabilizerChain::strong_gens`.
    gens: Vec<usize>,
    /// `transversal[b] = Some(u)` with `u(base_point) = b` for orbit points.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
    /// Schreier generators already sifted: pairs (orbit index, gens index)
    /// below these watermarks are done for the current `gens` length.
    tested: Vec<usize>,
}

impl Level {
    fn new(base_point: usize, degree: usize) -> Self {
        let mut transversal = vec![None; degree];
        transversal[base_point] = Some(Permutation::identity(degree));
        Self {
            base_point,
            gens: Vec::new(),
            transversal,
            orbit: vec![base_point],
            tested: vec![0],
        }
    }
}

/// Base and strong generating set of a permutation group.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    degree: usize,
    strong_gens: Vec<Permutation>,
    levels: Vec<Level>,
}

impl StabilizerChain {
    /// Builds a chain for the group generated by `generators`.
    pub fn build(generators: &[Permutation]) -> Result<Self, PermError> {
        let degree = match generators.first() {
            Some(g) => g.degree(),
            None => return Err(PermError::ZeroDegree),
        };
        if let Some(bad) = generators.iter().find(|g| g.degree() != degree) {
            return Err(PermError::DegreeMismatch {
                left: degree,
                right: bad.degree(),
            });
        }
        let mut chain = Self {
            degree,
            strong_gens: Vec::new(),
            levels: Vec::new(),
        };
        for g in generators {
            if g.is_identity() || chain.strong_gens.contains(g) {
                continue;
            }
            // The generator belongs to every level up to the first base point
            // it moves; extend the base if it fixes all of them.
            let top = match chain.first_moved_level(g) {
                Some(l) => l,
                None => {
                    let point = g.first_moved_point().expect("non-identity") - 1;
                    chain.levels.push(Level::new(point, degree));
                    chain.levels.len() - 1
                }
            };
            chain.add_strong_generator(g.clone(), 0, top);
        }
        chain.complete();
        Ok(chain)
    }

    fn first_moved_level(&self, g: &Permutation) -> Option<usize> {
        self.levels
            .iter()
            .position(|l| g.image0(l.base_point) != l.base_point)
    }

    fn add_strong_generator(&mut self, g: Permutation, from: usize, to: usize) {
        let idx = self.strong_gens.len();
        self.strong_gens.push(g);
        for l in from..=to {
            self.levels[l].gens.push(idx);
            self.extend_orbit(l);
        }
    }

    /// Closes the orbit of level `l` under its generators, appending new
    /// points in BFS order.
    fn extend_orbit(&mut self, l: usize) {
        let level = &mut self.levels[l];
        let mut queue: VecDeque<usize> = (0..level.orbit.len()).collect();
        while let Some(k) = queue.pop_front() {
            let b = level.orbit[k];
            for &gi in &level.gens {
                let s = &self.strong_gens[gi];
                let c = s.image0(b);
                if level.transversal[c].is_none() {
                    let ub = level.transversal[b].as_ref().expect("orbit point");
                    level.transversal[c] = Some(Permutation::compose_unchecked(s, ub));
                    level.orbit.push(c);
                    level.tested.push(0);
                    queue.push_back(level.orbit.len() - 1);
                }
            }
        }
    }

    /// Main loop: every Schreier generator at every level must sift through
    /// the levels below it.
    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let l = i as usize;
            match self.next_untested(l) {
                None => i -= 1,
                Some((k, gi)) => {
                    self.levels[l].tested[k] = gi + 1;
                    let b = self.levels[l].orbit[k];
                    let s = &self.strong_gens[self.levels[l].gens[gi]];
                    let sb = s.image0(b);
                    let ub = self.levels[l].transversal[b].as_ref().unwrap();
                    let usb = self.levels[l].transversal[sb].as_ref().unwrap();
                    // u_{s(b)}^{-1} s u_b fixes the base point of level l.
                    let h = Permutation::compose_unchecked(
                        &usb.inverse(),
                        &Permutation::compose_unchecked(s, ub),
                    );
                    let (residue, drop) = self.strip(h, l + 1);
                    if !residue.is_identity() {
                        if drop == self.levels.len() {
                            let point = residue.first_moved_point().unwrap() - 1;
                            self.levels.push(Level::new(point, self.degree));
                        }
                        self.add_strong_generator(residue, l + 1, drop);
                        i = drop as isize;
                    }
                }
            }
        }
    }

    fn next_untested(&self, l: usize) -> Option<(usize, usize)> {
        let level = &self.levels[l];
        let n = level.gens.len();
        level
            .tested
            .iter()
            .position(|&t| t < n)
            .map(|k| (k, level.tested[k]))
    }

    /// Sifts `g` from level `from` downwards. Returns the residue and the
    /// level at which sifting stopped (`levels.len()` if it went through).
    fn strip(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for l in from..self.levels.len() {
            let level = &self.levels[l];
            let b = g.image0(level.base_point);
            match &level.transversal[b] {
                None => return (g, l),
                Some(u) => {
                    if b != level.base_point {
                        g = Permutation::compose_unchecked(&u.inverse(), &g);
                    }
                }
            }
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Base points, 1-based.
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point + 1).collect()
    }

    /// Basic orbit lengths, one per base point.
    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong_gens
    }

    /// Strong generators of level `i`, i.e. those fixing the first `i` base
    /// points.
    pub fn level_generators(&self, i: usize) -> impl Iterator<Item = &Permutation> {
        self.levels[i].gens.iter().map(|&g| &self.strong_gens[g])
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool, PermError> {
        if g.degree() != self.degree {
            return Err(PermError::DegreeMismatch {
                left: self.degree,
                right: g.degree(),
            });
        }
        let (residue, drop) = self.strip(g.clone(), 0);
        Ok(drop == self.levels.len() && residue.is_identity())
    }
}
