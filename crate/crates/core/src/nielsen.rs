//! Nielsen graphs on generating tuples.
//!
//! Vertices are generating `k`-tuples of a finite group; edges are the
//! elementary moves
//!
//! * `R_ij^±`: `x_i <- x_i x_j^±1` (`i != j`),
//! * `I_j`: `x_j <- x_j^-1`,
//! * `AC_{i,w}`: `x_i <- w^-1 x_i w` (Andrews-Curtis move sets only).
//!
//! Components of the graph are Nielsen classes. For pairs, the cycle type of
//! the commutator is constant on a component, which is what separation
//! certificates rest on.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::ScenarioPair;
use crate::group::{GroupElement, GroupError, GroupHandle};
use crate::perm::CycleType;
use crate::tree::{Evaluator, GeneratorWord, Letter, TreeParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NielsenError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("tuple has arity {got}, move set expects {expected}")]
    ArityMismatch { got: usize, expected: usize },
    #[error("seed {} is not a generating tuple", .0 + 1)]
    NonGeneratingSeed(usize),
    #[error("fingerprints need pairs in a quotient group")]
    FingerprintUnsupported,
    #[error("{count} candidate tuples exceed the tuple cap {cap}")]
    TupleCapExceeded { count: u128, cap: usize },
    #[error("a move left the set of generating tuples")]
    UnsoundMove,
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    Nielsen,
    AndrewsCurtis,
}

/// One elementary move. Indices are 0-based; `Display` prints them 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    R { i: usize, j: usize, inverse: bool },
    I { j: usize },
    Ac { i: usize, conjugator: usize },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::R { i, j, inverse } => {
                write!(f, "R{}{}{}", i + 1, j + 1, if inverse { "-" } else { "+" })
            }
            Move::I { j } => write!(f, "I{}", j + 1),
            Move::Ac { i, conjugator } => write!(f, "AC{},w{}", i + 1, conjugator + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveSet {
    kind: MoveKind,
    k: usize,
    conjugators: Vec<GeneratorWord>,
}

impl MoveSet {
    pub fn nielsen(k: usize) -> Self {
        Self {
            kind: MoveKind::Nielsen,
            k,
            conjugators: Vec::new(),
        }
    }

    /// Nielsen moves plus conjugation by each word in `conjugators`
    /// (default `x, x^-1, y, y^-1`). Missing inverses are appended so the
    /// set is closed under inversion.
    pub fn andrews_curtis(k: usize, conjugators: Option<Vec<GeneratorWord>>) -> Self {
        let mut words = conjugators.unwrap_or_else(|| {
            Letter::ALL
                .iter()
                .map(|&l| GeneratorWord::letter(l))
                .collect()
        });
        words.retain(|w| !w.is_empty());
        let mut closed: Vec<GeneratorWord> = Vec::new();
        for w in &words {
            if !closed.contains(w) {
                closed.push(w.clone());
            }
        }
        for w in &words {
            let inv = w.inverse();
            if !closed.contains(&inv) {
                closed.push(inv);
            }
        }
        Self {
            kind: MoveKind::AndrewsCurtis,
            k,
            conjugators: closed,
        }
    }

    pub fn kind(&self) -> MoveKind {
        self.kind
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn conjugators(&self) -> &[GeneratorWord] {
        &self.conjugators
    }

    /// All moves in the fixed enumeration order: every `R_ij^+`, every
    /// `R_ij^-`, every `I_j`, then `AC` moves by `(i, conjugator index)`.
    pub fn moves(&self) -> Vec<Move> {
        let k = self.k;
        let mut out = Vec::new();
        for inverse in [false, true] {
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        out.push(Move::R { i, j, inverse });
                    }
                }
            }
        }
        out.extend((0..k).map(|j| Move::I { j }));
        for i in 0..k {
            out.extend((0..self.conjugators.len()).map(|conjugator| Move::Ac { i, conjugator }));
        }
        out
    }

    /// The move undoing `m`.
    pub fn inverse_of(&self, m: Move) -> Move {
        match m {
            Move::R { i, j, inverse } => Move::R {
                i,
                j,
                inverse: !inverse,
            },
            Move::I { j } => Move::I { j },
            Move::Ac { i, conjugator } => {
                let inv = self.conjugators[conjugator].inverse();
                let c = self
                    .conjugators
                    .iter()
                    .position(|w| *w == inv)
                    .expect("conjugators are closed under inverses");
                Move::Ac { i, conjugator: c }
            }
        }
    }
}

impl fmt::Display for MoveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::Nielsen => write!(f, "nielsen:k={}", self.k),
            MoveKind::AndrewsCurtis => {
                let ws: Vec<String> = self.conjugators.iter().map(|w| w.to_string()).collect();
                write!(
                    f,
                    "andrews-curtis:k={},conjugators={}",
                    self.k,
                    ws.join(";")
                )
            }
        }
    }
}

/// A tuple of group elements with its concatenated canonical key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleVertex {
    elements: Vec<GroupElement>,
    key: Vec<u8>,
}

impl TupleVertex {
    pub fn new(h: &GroupHandle, elements: Vec<GroupElement>) -> Result<Self, NielsenError> {
        let mut key = Vec::new();
        for e in &elements {
            key.extend(h.canonical_key(e)?);
        }
        Ok(Self { elements, key })
    }

    fn new_unchecked(h: &GroupHandle, elements: Vec<GroupElement>) -> Self {
        let mut key = Vec::new();
        for e in &elements {
            h.write_key(e, &mut key);
        }
        Self { elements, key }
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn arity(&self) -> usize {
        self.elements.len()
    }

    fn describe(&self) -> Vec<String> {
        self.elements.iter().map(|e| e.to_string()).collect()
    }
}

/// A move set bound to a group, with conjugator words evaluated.
pub struct NielsenGraph<'a> {
    handle: &'a GroupHandle,
    moves: MoveSet,
    move_list: Vec<Move>,
    conjugators: Vec<(GroupElement, GroupElement)>,
}

impl<'a> NielsenGraph<'a> {
    pub fn new(handle: &'a GroupHandle, moves: MoveSet) -> Self {
        let conjugators = moves
            .conjugators()
            .iter()
            .map(|w| {
                let g = handle.word_element(w);
                let inv = handle.invert_unchecked(&g);
                (g, inv)
            })
            .collect();
        let move_list = moves.moves();
        Self {
            handle,
            moves,
            move_list,
            conjugators,
        }
    }

    pub fn handle(&self) -> &GroupHandle {
        self.handle
    }

    pub fn move_set(&self) -> &MoveSet {
        &self.moves
    }

    pub fn move_list(&self) -> &[Move] {
        &self.move_list
    }

    pub fn apply_move(&self, m: Move, t: &TupleVertex) -> Result<TupleVertex, NielsenError> {
        if t.arity() != self.moves.arity() {
            return Err(NielsenError::ArityMismatch {
                got: t.arity(),
                expected: self.moves.arity(),
            });
        }
        Ok(self.apply_unchecked(m, t))
    }

    fn apply_unchecked(&self, m: Move, t: &TupleVertex) -> TupleVertex {
        let h = self.handle;
        let mut els = t.elements.clone();
        match m {
            Move::R { i, j, inverse } => {
                let factor = if inverse {
                    h.invert_unchecked(&els[j])
                } else {
                    els[j].clone()
                };
                els[i] = h.multiply_unchecked(&els[i], &factor);
            }
            Move::I { j } => els[j] = h.invert_unchecked(&els[j]),
            Move::Ac { i, conjugator } => {
                let (w, w_inv) = &self.conjugators[conjugator];
                els[i] = h.multiply_unchecked(&h.multiply_unchecked(w_inv, &els[i]), w);
            }
        }
        TupleVertex::new_unchecked(h, els)
    }

    /// Images of `t` under every move, in [`MoveSet::moves`] order. Repeats
    /// are kept.
    pub fn neighbors(&self, t: &TupleVertex) -> Result<Vec<TupleVertex>, NielsenError> {
        if t.arity() != self.moves.arity() {
            return Err(NielsenError::ArityMismatch {
                got: t.arity(),
                expected: self.moves.arity(),
            });
        }
        Ok(self
            .move_list
            .iter()
            .map(|&m| self.apply_unchecked(m, t))
            .collect())
    }

    /// Cycle type of `[u, v] = u^-1 v^-1 u v` for a pair in a quotient group.
    pub fn fingerprint(&self, t: &TupleVertex) -> Result<CycleType, NielsenError> {
        fingerprint(t, self.handle)
    }
}

pub fn fingerprint(t: &TupleVertex, h: &GroupHandle) -> Result<CycleType, NielsenError> {
    if t.arity() != 2 || !h.is_quotient() {
        return Err(NielsenError::FingerprintUnsupported);
    }
    let (u, v) = (&t.elements[0], &t.elements[1]);
    let (ui, vi) = (h.invert_unchecked(u), h.invert_unchecked(v));
    let c = h.multiply_unchecked(&h.multiply_unchecked(&ui, &vi), &h.multiply_unchecked(u, v));
    match c {
        GroupElement::Perm(p) => Ok(p.cycle_type()),
        GroupElement::Residues(_) => Err(NielsenError::FingerprintUnsupported),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploreMode {
    Exhaustive,
    Seeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every generating tuple was visited; the partition is the exact
    /// component structure.
    Exact,
    /// Seed regions never met and each pair of regions is separated by
    /// differing fingerprints or by one of them being a whole component.
    CertifiedDistinct,
    /// All seeds ended in one region.
    Merged,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    /// Exact size, known when the component was explored completely.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<u64>,
    pub visited: u64,
    pub complete: bool,
    pub representative: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    /// Seed indices merged into this region (seeded mode).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub seeds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_cap: Option<usize>,
    pub hit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub mode: ExploreMode,
    pub group: String,
    pub moveset: String,
    pub k: usize,
    /// Number of generating tuples (exhaustive mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_vertices: Option<u64>,
    pub component_count: usize,
    pub components: Vec<ComponentSummary>,
    pub verdict: Verdict,
    pub caps: Caps,
}

#[derive(Debug, Clone, Copy)]
pub struct ExploreOptions {
    pub element_cap: usize,
    pub tuple_cap: usize,
    /// 1 runs single-threaded; results do not depend on this.
    pub threads: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        Self {
            element_cap: 1_000_000,
            tuple_cap: 4_000_000,
            threads: 1,
        }
    }
}

struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

fn run_with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, NielsenError> {
    if threads <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| NielsenError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Visits every generating `k`-tuple and returns the exact component
/// partition. Components are listed by their first tuple in enumeration
/// order (lexicographic over the BFS element order).
pub fn explore_exhaustive(
    h: &GroupHandle,
    moves: &MoveSet,
    opts: ExploreOptions,
) -> Result<ComponentReport, NielsenError> {
    use rayon::prelude::*;

    let k = moves.arity();
    if k == 0 {
        return Err(NielsenError::ZeroArity);
    }
    let elems = h.enumerate(opts.element_cap)?;
    let count = (elems.len() as u128).pow(k as u32);
    if count > opts.tuple_cap as u128 {
        return Err(NielsenError::TupleCapExceeded {
            count,
            cap: opts.tuple_cap,
        });
    }
    let graph = NielsenGraph::new(h, moves.clone());
    let n = elems.len();

    let (vertices, adjacency) = run_with_threads(opts.threads, || {
        let tuple_at = |mut idx: usize| {
            let mut els = vec![GroupElement::Residues(Vec::new()); k];
            for slot in els.iter_mut().rev() {
                *slot = elems[idx % n].clone();
                idx /= n;
            }
            els
        };
        let vertices: Vec<TupleVertex> = (0..count as usize)
            .into_par_iter()
            .filter_map(|idx| {
                let els = tuple_at(idx);
                h.is_generating_unchecked(&els)
                    .then(|| TupleVertex::new_unchecked(h, els))
            })
            .collect();
        let index: HashMap<&[u8], usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.key(), i))
            .collect();
        let adjacency: Vec<Option<Vec<usize>>> = vertices
            .par_iter()
            .map(|v| {
                graph
                    .move_list
                    .iter()
                    .map(|&m| index.get(graph.apply_unchecked(m, v).key()).copied())
                    .collect()
            })
            .collect();
        (vertices, adjacency)
    })?;

    let mut dsu = Dsu::new(vertices.len());
    for (i, nbrs) in adjacency.into_iter().enumerate() {
        for j in nbrs.ok_or(NielsenError::UnsoundMove)? {
            dsu.union(i, j);
        }
    }
    let mut comp_of_root: HashMap<usize, usize> = HashMap::new();
    let mut components: Vec<ComponentSummary> = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        let root = dsu.find(i);
        let c = *comp_of_root.entry(root).or_insert_with(|| {
            components.push(ComponentSummary {
                size: Some(0),
                visited: 0,
                complete: true,
                representative: v.describe(),
                fingerprint: fingerprint(v, h).ok().map(|c| c.to_string()),
                seeds: Vec::new(),
            });
            components.len() - 1
        });
        let comp = &mut components[c];
        comp.visited += 1;
        comp.size = Some(comp.visited);
    }
    Ok(ComponentReport {
        mode: ExploreMode::Exhaustive,
        group: h.descriptor().to_string(),
        moveset: moves.to_string(),
        k,
        total_vertices: Some(vertices.len() as u64),
        component_count: components.len(),
        components,
        verdict: Verdict::Exact,
        caps: Caps {
            element_cap: Some(opts.element_cap),
            tuple_cap: Some(opts.tuple_cap),
            node_cap: None,
            hit: false,
        },
    })
}

/// Breadth-first search from each seed, at most `node_cap` new vertices per
/// seed. A search that reaches a vertex owned by another seed merges the two
/// regions and does not expand past it.
pub fn explore_seeded(
    h: &GroupHandle,
    seeds: &[TupleVertex],
    moves: &MoveSet,
    node_cap: usize,
) -> Result<ComponentReport, NielsenError> {
    let graph = NielsenGraph::new(h, moves.clone());
    for (i, s) in seeds.iter().enumerate() {
        if s.arity() != moves.arity() {
            return Err(NielsenError::ArityMismatch {
                got: s.arity(),
                expected: moves.arity(),
            });
        }
        if !h.is_generating(s.elements())? {
            return Err(NielsenError::NonGeneratingSeed(i));
        }
    }
    let mut owner: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut dsu = Dsu::new(seeds.len());
    let mut visited = vec![0u64; seeds.len()];
    let mut complete = vec![false; seeds.len()];
    let mut hit = false;

    for (s, seed) in seeds.iter().enumerate() {
        if let Some(&o) = owner.get(seed.key()) {
            dsu.union(s, o);
            complete[s] = complete[o];
            continue;
        }
        owner.insert(seed.key().to_vec(), s);
        visited[s] = 1;
        let mut queue = VecDeque::from([seed.clone()]);
        let mut capped = false;
        'bfs: while let Some(t) = queue.pop_front() {
            for &m in graph.move_list() {
                let n = graph.apply_unchecked(m, &t);
                match owner.get(n.key()) {
                    Some(&o) if o != s => dsu.union(s, o),
                    Some(_) => {}
                    None => {
                        if visited[s] as usize >= node_cap {
                            capped = true;
                            break 'bfs;
                        }
                        owner.insert(n.key().to_vec(), s);
                        visited[s] += 1;
                        queue.push_back(n);
                    }
                }
            }
        }
        hit |= capped;
        complete[s] = !capped;
    }

    let mut region_of_root: HashMap<usize, usize> = HashMap::new();
    let mut regions: Vec<ComponentSummary> = Vec::new();
    let mut region_fp: Vec<Option<CycleType>> = Vec::new();
    for (s, seed) in seeds.iter().enumerate() {
        let root = dsu.find(s);
        let r = *region_of_root.entry(root).or_insert_with(|| {
            let fp = fingerprint(seed, h).ok();
            regions.push(ComponentSummary {
                size: None,
                visited: 0,
                complete: true,
                representative: seed.describe(),
                fingerprint: fp.as_ref().map(|c| c.to_string()),
                seeds: Vec::new(),
            });
            region_fp.push(fp);
            regions.len() - 1
        });
        let reg = &mut regions[r];
        reg.visited += visited[s];
        reg.complete &= complete[s];
        reg.seeds.push(s);
    }
    for reg in &mut regions {
        if reg.complete {
            reg.size = Some(reg.visited);
        }
    }
    let verdict = match regions.len() {
        0 => Verdict::Inconclusive,
        1 => Verdict::Merged,
        n => {
            let separated = |a: usize, b: usize| {
                regions[a].complete
                    || regions[b].complete
                    || matches!((&region_fp[a], &region_fp[b]), (Some(x), Some(y)) if x != y)
            };
            if (0..n).all(|a| (a + 1..n).all(|b| separated(a, b))) {
                Verdict::CertifiedDistinct
            } else {
                Verdict::Inconclusive
            }
        }
    };
    Ok(ComponentReport {
        mode: ExploreMode::Seeded,
        group: h.descriptor().to_string(),
        moveset: moves.to_string(),
        k: moves.arity(),
        total_vertices: None,
        component_count: regions.len(),
        components: regions,
        verdict,
        caps: Caps {
            element_cap: None,
            tuple_cap: None,
            node_cap: Some(node_cap),
            hit,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationObservation {
    pub depth: usize,
    pub fingerprint_a: String,
    pub fingerprint_b: String,
    pub differ: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub p: u32,
    pub pair_a: String,
    pub pair_b: String,
    pub max_depth: usize,
    pub observations: Vec<SeparationObservation>,
    /// Smallest depth whose commutator cycle types differ. `None` says
    /// nothing about Nielsen equivalence.
    pub separated_at: Option<usize>,
}

/// Compares commutator cycle types level by level, stopping at the first
/// level where they differ.
pub fn separation_depth(
    ev: &mut Evaluator,
    a: &ScenarioPair,
    b: &ScenarioPair,
    max_depth: usize,
) -> SeparationReport {
    let params = ev.params();
    let ca = a.commutator(params);
    let cb = b.commutator(params);
    let mut observations = Vec::new();
    let mut separated_at = None;
    for depth in 1..=max_depth {
        let fa = ev.evaluate(&ca, depth).cycle_type();
        let fb = ev.evaluate(&cb, depth).cycle_type();
        let differ = fa != fb;
        observations.push(SeparationObservation {
            depth,
            fingerprint_a: fa.to_string(),
            fingerprint_b: fb.to_string(),
            differ,
        });
        if differ {
            separated_at = Some(depth);
            break;
        }
    }
    SeparationReport {
        p: params.p(),
        pair_a: a.label.clone(),
        pair_b: b.label.clone(),
        max_depth,
        observations,
        separated_at,
    }
}

/// Both commutators at one level, enough to re-check the verdict by hand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub p: u32,
    pub depth: usize,
    pub degree: usize,
    pub pair_a: String,
    pub pair_b: String,
    pub commutator_a: String,
    pub commutator_b: String,
    pub cycle_type_a: String,
    pub cycle_type_b: String,
    pub distinct: bool,
    pub verdict: String,
}

pub fn certify_distinct(
    ev: &mut Evaluator,
    a: &ScenarioPair,
    b: &ScenarioPair,
    depth: usize,
) -> Certificate {
    let params: TreeParams = ev.params();
    let pa = ev.evaluate(&a.commutator(params), depth);
    let pb = ev.evaluate(&b.commutator(params), depth);
    let (ta, tb) = (pa.cycle_type(), pb.cycle_type());
    let distinct = ta != tb;
    Certificate {
        p: params.p(),
        depth,
        degree: pa.degree(),
        pair_a: a.label.clone(),
        pair_b: b.label.clone(),
        commutator_a: pa.format_cycles(),
        commutator_b: pb.format_cycles(),
        cycle_type_a: ta.to_string(),
        cycle_type_b: tb.to_string(),
        distinct,
        verdict: if distinct { "distinct" } else { "not-distinct" }.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> TreeParams {
        TreeParams::new(3).unwrap()
    }

    fn abelian_pair(h: &GroupHandle, a: [i64; 2], b: [i64; 2]) -> TupleVertex {
        TupleVertex::new(h, vec![h.residues(&a).unwrap(), h.residues(&b).unwrap()]).unwrap()
    }

    #[test]
    fn move_order_and_count() {
        let ms = MoveSet::nielsen(2);
        let names: Vec<String> = ms.moves().iter().map(|m| m.to_string()).collect();
        assert_eq!(names, ["R12+", "R21+", "R12-", "R21-", "I1", "I2"]);
        assert_eq!(MoveSet::nielsen(3).moves().len(), 6 + 6 + 3);
        let ac = MoveSet::andrews_curtis(2, None);
        assert_eq!(ac.moves().len(), 6 + 2 * 4);
    }

    #[test]
    fn ac_conjugators_closed_under_inverse() {
        let w = GeneratorWord::new([Letter::X, Letter::Y]);
        let ms = MoveSet::andrews_curtis(2, Some(vec![w.clone()]));
        assert_eq!(ms.conjugators(), &[w.clone(), w.inverse()]);
        for m in ms.moves() {
            let inv = ms.inverse_of(m);
            assert!(ms.moves().contains(&inv));
        }
    }

    #[test]
    fn abelian_moves() {
        let h = GroupHandle::abelian(&[5, 5]).unwrap();
        let g = NielsenGraph::new(&h, MoveSet::nielsen(2));
        let t = abelian_pair(&h, [1, 0], [0, 1]);
        let r = g
            .apply_move(
                Move::R {
                    i: 0,
                    j: 1,
                    inverse: false,
                },
                &t,
            )
            .unwrap();
        assert_eq!(r, abelian_pair(&h, [1, 1], [0, 1]));
        let back = g
            .apply_move(
                Move::R {
                    i: 0,
                    j: 1,
                    inverse: true,
                },
                &r,
            )
            .unwrap();
        assert_eq!(back, t);
        let i1 = g.apply_move(Move::I { j: 0 }, &t).unwrap();
        assert_eq!(g.apply_move(Move::I { j: 0 }, &i1).unwrap(), t);
        assert_eq!(g.neighbors(&t).unwrap().len(), 6);
        let triple = TupleVertex::new(&h, vec![h.identity(); 3]).unwrap();
        assert!(g.apply_move(Move::I { j: 0 }, &triple).is_err());
    }

    #[test]
    fn exhaustive_abelian_counts() {
        let cases: [(&[u64], usize, usize); 4] = [
            (&[3, 3], 2, 1),
            (&[5, 5], 2, 2),
            (&[7, 7], 2, 3),
            (&[5, 5], 3, 1),
        ];
        for (moduli, k, expected) in cases {
            let h = GroupHandle::abelian(moduli).unwrap();
            let r =
                explore_exhaustive(&h, &MoveSet::nielsen(k), ExploreOptions::default()).unwrap();
            assert_eq!(r.component_count, expected, "{moduli:?} k={k}");
            assert_eq!(r.verdict, Verdict::Exact);
            let total: u64 = r.components.iter().map(|c| c.size.unwrap()).sum();
            assert_eq!(Some(total), r.total_vertices);
        }
    }

    #[test]
    fn exhaustive_is_thread_independent() {
        let h = GroupHandle::abelian(&[7, 7]).unwrap();
        let ms = MoveSet::nielsen(2);
        let one = explore_exhaustive(&h, &ms, ExploreOptions::default()).unwrap();
        let four = explore_exhaustive(
            &h,
            &ms,
            ExploreOptions {
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn exhaustive_caps() {
        let h = GroupHandle::quotient(p3(), 4);
        let r = explore_exhaustive(
            &h,
            &MoveSet::nielsen(2),
            ExploreOptions {
                element_cap: 1000,
                ..Default::default()
            },
        );
        assert!(matches!(
            r,
            Err(NielsenError::Group(GroupError::CapExceeded { .. }))
        ));
        let a = GroupHandle::abelian(&[7, 7]).unwrap();
        let r = explore_exhaustive(
            &a,
            &MoveSet::nielsen(3),
            ExploreOptions {
                tuple_cap: 1000,
                ..Default::default()
            },
        );
        assert!(matches!(r, Err(NielsenError::TupleCapExceeded { .. })));
    }

    #[test]
    fn ac_moves_on_quotient_preserve_generation() {
        let h = GroupHandle::quotient(p3(), 2);
        let r = explore_exhaustive(
            &h,
            &MoveSet::andrews_curtis(2, None),
            ExploreOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Exact);
        assert!(r.component_count >= 1);
    }

    #[test]
    fn seeded_verdicts() {
        let h = GroupHandle::abelian(&[5, 5]).unwrap();
        let ms = MoveSet::nielsen(2);
        let g = NielsenGraph::new(&h, ms.clone());
        let t = abelian_pair(&h, [1, 0], [0, 1]);
        let n = g.neighbors(&t).unwrap().remove(0);
        let r = explore_seeded(&h, &[t.clone(), n], &ms, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Merged);
        assert_eq!(r.component_count, 1);

        let single = explore_seeded(&h, std::slice::from_ref(&t), &ms, 10).unwrap();
        assert_eq!(single.verdict, Verdict::Merged);
        assert!(single.caps.hit);

        // (1,0),(0,2) has determinant 2, a different class from determinant 1
        let other = abelian_pair(&h, [1, 0], [0, 2]);
        let full = explore_seeded(&h, &[t.clone(), other.clone()], &ms, 10_000).unwrap();
        assert_eq!(full.verdict, Verdict::CertifiedDistinct);
        assert!(full.components.iter().all(|c| c.complete));
        let capped = explore_seeded(&h, &[t.clone(), other], &ms, 5).unwrap();
        assert_eq!(capped.verdict, Verdict::Inconclusive);

        let bad = abelian_pair(&h, [1, 0], [2, 0]);
        assert_eq!(
            explore_seeded(&h, &[t, bad], &ms, 10),
            Err(NielsenError::NonGeneratingSeed(1))
        );
    }

    #[test]
    fn fingerprint_requires_quotient_pairs() {
        let h = GroupHandle::abelian(&[5, 5]).unwrap();
        let t = abelian_pair(&h, [1, 0], [0, 1]);
        assert_eq!(
            fingerprint(&t, &h),
            Err(NielsenError::FingerprintUnsupported)
        );
    }

    #[test]
    fn seeded_quotient_pairs_are_certified_distinct() {
        let q = p3();
        let h = GroupHandle::quotient(q, 4);
        let mut ev = Evaluator::new(q);
        let seed = |pair: ScenarioPair, ev: &mut Evaluator| {
            let u = h.tree_element(ev, &pair.u).unwrap();
            let v = h.tree_element(ev, &pair.v).unwrap();
            TupleVertex::new(&h, vec![u, v]).unwrap()
        };
        let a = seed(ScenarioPair::standard(), &mut ev);
        let b = seed(ScenarioPair::perturbed(), &mut ev);
        let r = explore_seeded(&h, &[a, b], &MoveSet::nielsen(2), 2_000).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedDistinct);
        assert_eq!(r.component_count, 2);
        assert_ne!(r.components[0].fingerprint, r.components[1].fingerprint);
    }

    #[test]
    fn certificate_for_swapped_pair() {
        let mut ev = Evaluator::new(p3());
        let a = ScenarioPair::standard();
        let b = ScenarioPair::new("(y, x)", a.v.clone(), a.u.clone());
        let c = certify_distinct(&mut ev, &a, &b, 4);
        assert!(!c.distinct);
        assert_eq!(c.verdict, "not-distinct");
        let same = certify_distinct(&mut ev, &a, &a, 4);
        assert!(!same.distinct);
        assert_eq!(same.commutator_a, same.commutator_b);
    }

    #[test]
    fn separation_of_identical_pairs_is_none() {
        let mut ev = Evaluator::new(p3());
        let a = ScenarioPair::standard();
        let r = separation_depth(&mut ev, &a, &a, 5);
        assert_eq!(r.separated_at, None);
        assert_eq!(r.observations.len(), 5);
    }

    #[test]
    fn separation_of_standard_and_perturbed() {
        let mut ev = Evaluator::new(p3());
        let r = separation_depth(
            &mut ev,
            &ScenarioPair::standard(),
            &ScenarioPair::perturbed(),
            6,
        );
        let d = r.separated_at.expect("separated by level 4");
        assert!(d <= 4);
    }
}
