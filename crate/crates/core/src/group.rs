//! Finite groups behind one interface: congruence quotients `G_p / St(n)` as
//! permutation groups of level `n`, and finite abelian groups
//! `Z/m_1 x ... x Z/m_r` with `m_r | ... | m_1` as residue vectors.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::StabilizerChain;
use crate::perm::{key_width, Permutation};
use crate::tree::{Evaluator, GeneratorWord, Letter, TreeElement, TreeParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("element does not belong to this group handle")]
    HandleMismatch,
    #[error("bad group descriptor {0:?}: {1}")]
    BadDescriptor(String, String),
    #[error("group enumeration exceeded cap after visiting {visited} elements")]
    CapExceeded { visited: usize },
    #[error("tuple must be nonempty")]
    EmptyTuple,
}

/// Which group a handle stands for; also the textual descriptor
/// (`quotient:p=3,depth=4`, `abelian:5,5`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupDescriptor {
    Quotient { p: u32, depth: usize },
    Abelian { moduli: Vec<u64> },
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Quotient { p, depth } => write!(f, "quotient:p={p},depth={depth}"),
            GroupDescriptor::Abelian { moduli } => {
                let m: Vec<String> = moduli.iter().map(u64::to_string).collect();
                write!(f, "abelian:{}", m.join(","))
            }
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| GroupError::BadDescriptor(s.to_string(), msg.to_string());
        let (kind, rest) = s.trim().split_once(':').ok_or_else(|| bad("missing ':'"))?;
        match kind.trim() {
            "quotient" => {
                let mut p = None;
                let mut depth = None;
                for field in rest.split(',') {
                    let (k, v) = field
                        .split_once('=')
                        .ok_or_else(|| bad("expected key=value"))?;
                    let v = v.trim();
                    match k.trim() {
                        "p" => p = Some(v.parse().map_err(|_| bad("p is not an integer"))?),
                        "depth" => {
                            depth = Some(v.parse().map_err(|_| bad("depth is not an integer"))?)
                        }
                        other => return Err(bad(&format!("unknown key {other}"))),
                    }
                }
                Ok(GroupDescriptor::Quotient {
                    p: p.ok_or_else(|| bad("missing p"))?,
                    depth: depth.ok_or_else(|| bad("missing depth"))?,
                })
            }
            "abelian" => {
                let moduli = rest
                    .split(',')
                    .map(|m| m.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad("moduli must be integers"))?;
                Ok(GroupDescriptor::Abelian { moduli })
            }
            _ => Err(bad("kind must be 'quotient' or 'abelian'")),
        }
    }
}

/// An element of a group handle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Perm(Permutation),
    /// Smallest nonnegative residues, one per modulus.
    Residues(Vec<u64>),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Perm(p) => write!(f, "{p}"),
            GroupElement::Residues(v) => {
                let s: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "({})", s.join(","))
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Quotient {
        params: TreeParams,
        depth: usize,
        chain: StabilizerChain,
    },
    Abelian {
        moduli: Vec<u64>,
    },
}

/// A finite group with fixed generators. Quotient handles build their
/// stabilizer chain eagerly.
#[derive(Debug, Clone)]
pub struct GroupHandle {
    kind: Kind,
    generators: Vec<GroupElement>,
}

impl GroupHandle {
    /// `G_p / St(depth)`, generated by the level images of `x` and `y`.
    pub fn quotient(params: TreeParams, depth: usize) -> Self {
        let mut ev = Evaluator::new(params);
        let gens: Vec<Permutation> = [Letter::X, Letter::Y]
            .into_iter()
            .map(|l| ev.letter(l, depth).as_ref().clone())
            .collect();
        let chain = StabilizerChain::build(&gens).expect("generators share a degree");
        Self {
            kind: Kind::Quotient {
                params,
                depth,
                chain,
            },
            generators: gens.into_iter().map(GroupElement::Perm).collect(),
        }
    }

    /// `Z/m_1 x ... x Z/m_r`; requires `m_i >= 2` and `m_{i+1} | m_i`.
    pub fn abelian(moduli: &[u64]) -> Result<Self, GroupError> {
        let desc = GroupDescriptor::Abelian {
            moduli: moduli.to_vec(),
        };
        let bad = |msg: &str| GroupError::BadDescriptor(desc.to_string(), msg.to_string());
        if moduli.is_empty() {
            return Err(bad("need at least one modulus"));
        }
        if moduli.iter().any(|&m| m < 2) {
            return Err(bad("moduli must be at least 2"));
        }
        if moduli.windows(2).any(|w| w[0] % w[1] != 0) {
            return Err(bad("moduli must satisfy m_(i+1) | m_i"));
        }
        let r = moduli.len();
        let generators = (0..r)
            .map(|i| {
                let mut v = vec![0; r];
                v[i] = 1;
                GroupElement::Residues(v)
            })
            .collect();
        Ok(Self {
            kind: Kind::Abelian {
                moduli: moduli.to_vec(),
            },
            generators,
        })
    }

    pub fn from_descriptor(desc: &GroupDescriptor) -> Result<Self, GroupError> {
        match desc {
            GroupDescriptor::Quotient { p, depth } => {
                let params = TreeParams::new(*p)
                    .map_err(|e| GroupError::BadDescriptor(desc.to_string(), e.to_string()))?;
                Ok(Self::quotient(params, *depth))
            }
            GroupDescriptor::Abelian { moduli } => Self::abelian(moduli),
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        match &self.kind {
            Kind::Quotient { params, depth, .. } => GroupDescriptor::Quotient {
                p: params.p(),
                depth: *depth,
            },
            Kind::Abelian { moduli } => GroupDescriptor::Abelian {
                moduli: moduli.clone(),
            },
        }
    }

    pub fn is_quotient(&self) -> bool {
        matches!(self.kind, Kind::Quotient { .. })
    }

    /// Tree parameters and depth of a quotient handle.
    pub fn quotient_params(&self) -> Option<(TreeParams, usize)> {
        match &self.kind {
            Kind::Quotient { params, depth, .. } => Some((*params, *depth)),
            Kind::Abelian { .. } => None,
        }
    }

    pub fn chain(&self) -> Option<&StabilizerChain> {
        match &self.kind {
            Kind::Quotient { chain, .. } => Some(chain),
            Kind::Abelian { .. } => None,
        }
    }

    /// `x̄, ȳ` for quotients, the standard basis for abelian groups.
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Generators interleaved with their inverses: `x, x^-1, y, y^-1`.
    pub fn alphabet(&self) -> Vec<GroupElement> {
        self.generators
            .iter()
            .flat_map(|g| [g.clone(), self.invert_unchecked(g)])
            .collect()
    }

    fn owns(&self, a: &GroupElement) -> bool {
        match (&self.kind, a) {
            (Kind::Quotient { chain, .. }, GroupElement::Perm(p)) => p.degree() == chain.degree(),
            (Kind::Abelian { moduli }, GroupElement::Residues(v)) => {
                v.len() == moduli.len() && v.iter().zip(moduli).all(|(r, m)| r < m)
            }
            _ => false,
        }
    }

    fn check(&self, a: &GroupElement) -> Result<(), GroupError> {
        if self.owns(a) {
            Ok(())
        } else {
            Err(GroupError::HandleMismatch)
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            Kind::Quotient { chain, .. } => {
                GroupElement::Perm(Permutation::identity(chain.degree()))
            }
            Kind::Abelian { moduli } => GroupElement::Residues(vec![0; moduli.len()]),
        }
    }

    /// `a` followed by `b`. For quotients this is `compose(b, a)`, matching
    /// the left-to-right reading of words.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.multiply_unchecked(a, b))
    }

    pub(crate) fn multiply_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&self.kind, a, b) {
            (Kind::Quotient { .. }, GroupElement::Perm(a), GroupElement::Perm(b)) => {
                GroupElement::Perm(Permutation::compose_unchecked(b, a))
            }
            (Kind::Abelian { moduli }, GroupElement::Residues(a), GroupElement::Residues(b)) => {
                GroupElement::Residues(
                    a.iter()
                        .zip(b)
                        .zip(moduli)
                        .map(|((x, y), m)| (x + y) % m)
                        .collect(),
                )
            }
            _ => unreachable!("checked by caller"),
        }
    }

    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(self.invert_unchecked(a))
    }

    pub(crate) fn invert_unchecked(&self, a: &GroupElement) -> GroupElement {
        match (&self.kind, a) {
            (_, GroupElement::Perm(p)) => GroupElement::Perm(p.inverse()),
            (Kind::Abelian { moduli }, GroupElement::Residues(v)) => {
                GroupElement::Residues(v.iter().zip(moduli).map(|(x, m)| (m - x) % m).collect())
            }
            _ => unreachable!("checked by caller"),
        }
    }

    pub fn equal(&self, a: &GroupElement, b: &GroupElement) -> Result<bool, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a == b)
    }

    /// Fixed-width byte key, injective on the elements of this handle.
    pub fn canonical_key(&self, a: &GroupElement) -> Result<Vec<u8>, GroupError> {
        self.check(a)?;
        let mut out = Vec::new();
        self.write_key(a, &mut out);
        Ok(out)
    }

    pub(crate) fn write_key(&self, a: &GroupElement, out: &mut Vec<u8>) {
        match (&self.kind, a) {
            (_, GroupElement::Perm(p)) => p.write_key(out),
            (Kind::Abelian { moduli }, GroupElement::Residues(v)) => {
                let width = key_width(moduli[0] as usize);
                for &r in v {
                    out.extend_from_slice(&r.to_le_bytes()[..width]);
                }
            }
            _ => unreachable!("checked by caller"),
        }
    }

    pub fn order(&self) -> BigUint {
        match &self.kind {
            Kind::Quotient { chain, .. } => chain.order(),
            Kind::Abelian { moduli } => moduli.iter().map(|&m| BigUint::from(m)).product(),
        }
    }

    /// Image of a word: level permutation for quotients; for abelian groups
    /// `x` and `y` map to the first two basis vectors (or to the identity
    /// when the rank is smaller).
    pub fn word_element(&self, w: &GeneratorWord) -> GroupElement {
        match &self.kind {
            Kind::Quotient { params, depth, .. } => {
                GroupElement::Perm(Evaluator::new(*params).evaluate_word(w, *depth))
            }
            Kind::Abelian { moduli } => {
                let mut v = vec![0u64; moduli.len()];
                for &l in w.letters() {
                    let (i, neg) = match l {
                        Letter::X => (0, false),
                        Letter::XInv => (0, true),
                        Letter::Y => (1, false),
                        Letter::YInv => (1, true),
                    };
                    if i < moduli.len() {
                        let m = moduli[i];
                        v[i] = if neg {
                            (v[i] + m - 1) % m
                        } else {
                            (v[i] + 1) % m
                        };
                    }
                }
                GroupElement::Residues(v)
            }
        }
    }

    /// Level image of a tree element (quotient handles only).
    pub fn tree_element(&self, ev: &mut Evaluator, e: &TreeElement) -> Option<GroupElement> {
        match &self.kind {
            Kind::Quotient { depth, .. } => {
                Some(GroupElement::Perm(ev.evaluate(e, *depth).as_ref().clone()))
            }
            Kind::Abelian { .. } => None,
        }
    }

    /// Abelian element from arbitrary integers, reduced modulo each `m_i`.
    pub fn residues(&self, values: &[i64]) -> Result<GroupElement, GroupError> {
        match &self.kind {
            Kind::Abelian { moduli } if moduli.len() == values.len() => Ok(GroupElement::Residues(
                values
                    .iter()
                    .zip(moduli)
                    .map(|(&v, &m)| v.rem_euclid(m as i64) as u64)
                    .collect(),
            )),
            _ => Err(GroupError::HandleMismatch),
        }
    }

    /// Whether `tuple` generates the whole group.
    ///
    /// Quotients compare the order of the generated subgroup with the group
    /// order. Abelian groups use the Frattini quotient: for each prime `q`
    /// dividing `m_1`, the residues mod `q` of the coordinates with `q | m_i`
    /// must have full rank.
    pub fn is_generating(&self, tuple: &[GroupElement]) -> Result<bool, GroupError> {
        if tuple.is_empty() {
            return Err(GroupError::EmptyTuple);
        }
        for a in tuple {
            self.check(a)?;
        }
        Ok(self.is_generating_unchecked(tuple))
    }

    pub(crate) fn is_generating_unchecked(&self, tuple: &[GroupElement]) -> bool {
        match &self.kind {
            Kind::Quotient { chain, .. } => {
                let perms: Vec<Permutation> = tuple
                    .iter()
                    .map(|a| match a {
                        GroupElement::Perm(p) => p.clone(),
                        GroupElement::Residues(_) => unreachable!(),
                    })
                    .collect();
                let sub = StabilizerChain::build(&perms).expect("common degree");
                sub.order() == chain.order()
            }
            Kind::Abelian { moduli } => {
                let vecs: Vec<&[u64]> = tuple
                    .iter()
                    .map(|a| match a {
                        GroupElement::Residues(v) => v.as_slice(),
                        GroupElement::Perm(_) => unreachable!(),
                    })
                    .collect();
                prime_factors(moduli[0]).into_iter().all(|q| {
                    let rows: Vec<usize> =
                        (0..moduli.len()).filter(|&i| moduli[i] % q == 0).collect();
                    let matrix: Vec<Vec<u64>> = rows
                        .iter()
                        .map(|&i| vecs.iter().map(|v| v[i] % q).collect())
                        .collect();
                    rank_mod(matrix, q) == rows.len()
                })
            }
        }
    }

    /// All elements in BFS order from the identity over [`Self::alphabet`],
    /// or `CapExceeded` once more than `cap` elements would be needed.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<GroupElement>, GroupError> {
        let alphabet = self.alphabet();
        let id = self.identity();
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        if cap == 0 {
            return Err(GroupError::CapExceeded { visited: 0 });
        }
        seen.insert(id.clone());
        order.push(id.clone());
        queue.push_back(id);
        while let Some(g) = queue.pop_front() {
            for s in &alphabet {
                let h = self.multiply_unchecked(&g, s);
                if !seen.contains(&h) {
                    if order.len() == cap {
                        return Err(GroupError::CapExceeded { visited: cap });
                    }
                    seen.insert(h.clone());
                    order.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        Ok(order)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Rank of a matrix over `F_q`, `q` prime.
fn rank_mod(mut rows: Vec<Vec<u64>>, q: u64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_multiple_of(q)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod(rows[rank][col], q - 2, q);
        let pivot_row: Vec<u64> = rows[rank]
            .iter()
            .map(|&v| (v as u128 * inv as u128 % q as u128) as u64)
            .collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (c, v) in row.iter_mut().enumerate() {
                    let sub = (f as u128 * pivot_row[c] as u128 % q as u128) as u64;
                    *v = (*v + q - sub) % q;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}
