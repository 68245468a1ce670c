//! The p-ary rooted tree, the generators `x` and `y`, and evaluation of
//! words and wreath-recursive elements to permutations of a tree level.
//!
//! Level-`d` vertices are numbered `1..=p^d` big-endian: the first letter of
//! a path is the most significant digit.
//!
//! Words act on the right: in `uv` the letter `u` moves a vertex first. This
//! is [`WordConvention::LeftToRight`], the shipped default; the opposite
//! reading is kept so the golden suite can show that it breaks the printed
//! permutations.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("arity {0} is not an odd prime")]
    BadArity(u32),
    #[error("letter {letter} out of range 1..{p}")]
    LetterOutOfRange { letter: u32, p: u32 },
    #[error("path has length {len}, expected {depth}")]
    PathLength { len: usize, depth: usize },
    #[error("degree {degree} is not a power of {p}")]
    NotALevel { degree: usize, p: u32 },
    #[error("permutation does not preserve sibling blocks (point {0})")]
    NotTreePermutation(usize),
    #[error("node has {got} sections, expected {p}")]
    SectionCount { got: usize, p: u32 },
    #[error("product must have at least one factor")]
    EmptyProduct,
}

/// Arity of the tree. The root cycle is `pi = (1,2,...,p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeParams {
    p: u32,
}

impl TreeParams {
    pub fn new(p: u32) -> Result<Self, TreeError> {
        if p < 3 || !is_prime(p) {
            return Err(TreeError::BadArity(p));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `pi^exp(s)` for a letter `s` in `1..=p`.
    pub fn rotate(&self, s: u32, exp: i64) -> u32 {
        let p = self.p as i64;
        ((s as i64 - 1 + exp).rem_euclid(p) + 1) as u32
    }

    /// Number of vertices on level `depth`.
    pub fn level_size(&self, depth: usize) -> usize {
        (self.p as usize).pow(depth as u32)
    }

    /// The level whose size is `degree`, if any.
    pub fn depth_of(&self, degree: usize) -> Option<usize> {
        let p = self.p as usize;
        let mut n = 1;
        let mut d = 0;
        while n < degree {
            n *= p;
            d += 1;
        }
        (n == degree).then_some(d)
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// A vertex of the tree as a sequence of letters in `1..=p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexPath(Vec<u32>);

impl VertexPath {
    pub fn new(letters: Vec<u32>, params: TreeParams) -> Result<Self, TreeError> {
        if let Some(&letter) = letters.iter().find(|&&l| l == 0 || l > params.p) {
            return Err(TreeError::LetterOutOfRange {
                letter,
                p: params.p,
            });
        }
        Ok(Self(letters))
    }

    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Inverse of [`leaf_index`].
    pub fn from_leaf_index(index: usize, params: TreeParams, depth: usize) -> Self {
        let p = params.p as usize;
        let mut rest = index - 1;
        let mut letters = vec![0; depth];
        for slot in letters.iter_mut().rev() {
            *slot = (rest % p) as u32 + 1;
            rest /= p;
        }
        Self(letters)
    }
}

/// `1 + sum (letter_t - 1) p^(depth - t)`.
pub fn leaf_index(path: &VertexPath, params: TreeParams, depth: usize) -> Result<usize, TreeError> {
    if path.len() != depth {
        return Err(TreeError::PathLength {
            len: path.len(),
            depth,
        });
    }
    let p = params.p as usize;
    let mut index = 0;
    for &l in path.letters() {
        if l == 0 || l > params.p {
            return Err(TreeError::LetterOutOfRange {
                letter: l,
                p: params.p,
            });
        }
        index = index * p + (l as usize - 1);
    }
    Ok(index + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    X,
    XInv,
    Y,
    YInv,
}

impl Letter {
    /// Fixed alphabet order used by enumeration and conjugator defaults.
    pub const ALL: [Letter; 4] = [Letter::X, Letter::XInv, Letter::Y, Letter::YInv];

    pub fn inverse(self) -> Self {
        match self {
            Letter::X => Letter::XInv,
            Letter::XInv => Letter::X,
            Letter::Y => Letter::YInv,
            Letter::YInv => Letter::Y,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::XInv => 'X',
            Letter::Y => 'y',
            Letter::YInv => 'Y',
        }
    }

    /// Exponent of `x` contributed at the root.
    fn root_exp(self) -> i64 {
        match self {
            Letter::X => 1,
            Letter::XInv => -1,
            _ => 0,
        }
    }

    /// Section of the letter at the root child `s`, as a word of length at
    /// most one. `y = (x, x^-1, 1, ..., 1, y)`; inverse sections come from
    /// inverting each section.
    fn section(self, s: u32, params: TreeParams) -> Option<Letter> {
        let inv = self == Letter::YInv;
        match self {
            Letter::X | Letter::XInv => None,
            Letter::Y | Letter::YInv => {
                if s == params.p {
                    Some(self)
                } else if s == 1 {
                    Some(if inv { Letter::XInv } else { Letter::X })
                } else if s == 2 {
                    Some(if inv { Letter::X } else { Letter::XInv })
                } else {
                    None
                }
            }
        }
    }
}

/// A freely reduced word in `x^{±1}, y^{±1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct GeneratorWord(Vec<Letter>);

impl GeneratorWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Self(vec![l])
    }

    /// Freely reduces `letters`. No group relations are applied.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, exp: i64) -> Self {
        let base = if exp < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        Self::new(
            std::iter::repeat_n(base.0.iter().copied(), exp.unsigned_abs() as usize).flatten(),
        )
    }

    /// Image in `G/St(1) = Z/p`.
    pub fn root_exp(&self, params: TreeParams) -> u32 {
        let e: i64 = self.0.iter().map(|l| l.root_exp()).sum();
        e.rem_euclid(params.p as i64) as u32
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Image of a path under a single generator.
pub fn act_generator(letter: Letter, path: &VertexPath, params: TreeParams) -> VertexPath {
    let mut out = path.0.clone();
    let mut cur = Some(letter);
    for slot in out.iter_mut() {
        let Some(l) = cur else { break };
        let s = *slot;
        *slot = params.rotate(s, l.root_exp());
        cur = l.section(s, params);
    }
    VertexPath(out)
}

#[derive(Debug)]
pub enum ElementKind {
    Word(GeneratorWord),
    /// `sections[s-1]` acts on subtree `s`, then `x^root_exp` at the root.
    Node {
        root_exp: u32,
        sections: Vec<TreeElement>,
    },
    /// Factors act in list order, first factor first.
    Product(Vec<TreeElement>),
}

/// An element of `Aut T_p` given by a word, a wreath node or a product.
/// Cloning shares structure; evaluation caches on that shared identity.
#[derive(Clone)]
pub struct TreeElement(Arc<ElementKind>);

impl TreeElement {
    pub fn word(w: GeneratorWord) -> Self {
        Self(Arc::new(ElementKind::Word(w)))
    }

    pub fn identity() -> Self {
        Self::word(GeneratorWord::empty())
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(GeneratorWord::letter(l))
    }

    pub fn node(
        root_exp: u32,
        sections: Vec<TreeElement>,
        params: TreeParams,
    ) -> Result<Self, TreeError> {
        if sections.len() != params.p as usize {
            return Err(TreeError::SectionCount {
                got: sections.len(),
                p: params.p,
            });
        }
        Ok(Self(Arc::new(ElementKind::Node {
            root_exp: root_exp % params.p,
            sections,
        })))
    }

    pub fn product(factors: Vec<TreeElement>) -> Result<Self, TreeError> {
        if factors.is_empty() {
            return Err(TreeError::EmptyProduct);
        }
        Ok(Self(Arc::new(ElementKind::Product(factors))))
    }

    /// `self` then `other`; two plain words are concatenated and reduced.
    pub fn mul(&self, other: &TreeElement) -> TreeElement {
        match (self.kind(), other.kind()) {
            (ElementKind::Word(a), ElementKind::Word(b)) => Self::word(a.concat(b)),
            _ => Self(Arc::new(ElementKind::Product(vec![
                self.clone(),
                other.clone(),
            ]))),
        }
    }

    pub fn kind(&self) -> &ElementKind {
        &self.0
    }

    pub fn as_word(&self) -> Option<&GeneratorWord> {
        match self.kind() {
            ElementKind::Word(w) => Some(w),
            _ => None,
        }
    }

    fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn inverse(&self, params: TreeParams) -> TreeElement {
        match self.kind() {
            ElementKind::Word(w) => Self::word(w.inverse()),
            ElementKind::Node { root_exp, sections } => {
                // g: (s, v) -> (pi^i s, g_s v), so g^-1 has section g_{pi^-i t}^-1 at t.
                let i = *root_exp as i64;
                let inv_sections = (1..=params.p)
                    .map(|t| {
                        let s = params.rotate(t, -i);
                        sections[s as usize - 1].inverse(params)
                    })
                    .collect();
                Self(Arc::new(ElementKind::Node {
                    root_exp: (params.p - root_exp) % params.p,
                    sections: inv_sections,
                }))
            }
            ElementKind::Product(fs) => Self(Arc::new(ElementKind::Product(
                fs.iter().rev().map(|f| f.inverse(params)).collect(),
            ))),
        }
    }

    pub fn pow(&self, exp: i64, params: TreeParams) -> TreeElement {
        if let ElementKind::Word(w) = self.kind() {
            return Self::word(w.pow(exp));
        }
        let base = if exp < 0 {
            self.inverse(params)
        } else {
            self.clone()
        };
        match exp.unsigned_abs() {
            0 => Self::identity(),
            1 => base,
            n => Self(Arc::new(ElementKind::Product(vec![base; n as usize]))),
        }
    }

    /// Image in `G/St(1) = Z/p`.
    pub fn root_exp(&self, params: TreeParams) -> u32 {
        match self.kind() {
            ElementKind::Word(w) => w.root_exp(params),
            ElementKind::Node { root_exp, .. } => *root_exp,
            ElementKind::Product(fs) => {
                fs.iter().map(|f| f.root_exp(params)).sum::<u32>() % params.p
            }
        }
    }

    /// Section at the root child `s` together with the image `x^i(s)`.
    fn section_at(&self, s: u32, params: TreeParams) -> (TreeElement, u32) {
        match self.kind() {
            ElementKind::Word(w) => {
                let (root, sections) = decompose_at(w, params);
                (
                    Self::word(sections[s as usize - 1].clone()),
                    params.rotate(s, root as i64),
                )
            }
            ElementKind::Node { root_exp, sections } => (
                sections[s as usize - 1].clone(),
                params.rotate(s, *root_exp as i64),
            ),
            ElementKind::Product(fs) => {
                let mut pos = s;
                let mut parts = Vec::with_capacity(fs.len());
                for f in fs {
                    let (sec, next) = f.section_at(pos, params);
                    parts.push(sec);
                    pos = next;
                }
                (simplify_product(parts), pos)
            }
        }
    }
}

fn simplify_product(parts: Vec<TreeElement>) -> TreeElement {
    if parts.iter().all(|p| p.as_word().is_some()) {
        let letters = parts
            .iter()
            .flat_map(|p| p.as_word().unwrap().letters().to_vec())
            .collect::<Vec<_>>();
        return TreeElement::word(GeneratorWord::new(letters));
    }
    let parts: Vec<_> = parts
        .into_iter()
        .filter(|p| p.as_word().is_none_or(|w| !w.is_empty()))
        .collect();
    match parts.len() {
        0 => TreeElement::identity(),
        1 => parts.into_iter().next().unwrap(),
        _ => TreeElement(Arc::new(ElementKind::Product(parts))),
    }
}

impl fmt::Debug for TreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ElementKind::Word(w) => write!(f, "{w}"),
            ElementKind::Node { root_exp, sections } => {
                if *root_exp != 0 {
                    write!(f, "x^{root_exp}")?;
                }
                write!(f, "(")?;
                for (i, s) in sections.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{s:?}")?;
                }
                write!(f, ")")
            }
            ElementKind::Product(fs) => {
                write!(f, "[")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    write!(f, "{x:?}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Wreath decomposition `w = x^i (w_1, ..., w_p)`: the returned sections are
/// indexed by the child the vertex starts in, and act before the root
/// rotation.
pub fn decompose(w: &GeneratorWord, params: TreeParams) -> (u32, Vec<GeneratorWord>) {
    decompose_at(w, params)
}

fn decompose_at(w: &GeneratorWord, params: TreeParams) -> (u32, Vec<GeneratorWord>) {
    let sections = (1..=params.p)
        .map(|start| {
            let mut pos = start;
            let mut letters = Vec::new();
            for &l in w.letters() {
                if let Some(sec) = l.section(pos, params) {
                    letters.push(sec);
                }
                pos = params.rotate(pos, l.root_exp());
            }
            GeneratorWord::new(letters)
        })
        .collect();
    (w.root_exp(params), sections)
}

/// Iterated section along `path`.
pub fn section(e: &TreeElement, path: &VertexPath, params: TreeParams) -> TreeElement {
    path.letters()
        .iter()
        .fold(e.clone(), |acc, &s| acc.section_at(s, params).0)
}

/// How a word maps onto composition of its letters' permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordConvention {
    /// The leftmost letter acts first (right action).
    #[default]
    LeftToRight,
    /// The rightmost letter acts first (function composition).
    RightToLeft,
}

/// Evaluates tree elements to level permutations, caching results per
/// element and depth. One evaluator per worker.
pub struct Evaluator {
    params: TreeParams,
    convention: WordConvention,
    letters: HashMap<(Letter, usize), Arc<Permutation>>,
    memo: HashMap<(usize, usize), (TreeElement, Arc<Permutation>)>,
}

impl Evaluator {
    pub fn new(params: TreeParams) -> Self {
        Self::with_convention(params, WordConvention::LeftToRight)
    }

    pub fn with_convention(params: TreeParams, convention: WordConvention) -> Self {
        Self {
            params,
            convention,
            letters: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    pub fn params(&self) -> TreeParams {
        self.params
    }

    pub fn convention(&self) -> WordConvention {
        self.convention
    }

    /// Permutation of level `depth` (on `p^depth` points) induced by `e`.
    pub fn evaluate(&mut self, e: &TreeElement, depth: usize) -> Arc<Permutation> {
        let key = (e.ptr_id(), depth);
        if let Some((_, perm)) = self.memo.get(&key) {
            return perm.clone();
        }
        let perm = Arc::new(self.evaluate_uncached(e, depth));
        self.memo.insert(key, (e.clone(), perm.clone()));
        perm
    }

    pub fn evaluate_word(&mut self, w: &GeneratorWord, depth: usize) -> Permutation {
        let n = self.params.level_size(depth);
        let mut acc = Permutation::identity(n);
        for &l in w.letters() {
            let lp = self.letter(l, depth);
            acc = match self.convention {
                WordConvention::LeftToRight => Permutation::compose_unchecked(&lp, &acc),
                WordConvention::RightToLeft => Permutation::compose_unchecked(&acc, &lp),
            };
        }
        acc
    }

    fn evaluate_uncached(&mut self, e: &TreeElement, depth: usize) -> Permutation {
        if depth == 0 {
            return Permutation::identity(1);
        }
        match e.kind() {
            ElementKind::Word(w) => self.evaluate_word(w, depth),
            ElementKind::Node { root_exp, sections } => {
                let p = self.params.p as usize;
                let block = self.params.level_size(depth - 1);
                let mut images = vec![0u32; p * block];
                for (s, sec) in sections.iter().enumerate() {
                    let sp = self.evaluate(sec, depth - 1);
                    let target = (s + *root_exp as usize) % p;
                    for (r, &img) in sp.images0().iter().enumerate() {
                        images[s * block + r] = (target * block) as u32 + img;
                    }
                }
                Permutation::from_zero_based_unchecked(images)
            }
            ElementKind::Product(fs) => {
                let mut acc = Permutation::identity(self.params.level_size(depth));
                for f in fs {
                    let fp = self.evaluate(f, depth);
                    acc = match self.convention {
                        WordConvention::LeftToRight => Permutation::compose_unchecked(&fp, &acc),
                        WordConvention::RightToLeft => Permutation::compose_unchecked(&acc, &fp),
                    };
                }
                acc
            }
        }
    }

    /// Level permutation of a single generator, built from the recursion
    /// `x(s v) = pi(s) v`, `y = (x, x^-1, 1, ..., 1, y)`.
    pub fn letter(&mut self, l: Letter, depth: usize) -> Arc<Permutation> {
        if let Some(perm) = self.letters.get(&(l, depth)) {
            return perm.clone();
        }
        let perm = if depth == 0 {
            Permutation::identity(1)
        } else {
            let p = self.params.p as usize;
            let block = self.params.level_size(depth - 1);
            let mut images = vec![0u32; p * block];
            let shift = l.root_exp();
            for s in 1..=self.params.p {
                let target = self.params.rotate(s, shift) as usize - 1;
                let sec = l
                    .section(s, self.params)
                    .map(|sl| self.letter(sl, depth - 1));
                let base = (s as usize - 1) * block;
                for r in 0..block {
                    let img = sec.as_ref().map_or(r, |sp| sp.image0(r));
                    images[base + r] = (target * block + img) as u32;
                }
            }
            Permutation::from_zero_based_unchecked(images)
        };
        let perm = Arc::new(perm);
        self.letters.insert((l, depth), perm.clone());
        perm
    }
}

/// One-shot evaluation with the default convention.
pub fn evaluate(e: &TreeElement, params: TreeParams, depth: usize) -> Permutation {
    Evaluator::new(params).evaluate(e, depth).as_ref().clone()
}

/// Induced permutation of level `d` from a permutation of level `d + 1`.
pub fn project(a: &Permutation, params: TreeParams, d: usize) -> Result<Permutation, TreeError> {
    let p = params.p as usize;
    let expected = params.level_size(d + 1);
    if a.degree() != expected {
        return Err(TreeError::NotALevel {
            degree: a.degree(),
            p: params.p,
        });
    }
    let mut images = vec![0usize; params.level_size(d)];
    for (parent, image) in images.iter_mut().enumerate() {
        let target = a.image0(parent * p) / p;
        for child in 1..p {
            let point = parent * p + child;
            if a.image0(point) / p != target {
                return Err(TreeError::NotTreePermutation(point + 1));
            }
        }
        *image = target + 1;
    }
    Permutation::from_images(&images).map_err(|_| TreeError::NotTreePermutation(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> TreeParams {
        TreeParams::new(3).unwrap()
    }

    fn w(text: &str) -> GeneratorWord {
        GeneratorWord::new(text.chars().map(|c| match c {
            'x' => Letter::X,
            'X' => Letter::XInv,
            'y' => Letter::Y,
            'Y' => Letter::YInv,
            _ => panic!("bad letter"),
        }))
    }

    fn path(letters: &[u32], params: TreeParams) -> VertexPath {
        VertexPath::new(letters.to_vec(), params).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(TreeParams::new(2).is_err());
        assert!(TreeParams::new(9).is_err());
        assert!(TreeParams::new(5).is_ok());
        assert_eq!(p3().depth_of(81), Some(4));
        assert_eq!(p3().depth_of(80), None);
        assert_eq!(p3().depth_of(1), Some(0));
    }

    #[test]
    fn leaf_indices() {
        let q = p3();
        assert_eq!(leaf_index(&path(&[1, 1, 1, 1], q), q, 4).unwrap(), 1);
        assert_eq!(leaf_index(&path(&[2, 1, 1, 1], q), q, 4).unwrap(), 28);
        assert_eq!(leaf_index(&path(&[1, 2, 1, 1], q), q, 4).unwrap(), 10);
        assert_eq!(leaf_index(&path(&[3, 3, 3, 3], q), q, 4).unwrap(), 81);
        assert!(leaf_index(&path(&[1, 2], q), q, 4).is_err());
        assert!(VertexPath::new(vec![4], q).is_err());
        for i in 1..=81 {
            let v = VertexPath::from_leaf_index(i, q, 4);
            assert_eq!(leaf_index(&v, q, 4).unwrap(), i);
        }
    }

    #[test]
    fn generator_actions() {
        let q = p3();
        assert_eq!(
            act_generator(Letter::X, &path(&[1, 1, 1, 1], q), q),
            path(&[2, 1, 1, 1], q)
        );
        // y on p sigma recurses into y on sigma
        assert_eq!(
            act_generator(Letter::Y, &path(&[3, 1, 2], q), q),
            path(&[3, 1, 3], q)
        );
        assert_eq!(
            act_generator(Letter::Y, &path(&[3, 3, 1, 2], q), q),
            path(&[3, 3, 1, 3], q)
        );
        let q5 = TreeParams::new(5).unwrap();
        let v = path(&[4, 2, 5], q5);
        assert_eq!(act_generator(Letter::Y, &v, q5), v);
        assert_eq!(
            act_generator(Letter::Y, &VertexPath::root(), q5),
            VertexPath::root()
        );
        for l in Letter::ALL {
            let v = path(&[1, 2, 3, 3], q);
            assert_eq!(act_generator(l.inverse(), &act_generator(l, &v, q), q), v);
        }
    }

    #[test]
    fn letter_permutations_agree_with_path_action() {
        for p in [3, 5] {
            let q = TreeParams::new(p).unwrap();
            let mut ev = Evaluator::new(q);
            for depth in 1..=3 {
                for l in Letter::ALL {
                    let perm = ev.letter(l, depth);
                    for i in 1..=q.level_size(depth) {
                        let v = VertexPath::from_leaf_index(i, q, depth);
                        let img = leaf_index(&act_generator(l, &v, q), q, depth).unwrap();
                        assert_eq!(perm.apply(i), img);
                    }
                }
            }
        }
    }

    #[test]
    fn word_evaluation_applies_leftmost_letter_first() {
        let q = p3();
        let mut ev = Evaluator::new(q);
        let xy = ev.evaluate_word(&w("xy"), 3);
        for i in 1..=27 {
            let v = VertexPath::from_leaf_index(i, q, 3);
            let img = act_generator(Letter::Y, &act_generator(Letter::X, &v, q), q);
            assert_eq!(xy.apply(i), leaf_index(&img, q, 3).unwrap());
        }
    }

    #[test]
    fn empty_word_and_depth_zero() {
        let q = p3();
        let mut ev = Evaluator::new(q);
        assert!(ev.evaluate(&TreeElement::identity(), 4).is_identity());
        let e = TreeElement::word(w("xyXy"));
        let z = ev.evaluate(&e, 0);
        assert_eq!(z.degree(), 1);
    }

    #[test]
    fn free_reduction() {
        assert!(w("xXyY").is_empty());
        assert_eq!(w("xyYx"), w("xx"));
        assert_eq!(w("xy").inverse(), w("YX"));
        assert_eq!(w("xy").pow(-2), w("YXYX"));
        assert_eq!(w("xy").to_string(), "xy");
        assert_eq!(GeneratorWord::empty().to_string(), "1");
    }

    #[test]
    fn decompose_generators() {
        let q = p3();
        assert_eq!(decompose(&w("x"), q), (1, vec![GeneratorWord::empty(); 3]));
        assert_eq!(decompose(&w("y"), q), (0, vec![w("x"), w("X"), w("y")]));
        let q5 = TreeParams::new(5).unwrap();
        let (r, secs) = decompose(&w("y"), q5);
        assert_eq!(r, 0);
        assert_eq!(secs, vec![w("x"), w("X"), w(""), w(""), w("y")]);
    }

    #[test]
    fn commutator_word_sections() {
        // [x,y] = x^-1 y^-1 x y = (y^-1 x, x, x y) up to equality in the group
        let q = p3();
        let (r, secs) = decompose(&w("XYxy"), q);
        assert_eq!(r, 0);
        let mut ev = Evaluator::new(q);
        let expected = [w("Yx"), w("x"), w("xy")];
        for (s, e) in secs.iter().zip(expected.iter()) {
            for d in 0..=3 {
                assert_eq!(ev.evaluate_word(s, d), ev.evaluate_word(e, d));
            }
        }
    }

    #[test]
    fn sections() {
        let q = p3();
        let a = TreeElement::word(w("x"));
        let b = TreeElement::word(w("y"));
        let c = TreeElement::word(w("xy"));
        let n = TreeElement::node(0, vec![a, b.clone(), c], q).unwrap();
        let s = section(&n, &path(&[2], q), q);
        assert_eq!(s.as_word(), Some(&w("y")));
        assert_eq!(section(&b, &path(&[3], q), q).as_word(), Some(&w("y")));
        assert_eq!(
            section(&b, &path(&[3, 3, 3], q), q).as_word(),
            Some(&w("y"))
        );
        let q5 = TreeParams::new(5).unwrap();
        assert_eq!(
            section(&TreeElement::word(w("y")), &path(&[3], q5), q5).as_word(),
            Some(&GeneratorWord::empty())
        );
    }

    #[test]
    fn node_inverse() {
        let q = p3();
        let mut ev = Evaluator::new(q);
        let n = TreeElement::node(
            1,
            vec![
                TreeElement::word(w("y")),
                TreeElement::word(w("xy")),
                TreeElement::word(w("Y")),
            ],
            q,
        )
        .unwrap();
        let inv = n.inverse(q);
        for d in 0..=3 {
            assert_eq!(*ev.evaluate(&inv, d), ev.evaluate(&n, d).inverse());
        }
    }

    #[test]
    fn projection() {
        let q = p3();
        assert!(project(&Permutation::identity(81), q, 3)
            .unwrap()
            .is_identity());
        let mut ev = Evaluator::new(q);
        let e = TreeElement::word(w("xyxY"));
        let a4 = ev.evaluate(&e, 4);
        let a3 = ev.evaluate(&e, 3);
        assert_eq!(project(&a4, q, 3).unwrap(), *a3);
        // 1 and 4 have different parents
        let bad = Permutation::parse_cycles("(1,4)", 81).unwrap();
        assert_eq!(project(&bad, q, 3), Err(TreeError::NotTreePermutation(2)));
        assert!(project(&Permutation::identity(27), q, 3).is_err());
    }

    #[test]
    fn memoization_shares_nodes() {
        let q = p3();
        let mut ev = Evaluator::new(q);
        let mut e = TreeElement::word(w("XYxy"));
        for _ in 0..30 {
            let one = TreeElement::identity();
            e = TreeElement::node(0, vec![one.clone(), one, e], q).unwrap();
        }
        // Depth 6 only reaches six nodes deep; the rest is never visited.
        assert!(ev.evaluate(&e, 6).is_identity());
    }
}
