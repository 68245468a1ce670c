//! Named elements of the Gupta-Sidki groups and the printed permutations
//! they are checked against.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::perm::{CycleType, PermError, Permutation};
use crate::tree::{Evaluator, GeneratorWord, Letter, TreeElement, TreeParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("z(n) needs n >= 1, got {0}")]
    BadIndex(usize),
    #[error("only p = 3 is supported here, got {0}")]
    UnsupportedArity(u32),
    #[error("depth {0} not supported (expected 3 or 4)")]
    UnsupportedDepth(usize),
    #[error("duplicate catalog name {0}")]
    DuplicateName(String),
    #[error("golden text: {0}")]
    Golden(String),
}

fn word(text: &str) -> GeneratorWord {
    GeneratorWord::new(text.chars().map(|c| match c {
        'x' => Letter::X,
        'X' => Letter::XInv,
        'y' => Letter::Y,
        'Y' => Letter::YInv,
        _ => unreachable!("catalog words use x, X, y, Y only"),
    }))
}

fn w(text: &str) -> TreeElement {
    TreeElement::word(word(text))
}

/// `z_1 = [x,y]`, `z_n = (1, ..., 1, z_{n-1})`.
pub fn z(n: usize, params: TreeParams) -> Result<TreeElement, CatalogError> {
    if n == 0 {
        return Err(CatalogError::BadIndex(n));
    }
    let mut e = w("XYxy");
    for _ in 1..n {
        e = with_last_section(e, params);
    }
    Ok(e)
}

/// The node `(1, ..., 1, e)`.
fn with_last_section(e: TreeElement, params: TreeParams) -> TreeElement {
    let one = TreeElement::identity();
    let mut sections = vec![one; params.p() as usize - 1];
    sections.push(e);
    TreeElement::node(0, sections, params).expect("p sections")
}

/// `[a,b] = a^-1 b^-1 a b`.
pub fn commutator(a: &TreeElement, b: &TreeElement, params: TreeParams) -> TreeElement {
    TreeElement::product(vec![
        a.inverse(params),
        b.inverse(params),
        a.clone(),
        b.clone(),
    ])
    .expect("four factors")
}

#[derive(Debug, Clone)]
pub struct NamedElement {
    pub name: String,
    pub element: TreeElement,
    pub params: TreeParams,
}

/// A pair of elements whose Nielsen classes are compared.
#[derive(Debug, Clone)]
pub struct ScenarioPair {
    pub label: String,
    pub u: TreeElement,
    pub v: TreeElement,
}

impl ScenarioPair {
    pub fn new(label: impl Into<String>, u: TreeElement, v: TreeElement) -> Self {
        Self {
            label: label.into(),
            u,
            v,
        }
    }

    /// `(x, y)`.
    pub fn standard() -> Self {
        Self::new("(x, y)", w("x"), w("y"))
    }

    /// `(x^-1 y^-1 x y x, y)`, a Frattini perturbation of `(x, y)`.
    pub fn perturbed() -> Self {
        Self::new("(x^-1y^-1xy x, y)", w("XYxyx"), w("y"))
    }

    /// `(x, y z_n)`.
    pub fn with_z(n: usize, params: TreeParams) -> Result<Self, CatalogError> {
        Ok(Self::new(
            format!("(x, y z_{n})"),
            w("x"),
            w("y").mul(&z(n, params)?),
        ))
    }

    pub fn commutator(&self, params: TreeParams) -> TreeElement {
        commutator(&self.u, &self.v, params)
    }
}

/// Named elements addressable by name.
#[derive(Debug, Clone)]
pub struct Catalog {
    params: TreeParams,
    entries: BTreeMap<String, NamedElement>,
}

impl Catalog {
    pub fn new(params: TreeParams) -> Self {
        Self {
            params,
            entries: BTreeMap::new(),
        }
    }

    /// `x`, `y`, and for `1 <= n <= max_n`: `z_n`, `yz_n`, `[x,yz_n]`.
    pub fn standard(params: TreeParams, max_n: usize) -> Self {
        let mut cat = Self::new(params);
        cat.insert("x", w("x")).unwrap();
        cat.insert("y", w("y")).unwrap();
        for n in 1..=max_n {
            let zn = z(n, params).unwrap();
            let yzn = w("y").mul(&zn);
            let c = commutator(&w("x"), &yzn, params);
            cat.insert(&format!("z_{n}"), zn).unwrap();
            cat.insert(&format!("yz_{n}"), yzn).unwrap();
            cat.insert(&format!("[x,yz_{n}]"), c).unwrap();
        }
        cat
    }

    pub fn insert(&mut self, name: &str, element: TreeElement) -> Result<(), CatalogError> {
        if self.entries.contains_key(name) {
            return Err(CatalogError::DuplicateName(name.to_string()));
        }
        self.entries.insert(
            name.to_string(),
            NamedElement {
                name: name.to_string(),
                element,
                params: self.params,
            },
        );
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&NamedElement> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthVerdict {
    pub depth: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub depths: Vec<DepthVerdict>,
    pub passed: bool,
}

/// Compares the level images of `lhs` and `rhs` at each depth.
pub fn verify_identity(
    ev: &mut Evaluator,
    lhs: &TreeElement,
    rhs: &TreeElement,
    depths: &[usize],
) -> IdentityReport {
    let depths: Vec<DepthVerdict> = depths
        .iter()
        .map(|&d| DepthVerdict {
            depth: d,
            equal: ev.evaluate(lhs, d) == ev.evaluate(rhs, d),
        })
        .collect();
    let passed = depths.iter().all(|v| v.equal);
    IdentityReport { depths, passed }
}

/// Displayed section formulas as `(lhs, rhs)` pairs.
pub mod identities {
    use super::*;

    /// `[x,y] = (y^-1 x, x, x y)`, p = 3.
    pub fn z1_sections(params: TreeParams) -> (TreeElement, TreeElement) {
        let lhs = commutator(&w("x"), &w("y"), params);
        let rhs = TreeElement::node(0, vec![w("Yx"), w("x"), w("xy")], params).expect("p = 3");
        (lhs, rhs)
    }

    /// `[x, y z_n] = (z_{n-1}^-1 y^-1 x, x, x y z_{n-1})`, p = 3, n >= 2.
    pub fn commutator_yz_p3(
        n: usize,
        params: TreeParams,
    ) -> Result<(TreeElement, TreeElement), CatalogError> {
        if n < 2 {
            return Err(CatalogError::BadIndex(n));
        }
        let zp = z(n - 1, params)?;
        let yzn = w("y").mul(&z(n, params)?);
        let lhs = commutator(&w("x"), &yzn, params);
        let first = zp.inverse(params).mul(&w("Yx"));
        let last = w("xy").mul(&zp);
        let rhs = TreeElement::node(0, vec![first, w("x"), last], params)
            .map_err(|_| CatalogError::UnsupportedArity(params.p()))?;
        Ok((lhs, rhs))
    }

    /// `[x, y z_k] = (z_{k-1}^-1 y^-1 x, x^{p-2}, x, 1, ..., 1, y z_{k-1})`,
    /// p >= 5, k >= 2.
    pub fn commutator_yz_general(
        k: usize,
        params: TreeParams,
    ) -> Result<(TreeElement, TreeElement), CatalogError> {
        if k < 2 {
            return Err(CatalogError::BadIndex(k));
        }
        let p = params.p() as usize;
        if p < 5 {
            return Err(CatalogError::UnsupportedArity(params.p()));
        }
        let zp = z(k - 1, params)?;
        let yzk = w("y").mul(&z(k, params)?);
        let lhs = commutator(&w("x"), &yzk, params);
        let mut sections = vec![TreeElement::identity(); p];
        sections[0] = zp.inverse(params).mul(&w("Yx"));
        sections[1] = TreeElement::word(word("x").pow(p as i64 - 2));
        sections[2] = w("x");
        sections[p - 1] = w("y").mul(&zp);
        let rhs = TreeElement::node(0, sections, params).expect("p sections");
        Ok((lhs, rhs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistinctnessCheck {
    pub label: String,
    pub depth: usize,
    pub names: Vec<String>,
    pub cycle_types: Vec<String>,
    /// The first element's cycle type differs from every other one.
    pub first_distinct: bool,
    pub pairwise_distinct: bool,
}

/// Cycle types of `elements` at `depth`, whether the first differs from all
/// the others, and whether they are pairwise distinct.
pub fn pairwise_distinct(
    ev: &mut Evaluator,
    label: &str,
    elements: &[(&str, TreeElement)],
    depth: usize,
) -> DistinctnessCheck {
    let types: Vec<CycleType> = elements
        .iter()
        .map(|(_, e)| ev.evaluate(e, depth).cycle_type())
        .collect();
    let first_distinct = types.iter().skip(1).all(|t| Some(t) != types.first());
    let distinct = types
        .iter()
        .enumerate()
        .all(|(i, a)| types[i + 1..].iter().all(|b| a != b));
    DistinctnessCheck {
        label: label.to_string(),
        depth,
        names: elements.iter().map(|(n, _)| n.to_string()).collect(),
        cycle_types: types.iter().map(CycleType::to_string).collect(),
        first_distinct,
        pairwise_distinct: distinct,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<DistinctnessCheck>,
    pub passed: bool,
}

/// The non-conjugacy facts read off level quotients for p = 3: `x` against
/// `x y z_2`, `z_2^-1 y^-1 x`, `x y` and `y^-1 x` at `depth` (3 or 4), and
/// `y z_1` against `y` at level 4. A check passes when its first element's
/// cycle type differs from the others; `x y` and `y^-1 x` share a cycle type,
/// so the triples are not pairwise distinct.
pub fn assumption_checks(
    ev: &mut Evaluator,
    depth: usize,
) -> Result<AssumptionReport, CatalogError> {
    let params = ev.params();
    if params.p() != 3 {
        return Err(CatalogError::UnsupportedArity(params.p()));
    }
    if depth != 3 && depth != 4 {
        return Err(CatalogError::UnsupportedDepth(depth));
    }
    let z1 = z(1, params)?;
    let z2 = z(2, params)?;
    let checks = vec![
        pairwise_distinct(
            ev,
            "x, x y z_2, z_2^-1 y^-1 x",
            &[
                ("x", w("x")),
                ("xyz_2", w("xy").mul(&z2)),
                ("z_2^-1y^-1x", z2.inverse(params).mul(&w("Yx"))),
            ],
            depth,
        ),
        pairwise_distinct(
            ev,
            "x, x y, y^-1 x",
            &[("x", w("x")), ("xy", w("xy")), ("y^-1x", w("Yx"))],
            depth,
        ),
        pairwise_distinct(
            ev,
            "y z_1, y",
            &[("yz_1", w("y").mul(&z1)), ("y", w("y"))],
            4,
        ),
    ];
    let passed = checks.iter().all(|c| c.first_distinct);
    Ok(AssumptionReport { checks, passed })
}

/// A permutation printed in the literature, stored as cycle text.
#[derive(Debug, Clone, Copy)]
pub struct Golden {
    pub name: &'static str,
    /// Element text in the word grammar.
    pub word: &'static str,
    pub depth: usize,
    pub text: &'static str,
}

/// The five printed level-4 permutations for p = 3.
pub const GOLDEN: [Golden; 5] = [
    Golden {
        name: "pi(x)",
        word: "x",
        depth: 4,
        text: include_str!("../golden/pi_x.txt"),
    },
    Golden {
        name: "pi(y)",
        word: "y",
        depth: 4,
        text: include_str!("../golden/pi_y.txt"),
    },
    Golden {
        name: "pi(y x^-1 y^-1 x y)",
        word: "y X Y x y",
        depth: 4,
        text: include_str!("../golden/example_yXYxy.txt"),
    },
    Golden {
        name: "[u, v] for (x, y)",
        word: "comm(x, y)",
        depth: 4,
        text: include_str!("../golden/comm_x_y.txt"),
    },
    Golden {
        name: "[u', v'] for (x^-1y^-1xy x, y)",
        word: "comm(XYxyx, y)",
        depth: 4,
        text: include_str!("../golden/comm_XYxyx_y.txt"),
    },
];

impl Golden {
    pub fn permutation(&self, params: TreeParams) -> Result<Permutation, CatalogError> {
        let expanded = expand_ellipses(self.text)?;
        Permutation::parse_cycles(&expanded, params.level_size(self.depth))
            .map_err(|e: PermError| CatalogError::Golden(format!("{}: {e}", self.name)))
    }
}

/// Expands `(a,b,c)...(a',b',c')` into the run of cycles obtained by adding
/// 1 to every entry until the closing cycle is reached. Both `...` and `…`
/// are accepted.
pub fn expand_ellipses(text: &str) -> Result<String, CatalogError> {
    let text = text.replace('…', "...");
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = String::new();
    let mut rest = compact.as_str();
    let mut last: Option<Vec<i64>> = None;
    let err = |m: &str| CatalogError::Golden(m.to_string());
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix("...") {
            let from = last
                .clone()
                .ok_or_else(|| err("ellipsis without a preceding cycle"))?;
            let close = after
                .find(')')
                .ok_or_else(|| err("ellipsis without a closing cycle"))?;
            let to =
                parse_cycle(&after[..=close]).ok_or_else(|| err("bad cycle after ellipsis"))?;
            if to.len() != from.len() {
                return Err(err("ellipsis endpoints differ in length"));
            }
            let steps = to[0] - from[0];
            if steps <= 0 || from.iter().zip(&to).any(|(a, b)| b - a != steps) {
                return Err(err("ellipsis endpoints are not a unit progression"));
            }
            for k in 1..steps {
                let c: Vec<String> = from.iter().map(|v| (v + k).to_string()).collect();
                out.push_str(&format!("({})", c.join(",")));
            }
            rest = after;
            continue;
        }
        let close = rest.find(')').ok_or_else(|| err("unterminated cycle"))?;
        let cycle = parse_cycle(&rest[..=close]).ok_or_else(|| err("bad cycle"))?;
        out.push_str(&rest[..=close]);
        last = Some(cycle);
        rest = &rest[close + 1..];
        if let Some(r) = rest.strip_prefix('·') {
            rest = r;
        }
    }
    Ok(out)
}

fn parse_cycle(s: &str) -> Option<Vec<i64>> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|t| t.parse().ok()).collect()
}
