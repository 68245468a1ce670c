//! Permutations of `{1..N}` together with cycle types, the disjoint-cycle
//! text format and canonical byte keys.
//!
//! Points are 1-based at every public boundary. Internally images are
//! stored 0-based.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("images do not form a bijection of 1..{0}")]
    NotBijection(usize),
    #[error("point {point} out of range 1..{degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("repeated point {0}")]
    RepeatedPoint(usize),
    #[error("malformed cycle text at byte {pos}: {msg}")]
    Malformed { pos: usize, msg: String },
}

/// A bijection of `{1..degree}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    /// Identity on `degree` points. A degree of zero is bumped to one so that
    /// every permutation acts on a nonempty set.
    pub fn identity(degree: usize) -> Self {
        let degree = degree.max(1);
        Self {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 1-based images, `images[i - 1]` being the
    /// image of point `i`.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        if images.is_empty() {
            return Err(PermError::ZeroDegree);
        }
        let n = images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &img in images {
            if img == 0 || img > n {
                return Err(PermError::PointOutOfRange {
                    point: img,
                    degree: n,
                });
            }
            if std::mem::replace(&mut seen[img - 1], true) {
                return Err(PermError::NotBijection(n));
            }
            out.push((img - 1) as u32);
        }
        Ok(Self { images: out })
    }

    /// 0-based constructor for callers that already hold a validated
    /// bijection (tree evaluation, composition).
    pub(crate) fn from_zero_based_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(is_bijection(&images));
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `point`.
    pub fn apply(&self, point: usize) -> usize {
        self.images[point - 1] as usize + 1
    }

    /// Image of a 0-based point.
    #[inline]
    pub fn image0(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub(crate) fn images0(&self) -> &[u32] {
        &self.images
    }

    /// 1-based images in point order.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &j)| i == j as usize)
    }

    /// Smallest moved point, 1-based.
    pub fn first_moved_point(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &j)| i != j as usize)
            .map(|(i, _)| i + 1)
    }

    /// `compose(a, b)(v) = a(b(v))`: `b` is applied first.
    pub fn compose(a: &Self, b: &Self) -> Result<Self, PermError> {
        if a.degree() != b.degree() {
            return Err(PermError::DegreeMismatch {
                left: a.degree(),
                right: b.degree(),
            });
        }
        Ok(Self::compose_unchecked(a, b))
    }

    pub(crate) fn compose_unchecked(a: &Self, b: &Self) -> Self {
        Self {
            images: b.images.iter().map(|&j| a.images[j as usize]).collect(),
        }
    }

    /// Applies `self` first, then `then`. Equivalent to `compose(then, self)`.
    pub fn then(&self, then: &Self) -> Result<Self, PermError> {
        Self::compose(then, self)
    }

    pub fn inverse(&self) -> Self {
        let mut out = vec![0u32; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            out[j as usize] = i as u32;
        }
        Self { images: out }
    }

    pub fn pow(&self, exp: i64) -> Self {
        let base = if exp < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::compose_unchecked(&sq, &acc);
            }
            sq = Self::compose_unchecked(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    /// Disjoint cycles of length at least two, each rotated to start at its
    /// smallest point, ordered by that point. 1-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut cycle = vec![start + 1];
            let mut j = self.images[start] as usize;
            while j != start {
                seen[j] = true;
                cycle.push(j + 1);
                j = self.images[j] as usize;
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        let mut fixed = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                len += 1;
                j = self.images[j] as usize;
            }
            if len == 1 {
                fixed += 1;
            } else {
                lengths.push(len);
            }
        }
        CycleType::from_lengths(lengths, fixed)
    }

    /// Canonical disjoint-cycle text; the identity prints as `()`.
    pub fn format_cycles(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut s = String::new();
        for c in cycles {
            s.push('(');
            for (k, v) in c.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                s.push_str(&v.to_string());
            }
            s.push(')');
        }
        s
    }

    /// Parses disjoint-cycle notation such as `(1,28,55)(2,29,56)`. Omitted
    /// points are fixed; `()` and the empty string denote the identity.
    /// Whitespace is ignored.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        let bytes = text.as_bytes();
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let malformed = |pos: usize, msg: &str| PermError::Malformed {
            pos,
            msg: msg.to_string(),
        };
        loop {
            skip_ws(&mut pos);
            if pos == bytes.len() {
                break;
            }
            if bytes[pos] != b'(' {
                return Err(malformed(pos, "expected '('"));
            }
            pos += 1;
            let mut cycle: Vec<usize> = Vec::new();
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b')' {
                pos += 1;
                continue;
            }
            loop {
                skip_ws(&mut pos);
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(malformed(pos, "expected a point"));
                }
                let point: usize = text[start..pos]
                    .parse()
                    .map_err(|_| malformed(start, "point does not fit in usize"))?;
                if point == 0 || point > degree {
                    return Err(PermError::PointOutOfRange { point, degree });
                }
                if std::mem::replace(&mut used[point - 1], true) {
                    return Err(PermError::RepeatedPoint(point));
                }
                cycle.push(point);
                skip_ws(&mut pos);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b')') => {
                        pos += 1;
                        break;
                    }
                    _ => return Err(malformed(pos, "expected ',' or ')'")),
                }
            }
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                images[a - 1] = (b - 1) as u32;
            }
        }
        Ok(Self { images })
    }

    /// Injective byte key for permutations of a fixed degree. Each image is
    /// written little-endian in the narrowest width that holds `degree - 1`,
    /// so the key length is a function of the degree alone.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.degree() * key_width(self.degree()));
        self.write_key(&mut out);
        out
    }

    pub(crate) fn write_key(&self, out: &mut Vec<u8>) {
        match key_width(self.degree()) {
            1 => out.extend(self.images.iter().map(|&i| i as u8)),
            2 => {
                for &i in &self.images {
                    out.extend_from_slice(&(i as u16).to_le_bytes());
                }
            }
            _ => {
                for &i in &self.images {
                    out.extend_from_slice(&i.to_le_bytes());
                }
            }
        }
    }
}

/// Bytes per image in [`Permutation::canonical_key`].
pub fn key_width(degree: usize) -> usize {
    if degree <= 1 << 8 {
        1
    } else if degree <= 1 << 16 {
        2
    } else {
        4
    }
}

fn is_bijection(images: &[u32]) -> bool {
    let mut seen = vec![false; images.len()];
    images
        .iter()
        .all(|&j| (j as usize) < images.len() && !std::mem::replace(&mut seen[j as usize], true))
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self.format_cycles())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_cycles())
    }
}

/// Multiset of cycle lengths of a permutation. Two permutations of the same
/// degree are conjugate in the symmetric group exactly when their cycle types
/// agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    /// `(length, multiplicity)` for lengths >= 2, longest first.
    pub cycles: Vec<(usize, usize)>,
    pub fixed_points: usize,
}

impl CycleType {
    pub fn from_lengths(mut lengths: Vec<usize>, fixed_points: usize) -> Self {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        let mut cycles: Vec<(usize, usize)> = Vec::new();
        for len in lengths {
            match cycles.last_mut() {
                Some((l, m)) if *l == len => *m += 1,
                _ => cycles.push((len, 1)),
            }
        }
        Self {
            cycles,
            fixed_points,
        }
    }

    pub fn degree(&self) -> usize {
        self.cycles.iter().map(|(l, m)| l * m).sum::<usize>() + self.fixed_points
    }

    /// Order of any permutation with this cycle type.
    pub fn element_order(&self) -> u64 {
        self.cycles
            .iter()
            .fold(1u64, |acc, &(l, _)| lcm(acc, l as u64))
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

/// Compact form `9^4 3^7 1^3`, longest cycles first, fixed points last.
impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .cycles
            .iter()
            .map(|(l, m)| format!("{l}^{m}"))
            .collect();
        if self.fixed_points > 0 {
            parts.push(format!("1^{}", self.fixed_points));
        }
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    #[test]
    fn compose_applies_right_argument_first() {
        let a = p("(1,2)", 3);
        let b = p("(2,3)", 3);
        // b first: 2 -> 3 -> 3
        assert_eq!(Permutation::compose(&a, &b).unwrap().apply(2), 3);
        assert_eq!(a.then(&b).unwrap().apply(2), 1);
    }

    #[test]
    fn compose_identity_and_inverse() {
        let q = p("(1,4,2)(3,5)", 5);
        let id = Permutation::identity(5);
        assert_eq!(Permutation::compose(&q, &id).unwrap(), q);
        assert!(Permutation::compose(&q, &q.inverse())
            .unwrap()
            .is_identity());
    }

    #[test]
    fn squaring_three_cycle() {
        let c = p("(1,2,3)", 3);
        assert_eq!(Permutation::compose(&c, &c).unwrap(), p("(1,3,2)", 3));
        assert_eq!(c.inverse(), p("(1,3,2)", 3));
    }

    #[test]
    fn compose_degree_mismatch() {
        let err = Permutation::compose(&Permutation::identity(3), &Permutation::identity(4));
        assert_eq!(err, Err(PermError::DegreeMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn cycle_type_of_identity() {
        let ct = Permutation::identity(81).cycle_type();
        assert!(ct.cycles.is_empty());
        assert_eq!(ct.fixed_points, 81);
    }

    #[test]
    fn cycle_type_is_sorted_descending() {
        let ct = p("(1,2)(3,4,5)(6,7)", 9).cycle_type();
        assert_eq!(ct.cycles, vec![(3, 1), (2, 2)]);
        assert_eq!(ct.fixed_points, 2);
        assert_eq!(ct.degree(), 9);
        assert_eq!(ct.to_string(), "3^1 2^2 1^2");
        assert_eq!(ct.element_order(), 6);
    }

    #[test]
    fn parse_single_cycle() {
        let q = p("(1,28,55)", 81);
        assert_eq!(q.apply(1), 28);
        assert_eq!(q.apply(28), 55);
        assert_eq!(q.apply(55), 1);
        assert_eq!(q.apply(2), 2);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            Permutation::parse_cycles("(1,1,2)", 3),
            Err(PermError::RepeatedPoint(1))
        );
        assert_eq!(
            Permutation::parse_cycles("(1,2)(2,3)", 3),
            Err(PermError::RepeatedPoint(2))
        );
        assert_eq!(
            Permutation::parse_cycles("(1,4)", 3),
            Err(PermError::PointOutOfRange {
                point: 4,
                degree: 3
            })
        );
        assert!(matches!(
            Permutation::parse_cycles("(1,2", 3),
            Err(PermError::Malformed { .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles("1,2)", 3),
            Err(PermError::Malformed { .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles("(1,,2)", 3),
            Err(PermError::Malformed { .. })
        ));
    }

    #[test]
    fn parse_accepts_whitespace_and_identity() {
        assert!(p("", 4).is_identity());
        assert!(p("()", 4).is_identity());
        assert_eq!(p(" ( 3 , 1 )\n( 2,4 ) ", 4), p("(1,3)(2,4)", 4));
    }

    #[test]
    fn format_is_canonical() {
        let q = p("(5,3)(4,1,2)", 6);
        assert_eq!(q.format_cycles(), "(1,2,4)(3,5)");
        assert_eq!(Permutation::identity(3).format_cycles(), "()");
    }

    #[test]
    fn from_images_validates() {
        assert_eq!(Permutation::from_images(&[2, 1, 3]).unwrap(), p("(1,2)", 3));
        assert_eq!(
            Permutation::from_images(&[1, 1, 3]),
            Err(PermError::NotBijection(3))
        );
        assert!(Permutation::from_images(&[]).is_err());
    }

    #[test]
    fn canonical_key_injective_on_sym4() {
        let mut keys = std::collections::HashSet::new();
        let mut perms = Vec::new();
        for a in 1..=4 {
            for b in 1..=4 {
                for c in 1..=4 {
                    for d in 1..=4 {
                        if let Ok(q) = Permutation::from_images(&[a, b, c, d]) {
                            perms.push(q);
                        }
                    }
                }
            }
        }
        assert_eq!(perms.len(), 24);
        for q in &perms {
            assert_eq!(q.canonical_key().len(), 4);
            keys.insert(q.canonical_key());
        }
        assert_eq!(keys.len(), 24);
    }

    #[test]
    fn canonical_key_length_depends_on_degree_only() {
        assert_eq!(Permutation::identity(81).canonical_key().len(), 81);
        assert_eq!(Permutation::identity(729).canonical_key().len(), 1458);
        assert_eq!(
            Permutation::identity(81).canonical_key(),
            Permutation::identity(81).canonical_key()
        );
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let c = p("(1,2,3,4,5)", 5);
        assert!(c.pow(5).is_identity());
        assert_eq!(c.pow(-1), c.inverse());
        assert_eq!(c.pow(7), c.pow(2));
    }
}
