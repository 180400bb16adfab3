//! Subset-indexed unknowns of the tightness system.
//!
//! There is one unknown `x{D}` per subset `D` of the boundary faces and one
//! boundary unknown `x{D}^(j)` per subset and face `j`. Boundary unknowns
//! satisfy `x{D}^(j) = x{D \ {j}}^(j)`, so only keys with `j ∉ D` are
//! canonical; [`VarKey::canonical`] maps every key onto its canonical form.
//!
//! Text form (1-based, sorted): `x{}`, `x{1,3}`, `x{1,3}^(2)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Subset of `{0, .., 31}` stored as a bitmask (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

pub const MAX_DIM: usize = 31;

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(d: usize) -> Self {
        assert!(d <= MAX_DIM, "dimension {d} too large");
        IndexSet(((1u64 << d) - 1) as u32)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        IndexSet(indices.into_iter().fold(0, |acc, i| {
            assert!(i < MAX_DIM, "index {i} too large");
            acc | (1 << i)
        }))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_DIM && self.0 & (1 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        IndexSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        IndexSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_DIM).filter(move |&i| self.contains(i))
    }

    pub fn max_index(self) -> Option<usize> {
        self.iter().last()
    }

    /// Every subset of `0..d`, ordered by size and then lexicographically.
    pub fn all_subsets(d: usize) -> Vec<IndexSet> {
        let mut sets: Vec<IndexSet> = (0..(1u32 << d)).map(IndexSet).collect();
        sets.sort();
        sets
    }
}

impl Ord for IndexSet {
    /// By cardinality, then lexicographically on the sorted elements.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Key of one unknown: `x{set}` when `boundary` is `None`, else `x{set}^(j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarKey {
    pub set: IndexSet,
    pub boundary: Option<usize>,
}

impl VarKey {
    pub fn plain(set: IndexSet) -> Self {
        Self {
            set,
            boundary: None,
        }
    }

    pub fn boundary(set: IndexSet, j: usize) -> Self {
        Self {
            set,
            boundary: Some(j),
        }
    }

    /// Drops `j` from the set of a boundary key `x{D}^(j)`.
    pub fn canonical(self) -> Self {
        match self.boundary {
            Some(j) => Self::boundary(self.set.without(j), j),
            None => self,
        }
    }

    pub fn is_canonical(self) -> bool {
        self.boundary.is_none_or(|j| !self.set.contains(j))
    }

    /// `x{}` and `x{}^(j)`, fixed to one.
    pub fn is_constant(self) -> bool {
        self.set.is_empty()
    }

    /// Largest 0-based index mentioned by the key.
    pub fn max_index(self) -> Option<usize> {
        self.set.max_index().max(self.boundary)
    }

    fn sort_key(&self) -> (usize, IndexSet) {
        (self.boundary.map_or(0, |j| j + 1), self.set)
    }
}

impl Ord for VarKey {
    /// Plain unknowns first, then boundary unknowns grouped by face.
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for VarKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.set)?;
        if let Some(j) = self.boundary {
            write!(f, "^({})", j + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed variable key `{0}` (expected e.g. `x{{1,3}}` or `x{{1,3}}^(2)`)")]
pub struct ParseKeyError(pub String);

fn parse_index(text: &str) -> Option<usize> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let v: usize = text.parse().ok()?;
    (1..=MAX_DIM).contains(&v).then(|| v - 1)
}

impl FromStr for VarKey {
    type Err = ParseKeyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || ParseKeyError(text.to_string());
        let rest = text.strip_prefix("x{").ok_or_else(err)?;
        let (inner, tail) = rest.split_once('}').ok_or_else(err)?;
        let mut set = IndexSet::EMPTY;
        if !inner.is_empty() {
            for part in inner.split(',') {
                let i = parse_index(part).ok_or_else(err)?;
                if set.contains(i) {
                    return Err(err());
                }
                set = set.with(i);
            }
        }
        let boundary = if tail.is_empty() {
            None
        } else {
            let j = tail
                .strip_prefix("^(")
                .and_then(|t| t.strip_suffix(')'))
                .and_then(parse_index)
                .ok_or_else(err)?;
            Some(j)
        };
        Ok(Self { set, boundary })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_text_round_trips() {
        for text in ["x{}", "x{1,3}", "x{1,3}^(2)", "x{}^(1)", "x{2}^(2)"] {
            assert_eq!(text.parse::<VarKey>().unwrap().to_string(), text);
        }
        assert_eq!("x{3,1}".parse::<VarKey>().unwrap().to_string(), "x{1,3}");
        for bad in [
            "x{0}",
            "x{1,1}",
            "y{1}",
            "x{1}^2",
            "x{1}^()",
            "x{a}",
            "x{1",
            "x{1}^(2)z",
        ] {
            assert!(bad.parse::<VarKey>().is_err(), "{bad}");
        }
    }

    #[test]
    fn canonicalization_drops_the_face_from_the_set() {
        let key: VarKey = "x{1,2}^(1)".parse().unwrap();
        assert!(!key.is_canonical());
        assert_eq!(key.canonical().to_string(), "x{2}^(1)");
        let constant: VarKey = "x{1}^(1)".parse().unwrap();
        assert!(constant.canonical().is_constant());
        assert!("x{2}^(1)".parse::<VarKey>().unwrap().is_canonical());
    }

    #[test]
    fn ordering_is_plain_then_boundary_by_size() {
        let mut keys: Vec<VarKey> = [
            "x{2}^(1)", "x{1,2}", "x{}", "x{3}^(1)", "x{2}", "x{1}", "x{}^(1)",
        ]
        .iter()
        .map(|t| t.parse().unwrap())
        .collect();
        keys.sort();
        let text: Vec<String> = keys.iter().map(ToString::to_string).collect();
        assert_eq!(
            text,
            ["x{}", "x{1}", "x{2}", "x{1,2}", "x{}^(1)", "x{2}^(1)", "x{3}^(1)"]
        );
    }

    #[test]
    fn subsets_by_size_then_lex() {
        let text: Vec<String> = IndexSet::all_subsets(3)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(
            text,
            ["{}", "{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]
        );
    }
}
