//! Finite binary strings, pruned level trees and perfect-subtree embeddings.
//!
//! A [`LevelTree`] of depth `D` is a prefix-closed, pruned subset of
//! `2^{<D}` stored level by level. Perfect subtrees are represented by
//! [`TreeEmbedding`] certificates: an order embedding of the complete tree
//! `{0,1}^{≤h}` whose top images all sit on one level.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported tree depth. Nodes of `2^{<D}` have length at most 63.
pub const MAX_DEPTH: usize = 64;

/// Largest depth for which the complete tree is materialised node by node.
pub const FULL_TREE_MAX_DEPTH: usize = 20;

/// Largest embedding height accepted anywhere.
pub const MAX_HEIGHT: usize = 12;

/// A finite 0/1 string of length at most 64.
///
/// The first bit is stored as the most significant of the `len` low bits, so
/// the derived order (length first, then value) is length-lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BinaryString {
    len: u8,
    bits: u64,
}

impl BinaryString {
    pub const EMPTY: BinaryString = BinaryString { len: 0, bits: 0 };

    /// String of length `len` whose bits, read as a big-endian number, equal `value`.
    pub fn from_value(value: u64, len: usize) -> Result<Self> {
        if len > 64 {
            return Err(Error::Range(format!("string length {len} exceeds 64")));
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::Range(format!("value {value} does not fit in {len} bits")));
        }
        Ok(BinaryString {
            len: len as u8,
            bits: value,
        })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut s = BinaryString::EMPTY;
        for &b in bits {
            if b > 1 {
                return Err(Error::Argument(format!("bit value {b}")));
            }
            s = s.try_child(b)?;
        }
        Ok(s)
    }

    /// All-zero string of the given length.
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_value(0, len)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The strings's numeric value (first bit most significant).
    pub fn value(&self) -> u64 {
        self.bits
    }

    /// Bit at position `i`, counting from the root.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.len(), "bit index {i} out of range for length {}", self.len);
        ((self.bits >> (self.len() - 1 - i)) & 1) as u8
    }

    pub fn last_bit(&self) -> Option<u8> {
        if self.is_empty() {
            None
        } else {
            Some((self.bits & 1) as u8)
        }
    }

    pub fn try_child(&self, b: u8) -> Result<Self> {
        if self.len() >= 64 {
            return Err(Error::Range("cannot extend a string of length 64".into()));
        }
        Ok(BinaryString {
            len: self.len + 1,
            bits: (self.bits << 1) | u64::from(b & 1),
        })
    }

    /// `self⌢b`. Panics past length 64; callers stay below [`MAX_DEPTH`].
    pub fn child(&self, b: u8) -> Self {
        self.try_child(b).expect("binary string overflow")
    }

    /// The restriction `self ↾ k` for `k ≤ len`.
    pub fn prefix(&self, k: usize) -> Self {
        assert!(k <= self.len());
        let shift = self.len() - k;
        let bits = if shift >= 64 { 0 } else { self.bits >> shift };
        BinaryString { len: k as u8, bits }
    }

    pub fn parent(&self) -> Option<Self> {
        if self.is_empty() {
            None
        } else {
            Some(self.prefix(self.len() - 1))
        }
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &BinaryString) -> bool {
        self.len <= other.len && other.prefix(self.len()) == *self
    }

    pub fn compatible(&self, other: &BinaryString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Longest common prefix.
    pub fn meet(&self, other: &BinaryString) -> BinaryString {
        let mut k = self.len().min(other.len());
        while self.prefix(k) != other.prefix(k) {
            k -= 1;
        }
        self.prefix(k)
    }

    /// Rank in the length-lexicographic enumeration of all strings
    /// (`ε` is 0, `0` is 1, `1` is 2, ...). Valid for length ≤ 62.
    pub fn index(&self) -> usize {
        debug_assert!(self.len() <= 62);
        ((1usize << self.len()) - 1) + self.bits as usize
    }

    pub fn from_index(index: usize) -> Self {
        let len = usize::BITS as usize - 1 - (index + 1).leading_zeros() as usize;
        BinaryString {
            len: len as u8,
            bits: (index + 1 - (1usize << len)) as u64,
        }
    }

    /// The `2^len` strings of length `len` in lexicographic order.
    pub fn level(len: usize) -> impl Iterator<Item = BinaryString> {
        assert!(len < 64);
        (0..(1u64 << len)).map(move |v| BinaryString {
            len: len as u8,
            bits: v,
        })
    }

    /// Extensions of `self` of length `len` in lexicographic order.
    pub fn extensions(&self, len: usize) -> impl Iterator<Item = BinaryString> {
        assert!(len >= self.len() && len < 64);
        let extra = len - self.len();
        let base = self.bits << extra;
        (0..(1u64 << extra)).map(move |v| BinaryString {
            len: len as u8,
            bits: base | v,
        })
    }

    /// File-format token: the bit string, or `-` for the empty string.
    pub fn token(&self) -> String {
        if self.is_empty() {
            "-".to_string()
        } else {
            self.to_string()
        }
    }

    /// Parses a bit string; both `-` and the empty string denote `ε`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" {
            return Ok(BinaryString::EMPTY);
        }
        let mut out = BinaryString::EMPTY;
        for ch in s.chars() {
            let b = match ch {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::Argument(format!("not a bit string: {s:?}"))),
            };
            out = out.try_child(b)?;
        }
        Ok(out)
    }
}

impl fmt::Display for BinaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

impl std::str::FromStr for BinaryString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BinaryString::parse(s)
    }
}

impl Serialize for BinaryString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BinaryString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        BinaryString::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::Range(format!("depth {depth} outside [1, {MAX_DEPTH}]")));
    }
    Ok(())
}

/// The rule broken by a node of a candidate [`LevelTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `levels[0]` must be exactly `{ε}`.
    Root,
    /// A node stored on level `n` must have length `n`.
    Length,
    PrefixClosed,
    Pruned,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Root => "root",
            Rule::Length => "length",
            Rule::PrefixClosed => "prefix-closed",
            Rule::Pruned => "pruned",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub node: BinaryString,
    pub rule: Rule,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Validation(format!(
                "{} violation(s), first: {} at node {}",
                self.violations.len(),
                v.rule,
                v.node.token()
            ))),
        }
    }
}

/// A finite tree of depth `D`, stored as its `D` levels.
///
/// Values built through [`LevelTree::new`] are valid; [`LevelTree::from_levels_unchecked`]
/// exists so that invalid candidates can be handed to [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTree {
    levels: Vec<BTreeSet<BinaryString>>,
}

impl LevelTree {
    pub fn new(levels: Vec<BTreeSet<BinaryString>>) -> Result<Self> {
        check_depth(levels.len())?;
        let t = LevelTree { levels };
        validate(&t).into_result()?;
        Ok(t)
    }

    pub fn from_levels_unchecked(levels: Vec<BTreeSet<BinaryString>>) -> Self {
        LevelTree { levels }
    }

    /// Downward closure of `tops`, all of which must have length `depth - 1`.
    pub fn closure_of(tops: &[BinaryString], depth: usize) -> Result<Self> {
        check_depth(depth)?;
        if tops.is_empty() {
            return Err(Error::Argument("closure of an empty node set".into()));
        }
        let mut levels = vec![BTreeSet::new(); depth];
        for top in tops {
            if top.len() != depth - 1 {
                return Err(Error::Shape(format!(
                    "node {} is not on level {}",
                    top.token(),
                    depth - 1
                )));
            }
            for (k, level) in levels.iter_mut().enumerate() {
                level.insert(top.prefix(k));
            }
        }
        Ok(LevelTree { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &BTreeSet<BinaryString> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[BTreeSet<BinaryString>] {
        &self.levels
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(BTreeSet::len).collect()
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(BTreeSet::len).sum()
    }

    pub fn contains(&self, s: &BinaryString) -> bool {
        self.levels.get(s.len()).is_some_and(|l| l.contains(s))
    }

    /// All nodes in length-lexicographic order.
    pub fn nodes(&self) -> impl Iterator<Item = &BinaryString> {
        self.levels.iter().flat_map(|l| l.iter())
    }

    /// Whether every level of `self` is contained in the matching level of `other`.
    pub fn is_subtree_of(&self, other: &LevelTree) -> bool {
        self.depth() == other.depth()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| a.is_subset(b))
    }
}

/// The complete binary tree of depth `depth`.
pub fn make_full(depth: usize) -> Result<LevelTree> {
    check_depth(depth)?;
    if depth > FULL_TREE_MAX_DEPTH {
        return Err(Error::Range(format!(
            "full tree of depth {depth} has more than 2^{FULL_TREE_MAX_DEPTH} nodes"
        )));
    }
    let levels = (0..depth)
        .map(|n| BinaryString::level(n).collect())
        .collect();
    Ok(LevelTree { levels })
}

/// Checks the root, length, prefix-closure and prunedness rules. Violations
/// are listed level by level in length-lexicographic node order.
pub fn validate(t: &LevelTree) -> ValidationReport {
    let mut violations = Vec::new();
    let depth = t.depth();
    if depth == 0 {
        violations.push(Violation {
            node: BinaryString::EMPTY,
            rule: Rule::Root,
        });
        return ValidationReport { violations };
    }
    let root_ok = t.levels[0].len() == 1 && t.levels[0].contains(&BinaryString::EMPTY);
    if !root_ok {
        let node = t.levels[0].iter().next().copied().unwrap_or_default();
        violations.push(Violation {
            node,
            rule: Rule::Root,
        });
    }
    for (n, level) in t.levels.iter().enumerate() {
        for s in level {
            if s.len() != n {
                violations.push(Violation {
                    node: *s,
                    rule: Rule::Length,
                });
                continue;
            }
            if n > 0 && !t.levels[n - 1].contains(&s.prefix(n - 1)) {
                violations.push(Violation {
                    node: *s,
                    rule: Rule::PrefixClosed,
                });
            }
            if n + 1 < depth {
                let next = &t.levels[n + 1];
                if !next.contains(&s.child(0)) && !next.contains(&s.child(1)) {
                    violations.push(Violation {
                        node: *s,
                        rule: Rule::Pruned,
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// `p_s`: the nodes of `t` compatible with `s`.
pub fn subtree_at(t: &LevelTree, s: &BinaryString) -> Result<LevelTree> {
    if !t.contains(s) {
        return Err(Error::NotFound(format!("node {} is not in the tree", s.token())));
    }
    let levels = t
        .levels
        .iter()
        .enumerate()
        .map(|(n, level)| {
            if n <= s.len() {
                std::iter::once(s.prefix(n)).collect()
            } else {
                level.iter().filter(|u| s.is_prefix_of(u)).copied().collect()
            }
        })
        .collect();
    Ok(LevelTree { levels })
}

/// The maximal nodes of a valid tree, i.e. its top level.
pub fn branches(t: &LevelTree) -> Result<BTreeSet<BinaryString>> {
    validate(t).into_result()?;
    Ok(t.levels[t.depth() - 1].clone())
}

/// An order embedding of `{0,1}^{≤height}` into the binary tree.
///
/// `images` is indexed by the length-lexicographic rank of the argument
/// (see [`BinaryString::index`]), so the internal images come first and the
/// `2^height` top images last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeEmbedding {
    height: usize,
    images: Vec<BinaryString>,
    top_level: usize,
}

impl TreeEmbedding {
    pub fn new(height: usize, images: Vec<BinaryString>, top_level: usize) -> Result<Self> {
        let e = TreeEmbedding {
            height,
            images,
            top_level,
        };
        e.validate()?;
        Ok(e)
    }

    /// Builds the canonical embedding whose internal images are the meets of
    /// the top images below them. `leaves` are listed in argument order.
    pub fn from_leaves(height: usize, leaves: &[BinaryString]) -> Result<Self> {
        if height > MAX_HEIGHT {
            return Err(Error::Range(format!("height {height} exceeds {MAX_HEIGHT}")));
        }
        if leaves.len() != 1 << height {
            return Err(Error::Embedding(format!(
                "height {height} needs {} top images, got {}",
                1usize << height,
                leaves.len()
            )));
        }
        let top_level = leaves[0].len();
        let total = (1usize << (height + 1)) - 1;
        let mut images = vec![BinaryString::EMPTY; total];
        let first_leaf = (1usize << height) - 1;
        images[first_leaf..].copy_from_slice(leaves);
        for idx in (0..first_leaf).rev() {
            images[idx] = images[2 * idx + 1].meet(&images[2 * idx + 2]);
        }
        TreeEmbedding::new(height, images, top_level)
    }

    /// Builds an embedding from its internal images (`split_nodes`) and top
    /// images, both listed in argument order.
    pub fn from_parts(
        height: usize,
        split_nodes: &[BinaryString],
        leaves: &[BinaryString],
    ) -> Result<Self> {
        if split_nodes.len() != (1usize << height) - 1 {
            return Err(Error::Embedding(format!(
                "height {height} needs {} split nodes, got {}",
                (1usize << height) - 1,
                split_nodes.len()
            )));
        }
        let top_level = leaves.first().map(BinaryString::len).unwrap_or(0);
        let images = split_nodes.iter().chain(leaves).copied().collect();
        TreeEmbedding::new(height, images, top_level)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn top_level(&self) -> usize {
        self.top_level
    }

    pub fn images(&self) -> &[BinaryString] {
        &self.images
    }

    pub fn image(&self, arg: &BinaryString) -> Option<BinaryString> {
        if arg.len() > self.height {
            None
        } else {
            Some(self.images[arg.index()])
        }
    }

    pub fn split_nodes(&self) -> &[BinaryString] {
        &self.images[..(1usize << self.height) - 1]
    }

    pub fn leaf_images(&self) -> &[BinaryString] {
        &self.images[(1usize << self.height) - 1..]
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.height;
        if h > MAX_HEIGHT {
            return Err(Error::Embedding(format!("height {h} exceeds {MAX_HEIGHT}")));
        }
        let total = (1usize << (h + 1)) - 1;
        if self.images.len() != total {
            return Err(Error::Embedding(format!(
                "height {h} needs {total} images, got {}",
                self.images.len()
            )));
        }
        for leaf in self.leaf_images() {
            if leaf.len() != self.top_level {
                return Err(Error::Embedding(format!(
                    "top image {} is not on level {}",
                    leaf.token(),
                    self.top_level
                )));
            }
        }
        // Extension along each edge plus incomparability of sibling images
        // yields the order and incomparability conditions for all pairs.
        for idx in 0..(1usize << h) - 1 {
            let parent = self.images[idx];
            let left = self.images[2 * idx + 1];
            let right = self.images[2 * idx + 2];
            if !parent.is_prefix_of(&left) || !parent.is_prefix_of(&right) {
                return Err(Error::Embedding(format!(
                    "image of {} does not extend to its children",
                    BinaryString::from_index(idx).token()
                )));
            }
            if left.compatible(&right) {
                return Err(Error::Embedding(format!(
                    "children of {} have comparable images {} and {}",
                    BinaryString::from_index(idx).token(),
                    left.token(),
                    right.token()
                )));
            }
        }
        Ok(())
    }
}

/// Downward closure of the embedding's top images as a tree of depth `depth`.
pub fn embed_closure(e: &TreeEmbedding, depth: usize) -> Result<LevelTree> {
    e.validate()?;
    check_depth(depth)?;
    if e.top_level() + 1 != depth {
        return Err(Error::Shape(format!(
            "top level {} does not match depth {depth}",
            e.top_level()
        )));
    }
    LevelTree::closure_of(e.leaf_images(), depth)
}

/// A sorted, duplicate-free set of levels below a depth bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct LevelSet {
    members: Vec<usize>,
}

impl LevelSet {
    pub fn new(members: impl IntoIterator<Item = usize>, depth: usize) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&m) = members.iter().next_back() {
            if m >= depth {
                return Err(Error::Range(format!("level {m} not below depth {depth}")));
            }
        }
        Ok(LevelSet {
            members: members.into_iter().collect(),
        })
    }

    pub fn empty() -> Self {
        LevelSet::default()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn is_subset(&self, other: &LevelSet) -> bool {
        self.iter().all(|n| other.contains(n))
    }

    pub fn intersection(&self, other: &LevelSet) -> LevelSet {
        LevelSet {
            members: self.iter().filter(|&n| other.contains(n)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BinaryString {
        BinaryString::parse(s).unwrap()
    }

    fn tree(depth: usize, nodes: &[&str]) -> LevelTree {
        let mut levels = vec![BTreeSet::new(); depth];
        for n in nodes {
            let s = bs(n);
            levels[s.len()].insert(s);
        }
        LevelTree::from_levels_unchecked(levels)
    }

    #[test]
    fn length_lex_order_and_index() {
        let mut v = vec![bs("1"), bs("00"), bs("-"), bs("0"), bs("11")];
        v.sort();
        assert_eq!(v, vec![bs("-"), bs("0"), bs("1"), bs("00"), bs("11")]);
        for i in 0..200 {
            assert_eq!(BinaryString::from_index(i).index(), i);
        }
        assert_eq!(bs("01").index(), 4);
    }

    #[test]
    fn prefix_and_meet() {
        let s = bs("01101");
        assert_eq!(s.prefix(3), bs("011"));
        assert_eq!(s.prefix(0), BinaryString::EMPTY);
        assert!(bs("011").is_prefix_of(&s));
        assert!(!bs("010").is_prefix_of(&s));
        assert_eq!(s.meet(&bs("0111")), bs("011"));
        assert_eq!(bs("1").meet(&bs("0")), BinaryString::EMPTY);
        let long = BinaryString::from_value(u64::MAX, 64).unwrap();
        assert_eq!(long.prefix(0), BinaryString::EMPTY);
        assert!(long.try_child(0).is_err());
    }

    #[test]
    fn make_full_sizes() {
        assert_eq!(make_full(1).unwrap().level_sizes(), vec![1]);
        assert_eq!(make_full(3).unwrap().level_sizes(), vec![1, 2, 4]);
        assert_eq!(make_full(5).unwrap().node_count(), 31);
        assert!(matches!(make_full(0), Err(Error::Range(_))));
        assert!(matches!(make_full(65), Err(Error::Range(_))));
    }

    #[test]
    fn validate_reports_rules() {
        assert!(validate(&make_full(4).unwrap()).is_ok());

        let orphan = tree(3, &["-", "1", "00"]);
        let report = validate(&orphan);
        assert!(report.violations.contains(&Violation {
            node: bs("00"),
            rule: Rule::PrefixClosed
        }));

        let childless = tree(3, &["-", "0", "1", "00"]);
        let report = validate(&childless);
        assert_eq!(
            report.violations,
            vec![Violation {
                node: bs("1"),
                rule: Rule::Pruned
            }]
        );

        let no_root = LevelTree::from_levels_unchecked(vec![BTreeSet::new(), BTreeSet::new()]);
        assert_eq!(validate(&no_root).violations[0].rule, Rule::Root);

        let misplaced = LevelTree::from_levels_unchecked(vec![
            [bs("-")].into_iter().collect(),
            [bs("00")].into_iter().collect(),
        ]);
        assert!(validate(&misplaced)
            .violations
            .iter()
            .any(|v| v.rule == Rule::Length));
    }

    #[test]
    fn subtree_examples() {
        let full3 = make_full(3).unwrap();
        assert_eq!(subtree_at(&full3, &bs("0")).unwrap().level_sizes(), vec![1, 1, 2]);
        assert_eq!(subtree_at(&full3, &BinaryString::EMPTY).unwrap(), full3);

        let full4 = make_full(4).unwrap();
        let sub = subtree_at(&full4, &bs("01")).unwrap();
        let nodes: Vec<_> = sub.nodes().copied().collect();
        assert_eq!(nodes, vec![bs("-"), bs("0"), bs("01"), bs("010"), bs("011")]);

        let thin = tree(3, &["-", "0", "00"]);
        assert!(matches!(subtree_at(&thin, &bs("1")), Err(Error::NotFound(_))));
    }

    #[test]
    fn branches_examples() {
        let full3 = make_full(3).unwrap();
        let b: Vec<_> = branches(&full3).unwrap().into_iter().collect();
        assert_eq!(b, vec![bs("00"), bs("01"), bs("10"), bs("11")]);

        let single = tree(4, &["-", "0", "00", "000"]);
        assert_eq!(branches(&single).unwrap().into_iter().collect::<Vec<_>>(), vec![bs("000")]);

        let right = subtree_at(&full3, &bs("1")).unwrap();
        assert_eq!(
            branches(&right).unwrap().into_iter().collect::<Vec<_>>(),
            vec![bs("10"), bs("11")]
        );

        let bad = tree(3, &["-", "0", "1", "00"]);
        assert!(matches!(branches(&bad), Err(Error::Validation(_))));
    }

    #[test]
    fn embed_closure_examples() {
        let e0 = TreeEmbedding::new(0, vec![bs("000")], 3).unwrap();
        let t = embed_closure(&e0, 4).unwrap();
        assert_eq!(t.level_sizes(), vec![1, 1, 1, 1]);

        let e1 = TreeEmbedding::from_leaves(1, &[bs("00"), bs("11")]).unwrap();
        assert_eq!(e1.split_nodes(), &[BinaryString::EMPTY]);
        assert_eq!(embed_closure(&e1, 3).unwrap().level_sizes(), vec![1, 2, 2]);

        let e2 = TreeEmbedding::from_leaves(2, &[bs("0000"), bs("0011"), bs("1100"), bs("1111")])
            .unwrap();
        let t2 = embed_closure(&e2, 5).unwrap();
        assert!(validate(&t2).is_ok());
        assert_eq!(branches(&t2).unwrap().len(), 4);
        // Closure enumerated by hand: ε | 0 1 | 00 11 | 000 001 110 111 | leaves.
        assert_eq!(t2.level_sizes(), vec![1, 2, 2, 4, 4]);

        assert!(matches!(embed_closure(&e1, 4), Err(Error::Shape(_))));
    }

    #[test]
    fn embedding_validation_rejects_bad_shapes() {
        // comparable sibling images
        assert!(TreeEmbedding::from_parts(1, &[bs("-")], &[bs("00"), bs("00")]).is_err());
        // parent not below child
        assert!(TreeEmbedding::from_parts(1, &[bs("1")], &[bs("00"), bs("01")]).is_err());
        // non-uniform top
        assert!(TreeEmbedding::from_parts(1, &[bs("-")], &[bs("00"), bs("1")]).is_err());
        // unbalanced: leaves 000, 001, 010, 100 give a meet tree of mixed height
        assert!(TreeEmbedding::from_leaves(2, &[bs("000"), bs("001"), bs("010"), bs("100")])
            .is_err());
    }

    #[test]
    fn level_set_rules() {
        let a = LevelSet::new([3, 1, 3, 0], 5).unwrap();
        assert_eq!(a.members(), &[0, 1, 3]);
        assert!(LevelSet::new([5], 5).is_err());
        let b = LevelSet::new([1, 2, 3], 5).unwrap();
        assert_eq!(a.intersection(&b).members(), &[1, 3]);
    }
}
