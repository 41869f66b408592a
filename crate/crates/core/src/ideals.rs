//! Finite-scale statistics for the ideals in the zoo.
//!
//! None of these functions decide membership in an ideal; they compute the
//! exact quantities whose asymptotic behaviour defines membership. All
//! weights are exact rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::treecore::BinaryString;

/// A finite set of naturals inside the window `[0, bound)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NatSet {
    bound: u64,
    members: BTreeSet<u64>,
}

impl NatSet {
    pub fn new(bound: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let members: BTreeSet<u64> = members.into_iter().collect();
        if let Some(&m) = members.iter().next_back() {
            if m >= bound {
                return Err(Error::Range(format!("{m} is outside [0, {bound})")));
            }
        }
        Ok(NatSet { bound, members })
    }

    /// Members of `[0, bound)` satisfying `pred`.
    pub fn from_predicate(bound: u64, pred: impl Fn(u64) -> bool) -> Self {
        NatSet {
            bound,
            members: (0..bound).filter(|&n| pred(n)).collect(),
        }
    }

    pub fn empty(bound: u64) -> Self {
        NatSet {
            bound,
            members: BTreeSet::new(),
        }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn members(&self) -> &BTreeSet<u64> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.contains(&n)
    }

    /// `|A ∩ [lo, hi)|`.
    pub fn count_in(&self, lo: u64, hi: u64) -> u64 {
        if lo >= hi {
            0
        } else {
            self.members.range(lo..hi).count() as u64
        }
    }

    pub fn complement(&self) -> NatSet {
        NatSet::from_predicate(self.bound, |n| !self.members.contains(&n))
    }

    pub fn is_subset(&self, other: &NatSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// A finite set of grid cells `(column, row)` inside `[0, bound)²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridSet {
    bound: u64,
    cells: BTreeSet<(u64, u64)>,
}

impl GridSet {
    pub fn new(bound: u64, cells: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let cells: BTreeSet<(u64, u64)> = cells.into_iter().collect();
        if let Some(&(c, r)) = cells.iter().find(|&&(c, r)| c >= bound || r >= bound) {
            return Err(Error::Range(format!("cell ({c}, {r}) is outside [0, {bound})²")));
        }
        Ok(GridSet { bound, cells })
    }

    /// `{c} × [0, bound)`.
    pub fn column(bound: u64, c: u64) -> Result<Self> {
        GridSet::new(bound, (0..bound).map(|r| (c, r)))
    }

    /// Graph `{(c, f(c))}` of a function from columns to rows.
    pub fn graph(bound: u64, f: impl Fn(u64) -> u64) -> Result<Self> {
        GridSet::new(bound, (0..bound).map(|c| (c, f(c))))
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn cells(&self) -> &BTreeSet<(u64, u64)> {
        &self.cells
    }

    pub fn union(&self, other: &GridSet) -> GridSet {
        GridSet {
            bound: self.bound.max(other.bound),
            cells: self.cells.union(&other.cells).copied().collect(),
        }
    }
}

/// A finite set of nodes of `2^{<D}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeSet {
    depth: usize,
    nodes: BTreeSet<BinaryString>,
}

impl NodeSet {
    pub fn new(depth: usize, nodes: impl IntoIterator<Item = BinaryString>) -> Result<Self> {
        if depth > crate::treecore::MAX_DEPTH {
            return Err(Error::Range(format!(
                "node set depth {depth} above {}",
                crate::treecore::MAX_DEPTH
            )));
        }
        let nodes: BTreeSet<BinaryString> = nodes.into_iter().collect();
        if let Some(s) = nodes.iter().find(|s| s.len() >= depth) {
            return Err(Error::Range(format!(
                "node {} is outside 2^<{depth}",
                s.token()
            )));
        }
        Ok(NodeSet { depth, nodes })
    }

    /// `{0,1}^n` as a node set of depth `depth`.
    pub fn full_level(n: usize, depth: usize) -> Result<Self> {
        NodeSet::new(depth, BinaryString::level(n))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &BTreeSet<BinaryString> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.nodes.is_subset(&other.nodes)
    }

    /// `a \ 2^{<n}`.
    pub fn without_levels_below(&self, n: usize) -> NodeSet {
        NodeSet {
            depth: self.depth,
            nodes: self.nodes.iter().filter(|s| s.len() >= n).copied().collect(),
        }
    }
}

/// A sequence of exact densities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityProfile(pub Vec<BigRational>);

impl DensityProfile {
    pub fn values(&self) -> &[BigRational] {
        &self.0
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(crate::frac_string).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMode {
    /// `|A ∩ [2^n, 2^{n+1})| / 2^n` for every full dyadic window.
    Dyadic,
    /// `|A ∩ [0, n)| / n` for `n ∈ [1, N]`.
    Natural,
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Dyadic or natural density profile of `a` over its window.
pub fn density_profile(a: &NatSet, mode: DensityMode) -> DensityProfile {
    let bound = a.bound();
    let values = match mode {
        DensityMode::Dyadic => (0..63)
            .map(|n| (1u64 << n, 1u64 << (n + 1)))
            .take_while(|&(_, hi)| hi <= bound)
            .map(|(lo, hi)| ratio(a.count_in(lo, hi), lo))
            .collect(),
        DensityMode::Natural => {
            let mut out = Vec::with_capacity(bound as usize);
            let mut running = 0u64;
            for n in 1..=bound {
                if a.contains(n - 1) {
                    running += 1;
                }
                out.push(ratio(running, n));
            }
            out
        }
    };
    DensityProfile(values)
}

/// `Σ_{n∈A} 1/(n+1)`, exactly.
pub fn summable_weight(a: &NatSet) -> BigRational {
    a.members()
        .iter()
        .fold(BigRational::zero(), |acc, &n| acc + ratio(1, n + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    MoreThan,
}

impl Comparison {
    fn holds(self, count: u64, threshold: u64) -> bool {
        match self {
            Comparison::AtLeast => count >= threshold,
            Comparison::MoreThan => count > threshold,
        }
    }
}

/// Number of windows `[m, m+ℓ) ⊆ [0, N)` whose hit count compares to
/// `threshold` as requested.
pub fn interval_count(a: &NatSet, len: u64, threshold: u64, cmp: Comparison) -> Result<u64> {
    if len == 0 {
        return Err(Error::Argument("interval length must be positive".into()));
    }
    let bound = a.bound();
    if len > bound {
        return Ok(0);
    }
    let mut hits = a.count_in(0, len);
    let mut count = u64::from(cmp.holds(hits, threshold));
    for m in 1..=bound - len {
        if a.contains(m - 1) {
            hits -= 1;
        }
        if a.contains(m + len - 1) {
            hits += 1;
        }
        count += u64::from(cmp.holds(hits, threshold));
    }
    Ok(count)
}

/// Hit count of each column `0..N`.
pub fn column_profile(e: &GridSet) -> Vec<u64> {
    let mut counts = vec![0u64; e.bound() as usize];
    for &(c, _) in e.cells() {
        counts[c as usize] += 1;
    }
    counts
}

/// `M(a)`: members of `a` with no proper prefix in `a`.
pub fn minimal_elements(a: &NodeSet) -> NodeSet {
    let nodes = a
        .nodes()
        .iter()
        .filter(|s| (0..s.len()).all(|k| !a.nodes().contains(&s.prefix(k))))
        .copied()
        .collect();
    NodeSet {
        depth: a.depth(),
        nodes,
    }
}

/// Dyadic weights `2^{-|s|}` for `|s| < D ≤ 64` are summed exactly as
/// integer multiples of `2^{-(D-1)}`; any antichain sum fits in `u128`.
fn scaled(len: usize, depth: usize) -> u128 {
    1u128 << (depth - 1 - len)
}

fn unscale(v: u128, depth: usize) -> BigRational {
    BigRational::new(BigInt::from(v), BigInt::one() << (depth.max(1) - 1))
}

/// `φ(a) = Σ_{s∈M(a)} 2^{-|s|}`.
pub fn phi(a: &NodeSet) -> BigRational {
    let depth = a.depth();
    let total = minimal_elements(a)
        .nodes()
        .iter()
        .map(|s| scaled(s.len(), depth))
        .sum();
    unscale(total, depth)
}

/// Largest `Σ_{s∈b} 2^{-|s|}` over antichains `b ⊆ a`, by the tree recursion
/// `W(s) = max([s∈a]·2^{-|s|}, W(s⌢0) + W(s⌢1))` over the prefix closure of `a`.
pub fn max_antichain_weight(a: &NodeSet) -> BigRational {
    let depth = a.depth();
    if a.is_empty() {
        return BigRational::zero();
    }
    let mut closure: BTreeSet<BinaryString> = BTreeSet::new();
    for s in a.nodes() {
        for k in 0..=s.len() {
            closure.insert(s.prefix(k));
        }
    }
    // Children before parents: iterate length-lex in reverse.
    let mut weight: BTreeMap<BinaryString, u128> = BTreeMap::new();
    for s in closure.iter().rev() {
        let below: u128 = [0u8, 1]
            .iter()
            .filter_map(|&b| s.try_child(b).ok())
            .filter_map(|c| weight.get(&c))
            .sum();
        let own = if a.nodes().contains(s) {
            scaled(s.len(), depth)
        } else {
            0
        };
        weight.insert(*s, own.max(below));
    }
    unscale(weight.remove(&BinaryString::EMPTY).unwrap_or_default(), depth)
}

/// `φ(a \ 2^{<n})` for `n = 0, …, D-1`.
pub fn phi_bar_profile(a: &NodeSet, depth: usize) -> Result<Vec<BigRational>> {
    if let Some(s) = a.nodes().iter().find(|s| s.len() >= depth) {
        return Err(Error::Range(format!(
            "node {} is not shorter than {depth}",
            s.token()
        )));
    }
    Ok((0..depth).map(|n| phi(&a.without_levels_below(n))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn nodes(depth: usize, list: &[&str]) -> NodeSet {
        NodeSet::new(depth, list.iter().map(|s| BinaryString::parse(s).unwrap())).unwrap()
    }

    #[test]
    fn dyadic_examples() {
        let evens = NatSet::from_predicate(64, |n| n % 2 == 0);
        let prof = density_profile(&evens, DensityMode::Dyadic);
        assert_eq!(prof.values().len(), 6);
        assert!(prof.values()[1..].iter().all(|d| *d == r(1, 2)));

        let powers = NatSet::from_predicate(64, |n| n.is_power_of_two());
        let prof = density_profile(&powers, DensityMode::Dyadic);
        for (n, d) in prof.values().iter().enumerate() {
            assert_eq!(*d, r(1, 1 << n));
        }

        let empty = NatSet::empty(64);
        assert!(density_profile(&empty, DensityMode::Dyadic)
            .values()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn natural_density() {
        let a = NatSet::new(4, [0, 2]).unwrap();
        let prof = density_profile(&a, DensityMode::Natural);
        assert_eq!(prof.values(), &[r(1, 1), r(1, 2), r(2, 3), r(1, 2)]);
    }

    #[test]
    fn summable_examples() {
        assert_eq!(summable_weight(&NatSet::new(5, [0]).unwrap()), r(1, 1));
        assert_eq!(
            summable_weight(&NatSet::from_predicate(10, |_| true)),
            r(7381, 2520)
        );
        assert!(summable_weight(&NatSet::empty(5)).is_zero());
    }

    #[test]
    fn interval_examples() {
        let n = 20;
        let all = NatSet::from_predicate(n, |_| true);
        assert_eq!(interval_count(&all, 3, 3, Comparison::AtLeast).unwrap(), n - 2);
        assert_eq!(interval_count(&NatSet::empty(n), 4, 1, Comparison::AtLeast).unwrap(), 0);
        let fours = NatSet::from_predicate(64, |k| k % 4 == 0);
        assert_eq!(interval_count(&fours, 4, 2, Comparison::AtLeast).unwrap(), 0);
        assert_eq!(interval_count(&fours, 4, 1, Comparison::AtLeast).unwrap(), 61);
        assert_eq!(interval_count(&fours, 4, 0, Comparison::MoreThan).unwrap(), 61);
        assert!(interval_count(&fours, 0, 1, Comparison::AtLeast).is_err());
        assert_eq!(interval_count(&fours, 65, 0, Comparison::AtLeast).unwrap(), 0);
    }

    #[test]
    fn column_examples() {
        let id = GridSet::graph(8, |c| c).unwrap();
        assert_eq!(column_profile(&id), vec![1; 8]);
        let col = GridSet::column(8, 3).unwrap();
        let prof = column_profile(&col);
        assert_eq!(prof[3], 8);
        assert_eq!(prof.iter().sum::<u64>(), 8);
        let two = id.union(&GridSet::graph(8, |c| 7 - c).unwrap());
        assert!(column_profile(&two).iter().all(|&k| k <= 2));
    }

    #[test]
    fn minimal_and_phi_examples() {
        assert_eq!(minimal_elements(&nodes(4, &["0", "00", "01"])), nodes(4, &["0"]));
        let anti = nodes(4, &["00", "01", "1"]);
        assert_eq!(minimal_elements(&anti), anti);
        assert_eq!(minimal_elements(&nodes(4, &["-", "0", "101"])), nodes(4, &["-"]));

        assert_eq!(phi(&NodeSet::full_level(3, 5).unwrap()), r(1, 1));
        assert_eq!(phi(&nodes(4, &["0"])), r(1, 2));
        assert_eq!(phi(&anti), r(1, 1));
    }

    #[test]
    fn antichain_examples() {
        let chain = nodes(4, &["0", "00", "000"]);
        assert_eq!(max_antichain_weight(&chain), r(1, 2));
        assert!(max_antichain_weight(&nodes(4, &[])).is_zero());
        let a = nodes(5, &["0", "00", "01", "1", "110", "111"]);
        assert_eq!(max_antichain_weight(&a), phi(&a));
    }

    #[test]
    fn phi_bar_full_level() {
        let a = NodeSet::full_level(3, 6).unwrap();
        let prof = phi_bar_profile(&a, 6).unwrap();
        assert_eq!(prof, vec![r(1, 1), r(1, 1), r(1, 1), r(1, 1), r(0, 1), r(0, 1)]);
        assert!(phi_bar_profile(&a, 3).is_err());
    }
}
