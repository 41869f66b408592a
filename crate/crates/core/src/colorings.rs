//! Two-colorings of `2^{<D}` and the explicit constructions built on them.
//!
//! A [`Coloring`] is stored densely (one bit per node, length-lex order) for
//! small depths, or sparsely as a default color plus the set of nodes with
//! the other color. The sparse form is what makes the density construction
//! at depth 33 representable.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::BitStream;
use crate::treecore::{check_depth, validate, BinaryString, LevelSet, LevelTree};

/// Largest depth for which a coloring can be stored densely (`2^24` bits).
pub const DENSE_MAX_DEPTH: usize = 24;

#[derive(Debug, Clone)]
enum Store {
    Dense(Vec<u64>),
    Sparse {
        default: u8,
        flipped: BTreeSet<BinaryString>,
    },
}

/// A total map `2^{<D} → {0,1}`.
#[derive(Debug, Clone)]
pub struct Coloring {
    depth: usize,
    store: Store,
}

impl Coloring {
    /// Constant coloring; representable at every supported depth.
    pub fn constant(depth: usize, color: u8) -> Result<Self> {
        check_depth(depth)?;
        Ok(Coloring {
            depth,
            store: Store::Sparse {
                default: color & 1,
                flipped: BTreeSet::new(),
            },
        })
    }

    /// Dense coloring from a rule evaluated on every node.
    pub fn from_fn(depth: usize, mut f: impl FnMut(&BinaryString) -> u8) -> Result<Self> {
        check_depth(depth)?;
        if depth > DENSE_MAX_DEPTH {
            return Err(Error::Range(format!(
                "dense coloring limited to depth {DENSE_MAX_DEPTH}, got {depth}"
            )));
        }
        let nodes = (1usize << depth) - 1;
        let mut words = vec![0u64; nodes.div_ceil(64)];
        for idx in 0..nodes {
            if f(&BinaryString::from_index(idx)) & 1 == 1 {
                words[idx / 64] |= 1 << (idx % 64);
            }
        }
        Ok(Coloring {
            depth,
            store: Store::Dense(words),
        })
    }

    /// `c(t)` = last bit of `t`, with the root colored 0.
    pub fn last_bit(depth: usize) -> Result<Self> {
        Coloring::from_fn(depth, |s| s.last_bit().unwrap_or(0))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.store, Store::Dense(_))
    }

    /// Color of `s`; `s` must be a node of `2^{<D}`.
    pub fn color(&self, s: &BinaryString) -> u8 {
        assert!(s.len() < self.depth, "node {s} outside 2^<{}", self.depth);
        match &self.store {
            Store::Dense(words) => {
                let idx = s.index();
                ((words[idx / 64] >> (idx % 64)) & 1) as u8
            }
            Store::Sparse { default, flipped } => {
                if flipped.contains(s) {
                    1 - default
                } else {
                    *default
                }
            }
        }
    }

    pub fn set(&mut self, s: &BinaryString, color: u8) {
        assert!(s.len() < self.depth, "node {s} outside 2^<{}", self.depth);
        let color = color & 1;
        match &mut self.store {
            Store::Dense(words) => {
                let idx = s.index();
                if color == 1 {
                    words[idx / 64] |= 1 << (idx % 64);
                } else {
                    words[idx / 64] &= !(1 << (idx % 64));
                }
            }
            Store::Sparse { default, flipped } => {
                if color == *default {
                    flipped.remove(s);
                } else {
                    flipped.insert(*s);
                }
            }
        }
    }

    /// Number of extensions of `s` on level `level` carrying `color`.
    pub fn count_in_cone(&self, s: &BinaryString, level: usize, color: u8) -> u64 {
        assert!(level >= s.len() && level < self.depth);
        let extra = level - s.len();
        match &self.store {
            Store::Dense(_) => s
                .extensions(level)
                .filter(|t| self.color(t) == color)
                .count() as u64,
            Store::Sparse { default, flipped } => {
                let lo = BinaryString::from_value(s.value() << extra, level).expect("in range");
                let hi = BinaryString::from_value(((s.value() + 1) << extra) - 1, level)
                    .expect("in range");
                let flips = flipped.range(lo..=hi).count() as u64;
                let total = 1u64 << extra;
                if color == *default {
                    total - flips
                } else {
                    flips
                }
            }
        }
    }

    /// First node (length-lex) where the two colorings differ.
    pub fn first_difference(&self, other: &Coloring) -> Option<BinaryString> {
        if self.depth != other.depth {
            return Some(BinaryString::EMPTY);
        }
        if let (
            Store::Sparse {
                default: d1,
                flipped: f1,
            },
            Store::Sparse {
                default: d2,
                flipped: f2,
            },
        ) = (&self.store, &other.store)
        {
            if d1 == d2 {
                return f1.symmetric_difference(f2).min().copied();
            }
        }
        let nodes = 1usize.checked_shl(self.depth as u32).map(|n| n - 1)?;
        (0..nodes)
            .map(BinaryString::from_index)
            .find(|s| self.color(s) != other.color(s))
    }

    /// Nodes with color 1, in length-lex order. Only meaningful for depths
    /// that can be enumerated.
    pub fn ones(&self) -> Vec<BinaryString> {
        match &self.store {
            Store::Sparse {
                default: 0,
                flipped,
            } => flipped.iter().copied().collect(),
            _ => (0..(1usize << self.depth) - 1)
                .map(BinaryString::from_index)
                .filter(|s| self.color(s) == 1)
                .collect(),
        }
    }
}

impl PartialEq for Coloring {
    fn eq(&self, other: &Self) -> bool {
        self.depth == other.depth && self.first_difference(other).is_none()
    }
}

impl Eq for Coloring {}

/// `H_c(p)`: the levels on which `c` is constant on `p`'s slice. Singleton
/// slices count as constant, so level 0 is always a member.
pub fn h_set(c: &Coloring, p: &LevelTree) -> Result<LevelSet> {
    if c.depth() != p.depth() {
        return Err(Error::Shape(format!(
            "coloring depth {} vs tree depth {}",
            c.depth(),
            p.depth()
        )));
    }
    let report = validate(p);
    if !report.is_ok() {
        return Err(Error::Validation(format!(
            "{} violation(s) in the host tree",
            report.violations.len()
        )));
    }
    Ok(h_set_unchecked(c, p))
}

pub(crate) fn h_set_unchecked(c: &Coloring, p: &LevelTree) -> LevelSet {
    let members = p
        .levels()
        .iter()
        .enumerate()
        .filter(|(_, level)| slice_color(c, level.iter()).is_some())
        .map(|(n, _)| n);
    LevelSet::new(members, p.depth()).expect("levels are below depth")
}

/// The common color of a nonempty slice, or `None` if it is bichromatic.
pub fn slice_color<'a>(c: &Coloring, mut nodes: impl Iterator<Item = &'a BinaryString>) -> Option<u8> {
    let first = c.color(nodes.next()?);
    nodes.all(|s| c.color(s) == first).then_some(first)
}

/// One band `B_n = {2^n+1, …, 2^{n+1}}` of the density construction.
#[derive(Debug, Clone, Serialize)]
pub struct Band {
    pub n: usize,
    /// `s_j^n`: the host's nodes on level `2^{n+1}`, lexicographically.
    pub branches: Vec<BinaryString>,
}

impl Band {
    pub fn first_level(&self) -> usize {
        (1 << self.n) + 1
    }

    pub fn last_level(&self) -> usize {
        1 << (self.n + 1)
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.first_level()..=self.last_level()
    }
}

/// The slowly branching host tree with its band coloring.
#[derive(Debug, Clone)]
pub struct ZDensityInstance {
    pub coloring: Coloring,
    pub host: LevelTree,
    pub bands: Vec<Band>,
    pub n_max: usize,
}

impl ZDensityInstance {
    pub fn depth(&self) -> usize {
        self.coloring.depth()
    }

    pub fn band(&self, n: usize) -> Option<&Band> {
        n.checked_sub(1).and_then(|i| self.bands.get(i))
    }

    /// `b^n(level)` read back from the coloring: bit `j` is `c(s_j^n ↾ level)`.
    pub fn assignment(&self, n: usize, level: usize) -> Option<u64> {
        let band = self.band(n)?;
        if !band.levels().contains(&level) {
            return None;
        }
        let mut mask = 0u64;
        for (j, s) in band.branches.iter().enumerate() {
            mask |= u64::from(self.coloring.color(&s.prefix(level))) << j;
        }
        Some(mask)
    }

    /// `(level, b^n(level))` for every level of band `n`.
    pub fn assignment_table(&self, n: usize) -> Vec<(usize, u64)> {
        match self.band(n) {
            None => Vec::new(),
            Some(band) => band
                .levels()
                .map(|l| (l, self.assignment(n, l).expect("level in band")))
                .collect(),
        }
    }

    /// Whether `b^n` hits every assignment in `{0,1}^n` exactly once.
    pub fn is_bijection(&self, n: usize) -> bool {
        let table = self.assignment_table(n);
        if table.len() != 1 << n {
            return false;
        }
        let images: BTreeSet<u64> = table.iter().map(|&(_, m)| m).collect();
        images.len() == table.len() && images.iter().all(|&m| m < 1 << n)
    }

    /// Host width: one node up to level 2, `n` nodes on every level of band `n`.
    pub fn host_width_ok(&self) -> bool {
        let sizes = self.host.level_sizes();
        sizes.iter().take(3).all(|&w| w == 1)
            && self
                .bands
                .iter()
                .all(|b| b.levels().all(|l| sizes[l] == b.n))
    }

    /// Top-level branch of the host through `s_j^n`, continued with zeros.
    pub fn branch_leaf(&self, n: usize, j: usize) -> Option<BinaryString> {
        let s = *self.band(n)?.branches.get(j)?;
        let mut leaf = s;
        while leaf.len() + 1 < self.depth() {
            leaf = leaf.child(0);
        }
        Some(leaf)
    }
}

/// Largest band count whose depth `2^{n+1} + 1` fits the depth cap.
pub const ZDENSITY_MAX_N: usize = 4;

/// Builds the density-ideal counterexample coloring up to band `n_max`.
///
/// The host tree splits once at each level `2^n` (`2 ≤ n ≤ n_max`), at its
/// all-zero node; every other node continues with 0. On band `n`, level
/// `2^n+1+m` colors branch `j` with bit `j` (least significant first) of `m`.
/// All remaining nodes are colored 0.
pub fn zdensity_coloring(n_max: usize) -> Result<ZDensityInstance> {
    if n_max == 0 {
        return Err(Error::Range("n_max must be at least 1".into()));
    }
    if n_max > ZDENSITY_MAX_N {
        return Err(Error::Range(format!(
            "n_max {n_max} needs depth 2^{} + 1, above the depth cap",
            n_max + 1
        )));
    }
    let depth = (1usize << (n_max + 1)) + 1;
    check_depth(depth)?;

    let mut levels: Vec<BTreeSet<BinaryString>> = Vec::with_capacity(depth);
    levels.push([BinaryString::EMPTY].into_iter().collect());
    for l in 1..depth {
        let prev = &levels[l - 1];
        let mut next: BTreeSet<BinaryString> = prev.iter().map(|s| s.child(0)).collect();
        let split_here = (2..=n_max).any(|n| 1usize << n == l - 1);
        if split_here {
            let least = *prev.iter().next().expect("nonempty level");
            next.insert(least.child(1));
        }
        levels.push(next);
    }
    let host = LevelTree::new(levels)?;

    let mut coloring = Coloring::constant(depth, 0)?;
    let mut bands = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let top = 1usize << (n + 1);
        let branches: Vec<BinaryString> = host.level(top).iter().copied().collect();
        debug_assert_eq!(branches.len(), n);
        for m in 0..(1usize << n) {
            let level = (1usize << n) + 1 + m;
            for (j, s) in branches.iter().enumerate() {
                coloring.set(&s.prefix(level), ((m >> j) & 1) as u8);
            }
        }
        bands.push(Band { n, branches });
    }
    Ok(ZDensityInstance {
        coloring,
        host,
        bands,
        n_max,
    })
}

/// A perfect matching of `{0,1}^level`; each pair is stored with its
/// lexicographically smaller member first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub level: usize,
    pub pairs: Vec<(BinaryString, BinaryString)>,
}

impl Matching {
    /// The partner of `s` and whether `s` is the larger member of its pair.
    pub fn side(&self, s: &BinaryString) -> Option<(BinaryString, u8)> {
        self.pairs.iter().find_map(|&(a, b)| {
            if a == *s {
                Some((b, 0))
            } else if b == *s {
                Some((a, 1))
            } else {
                None
            }
        })
    }
}

/// The first `cap` perfect matchings of `{0,1}^level` in canonical order:
/// the least unmatched string is paired with each remaining candidate in
/// lexicographic order.
pub fn enumerate_matchings(level: usize, cap: usize) -> Result<Vec<Matching>> {
    if level == 0 {
        return Err(Error::Construction("{0,1}^0 has odd size".into()));
    }
    if level > 16 {
        return Err(Error::Range(format!("matching level {level} too large")));
    }
    fn rec(
        free: &mut Vec<BinaryString>,
        current: &mut Vec<(BinaryString, BinaryString)>,
        out: &mut Vec<Vec<(BinaryString, BinaryString)>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if free.is_empty() {
            out.push(current.clone());
            return;
        }
        let first = free.remove(0);
        for i in 0..free.len() {
            let partner = free.remove(i);
            current.push((first, partner));
            rec(free, current, out, cap);
            current.pop();
            free.insert(i, partner);
            if out.len() >= cap {
                break;
            }
        }
        free.insert(0, first);
    }
    let mut free: Vec<BinaryString> = BinaryString::level(level).collect();
    let mut out = Vec::new();
    rec(&mut free, &mut Vec::new(), &mut out, cap);
    Ok(out
        .into_iter()
        .map(|pairs| Matching { level, pairs })
        .collect())
}

/// The matchings `x_0, …, x_{T-1}` and their level sets `A_{x_i}`.
#[derive(Debug, Clone, Serialize)]
pub struct PairingSystem {
    pub base_levels: Vec<usize>,
    pub matchings: Vec<Matching>,
    pub level_sets: Vec<LevelSet>,
}

impl PairingSystem {
    /// Checks the matching, disjointness and floor invariants.
    pub fn check(&self) -> Result<()> {
        if self.matchings.len() != self.level_sets.len() {
            return Err(Error::Invariant("one level set per matching".into()));
        }
        let mut seen = BTreeMap::new();
        for (i, (x, a)) in self.matchings.iter().zip(&self.level_sets).enumerate() {
            let mut covered = BTreeSet::new();
            for &(s0, s1) in &x.pairs {
                if s0.len() != x.level || s1.len() != x.level || s0 >= s1 {
                    return Err(Error::Invariant(format!("x_{i}: malformed pair")));
                }
                if !covered.insert(s0) || !covered.insert(s1) {
                    return Err(Error::Invariant(format!("x_{i}: pairs overlap")));
                }
            }
            if covered.len() != 1 << x.level {
                return Err(Error::Invariant(format!("x_{i}: not a perfect matching")));
            }
            for k in a.iter() {
                if k < x.level {
                    return Err(Error::Invariant(format!("x_{i}: level {k} below floor")));
                }
                if let Some(j) = seen.insert(k, i) {
                    return Err(Error::Invariant(format!("A_x_{j} and A_x_{i} share {k}")));
                }
            }
        }
        Ok(())
    }
}

/// The pairing coloring: on a level `k ∈ A_{x_i}`, `t` gets color 0 when
/// `t ↾ n(i)` is the smaller member of its pair in `x_i` and 1 otherwise.
/// `A_{x_i} = {k < D : k ≡ i (mod T), k ≥ n(i)}`.
pub fn pairing_coloring(
    base_levels: &BTreeSet<usize>,
    per_level_cap: usize,
    depth: usize,
) -> Result<(Coloring, PairingSystem)> {
    check_depth(depth)?;
    if base_levels.is_empty() || per_level_cap == 0 {
        return Err(Error::Construction("no matchings to enumerate".into()));
    }
    let mut matchings = Vec::new();
    for &n in base_levels {
        if n >= depth {
            return Err(Error::Range(format!("base level {n} not below depth {depth}")));
        }
        matchings.extend(enumerate_matchings(n, per_level_cap)?);
    }
    let total = matchings.len();
    let level_sets: Vec<LevelSet> = matchings
        .iter()
        .enumerate()
        .map(|(i, x)| LevelSet::new((0..depth).filter(|&k| k % total == i && k >= x.level), depth))
        .collect::<Result<_>>()?;

    let mut owner: Vec<Option<usize>> = vec![None; depth];
    for (i, a) in level_sets.iter().enumerate() {
        for k in a.iter() {
            owner[k] = Some(i);
        }
    }
    let coloring = Coloring::from_fn(depth, |t| match owner[t.len()] {
        None => 0,
        Some(i) => {
            let x = &matchings[i];
            x.side(&t.prefix(x.level)).map(|(_, side)| side).unwrap_or(0)
        }
    })?;
    let system = PairingSystem {
        base_levels: base_levels.iter().copied().collect(),
        matchings,
        level_sets,
    };
    system.check()?;
    Ok((coloring, system))
}

/// Pairwise disjoint level sets `S(t_i)` with `min S(t_i) > |t_i|`.
#[derive(Debug, Clone, Serialize)]
pub struct SplittingAssignment {
    domain: Vec<BinaryString>,
    sets: Vec<LevelSet>,
}

impl SplittingAssignment {
    pub fn new(domain: Vec<BinaryString>, sets: Vec<LevelSet>) -> Result<Self> {
        let s = SplittingAssignment { domain, sets };
        s.check()?;
        Ok(s)
    }

    /// `S(t_i) = {k < D : k ≡ i (mod T), k ≥ |t_i| + 1}`.
    pub fn residue(domain: Vec<BinaryString>, depth: usize) -> Result<Self> {
        let total = domain.len();
        if total == 0 {
            return Err(Error::Argument("empty splitting domain".into()));
        }
        let sets = domain
            .iter()
            .enumerate()
            .map(|(i, t)| LevelSet::new((0..depth).filter(|&k| k % total == i && k > t.len()), depth))
            .collect::<Result<_>>()?;
        SplittingAssignment::new(domain, sets)
    }

    /// All strings of length at most `max_len`, length-lex.
    pub fn all_strings_up_to(max_len: usize) -> Vec<BinaryString> {
        (0..=max_len).flat_map(BinaryString::level).collect()
    }

    pub fn domain(&self) -> &[BinaryString] {
        &self.domain
    }

    pub fn sets(&self) -> &[LevelSet] {
        &self.sets
    }

    fn check(&self) -> Result<()> {
        if self.domain.len() != self.sets.len() {
            return Err(Error::Invariant("one level set per domain string".into()));
        }
        let mut seen = BTreeMap::new();
        for (i, (t, set)) in self.domain.iter().zip(&self.sets).enumerate() {
            for k in set.iter() {
                if k <= t.len() {
                    return Err(Error::Invariant(format!(
                        "S({}) contains {k}, not above |t|",
                        t.token()
                    )));
                }
                if let Some(j) = seen.insert(k, i) {
                    return Err(Error::Invariant(format!(
                        "S({}) and S({}) overlap at {k}",
                        self.domain[j].token(),
                        t.token()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `c(s) = j` when `|s| ∈ S(t)` and `t⌢j ⊑ s`; 0 otherwise.
pub fn levels_coloring(assignment: &SplittingAssignment, depth: usize) -> Result<Coloring> {
    assignment.check()?;
    let mut owner: Vec<Option<BinaryString>> = vec![None; depth];
    for (t, set) in assignment.domain.iter().zip(&assignment.sets) {
        for k in set.iter() {
            if k < depth {
                owner[k] = Some(*t);
            }
        }
    }
    Coloring::from_fn(depth, |s| match owner[s.len()] {
        Some(t) if t.is_prefix_of(s) => s.bit(t.len()),
        _ => 0,
    })
}

/// `I(s)`: levels `n` with `|s|+1 < n < D` on which at most one extension
/// of `s` has color 0.
pub fn i_set(c: &Coloring, s: &BinaryString) -> Result<LevelSet> {
    if s.len() >= c.depth() {
        return Err(Error::Argument(format!(
            "node {} is outside 2^<{}",
            s.token(),
            c.depth()
        )));
    }
    let members = (s.len() + 2..c.depth()).filter(|&n| c.count_in_cone(s, n, 0) <= 1);
    LevelSet::new(members, c.depth())
}

/// Seeded coloring: one bit per node in length-lex order, drawn from the
/// splitmix64 stream of `seed` (see [`crate::rng`]).
pub fn random_coloring(depth: usize, seed: u64) -> Result<Coloring> {
    let mut bits = BitStream::new(seed);
    Coloring::from_fn(depth, |_| bits.next_bit())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingViolation {
    pub matching: usize,
    pub pair: (BinaryString, BinaryString),
    pub branches: (BinaryString, BinaryString),
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingCheck {
    pub trees_checked: u64,
    pub violation_count: u64,
    /// The first few violations, in enumeration order.
    pub violations: Vec<PairingViolation>,
    pub pass: bool,
}

/// Checks `A_{x_i} ∩ H_c(p) = ∅` for every pair `{s0, s1}` of every
/// matching and every two-branch tree `p` whose branches pass through `s0`
/// and `s1`. Any pruned tree containing both nodes contains such a `p`,
/// and `H_c` is antitone, so this family is exhaustive.
pub fn pairing_property_check(c: &Coloring, system: &PairingSystem) -> Result<PairingCheck> {
    const KEPT: usize = 20;
    let depth = c.depth();
    let mut trees_checked = 0u64;
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    for (i, (x, a)) in system.matchings.iter().zip(&system.level_sets).enumerate() {
        if x.level >= depth {
            return Err(Error::Range(format!("matching level {} not below depth {depth}", x.level)));
        }
        for &(s0, s1) in &x.pairs {
            for b0 in s0.extensions(depth - 1) {
                for b1 in s1.extensions(depth - 1) {
                    let p = LevelTree::closure_of(&[b0, b1], depth)?;
                    trees_checked += 1;
                    let hit: Vec<usize> = h_set_unchecked(c, &p).iter().filter(|&k| a.contains(k)).collect();
                    if !hit.is_empty() {
                        violation_count += 1;
                        if violations.len() < KEPT {
                            violations.push(PairingViolation {
                                matching: i,
                                pair: (s0, s1),
                                branches: (b0, b1),
                                levels: hit,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(PairingCheck {
        trees_checked,
        violation_count,
        violations,
        pass: violation_count == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelsCheck {
    pub checks: u64,
    /// `(t, n)` where the cone above `t` is monochromatic on level `n`.
    pub violations: Vec<(BinaryString, usize)>,
    pub pass: bool,
}

/// For every `t` in the domain and `n ∈ S(t)` below the coloring's depth,
/// checks that the nodes of level `n` extending `t` take both colors.
pub fn levels_property_check(c: &Coloring, assignment: &SplittingAssignment) -> Result<LevelsCheck> {
    let mut checks = 0u64;
    let mut violations = Vec::new();
    for (t, set) in assignment.domain().iter().zip(assignment.sets()) {
        if t.len() >= c.depth() {
            return Err(Error::Range(format!("domain string {} not below depth {}", t.token(), c.depth())));
        }
        for n in set.iter().filter(|&n| n < c.depth()) {
            checks += 1;
            if c.count_in_cone(t, n, 0) == 0 || c.count_in_cone(t, n, 1) == 0 {
                violations.push((*t, n));
            }
        }
    }
    let pass = violations.is_empty();
    Ok(LevelsCheck { checks, violations, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treecore::make_full;

    fn bs(s: &str) -> BinaryString {
        BinaryString::parse(s).unwrap()
    }

    fn single_branch(depth: usize) -> LevelTree {
        LevelTree::closure_of(&[BinaryString::zeros(depth - 1).unwrap()], depth).unwrap()
    }

    #[test]
    fn h_set_examples() {
        let full = make_full(4).unwrap();
        let c0 = Coloring::constant(4, 0).unwrap();
        assert_eq!(h_set(&c0, &full).unwrap().members(), &[0, 1, 2, 3]);
        let last = Coloring::last_bit(4).unwrap();
        assert_eq!(h_set(&last, &full).unwrap().members(), &[0]);
        assert_eq!(h_set(&last, &single_branch(4)).unwrap().members(), &[0, 1, 2, 3]);
        assert!(matches!(h_set(&last, &make_full(3).unwrap()), Err(Error::Shape(_))));
    }

    #[test]
    fn sparse_and_dense_agree() {
        let mut sparse = Coloring::constant(6, 0).unwrap();
        let dense = Coloring::last_bit(6).unwrap();
        for s in dense.ones() {
            sparse.set(&s, 1);
        }
        assert_eq!(sparse, dense);
        for level in 0..6 {
            for s in BinaryString::level(level.min(3)) {
                if level >= s.len() {
                    assert_eq!(
                        sparse.count_in_cone(&s, level, 0),
                        dense.count_in_cone(&s, level, 0)
                    );
                }
            }
        }
        sparse.set(&bs("0101"), 0);
        assert_eq!(sparse.first_difference(&dense), Some(bs("0101")));
    }

    #[test]
    fn zdensity_n_max_1() {
        let inst = zdensity_coloring(1).unwrap();
        assert_eq!(inst.depth(), 5);
        assert!(inst.host_width_ok());
        // Band 1 = levels {3, 4} over the single branch 0000.
        assert_eq!(inst.bands[0].branches, vec![bs("0000")]);
        assert_eq!(inst.assignment_table(1), vec![(3, 0), (4, 1)]);
        assert!(inst.is_bijection(1));
    }

    #[test]
    fn zdensity_host_shape() {
        let inst = zdensity_coloring(4).unwrap();
        assert_eq!(inst.depth(), 33);
        assert!(inst.host_width_ok());
        assert!(validate(&inst.host).is_ok());
        for n in 1..=4 {
            assert_eq!(inst.band(n).unwrap().branches.len(), n);
            assert!(inst.is_bijection(n));
        }
        assert!(zdensity_coloring(0).is_err());
        assert!(zdensity_coloring(6).is_err());
    }

    #[test]
    fn zdensity_keep_all_branches_gives_two_levels() {
        let inst = zdensity_coloring(3).unwrap();
        for n in 1..=3 {
            let mono = inst
                .assignment_table(n)
                .into_iter()
                .filter(|&(_, m)| m == 0 || m == (1 << n) - 1)
                .count();
            assert_eq!(mono, 2);
        }
    }

    #[test]
    fn matching_counts() {
        assert_eq!(enumerate_matchings(1, usize::MAX).unwrap().len(), 1);
        // (2k-1)!! perfect matchings of 2k points: 4 points → 3, 8 points → 105.
        assert_eq!(enumerate_matchings(2, usize::MAX).unwrap().len(), 3);
        assert_eq!(enumerate_matchings(3, usize::MAX).unwrap().len(), 105);
        assert_eq!(enumerate_matchings(3, 10).unwrap().len(), 10);
        let first = &enumerate_matchings(2, 1).unwrap()[0];
        assert_eq!(first.pairs, vec![(bs("00"), bs("01")), (bs("10"), bs("11"))]);
        assert!(enumerate_matchings(0, 5).is_err());
    }

    #[test]
    fn pairing_level_one_is_first_bit() {
        let (c, sys) = pairing_coloring(&[1].into_iter().collect(), 10, 6).unwrap();
        assert_eq!(sys.matchings.len(), 1);
        assert_eq!(sys.level_sets[0].members(), &[1, 2, 3, 4, 5]);
        for k in 1..6 {
            for t in BinaryString::level(k) {
                assert_eq!(c.color(&t), t.bit(0));
            }
        }
    }

    #[test]
    fn pairing_sets_disjoint() {
        let (_, sys) = pairing_coloring(&[1, 2].into_iter().collect(), usize::MAX, 12).unwrap();
        assert_eq!(sys.matchings.len(), 4);
        sys.check().unwrap();
        for (i, a) in sys.level_sets.iter().enumerate() {
            for (j, b) in sys.level_sets.iter().enumerate() {
                if i != j {
                    assert!(a.intersection(b).is_empty());
                }
            }
        }
        assert!(pairing_coloring(&BTreeSet::new(), 3, 8).is_err());
        assert!(pairing_coloring(&[0].into_iter().collect(), 3, 8).is_err());
        assert!(pairing_coloring(&[9].into_iter().collect(), 3, 8).is_err());
    }

    #[test]
    fn levels_coloring_cases() {
        let dom = vec![BinaryString::EMPTY, bs("0"), bs("1")];
        let sa = SplittingAssignment::residue(dom, 10).unwrap();
        assert_eq!(sa.sets()[0].members(), &[3, 6, 9]);
        assert_eq!(sa.sets()[1].members(), &[4, 7]);
        assert_eq!(sa.sets()[2].members(), &[2, 5, 8]);
        let c = levels_coloring(&sa, 10).unwrap();
        // Below every floor: default color.
        assert_eq!(c.color(&bs("0")), 0);
        assert_eq!(c.color(&bs("1")), 0);
        // t = ε on level 3: first bit.
        for s in BinaryString::level(3) {
            assert_eq!(c.color(&s), s.bit(0));
        }
        // t = 1 on level 2: nodes above 1 read their second bit, others default.
        assert_eq!(c.color(&bs("10")), 0);
        assert_eq!(c.color(&bs("11")), 1);
        assert_eq!(c.color(&bs("01")), 0);

        let overlap = SplittingAssignment::new(
            vec![BinaryString::EMPTY, bs("0")],
            vec![LevelSet::new([3], 10).unwrap(), LevelSet::new([3], 10).unwrap()],
        );
        assert!(matches!(overlap, Err(Error::Invariant(_))));
        let low = SplittingAssignment::new(vec![bs("00")], vec![LevelSet::new([2], 10).unwrap()]);
        assert!(matches!(low, Err(Error::Invariant(_))));
    }

    #[test]
    fn i_set_examples() {
        let ones = Coloring::constant(8, 1).unwrap();
        assert_eq!(i_set(&ones, &bs("01")).unwrap().members(), &[4, 5, 6, 7]);
        let last = Coloring::last_bit(8).unwrap();
        assert!(i_set(&last, &bs("01")).unwrap().is_empty());
        let zeros = Coloring::constant(8, 0).unwrap();
        assert!(i_set(&zeros, &BinaryString::EMPTY).unwrap().is_empty());
        assert!(i_set(&zeros, &BinaryString::zeros(8).unwrap()).is_err());
    }

    #[test]
    fn random_coloring_is_seeded() {
        let a = random_coloring(8, 7).unwrap();
        assert_eq!(a, random_coloring(8, 7).unwrap());
        let b = random_coloring(8, 8).unwrap();
        assert_ne!(a, b);
        let root_only = random_coloring(1, 3).unwrap();
        assert_eq!(root_only.depth(), 1);
        assert!(random_coloring(DENSE_MAX_DEPTH + 1, 0).is_err());
    }

    #[test]
    fn pairing_check_detects_constant_coloring() {
        let (c, system) = pairing_coloring(&[1].into_iter().collect(), 10, 5).unwrap();
        let report = pairing_property_check(&c, &system).unwrap();
        assert!(report.pass);
        // one pair at level 1, 2^3 branches through each side
        assert_eq!(report.trees_checked, 64);
        let bad = pairing_property_check(&Coloring::constant(5, 0).unwrap(), &system).unwrap();
        assert!(!bad.pass);
        assert_eq!(bad.violation_count, 64);
    }

    #[test]
    fn levels_check_detects_constant_coloring() {
        let s = SplittingAssignment::residue(SplittingAssignment::all_strings_up_to(1), 8).unwrap();
        let c = levels_coloring(&s, 8).unwrap();
        let report = levels_property_check(&c, &s).unwrap();
        assert!(report.pass);
        assert!(report.checks > 0);
        let bad = levels_property_check(&Coloring::constant(8, 1).unwrap(), &s).unwrap();
        assert_eq!(bad.violations.len() as u64, bad.checks);
    }
}
