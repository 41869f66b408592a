//! Finite Halpern–Läuchli search.
//!
//! Given a coloring of `2^{<D}` and a height `h`, find a perfect subtree
//! of height `h` (a [`TreeEmbedding`] whose top images are branches of
//! length `D-1`) together with the largest level set on which its slices
//! are monochromatic. Two variants exist: `uniform` (one color on every
//! chosen level) and `by_levels` (each chosen level constant on its own).
//!
//! [`brute_force_max`] enumerates every embedding. [`search_best`] is a
//! branch and bound over level/color patterns: a pattern fixes, for some
//! levels, the only color allowed there, and a bottom-up reachability table
//! decides whether some embedding respects it. Both return the same
//! certificate: maximal `m`, ties broken by the length-lex order of the
//! image list (split nodes first, in argument order).

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colorings::{h_set_unchecked, slice_color, Coloring, ZDensityInstance};
use crate::error::{Error, Result};
use crate::treecore::{embed_closure, BinaryString, LevelSet, LevelTree, TreeEmbedding, MAX_HEIGHT};

/// Largest depth accepted by the searches; node tables are dense.
pub const SEARCH_MAX_DEPTH: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Uniform,
    ByLevels,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColorWitness {
    Uniform(u8),
    ByLevels(Vec<u8>),
}

/// A perfect subtree and a level set on which it is monochromatic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HlCertificate {
    pub embedding: TreeEmbedding,
    pub levels: LevelSet,
    pub mode: Mode,
    pub color_witness: ColorWitness,
}

/// Wire form of a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub mode: Mode,
    pub height: usize,
    pub split_nodes: Vec<BinaryString>,
    pub leaf_images: Vec<BinaryString>,
    pub levels: Vec<usize>,
    pub color_witness: ColorWitness,
}

impl HlCertificate {
    pub fn to_record(&self) -> CertificateRecord {
        CertificateRecord {
            mode: self.mode,
            height: self.embedding.height(),
            split_nodes: self.embedding.split_nodes().to_vec(),
            leaf_images: self.embedding.leaf_images().to_vec(),
            levels: self.levels.members().to_vec(),
            color_witness: self.color_witness.clone(),
        }
    }

    pub fn from_record(r: &CertificateRecord) -> Result<Self> {
        let embedding = TreeEmbedding::from_parts(r.height, &r.split_nodes, &r.leaf_images)?;
        let levels = LevelSet::new(r.levels.iter().copied(), embedding.top_level() + 1)?;
        Ok(HlCertificate {
            embedding,
            levels,
            mode: r.mode,
            color_witness: r.color_witness.clone(),
        })
    }

    pub fn size(&self) -> usize {
        self.levels.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub height: usize,
    /// Reported threshold: outcomes say whether `m` reached it.
    pub min_levels: usize,
    /// Enumeration cap for the oracle, explored-state cap per search.
    pub node_budget: u64,
    pub workers: usize,
}

impl SearchBudget {
    pub fn new(height: usize) -> Self {
        SearchBudget {
            height,
            min_levels: 1,
            node_budget: 50_000_000,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub m: usize,
    pub certificate: HlCertificate,
    /// False when the node budget ran out; `m` is then a lower bound.
    pub complete: bool,
    pub meets_min: bool,
    pub explored: u64,
}

/// Checks that every listed level of the embedding's closure is
/// monochromatic, with the colors the witness claims.
pub fn verify_certificate(c: &Coloring, cert: &HlCertificate) -> Result<bool> {
    let depth = c.depth();
    if cert.embedding.top_level() + 1 != depth {
        return Err(Error::Shape(format!(
            "certificate top level {} does not fit depth {depth}",
            cert.embedding.top_level()
        )));
    }
    let q = embed_closure(&cert.embedding, depth)?;
    if cert.levels.iter().any(|n| n >= depth) {
        return Ok(false);
    }
    let colors: Vec<Option<u8>> = cert
        .levels
        .iter()
        .map(|n| slice_color(c, q.level(n).iter()))
        .collect();
    Ok(match (&cert.mode, &cert.color_witness) {
        (Mode::Uniform, ColorWitness::Uniform(w)) => colors.iter().all(|&col| col == Some(*w)),
        (Mode::ByLevels, ColorWitness::ByLevels(ws)) => {
            ws.len() == colors.len() && colors.iter().zip(ws).all(|(col, w)| *col == Some(*w))
        }
        _ => false,
    })
}

/// The admissible level set of an embedding with the given top images.
fn evaluate(c: &Coloring, leaves: &[BinaryString], mode: Mode) -> (LevelSet, ColorWitness) {
    let depth = c.depth();
    let mut mono: Vec<Option<u8>> = Vec::with_capacity(depth);
    for level in 0..depth {
        let first = c.color(&leaves[0].prefix(level));
        let same = leaves[1..].iter().all(|l| c.color(&l.prefix(level)) == first);
        mono.push(same.then_some(first));
    }
    match mode {
        Mode::Uniform => {
            let zeros = mono.iter().filter(|&&m| m == Some(0)).count();
            let ones = mono.iter().filter(|&&m| m == Some(1)).count();
            let color = if ones > zeros { 1 } else { 0 };
            let levels = (0..depth).filter(|&l| mono[l] == Some(color));
            (
                LevelSet::new(levels, depth).expect("below depth"),
                ColorWitness::Uniform(color),
            )
        }
        Mode::ByLevels => {
            let levels: Vec<usize> = (0..depth).filter(|&l| mono[l].is_some()).collect();
            let witness = levels.iter().map(|&l| mono[l].expect("mono")).collect();
            (
                LevelSet::new(levels, depth).expect("below depth"),
                ColorWitness::ByLevels(witness),
            )
        }
    }
}

fn certificate_for(c: &Coloring, images: Vec<BinaryString>, height: usize, mode: Mode) -> HlCertificate {
    let embedding =
        TreeEmbedding::new(height, images, c.depth() - 1).expect("search produces valid embeddings");
    let (levels, color_witness) = evaluate(c, embedding.leaf_images(), mode);
    HlCertificate {
        embedding,
        levels,
        mode,
        color_witness,
    }
}

fn check_instance(c: &Coloring, budget: &SearchBudget) -> Result<()> {
    let depth = c.depth();
    if depth > SEARCH_MAX_DEPTH {
        return Err(Error::Range(format!(
            "search depth {depth} exceeds {SEARCH_MAX_DEPTH}"
        )));
    }
    if budget.height > MAX_HEIGHT {
        return Err(Error::Range(format!(
            "height {} exceeds {MAX_HEIGHT}",
            budget.height
        )));
    }
    if budget.height >= depth {
        return Err(Error::Argument(format!(
            "no embedding of height {} has its top on level {}",
            budget.height,
            depth - 1
        )));
    }
    if budget.min_levels == 0 {
        return Err(Error::Argument("min_levels must be at least 1".into()));
    }
    Ok(())
}

/// Number of embeddings of height `height` inside a cone whose top level
/// lies `span` levels above the cone's root. Saturates at `u128::MAX`.
pub fn count_embeddings(height: usize, span: usize) -> u128 {
    let mut table: Vec<u128> = (0..=span)
        .map(|d| 1u128.checked_shl(d as u32).unwrap_or(u128::MAX))
        .collect();
    for h in 1..=height {
        let prev = table.clone();
        for d in 0..=span {
            let mut total = 0u128;
            for len in 0..=d.saturating_sub(h) {
                if d < len + 1 {
                    break;
                }
                let sub = prev[d - len - 1];
                let ways = 1u128
                    .checked_shl(len as u32)
                    .unwrap_or(u128::MAX)
                    .saturating_mul(sub.saturating_mul(sub));
                total = total.saturating_add(ways);
            }
            table[d] = if d >= h { total } else { 0 };
        }
    }
    table[span]
}

/// Exhaustive oracle: every embedding of the requested height is scored.
pub fn brute_force_max(c: &Coloring, budget: &SearchBudget, mode: Mode) -> Result<SearchOutcome> {
    check_instance(c, budget)?;
    let depth = c.depth();
    let h = budget.height;
    let bound = count_embeddings(h, depth - 1);
    if bound > u128::from(budget.node_budget) {
        return Err(Error::Budget(format!(
            "{bound} embeddings exceed the budget of {}",
            budget.node_budget
        )));
    }

    struct Enumerator<'a> {
        c: &'a Coloring,
        depth: usize,
        height: usize,
        mode: Mode,
        images: Vec<BinaryString>,
        pending: Vec<(usize, BinaryString)>,
        best: Option<(usize, Vec<BinaryString>)>,
        visited: u64,
    }

    impl Enumerator<'_> {
        fn run(&mut self) {
            let Some((arg, cone)) = self.pending.pop() else {
                self.visit();
                return;
            };
            let remaining = self.height - BinaryString::from_index(arg).len();
            if remaining == 0 {
                for leaf in cone.extensions(self.depth - 1) {
                    self.images[arg] = leaf;
                    self.run();
                }
            } else {
                for len in cone.len()..=(self.depth - 1 - remaining) {
                    for r in cone.extensions(len) {
                        self.images[arg] = r;
                        self.pending.push((2 * arg + 1, r.child(0)));
                        self.pending.push((2 * arg + 2, r.child(1)));
                        self.run();
                        self.pending.truncate(self.pending.len() - 2);
                    }
                }
            }
            self.pending.push((arg, cone));
        }

        fn visit(&mut self) {
            self.visited += 1;
            let first_leaf = (1usize << self.height) - 1;
            let (levels, _) = evaluate(self.c, &self.images[first_leaf..], self.mode);
            let m = levels.len();
            let better = match &self.best {
                None => true,
                Some((bm, key)) => m > *bm || (m == *bm && self.images < *key),
            };
            if better {
                self.best = Some((m, self.images.clone()));
            }
        }
    }

    let mut en = Enumerator {
        c,
        depth,
        height: h,
        mode,
        images: vec![BinaryString::EMPTY; (1usize << (h + 1)) - 1],
        pending: vec![(0, BinaryString::EMPTY)],
        best: None,
        visited: 0,
    };
    en.run();
    let (m, images) = en.best.expect("at least one embedding exists");
    Ok(SearchOutcome {
        m,
        certificate: certificate_for(c, images, h, mode),
        complete: true,
        meets_min: m >= budget.min_levels,
        explored: en.visited,
    })
}

const FREE: u8 = 0b11;

/// Branch and bound over level/color patterns.
struct PatternSolver<'a> {
    c: &'a Coloring,
    depth: usize,
    height: usize,
    mode: Mode,
    /// Color of every node of `2^{<D}` by length-lex index.
    colors: Vec<u8>,
    /// Forced image of the root argument, when searching one partition.
    root: Option<BinaryString>,
    node_budget: u64,
    explored: u64,
    exhausted: bool,
}

/// `tables[k][idx]`: some height-`k` embedding rooted in the cone of node
/// `idx` respects the pattern, with `idx` itself on its path.
type Reach = Vec<Vec<bool>>;

impl<'a> PatternSolver<'a> {
    fn new(c: &'a Coloring, height: usize, mode: Mode, root: Option<BinaryString>, node_budget: u64) -> Self {
        let depth = c.depth();
        let colors = (0..(1usize << depth) - 1)
            .map(|i| c.color(&BinaryString::from_index(i)))
            .collect();
        PatternSolver {
            c,
            depth,
            height,
            mode,
            colors,
            root,
            node_budget,
            explored: 0,
            exhausted: false,
        }
    }

    fn ok(&self, allow: &[u8], s: &BinaryString) -> bool {
        (allow[s.len()] >> self.colors[s.index()]) & 1 == 1
    }

    fn reach(&self, allow: &[u8]) -> Reach {
        let d = self.depth;
        let n = (1usize << d) - 1;
        let mut tables = vec![vec![false; n]; self.height + 1];
        for len in (0..d).rev() {
            for s in BinaryString::level(len) {
                let idx = s.index();
                if !self.ok(allow, &s) {
                    continue;
                }
                if len == d - 1 {
                    tables[0][idx] = true;
                    continue;
                }
                let (c0, c1) = (2 * idx + 1, 2 * idx + 2);
                tables[0][idx] = tables[0][c0] || tables[0][c1];
                for k in 1..=self.height {
                    tables[k][idx] = (tables[k - 1][c0] && tables[k - 1][c1])
                        || tables[k][c0]
                        || tables[k][c1];
                }
            }
        }
        tables
    }

    fn splittable(&self, allow: &[u8], tables: &Reach, r: &BinaryString, k: usize) -> bool {
        r.len() + 1 < self.depth
            && self.ok(allow, r)
            && tables[k - 1][2 * r.index() + 1]
            && tables[k - 1][2 * r.index() + 2]
    }

    fn feasible(&self, allow: &[u8]) -> Option<Reach> {
        let tables = self.reach(allow);
        let ok = match self.root {
            None => tables[self.height][0],
            Some(r) => {
                (0..r.len()).all(|k| self.ok(allow, &r.prefix(k)))
                    && self.splittable(allow, &tables, &r, self.height)
            }
        };
        ok.then_some(tables)
    }

    /// Length-lex least image list respecting a feasible pattern.
    fn lexmin(&self, allow: &[u8], tables: &Reach) -> Vec<BinaryString> {
        let mut images = vec![BinaryString::EMPTY; (1usize << (self.height + 1)) - 1];
        match self.root {
            None => self.lexmin_from(allow, tables, BinaryString::EMPTY, self.height, 0, &mut images),
            Some(r) => {
                images[0] = r;
                self.lexmin_from(allow, tables, r.child(0), self.height - 1, 1, &mut images);
                self.lexmin_from(allow, tables, r.child(1), self.height - 1, 2, &mut images);
            }
        }
        images
    }

    fn lexmin_from(
        &self,
        allow: &[u8],
        tables: &Reach,
        cone: BinaryString,
        k: usize,
        arg: usize,
        images: &mut [BinaryString],
    ) {
        debug_assert!(tables[k][cone.index()]);
        if k == 0 {
            let mut s = cone;
            while s.len() + 1 < self.depth {
                let left = s.child(0);
                s = if tables[0][left.index()] { left } else { s.child(1) };
            }
            images[arg] = s;
            return;
        }
        let mut frontier = vec![cone];
        loop {
            if let Some(r) = frontier.iter().find(|r| self.splittable(allow, tables, r, k)) {
                let r = *r;
                images[arg] = r;
                self.lexmin_from(allow, tables, r.child(0), k - 1, 2 * arg + 1, images);
                self.lexmin_from(allow, tables, r.child(1), k - 1, 2 * arg + 2, images);
                return;
            }
            frontier = frontier
                .iter()
                .flat_map(|s| [s.child(0), s.child(1)])
                .filter(|s| s.len() < self.depth && self.ok(allow, s))
                .collect();
            assert!(!frontier.is_empty(), "feasible pattern without a split");
        }
    }

    fn options(&self, color: Option<u8>) -> Vec<u8> {
        match (self.mode, color) {
            (Mode::Uniform, Some(col)) => vec![1 << col, FREE],
            _ => vec![0b01, 0b10, FREE],
        }
    }

    fn branch(&mut self, level: usize, allow: &mut Vec<u8>, count: usize, color: Option<u8>, best: &mut Best, changed: bool) {
        if self.exhausted {
            return;
        }
        self.explored += 1;
        if self.explored > self.node_budget {
            self.exhausted = true;
            return;
        }
        if count + (self.depth - level) < best.m {
            return;
        }
        if changed && self.feasible(allow).is_none() {
            return;
        }
        if level == self.depth {
            if count > best.m {
                best.m = count;
                best.patterns.clear();
            }
            best.patterns.push(allow.clone());
            return;
        }
        for opt in self.options(color) {
            allow[level] = opt;
            let add = usize::from(opt != FREE);
            self.branch(level + 1, allow, count + add, color, best, opt != FREE);
        }
        allow[level] = FREE;
    }

    /// Best `(m, images)` for this solver's (partition of the) search space.
    fn solve(&mut self) -> Option<(usize, Vec<BinaryString>)> {
        let free = vec![FREE; self.depth];
        let tables = self.feasible(&free)?;
        let baseline = self.lexmin(&free, &tables);
        let first_leaf = (1usize << self.height) - 1;
        let (levels, _) = evaluate(self.c, &baseline[first_leaf..], self.mode);

        let mut best = Best {
            m: levels.len(),
            patterns: Vec::new(),
        };
        let colors: Vec<Option<u8>> = match self.mode {
            Mode::Uniform => vec![Some(0), Some(1)],
            Mode::ByLevels => vec![None],
        };
        for color in colors {
            let mut allow = free.clone();
            self.branch(0, &mut allow, 0, color, &mut best, false);
        }

        let mut winner: Option<(usize, Vec<BinaryString>)> = None;
        for pattern in &best.patterns {
            let tables = self.feasible(pattern).expect("recorded patterns are feasible");
            let images = self.lexmin(pattern, &tables);
            let (levels, _) = evaluate(self.c, &images[first_leaf..], self.mode);
            let m = levels.len();
            let better = match &winner {
                None => true,
                Some((wm, key)) => m > *wm || (m == *wm && images < *key),
            };
            if better {
                winner = Some((m, images));
            }
        }
        Some(winner.unwrap_or((levels.len(), baseline)))
    }
}

struct Best {
    m: usize,
    patterns: Vec<Vec<u8>>,
}

/// Branch-and-bound search. With `workers > 1` (and `height ≥ 1`) the
/// space is partitioned by the root split node and the partitions are
/// solved in parallel; the merged result equals the single-worker one.
pub fn search_best(c: &Coloring, budget: &SearchBudget, mode: Mode) -> Result<SearchOutcome> {
    check_instance(c, budget)?;
    let h = budget.height;
    let depth = c.depth();

    let (m, images, complete, explored) = if budget.workers <= 1 || h == 0 {
        let mut solver = PatternSolver::new(c, h, mode, None, budget.node_budget);
        let (m, images) = solver.solve().expect("the unconstrained pattern is feasible");
        (m, images, !solver.exhausted, solver.explored)
    } else {
        let roots: Vec<BinaryString> = (0..depth - h)
            .flat_map(BinaryString::level)
            .collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(budget.workers)
            .build()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
        // (best pattern, finished within budget, states explored) per root
        type Part = (Option<(usize, Vec<BinaryString>)>, bool, u64);
        let parts: Vec<Part> = pool.install(|| {
            roots
                .par_iter()
                .map(|&r| {
                    let mut solver = PatternSolver::new(c, h, mode, Some(r), budget.node_budget);
                    let res = solver.solve();
                    (res, !solver.exhausted, solver.explored)
                })
                .collect()
        });
        let complete = parts.iter().all(|p| p.1);
        let explored = parts.iter().map(|p| p.2).sum();
        let (m, images) = parts
            .into_iter()
            .filter_map(|p| p.0)
            .reduce(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
            .expect("some root admits an embedding");
        (m, images, complete, explored)
    };
    Ok(SearchOutcome {
        m,
        certificate: certificate_for(c, images, h, mode),
        complete,
        meets_min: m >= budget.min_levels,
        explored,
    })
}

/// Per-band result of the density identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandCheck {
    pub band: usize,
    pub selection: Vec<usize>,
    pub expected: u64,
    pub actual: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandReport {
    pub checks: Vec<BandCheck>,
    pub all_pass: bool,
}

/// The subtree of the host keeping the selected branches of band `n`,
/// each continued with zeros up to the top level.
pub fn band_selection_tree(inst: &ZDensityInstance, n: usize, selection: &BTreeSet<usize>) -> Result<LevelTree> {
    let band = inst
        .band(n)
        .ok_or_else(|| Error::Argument(format!("band {n} outside [1, {}]", inst.n_max)))?;
    if selection.is_empty() {
        return Err(Error::Argument(format!("empty selection for band {n}")));
    }
    if let Some(&j) = selection.iter().find(|&&j| j >= band.branches.len()) {
        return Err(Error::Argument(format!("branch {j} not in band {n}")));
    }
    let leaves: Vec<BinaryString> = selection
        .iter()
        .map(|&j| inst.branch_leaf(n, j).expect("index checked"))
        .collect();
    LevelTree::closure_of(&leaves, inst.depth())
}

/// Counts monochromatic band levels of the selected subtree and compares
/// them with `2^{n-k+1}` for a selection of `k` branches.
pub fn zdensity_band_check(
    inst: &ZDensityInstance,
    selection: &BTreeMap<usize, BTreeSet<usize>>,
) -> Result<BandReport> {
    let mut checks = Vec::with_capacity(selection.len());
    for (&n, sel) in selection {
        let q = band_selection_tree(inst, n, sel)?;
        let band = inst.band(n).expect("checked above");
        let h = h_set_unchecked(&inst.coloring, &q);
        let actual = band.levels().filter(|&l| h.contains(l)).count() as u64;
        let expected = 1u64 << (n + 1 - sel.len());
        checks.push(BandCheck {
            band: n,
            selection: sel.iter().copied().collect(),
            expected,
            actual,
            pass: expected == actual,
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(BandReport { checks, all_pass })
}

/// Runs [`zdensity_band_check`] on every band and every nonempty selection.
pub fn zdensity_exhaustive(inst: &ZDensityInstance) -> Result<BandReport> {
    let mut checks = Vec::new();
    for n in 1..=inst.n_max {
        for mask in 1u64..(1 << n) {
            let sel: BTreeSet<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
            let report = zdensity_band_check(inst, &[(n, sel)].into_iter().collect())?;
            checks.extend(report.checks);
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(BandReport { checks, all_pass })
}
