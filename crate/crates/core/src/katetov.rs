//! Finite-scale checking of Katětov morphisms.
//!
//! A morphism `f: Y → X` witnesses `ℐ ≤_K 𝒥` when `f^{-1}[A] ∈ 𝒥` for every
//! `A ∈ ℐ`. Here `ℐ` is replaced by a finite list of generators and
//! membership in `𝒥` by a named surrogate predicate with explicit
//! parameters. A pass certifies the surrogate statement on the listed
//! generators and nothing more.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{parse_err, Error, Result};
use crate::frac_string;
use crate::ideals::{phi, summable_weight, NatSet, NodeSet};
use crate::treecore::BinaryString;

/// Stamped into every report.
pub const SCOPE_NOTE: &str =
    "finite-scale surrogate check on the listed generators only; not a proof of a Katetov relation";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ground {
    /// `[0, N)`.
    Interval(u64),
    /// `[0, N)²`, points `(column, row)`.
    Grid(u64),
    /// `2^{<D}`.
    Nodes(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Nat(u64),
    Cell(u64, u64),
    Node(BinaryString),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Nat(n) => write!(f, "{n}"),
            Point::Cell(c, r) => write!(f, "{c},{r}"),
            Point::Node(s) => f.write_str(&s.token()),
        }
    }
}

impl Ground {
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Ground::Interval(n), Point::Nat(k)) => k < n,
            (Ground::Grid(n), Point::Cell(c, r)) => c < n && r < n,
            (Ground::Nodes(d), Point::Node(s)) => s.len() < *d,
            _ => false,
        }
    }

    pub fn points(&self) -> Box<dyn Iterator<Item = Point>> {
        match *self {
            Ground::Interval(n) => Box::new((0..n).map(Point::Nat)),
            Ground::Grid(n) => Box::new((0..n).flat_map(move |c| (0..n).map(move |r| Point::Cell(c, r)))),
            Ground::Nodes(d) => Box::new((0..d).flat_map(BinaryString::level).map(Point::Node)),
        }
    }

    pub fn size(&self) -> u128 {
        match *self {
            Ground::Interval(n) => u128::from(n),
            Ground::Grid(n) => u128::from(n) * u128::from(n),
            Ground::Nodes(d) => (1u128 << d) - 1,
        }
    }

    fn parse_point(&self, s: &str) -> Result<Point> {
        let bad = || Error::Argument(format!("{s:?} is not a point of {self}"));
        let p = match self {
            Ground::Interval(_) => Point::Nat(s.parse().map_err(|_| bad())?),
            Ground::Grid(_) => {
                let (c, r) = s.split_once(',').ok_or_else(bad)?;
                Point::Cell(c.parse().map_err(|_| bad())?, r.parse().map_err(|_| bad())?)
            }
            Ground::Nodes(_) => Point::Node(BinaryString::parse(s).map_err(|_| bad())?),
        };
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(bad())
        }
    }

    fn parse(s: &str) -> Result<Self> {
        let (kind, size) = s
            .split_once(':')
            .ok_or_else(|| Error::Argument(format!("ground {s:?} is not kind:size")))?;
        let size: u64 = size
            .parse()
            .map_err(|_| Error::Argument(format!("bad ground size {size:?}")))?;
        match kind {
            "interval" => Ok(Ground::Interval(size)),
            "grid" => Ok(Ground::Grid(size)),
            "nodes" => {
                if size == 0 || size > 20 {
                    return Err(Error::Range(format!("node ground depth {size} outside [1, 20]")));
                }
                Ok(Ground::Nodes(size as usize))
            }
            other => Err(Error::Argument(format!("unknown ground kind {other:?}"))),
        }
    }
}

impl fmt::Display for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ground::Interval(n) => write!(f, "interval:{n}"),
            Ground::Grid(n) => write!(f, "grid:{n}"),
            Ground::Nodes(d) => write!(f, "nodes:{d}"),
        }
    }
}

/// Finite stand-in for membership in an ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Surrogate {
    /// `|X| ≤ max` (fin).
    Cardinality { max: u64 },
    /// `X` is covered by at most `j` generators of the presentation.
    UnionOfGenerators { j: usize },
    /// Every full dyadic window `[2^n, 2^{n+1})` with `n ≥ n0` has density ≤ `eps` (𝒵).
    DyadicDensity { eps: BigRational, n0: u32 },
    /// `Σ_{n∈X} 1/(n+1) ≤ bound` (ℐ_{1/n}).
    Summable { bound: BigRational },
    /// Per-column count ≤ `m` in all but at most `j` columns (fin×fin, ℰ𝒟).
    ColumnCount { m: u64, j: usize },
    /// `φ(X \ 2^{<n0}) ≤ eps` (tr(𝒩)).
    PhiTail { eps: BigRational, n0: usize },
}

impl Surrogate {
    pub fn name(&self) -> &'static str {
        match self {
            Surrogate::Cardinality { .. } => "cardinality",
            Surrogate::UnionOfGenerators { .. } => "union",
            Surrogate::DyadicDensity { .. } => "dyadic-density",
            Surrogate::Summable { .. } => "summable",
            Surrogate::ColumnCount { .. } => "column-count",
            Surrogate::PhiTail { .. } => "phi-tail",
        }
    }

    pub fn parameters(&self) -> BTreeMap<String, String> {
        let pairs: Vec<(&str, String)> = match self {
            Surrogate::Cardinality { max } => vec![("max", max.to_string())],
            Surrogate::UnionOfGenerators { j } => vec![("j", j.to_string())],
            Surrogate::DyadicDensity { eps, n0 } => vec![("eps", frac_string(eps)), ("n0", n0.to_string())],
            Surrogate::Summable { bound } => vec![("bound", frac_string(bound))],
            Surrogate::ColumnCount { m, j } => vec![("m", m.to_string()), ("j", j.to_string())],
            Surrogate::PhiTail { eps, n0 } => vec![("eps", frac_string(eps)), ("n0", n0.to_string())],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn parse(name: &str, params: &str) -> Result<Self> {
        let map: BTreeMap<&str, &str> = params
            .split(',')
            .filter(|kv| !kv.is_empty())
            .map(|kv| {
                kv.split_once(':')
                    .ok_or_else(|| Error::Argument(format!("surrogate parameter {kv:?} is not key:value")))
            })
            .collect::<Result<_>>()?;
        let get = |k: &str| {
            map.get(k)
                .copied()
                .ok_or_else(|| Error::Argument(format!("{name}: missing parameter {k}")))
        };
        let int = |k: &str| -> Result<u64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Argument(format!("{name}: {k} is not a natural")))
        };
        let rat = |k: &str| -> Result<BigRational> { parse_fraction(get(k)?) };
        let expect = |keys: &[&str]| -> Result<()> {
            match map.keys().find(|k| !keys.contains(k)) {
                Some(k) => Err(Error::Argument(format!("{name}: unknown parameter {k}"))),
                None => Ok(()),
            }
        };
        Ok(match name {
            "cardinality" => {
                expect(&["max"])?;
                Surrogate::Cardinality { max: int("max")? }
            }
            "union" => {
                expect(&["j"])?;
                Surrogate::UnionOfGenerators { j: int("j")? as usize }
            }
            "dyadic-density" => {
                expect(&["eps", "n0"])?;
                Surrogate::DyadicDensity {
                    eps: rat("eps")?,
                    n0: int("n0")? as u32,
                }
            }
            "summable" => {
                expect(&["bound"])?;
                Surrogate::Summable { bound: rat("bound")? }
            }
            "column-count" => {
                expect(&["m", "j"])?;
                Surrogate::ColumnCount {
                    m: int("m")?,
                    j: int("j")? as usize,
                }
            }
            "phi-tail" => {
                expect(&["eps", "n0"])?;
                Surrogate::PhiTail {
                    eps: rat("eps")?,
                    n0: int("n0")? as usize,
                }
            }
            other => return Err(Error::NotFound(format!("surrogate {other:?}"))),
        })
    }

    fn applies_to(&self, ground: &Ground) -> bool {
        match self {
            Surrogate::Cardinality { .. } | Surrogate::UnionOfGenerators { .. } => true,
            Surrogate::DyadicDensity { .. } | Surrogate::Summable { .. } => matches!(ground, Ground::Interval(_)),
            Surrogate::ColumnCount { .. } => matches!(ground, Ground::Grid(_)),
            Surrogate::PhiTail { .. } => matches!(ground, Ground::Nodes(_)),
        }
    }
}

fn parse_fraction(s: &str) -> Result<BigRational> {
    let bad = || Error::Argument(format!("{s:?} is not a fraction p/q"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Ground set, generators and membership surrogate of an ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteIdealPresentation {
    pub ground: Ground,
    pub generators: Vec<BTreeSet<Point>>,
    pub surrogate: Surrogate,
}

impl FiniteIdealPresentation {
    pub fn new(ground: Ground, generators: Vec<BTreeSet<Point>>, surrogate: Surrogate) -> Result<Self> {
        let p = FiniteIdealPresentation {
            ground,
            generators,
            surrogate,
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        for (i, g) in self.generators.iter().enumerate() {
            if let Some(p) = g.iter().find(|p| !self.ground.contains(p)) {
                return Err(Error::Shape(format!("generator {i}: point {p} outside {}", self.ground)));
            }
        }
        if !self.surrogate.applies_to(&self.ground) {
            return Err(Error::Shape(format!(
                "surrogate {} does not apply to ground {}",
                self.surrogate.name(),
                self.ground
            )));
        }
        Ok(())
    }

    /// Evaluates the surrogate on `x`: (accepted, measured value).
    pub fn accepts(&self, x: &BTreeSet<Point>) -> Result<(bool, String)> {
        Ok(match &self.surrogate {
            Surrogate::Cardinality { max } => (x.len() as u64 <= *max, x.len().to_string()),
            Surrogate::UnionOfGenerators { j } => match self.min_cover(x, *j)? {
                Some(k) => (true, k.to_string()),
                None => (false, format!(">{j}")),
            },
            Surrogate::DyadicDensity { eps, n0 } => {
                let set = self.as_natset(x);
                let worst = (*n0..63)
                    .map(|n| (1u64 << n, 1u64 << (n + 1)))
                    .take_while(|&(_, hi)| hi <= set.bound())
                    .map(|(lo, hi)| BigRational::new(set.count_in(lo, hi).into(), lo.into()))
                    .max()
                    .unwrap_or_else(BigRational::zero);
                (worst <= *eps, frac_string(&worst))
            }
            Surrogate::Summable { bound } => {
                let w = summable_weight(&self.as_natset(x));
                (w <= *bound, frac_string(&w))
            }
            Surrogate::ColumnCount { m, j } => {
                let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
                for p in x {
                    if let Point::Cell(c, _) = p {
                        *counts.entry(*c).or_default() += 1;
                    }
                }
                let heavy = counts.values().filter(|&&k| k > *m).count();
                (heavy <= *j, heavy.to_string())
            }
            Surrogate::PhiTail { eps, n0 } => {
                let Ground::Nodes(depth) = self.ground else {
                    unreachable!("checked by applies_to")
                };
                let nodes = NodeSet::new(
                    depth,
                    x.iter().filter_map(|p| match p {
                        Point::Node(s) => Some(*s),
                        _ => None,
                    }),
                )?;
                let tail = phi(&nodes.without_levels_below(*n0));
                (tail <= *eps, frac_string(&tail))
            }
        })
    }

    fn as_natset(&self, x: &BTreeSet<Point>) -> NatSet {
        let Ground::Interval(n) = self.ground else {
            unreachable!("checked by applies_to")
        };
        NatSet::new(
            n,
            x.iter().filter_map(|p| match p {
                Point::Nat(k) => Some(*k),
                _ => None,
            }),
        )
        .expect("points lie in the ground")
    }

    /// Smallest number (≤ j) of generators whose union covers `x`.
    fn min_cover(&self, x: &BTreeSet<Point>, j: usize) -> Result<Option<usize>> {
        if x.is_empty() {
            return Ok(Some(0));
        }
        let relevant: Vec<&BTreeSet<Point>> = self
            .generators
            .iter()
            .filter(|g| !g.is_disjoint(x))
            .collect();
        const LIMIT: u128 = 10_000_000;
        let mut work = 0u128;
        for size in 1..=j.min(relevant.len()) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                work += 1;
                if work > LIMIT {
                    return Err(Error::Budget("union surrogate: too many generator combinations".into()));
                }
                if x.iter().all(|p| idx.iter().any(|&i| relevant[i].contains(p))) {
                    return Ok(Some(size));
                }
                // next combination
                let mut pos = size;
                while pos > 0 && idx[pos - 1] == relevant.len() - size + pos - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                idx[pos - 1] += 1;
                for q in pos..size {
                    idx[q] = idx[q - 1] + 1;
                }
            }
        }
        Ok(None)
    }
}

/// A map from the target presentation's ground to the source's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismSpec {
    Identity,
    /// `(column, row) ↦ column`, from a grid onto an interval.
    ColumnProjection,
    Table(BTreeMap<Point, Point>),
}

impl MorphismSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MorphismSpec::Identity => "identity",
            MorphismSpec::ColumnProjection => "projection-column",
            MorphismSpec::Table(_) => "table",
        }
    }

    fn apply(&self, y: &Point) -> Option<Point> {
        match (self, y) {
            (MorphismSpec::Identity, _) => Some(*y),
            (MorphismSpec::ColumnProjection, Point::Cell(c, _)) => Some(Point::Nat(*c)),
            (MorphismSpec::ColumnProjection, _) => None,
            (MorphismSpec::Table(t), _) => t.get(y).copied(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismViolation {
    pub generator: usize,
    pub points: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub pass: bool,
    pub morphism: String,
    pub surrogate: String,
    pub parameters: BTreeMap<String, String>,
    pub generators_checked: usize,
    pub violations: Vec<MorphismViolation>,
    pub scope: String,
}

/// Pulls every generator of `source` back along `f` and evaluates
/// `target`'s surrogate on the preimage.
pub fn check_morphism(
    f: &MorphismSpec,
    source: &FiniteIdealPresentation,
    target: &FiniteIdealPresentation,
) -> Result<MorphismReport> {
    source.check()?;
    target.check()?;
    if target.ground.size() > 1 << 22 {
        return Err(Error::Range(format!("ground {} too large to scan", target.ground)));
    }
    match f {
        MorphismSpec::Identity if source.ground != target.ground => {
            return Err(Error::Shape(format!(
                "identity between {} and {}",
                target.ground, source.ground
            )))
        }
        MorphismSpec::ColumnProjection => match (target.ground, source.ground) {
            (Ground::Grid(n), Ground::Interval(m)) if n == m => {}
            (t, s) => return Err(Error::Shape(format!("column projection from {t} to {s}"))),
        },
        _ => {}
    }
    // Totality and range, then the fibres of f.
    let mut fibres: BTreeMap<Point, Vec<Point>> = BTreeMap::new();
    for y in target.ground.points() {
        let x = f
            .apply(&y)
            .ok_or_else(|| Error::Domain(format!("{} is undefined at {y}", f.name())))?;
        if !source.ground.contains(&x) {
            return Err(Error::Domain(format!("{} maps {y} to {x}, outside {}", f.name(), source.ground)));
        }
        fibres.entry(x).or_default().push(y);
    }
    if let MorphismSpec::Table(t) = f {
        if let Some(y) = t.keys().find(|y| !target.ground.contains(y)) {
            return Err(Error::Domain(format!("table entry {y} outside {}", target.ground)));
        }
    }

    let mut violations = Vec::new();
    for (i, a) in source.generators.iter().enumerate() {
        let preimage: BTreeSet<Point> = a
            .iter()
            .flat_map(|x| fibres.get(x).into_iter().flatten().copied())
            .collect();
        let (ok, value) = target.accepts(&preimage)?;
        if !ok {
            violations.push(MorphismViolation {
                generator: i,
                points: a.iter().map(ToString::to_string).collect(),
                value,
            });
        }
    }
    Ok(MorphismReport {
        pass: violations.is_empty(),
        morphism: f.name().to_string(),
        surrogate: target.surrogate.name().to_string(),
        parameters: target.surrogate.parameters(),
        generators_checked: source.generators.len(),
        violations,
        scope: SCOPE_NOTE.to_string(),
    })
}

pub const BUILTIN_NAMES: &[&str] = &[
    "fin_to_z_identity",
    "summable_to_z_identity",
    "ed_to_finxfin_identity",
    "fin_to_finxfin_projection",
];

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn nat_set(points: impl IntoIterator<Item = u64>) -> BTreeSet<Point> {
    points.into_iter().map(Point::Nat).collect()
}

fn singletons(n: u64) -> Vec<BTreeSet<Point>> {
    (0..n).map(|k| nat_set([k])).collect()
}

/// `(f, ℐ, 𝒥)` for a registered inclusion or projection witness.
///
/// * `fin_to_z_identity`: `[0,256)`, singletons against dyadic density
///   `eps = 1/8` from `n0 = 4`.
/// * `summable_to_z_identity`: `[0,256)`, powers of two, squares, cubes and
///   `[0,16)` (summable weight ≤ 4) against dyadic density `1/4` from `n0 = 5`.
/// * `ed_to_finxfin_identity`: `[0,16)²`, four columns and four function
///   graphs against "count ≤ 1 except in ≤ 1 column".
/// * `fin_to_finxfin_projection`: column projection `[0,16)² → [0,16)`,
///   singletons pulled back to columns, same column surrogate.
pub fn builtin_witness(name: &str) -> Result<(MorphismSpec, FiniteIdealPresentation, FiniteIdealPresentation)> {
    match name {
        "fin_to_z_identity" => {
            let n = 256;
            let source = FiniteIdealPresentation::new(
                Ground::Interval(n),
                singletons(n),
                Surrogate::Cardinality { max: 1 },
            )?;
            let target = FiniteIdealPresentation::new(
                Ground::Interval(n),
                Vec::new(),
                Surrogate::DyadicDensity { eps: rat(1, 8), n0: 4 },
            )?;
            Ok((MorphismSpec::Identity, source, target))
        }
        "summable_to_z_identity" => {
            let n = 256u64;
            let gens = vec![
                nat_set((0..8).map(|k| 1u64 << k)),
                nat_set((0..16).map(|k| k * k)),
                nat_set((0..7).map(|k| k * k * k)),
                nat_set(0..16),
            ];
            let source = FiniteIdealPresentation::new(
                Ground::Interval(n),
                gens,
                Surrogate::Summable { bound: rat(4, 1) },
            )?;
            let target = FiniteIdealPresentation::new(
                Ground::Interval(n),
                Vec::new(),
                Surrogate::DyadicDensity { eps: rat(1, 4), n0: 5 },
            )?;
            Ok((MorphismSpec::Identity, source, target))
        }
        "ed_to_finxfin_identity" => {
            let n = 16u64;
            let column = |c: u64| (0..n).map(|r| Point::Cell(c, r)).collect::<BTreeSet<_>>();
            let graph = |f: &dyn Fn(u64) -> u64| (0..n).map(|c| Point::Cell(c, f(c))).collect::<BTreeSet<_>>();
            let mut gens: Vec<BTreeSet<Point>> = (0..4).map(column).collect();
            gens.push(graph(&|c| c));
            gens.push(graph(&|_| 0));
            gens.push(graph(&|c| c / 2));
            gens.push(graph(&|c| n - 1 - c));
            let source = FiniteIdealPresentation::new(
                Ground::Grid(n),
                gens,
                Surrogate::UnionOfGenerators { j: 1 },
            )?;
            let target = FiniteIdealPresentation::new(
                Ground::Grid(n),
                Vec::new(),
                Surrogate::ColumnCount { m: 1, j: 1 },
            )?;
            Ok((MorphismSpec::Identity, source, target))
        }
        "fin_to_finxfin_projection" => {
            let n = 16u64;
            let source = FiniteIdealPresentation::new(
                Ground::Interval(n),
                singletons(n),
                Surrogate::Cardinality { max: 1 },
            )?;
            let target = FiniteIdealPresentation::new(
                Ground::Grid(n),
                Vec::new(),
                Surrogate::ColumnCount { m: 1, j: 1 },
            )?;
            Ok((MorphismSpec::ColumnProjection, source, target))
        }
        other => Err(Error::NotFound(format!("builtin witness {other:?}"))),
    }
}

/// The one-point mutation of `fin_to_z_identity`: `f(33) = 32` (all other
/// points fixed) checked against the strict surrogate `eps = 1/32`,
/// `n0 = 5`. The singleton `{32}` (generator 32) pulls back to `{32, 33}`,
/// density `2/32` in window 5, and must be reported.
pub fn fin_to_z_one_point_mutation() -> Result<(MorphismSpec, FiniteIdealPresentation, FiniteIdealPresentation)> {
    let (_, source, mut target) = builtin_witness("fin_to_z_identity")?;
    target.surrogate = Surrogate::DyadicDensity { eps: rat(1, 32), n0: 5 };
    let Ground::Interval(n) = target.ground else {
        unreachable!()
    };
    let mut table: BTreeMap<Point, Point> = (0..n).map(|k| (Point::Nat(k), Point::Nat(k))).collect();
    table.insert(Point::Nat(33), Point::Nat(32));
    Ok((MorphismSpec::Table(table), source, target))
}

/// Presentation file:
///
/// ```text
/// ideal v1 ground=<kind>:<size> surrogate=<name> params=<k:v,...>
/// gen <point> <point> ...
/// ```
pub fn parse_presentation(text: &str) -> Result<FiniteIdealPresentation> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty presentation file"))?;
    let mut words = header.split_whitespace();
    if words.next() != Some("ideal") || words.next() != Some("v1") {
        return Err(parse_err(hline, "expected header `ideal v1 ...`"));
    }
    let mut fields = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| parse_err(hline, format!("header field {w:?} is not key=value")))?;
        fields.insert(k, v);
    }
    let field = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| parse_err(hline, format!("header lacks {k}=")))
    };
    let ground = Ground::parse(field("ground")?).map_err(|e| parse_err(hline, e.to_string()))?;
    let surrogate = Surrogate::parse(field("surrogate")?, fields.get("params").copied().unwrap_or(""))
        .map_err(|e| parse_err(hline, e.to_string()))?;
    let mut generators = Vec::new();
    for (no, line) in lines {
        let mut words = line.split_whitespace();
        if words.next() != Some("gen") {
            return Err(parse_err(no, "expected `gen <points...>`"));
        }
        let g = words
            .map(|w| ground.parse_point(w).map_err(|e| parse_err(no, e.to_string())))
            .collect::<Result<BTreeSet<Point>>>()?;
        generators.push(g);
    }
    FiniteIdealPresentation::new(ground, generators, surrogate)
}

pub fn write_presentation(p: &FiniteIdealPresentation) -> String {
    let params: Vec<String> = p
        .surrogate
        .parameters()
        .into_iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    let mut out = format!(
        "ideal v1 ground={} surrogate={} params={}\n",
        p.ground,
        p.surrogate.name(),
        params.join(",")
    );
    for g in &p.generators {
        out.push_str("gen");
        for x in g {
            out.push(' ');
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    out
}

/// Morphism file: `morphism v1`, then either `formula=<name>` or one
/// `y -> x` line per point of the target ground. Points are parsed against
/// the given grounds.
pub fn parse_morphism(text: &str, target_ground: Ground, source_ground: Ground) -> Result<MorphismSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, "morphism v1")) => {}
        Some((no, _)) => return Err(parse_err(no, "expected header `morphism v1`")),
        None => return Err(parse_err(1, "empty morphism file")),
    }
    let mut table = BTreeMap::new();
    let mut formula = None;
    for (no, line) in lines {
        if let Some(name) = line.strip_prefix("formula=") {
            if formula.is_some() || !table.is_empty() {
                return Err(parse_err(no, "formula must be the only entry"));
            }
            formula = Some(match name {
                "identity" => MorphismSpec::Identity,
                "projection-column" => MorphismSpec::ColumnProjection,
                other => return Err(parse_err(no, format!("unknown formula {other:?}"))),
            });
            continue;
        }
        if formula.is_some() {
            return Err(parse_err(no, "formula must be the only entry"));
        }
        let (y, x) = line
            .split_once("->")
            .ok_or_else(|| parse_err(no, "expected `y -> x`"))?;
        let y = target_ground
            .parse_point(y.trim())
            .map_err(|e| parse_err(no, e.to_string()))?;
        let x = source_ground
            .parse_point(x.trim())
            .map_err(|e| parse_err(no, e.to_string()))?;
        if table.insert(y, x).is_some() {
            return Err(parse_err(no, format!("{y} mapped twice")));
        }
    }
    Ok(formula.unwrap_or(MorphismSpec::Table(table)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_pass() {
        for name in BUILTIN_NAMES {
            let (f, i, j) = builtin_witness(name).unwrap();
            let report = check_morphism(&f, &i, &j).unwrap();
            assert!(report.pass, "{name}: {report:?}");
            assert_eq!(report.scope, SCOPE_NOTE);
        }
        assert!(matches!(builtin_witness("z_to_fin"), Err(Error::NotFound(_))));
    }

    #[test]
    fn mutation_fails_with_witness() {
        let (f, i, j) = fin_to_z_one_point_mutation().unwrap();
        let report = check_morphism(&f, &i, &j).unwrap();
        assert!(!report.pass);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].generator, 32);
        assert_eq!(report.violations[0].points, vec!["32"]);
        assert_eq!(report.violations[0].value, "1/16");
    }

    #[test]
    fn union_surrogate_counts_generators() {
        let p = FiniteIdealPresentation::new(
            Ground::Interval(10),
            vec![nat_set([0, 1]), nat_set([2, 3]), nat_set([4])],
            Surrogate::UnionOfGenerators { j: 2 },
        )
        .unwrap();
        assert_eq!(p.accepts(&nat_set([0, 3])).unwrap(), (true, "2".to_string()));
        assert_eq!(p.accepts(&nat_set([0, 3, 4])).unwrap(), (false, ">2".to_string()));
        assert!(!p.accepts(&nat_set([9])).unwrap().0);
        assert_eq!(p.accepts(&BTreeSet::new()).unwrap(), (true, "0".to_string()));
    }

    #[test]
    fn phi_tail_surrogate() {
        let p = FiniteIdealPresentation::new(
            Ground::Nodes(5),
            Vec::new(),
            Surrogate::PhiTail { eps: rat(1, 4), n0: 2 },
        )
        .unwrap();
        let x: BTreeSet<Point> = ["0", "000", "001"]
            .iter()
            .map(|s| Point::Node(BinaryString::parse(s).unwrap()))
            .collect();
        assert_eq!(p.accepts(&x).unwrap(), (true, "1/4".to_string()));
    }

    #[test]
    fn shape_and_domain_errors() {
        let (_, i, _) = builtin_witness("fin_to_z_identity").unwrap();
        let (_, _, grid) = builtin_witness("ed_to_finxfin_identity").unwrap();
        assert!(matches!(check_morphism(&MorphismSpec::Identity, &i, &grid), Err(Error::Shape(_))));
        let partial = MorphismSpec::Table([(Point::Nat(0), Point::Nat(0))].into_iter().collect());
        let (_, _, z) = builtin_witness("fin_to_z_identity").unwrap();
        assert!(matches!(check_morphism(&partial, &i, &z), Err(Error::Domain(_))));
        assert!(FiniteIdealPresentation::new(Ground::Interval(4), vec![nat_set([7])], Surrogate::Cardinality { max: 1 })
            .is_err());
        assert!(FiniteIdealPresentation::new(Ground::Grid(4), vec![], Surrogate::Summable { bound: rat(1, 1) })
            .is_err());
    }

    #[test]
    fn presentation_text_round_trip() {
        for name in BUILTIN_NAMES {
            let (_, i, j) = builtin_witness(name).unwrap();
            for p in [i, j] {
                assert_eq!(parse_presentation(&write_presentation(&p)).unwrap(), p);
            }
        }
        let err = parse_presentation("ideal v1 ground=interval:4 surrogate=cardinality params=max:1\ngen 1\ngen 9\n")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn morphism_files() {
        let g = Ground::Interval(3);
        assert_eq!(parse_morphism("morphism v1\nformula=identity\n", g, g).unwrap(), MorphismSpec::Identity);
        let t = parse_morphism("morphism v1\n0 -> 1\n1 -> 1\n2 -> 0\n", g, g).unwrap();
        let MorphismSpec::Table(t) = t else { panic!() };
        assert_eq!(t[&Point::Nat(2)], Point::Nat(0));
        assert!(matches!(
            parse_morphism("morphism v1\n0 -> 5\n", g, g),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_morphism("morphism v2\n", g, g).is_err());
    }
}
