//! Laflamme's game `G(ℐ)` played for a finite number of rounds.
//!
//! In round `n` player I plays a finite set `I_n ⊆ [0, N)` and player II
//! answers with `k_n ∈ [0, N) \ I_n`. The winner is not adjudicated: the
//! outcome `K = {k_n}` is reported so it can be profiled with [`crate::ideals`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::colorings::{i_set, random_coloring, Coloring};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::treecore::BinaryString;

/// Added to the game seed to derive player II's stream.
const PLAYER_TWO_SALT: u64 = 0x6A09_E667_F3BC_C909;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Round {
    #[serde(rename = "I")]
    pub move_i: Vec<u64>,
    pub k: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    /// All `horizon` rounds were played.
    pub completed: bool,
    pub player_i_stuck: bool,
    /// Player II answered with a value already in `K`.
    pub repeated_values: bool,
    /// Player II had no legal answer inside the window.
    pub window_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameTranscript {
    pub rounds: Vec<Round>,
    #[serde(rename = "K")]
    pub outcome: BTreeSet<u64>,
    pub flags: Flags,
}

impl GameTranscript {
    /// Canonical JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("transcript serializes");
        serde_json::to_string(&value).expect("value serializes")
    }
}

/// A strategy name with `key=value` parameters, written `name` or
/// `name:key=value,key=value`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct StrategyId {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl StrategyId {
    pub fn new(name: &str) -> Self {
        StrategyId {
            name: name.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        if name.is_empty() {
            return Err(Error::Argument("empty strategy name".into()));
        }
        let mut id = StrategyId::new(name);
        for kv in rest.into_iter().flat_map(|r| r.split(',')).filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("strategy parameter {kv:?} is not key=value")))?;
            id.params.insert(k.to_string(), v.to_string());
        }
        Ok(id)
    }

    fn param<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Argument(format!("{}: bad value {v:?} for {key}", self.name))),
        }
    }

    fn allow_params(&self, keys: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(Error::Argument(format!("{}: unknown parameter {k}", self.name))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

pub trait PlayerOne {
    fn propose(&mut self, round: usize, window: u64) -> Result<BTreeSet<u64>>;
    fn observe(&mut self, k: u64) -> Result<()>;
    fn is_stuck(&self) -> bool {
        false
    }
}

pub trait PlayerTwo {
    /// A response to `move_i`, or `None` when nothing inside the window is legal.
    fn respond(&mut self, round: usize, move_i: &BTreeSet<u64>, previous: &[u64], window: u64) -> Option<u64>;
}

pub const PLAYER_ONE_STRATEGIES: &[&str] = &["empty", "initial-segment", "random", "tree-builder"];
pub const PLAYER_TWO_STRATEGIES: &[&str] = &["min-legal", "min-legal-increasing", "max-legal", "random"];

struct EmptyMove;

impl PlayerOne for EmptyMove {
    fn propose(&mut self, _: usize, _: u64) -> Result<BTreeSet<u64>> {
        Ok(BTreeSet::new())
    }
    fn observe(&mut self, _: u64) -> Result<()> {
        Ok(())
    }
}

/// Plays `[0, 2^n)` in round `n`.
struct InitialSegment;

impl PlayerOne for InitialSegment {
    fn propose(&mut self, round: usize, window: u64) -> Result<BTreeSet<u64>> {
        let top = 1u64.checked_shl(round as u32).unwrap_or(u64::MAX).min(window);
        Ok((0..top).collect())
    }
    fn observe(&mut self, _: u64) -> Result<()> {
        Ok(())
    }
}

/// Includes each point of the window with probability `percent/100`.
struct RandomMove {
    rng: SplitMix64,
    percent: u64,
}

impl PlayerOne for RandomMove {
    fn propose(&mut self, _: usize, window: u64) -> Result<BTreeSet<u64>> {
        Ok((0..window).filter(|_| self.rng.below(100) < self.percent).collect())
    }
    fn observe(&mut self, _: u64) -> Result<()> {
        Ok(())
    }
}

/// Player I's tree-building strategy for a coloring `c`.
///
/// Before round `n` it holds pairwise distinct nodes `s(t)`, `t ∈ 2^n`, all
/// on one level and (after round 0) all colored 0. It plays
/// `⋃ I(s(t))`; on answer `k` it extends every `s(t)` to the two
/// lexicographically least 0-colored extensions on level `k`. When that is
/// impossible it is stuck and plays `∅` from then on.
#[derive(Debug, Clone)]
pub struct TreeBuilder {
    coloring: Coloring,
    generations: Vec<Vec<BinaryString>>,
    stuck: bool,
}

impl TreeBuilder {
    pub fn new(coloring: Coloring) -> Self {
        TreeBuilder {
            coloring,
            generations: vec![vec![BinaryString::EMPTY]],
            stuck: false,
        }
    }

    pub fn is_stuck(&self) -> bool {
        self.stuck
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    /// `s(t)` for `t ∈ 2^n`, indexed by `t`'s value.
    pub fn generation(&self, n: usize) -> Option<&[BinaryString]> {
        self.generations.get(n).map(Vec::as_slice)
    }

    pub fn generations(&self) -> &[Vec<BinaryString>] {
        &self.generations
    }

    /// Every recorded pair `(t, s(t))`, by generation.
    pub fn assignments(&self) -> Vec<(BinaryString, BinaryString)> {
        self.generations
            .iter()
            .enumerate()
            .flat_map(|(n, gen)| {
                gen.iter()
                    .enumerate()
                    .map(move |(i, s)| (BinaryString::from_value(i as u64, n).expect("fits"), *s))
            })
            .collect()
    }

    pub fn current_move(&self) -> BTreeSet<u64> {
        if self.stuck {
            return BTreeSet::new();
        }
        let last = self.generations.last().expect("generation 0 exists");
        let mut out = BTreeSet::new();
        for s in last {
            let set = i_set(&self.coloring, s).expect("assigned nodes lie inside the coloring");
            out.extend(set.iter().map(|n| n as u64));
        }
        out
    }

    /// Consumes player II's answer to the current move.
    pub fn receive(&mut self, k: u64) -> Result<()> {
        if self.stuck {
            return Ok(());
        }
        if self.current_move().contains(&k) {
            return Err(Error::Protocol(format!(
                "tree-builder: answer {k} lies in the move of round {}",
                self.generations.len() - 1
            )));
        }
        let depth = self.coloring.depth() as u64;
        let last = self.generations.last().expect("generation 0 exists");
        if k >= depth || k as usize <= last[0].len() {
            self.stuck = true;
            return Ok(());
        }
        let level = k as usize;
        let mut next = Vec::with_capacity(2 * last.len());
        for s in last {
            let mut zeros = s.extensions(level).filter(|t| self.coloring.color(t) == 0);
            match (zeros.next(), zeros.next()) {
                (Some(a), Some(b)) => {
                    next.push(a);
                    next.push(b);
                }
                _ => {
                    self.stuck = true;
                    return Ok(());
                }
            }
        }
        self.generations.push(next);
        Ok(())
    }

    /// Checks the construction's invariants: each generation is level-uniform,
    /// pairwise distinct, extends its parents, and is colored 0 after the root.
    pub fn invariants_hold(&self) -> bool {
        self.generations.iter().enumerate().all(|(n, gen)| {
            let len = gen[0].len();
            let distinct: BTreeSet<_> = gen.iter().collect();
            gen.len() == 1 << n
                && distinct.len() == gen.len()
                && gen.iter().all(|s| s.len() == len)
                && (n == 0 || gen.iter().all(|s| self.coloring.color(s) == 0))
                && (n == 0
                    || gen
                        .iter()
                        .enumerate()
                        .all(|(i, s)| self.generations[n - 1][i / 2].is_prefix_of(s) && self.generations[n - 1][i / 2] != *s))
        })
    }
}

/// Replays `history` (player II's answers so far) and returns the next move
/// together with the builder's state.
pub fn tree_builder_move(c: &Coloring, history: &[u64]) -> Result<(BTreeSet<u64>, TreeBuilder)> {
    let mut builder = TreeBuilder::new(c.clone());
    for &k in history {
        builder.receive(k)?;
    }
    Ok((builder.current_move(), builder))
}

struct TreeBuilderPlayer(TreeBuilder);

impl PlayerOne for TreeBuilderPlayer {
    fn propose(&mut self, _: usize, window: u64) -> Result<BTreeSet<u64>> {
        Ok(self.0.current_move().into_iter().filter(|&n| n < window).collect())
    }
    fn observe(&mut self, k: u64) -> Result<()> {
        self.0.receive(k)
    }
    fn is_stuck(&self) -> bool {
        self.0.is_stuck()
    }
}

/// Least legal value not yet in `K`.
struct MinLegal;

impl PlayerTwo for MinLegal {
    fn respond(&mut self, _: usize, move_i: &BTreeSet<u64>, previous: &[u64], window: u64) -> Option<u64> {
        (0..window).find(|k| !move_i.contains(k) && !previous.contains(k))
    }
}

/// Least legal value above the previous answer.
struct MinLegalIncreasing;

impl PlayerTwo for MinLegalIncreasing {
    fn respond(&mut self, _: usize, move_i: &BTreeSet<u64>, previous: &[u64], window: u64) -> Option<u64> {
        let start = previous.last().map_or(0, |&k| k + 1);
        (start..window).find(|k| !move_i.contains(k))
    }
}

/// Largest legal value; repeats freely.
struct MaxLegal;

impl PlayerTwo for MaxLegal {
    fn respond(&mut self, _: usize, move_i: &BTreeSet<u64>, _: &[u64], window: u64) -> Option<u64> {
        (0..window).rev().find(|k| !move_i.contains(k))
    }
}

/// Uniform legal value above the previous answer.
struct RandomIncreasing {
    rng: SplitMix64,
}

impl PlayerTwo for RandomIncreasing {
    fn respond(&mut self, _: usize, move_i: &BTreeSet<u64>, previous: &[u64], window: u64) -> Option<u64> {
        let start = previous.last().map_or(0, |&k| k + 1);
        let legal: Vec<u64> = (start..window).filter(|k| !move_i.contains(k)).collect();
        if legal.is_empty() {
            None
        } else {
            Some(legal[self.rng.below(legal.len() as u64) as usize])
        }
    }
}

/// Builds the coloring named by a tree-builder's `coloring` parameter.
pub fn named_coloring(name: &str, depth: usize, seed: u64) -> Result<Coloring> {
    match name {
        "const0" => Coloring::constant(depth, 0),
        "const1" => Coloring::constant(depth, 1),
        "last-bit" => Coloring::last_bit(depth),
        "random" => random_coloring(depth, seed),
        other => Err(Error::NotFound(format!("coloring {other:?}"))),
    }
}

/// Instantiates a registered player I strategy. `seed` feeds random choices;
/// tree-builder accepts `coloring`, `depth` and `cseed`.
pub fn player_one(id: &StrategyId, seed: u64) -> Result<Box<dyn PlayerOne>> {
    Ok(match id.name.as_str() {
        "empty" => {
            id.allow_params(&[])?;
            Box::new(EmptyMove)
        }
        "initial-segment" => {
            id.allow_params(&[])?;
            Box::new(InitialSegment)
        }
        "random" => {
            id.allow_params(&["percent"])?;
            let percent: u64 = id.param("percent", 10)?;
            if percent > 100 {
                return Err(Error::Argument("random: percent above 100".into()));
            }
            Box::new(RandomMove {
                rng: SplitMix64::new(seed),
                percent,
            })
        }
        "tree-builder" => {
            id.allow_params(&["coloring", "depth", "cseed"])?;
            let name: String = id.param("coloring", "random".to_string())?;
            let depth: usize = id.param("depth", 10)?;
            let cseed: u64 = id.param("cseed", seed)?;
            Box::new(TreeBuilderPlayer(TreeBuilder::new(named_coloring(&name, depth, cseed)?)))
        }
        other => return Err(Error::NotFound(format!("player I strategy {other:?}"))),
    })
}

/// Instantiates a registered player II strategy.
pub fn player_two(id: &StrategyId, seed: u64) -> Result<Box<dyn PlayerTwo>> {
    id.allow_params(&[])?;
    Ok(match id.name.as_str() {
        "min-legal" => Box::new(MinLegal),
        "min-legal-increasing" => Box::new(MinLegalIncreasing),
        "max-legal" => Box::new(MaxLegal),
        "random" => Box::new(RandomIncreasing {
            rng: SplitMix64::new(seed.wrapping_add(PLAYER_TWO_SALT)),
        }),
        other => return Err(Error::NotFound(format!("player II strategy {other:?}"))),
    })
}

/// Plays `horizon` rounds between two registered strategies.
pub fn play(horizon: usize, s1: &StrategyId, s2: &StrategyId, window: u64, seed: u64) -> Result<GameTranscript> {
    let mut one = player_one(s1, seed)?;
    let mut two = player_two(s2, seed)?;
    play_with(horizon, window, one.as_mut(), &s1.to_string(), two.as_mut(), &s2.to_string())
}

/// The game engine. Moves are checked for legality; an illegal move is a
/// protocol error naming the offending strategy and round.
pub fn play_with(
    horizon: usize,
    window: u64,
    one: &mut dyn PlayerOne,
    one_name: &str,
    two: &mut dyn PlayerTwo,
    two_name: &str,
) -> Result<GameTranscript> {
    if horizon == 0 {
        return Err(Error::Argument("horizon must be at least 1".into()));
    }
    if window == 0 {
        return Err(Error::Argument("window must be nonempty".into()));
    }
    let mut rounds = Vec::with_capacity(horizon);
    let mut answers: Vec<u64> = Vec::with_capacity(horizon);
    let mut flags = Flags::default();
    for round in 0..horizon {
        let move_i = one.propose(round, window)?;
        if let Some(&bad) = move_i.iter().find(|&&n| n >= window) {
            return Err(Error::Protocol(format!(
                "{one_name}: round {round} plays {bad} outside [0, {window})"
            )));
        }
        let Some(k) = two.respond(round, &move_i, &answers, window) else {
            flags.window_exhausted = true;
            break;
        };
        if k >= window || move_i.contains(&k) {
            return Err(Error::Protocol(format!(
                "{two_name}: round {round} answers {k}, which is not in [0, {window}) minus the move"
            )));
        }
        if answers.contains(&k) {
            flags.repeated_values = true;
        }
        one.observe(k)?;
        answers.push(k);
        rounds.push(Round {
            move_i: move_i.into_iter().collect(),
            k,
        });
    }
    flags.completed = rounds.len() == horizon;
    flags.player_i_stuck = one.is_stuck();
    Ok(GameTranscript {
        rounds,
        outcome: answers.into_iter().collect(),
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> StrategyId {
        StrategyId::parse(s).unwrap()
    }

    #[test]
    fn empty_vs_min_legal() {
        let t = play(6, &id("empty"), &id("min-legal"), 100, 0).unwrap();
        let ks: Vec<u64> = t.rounds.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(t.outcome, (0..6).collect());
        assert!(t.flags.completed);
        assert!(!t.flags.repeated_values);
    }

    #[test]
    fn initial_segment_forces_powers_of_two() {
        let t = play(7, &id("initial-segment"), &id("min-legal-increasing"), 256, 0).unwrap();
        for (n, r) in t.rounds.iter().enumerate() {
            assert_eq!(r.k, 1 << n);
        }
    }

    #[test]
    fn strategy_ids_round_trip() {
        let s = id("tree-builder:coloring=last-bit,depth=8");
        assert_eq!(s.params["depth"], "8");
        assert_eq!(StrategyId::parse(&s.to_string()).unwrap(), s);
        assert!(StrategyId::parse("random:percent").is_err());
        assert!(matches!(player_one(&id("nope"), 0), Err(Error::NotFound(_))));
        assert!(player_one(&id("empty:x=1"), 0).is_err());
    }

    #[test]
    fn repeats_and_exhaustion_are_flagged() {
        let t = play(3, &id("empty"), &id("max-legal"), 10, 0).unwrap();
        assert!(t.flags.repeated_values);
        assert_eq!(t.outcome, [9].into_iter().collect());

        let t = play(5, &id("empty"), &id("min-legal-increasing"), 3, 0).unwrap();
        assert!(t.flags.window_exhausted);
        assert!(!t.flags.completed);
        assert_eq!(t.rounds.len(), 3);
    }

    struct Cheater;
    impl PlayerTwo for Cheater {
        fn respond(&mut self, _: usize, move_i: &BTreeSet<u64>, _: &[u64], _: u64) -> Option<u64> {
            move_i.iter().next().copied()
        }
    }

    #[test]
    fn illegal_answer_is_a_protocol_error() {
        let mut one = InitialSegment;
        let err = play_with(3, 10, &mut one, "initial-segment", &mut Cheater, "cheater").unwrap_err();
        match err {
            Error::Protocol(msg) => assert!(msg.contains("cheater") && msg.contains("round 0")),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn tree_builder_constant_one_gets_stuck() {
        let c = Coloring::constant(8, 1).unwrap();
        let (mv, _) = tree_builder_move(&c, &[]).unwrap();
        assert_eq!(mv, (2..8).collect());
        // Legal answers are 0 and 1; neither admits two 0-colored extensions.
        for k in [0, 1] {
            let (_, b) = tree_builder_move(&c, &[k]).unwrap();
            assert!(b.is_stuck());
        }
        assert!(matches!(tree_builder_move(&c, &[5]), Err(Error::Protocol(_))));
    }

    #[test]
    fn tree_builder_constant_zero_grows() {
        let c = Coloring::constant(10, 0).unwrap();
        let (mv, b) = tree_builder_move(&c, &[1, 3, 5]).unwrap();
        assert!(mv.is_empty());
        assert!(!b.is_stuck());
        assert_eq!(b.generations().len(), 4);
        assert!(b.invariants_hold());
        // Level 5 has 32 nodes but the three generations need 8 distinct ones.
        assert_eq!(b.generation(3).unwrap().len(), 8);
        let (_, b) = tree_builder_move(&c, &[1, 3, 5, 12]).unwrap();
        assert!(b.is_stuck());
        let (_, b) = tree_builder_move(&c, &[0]).unwrap();
        assert!(b.is_stuck());
    }

    #[test]
    fn tree_builder_game_against_increasing_player() {
        let t = play(
            6,
            &id("tree-builder:coloring=random,depth=12,cseed=3"),
            &id("min-legal-increasing"),
            12,
            9,
        )
        .unwrap();
        for r in &t.rounds {
            assert!(!r.move_i.contains(&r.k));
        }
    }
}
