//! Strong bisimilarity and its stratification by partition refinement.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::chart::{Chart, Move, Prechart, StateId};
use crate::expr::{Letter, Var};

/// A partition of `0..n`; block ids are numbered by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<usize>,
    count: usize,
}

impl Partition {
    pub fn total(n: usize) -> Self {
        Partition {
            block_of: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    fn from_keys<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let block_of: Vec<usize> = keys
            .into_iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        Partition {
            block_of,
            count: ids.len(),
        }
    }

    pub fn block(&self, q: StateId) -> usize {
        self.block_of[q]
    }

    pub fn num_blocks(&self) -> usize {
        self.count
    }

    pub fn same(&self, x: StateId, y: StateId) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn blocks(&self) -> Vec<Vec<StateId>> {
        let mut out = vec![Vec::new(); self.count];
        for (q, &b) in self.block_of.iter().enumerate() {
            out[b].push(q);
        }
        out
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let mut image = vec![None; self.count];
        self.block_of
            .iter()
            .zip(&coarser.block_of)
            .all(|(&b, &c)| *image[b].get_or_insert(c) == c)
    }
}

type Signature = (Vec<Var>, Vec<(Letter, usize)>);

fn signature(p: &Prechart, part: &Partition, q: StateId) -> Signature {
    let outs: Vec<Var> = p.outputs(q).collect();
    let moves: BTreeSet<(Letter, usize)> =
        p.transitions(q).map(|(a, t)| (a, part.block(t))).collect();
    (outs, moves.into_iter().collect())
}

/// One stratification step: states are related at the next level iff they
/// have equal outputs and match each other's transitions up to `part`.
pub fn refine(p: &Prechart, part: &Partition) -> Partition {
    Partition::from_keys(p.states().map(|q| signature(p, part, q)))
}

/// The greatest bisimulation on `p`, as a partition.
pub fn bisimilarity(p: &Prechart) -> Partition {
    let mut part = Partition::from_keys(p.states().map(|q| p.outputs(q).collect::<Vec<_>>()));
    loop {
        let next =
            Partition::from_keys(p.states().map(|q| (part.block(q), signature(p, &part, q))));
        if next.num_blocks() == part.num_blocks() {
            return part;
        }
        part = next;
    }
}

/// The chain `~(0), ~(1), ...` up to and including the first level that
/// equals its successor, at which point it coincides with bisimilarity.
pub fn stratification(p: &Prechart) -> Vec<Partition> {
    let mut chain = vec![Partition::total(p.len())];
    loop {
        let last = chain.last().expect("nonempty chain");
        let next = refine(p, last);
        if next.num_blocks() == last.num_blocks() {
            return chain;
        }
        chain.push(next);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "{n}"),
            Level::Infinite => write!(f, "inf"),
        }
    }
}

/// The largest `n` with `x ~(n) y`, read off a chain from [`stratification`].
pub fn level_in(chain: &[Partition], x: StateId, y: StateId) -> Level {
    match chain.iter().position(|part| !part.same(x, y)) {
        Some(n) => Level::Finite(n - 1),
        None => Level::Infinite,
    }
}

pub fn stratified_level(c1: &Chart, c2: &Chart) -> Level {
    let (p, off) = Prechart::disjoint_union(c1.prechart(), c2.prechart());
    level_in(&stratification(&p), c1.start(), c2.start() + off)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisimOutcome {
    /// A bisimulation between the reachable parts containing the start pair.
    Bisimilar(Vec<(StateId, StateId)>),
    /// The least `n` at which the start states are not `~(n)`-related.
    Distinguished(usize),
}

impl BisimOutcome {
    pub fn is_bisimilar(&self) -> bool {
        matches!(self, BisimOutcome::Bisimilar(_))
    }
}

pub fn bisimilar(c1: &Chart, c2: &Chart) -> BisimOutcome {
    let (p, off) = Prechart::disjoint_union(c1.prechart(), c2.prechart());
    let (s1, s2) = (c1.start(), c2.start() + off);
    let part = bisimilarity(&p);
    if part.same(s1, s2) {
        let r1 = c1.prechart().reachable_from(&[c1.start()]);
        let r2 = c2.prechart().reachable_from(&[c2.start()]);
        let mut rel = Vec::new();
        for &x in &r1 {
            for &y in &r2 {
                if part.same(x, y + off) {
                    rel.push((x, y));
                }
            }
        }
        rel.sort_unstable();
        BisimOutcome::Bisimilar(rel)
    } else {
        match level_in(&stratification(&p), s1, s2) {
            Level::Finite(n) => BisimOutcome::Distinguished(n + 1),
            Level::Infinite => unreachable!("stratification converges to bisimilarity"),
        }
    }
}

/// Checks both transfer conditions at every pair of `rel`.
pub fn is_bisimulation(p1: &Prechart, p2: &Prechart, rel: &[(StateId, StateId)]) -> bool {
    let set: BTreeSet<(StateId, StateId)> = rel.iter().copied().collect();
    set.iter().all(|&(x, y)| {
        let ox: BTreeSet<Var> = p1.outputs(x).collect();
        let oy: BTreeSet<Var> = p2.outputs(y).collect();
        ox == oy
            && p1.transitions(x).all(|(a, x2)| {
                p2.transitions(y)
                    .any(|(b, y2)| a == b && set.contains(&(x2, y2)))
            })
            && p2.transitions(y).all(|(b, y2)| {
                p1.transitions(x)
                    .any(|(a, x2)| a == b && set.contains(&(x2, y2)))
            })
    })
}

/// The quotient by bisimilarity and the map sending each state to its class.
pub fn quotient(p: &Prechart) -> (Prechart, Vec<StateId>) {
    let part = bisimilarity(p);
    let blocks = part.blocks();
    let mut q = Prechart::with_alphabet(p.alphabet().clone());
    for b in &blocks {
        q.add_state(p.label(b[0]));
    }
    for (id, b) in blocks.iter().enumerate() {
        for m in p.beta(b[0]) {
            match *m {
                Move::Act(a, t) => q.add_trans(id, a, part.block(t)),
                Move::Out(v) => q.add_out(id, v),
            }
        }
    }
    let map = p.states().map(|s| part.block(s)).collect();
    (q, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{expand, parse};

    fn chart(s: &str) -> Chart {
        expand(&parse(s).unwrap(), 1000).unwrap()
    }

    #[test]
    fn loop_and_double_loop_are_bisimilar() {
        let (c1, c2) = (chart("mu v1.a.v1"), chart("mu v1.a.a.v1"));
        match bisimilar(&c1, &c2) {
            BisimOutcome::Bisimilar(rel) => {
                assert!(rel.contains(&(c1.start(), c2.start())));
                assert!(is_bisimulation(c1.prechart(), c2.prechart(), &rel));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(stratified_level(&c1, &c2), Level::Infinite);
    }

    #[test]
    fn unguarded_loop_is_zero() {
        assert!(bisimilar(&chart("mu v1.v1"), &chart("0")).is_bisimilar());
    }

    #[test]
    fn distinguishing_levels() {
        assert_eq!(
            bisimilar(&chart("a.0"), &chart("a.a.0")),
            BisimOutcome::Distinguished(2)
        );
        assert_eq!(stratified_level(&chart("0"), &chart("a.0")), Level::Finite(0));
        assert_eq!(stratified_level(&chart("a.v1"), &chart("a.v2")), Level::Finite(1));
        let l = chart("a.(a.0 + b.mu v1.a.v1)+b.mu v1.a.v1");
        let r = chart("mu v2.(a.v2 + b.mu v1.a.a.v1)");
        assert_eq!(stratified_level(&l, &r), Level::Finite(2));
    }

    #[test]
    fn quotient_merges_bisimilar_branches() {
        let c = chart("a.b.0 + a.(b.0 + b.0)");
        let (q, map) = quotient(c.prechart());
        // {start}, {b.0, b.0 + b.0}, {0}
        assert_eq!(q.len(), 3);
        let graph: Vec<_> = map.iter().copied().enumerate().collect();
        assert!(is_bisimulation(c.prechart(), &q, &graph));
        let (qq, _) = quotient(&q);
        assert_eq!(qq.len(), q.len());
    }

    #[test]
    fn chain_is_decreasing() {
        let p = chart("a.(a.0 + b.mu v1.a.v1)+b.mu v1.a.v1").prechart().clone();
        let chain = stratification(&p);
        for w in chain.windows(2) {
            assert!(w[1].refines(&w[0]));
        }
        assert_eq!(chain.last().unwrap().num_blocks(), bisimilarity(&p).num_blocks());
    }
}
