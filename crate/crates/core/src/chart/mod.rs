//! Precharts and charts: finite transition systems whose states may emit
//! output variables, with the combinators that mirror the expression syntax.

mod text;

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::expr::{Alphabet, Letter, Var};

pub use text::{parse_chart, ChartParseError};

pub type StateId = usize;

/// An element of `beta(q)`: either a transition or an output.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Move {
    Act(Letter, StateId),
    Out(Var),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Prechart {
    labels: Vec<String>,
    beta: Vec<BTreeSet<Move>>,
    alphabet: Alphabet,
}

impl Prechart {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_alphabet(alphabet: Alphabet) -> Self {
        Prechart {
            alphabet,
            ..Self::default()
        }
    }

    pub fn add_state(&mut self, label: impl Into<String>) -> StateId {
        self.labels.push(label.into());
        self.beta.push(BTreeSet::new());
        self.beta.len() - 1
    }

    pub fn add_trans(&mut self, from: StateId, a: Letter, to: StateId) {
        assert!(to < self.len(), "transition to undeclared state");
        self.alphabet.insert(a);
        self.beta[from].insert(Move::Act(a, to));
    }

    pub fn add_out(&mut self, q: StateId, v: Var) {
        self.beta[q].insert(Move::Out(v));
    }

    pub fn add_move(&mut self, q: StateId, m: Move) {
        match m {
            Move::Act(a, t) => self.add_trans(q, a, t),
            Move::Out(v) => self.add_out(q, v),
        }
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.len()
    }

    pub fn beta(&self, q: StateId) -> &BTreeSet<Move> {
        &self.beta[q]
    }

    pub fn label(&self, q: StateId) -> &str {
        &self.labels[q]
    }

    pub fn set_label(&mut self, q: StateId, label: impl Into<String>) {
        self.labels[q] = label.into();
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn extend_alphabet(&mut self, other: &Alphabet) {
        self.alphabet.extend(other);
    }

    pub fn outputs(&self, q: StateId) -> impl Iterator<Item = Var> + '_ {
        self.beta[q].iter().filter_map(|m| match m {
            Move::Out(v) => Some(*v),
            Move::Act(..) => None,
        })
    }

    pub fn transitions(&self, q: StateId) -> impl Iterator<Item = (Letter, StateId)> + '_ {
        self.beta[q].iter().filter_map(|m| match m {
            Move::Act(a, t) => Some((*a, *t)),
            Move::Out(_) => None,
        })
    }

    pub fn transition_count(&self) -> usize {
        self.states().map(|q| self.transitions(q).count()).sum()
    }

    /// Copies `other` into `self`; returns the offset added to its state ids.
    pub fn absorb(&mut self, other: &Prechart) -> usize {
        let offset = self.len();
        for q in other.states() {
            self.add_state(other.label(q));
        }
        for q in other.states() {
            for m in other.beta(q) {
                self.add_move(q + offset, shift_move(*m, offset));
            }
        }
        self.alphabet.extend(&other.alphabet);
        offset
    }

    /// Disjoint union; the second operand's states are shifted by the
    /// returned offset.
    pub fn disjoint_union(a: &Prechart, b: &Prechart) -> (Prechart, usize) {
        let mut p = a.clone();
        let offset = p.absorb(b);
        (p, offset)
    }

    /// States reachable from `from`, in breadth-first order.
    pub fn reachable_from(&self, from: &[StateId]) -> Vec<StateId> {
        let mut seen = vec![false; self.len()];
        let mut order = Vec::new();
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &s in from {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for (_, t) in self.transitions(q) {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Restriction to `keep` (listed in the new order); returns the
    /// restricted prechart and the old-to-new map.
    pub fn restrict(&self, keep: &[StateId]) -> (Prechart, Vec<Option<StateId>>) {
        let mut map = vec![None; self.len()];
        let mut p = Prechart::with_alphabet(self.alphabet.clone());
        for &q in keep {
            map[q] = Some(p.add_state(self.label(q)));
        }
        for &q in keep {
            let nq = map[q].expect("kept state");
            for m in self.beta(q) {
                match *m {
                    Move::Act(a, t) => {
                        let nt = map[t].expect("restriction must be closed under transitions");
                        p.add_trans(nq, a, nt);
                    }
                    Move::Out(v) => p.add_out(nq, v),
                }
            }
        }
        (p, map)
    }

    /// DOT rendering; outputs are drawn as edges into point-shaped nodes.
    pub fn to_dot(&self, start: Option<StateId>) -> String {
        let mut s = String::from("digraph chart {\n  rankdir=LR;\n");
        for q in self.states() {
            let shape = if Some(q) == start { "doublecircle" } else { "circle" };
            let _ = writeln!(
                s,
                "  q{q} [shape={shape}, label=\"{}\"];",
                escape(self.label(q))
            );
        }
        for q in self.states() {
            for m in self.beta(q) {
                match m {
                    Move::Act(a, t) => {
                        let _ = writeln!(s, "  q{q} -> q{t} [label=\"{a}\"];");
                    }
                    Move::Out(v) => {
                        let _ = writeln!(s, "  out_{q}_{v} [shape=point];");
                        let _ = writeln!(s, "  q{q} -> out_{q}_{v} [label=\"{v}\", style=dashed];");
                    }
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn shift_move(m: Move, offset: usize) -> Move {
    match m {
        Move::Act(a, t) => Move::Act(a, t + offset),
        o => o,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    prechart: Prechart,
    start: StateId,
}

impl Chart {
    pub fn new(prechart: Prechart, start: StateId) -> Self {
        assert!(start < prechart.len(), "start state must exist");
        Chart { prechart, start }
    }

    pub fn prechart(&self) -> &Prechart {
        &self.prechart
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn into_parts(self) -> (Prechart, StateId) {
        (self.prechart, self.start)
    }

    /// `({s}, s, {}, {})`.
    pub fn empty() -> Self {
        let mut p = Prechart::new();
        let s = p.add_state("q0");
        Chart::new(p, s)
    }

    /// A single state outputting `v`.
    pub fn variable(v: Var) -> Self {
        let mut p = Prechart::new();
        let s = p.add_state("q0");
        p.add_out(s, v);
        Chart::new(p, s)
    }

    /// A fresh start state with one `a`-transition into `c`'s start.
    pub fn prefix(a: Letter, c: &Chart) -> Self {
        let mut p = Prechart::new();
        let s = p.add_state("q0");
        let off = p.absorb(&c.prechart);
        p.add_trans(s, a, c.start + off);
        Chart::new(p, s)
    }

    /// A fresh start state with the moves of both operands' start states.
    pub fn sum(c1: &Chart, c2: &Chart) -> Self {
        let mut p = Prechart::new();
        let s = p.add_state("q0");
        let o1 = p.absorb(&c1.prechart);
        let o2 = p.absorb(&c2.prechart);
        let moves: Vec<Move> = c1
            .prechart
            .beta(c1.start)
            .iter()
            .map(|m| shift_move(*m, o1))
            .chain(c2.prechart.beta(c2.start).iter().map(|m| shift_move(*m, o2)))
            .collect();
        for m in moves {
            p.add_move(s, m);
        }
        Chart::new(p, s)
    }

    /// Plugs chart `args[i]` into every output of `vars[i]`.
    pub fn subst(c: &Chart, args: &[Chart], vars: &[Var]) -> Self {
        assert_eq!(args.len(), vars.len(), "one chart per substituted variable");
        let mut p = c.prechart.clone();
        let offsets: Vec<usize> = args.iter().map(|a| p.absorb(&a.prechart)).collect();
        for q in c.prechart.states() {
            let hit: Vec<usize> = c
                .prechart
                .outputs(q)
                .filter_map(|v| vars.iter().position(|w| *w == v))
                .collect();
            for &i in &hit {
                p.beta[q].remove(&Move::Out(vars[i]));
            }
            for i in hit {
                let extra: Vec<Move> = args[i]
                    .prechart
                    .beta(args[i].start)
                    .iter()
                    .map(|m| shift_move(*m, offsets[i]))
                    .collect();
                for m in extra {
                    p.add_move(q, m);
                }
            }
        }
        Chart::new(p, c.start)
    }

    /// Redirects every output of `v` back to the start state.
    pub fn rec(v: Var, c: &Chart) -> Self {
        let mut p = c.prechart.clone();
        let start_moves = c.prechart.beta(c.start).clone();
        for q in c.prechart.states() {
            if c.prechart.beta(q).contains(&Move::Out(v)) {
                for m in &start_moves {
                    p.add_move(q, *m);
                }
                p.beta[q].remove(&Move::Out(v));
            }
        }
        Chart::new(p, c.start)
    }

    /// Restriction to the states reachable from the start.
    pub fn reachable(&self) -> Chart {
        let keep = self.prechart.reachable_from(&[self.start]);
        let (p, map) = self.prechart.restrict(&keep);
        Chart::new(p, map[self.start].expect("start is reachable"))
    }

    /// Variables output by some state reachable from the start.
    pub fn live_vars(&self) -> BTreeSet<Var> {
        self.prechart
            .reachable_from(&[self.start])
            .into_iter()
            .flat_map(|q| self.prechart.outputs(q).collect::<Vec<_>>())
            .collect()
    }

    pub fn to_dot(&self) -> String {
        self.prechart.to_dot(Some(self.start))
    }

    /// The line-based text format read by [`parse_chart`].
    pub fn to_text(&self) -> String {
        text::print_chart(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Var {
        Var::new(i)
    }

    #[test]
    fn empty_and_variable() {
        let e = Chart::empty();
        assert_eq!(e.prechart().len(), 1);
        assert!(e.prechart().beta(e.start()).is_empty());
        assert_eq!(Chart::variable(v(1)).live_vars(), BTreeSet::from([v(1)]));
        assert!(e.live_vars().is_empty());
    }

    #[test]
    fn sum_of_variable_and_empty() {
        let c = Chart::sum(&Chart::variable(v(1)), &Chart::empty());
        assert_eq!(
            c.prechart().beta(c.start()),
            &BTreeSet::from([Move::Out(v(1))])
        );
    }

    #[test]
    fn rec_closes_the_loop() {
        let c = Chart::rec(v(1), &Chart::prefix('a', &Chart::variable(v(1))));
        let s = c.start();
        // start: a -> q1; q1 gained start's a-move and lost v1
        let t = match c.prechart().beta(s).iter().next() {
            Some(Move::Act('a', t)) => *t,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(
            c.prechart().beta(t),
            &BTreeSet::from([Move::Act('a', t)])
        );
        assert!(c.live_vars().is_empty());
    }

    #[test]
    fn subst_plugs_into_outputs() {
        let base = Chart::prefix('a', &Chart::variable(v(1)));
        let arg = Chart::prefix('b', &Chart::empty());
        let c = Chart::subst(&base, &[arg], &[v(1)]);
        assert!(c.live_vars().is_empty());
        assert_eq!(c.reachable().prechart().len(), 3);
    }

    #[test]
    fn reachable_drops_unreachable_states() {
        let c = Chart::sum(&Chart::prefix('a', &Chart::empty()), &Chart::variable(v(2)));
        // the operands' own start states are now unreachable
        let r = c.reachable();
        assert_eq!(r.prechart().len(), 2);
        assert_eq!(r.live_vars(), BTreeSet::from([v(2)]));
        assert_eq!(r.reachable(), r);
        assert_eq!(live_oracle(&c), c.live_vars());
    }

    #[test]
    fn live_vars_through_prefix() {
        let c = Chart::prefix('a', &Chart::variable(v(2)));
        assert_eq!(c.live_vars(), BTreeSet::from([v(2)]));
    }

    // Depth-first search written independently of `reachable_from`.
    fn live_oracle(c: &Chart) -> BTreeSet<Var> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![c.start()];
        let mut out = BTreeSet::new();
        while let Some(q) = stack.pop() {
            if !seen.insert(q) {
                continue;
            }
            for m in c.prechart().beta(q) {
                match m {
                    Move::Act(_, t) => stack.push(*t),
                    Move::Out(w) => {
                        out.insert(*w);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn dot_mentions_every_move() {
        let c = Chart::prefix('a', &Chart::variable(v(1)));
        let dot = c.to_dot();
        assert!(dot.contains("q0 -> q1 [label=\"a\"]"));
        assert!(dot.contains("label=\"v1\""));
    }
}
