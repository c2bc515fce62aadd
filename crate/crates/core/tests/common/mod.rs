//! Seeded generators and a naive distance oracle shared by the suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use chartdist::chart::{Chart, Prechart, StateId};
use chartdist::diagram::{DiagTerm, Wire, WireWord};
use chartdist::expr::{Alphabet, Expr, Var};
use chartdist::metric::Dist;
use chartdist::regbeh::RbMorphism;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CAP: usize = 10_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A chart with at most `max_states` states over `a`, `b` and `v1`, `v2`.
pub fn random_chart(r: &mut impl Rng, max_states: usize) -> Chart {
    let n = r.gen_range(1..=max_states);
    let mut p = Prechart::with_alphabet(Alphabet::new(['a', 'b']));
    for i in 0..n {
        p.add_state(format!("s{i}"));
    }
    let density = r.gen_range(0.1..0.45);
    for q in 0..n {
        for a in ['a', 'b'] {
            for t in 0..n {
                if r.gen_bool(density) {
                    p.add_trans(q, a, t);
                }
            }
        }
        for v in 1..=2 {
            if r.gen_bool(0.2) {
                p.add_out(q, Var::new(v));
            }
        }
    }
    let start = r.gen_range(0..n);
    Chart::new(p, start)
}

/// A copy of `c` with one move added or removed.
pub fn perturb_chart(r: &mut impl Rng, c: &Chart) -> Chart {
    let (mut p, start) = c.clone().into_parts();
    let q = r.gen_range(0..p.len());
    let moves: Vec<_> = p.beta(q).iter().copied().collect();
    if !moves.is_empty() && r.gen_bool(0.5) {
        // rebuild without one move
        let drop = *moves.choose(r).unwrap();
        let mut fresh = Prechart::with_alphabet(p.alphabet().clone());
        for s in p.states() {
            fresh.add_state(p.label(s).to_string());
        }
        for s in p.states() {
            for m in p.beta(s) {
                if !(s == q && *m == drop) {
                    fresh.add_move(s, *m);
                }
            }
        }
        p = fresh;
    } else {
        let t = r.gen_range(0..p.len());
        p.add_trans(q, if r.gen_bool(0.5) { 'a' } else { 'b' }, t);
    }
    Chart::new(p, start)
}

/// A random expression whose free variables lie in `free`.
pub fn random_expr(r: &mut impl Rng, depth: u32, free: &[u32]) -> Expr {
    let leaf = depth == 0 || r.gen_bool(0.25);
    if leaf {
        if !free.is_empty() && r.gen_bool(0.6) {
            return Expr::var(*free.choose(r).unwrap());
        }
        return Expr::zero();
    }
    match r.gen_range(0..10) {
        0..=3 => Expr::prefix(
            if r.gen_bool(0.6) { 'a' } else { 'b' },
            random_expr(r, depth - 1, free),
        ),
        4..=6 => Expr::sum(random_expr(r, depth - 1, free), random_expr(r, depth - 1, free)),
        _ => {
            let binder = r.gen_range(1..=4);
            let mut inner: Vec<u32> = free.to_vec();
            if !inner.contains(&binder) {
                inner.push(binder);
            }
            Expr::mu(Var::new(binder), random_expr(r, depth - 1, &inner))
        }
    }
}

/// Swaps the letter of one random prefix.
pub fn flip_letter(r: &mut impl Rng, e: &Expr) -> Expr {
    let mut spots = 0;
    fn count(e: &Expr, n: &mut usize) {
        match e {
            Expr::Prefix(_, b) => {
                *n += 1;
                count(b, n)
            }
            Expr::Sum(a, b) => {
                count(a, n);
                count(b, n)
            }
            Expr::Mu(_, b) => count(b, n),
            _ => {}
        }
    }
    fn go(e: &Expr, target: usize, n: &mut usize) -> Expr {
        match e {
            Expr::Prefix(a, b) => {
                let here = *n;
                *n += 1;
                let a = if here == target { if *a == 'a' { 'b' } else { 'a' } } else { *a };
                Expr::prefix(a, go(b, target, n))
            }
            Expr::Sum(a, b) => {
                let a = go(a, target, n);
                Expr::sum(a, go(b, target, n))
            }
            Expr::Mu(v, b) => Expr::mu(*v, go(b, target, n)),
            other => other.clone(),
        }
    }
    count(e, &mut spots);
    if spots == 0 {
        return e.clone();
    }
    go(e, r.gen_range(0..spots), &mut 0)
}

pub fn closed_expr(r: &mut impl Rng, depth: u32) -> Expr {
    random_expr(r, depth, &[])
}

/// A random `dom -> cod` morphism with small rows.
pub fn random_rb(r: &mut impl Rng, dom: usize, cod: usize) -> RbMorphism {
    let vars: Vec<u32> = (1..=cod as u32).collect();
    let rows = (0..dom).map(|_| random_expr(r, 3, &vars)).collect();
    RbMorphism::new(cod, rows).expect("rows use v1..cod")
}

fn rs(n: usize) -> DiagTerm {
    DiagTerm::Id(WireWord::rs(n))
}

/// `n -> 1` by merges, `gen` when `n = 0`.
pub fn merge_n(n: usize) -> DiagTerm {
    match n {
        0 => DiagTerm::Gen,
        1 => rs(1),
        _ => DiagTerm::seq(DiagTerm::tensor(merge_n(n - 1), rs(1)), DiagTerm::Merge),
    }
}

/// `1 -> n` by copies, `del` when `n = 0`.
pub fn copy_n(n: usize) -> DiagTerm {
    match n {
        0 => DiagTerm::Del,
        1 => rs(1),
        _ => DiagTerm::seq(DiagTerm::Copy, DiagTerm::tensor(copy_n(n - 1), rs(1))),
    }
}

/// Feeds the last output of `t: m+1 -> n+1` back into its last input.
pub fn feedback(t: DiagTerm, m: usize, n: usize) -> DiagTerm {
    let l = || DiagTerm::Id(WireWord(vec![Wire::L]));
    DiagTerm::seq_all([
        DiagTerm::tensor_all([rs(m), DiagTerm::Cup]),
        DiagTerm::tensor(t, l()),
        DiagTerm::tensor_all([
            rs(n),
            DiagTerm::Sym(WireWord(vec![Wire::R]), WireWord(vec![Wire::L])),
        ]),
        DiagTerm::tensor_all([rs(n), DiagTerm::Cap]),
    ])
}

fn letter(r: &mut impl Rng) -> char {
    if r.gen_bool(0.6) {
        'a'
    } else {
        'b'
    }
}

/// A random rightward term `m -> n` of depth at most `depth`.
pub fn random_diagram(r: &mut impl Rng, depth: u32, m: usize, n: usize) -> DiagTerm {
    if depth <= 1 || r.gen_bool(0.2) {
        let middle = match r.gen_range(0..3) {
            0 => rs(1),
            1 => DiagTerm::Act(letter(r)),
            _ => DiagTerm::seq(DiagTerm::Act(letter(r)), DiagTerm::Act(letter(r))),
        };
        return DiagTerm::seq_all([merge_n(m), middle, copy_n(n)]);
    }
    match r.gen_range(0..10) {
        0..=2 if m + n >= 2 => {
            // split both sides so that neither half is empty on both ends
            loop {
                let m1 = r.gen_range(0..=m);
                let n1 = r.gen_range(0..=n);
                if m1 + n1 > 0 && (m - m1) + (n - n1) > 0 {
                    return DiagTerm::tensor(
                        random_diagram(r, depth - 1, m1, n1),
                        random_diagram(r, depth - 1, m - m1, n - n1),
                    );
                }
            }
        }
        3..=6 => {
            let k = r.gen_range(1..=2);
            DiagTerm::seq(
                random_diagram(r, depth - 1, m, k),
                random_diagram(r, depth - 1, k, n),
            )
        }
        _ => feedback(random_diagram(r, depth - 1, m + 1, n + 1), m, n),
    }
}

/// Replaces one random `act` letter, or a random subterm by a fresh term of
/// the same type.
pub fn mutate_diagram(r: &mut impl Rng, t: &DiagTerm) -> DiagTerm {
    let size = t.size();
    let target = r.gen_range(0..size);
    let mut counter = 0;
    fn go(
        t: &DiagTerm,
        target: usize,
        counter: &mut usize,
        r: &mut impl Rng,
    ) -> DiagTerm {
        let here = *counter;
        *counter += 1;
        if here == target {
            if let DiagTerm::Act(a) = t {
                return DiagTerm::Act(if *a == 'a' { 'b' } else { 'a' });
            }
            if let Ok((d, c)) = t.typecheck() {
                if d.is_all_r() && c.is_all_r() && d.len() + c.len() > 0 {
                    return random_diagram(r, 2, d.len(), c.len());
                }
            }
        }
        match t {
            DiagTerm::Seq(a, b) => {
                let a = go(a, target, counter, r);
                DiagTerm::seq(a, go(b, target, counter, r))
            }
            DiagTerm::Tensor(a, b) => {
                let a = go(a, target, counter, r);
                DiagTerm::tensor(a, go(b, target, counter, r))
            }
            leaf => leaf.clone(),
        }
    }
    go(t, target, &mut counter, r)
}

/// A pair of terms of the same rightward type.
pub fn random_diagram_pair(r: &mut impl Rng) -> (DiagTerm, DiagTerm) {
    let m = r.gen_range(1..=2);
    let n = r.gen_range(0..=2);
    let f = random_diagram(r, 6, m, n);
    let g = if r.gen_bool(0.6) {
        mutate_diagram(r, &f)
    } else {
        random_diagram(r, 6, m, n)
    };
    (f, g)
}

/// Distance from the stratified relations, computed by direct recursion on
/// the definition: level 0 relates everything, level `k + 1` relates states
/// with equal outputs whose transitions answer each other at level `k`.
pub fn naive_bd(p: &Prechart, x: StateId, y: StateId) -> Dist {
    let n = p.len();
    let outs: Vec<BTreeSet<Var>> = p.states().map(|q| p.outputs(q).collect()).collect();
    let trans: Vec<Vec<(char, StateId)>> = p.states().map(|q| p.transitions(q).collect()).collect();
    let mut rel = vec![vec![true; n]; n];
    for level in 0..=n + 1 {
        if !rel[x][y] {
            return Dist::pow2_neg(level - 1);
        }
        let answered = |from: &[(char, StateId)], to: &[(char, StateId)], flip: bool| {
            from.iter().all(|&(a, s)| {
                to.iter().any(|&(b, t)| a == b && if flip { rel[t][s] } else { rel[s][t] })
            })
        };
        let mut next = vec![vec![false; n]; n];
        for s in 0..n {
            for t in 0..n {
                next[s][t] = rel[s][t]
                    && outs[s] == outs[t]
                    && answered(&trans[s], &trans[t], false)
                    && answered(&trans[t], &trans[s], true);
            }
        }
        rel = next;
    }
    Dist::zero()
}

/// [`naive_bd`] between the starts of two charts.
pub fn naive_chart_bd(c1: &Chart, c2: &Chart) -> Dist {
    let (p, off) = Prechart::disjoint_union(c1.prechart(), c2.prechart());
    naive_bd(&p, c1.start(), c2.start() + off)
}

/// [`naive_bd`] between two expressions.
pub fn naive_expr_bd(e: &Expr, f: &Expr) -> Dist {
    let c1 = chartdist::expr::expand(e, CAP).unwrap();
    let c2 = chartdist::expr::expand(f, CAP).unwrap();
    naive_chart_bd(&c1, &c2)
}

pub fn corpus() -> Vec<(String, String)> {
    include_str!("../../data/corpus.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (e, d) = l.split_once('|').expect("expression | diagram");
            (e.trim().to_string(), d.trim().to_string())
        })
        .collect()
}
