//! Behavioural distance: the lifted operator, its least fixpoint by Kleene
//! iteration, and the closed form via stratified bisimilarity.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bisim::{quotient, stratified_level, Level};
use crate::chart::{Chart, Move, Prechart, StateId};
use crate::expr::{expand_all, BudgetExceeded, Expr};

/// An exact rational in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Dist(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("not a rational number: {0:?}")]
    Syntax(String),
    #[error("distance {0} is outside [0, 1]")]
    OutOfRange(String),
}

impl Dist {
    pub fn zero() -> Self {
        Dist(BigRational::zero())
    }

    pub fn one() -> Self {
        Dist(BigRational::one())
    }

    pub fn new(r: BigRational) -> Result<Self, DistError> {
        if r.is_negative() || r > BigRational::one() {
            return Err(DistError::OutOfRange(r.to_string()));
        }
        Ok(Dist(r))
    }

    pub fn ratio(n: i64, d: i64) -> Result<Self, DistError> {
        Dist::new(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `2^-k`.
    pub fn pow2_neg(k: usize) -> Self {
        Dist(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    pub fn half(&self) -> Self {
        Dist(&self.0 / BigInt::from(2))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `k` when the value is exactly `2^-k`.
    pub fn dyadic_exponent(&self) -> Option<usize> {
        if !self.0.numer().is_one() {
            return None;
        }
        let d = self.0.denom();
        let bits = d.bits();
        (d == &(BigInt::one() << (bits - 1))).then_some((bits - 1) as usize)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Sum, which may exceed 1; kept as a plain rational.
    pub fn add_unbounded(&self, other: &BigRational) -> BigRational {
        &self.0 + other
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Dist {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DistError::Syntax(s.to_string());
        let t = s.trim();
        let r = match t.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(t.parse().map_err(|_| bad())?),
        };
        Dist::new(r)
    }
}

/// Symmetric state-by-state table of distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistTable {
    n: usize,
    cells: Vec<Dist>,
}

impl DistTable {
    /// The discrete pseudometric: 0 on the diagonal, 1 elsewhere.
    pub fn top(n: usize) -> Self {
        let mut t = DistTable {
            n,
            cells: vec![Dist::one(); n * n],
        };
        for i in 0..n {
            t.cells[i * n + i] = Dist::zero();
        }
        t
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, x: StateId, y: StateId) -> &Dist {
        &self.cells[x * self.n + y]
    }

    pub fn set(&mut self, x: StateId, y: StateId, d: Dist) {
        self.cells[y * self.n + x] = d.clone();
        self.cells[x * self.n + y] = d;
    }

    /// `d(x, y) = self(map[x], map[y])`.
    pub fn pull_back(&self, map: &[StateId]) -> DistTable {
        let n = map.len();
        let mut t = DistTable::top(n);
        for x in 0..n {
            for y in x..n {
                t.set(x, y, self.get(map[x], map[y]).clone());
            }
        }
        t
    }

    /// Pointwise `self <= other`.
    pub fn below(&self, other: &DistTable) -> bool {
        self.n == other.n && self.cells.iter().zip(&other.cells).all(|(a, b)| a <= b)
    }

    pub fn is_pseudometric(&self) -> bool {
        let n = self.n;
        for x in 0..n {
            if !self.get(x, x).is_zero() {
                return false;
            }
            for y in 0..n {
                if self.get(x, y) != self.get(y, x) {
                    return false;
                }
                for z in 0..n {
                    let via = self.get(x, z).add_unbounded(self.get(z, y).as_rational());
                    if self.get(x, y).as_rational() > &via {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Tab-separated dump with state labels as headers.
    pub fn to_tsv(&self, labels: &[String]) -> String {
        let mut s = String::new();
        for l in labels {
            s.push('\t');
            s.push_str(l);
        }
        s.push('\n');
        for (x, l) in labels.iter().enumerate().take(self.n) {
            s.push_str(l);
            for y in 0..self.n {
                s.push('\t');
                s.push_str(&self.get(x, y).to_string());
            }
            s.push('\n');
        }
        s
    }
}

/// Distance between two moves given a distance on states.
pub fn lift_edge(d: &DistTable, u: &Move, w: &Move) -> Dist {
    match (u, w) {
        (Move::Act(a, x), Move::Act(b, y)) if a == b => d.get(*x, *y).half(),
        _ if u == w => Dist::zero(),
        _ => Dist::one(),
    }
}

/// Hausdorff distance between finite sets: the larger of the two directed
/// sup-inf values, with `sup {} = 0` and `inf {} = 1`.
pub fn hausdorff<T>(a: &[T], b: &[T], d: impl Fn(&T, &T) -> Dist) -> Dist {
    let directed = |xs: &[T], ys: &[T], flip: bool| {
        xs.iter()
            .map(|x| {
                ys.iter()
                    .map(|y| if flip { d(y, x) } else { d(x, y) })
                    .min()
                    .unwrap_or_else(Dist::one)
            })
            .max()
            .unwrap_or_else(Dist::zero)
    };
    directed(a, b, false).max(directed(b, a, true))
}

pub fn phi(p: &Prechart, d: &DistTable) -> DistTable {
    let n = p.len();
    let moves: Vec<Vec<Move>> = p.states().map(|q| p.beta(q).iter().copied().collect()).collect();
    let mut out = DistTable::top(n);
    for x in 0..n {
        for y in x..n {
            let h = hausdorff(&moves[x], &moves[y], |u, w| lift_edge(d, u, w));
            out.set(x, y, h);
        }
    }
    out
}

/// `top, phi(top), phi(phi(top)), ...`, the first `count` of them.
pub fn phi_iterates(p: &Prechart, count: usize) -> Vec<DistTable> {
    let mut out: Vec<DistTable> = Vec::with_capacity(count);
    let mut cur = DistTable::top(p.len());
    for _ in 0..count {
        let next = phi(p, &cur);
        out.push(std::mem::replace(&mut cur, next));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("fixpoint iteration did not stabilise within {0} steps")]
    IterationCap(usize),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

#[derive(Clone, Debug)]
pub struct Kleene {
    pub table: DistTable,
    /// Applications of the operator on the quotient until it stabilised.
    pub iterations: usize,
    pub quotient_size: usize,
}

/// The least fixpoint of [`phi`], iterating from the top table on the
/// bisimilarity quotient and pulling the result back.
pub fn bd_kleene(p: &Prechart) -> Result<Kleene, MetricError> {
    let (q, map) = quotient(p);
    let cap = q.len() * q.len() + 1;
    let mut cur = DistTable::top(q.len());
    for i in 1..=cap {
        let next = phi(&q, &cur);
        if next == cur {
            return Ok(Kleene {
                table: cur.pull_back(&map),
                iterations: i,
                quotient_size: q.len(),
            });
        }
        cur = next;
    }
    Err(MetricError::IterationCap(cap))
}

/// `0` when bisimilar, else `2^-n` for the stratified level `n`.
pub fn bd_stratified(c1: &Chart, c2: &Chart) -> Dist {
    match stratified_level(c1, c2) {
        Level::Infinite => Dist::zero(),
        Level::Finite(n) => Dist::pow2_neg(n),
    }
}

/// Distance between the start states of two charts.
pub fn chart_distance(c1: &Chart, c2: &Chart) -> Result<Dist, MetricError> {
    let (p, off) = Prechart::disjoint_union(c1.prechart(), c2.prechart());
    let k = bd_kleene(&p)?;
    Ok(k.table.get(c1.start(), c2.start() + off).clone())
}

/// Distances between paired expressions, computed on one shared expansion.
pub fn expr_distances(pairs: &[(Expr, Expr)], max_states: usize) -> Result<Vec<Dist>, MetricError> {
    let roots: Vec<Expr> = pairs
        .iter()
        .flat_map(|(e, f)| [e.clone(), f.clone()])
        .collect();
    let ex = expand_all(&roots, max_states)?;
    let k = bd_kleene(&ex.prechart)?;
    Ok((0..pairs.len())
        .map(|i| k.table.get(ex.roots[2 * i], ex.roots[2 * i + 1]).clone())
        .collect())
}

pub fn expr_distance(e: &Expr, f: &Expr, max_states: usize) -> Result<Dist, MetricError> {
    Ok(expr_distances(&[(e.clone(), f.clone())], max_states)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{expand, parse, Var};

    fn d(a: &str, b: &str) -> Dist {
        expr_distance(&parse(a).unwrap(), &parse(b).unwrap(), 1000).unwrap()
    }

    fn r(n: i64, m: i64) -> Dist {
        Dist::ratio(n, m).unwrap()
    }

    #[test]
    fn dist_text() {
        assert_eq!(r(2, 8).to_string(), "1/4");
        assert_eq!(Dist::zero().to_string(), "0");
        assert_eq!(Dist::one().to_string(), "1");
        assert_eq!("3/12".parse::<Dist>().unwrap(), r(1, 4));
        assert!("5/4".parse::<Dist>().is_err());
        assert!("x".parse::<Dist>().is_err());
        assert_eq!(r(1, 8).dyadic_exponent(), Some(3));
        assert_eq!(Dist::one().dyadic_exponent(), Some(0));
        assert_eq!(r(3, 8).dyadic_exponent(), None);
    }

    #[test]
    fn lifting_and_hausdorff() {
        let top = DistTable::top(2);
        assert_eq!(lift_edge(&top, &Move::Act('a', 0), &Move::Act('a', 1)), r(1, 2));
        let v1 = Move::Out(Var::new(1));
        assert_eq!(lift_edge(&top, &v1, &v1), Dist::zero());
        assert_eq!(lift_edge(&top, &Move::Act('a', 0), &Move::Act('b', 1)), Dist::one());

        let lift = |u: &Move, w: &Move| lift_edge(&top, u, w);
        let empty: [Move; 0] = [];
        assert_eq!(hausdorff(&empty, &empty, lift), Dist::zero());
        assert_eq!(hausdorff(&empty, &[v1], lift), Dist::one());
        assert_eq!(
            hausdorff(&[Move::Act('a', 0)], &[Move::Act('a', 1)], lift),
            r(1, 2)
        );
        assert_eq!(
            hausdorff(&[Move::Act('a', 0), Move::Act('b', 0)], &[Move::Act('a', 0)], lift),
            Dist::one()
        );
    }

    #[test]
    fn phi_on_top() {
        let ex = expand_all(&[parse("0").unwrap(), parse("a.0").unwrap()], 10).unwrap();
        let t = phi(&ex.prechart, &DistTable::top(ex.prechart.len()));
        assert_eq!(t.get(ex.roots[0], ex.roots[1]), &Dist::one());

        let ex = expand_all(&[parse("a.0").unwrap(), parse("a.(0 + 0)").unwrap()], 10).unwrap();
        let t = phi(&ex.prechart, &DistTable::top(ex.prechart.len()));
        assert_eq!(t.get(ex.roots[0], ex.roots[1]), &r(1, 2));
    }

    #[test]
    fn fixpoint_examples() {
        assert_eq!(d("a.a.0", "a.0"), r(1, 2));
        assert_eq!(
            d("a.(a.0 + b.mu v1.a.v1)+b.mu v1.a.v1", "mu v2.(a.v2 + b.mu v1.a.a.v1)"),
            r(1, 4)
        );
        assert_eq!(d("mu v1.a.v1", "mu v1.a.a.v1"), Dist::zero());
        assert_eq!(d("a.v1", "a.v2"), r(1, 2));
        assert_eq!(d("0", "a.0"), Dist::one());
    }

    #[test]
    fn kleene_result_is_a_fixpoint() {
        let e = parse("a.(a.0 + b.mu v1.a.v1)+b.mu v1.a.v1 + mu v2.(a.v2 + b.mu v1.a.a.v1)")
            .unwrap();
        let c = expand(&e, 100).unwrap();
        let k = bd_kleene(c.prechart()).unwrap();
        assert_eq!(phi(c.prechart(), &k.table), k.table);
        assert!(k.table.is_pseudometric());
    }

    #[test]
    fn stratified_closed_form() {
        let c = |s: &str| expand(&parse(s).unwrap(), 100).unwrap();
        assert_eq!(bd_stratified(&c("mu v1.a.v1"), &c("mu v1.a.a.v1")), Dist::zero());
        assert_eq!(bd_stratified(&c("a.v1"), &c("a.v2")), r(1, 2));
        assert_eq!(bd_stratified(&c("0"), &c("a.0")), Dist::one());
    }
}
