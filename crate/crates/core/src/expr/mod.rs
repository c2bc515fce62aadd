//! Milner's algebra of regular behaviours: expressions built from `0`,
//! variables, prefixing, choice and `mu`-recursion.

mod parse;
mod semantics;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse, parse_with_alphabet, ParseError, ParseErrorKind};
pub use semantics::{expand, expand_all, step, BudgetExceeded, Expansion, StepResult};
pub use subst::substitute;

/// Action letters are single lowercase ASCII characters.
pub type Letter = char;

/// An output variable `v_i`, `i >= 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(u32);

impl Var {
    /// Panics on index 0; variables are numbered from 1.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// The variable `v_{i + offset}`.
    pub fn shifted(self, offset: u32) -> Self {
        Var(self.0 + offset)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A declared finite alphabet.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Alphabet(BTreeSet<Letter>);

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        Alphabet(letters.into_iter().collect())
    }

    /// Whether `c` may be used as a letter at all (lowercase ASCII, not `v`).
    pub fn is_letter_char(c: char) -> bool {
        c.is_ascii_lowercase() && c != 'v'
    }

    pub fn contains(&self, a: Letter) -> bool {
        self.0.contains(&a)
    }

    pub fn insert(&mut self, a: Letter) {
        self.0.insert(a);
    }

    pub fn extend(&mut self, other: &Alphabet) {
        self.0.extend(other.0.iter().copied());
    }

    pub fn iter(&self) -> impl Iterator<Item = Letter> + '_ {
        self.0.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

/// Expression AST. Subterms are shared, so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Expr {
    Zero,
    Var(Var),
    Prefix(Letter, Arc<Expr>),
    Sum(Arc<Expr>, Arc<Expr>),
    Mu(Var, Arc<Expr>),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Zero
    }

    pub fn var(index: u32) -> Self {
        Expr::Var(Var::new(index))
    }

    pub fn prefix(a: Letter, body: Expr) -> Self {
        Expr::Prefix(a, Arc::new(body))
    }

    pub fn sum(left: Expr, right: Expr) -> Self {
        Expr::Sum(Arc::new(left), Arc::new(right))
    }

    pub fn mu(binder: Var, body: Expr) -> Self {
        Expr::Mu(binder, Arc::new(body))
    }

    /// Sum of all `terms`, `0` when empty.
    pub fn sum_all(terms: impl IntoIterator<Item = Expr>) -> Self {
        terms
            .into_iter()
            .reduce(Expr::sum)
            .unwrap_or(Expr::Zero)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_free(&self, v: Var) -> bool {
        fn go(e: &Expr, v: Var) -> bool {
            match e {
                Expr::Zero => false,
                Expr::Var(w) => *w == v,
                Expr::Prefix(_, b) => go(b, v),
                Expr::Sum(l, r) => go(l, v) || go(r, v),
                Expr::Mu(w, b) => *w != v && go(b, v),
            }
        }
        go(self, v)
    }

    /// All letters occurring in the expression.
    pub fn letters(&self) -> Alphabet {
        fn go(e: &Expr, out: &mut Alphabet) {
            match e {
                Expr::Zero | Expr::Var(_) => {}
                Expr::Prefix(a, b) => {
                    out.insert(*a);
                    go(b, out);
                }
                Expr::Sum(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Expr::Mu(_, b) => go(b, out),
            }
        }
        let mut out = Alphabet::default();
        go(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Zero | Expr::Var(_) => 1,
            Expr::Prefix(_, b) | Expr::Mu(_, b) => 1 + b.size(),
            Expr::Sum(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Canonical representative of the alpha-equivalence class.
    ///
    /// A binder at nesting depth `d` (outermost is 1) is renamed to
    /// `v_{m + d}`, where `m` is the largest free variable index. Binders on
    /// one root-to-leaf path get distinct names above every free variable, so
    /// no capture can occur.
    pub fn alpha_normal(&self) -> Expr {
        let base = self.free_vars().iter().next_back().map_or(0, |v| v.0);
        let mut env = Vec::new();
        normalize(self, base, 0, &mut env)
    }

    pub fn alpha_eq(&self, other: &Expr) -> bool {
        self.alpha_normal() == other.alpha_normal()
    }

    /// A bisimilar, usually smaller expression: sums are flattened with `0`
    /// and repeated summands dropped, vacuous binders removed, and a binder
    /// occurring unguarded at the top of its own body loses that summand.
    pub fn tidy(&self) -> Expr {
        fn summands(e: &Expr, out: &mut Vec<Expr>) {
            match e {
                Expr::Zero => {}
                Expr::Sum(l, r) => {
                    summands(l, out);
                    summands(r, out);
                }
                other => {
                    if !out.contains(other) {
                        out.push(other.clone());
                    }
                }
            }
        }
        match self {
            Expr::Zero | Expr::Var(_) => self.clone(),
            Expr::Prefix(a, b) => Expr::prefix(*a, b.tidy()),
            Expr::Sum(l, r) => {
                let mut parts = Vec::new();
                summands(&l.tidy(), &mut parts);
                summands(&r.tidy(), &mut parts);
                Expr::sum_all(parts)
            }
            Expr::Mu(v, b) => {
                let mut parts = Vec::new();
                summands(&b.tidy(), &mut parts);
                parts.retain(|p| *p != Expr::Var(*v));
                let body = Expr::sum_all(parts);
                if body.is_free(*v) {
                    Expr::mu(*v, body)
                } else {
                    body
                }
            }
        }
    }
}

fn collect_free(e: &Expr, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match e {
        Expr::Zero => {}
        Expr::Var(v) => {
            if !bound.contains(v) {
                out.insert(*v);
            }
        }
        Expr::Prefix(_, b) => collect_free(b, bound, out),
        Expr::Sum(l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Expr::Mu(v, b) => {
            bound.push(*v);
            collect_free(b, bound, out);
            bound.pop();
        }
    }
}

fn normalize(e: &Expr, base: u32, depth: u32, env: &mut Vec<(Var, Var)>) -> Expr {
    match e {
        Expr::Zero => Expr::Zero,
        Expr::Var(v) => match env.iter().rev().find(|(old, _)| old == v) {
            Some((_, new)) => Expr::Var(*new),
            None => Expr::Var(*v),
        },
        Expr::Prefix(a, b) => Expr::prefix(*a, normalize(b, base, depth, env)),
        Expr::Sum(l, r) => Expr::sum(
            normalize(l, base, depth, env),
            normalize(r, base, depth, env),
        ),
        Expr::Mu(v, b) => {
            let fresh = Var(base + depth + 1);
            env.push((*v, fresh));
            let body = normalize(b, base, depth + 1, env);
            env.pop();
            Expr::mu(fresh, body)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, true, f)
    }
}

// `tail` is true when nothing follows the term inside its enclosing group;
// a `mu` outside tail position must be parenthesised since its body would
// otherwise swallow the rest of the sum.
fn write_expr(e: &Expr, tail: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Zero => write!(f, "0"),
        Expr::Var(v) => write!(f, "{v}"),
        Expr::Prefix(a, b) => {
            write!(f, "{a}.")?;
            if matches!(**b, Expr::Sum(..)) {
                write!(f, "(")?;
                write_expr(b, true, f)?;
                write!(f, ")")
            } else {
                write_expr(b, tail, f)
            }
        }
        Expr::Sum(l, r) => {
            write_expr(l, false, f)?;
            write!(f, " + ")?;
            if matches!(**r, Expr::Sum(..)) {
                write!(f, "(")?;
                write_expr(r, true, f)?;
                write!(f, ")")
            } else {
                write_expr(r, tail, f)
            }
        }
        Expr::Mu(v, b) => {
            if tail {
                write!(f, "mu {v}.")?;
                write_expr(b, true, f)
            } else {
                write!(f, "(mu {v}.")?;
                write_expr(b, true, f)?;
                write!(f, ")")
            }
        }
    }
}
