use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use super::{substitute, Expr, Letter, Var};
use crate::chart::{Chart, Prechart, StateId};

/// The one-step behaviour of an expression.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepResult {
    pub transitions: BTreeSet<(Letter, Expr)>,
    pub outputs: BTreeSet<Var>,
}

pub fn step(e: &Expr) -> StepResult {
    match e {
        Expr::Zero => StepResult::default(),
        Expr::Var(v) => StepResult {
            transitions: BTreeSet::new(),
            outputs: BTreeSet::from([*v]),
        },
        Expr::Prefix(a, b) => StepResult {
            transitions: BTreeSet::from([(*a, (**b).clone())]),
            outputs: BTreeSet::new(),
        },
        Expr::Sum(l, r) => {
            let mut s = step(l);
            let t = step(r);
            s.transitions.extend(t.transitions);
            s.outputs.extend(t.outputs);
            s
        }
        Expr::Mu(v, b) => {
            let inner = step(b);
            let binding = [(*v, e.clone())];
            StepResult {
                transitions: inner
                    .transitions
                    .into_iter()
                    .map(|(a, t)| (a, substitute(&t, &binding)))
                    .collect(),
                outputs: inner.outputs.into_iter().filter(|w| w != v).collect(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expansion exceeded the state budget of {limit}")]
pub struct BudgetExceeded {
    pub limit: usize,
}

/// A prechart whose states are alpha-normal expressions.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub prechart: Prechart,
    /// `states[q]` is the expression at state `q`.
    pub states: Vec<Expr>,
    /// Start state of each root, in input order.
    pub roots: Vec<StateId>,
}

impl Expansion {
    pub fn chart(&self, root: usize) -> Chart {
        Chart::new(self.prechart.clone(), self.roots[root])
    }
}

/// The reachable chart of `e`. State labels are the canonical expression
/// text.
pub fn expand(e: &Expr, max_states: usize) -> Result<Chart, BudgetExceeded> {
    let ex = expand_all(std::slice::from_ref(e), max_states)?;
    Ok(ex.chart(0))
}

/// One prechart containing every state reachable from any of `roots`.
pub fn expand_all(roots: &[Expr], max_states: usize) -> Result<Expansion, BudgetExceeded> {
    let mut prechart = Prechart::new();
    let mut states = Vec::new();
    let mut index: HashMap<Expr, StateId> = HashMap::new();
    let mut queue = VecDeque::new();

    let mut intern = |e: Expr,
                      prechart: &mut Prechart,
                      states: &mut Vec<Expr>,
                      queue: &mut VecDeque<StateId>|
     -> Result<StateId, BudgetExceeded> {
        let n = e.alpha_normal();
        if let Some(&q) = index.get(&n) {
            return Ok(q);
        }
        if states.len() >= max_states {
            return Err(BudgetExceeded { limit: max_states });
        }
        let q = prechart.add_state(n.to_string());
        index.insert(n.clone(), q);
        states.push(n);
        queue.push_back(q);
        Ok(q)
    };

    let mut root_ids = Vec::with_capacity(roots.len());
    for r in roots {
        root_ids.push(intern(r.clone(), &mut prechart, &mut states, &mut queue)?);
    }
    while let Some(q) = queue.pop_front() {
        let s = step(&states[q]);
        for v in s.outputs {
            prechart.add_out(q, v);
        }
        for (a, t) in s.transitions {
            let target = intern(t, &mut prechart, &mut states, &mut queue)?;
            prechart.add_trans(q, a, target);
        }
    }
    Ok(Expansion {
        prechart,
        states,
        roots: root_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn step_examples() {
        let s = step(&p("a.0 + b.v1"));
        assert_eq!(
            s.transitions,
            BTreeSet::from([('a', Expr::Zero), ('b', Expr::var(1))])
        );
        assert!(s.outputs.is_empty());

        let e = p("mu v1.(v1 + a.v1)");
        let s = step(&e);
        assert_eq!(s.transitions, BTreeSet::from([('a', e.clone())]));
        assert!(s.outputs.is_empty());

        assert_eq!(step(&p("mu v1.v1")), StepResult::default());
    }

    #[test]
    fn expand_examples() {
        let c = expand(&p("a.0"), 100).unwrap();
        assert_eq!(c.prechart().len(), 2);
        assert_eq!(c.prechart().transition_count(), 1);

        let c = expand(&p("mu v1.a.v1"), 100).unwrap();
        assert_eq!(c.prechart().len(), 1);
        assert_eq!(c.prechart().transition_count(), 1);

        let c = expand(&p("a.(a.0 + b.mu v1.a.v1)+b.mu v1.a.v1"), 100).unwrap();
        // L, a.0 + b.A, A = mu v1.a.v1, and 0
        assert_eq!(c.prechart().len(), 4);
    }

    #[test]
    fn budget_is_enforced() {
        let e = p("a.b.c.0");
        assert_eq!(expand(&e, 3).unwrap_err(), BudgetExceeded { limit: 3 });
        assert!(expand(&e, 4).is_ok());
    }
}
