use std::collections::BTreeSet;

use super::{Expr, Var};

/// Simultaneous capture-avoiding substitution `e[e1/v1, ..., ek/vk]`.
///
/// A binder is renamed only when it clashes with a substituted variable or
/// with a free variable of a substituted expression. The fresh name is the
/// smallest index that is none of the substituted variables, not free in
/// any substituted expression and not free in the binder's body.
pub fn substitute(e: &Expr, bindings: &[(Var, Expr)]) -> Expr {
    debug_assert!(
        {
            let vs: BTreeSet<_> = bindings.iter().map(|(v, _)| *v).collect();
            vs.len() == bindings.len()
        },
        "substituted variables must be distinct"
    );
    if bindings.is_empty() {
        return e.clone();
    }
    let mut avoid: BTreeSet<Var> = bindings.iter().map(|(v, _)| *v).collect();
    for (_, b) in bindings {
        avoid.extend(b.free_vars());
    }
    go(e, bindings, &avoid)
}

fn go(e: &Expr, bindings: &[(Var, Expr)], avoid: &BTreeSet<Var>) -> Expr {
    match e {
        Expr::Zero => Expr::Zero,
        Expr::Var(v) => match bindings.iter().find(|(w, _)| w == v) {
            Some((_, r)) => r.clone(),
            None => e.clone(),
        },
        Expr::Prefix(a, b) => Expr::prefix(*a, go(b, bindings, avoid)),
        Expr::Sum(l, r) => Expr::sum(go(l, bindings, avoid), go(r, bindings, avoid)),
        Expr::Mu(w, b) => {
            if !avoid.contains(w) {
                return Expr::mu(*w, go(b, bindings, avoid));
            }
            let body_fv = b.free_vars();
            let z = (1..)
                .map(Var::new)
                .find(|z| !avoid.contains(z) && !body_fv.contains(z))
                .expect("unbounded index range");
            let renamed = substitute(b, &[(*w, Expr::Var(z))]);
            Expr::mu(z, go(&renamed, bindings, avoid))
        }
    }
}
