use std::collections::HashMap;

use crate::chart::{Move, StateId};
use crate::diagram::DiagTerm;
use crate::expr::Expr;
use crate::metric::{bd_kleene, lift_edge, phi, Dist, DistTable, MetricError};

use super::{CertMove, Certificate, CouplingPair, DeriveError, Extraction, Node};

/// A certificate that `f` and `g` are within `eps`, or
/// [`DeriveError::BelowDistance`] when `eps` is below their distance.
pub fn synthesize(
    f: &DiagTerm,
    g: &DiagTerm,
    eps: &Dist,
    max_states: usize,
) -> Result<Certificate, DeriveError> {
    let ext = Extraction::from_diagrams(f, g, max_states)?;
    Ok(Certificate {
        lhs: Some(f.to_string()),
        rhs: Some(g.to_string()),
        bound: Some(eps.clone()),
        root: synthesize_extracted(&ext, eps)?,
    })
}

pub fn synthesize_exprs(
    e: &Expr,
    f: &Expr,
    eps: &Dist,
    max_states: usize,
) -> Result<Certificate, DeriveError> {
    let ext = Extraction::from_exprs(std::slice::from_ref(e), std::slice::from_ref(f), max_states)?;
    Ok(Certificate {
        lhs: Some(e.to_string()),
        rhs: Some(f.to_string()),
        bound: Some(eps.clone()),
        root: synthesize_extracted(&ext, eps)?,
    })
}

/// Each non-bisimilar input pair gets a tree of couplings whose depth is
/// the first approximant level at which the distance is reached. Every
/// coupling pairs each move with a nearest partner under the previous
/// approximant.
pub fn synthesize_extracted(ext: &Extraction, eps: &Dist) -> Result<Node, DeriveError> {
    let bd = bd_kleene(&ext.prechart)?.table;
    let pairs: Vec<(StateId, StateId)> = ext.left.iter().copied().zip(ext.right.iter().copied()).collect();
    let total = pairs
        .iter()
        .map(|&(x, y)| bd.get(x, y).clone())
        .max()
        .unwrap_or_else(Dist::zero);
    if eps < &total {
        return Err(DeriveError::BelowDistance { distance: total });
    }
    let root = if total.is_zero() {
        Node::Bisim
    } else {
        let mut s = Synth {
            ext,
            iters: vec![DistTable::top(ext.prechart.len())],
            memo: HashMap::new(),
        };
        let mut nodes = Vec::new();
        for &(x, y) in &pairs {
            if ext.bisimilar(x, y) {
                nodes.push(Node::Bisim);
                continue;
            }
            let level = s.level_reaching(x, y, bd.get(x, y))?;
            nodes.push(s.node(x, y, level).0);
        }
        if nodes.len() == 1 {
            nodes.pop().expect("one node")
        } else {
            Node::Decomp(nodes)
        }
    };
    Ok(if eps > &total {
        Node::Weaken(eps.clone(), Box::new(root))
    } else {
        root
    })
}

struct Synth<'a> {
    ext: &'a Extraction,
    /// `iters[k]` is the k-th approximant from the top table.
    iters: Vec<DistTable>,
    memo: HashMap<(StateId, StateId, usize), (Node, Dist)>,
}

impl Synth<'_> {
    fn level_reaching(&mut self, x: StateId, y: StateId, target: &Dist) -> Result<usize, DeriveError> {
        let n = self.ext.prechart.len();
        let cap = n * n + 2;
        let mut k = 0;
        loop {
            if k == self.iters.len() {
                if k > cap {
                    return Err(MetricError::IterationCap(cap).into());
                }
                let next = phi(&self.ext.prechart, &self.iters[k - 1]);
                self.iters.push(next);
            }
            if self.iters[k].get(x, y) == target {
                return Ok(k);
            }
            k += 1;
        }
    }

    fn cert_move(&self, m: &Move) -> CertMove {
        match *m {
            Move::Act(a, q) => CertMove::Act(a, self.ext.name(q).to_string()),
            Move::Out(v) => CertMove::Out(v),
        }
    }

    /// A node for `(x, y)` whose bound is at most the `k`-th approximant.
    fn node(&mut self, x: StateId, y: StateId, k: usize) -> (Node, Dist) {
        if self.ext.bisimilar(x, y) {
            return (Node::Bisim, Dist::zero());
        }
        if k == 0 || self.iters[k].get(x, y).is_one() {
            return (Node::Top, Dist::one());
        }
        if let Some(hit) = self.memo.get(&(x, y, k)) {
            return hit.clone();
        }
        let prechart = &self.ext.prechart;
        let a: Vec<Move> = prechart.beta(x).iter().copied().collect();
        let b: Vec<Move> = prechart.beta(y).iter().copied().collect();
        let prev = &self.iters[k - 1];
        let mut chosen: Vec<(Move, Move)> = Vec::new();
        for u in &a {
            let w = b
                .iter()
                .min_by_key(|w| lift_edge(prev, u, w))
                .expect("a state below distance 1 has moves");
            if !chosen.contains(&(*u, *w)) {
                chosen.push((*u, *w));
            }
        }
        for w in &b {
            let u = a
                .iter()
                .min_by_key(|u| lift_edge(prev, u, w))
                .expect("a state below distance 1 has moves");
            if !chosen.contains(&(*u, *w)) {
                chosen.push((*u, *w));
            }
        }
        let mut worst = Dist::zero();
        let mut pairs = Vec::new();
        for (u, w) in chosen {
            let (child, contribution) = match (u, w) {
                (Move::Act(c, u2), Move::Act(d, w2)) if c == d => {
                    let (n, bound) = self.node(u2, w2, k - 1);
                    (Some(n), bound.half())
                }
                _ if u == w => (None, Dist::zero()),
                _ => (None, Dist::one()),
            };
            worst = worst.max(contribution);
            pairs.push(CouplingPair {
                left: self.cert_move(&u),
                right: self.cert_move(&w),
                child,
            });
        }
        let out = (Node::Coupling(worst.clone(), pairs), worst);
        self.memo.insert((x, y, k), out.clone());
        out
    }
}
