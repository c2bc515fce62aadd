use crate::chart::{Move, StateId};
use crate::diagram::{parse_term, DiagTerm};
use crate::expr::{parse, Expr};
use crate::metric::Dist;

use super::{CertMove, Certificate, DeriveError, Extraction, Node};

/// Checks `cert` against two diagrams and returns the bound it proves.
pub fn check(
    cert: &Certificate,
    f: &DiagTerm,
    g: &DiagTerm,
    max_states: usize,
) -> Result<Dist, DeriveError> {
    for (text, term) in [(&cert.lhs, f), (&cert.rhs, g)] {
        if let Some(text) = text {
            if parse_term(text).ok().as_ref() != Some(term) {
                return Err(DeriveError::Metadata {
                    expected: term.to_string(),
                    found: text.clone(),
                });
            }
        }
    }
    check_extracted(cert, &Extraction::from_diagrams(f, g, max_states)?)
}

/// Checks `cert` against two expressions, read as one-input judgements.
pub fn check_exprs(
    cert: &Certificate,
    e: &Expr,
    f: &Expr,
    max_states: usize,
) -> Result<Dist, DeriveError> {
    for (text, expr) in [(&cert.lhs, e), (&cert.rhs, f)] {
        if let Some(text) = text {
            if !parse(text).is_ok_and(|p| p.alpha_eq(expr)) {
                return Err(DeriveError::Metadata {
                    expected: expr.to_string(),
                    found: text.clone(),
                });
            }
        }
    }
    let ext = Extraction::from_exprs(std::slice::from_ref(e), std::slice::from_ref(f), max_states)?;
    check_extracted(cert, &ext)
}

pub fn check_extracted(cert: &Certificate, ext: &Extraction) -> Result<Dist, DeriveError> {
    let proved = Checker { ext }.root(&cert.root, "root")?;
    if let Some(b) = &cert.bound {
        if &proved > b {
            return Err(DeriveError::BoundViolation {
                path: "header".into(),
                claimed: b.clone(),
                required: proved.to_string(),
            });
        }
    }
    Ok(proved)
}

struct Checker<'a> {
    ext: &'a Extraction,
}

fn at(path: &str, step: impl std::fmt::Display) -> String {
    format!("{path}/{step}")
}

fn require(path: &str, claimed: &Dist, required: &Dist) -> Result<(), DeriveError> {
    if claimed < required {
        return Err(DeriveError::BoundViolation {
            path: path.to_string(),
            claimed: claimed.clone(),
            required: required.to_string(),
        });
    }
    Ok(())
}

impl Checker<'_> {
    /// A node speaking about every input at once.
    fn root(&self, node: &Node, path: &str) -> Result<Dist, DeriveError> {
        let ext = self.ext;
        let m = ext.inputs();
        match node {
            Node::Top => Ok(Dist::one()),
            Node::Bisim => {
                for (i, (&x, &y)) in ext.left.iter().zip(&ext.right).enumerate() {
                    if !ext.bisimilar(x, y) {
                        return Err(DeriveError::NotBisimilar {
                            path: at(path, format!("input.{i}")),
                        });
                    }
                }
                Ok(Dist::zero())
            }
            Node::Weaken(e, c) => {
                let b = self.root(c, &at(path, "weaken"))?;
                require(path, e, &b)?;
                Ok(e.clone())
            }
            Node::Decomp(cs) => {
                if cs.len() != m {
                    return Err(DeriveError::DecompArity {
                        path: path.to_string(),
                        expected: m,
                        found: cs.len(),
                    });
                }
                let mut max = Dist::zero();
                for (i, c) in cs.iter().enumerate() {
                    let b = self.pair(c, ext.left[i], ext.right[i], &at(path, format!("decomp.{i}")))?;
                    max = max.max(b);
                }
                Ok(max)
            }
            _ if m == 1 => self.pair(node, ext.left[0], ext.right[0], path),
            Node::Triang(..) => Err(DeriveError::NeedsSingleInput {
                path: path.to_string(),
                node: "triang",
                inputs: m,
            }),
            Node::Coupling(..) => Err(DeriveError::NeedsSingleInput {
                path: path.to_string(),
                node: "coupling",
                inputs: m,
            }),
        }
    }

    fn state(&self, name: &str, path: &str) -> Result<StateId, DeriveError> {
        self.ext.state(name).ok_or_else(|| DeriveError::UnknownState {
            path: path.to_string(),
            name: name.to_string(),
        })
    }

    fn resolve(&self, m: &CertMove, path: &str) -> Result<Move, DeriveError> {
        Ok(match m {
            CertMove::Act(a, q) => Move::Act(*a, self.state(q, path)?),
            CertMove::Out(v) => Move::Out(*v),
        })
    }

    /// A node about the single pair `(x, y)`.
    fn pair(&self, node: &Node, x: StateId, y: StateId, path: &str) -> Result<Dist, DeriveError> {
        let ext = self.ext;
        match node {
            Node::Top => Ok(Dist::one()),
            Node::Bisim => {
                if ext.bisimilar(x, y) {
                    Ok(Dist::zero())
                } else {
                    Err(DeriveError::NotBisimilar {
                        path: path.to_string(),
                    })
                }
            }
            Node::Weaken(e, c) => {
                let b = self.pair(c, x, y, &at(path, "weaken"))?;
                require(path, e, &b)?;
                Ok(e.clone())
            }
            Node::Decomp(_) => Err(DeriveError::RootOnly {
                path: path.to_string(),
                node: "decomp",
            }),
            Node::Triang(cs, via) => {
                if cs.is_empty() {
                    return Err(DeriveError::Malformed {
                        path: path.to_string(),
                        detail: "triang without children".into(),
                    });
                }
                let chain: Vec<StateId> = if via.is_empty() {
                    Vec::new()
                } else {
                    if via.len() + 1 != cs.len() {
                        return Err(DeriveError::Malformed {
                            path: path.to_string(),
                            detail: format!(
                                "{} children need {} intermediate states, found {}",
                                cs.len(),
                                cs.len() - 1,
                                via.len()
                            ),
                        });
                    }
                    let mut chain = vec![x];
                    for v in via {
                        chain.push(self.state(v, path)?);
                    }
                    chain.push(y);
                    chain
                };
                let mut sum = num_rational::BigRational::from_integer(0.into());
                for (i, c) in cs.iter().enumerate() {
                    let (a, b) = if chain.is_empty() {
                        (x, y)
                    } else {
                        (chain[i], chain[i + 1])
                    };
                    let d = self.pair(c, a, b, &at(path, format!("triang.{i}")))?;
                    sum = d.add_unbounded(&sum);
                }
                Ok(Dist::new(sum).unwrap_or_else(|_| Dist::one()))
            }
            Node::Coupling(e, pairs) => {
                let (bx, by) = (ext.prechart.beta(x), ext.prechart.beta(y));
                let mut left_seen = Vec::new();
                let mut right_seen = Vec::new();
                let mut worst = Dist::zero();
                for (i, p) in pairs.iter().enumerate() {
                    let here = at(path, format!("coupling.{i}"));
                    let u = self.resolve(&p.left, &here)?;
                    let w = self.resolve(&p.right, &here)?;
                    if !bx.contains(&u) || !by.contains(&w) {
                        return Err(DeriveError::Malformed {
                            path: here,
                            detail: "move is not available from its state".into(),
                        });
                    }
                    left_seen.push(u);
                    right_seen.push(w);
                    let contribution = match (u, w) {
                        (Move::Act(a, u2), Move::Act(b, w2)) if a == b => match &p.child {
                            Some(c) => self.pair(c, u2, w2, &here)?.half(),
                            None => Dist::one().half(),
                        },
                        _ if p.child.is_some() => {
                            return Err(DeriveError::Malformed {
                                path: here,
                                detail: "child under moves without a shared letter".into(),
                            })
                        }
                        _ if u == w => Dist::zero(),
                        _ => Dist::one(),
                    };
                    worst = worst.max(contribution);
                }
                if bx.iter().any(|m| !left_seen.contains(m))
                    || by.iter().any(|m| !right_seen.contains(m))
                {
                    return Err(DeriveError::Malformed {
                        path: path.to_string(),
                        detail: "coupling does not cover every move".into(),
                    });
                }
                require(path, e, &worst)?;
                Ok(e.clone())
            }
        }
    }
}
