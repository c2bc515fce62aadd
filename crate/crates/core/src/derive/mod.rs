//! Finite certificates for distance bounds between diagrams, with a
//! checker and a synthesizer.
//!
//! Certificates talk about states of the extracted prechart: both diagrams
//! are bent to rightward interfaces, interpreted, and every row of the two
//! payloads is expanded into one shared prechart. A state is named by the
//! text of its alpha-normal expression.

mod check;
mod format;
mod synth;

use std::collections::HashMap;

use thiserror::Error;

use crate::bisim::{bisimilarity, Partition};
use crate::chart::{Prechart, StateId};
use crate::diagram::{bend, interpret, DiagTerm, DiagramError};
use crate::expr::{expand_all, BudgetExceeded, Expr, Letter, Var};
use crate::metric::{Dist, MetricError};

pub use check::{check, check_exprs, check_extracted};
pub use format::CertParseError;
pub use synth::{synthesize, synthesize_exprs, synthesize_extracted};

/// A move as written in a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertMove {
    Act(Letter, String),
    Out(Var),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingPair {
    pub left: CertMove,
    pub right: CertMove,
    pub child: Option<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    /// Any two states are within distance 1.
    Top,
    /// The states are bisimilar, so at distance 0.
    Bisim,
    /// A larger bound than the child proves.
    Weaken(Dist, Box<Node>),
    /// Sum of the children's bounds along a chain of states. `via` lists
    /// the intermediate states; when empty every child relates the same
    /// pair.
    Triang(Vec<Node>, Vec<String>),
    /// A relation between the two move sets covering both of them.
    Coupling(Dist, Vec<CouplingPair>),
    /// One child per input, bound by their maximum.
    Decomp(Vec<Node>),
}

impl Node {
    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        1 + match self {
            Node::Top | Node::Bisim => 0,
            Node::Weaken(_, c) => c.depth(),
            Node::Triang(cs, _) | Node::Decomp(cs) => cs.iter().map(Node::depth).max().unwrap_or(0),
            Node::Coupling(_, ps) => ps
                .iter()
                .filter_map(|p| p.child.as_ref().map(Node::depth))
                .max()
                .unwrap_or(0),
        }
    }

    /// Every node in preorder.
    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = vec![self];
        match self {
            Node::Top | Node::Bisim => {}
            Node::Weaken(_, c) => out.extend(c.nodes()),
            Node::Triang(cs, _) | Node::Decomp(cs) => {
                for c in cs {
                    out.extend(c.nodes());
                }
            }
            Node::Coupling(_, ps) => {
                for p in ps {
                    if let Some(c) = &p.child {
                        out.extend(c.nodes());
                    }
                }
            }
        }
        out
    }

    /// Mutable access to the `index`-th node in preorder.
    pub fn node_mut(&mut self, index: usize) -> Option<&mut Node> {
        fn go<'a>(n: &'a mut Node, index: &mut usize) -> Option<&'a mut Node> {
            if *index == 0 {
                return Some(n);
            }
            *index -= 1;
            match n {
                Node::Top | Node::Bisim => None,
                Node::Weaken(_, c) => go(c, index),
                Node::Triang(cs, _) | Node::Decomp(cs) => cs.iter_mut().find_map(|c| go(c, index)),
                Node::Coupling(_, ps) => ps
                    .iter_mut()
                    .filter_map(|p| p.child.as_mut())
                    .find_map(|c| go(c, index)),
            }
        }
        let mut i = index;
        go(self, &mut i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    /// The bound claimed for the whole judgement.
    pub bound: Option<Dist>,
    pub root: Node,
}

impl Certificate {
    pub fn new(root: Node) -> Self {
        Certificate {
            lhs: None,
            rhs: None,
            bound: None,
            root,
        }
    }

    pub fn to_text(&self) -> String {
        format::print(self)
    }

    pub fn parse(text: &str) -> Result<Self, CertParseError> {
        format::parse(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("diagrams have different types: {0} vs {1}")]
    TypeMismatch(String, String),
    #[error("certificate is about {found:?}, not {expected:?}")]
    Metadata { expected: String, found: String },
    #[error("at {path}: {detail}")]
    Malformed { path: String, detail: String },
    #[error("at {path}: bound {claimed} is below the required {required}")]
    BoundViolation {
        path: String,
        claimed: Dist,
        required: String,
    },
    #[error("at {path}: states are not bisimilar")]
    NotBisimilar { path: String },
    #[error("at {path}: unknown state {name:?}")]
    UnknownState { path: String, name: String },
    #[error("at {path}: expected {expected} components, found {found}")]
    DecompArity {
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("at {path}: {node} is only allowed at the root")]
    RootOnly { path: String, node: &'static str },
    #[error("at {path}: {node} needs exactly one input, the judgement has {inputs}")]
    NeedsSingleInput {
        path: String,
        node: &'static str,
        inputs: usize,
    },
    #[error("no certificate below the distance {distance}")]
    BelowDistance { distance: Dist },
}

/// The shared prechart of both sides' rows.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub prechart: Prechart,
    pub left: Vec<StateId>,
    pub right: Vec<StateId>,
    names: HashMap<String, StateId>,
    bisim: Partition,
}

impl Extraction {
    pub fn from_exprs(
        left: &[Expr],
        right: &[Expr],
        max_states: usize,
    ) -> Result<Self, DeriveError> {
        let roots: Vec<Expr> = left.iter().chain(right).cloned().collect();
        let ex = expand_all(&roots, max_states)?;
        let names = ex
            .prechart
            .states()
            .map(|q| (ex.prechart.label(q).to_string(), q))
            .collect();
        let bisim = bisimilarity(&ex.prechart);
        let (l, r) = ex.roots.split_at(left.len());
        Ok(Extraction {
            left: l.to_vec(),
            right: r.to_vec(),
            prechart: ex.prechart,
            names,
            bisim,
        })
    }

    pub fn from_diagrams(
        f: &DiagTerm,
        g: &DiagTerm,
        max_states: usize,
    ) -> Result<Self, DeriveError> {
        let tf = f.typecheck().map_err(DiagramError::from)?;
        let tg = g.typecheck().map_err(DiagramError::from)?;
        if tf != tg {
            return Err(DeriveError::TypeMismatch(
                format!("[{}] -> [{}]", tf.0, tf.1),
                format!("[{}] -> [{}]", tg.0, tg.1),
            ));
        }
        let sf = interpret(&bend(f)?)?;
        let sg = interpret(&bend(g)?)?;
        Self::from_exprs(sf.payload().rows(), sg.payload().rows(), max_states)
    }

    /// Number of input components.
    pub fn inputs(&self) -> usize {
        self.left.len()
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.names.get(name).copied()
    }

    pub fn name(&self, q: StateId) -> &str {
        self.prechart.label(q)
    }

    pub fn bisimilar(&self, x: StateId, y: StateId) -> bool {
        self.bisim.same(x, y)
    }
}
