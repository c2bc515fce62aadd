//! String-diagram terms over the generators of regular behaviours, their
//! types, and their meaning as morphisms of the Int construction.

mod axioms;
mod interp;
mod parse;

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::expr::Letter;

pub use axioms::{axiom_catalog, check_axiom, copy_variant_of_c1, Axiom, AxiomError};
pub use interp::{bend, component, diagram_distance, interpret, DiagramError};
pub use parse::{parse_term, TermParseError};

/// A wire orientation: `R` flows left to right, `L` right to left.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Wire {
    R,
    L,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct WireWord(pub Vec<Wire>);

impl WireWord {
    pub fn empty() -> Self {
        WireWord(Vec::new())
    }

    pub fn rs(n: usize) -> Self {
        WireWord(vec![Wire::R; n])
    }

    pub fn count(&self, w: Wire) -> usize {
        self.0.iter().filter(|&&x| x == w).count()
    }

    /// The Int object `(#R, #L)`.
    pub fn object(&self) -> (usize, usize) {
        (self.count(Wire::R), self.count(Wire::L))
    }

    pub fn concat(&self, other: &WireWord) -> WireWord {
        WireWord(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_all_r(&self) -> bool {
        self.0.iter().all(|&w| w == Wire::R)
    }
}

impl fmt::Display for WireWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.0 {
            f.write_char(match w {
                Wire::R => '>',
                Wire::L => '<',
            })?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum DiagTerm {
    Copy,
    Del,
    Merge,
    Gen,
    Cap,
    Cup,
    Act(Letter),
    Id(WireWord),
    Sym(WireWord, WireWord),
    Seq(Box<DiagTerm>, Box<DiagTerm>),
    Tensor(Box<DiagTerm>, Box<DiagTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("interface mismatch at {path}: {left} does not meet {right}")]
pub struct TypeError {
    /// Steps from the root, e.g. `seq.1/tensor.0`.
    pub path: String,
    pub left: String,
    pub right: String,
}

impl DiagTerm {
    pub fn seq(a: DiagTerm, b: DiagTerm) -> Self {
        DiagTerm::Seq(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: DiagTerm, b: DiagTerm) -> Self {
        DiagTerm::Tensor(Box::new(a), Box::new(b))
    }

    pub fn id(w: WireWord) -> Self {
        DiagTerm::Id(w)
    }

    /// Left-nested sequence; `id()` when empty.
    pub fn seq_all(parts: impl IntoIterator<Item = DiagTerm>) -> Self {
        parts
            .into_iter()
            .reduce(DiagTerm::seq)
            .unwrap_or(DiagTerm::Id(WireWord::empty()))
    }

    /// Left-nested tensor, skipping empty identities; `id()` when nothing
    /// is left.
    pub fn tensor_all(parts: impl IntoIterator<Item = DiagTerm>) -> Self {
        parts
            .into_iter()
            .filter(|t| !matches!(t, DiagTerm::Id(w) if w.is_empty()))
            .reduce(DiagTerm::tensor)
            .unwrap_or(DiagTerm::Id(WireWord::empty()))
    }

    pub fn typecheck(&self) -> Result<(WireWord, WireWord), TypeError> {
        self.type_at(&mut Vec::new())
    }

    fn type_at(&self, path: &mut Vec<String>) -> Result<(WireWord, WireWord), TypeError> {
        use Wire::{L, R};
        let w = |ws: &[Wire]| WireWord(ws.to_vec());
        Ok(match self {
            DiagTerm::Copy => (w(&[R]), w(&[R, R])),
            DiagTerm::Del => (w(&[R]), w(&[])),
            DiagTerm::Merge => (w(&[R, R]), w(&[R])),
            DiagTerm::Gen => (w(&[]), w(&[R])),
            DiagTerm::Act(_) => (w(&[R]), w(&[R])),
            DiagTerm::Cap => (w(&[L, R]), w(&[])),
            DiagTerm::Cup => (w(&[]), w(&[R, L])),
            DiagTerm::Id(x) => (x.clone(), x.clone()),
            DiagTerm::Sym(x, y) => (x.concat(y), y.concat(x)),
            DiagTerm::Seq(a, b) => {
                path.push("seq.0".into());
                let (da, ca) = a.type_at(path)?;
                path.pop();
                path.push("seq.1".into());
                let (db, cb) = b.type_at(path)?;
                path.pop();
                if ca != db {
                    return Err(TypeError {
                        path: if path.is_empty() {
                            "root".into()
                        } else {
                            path.join("/")
                        },
                        left: format!("codomain [{ca}]"),
                        right: format!("domain [{db}]"),
                    });
                }
                (da, cb)
            }
            DiagTerm::Tensor(a, b) => {
                path.push("tensor.0".into());
                let (da, ca) = a.type_at(path)?;
                path.pop();
                path.push("tensor.1".into());
                let (db, cb) = b.type_at(path)?;
                path.pop();
                (da.concat(&db), ca.concat(&cb))
            }
        })
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            DiagTerm::Seq(a, b) | DiagTerm::Tensor(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// DOT rendering of the term tree.
    pub fn to_dot(&self) -> String {
        fn go(t: &DiagTerm, next: &mut usize, out: &mut String) -> usize {
            let me = *next;
            *next += 1;
            let label = match t {
                DiagTerm::Seq(..) => ";".to_string(),
                DiagTerm::Tensor(..) => "*".to_string(),
                leaf => leaf.to_string(),
            };
            let _ = writeln!(out, "  n{me} [label=\"{label}\"];");
            if let DiagTerm::Seq(a, b) | DiagTerm::Tensor(a, b) = t {
                for child in [a, b] {
                    let c = go(child, next, out);
                    let _ = writeln!(out, "  n{me} -> n{c};");
                }
            }
            me
        }
        let mut out = String::from("digraph term {\n  node [shape=box];\n");
        go(self, &mut 0, &mut out);
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for DiagTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagTerm::Copy => write!(f, "copy"),
            DiagTerm::Del => write!(f, "del"),
            DiagTerm::Merge => write!(f, "merge"),
            DiagTerm::Gen => write!(f, "gen"),
            DiagTerm::Cap => write!(f, "cap"),
            DiagTerm::Cup => write!(f, "cup"),
            DiagTerm::Act(a) => write!(f, "act({a})"),
            DiagTerm::Id(w) => write!(f, "id({w})"),
            DiagTerm::Sym(x, y) => write!(f, "sym({x},{y})"),
            DiagTerm::Seq(a, b) => {
                write!(f, "{a} ; ")?;
                if matches!(**b, DiagTerm::Seq(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            DiagTerm::Tensor(a, b) => {
                if matches!(**a, DiagTerm::Seq(..)) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " * ")?;
                if matches!(**b, DiagTerm::Seq(..) | DiagTerm::Tensor(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}
