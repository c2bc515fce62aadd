use thiserror::Error;

use super::{interpret, parse_term, DiagTerm, DiagramError};

/// One equation of the theory, instantiated at its smallest types.
#[derive(Clone, Debug)]
pub struct Axiom {
    pub name: &'static str,
    pub lhs: DiagTerm,
    pub rhs: DiagTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("unknown axiom {0:?}")]
    Unknown(String),
    #[error("sides of {name} have different types")]
    SideTypes { name: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

const AXIOMS: [(&str, &str, &str); 14] = [
    ("A1", "(cup * id(>)) ; (id(>) * cap)", "id(>)"),
    ("A2", "(id(<) * cup) ; (cap * id(<))", "id(<)"),
    ("B1", "copy ; (copy * id(>))", "copy ; (id(>) * copy)"),
    ("B2", "copy ; (id(>) * del)", "id(>)"),
    ("B3", "copy ; sym(>,>)", "copy"),
    ("B4", "(merge * id(>)) ; merge", "(id(>) * merge) ; merge"),
    ("B5", "(id(>) * gen) ; merge", "id(>)"),
    ("B6", "sym(>,>) ; merge", "merge"),
    (
        "B7",
        "merge ; copy",
        "(copy * copy) ; (id(>) * sym(>,>) * id(>)) ; (merge * merge)",
    ),
    ("B8", "merge ; del", "del * del"),
    ("B9", "gen ; copy", "gen * gen"),
    ("B10", "copy ; merge", "id(>)"),
    // feeding a wire straight back into itself adds nothing
    (
        "B11",
        "(id(>) * cup) ; (merge * id(<)) ; (copy * id(<)) ; (id(>) * sym(>,<)) ; (id(>) * cap)",
        "id(>)",
    ),
    ("C1", "merge ; act(a)", "(act(a) * act(a)) ; merge"),
];

fn build(name: &'static str, lhs: &str, rhs: &str) -> Axiom {
    Axiom {
        name,
        lhs: parse_term(lhs).expect("catalog terms parse"),
        rhs: parse_term(rhs).expect("catalog terms parse"),
    }
}

pub fn axiom_catalog() -> Vec<Axiom> {
    AXIOMS.iter().map(|&(n, l, r)| build(n, l, r)).collect()
}

/// C1 with the merge replaced by a copy; not a valid equation.
pub fn copy_variant_of_c1() -> Axiom {
    build("C1-copy", "act(a) ; copy", "copy ; (act(a) * act(a))")
}

/// Whether both sides denote row-wise bisimilar morphisms.
pub fn check_axiom(name: &str) -> Result<bool, AxiomError> {
    let ax = if name == "C1-copy" {
        copy_variant_of_c1()
    } else {
        axiom_catalog()
            .into_iter()
            .find(|a| a.name == name)
            .ok_or_else(|| AxiomError::Unknown(name.to_string()))?
    };
    holds(&ax)
}

pub(crate) fn holds(ax: &Axiom) -> Result<bool, AxiomError> {
    if ax.lhs.typecheck().map_err(DiagramError::from)?
        != ax.rhs.typecheck().map_err(DiagramError::from)?
    {
        return Err(AxiomError::SideTypes {
            name: ax.name.to_string(),
        });
    }
    let l = interpret(&ax.lhs)?;
    let r = interpret(&ax.rhs)?;
    Ok(l
        .payload()
        .bisimilar(r.payload(), 10_000)
        .map_err(DiagramError::from)?)
}
