use thiserror::Error;

use super::{DiagTerm, TypeError, Wire, WireWord};
use crate::expr::Expr;
use crate::metric::Dist;
use crate::regbeh::{IntMorphism, RbMorphism, RegBehError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("diagrams have different types: {0} vs {1}")]
    TypeMismatch(String, String),
    #[error("component {index} out of range 1..={inputs}")]
    ComponentIndex { index: usize, inputs: usize },
    #[error("component extraction needs only rightward wires, got {0}")]
    NotRightward(String),
    #[error(transparent)]
    RegBeh(#[from] RegBehError),
}

fn rb(cod: usize, rows: Vec<Expr>) -> RbMorphism {
    RbMorphism::new(cod, rows).expect("generator rows are well scoped")
}

/// Meaning of a term as a morphism of the Int construction.
pub fn interpret(t: &DiagTerm) -> Result<IntMorphism, DiagramError> {
    t.typecheck()?;
    eval(t)
}

fn eval(t: &DiagTerm) -> Result<IntMorphism, DiagramError> {
    Ok(match t {
        DiagTerm::Copy => IntMorphism::embed(&rb(2, vec![Expr::sum(Expr::var(1), Expr::var(2))])),
        DiagTerm::Del => IntMorphism::embed(&rb(0, vec![Expr::Zero])),
        DiagTerm::Gen => IntMorphism::embed(&RbMorphism::initial(1)),
        DiagTerm::Merge => IntMorphism::embed(&RbMorphism::codiagonal(1)),
        DiagTerm::Act(a) => IntMorphism::embed(&rb(1, vec![Expr::prefix(*a, Expr::var(1))])),
        DiagTerm::Cap => IntMorphism::counit((1, 0)),
        DiagTerm::Cup => IntMorphism::unit((1, 0)),
        DiagTerm::Id(w) => IntMorphism::identity(w.object()),
        DiagTerm::Sym(x, y) => IntMorphism::symmetry(x.object(), y.object()),
        DiagTerm::Seq(a, b) => eval(a)?.compose(&eval(b)?)?,
        DiagTerm::Tensor(a, b) => IntMorphism::tensor(&eval(a)?, &eval(b)?),
    })
}

fn id(ws: &[Wire]) -> DiagTerm {
    DiagTerm::Id(WireWord(ws.to_vec()))
}

/// Turns every leftward wire of the interface into a rightward one: a
/// leftward input becomes a trailing output and a leftward output a
/// trailing input. Domain wires are handled first, leftmost first.
pub fn bend(t: &DiagTerm) -> Result<DiagTerm, DiagramError> {
    use Wire::{L, R};
    let (mut dom, mut cod) = t.typecheck()?;
    let mut t = t.clone();
    while let Some(k) = dom.0.iter().position(|&w| w == L) {
        let (v1, v2) = (&dom.0[..k], &dom.0[k + 1..]);
        let l_v2: Vec<Wire> = std::iter::once(L).chain(v2.iter().copied()).collect();
        t = DiagTerm::seq_all([
            DiagTerm::tensor_all([id(v1), DiagTerm::Cup, id(v2)]),
            DiagTerm::tensor_all([id(v1), DiagTerm::Sym(WireWord(vec![R]), WireWord(l_v2))]),
            DiagTerm::tensor(t, id(&[R])),
        ]);
        dom = WireWord(v1.iter().chain(v2).copied().collect());
        cod = cod.concat(&WireWord(vec![R]));
    }
    while let Some(k) = cod.0.iter().position(|&w| w == L) {
        let (w1, w2) = (&cod.0[..k], &cod.0[k + 1..]);
        t = DiagTerm::seq_all([
            DiagTerm::tensor(t, id(&[R])),
            DiagTerm::tensor_all([
                id(w1),
                id(&[L]),
                DiagTerm::Sym(WireWord(w2.to_vec()), WireWord(vec![R])),
            ]),
            DiagTerm::tensor_all([id(w1), DiagTerm::Cap, id(w2)]),
        ]);
        dom = dom.concat(&WireWord(vec![R]));
        cod = WireWord(w1.iter().chain(w2).copied().collect());
    }
    Ok(t)
}

/// For `t: R^m -> R^n`, the term feeding input `i` (from 1) alone; the
/// other inputs are fed by `gen`.
pub fn component(t: &DiagTerm, i: usize) -> Result<DiagTerm, DiagramError> {
    let (dom, cod) = t.typecheck()?;
    if !dom.is_all_r() || !cod.is_all_r() {
        return Err(DiagramError::NotRightward(format!("[{dom}] -> [{cod}]")));
    }
    let m = dom.len();
    if i == 0 || i > m {
        return Err(DiagramError::ComponentIndex {
            index: i,
            inputs: m,
        });
    }
    let feed = DiagTerm::tensor_all(
        std::iter::repeat_n(DiagTerm::Gen, i - 1)
            .chain([id(&[Wire::R])])
            .chain(std::iter::repeat_n(DiagTerm::Gen, m - i)),
    );
    Ok(DiagTerm::seq(feed, t.clone()))
}

/// Homset distance between the bent interpretations.
pub fn diagram_distance(
    f: &DiagTerm,
    g: &DiagTerm,
    max_states: usize,
) -> Result<Dist, DiagramError> {
    let tf = f.typecheck()?;
    let tg = g.typecheck()?;
    if tf != tg {
        return Err(DiagramError::TypeMismatch(
            format!("[{}] -> [{}]", tf.0, tf.1),
            format!("[{}] -> [{}]", tg.0, tg.1),
        ));
    }
    let sf = interpret(&bend(f)?)?;
    let sg = interpret(&bend(g)?)?;
    Ok(sf.distance(&sg, max_states)?)
}
