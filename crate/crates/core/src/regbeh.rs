//! Tuples of expressions as morphisms: composition by substitution,
//! parameterised fixpoints, trace, and the Int construction on top.
//!
//! A morphism `m -> n` is a list of `m` rows whose free variables lie in
//! `v1..vn`; row `i` describes the behaviour entering at input `i`, and
//! output `v_j` exits through wire `j`.

use std::fmt;

use thiserror::Error;

use crate::bisim::bisimilarity;
use crate::expr::{expand_all, substitute, Expr, Var};
use crate::metric::{expr_distances, Dist, MetricError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegBehError {
    #[error("row {row} mentions {var}, outside v1..v{cod}")]
    FreeVar { row: usize, var: Var, cod: usize },
    #[error("type mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RbMorphism {
    dom: usize,
    cod: usize,
    rows: Vec<Expr>,
}

fn v(i: usize) -> Var {
    Var::new(u32::try_from(i).expect("variable index fits in u32"))
}

fn mismatch(msg: String) -> RegBehError {
    RegBehError::Mismatch(msg)
}

/// `mu x.e`, or just `e` when `x` does not occur free; the two are
/// bisimilar and skipping the binder keeps composites small.
fn mu_if_free(x: Var, e: &Expr) -> Expr {
    if e.is_free(x) {
        Expr::mu(x, e.clone())
    } else {
        e.clone()
    }
}

impl RbMorphism {
    pub fn new(cod: usize, rows: Vec<Expr>) -> Result<Self, RegBehError> {
        for (row, e) in rows.iter().enumerate() {
            if let Some(&var) = e.free_vars().iter().find(|w| w.index() as usize > cod) {
                return Err(RegBehError::FreeVar { row, var, cod });
            }
        }
        Ok(RbMorphism {
            dom: rows.len(),
            cod,
            rows,
        })
    }

    fn wiring(cod: usize, targets: impl IntoIterator<Item = usize>) -> Self {
        let rows: Vec<Expr> = targets.into_iter().map(|j| Expr::Var(v(j))).collect();
        RbMorphism {
            dom: rows.len(),
            cod,
            rows,
        }
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn rows(&self) -> &[Expr] {
        &self.rows
    }

    pub fn identity(n: usize) -> Self {
        Self::wiring(n, 1..=n)
    }

    /// The empty tuple `0 -> n`.
    pub fn initial(n: usize) -> Self {
        Self::wiring(n, [])
    }

    /// `k -> k + l`, input `i` exits at `v_i`.
    pub fn inl(k: usize, l: usize) -> Self {
        Self::wiring(k + l, 1..=k)
    }

    /// `l -> k + l`, input `j` exits at `v_{k+j}`.
    pub fn inr(k: usize, l: usize) -> Self {
        Self::wiring(k + l, (k + 1)..=(k + l))
    }

    /// `a + b -> b + a`.
    pub fn symmetry(a: usize, b: usize) -> Self {
        Self::wiring(a + b, ((b + 1)..=(b + a)).chain(1..=b))
    }

    /// `n + n -> n`, both copies of input `i` exit at `v_i`.
    pub fn codiagonal(n: usize) -> Self {
        Self::wiring(n, (1..=n).chain(1..=n))
    }

    /// Row-wise simultaneous substitution of `g`'s rows for `v1..vn`.
    pub fn compose(&self, g: &RbMorphism) -> Result<Self, RegBehError> {
        if self.cod != g.dom {
            return Err(mismatch(format!(
                "cannot compose {}->{} with {}->{}",
                self.dom, self.cod, g.dom, g.cod
            )));
        }
        let bindings: Vec<(Var, Expr)> = g
            .rows
            .iter()
            .enumerate()
            .map(|(j, e)| (v(j + 1), e.clone()))
            .collect();
        Ok(RbMorphism {
            dom: self.dom,
            cod: g.cod,
            rows: self.rows.iter().map(|e| substitute(e, &bindings).tidy()).collect(),
        })
    }

    /// Rows of `f` followed by rows of `g`, over a shared codomain.
    pub fn pair(f: &RbMorphism, g: &RbMorphism) -> Result<Self, RegBehError> {
        if f.cod != g.cod {
            return Err(mismatch(format!(
                "cannot pair morphisms into {} and {}",
                f.cod, g.cod
            )));
        }
        Ok(RbMorphism {
            dom: f.dom + g.dom,
            cod: f.cod,
            rows: f.rows.iter().chain(&g.rows).cloned().collect(),
        })
    }

    /// Side by side; `g`'s outputs are shifted past `f`'s.
    pub fn oplus(f: &RbMorphism, g: &RbMorphism) -> Self {
        let shift: Vec<(Var, Expr)> = (1..=g.cod)
            .map(|j| (v(j), Expr::Var(v(j + f.cod))))
            .collect();
        RbMorphism {
            dom: f.dom + g.dom,
            cod: f.cod + g.cod,
            rows: f
                .rows
                .iter()
                .cloned()
                .chain(g.rows.iter().map(|e| substitute(e, &shift)))
                .collect(),
        }
    }

    /// Fold of [`RbMorphism::oplus`]; the empty fold is `id_0`.
    pub fn oplus_all<'a>(parts: impl IntoIterator<Item = &'a RbMorphism>) -> Self {
        parts
            .into_iter()
            .fold(RbMorphism::identity(0), |acc, f| RbMorphism::oplus(&acc, f))
    }

    /// For `f: n -> p + n`, the solution `n -> p` of the system in which
    /// row `i` may refer back to itself through `v_{p+i}`.
    ///
    /// Eliminates the last row first: close it with `mu`, substitute it into
    /// the other rows, solve those, then substitute their solutions back.
    pub fn dagger(&self) -> Result<Self, RegBehError> {
        let n = self.dom;
        let p = self
            .cod
            .checked_sub(n)
            .ok_or_else(|| mismatch(format!("dagger needs cod >= dom, got {}->{}", n, self.cod)))?;
        if n == 0 {
            return Ok(RbMorphism::initial(p));
        }
        let x = v(p + n);
        let last = mu_if_free(x, &self.rows[n - 1]).tidy();
        let rest = RbMorphism {
            dom: n - 1,
            cod: p + n - 1,
            rows: self.rows[..n - 1]
                .iter()
                .map(|e| substitute(e, &[(x, last.clone())]).tidy())
                .collect(),
        };
        let solved = rest.dagger()?;
        let back: Vec<(Var, Expr)> = solved
            .rows
            .iter()
            .enumerate()
            .map(|(i, e)| (v(p + 1 + i), e.clone()))
            .collect();
        let mut rows = solved.rows;
        rows.push(substitute(&last, &back).tidy());
        Ok(RbMorphism { dom: n, cod: p, rows })
    }

    /// Feedback of the last `n` outputs into the last `n` inputs, for
    /// `g: p + n -> q + n`.
    pub fn trace(&self, n: usize) -> Result<Self, RegBehError> {
        if n > self.dom || n > self.cod {
            return Err(mismatch(format!(
                "cannot trace {} wires of {}->{}",
                n, self.dom, self.cod
            )));
        }
        if n == 0 {
            return Ok(self.clone());
        }
        let (p, q) = (self.dom - n, self.cod - n);
        let route = RbMorphism::pair(&RbMorphism::inl(q, p + n), &RbMorphism::inr(q + p, n))?;
        let looped = self.compose(&route)?.dagger()?;
        RbMorphism::inl(p, n).compose(&looped)
    }

    /// Maximum of the row-wise distances, 0 for empty tuples.
    pub fn distance(&self, g: &RbMorphism, max_states: usize) -> Result<Dist, RegBehError> {
        self.check_same_type(g)?;
        let pairs: Vec<(Expr, Expr)> = self
            .rows
            .iter()
            .cloned()
            .zip(g.rows.iter().cloned())
            .collect();
        Ok(expr_distances(&pairs, max_states)?
            .into_iter()
            .max()
            .unwrap_or_else(Dist::zero))
    }

    /// Whether corresponding rows are bisimilar.
    pub fn bisimilar(&self, g: &RbMorphism, max_states: usize) -> Result<bool, RegBehError> {
        self.check_same_type(g)?;
        let roots: Vec<Expr> = self.rows.iter().chain(&g.rows).cloned().collect();
        let ex = expand_all(&roots, max_states).map_err(MetricError::from)?;
        let part = bisimilarity(&ex.prechart);
        let m = self.dom;
        Ok((0..m).all(|i| part.same(ex.roots[i], ex.roots[m + i])))
    }

    fn check_same_type(&self, g: &RbMorphism) -> Result<(), RegBehError> {
        if (self.dom, self.cod) != (g.dom, g.cod) {
            return Err(mismatch(format!(
                "{}->{} vs {}->{}",
                self.dom, self.cod, g.dom, g.cod
            )));
        }
        Ok(())
    }
}

impl fmt::Display for RbMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ") : {} -> {}", self.dom, self.cod)
    }
}

/// An object of the Int construction: `(positive, negative)` wire counts.
pub type IntObject = (usize, usize);

/// A morphism `(a+, a-) -> (b+, b-)` carried by a payload
/// `a+ + b- -> a- + b+`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMorphism {
    dom: IntObject,
    cod: IntObject,
    payload: RbMorphism,
}

fn ids(ns: &[usize]) -> Vec<RbMorphism> {
    ns.iter().map(|&n| RbMorphism::identity(n)).collect()
}

fn block(parts: &[RbMorphism]) -> RbMorphism {
    RbMorphism::oplus_all(parts)
}

impl IntMorphism {
    pub fn new(dom: IntObject, cod: IntObject, payload: RbMorphism) -> Result<Self, RegBehError> {
        if payload.dom != dom.0 + cod.1 || payload.cod != dom.1 + cod.0 {
            return Err(mismatch(format!(
                "payload {}->{} does not fit {:?} -> {:?}",
                payload.dom, payload.cod, dom, cod
            )));
        }
        Ok(IntMorphism { dom, cod, payload })
    }

    pub fn dom(&self) -> IntObject {
        self.dom
    }

    pub fn cod(&self) -> IntObject {
        self.cod
    }

    pub fn payload(&self) -> &RbMorphism {
        &self.payload
    }

    /// `N(f)`: a morphism `m -> n` seen as `(m, 0) -> (n, 0)`.
    pub fn embed(f: &RbMorphism) -> Self {
        IntMorphism {
            dom: (f.dom, 0),
            cod: (f.cod, 0),
            payload: f.clone(),
        }
    }

    pub fn identity(x: IntObject) -> Self {
        IntMorphism {
            dom: x,
            cod: x,
            payload: RbMorphism::symmetry(x.0, x.1),
        }
    }

    /// `x (x) y -> y (x) x`.
    pub fn symmetry(x: IntObject, y: IntObject) -> Self {
        let (xp, xn) = x;
        let (yp, yn) = y;
        let outs_minus = xn + yn;
        let targets = (0..xp)
            .map(|i| outs_minus + yp + i + 1)
            .chain((0..yp).map(|j| outs_minus + j + 1))
            .chain((0..yn).map(|k| xn + k + 1))
            .chain((0..xn).map(|l| l + 1));
        IntMorphism {
            dom: (xp + yp, xn + yn),
            cod: (yp + xp, yn + xn),
            payload: RbMorphism::wiring(outs_minus + yp + xp, targets),
        }
    }

    /// `(0,0) -> (m + n, n + m)`.
    pub fn unit(x: IntObject) -> Self {
        let (m, n) = x;
        IntMorphism {
            dom: (0, 0),
            cod: (m + n, n + m),
            payload: RbMorphism::symmetry(n, m),
        }
    }

    /// `(n + m, m + n) -> (0,0)`.
    pub fn counit(x: IntObject) -> Self {
        let (m, n) = x;
        IntMorphism {
            dom: (n + m, m + n),
            cod: (0, 0),
            payload: RbMorphism::symmetry(n, m),
        }
    }

    /// Composition by tracing out the middle object's wires.
    pub fn compose(&self, g: &IntMorphism) -> Result<Self, RegBehError> {
        if self.cod != g.dom {
            return Err(mismatch(format!(
                "cannot compose {:?}->{:?} with {:?}->{:?}",
                self.dom, self.cod, g.dom, g.cod
            )));
        }
        let (ap, an) = self.dom;
        let (bp, bn) = self.cod;
        let (cp, cn) = g.cod;
        let s = RbMorphism::symmetry;
        let [i_ap, i_bp, i_bn, i_an, i_cp] = <[RbMorphism; 5]>::try_from(ids(&[ap, bp, bn, an, cp]))
            .expect("five identities");
        let alpha = block(&[i_ap.clone(), s(cn, bn), i_bp.clone()])
            .compose(&block(&[i_ap, i_bn.clone(), s(cn, bp)]))?;
        let beta = block(&[i_an.clone(), i_bp, s(bn, cp)])
            .compose(&block(&[i_an.clone(), s(bp, cp), i_bn]))?
            .compose(&block(&[i_an, i_cp, s(bp, bn)]))?;
        let body = alpha
            .compose(&RbMorphism::oplus(&self.payload, &g.payload))?
            .compose(&beta)?;
        IntMorphism::new(self.dom, g.cod, body.trace(bn + bp)?)
    }

    pub fn tensor(f: &IntMorphism, g: &IntMorphism) -> Self {
        let (ap, an) = f.dom;
        let (bp, bn) = f.cod;
        let (cp, cn) = g.dom;
        let (dp, dn) = g.cod;
        let s = RbMorphism::symmetry;
        let pre = block(&[
            RbMorphism::identity(ap),
            s(cp, bn),
            RbMorphism::identity(dn),
        ]);
        let post = block(&[
            RbMorphism::identity(an),
            s(bp, cn),
            RbMorphism::identity(dp),
        ]);
        let payload = pre
            .compose(&RbMorphism::oplus(&f.payload, &g.payload))
            .and_then(|m| m.compose(&post))
            .expect("tensor sandwich is well typed");
        IntMorphism {
            dom: (ap + cp, an + cn),
            cod: (bp + dp, bn + dn),
            payload,
        }
    }

    /// Distance of the payloads.
    pub fn distance(&self, g: &IntMorphism, max_states: usize) -> Result<Dist, RegBehError> {
        if (self.dom, self.cod) != (g.dom, g.cod) {
            return Err(mismatch(format!(
                "{:?}->{:?} vs {:?}->{:?}",
                self.dom, self.cod, g.dom, g.cod
            )));
        }
        self.payload.distance(&g.payload, max_states)
    }
}
