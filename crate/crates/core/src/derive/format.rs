//! S-expression text for certificates. Header comment lines of the form
//! `; key: value` carry the related terms and the claimed bound.

use std::fmt::Write as _;

use thiserror::Error;

use super::{CertMove, Certificate, CouplingPair, Node};
use crate::expr::{Alphabet, Var};
use crate::metric::Dist;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CertParseError {
    pub line: usize,
    pub message: String,
}

pub(super) fn print(c: &Certificate) -> String {
    let mut s = String::new();
    if let Some(l) = &c.lhs {
        let _ = writeln!(s, "; lhs: {l}");
    }
    if let Some(r) = &c.rhs {
        let _ = writeln!(s, "; rhs: {r}");
    }
    if let Some(b) = &c.bound {
        let _ = writeln!(s, "; bound: {b}");
    }
    node(&c.root, 0, &mut s);
    s.push('\n');
    s
}

fn quote(name: &str) -> String {
    let mut q = String::from("\"");
    for ch in name.chars() {
        if ch == '"' || ch == '\\' {
            q.push('\\');
        }
        q.push(ch);
    }
    q.push('"');
    q
}

fn mv(m: &CertMove) -> String {
    match m {
        CertMove::Act(a, q) => format!("(act {a} {})", quote(q)),
        CertMove::Out(v) => format!("(out {v})"),
    }
}

fn indent(n: usize, s: &mut String) {
    s.push('\n');
    for _ in 0..n {
        s.push_str("  ");
    }
}

fn node(n: &Node, depth: usize, s: &mut String) {
    match n {
        Node::Top => s.push_str("(top)"),
        Node::Bisim => s.push_str("(bisim)"),
        Node::Weaken(e, c) => {
            let _ = write!(s, "(weaken {e}");
            indent(depth + 1, s);
            node(c, depth + 1, s);
            s.push(')');
        }
        Node::Triang(cs, via) => {
            s.push_str("(triang (");
            for c in cs {
                indent(depth + 2, s);
                node(c, depth + 2, s);
            }
            s.push(')');
            if !via.is_empty() {
                let names: Vec<String> = via.iter().map(|v| quote(v)).collect();
                indent(depth + 1, s);
                let _ = write!(s, "(via {})", names.join(" "));
            }
            s.push(')');
        }
        Node::Coupling(e, pairs) => {
            let _ = write!(s, "(coupling {e} (");
            for p in pairs {
                indent(depth + 2, s);
                let _ = write!(s, "(move {} {}", mv(&p.left), mv(&p.right));
                if let Some(c) = &p.child {
                    indent(depth + 3, s);
                    node(c, depth + 3, s);
                }
                s.push(')');
            }
            s.push_str("))");
        }
        Node::Decomp(cs) => {
            s.push_str("(decomp (");
            for c in cs {
                indent(depth + 2, s);
                node(c, depth + 2, s);
            }
            s.push_str("))");
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String, usize),
    Str(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn line(&self) -> usize {
        match self {
            Sexp::Atom(_, l) | Sexp::Str(_, l) | Sexp::List(_, l) => *l,
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> CertParseError {
    CertParseError {
        line,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Sexp>, CertParseError> {
    let mut stack: Vec<(Vec<Sexp>, usize)> = vec![(Vec::new(), 1)];
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            ';' => {
                for d in chars.by_ref() {
                    if d == '\n' {
                        line += 1;
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {}
            '(' => stack.push((Vec::new(), line)),
            ')' => {
                let (items, at) = stack.pop().expect("stack starts nonempty");
                let parent = stack.last_mut().ok_or_else(|| err(line, "unbalanced ')'"))?;
                parent.0.push(Sexp::List(items, at));
            }
            '"' => {
                let at = line;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return Err(err(at, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(e) => s.push(e),
                            None => return Err(err(at, "unterminated string")),
                        },
                        Some(d) => {
                            if d == '\n' {
                                line += 1;
                            }
                            s.push(d);
                        }
                    }
                }
                stack.last_mut().expect("nonempty").0.push(Sexp::Str(s, at));
            }
            c => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || matches!(d, '(' | ')' | '"' | ';') {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                stack.last_mut().expect("nonempty").0.push(Sexp::Atom(s, line));
            }
        }
    }
    if stack.len() != 1 {
        return Err(err(line, "unbalanced '('"));
    }
    Ok(stack.pop().expect("top level").0)
}

pub(super) fn parse(text: &str) -> Result<Certificate, CertParseError> {
    let mut cert = Certificate::new(Node::Top);
    for (i, l) in text.lines().enumerate() {
        let Some(rest) = l.trim_start().strip_prefix(';') else {
            continue;
        };
        let Some((key, value)) = rest.split_once(':') else {
            continue;
        };
        let value = value.trim().to_string();
        match key.trim() {
            "lhs" => cert.lhs = Some(value),
            "rhs" => cert.rhs = Some(value),
            "bound" => {
                cert.bound = Some(value.parse().map_err(|e| err(i + 1, format!("{e}")))?)
            }
            _ => {}
        }
    }
    let items = tokenize(text)?;
    let [root] = items.as_slice() else {
        return Err(err(1, format!("expected one certificate, found {}", items.len())));
    };
    cert.root = to_node(root)?;
    Ok(cert)
}

fn head(s: &Sexp) -> Result<(&str, &[Sexp]), CertParseError> {
    match s {
        Sexp::List(items, line) => match items.split_first() {
            Some((Sexp::Atom(h, _), rest)) => Ok((h.as_str(), rest)),
            _ => Err(err(*line, "expected a tagged list")),
        },
        other => Err(err(other.line(), "expected a list")),
    }
}

fn list(s: &Sexp) -> Result<&[Sexp], CertParseError> {
    match s {
        Sexp::List(items, _) => Ok(items),
        other => Err(err(other.line(), "expected a list")),
    }
}

fn dist(s: &Sexp) -> Result<Dist, CertParseError> {
    match s {
        Sexp::Atom(a, line) => a.parse().map_err(|e| err(*line, format!("{e}"))),
        other => Err(err(other.line(), "expected a rational")),
    }
}

fn to_node(s: &Sexp) -> Result<Node, CertParseError> {
    let (tag, args) = head(s)?;
    let line = s.line();
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(line, format!("{tag} takes {n} arguments")))
        }
    };
    Ok(match tag {
        "top" => {
            arity(0)?;
            Node::Top
        }
        "bisim" => {
            arity(0)?;
            Node::Bisim
        }
        "weaken" => {
            arity(2)?;
            Node::Weaken(dist(&args[0])?, Box::new(to_node(&args[1])?))
        }
        "triang" => {
            if args.is_empty() || args.len() > 2 {
                return Err(err(line, "triang takes children and an optional via list"));
            }
            let children = list(&args[0])?.iter().map(to_node).collect::<Result<_, _>>()?;
            let via = match args.get(1) {
                None => Vec::new(),
                Some(v) => {
                    let (t, names) = head(v)?;
                    if t != "via" {
                        return Err(err(v.line(), "expected (via ...)"));
                    }
                    names
                        .iter()
                        .map(|n| match n {
                            Sexp::Str(s, _) => Ok(s.clone()),
                            other => Err(err(other.line(), "expected a quoted state")),
                        })
                        .collect::<Result<_, _>>()?
                }
            };
            Node::Triang(children, via)
        }
        "coupling" => {
            arity(2)?;
            let pairs = list(&args[1])?
                .iter()
                .map(to_pair)
                .collect::<Result<_, _>>()?;
            Node::Coupling(dist(&args[0])?, pairs)
        }
        "decomp" => {
            arity(1)?;
            Node::Decomp(list(&args[0])?.iter().map(to_node).collect::<Result<_, _>>()?)
        }
        other => return Err(err(line, format!("unknown node {other:?}"))),
    })
}

fn to_pair(s: &Sexp) -> Result<CouplingPair, CertParseError> {
    let (tag, args) = head(s)?;
    if tag != "move" || !(2..=3).contains(&args.len()) {
        return Err(err(s.line(), "expected (move M M [C])"));
    }
    Ok(CouplingPair {
        left: to_move(&args[0])?,
        right: to_move(&args[1])?,
        child: args.get(2).map(to_node).transpose()?,
    })
}

fn to_move(s: &Sexp) -> Result<CertMove, CertParseError> {
    let (tag, args) = head(s)?;
    let line = s.line();
    match (tag, args) {
        ("act", [Sexp::Atom(a, _), Sexp::Str(q, _)]) => {
            let mut cs = a.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if Alphabet::is_letter_char(c) => {
                    Ok(CertMove::Act(c, q.clone()))
                }
                _ => Err(err(line, format!("bad letter {a:?}"))),
            }
        }
        ("out", [Sexp::Atom(v, _)]) => v
            .strip_prefix('v')
            .and_then(|d| d.parse::<u32>().ok())
            .filter(|&i| i >= 1)
            .map(|i| CertMove::Out(Var::new(i)))
            .ok_or_else(|| err(line, format!("bad variable {v:?}"))),
        _ => Err(err(line, "expected (act LETTER \"STATE\") or (out VAR)")),
    }
}
