use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Chart, Move, Prechart};
use crate::expr::{Alphabet, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartParseError {
    #[error("line {line}: unknown directive {word:?}")]
    UnknownDirective { line: usize, word: String },
    #[error("line {line}: wrong number of fields")]
    Arity { line: usize },
    #[error("line {line}: undeclared state {name:?}")]
    UndeclaredState { line: usize, name: String },
    #[error("line {line}: state {name:?} declared twice")]
    DuplicateState { line: usize, name: String },
    #[error("line {line}: bad letter {word:?}")]
    BadLetter { line: usize, word: String },
    #[error("line {line}: letter {letter:?} is not in the alphabet")]
    UndeclaredLetter { line: usize, letter: char },
    #[error("line {line}: bad variable {word:?}")]
    BadVar { line: usize, word: String },
    #[error("no start state given")]
    MissingStart,
    #[error("line {line}: start given twice")]
    DuplicateStart { line: usize },
}

pub(super) fn print_chart(c: &Chart) -> String {
    let p = c.prechart();
    let mut s = String::new();
    let letters: Vec<String> = p.alphabet().iter().map(String::from).collect();
    let _ = writeln!(s, "alphabet {}", letters.join(" "));
    for q in p.states() {
        let _ = writeln!(s, "state q{q}");
    }
    let _ = writeln!(s, "start q{}", c.start());
    for q in p.states() {
        for m in p.beta(q) {
            match m {
                Move::Act(a, t) => {
                    let _ = writeln!(s, "trans q{q} {a} q{t}");
                }
                Move::Out(v) => {
                    let _ = writeln!(s, "out q{q} {v}");
                }
            }
        }
    }
    s
}

/// Reads the line-based chart format. Without an `alphabet` line, letters
/// are accepted as they appear.
pub fn parse_chart(text: &str) -> Result<Chart, ChartParseError> {
    let mut p = Prechart::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut alphabet: Option<Alphabet> = None;
    let mut start = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = fields.split_first() else {
            continue;
        };
        let state = |name: &str| {
            names
                .get(name)
                .copied()
                .ok_or_else(|| ChartParseError::UndeclaredState {
                    line,
                    name: name.to_string(),
                })
        };
        match head {
            "alphabet" => {
                let mut alpha = Alphabet::default();
                for w in rest {
                    alpha.insert(letter(w, line)?);
                }
                alphabet = Some(alpha);
            }
            "state" => {
                let [name] = rest else {
                    return Err(ChartParseError::Arity { line });
                };
                if names.contains_key(*name) {
                    return Err(ChartParseError::DuplicateState {
                        line,
                        name: name.to_string(),
                    });
                }
                let q = p.add_state(*name);
                names.insert(name.to_string(), q);
            }
            "start" => {
                let [name] = rest else {
                    return Err(ChartParseError::Arity { line });
                };
                if start.is_some() {
                    return Err(ChartParseError::DuplicateStart { line });
                }
                start = Some(state(name)?);
            }
            "trans" => {
                let [from, a, to] = rest else {
                    return Err(ChartParseError::Arity { line });
                };
                let a = letter(a, line)?;
                if let Some(alpha) = &alphabet {
                    if !alpha.contains(a) {
                        return Err(ChartParseError::UndeclaredLetter { line, letter: a });
                    }
                }
                let (from, to) = (state(from)?, state(to)?);
                p.add_trans(from, a, to);
            }
            "out" => {
                let [q, v] = rest else {
                    return Err(ChartParseError::Arity { line });
                };
                let q = state(q)?;
                p.add_out(q, var(v, line)?);
            }
            other => {
                return Err(ChartParseError::UnknownDirective {
                    line,
                    word: other.to_string(),
                })
            }
        }
    }
    if let Some(alpha) = &alphabet {
        p.extend_alphabet(alpha);
    }
    let start = start.ok_or(ChartParseError::MissingStart)?;
    Ok(Chart::new(p, start))
}

fn letter(w: &str, line: usize) -> Result<char, ChartParseError> {
    let mut cs = w.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) if Alphabet::is_letter_char(c) => Ok(c),
        _ => Err(ChartParseError::BadLetter {
            line,
            word: w.to_string(),
        }),
    }
}

fn var(w: &str, line: usize) -> Result<Var, ChartParseError> {
    w.strip_prefix('v')
        .and_then(|d| d.parse::<u32>().ok())
        .filter(|&i| i >= 1)
        .map(Var::new)
        .ok_or_else(|| ChartParseError::BadVar {
            line,
            word: w.to_string(),
        })
}
