use thiserror::Error;

use super::{DiagTerm, Wire, WireWord};
use crate::expr::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {pos}")]
pub struct TermParseError {
    pub pos: usize,
    pub message: String,
}

/// Parses `t ::= atom | t ';' t | t '*' t` where `*` binds tighter than `;`
/// and both associate to the left.
pub fn parse_term(text: &str) -> Result<DiagTerm, TermParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let t = p.seq()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(format!("unexpected {:?}", p.src[p.pos] as char)));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: String) -> TermParseError {
        TermParseError {
            pos: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), TermParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected {:?}", c as char)))
        }
    }

    fn seq(&mut self) -> Result<DiagTerm, TermParseError> {
        let mut acc = self.tensor()?;
        while self.eat(b';') {
            acc = DiagTerm::seq(acc, self.tensor()?);
        }
        Ok(acc)
    }

    fn tensor(&mut self) -> Result<DiagTerm, TermParseError> {
        let mut acc = self.atom()?;
        while self.eat(b'*') {
            acc = DiagTerm::tensor(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<DiagTerm, TermParseError> {
        if self.eat(b'(') {
            let t = self.seq()?;
            self.expect(b')')?;
            return Ok(t);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_lowercase() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let t = match word {
            "copy" => DiagTerm::Copy,
            "del" => DiagTerm::Del,
            "merge" => DiagTerm::Merge,
            "gen" => DiagTerm::Gen,
            "cap" => DiagTerm::Cap,
            "cup" => DiagTerm::Cup,
            "act" => {
                self.expect(b'(')?;
                self.skip_ws();
                let c = self.src.get(self.pos).map(|&b| b as char);
                match c {
                    Some(c) if Alphabet::is_letter_char(c) => self.pos += 1,
                    _ => return Err(self.err("expected a letter".into())),
                }
                self.expect(b')')?;
                DiagTerm::Act(c.expect("checked above"))
            }
            "id" => {
                self.expect(b'(')?;
                let w = self.wires();
                self.expect(b')')?;
                DiagTerm::Id(w)
            }
            "sym" => {
                self.expect(b'(')?;
                let x = self.wires();
                self.expect(b',')?;
                let y = self.wires();
                self.expect(b')')?;
                DiagTerm::Sym(x, y)
            }
            "" => {
                return Err(match self.src.get(self.pos) {
                    Some(&b) => self.err(format!("unexpected {:?}", b as char)),
                    None => self.err("unexpected end of input".into()),
                })
            }
            other => {
                self.pos = start;
                return Err(self.err(format!("unknown generator {other:?}")));
            }
        };
        Ok(t)
    }

    fn wires(&mut self) -> WireWord {
        let mut w = Vec::new();
        loop {
            self.skip_ws();
            match self.src.get(self.pos) {
                Some(b'>') => w.push(Wire::R),
                Some(b'<') => w.push(Wire::L),
                _ => return WireWord(w),
            }
            self.pos += 1;
        }
    }
}
