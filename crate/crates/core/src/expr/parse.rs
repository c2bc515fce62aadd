use thiserror::Error;

use super::{Alphabet, Expr, Letter, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {pos}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    Unexpected(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {0:?}")]
    Expected(char),
    #[error("letter {0:?} is not in the declared alphabet")]
    UndeclaredLetter(Letter),
    #[error("malformed variable (expected v followed by a positive index)")]
    MalformedVar,
}

/// Parse with the alphabet inferred from the text.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, None).run()
}

/// Parse, rejecting letters outside `alphabet`.
pub fn parse_with_alphabet(text: &str, alphabet: &Alphabet) -> Result<Expr, ParseError> {
    Parser::new(text, Some(alphabet)).run()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    alphabet: Option<&'a Alphabet>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, alphabet: Option<&'a Alphabet>) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            alphabet,
        }
    }

    fn run(mut self) -> Result<Expr, ParseError> {
        let e = self.sum()?;
        self.skip_ws();
        match self.peek() {
            None => Ok(e),
            Some(c) => Err(self.err(ParseErrorKind::Unexpected(c))),
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            pos: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).map(|&b| b as char)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(self.err(ParseErrorKind::Expected(c))),
            None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('+') {
                return Ok(acc);
            }
            self.pos += 1;
            let rhs = self.unary()?;
            acc = Expr::sum(acc, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let Some(c) = self.peek() else {
            return Err(self.err(ParseErrorKind::UnexpectedEnd));
        };
        match c {
            '0' => {
                self.pos += 1;
                Ok(Expr::Zero)
            }
            '(' => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            'v' => Ok(Expr::Var(self.var()?)),
            'm' if self.src.get(self.pos + 1) == Some(&b'u') => {
                self.pos += 2;
                self.skip_ws();
                let v = self.var()?;
                self.expect('.')?;
                let body = self.sum()?;
                Ok(Expr::mu(v, body))
            }
            c if Alphabet::is_letter_char(c) => {
                if let Some(alpha) = self.alphabet {
                    if !alpha.contains(c) {
                        return Err(self.err(ParseErrorKind::UndeclaredLetter(c)));
                    }
                }
                self.pos += 1;
                self.expect('.')?;
                let body = self.unary()?;
                Ok(Expr::prefix(c, body))
            }
            c => Err(self.err(ParseErrorKind::Unexpected(c))),
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        let start = self.pos;
        if self.peek() != Some('v') {
            return Err(self.err(ParseErrorKind::MalformedVar));
        }
        self.pos += 1;
        let digits_from = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[digits_from..self.pos]).unwrap_or("");
        match digits.parse::<u32>() {
            Ok(i) if i >= 1 => Ok(Var::new(i)),
            _ => Err(ParseError {
                pos: start,
                kind: ParseErrorKind::MalformedVar,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(parse("0").unwrap(), Expr::Zero);
        assert_eq!(
            parse("mu v1.v1").unwrap(),
            Expr::mu(Var::new(1), Expr::var(1))
        );
    }

    #[test]
    fn nested_expression_shape() {
        let e = parse("a.(a.0 + b.mu v1.a.v1)+b.mu v1.a.v1").unwrap();
        let loop_a = Expr::mu(Var::new(1), Expr::prefix('a', Expr::var(1)));
        let expected = Expr::sum(
            Expr::prefix(
                'a',
                Expr::sum(Expr::prefix('a', Expr::Zero), Expr::prefix('b', loop_a.clone())),
            ),
            Expr::prefix('b', loop_a),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn mu_scope_extends_right() {
        let e = parse("mu v1.a.v1 + b.0").unwrap();
        assert!(matches!(e, Expr::Mu(..)));
        let sum = parse("a.0 + b.0 + c.0").unwrap();
        // left associative
        match sum {
            Expr::Sum(l, _) => assert!(matches!(*l, Expr::Sum(..))),
            _ => panic!(),
        }
    }

    #[test]
    fn reports_errors_with_positions() {
        let e = parse("a.0 + ").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);
        let e = parse("a.v0").unwrap_err();
        assert_eq!((e.pos, e.kind), (2, ParseErrorKind::MalformedVar));
        let e = parse("a.0 )").unwrap_err();
        assert_eq!((e.pos, e.kind), (4, ParseErrorKind::Unexpected(')')));
        let e = parse_with_alphabet("a.0 + c.0", &Alphabet::new(['a', 'b'])).unwrap_err();
        assert_eq!((e.pos, e.kind), (6, ParseErrorKind::UndeclaredLetter('c')));
        assert!(parse("A.0").is_err());
        assert!(parse("mu a.0").is_err());
    }

    #[test]
    fn letter_m_is_still_a_letter() {
        assert_eq!(parse("m.0").unwrap(), Expr::prefix('m', Expr::Zero));
    }
}
