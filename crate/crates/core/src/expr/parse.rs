//! Recursive-descent parser for the field-definition language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `ident` is a coordinate name or one of [`FUNCTION_NAMES`]. Numbers are
//! decimal literals with an optional exponent. Whitespace is insignificant.
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`.

use thiserror::Error;

use super::{Expr, Kind};

pub const FUNCTION_NAMES: [&str; 5] = ["sin", "cos", "exp", "ln", "sqrt"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{function}` takes {expected} argument(s), found {found} (offset {offset})")]
    Arity {
        function: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                offset: start,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a [String],
}

/// Parses `text` against the given coordinate names (their order fixes the
/// coordinate indices). The result is the verbatim syntax tree: no folding.
pub fn parse(text: &str, coordinate_names: &[String]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        names: coordinate_names,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => Err(p.unexpected(t.clone(), "expected an operator or end of input")),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, t: Tok, hint: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("unexpected {}; {hint}", t.describe()),
        }
    }

    fn expect(&mut self, want: Tok, hint: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(self.peek().clone(), hint))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let kind: fn(Expr, Expr) -> Kind = match self.peek() {
                Tok::Plus => Kind::Add,
                Tok::Minus => Kind::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::from_kind(kind(lhs, rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let kind: fn(Expr, Expr) -> Kind = match self.peek() {
                Tok::Star => Kind::Mul,
                Tok::Slash => Kind::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::from_kind(kind(lhs, rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.factor()?;
            return Ok(Expr::from_kind(Kind::Negate(inner)));
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let at = self.offset();
        match self.bump() {
            (Tok::Num(v), _) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                let k = v as i32;
                Ok(Expr::from_kind(Kind::Pow(base, if negative { -k } else { k })))
            }
            (t, _) => Err(ParseError::Syntax {
                offset: at,
                message: format!("expected an integer exponent, found {}", t.describe()),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::constant(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "expected `)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(i) = self.names.iter().position(|n| *n == name) {
                    return Ok(Expr::coord(i));
                }
                if !FUNCTION_NAMES.contains(&name.as_str()) {
                    return Err(ParseError::UnknownIdentifier { name, offset: at });
                }
                self.call(name, at)
            }
            t => {
                // Report at the offending token, not the one after it.
                self.pos -= usize::from(t != Tok::End);
                Err(self.unexpected(t, "expected a number, identifier or `(`"))
            }
        }
    }

    fn call(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, &format!("`{name}` must be followed by `(`"))?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.expr()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.expr()?);
            }
        }
        self.expect(Tok::RParen, "expected `)` closing the argument list")?;
        if args.len() != 1 {
            return Err(ParseError::Arity {
                function: name,
                expected: 1,
                found: args.len(),
                offset: at,
            });
        }
        let a = args.pop().expect("one argument");
        Ok(Expr::from_kind(match name.as_str() {
            "sin" => Kind::Sin(a),
            "cos" => Kind::Cos(a),
            "exp" => Kind::Exp(a),
            "ln" => Kind::Ln(a),
            _ => Kind::Sqrt(a),
        }))
    }
}
