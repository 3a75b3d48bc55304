//! Recursive descent parser for integrand text.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'sqrt'
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right, so
//! `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`. Exponents may not contain `x`.

use rug::{Integer, Rational};
use thiserror::Error;

use super::Expr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedEnd,
    UnexpectedChar(char),
    UnknownIdentifier(String),
    UnbalancedParen,
    MalformedNumber,
    VariableExponent,
    TrailingInput,
}

/// Syntax error at a byte offset into the source text.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::Empty => f.write_str("empty expression"),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::UnbalancedParen => f.write_str("unbalanced parenthesis"),
            ParseErrorKind::MalformedNumber => f.write_str("malformed number"),
            ParseErrorKind::VariableExponent => f.write_str("exponent must not contain x"),
            ParseErrorKind::TrailingInput => f.write_str("unexpected trailing input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn error(offset: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { offset, kind }
}

/// Parses a decimal literal such as `12`, `0.25`, `.5` or `1e-3` exactly.
fn parse_number(text: &str, offset: usize) -> Result<Rational, ParseError> {
    let bad = || error(offset, ParseErrorKind::MalformedNumber);
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if exp.unsigned_abs() > 4096 {
        return Err(bad());
    }
    let digits: Integer = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let factor = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    Ok(if scale >= 0 {
        Rational::from(digits * factor)
    } else {
        Rational::from((digits, factor))
    })
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((start, tok));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part, only when followed by a digit or sign+digit
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
            out.push((start, Token::Number(parse_number(&src[start..i], start)?)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(error(start, ParseErrorKind::UnexpectedChar(ch)));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exp = self.unary()?;
        if exp.depends_on_x() {
            return Err(error(at, ParseErrorKind::VariableExponent));
        }
        Ok(Expr::Pow(Box::new(base), Box::new(exp)))
    }

    fn parenthesized(&mut self) -> Result<Expr, ParseError> {
        let inner = self.expr()?;
        match self.bump() {
            Some(Token::RParen) => Ok(inner),
            Some(_) => Err(error(
                self.tokens[self.pos - 1].0,
                ParseErrorKind::UnbalancedParen,
            )),
            None => Err(error(self.end, ParseErrorKind::UnbalancedParen)),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            None => Err(error(at, ParseErrorKind::UnexpectedEnd)),
            Some(Token::Number(q)) => Ok(Expr::Const(q)),
            Some(Token::LParen) => self.parenthesized(),
            Some(Token::Ident(name)) => match name.as_str() {
                "x" => Ok(Expr::Var),
                "pi" => Ok(Expr::Pi),
                "sin" | "cos" | "sqrt" => {
                    let open = self.offset();
                    match self.bump() {
                        Some(Token::LParen) => {}
                        Some(_) => {
                            return Err(error(
                                open,
                                ParseErrorKind::UnexpectedChar(char_at(self, open)),
                            ))
                        }
                        None => return Err(error(open, ParseErrorKind::UnexpectedEnd)),
                    }
                    let arg = Box::new(self.parenthesized()?);
                    Ok(match name.as_str() {
                        "sin" => Expr::Sin(arg),
                        "cos" => Expr::Cos(arg),
                        _ => Expr::Sqrt(arg),
                    })
                }
                _ => Err(error(at, ParseErrorKind::UnknownIdentifier(name))),
            },
            Some(Token::RParen) => Err(error(at, ParseErrorKind::UnbalancedParen)),
            Some(_) => Err(error(at, ParseErrorKind::UnexpectedChar(char_at(self, at)))),
        }
    }
}

fn char_at(parser: &Parser, at: usize) -> char {
    parser
        .tokens
        .iter()
        .find(|(o, _)| *o == at)
        .map(|(_, t)| match t {
            Token::Plus => '+',
            Token::Minus => '-',
            Token::Star => '*',
            Token::Slash => '/',
            Token::Caret => '^',
            Token::LParen => '(',
            Token::RParen => ')',
            Token::Number(_) => '0',
            Token::Ident(s) => s.chars().next().unwrap_or('?'),
        })
        .unwrap_or('?')
}

/// Parses integrand text into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(error(0, ParseErrorKind::Empty));
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        let at = parser.offset();
        let kind = if parser.peek() == Some(&Token::RParen) {
            ParseErrorKind::UnbalancedParen
        } else {
            ParseErrorKind::TrailingInput
        };
        return Err(error(at, kind));
    }
    Ok(e)
}
