//! Lexer and Pratt parser.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{BinOp, Constant, Expr, Func, ParseError, ParseErrorKind, Var};

/// Maximum depth of the parsed tree. Deeper inputs are rejected so that
/// evaluation and printing cannot exhaust the stack.
pub const MAX_DEPTH: usize = 256;

const OPERAND: &[&str] = &["number", "x", "t", "pi", "e", "function", "(", "-"];
const OPERATOR: &[&str] = &["+", "-", "*", "/", "^", "end of input"];

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Num(f64),
    Ident(&'a str),
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

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
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

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(usize, Tok<'a>), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(start) else {
            return Ok((start, Tok::End));
        };
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
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((start, tok));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = &self.src[start..end];
            self.pos = end;
            return match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok((start, Tok::Num(v))),
                _ => Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::InvalidNumber(text.to_string()),
                }),
            };
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((start, Tok::Ident(&self.src[start..end])));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(ParseError {
            offset: start,
            kind: ParseErrorKind::Unexpected {
                found: format!("character {ch:?}"),
                expected: OPERAND.to_vec(),
            },
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok<'a>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (at, tok) = self.lexer.next()?;
        self.at = at;
        self.tok = tok;
        Ok(())
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.at,
            kind: ParseErrorKind::Unexpected {
                found: self.tok.describe(),
                expected: expected.to_vec(),
            },
        }
    }

    fn too_deep(&self) -> ParseError {
        ParseError {
            offset: self.at,
            kind: ParseErrorKind::TooDeep,
        }
    }

    fn expect(&mut self, tok: Tok<'static>, name: &'static str) -> Result<(), ParseError> {
        if self.tok == tok {
            self.bump()
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    /// Returns the tree together with its depth.
    fn expr(&mut self, min_bp: u8, depth: usize) -> Result<(Expr, usize), ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.too_deep());
        }
        let (mut lhs, mut lhs_depth) = self.prefix(depth)?;
        loop {
            let (op, lbp, rbp) = match self.tok {
                Tok::Plus => (BinOp::Add, 1, 2),
                Tok::Minus => (BinOp::Sub, 1, 2),
                Tok::Star => (BinOp::Mul, 3, 4),
                Tok::Slash => (BinOp::Div, 3, 4),
                Tok::Caret => (BinOp::Pow, 7, 6),
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.bump()?;
            let (rhs, rhs_depth) = self.expr(rbp, depth + 1)?;
            let d = 1 + lhs_depth.max(rhs_depth);
            if d > MAX_DEPTH {
                return Err(self.too_deep());
            }
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
            lhs_depth = d;
        }
        Ok((lhs, lhs_depth))
    }

    fn prefix(&mut self, depth: usize) -> Result<(Expr, usize), ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok((Expr::Num(v), 1))
            }
            Tok::Minus => {
                self.bump()?;
                let literal = matches!(self.tok, Tok::Num(_));
                let (e, d) = self.expr(5, depth + 1)?;
                if d + 1 > MAX_DEPTH {
                    return Err(self.too_deep());
                }
                match e {
                    // a minus sign written directly on a literal is part of it
                    Expr::Num(v) if literal => Ok((Expr::Num(-v), 1)),
                    e => Ok((Expr::Neg(Box::new(e)), d + 1)),
                }
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr(0, depth + 1)?;
                self.expect(Tok::RParen, ")")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                let leaf = match name {
                    "x" => Some(Expr::Var(Var::X)),
                    "t" => Some(Expr::Var(Var::T)),
                    "pi" => Some(Expr::Const(Constant::Pi)),
                    "e" => Some(Expr::Const(Constant::E)),
                    _ => None,
                };
                if let Some(leaf) = leaf {
                    return Ok((leaf, 1));
                }
                let Some(func) = Func::from_name(name) else {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                    });
                };
                self.expect(Tok::LParen, "(")?;
                let mut args = Vec::new();
                let mut max_d = 0;
                loop {
                    let (a, d) = self.expr(0, depth + 1)?;
                    args.push(a);
                    max_d = max_d.max(d);
                    match self.tok {
                        Tok::Comma => self.bump()?,
                        Tok::RParen => {
                            self.bump()?;
                            break;
                        }
                        _ => return Err(self.unexpected(&[",", ")", "+", "-", "*", "/", "^"])),
                    }
                }
                if args.len() != func.arity() {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::WrongArity {
                            func: func.name(),
                            expected: func.arity(),
                            found: args.len(),
                        },
                    });
                }
                if max_d + 1 > MAX_DEPTH {
                    return Err(self.too_deep());
                }
                Ok((Expr::Call(func, args), max_d + 1))
            }
            _ => Err(self.unexpected(OPERAND)),
        }
    }
}

/// Parse an expression from text.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexer: Lexer { src, pos: 0 },
        tok: Tok::End,
        at: 0,
    };
    p.bump()?;
    if p.tok == Tok::End {
        return Err(ParseError {
            offset: p.at,
            kind: ParseErrorKind::Empty,
        });
    }
    let (e, _) = p.expr(0, 0)?;
    if p.tok != Tok::End {
        let mut expected = vec![];
        expected.extend_from_slice(OPERATOR);
        return Err(p.unexpected(&expected));
    }
    Ok(e)
}

/// Parse arbitrary bytes. Invalid UTF-8 is an error, never a panic.
pub fn parse_bytes(src: &[u8]) -> Result<Expr, ParseError> {
    match core::str::from_utf8(src) {
        Ok(s) => parse(s),
        Err(e) => Err(ParseError {
            offset: e.valid_up_to(),
            kind: ParseErrorKind::InvalidUtf8,
        }),
    }
}
