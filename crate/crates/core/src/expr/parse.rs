//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := integer | ident | func '(' sum ')' | '(' sum ')'
//! func    := sqrt | exp | log | sin | cos
//! ```
//!
//! A quotient of two integer literals (`1/2`) folds into a single rational
//! constant, as does a negated literal.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{simplify, Expr, Var, VarKind, VarSpace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} (at byte {offset})")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: Vec<String>, found: String },
    UnknownIdentifier(String),
    NonIntegerExponent,
    ZeroDenominator,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "syntax error: expected one of {{{}}}, found {found}", expected.join(", "))
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::NonIntegerExponent => {
                f.write_str("exponent must be a constant integer (use sqrt for fractional powers)")
            }
            ParseErrorKind::ZeroDenominator => f.write_str("rational literal with zero denominator"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number `{n}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

const FUNCTIONS: [&str; 5] = ["sqrt", "exp", "log", "sin", "cos"];

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i].parse().expect("ascii digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let found = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Syntax {
                        expected: vec!["a token".into()],
                        found: format!("character {found:?}"),
                    },
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

/// Parsed node plus whether it is a bare numeric literal (eligible for
/// rational-literal folding).
struct Node {
    expr: Expr,
    literal: bool,
}

impl Node {
    fn plain(expr: Expr) -> Self {
        Node { expr, literal: false }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    space: &'a VarSpace,
}

pub(super) fn parse(src: &str, space: &VarSpace) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        space,
    };
    let e = p.sum()?;
    p.expect_end()?;
    Ok(e.expr)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: self.peek().to_string(),
            },
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]))
        }
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let first = self.product()?;
        let mut terms = vec![first];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.product()?;
                    terms.push(Node::plain(Expr::neg(rhs.expr)));
                }
                _ => break,
            }
        }
        if terms.len() == 1 {
            return Ok(terms.pop().unwrap());
        }
        Ok(Node::plain(Expr::Add(terms.into_iter().map(|t| t.expr).collect())))
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Node::plain(match acc.expr {
                        Expr::Mul(mut fs) if !acc.literal => {
                            fs.push(rhs.expr);
                            Expr::Mul(fs)
                        }
                        e => Expr::Mul(vec![e, rhs.expr]),
                    });
                }
                Tok::Slash => {
                    let at = self.offset();
                    self.bump();
                    let rhs = self.unary()?;
                    acc = match (acc.literal, rhs.literal, &acc.expr, &rhs.expr) {
                        (true, true, Expr::Const(p), Expr::Const(q)) => {
                            if q.is_zero() {
                                return Err(ParseError {
                                    offset: at,
                                    kind: ParseErrorKind::ZeroDenominator,
                                });
                            }
                            Node {
                                expr: Expr::Const(p / q),
                                literal: true,
                            }
                        }
                        _ => Node::plain(Expr::div(acc.expr, rhs.expr)),
                    };
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(match inner.expr {
                Expr::Const(c) if inner.literal => Node {
                    expr: Expr::Const(-c),
                    literal: true,
                },
                e => Node::plain(Expr::neg(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.unary()?;
        let n = simplify::simplify(&exponent.expr)
            .as_const()
            .filter(|c| c.is_integer())
            .and_then(|c| c.to_integer().to_i64())
            .ok_or(ParseError {
                offset: at,
                kind: ParseErrorKind::NonIntegerExponent,
            })?;
        Ok(Node::plain(Expr::pow(base.expr, n)))
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let at = self.offset();
        if !matches!(self.peek(), Tok::Num(_) | Tok::LParen | Tok::Ident(_)) {
            return Err(self.error(&["number", "identifier", "'('", "'-'"]));
        }
        match self.bump() {
            Tok::Num(n) => Ok(Node {
                expr: Expr::Const(BigRational::from_integer(n)),
                literal: true,
            }),
            Tok::LParen => {
                let inner = self.sum()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["')'"]));
                }
                self.bump();
                Ok(Node::plain(inner.expr))
            }
            Tok::Ident(name) => {
                if FUNCTIONS.contains(&name.as_str()) {
                    if *self.peek() != Tok::LParen {
                        return Err(self.error(&["'('"]));
                    }
                    self.bump();
                    let arg = self.sum()?.expr;
                    if *self.peek() != Tok::RParen {
                        return Err(self.error(&["')'"]));
                    }
                    self.bump();
                    let e = match name.as_str() {
                        "sqrt" => Expr::sqrt(arg),
                        "exp" => Expr::exp(arg),
                        "log" => Expr::log(arg),
                        "sin" => Expr::sin(arg),
                        _ => Expr::cos(arg),
                    };
                    return Ok(Node::plain(e));
                }
                let var = identifier(&name).filter(|v| self.space.contains(*v));
                match var {
                    Some(v) => Ok(Node::plain(Expr::Var(v))),
                    None => Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    }),
                }
            }
            _ => unreachable!("checked above"),
        }
    }
}

fn identifier(name: &str) -> Option<Var> {
    let mut chars = name.chars();
    let kind = match chars.next()? {
        'x' => VarKind::X,
        't' => VarKind::T,
        'z' => VarKind::Z,
        _ => return None,
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    let index = digits.parse().ok()?;
    Some(Var { kind, index })
}
