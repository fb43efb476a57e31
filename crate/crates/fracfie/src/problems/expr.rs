//! A small arithmetic expression language for problem files.
//!
//! Grammar (loosest to tightest binding): `+ -`, `* /`, unary `-`, `^`
//! (right-associative), atoms. Atoms are numeric literals, the variables
//! `xi`, `y`, `r`, the constant `pi`, parenthesized expressions, and the
//! functions `sqrt`, `exp`, `sin`, `cos`, `abs`, `gamma`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Error)]
#[error("syntax error at byte {offset}: found {found}, expected {}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, Error)]
#[error("evaluation error at byte {offset}: {message}")]
pub struct EvalError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Xi,
    Y,
    R,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::Xi => "xi",
            Var::Y => "y",
            Var::R => "r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Sin,
    Cos,
    Abs,
    Gamma,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Num(f64),
    Var(Var),
    Pi,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A parsed expression; every node keeps its source byte offset so
/// evaluation errors can point back into the original string.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub offset: usize,
}

/// Variable bindings for evaluation; unbound variables referenced by the
/// expression raise an evaluation error.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env {
    pub xi: Option<f64>,
    pub y: Option<f64>,
    pub r: Option<f64>,
}

impl Env {
    pub fn xi_y(xi: f64, y: f64) -> Self {
        Env {
            xi: Some(xi),
            y: Some(y),
            r: None,
        }
    }

    pub fn r(r: f64) -> Self {
        Env {
            xi: None,
            y: None,
            r: Some(r),
        }
    }
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<f64, EvalError> {
        let err = |message: String| EvalError {
            offset: self.offset,
            message,
        };
        match &self.kind {
            ExprKind::Num(v) => Ok(*v),
            ExprKind::Pi => Ok(std::f64::consts::PI),
            ExprKind::Var(v) => {
                let bound = match v {
                    Var::Xi => env.xi,
                    Var::Y => env.y,
                    Var::R => env.r,
                };
                bound.ok_or_else(|| err(format!("variable {} is not bound here", v.name())))
            }
            ExprKind::Neg(inner) => Ok(-inner.eval(env)?),
            ExprKind::Binary(op, a, b) => {
                let x = a.eval(env)?;
                let y = b.eval(env)?;
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        if y == 0.0 {
                            Err(err("division by zero".into()))
                        } else {
                            Ok(x / y)
                        }
                    }
                    BinOp::Pow => {
                        if x < 0.0 && y.fract() != 0.0 {
                            Err(err(format!(
                                "negative base {x} with non-integer exponent {y}"
                            )))
                        } else {
                            Ok(x.powf(y))
                        }
                    }
                }
            }
            ExprKind::Call(f, arg) => {
                let x = arg.eval(env)?;
                match f {
                    Func::Sqrt => {
                        if x < 0.0 {
                            Err(err(format!("sqrt of negative value {x}")))
                        } else {
                            Ok(x.sqrt())
                        }
                    }
                    Func::Exp => Ok(x.exp()),
                    Func::Sin => Ok(x.sin()),
                    Func::Cos => Ok(x.cos()),
                    Func::Abs => Ok(x.abs()),
                    Func::Gamma => crate::special::gamma(x).map_err(|e| err(e.to_string())),
                }
            }
        }
    }

    /// Variables referenced anywhere in the expression.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match &self.kind {
            ExprKind::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            ExprKind::Neg(e) | ExprKind::Call(_, e) => e.collect_vars(out),
            ExprKind::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ExprKind::Num(_) | ExprKind::Pi => {}
        }
    }

    /// Structural equality ignoring source offsets.
    pub fn structurally_eq(&self, other: &Expr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Num(a), ExprKind::Num(b)) => a == b || (a.is_nan() && b.is_nan()),
            (ExprKind::Var(a), ExprKind::Var(b)) => a == b,
            (ExprKind::Pi, ExprKind::Pi) => true,
            (ExprKind::Neg(a), ExprKind::Neg(b)) => a.structurally_eq(b),
            (ExprKind::Binary(o1, a1, b1), ExprKind::Binary(o2, a2, b2)) => {
                o1 == o2 && a1.structurally_eq(a2) && b1.structurally_eq(b2)
            }
            (ExprKind::Call(f1, a1), ExprKind::Call(f2, a2)) => f1 == f2 && a1.structurally_eq(a2),
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            ExprKind::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            ExprKind::Neg(_) => 3,
            ExprKind::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

/// Canonical printer; `parse(print(e))` is structurally equal to `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.print(f, 0)
    }
}

impl Expr {
    fn print(&self, f: &mut fmt::Formatter<'_>, parent_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < parent_prec;
        if parens {
            write!(f, "(")?;
        }
        match &self.kind {
            ExprKind::Num(v) => {
                if *v < 0.0 {
                    // keep negative literals reparseable as unary minus
                    write!(f, "(-{})", -v)?;
                } else {
                    write!(f, "{v}")?;
                }
            }
            ExprKind::Var(v) => write!(f, "{}", v.name())?,
            ExprKind::Pi => write!(f, "pi")?,
            ExprKind::Neg(inner) => {
                write!(f, "-")?;
                inner.print(f, prec)?;
            }
            ExprKind::Binary(op, a, b) => {
                let (sym, right_bump) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 1),
                    BinOp::Div => ("/", 1),
                    BinOp::Pow => ("^", 0),
                };
                // left-associative ops need the right child parenthesized at
                // equal precedence; right-associative '^' the opposite
                let left_prec = if *op == BinOp::Pow { prec + 1 } else { prec };
                let right_prec = prec + right_bump;
                a.print(f, left_prec)?;
                write!(f, " {sym} ")?;
                b.print(f, right_prec)?;
            }
            ExprKind::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.print(f, 0)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expression()?;
    if parser.pos < parser.tokens.len() - 1 {
        let tok = &parser.tokens[parser.pos];
        return Err(ParseError {
            offset: tok.offset,
            found: tok.describe(),
            expected: vec!["end of input".into(), "operator".into()],
        });
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    offset: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.kind {
            TokKind::Num(v) => format!("number {v}"),
            TokKind::Ident(s) => format!("identifier {s:?}"),
            TokKind::Plus => "'+'".into(),
            TokKind::Minus => "'-'".into(),
            TokKind::Star => "'*'".into(),
            TokKind::Slash => "'/'".into(),
            TokKind::Caret => "'^'".into(),
            TokKind::LParen => "'('".into(),
            TokKind::RParen => "')'".into(),
            TokKind::Eof => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let offset = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push(Token { kind: TokKind::Plus, offset });
                i += 1;
            }
            '-' => {
                out.push(Token { kind: TokKind::Minus, offset });
                i += 1;
            }
            '*' => {
                out.push(Token { kind: TokKind::Star, offset });
                i += 1;
            }
            '/' => {
                out.push(Token { kind: TokKind::Slash, offset });
                i += 1;
            }
            '^' => {
                out.push(Token { kind: TokKind::Caret, offset });
                i += 1;
            }
            '(' => {
                out.push(Token { kind: TokKind::LParen, offset });
                i += 1;
            }
            ')' => {
                out.push(Token { kind: TokKind::RParen, offset });
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // exponent suffix like 1e-3
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| ParseError {
                    offset: start,
                    found: format!("{text:?}"),
                    expected: vec!["numeric literal".into()],
                })?;
                out.push(Token {
                    kind: TokKind::Num(value),
                    offset: start,
                });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                out.push(Token {
                    kind: TokKind::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            other => {
                return Err(ParseError {
                    offset,
                    found: format!("{other:?}"),
                    expected: vec![
                        "number".into(),
                        "identifier".into(),
                        "operator".into(),
                        "parenthesis".into(),
                    ],
                });
            }
        }
    }
    out.push(Token {
        kind: TokKind::Eof,
        offset: bytes.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn expression(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().kind {
                TokKind::Plus => BinOp::Add,
                TokKind::Minus => BinOp::Sub,
                _ => break,
            };
            let offset = self.advance().offset;
            let rhs = self.term()?;
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokKind::Star => BinOp::Mul,
                TokKind::Slash => BinOp::Div,
                _ => break,
            };
            let offset = self.advance().offset;
            let rhs = self.unary()?;
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().kind == TokKind::Minus {
            let offset = self.advance().offset;
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                offset,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().kind == TokKind::Caret {
            let offset = self.advance().offset;
            // right-associative; the exponent may carry a unary minus
            let exponent = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
                offset,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let tok = self.advance();
        match tok.kind {
            TokKind::Num(v) => Ok(Expr {
                kind: ExprKind::Num(v),
                offset: tok.offset,
            }),
            TokKind::LParen => {
                let inner = self.expression()?;
                let close = self.advance();
                if close.kind != TokKind::RParen {
                    return Err(ParseError {
                        offset: close.offset,
                        found: close.describe(),
                        expected: vec!["')'".into()],
                    });
                }
                Ok(inner)
            }
            TokKind::Ident(name) => match name.as_str() {
                "xi" => Ok(Expr {
                    kind: ExprKind::Var(Var::Xi),
                    offset: tok.offset,
                }),
                "y" => Ok(Expr {
                    kind: ExprKind::Var(Var::Y),
                    offset: tok.offset,
                }),
                "r" => Ok(Expr {
                    kind: ExprKind::Var(Var::R),
                    offset: tok.offset,
                }),
                "pi" => Ok(Expr {
                    kind: ExprKind::Pi,
                    offset: tok.offset,
                }),
                "sqrt" | "exp" | "sin" | "cos" | "abs" | "gamma" => {
                    let func = match name.as_str() {
                        "sqrt" => Func::Sqrt,
                        "exp" => Func::Exp,
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "abs" => Func::Abs,
                        _ => Func::Gamma,
                    };
                    let open = self.advance();
                    if open.kind != TokKind::LParen {
                        return Err(ParseError {
                            offset: open.offset,
                            found: open.describe(),
                            expected: vec!["'('".into()],
                        });
                    }
                    let arg = self.expression()?;
                    let close = self.advance();
                    if close.kind != TokKind::RParen {
                        return Err(ParseError {
                            offset: close.offset,
                            found: close.describe(),
                            expected: vec!["')'".into()],
                        });
                    }
                    Ok(Expr {
                        kind: ExprKind::Call(func, Box::new(arg)),
                        offset: tok.offset,
                    })
                }
                other => Err(ParseError {
                    offset: tok.offset,
                    found: format!("identifier {other:?}"),
                    expected: vec![
                        "xi".into(),
                        "y".into(),
                        "r".into(),
                        "pi".into(),
                        "function name".into(),
                    ],
                }),
            },
            _ => Err(ParseError {
                offset: tok.offset,
                found: tok.describe(),
                expected: vec!["number".into(), "identifier".into(), "'('".into(), "'-'".into()],
            }),
        }
    }
}
