//! A small arithmetic expression language for one-parameter maps `F(lam, x)`.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor (('*'|'/') factor)* ;
//! factor := ('-')? power ;
//! power  := atom ('^' factor)? ;
//! atom   := NUMBER | 'x' | 'lam' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')' ;
//! FUNC   := 'exp' | 'log' | 'sin' | 'cos' | 'sqrt' | 'abs' ;
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative. Evaluation
//! goes through [`Jet`] arithmetic, so derivatives with respect to `x` (any
//! finite order) and `lam` (first order) are exact to rounding.

use crate::error::{DomainError, Error, Result};
use crate::jet::Jet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Lam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
    E,
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
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(NamedConst),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// True when the subtree contains no variable, i.e. it always evaluates
    /// to the same value. Used to route `^` to the constant-exponent paths.
    fn is_const(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) => a.is_const(),
            Expr::Binary(_, a, b) => a.is_const() && b.is_const(),
            Expr::Call(_, a) => a.is_const(),
        }
    }
}

/// A parsed map expression `F(lam, x)` together with its source text.
#[derive(Debug, Clone)]
pub struct MapExpr {
    ast: Expr,
    source: String,
}

// two maps are the same map when their trees agree, whatever the spelling
impl PartialEq for MapExpr {
    fn eq(&self, other: &Self) -> bool {
        self.ast == other.ast
    }
}

impl MapExpr {
    pub fn parse(source: &str) -> Result<MapExpr> {
        parse_with_x_alias(source, "x")
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluate with explicit jet seeds for both variables. The seeds must
    /// share one order. This is the composition primitive: passing a
    /// non-trivial jet for `x` expands `F` around that jet's value slot.
    pub fn eval_with(&self, lam: &Jet, x: &Jet) -> Result<Jet> {
        let out = eval_node(&self.ast, lam, x)?;
        if !out.is_finite() {
            return Err(DomainError::NonFinite.into());
        }
        Ok(out)
    }

    /// Jet of `F(lam, .)` at `x0`: coefficient `k` is the k-th x-derivative
    /// divided by `k!`.
    pub fn eval_jet(&self, lam: f64, x0: f64, order: usize) -> Result<Jet> {
        self.eval_with(&Jet::constant(lam, order), &Jet::variable(x0, order))
    }

    /// First derivative with respect to the parameter at `(lam, x0)`.
    pub fn eval_dlambda(&self, lam: f64, x0: f64) -> Result<f64> {
        let out = self.eval_with(&Jet::variable(lam, 1), &Jet::constant(x0, 1))?;
        Ok(out.derivative(1))
    }

    /// Plain recursive evaluation on `f64`, kept independent of the jet
    /// recurrences and structured so the two paths agree to a few ulps.
    pub fn eval_plain(&self, lam: f64, x: f64) -> Result<f64> {
        eval_plain_node(&self.ast, lam, x)
    }
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.ast, 0, f)
    }
}

// Precedence levels used by the renderer; higher binds tighter.
// 1: + -, 2: * /, 3: unary minus, 4: ^, 5: atom.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Num(v) if *v < 0.0 => 3,
        Expr::Binary(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn render(e: &Expr, min_level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let lv = level(e);
    if lv < min_level {
        f.write_str("(")?;
        render(e, 0, f)?;
        return f.write_str(")");
    }
    match e {
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Var(Var::X) => f.write_str("x"),
        Expr::Var(Var::Lam) => f.write_str("lam"),
        Expr::Const(NamedConst::Pi) => f.write_str("pi"),
        Expr::Const(NamedConst::E) => f.write_str("e"),
        Expr::Neg(a) => {
            f.write_str("-")?;
            render(a, 4, f)
        }
        Expr::Binary(op, a, b) => {
            let (sym, lhs, rhs) = match op {
                BinOp::Add => ("+", 1, 2),
                BinOp::Sub => ("-", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                // power base must be an atom; the exponent is a factor
                BinOp::Pow => ("^", 5, 3),
            };
            render(a, lhs, f)?;
            f.write_str(sym)?;
            render(b, rhs, f)
        }
        Expr::Call(func, a) => {
            f.write_str(func.name())?;
            f.write_str("(")?;
            render(a, 0, f)?;
            f.write_str(")")
        }
    }
}

fn eval_node(e: &Expr, lam: &Jet, x: &Jet) -> Result<Jet> {
    let order = x.order();
    Ok(match e {
        Expr::Num(v) => Jet::constant(*v, order),
        Expr::Var(Var::X) => x.clone(),
        Expr::Var(Var::Lam) => lam.clone(),
        Expr::Const(NamedConst::Pi) => Jet::constant(std::f64::consts::PI, order),
        Expr::Const(NamedConst::E) => Jet::constant(std::f64::consts::E, order),
        Expr::Neg(a) => eval_node(a, lam, x)?.neg(),
        Expr::Binary(op, a, b) => {
            let ja = eval_node(a, lam, x)?;
            match op {
                BinOp::Add => ja.add(&eval_node(b, lam, x)?),
                BinOp::Sub => ja.sub(&eval_node(b, lam, x)?),
                BinOp::Mul => ja.mul(&eval_node(b, lam, x)?),
                BinOp::Div => ja.div(&eval_node(b, lam, x)?)?,
                BinOp::Pow => {
                    if b.is_const() {
                        let c = eval_plain_node(b, 0.0, 0.0)?;
                        match as_small_int(c) {
                            Some(n) => ja.powi(n)?,
                            None => ja.pow_const(c)?,
                        }
                    } else {
                        ja.pow_jet(&eval_node(b, lam, x)?)?
                    }
                }
            }
        }
        Expr::Call(func, a) => {
            let ja = eval_node(a, lam, x)?;
            match func {
                Func::Exp => ja.exp(),
                Func::Log => ja.log()?,
                Func::Sin => ja.sin_cos().0,
                Func::Cos => ja.sin_cos().1,
                Func::Sqrt => ja.sqrt()?,
                Func::Abs => ja.abs()?,
            }
        }
    })
}

fn as_small_int(c: f64) -> Option<i64> {
    if c.is_finite() && c == c.round() && c.abs() <= 64.0 {
        Some(c as i64)
    } else {
        None
    }
}

fn eval_plain_node(e: &Expr, lam: f64, x: f64) -> Result<f64> {
    Ok(match e {
        Expr::Num(v) => *v,
        Expr::Var(Var::X) => x,
        Expr::Var(Var::Lam) => lam,
        Expr::Const(NamedConst::Pi) => std::f64::consts::PI,
        Expr::Const(NamedConst::E) => std::f64::consts::E,
        Expr::Neg(a) => -eval_plain_node(a, lam, x)?,
        Expr::Binary(op, a, b) => {
            let va = eval_plain_node(a, lam, x)?;
            match op {
                BinOp::Add => va + eval_plain_node(b, lam, x)?,
                BinOp::Sub => va - eval_plain_node(b, lam, x)?,
                BinOp::Mul => va * eval_plain_node(b, lam, x)?,
                BinOp::Div => {
                    let vb = eval_plain_node(b, lam, x)?;
                    if vb == 0.0 {
                        return Err(DomainError::DivisionByZero.into());
                    }
                    va / vb
                }
                BinOp::Pow => {
                    let vb = eval_plain_node(b, lam, x)?;
                    if b.is_const() {
                        match as_small_int(vb) {
                            // sequential product, mirroring Jet::powi
                            Some(n) => {
                                let m = n.unsigned_abs();
                                let mut acc = if m == 0 { 1.0 } else { va };
                                for _ in 1..m {
                                    acc *= va;
                                }
                                if n < 0 {
                                    if acc == 0.0 {
                                        return Err(DomainError::DivisionByZero.into());
                                    }
                                    1.0 / acc
                                } else {
                                    acc
                                }
                            }
                            None => {
                                if va < 0.0 || (va == 0.0 && vb <= 0.0) {
                                    return Err(DomainError::PowBranch.into());
                                }
                                va.powf(vb)
                            }
                        }
                    } else {
                        // mirror Jet::pow_jet: exp(b * log a)
                        if va <= 0.0 {
                            return Err(DomainError::PowBranch.into());
                        }
                        (vb * va.ln()).exp()
                    }
                }
            }
        }
        Expr::Call(func, a) => {
            let va = eval_plain_node(a, lam, x)?;
            match func {
                Func::Exp => va.exp(),
                Func::Log => {
                    if va <= 0.0 {
                        return Err(DomainError::LogNonpositive.into());
                    }
                    va.ln()
                }
                Func::Sin => va.sin(),
                Func::Cos => va.cos(),
                Func::Sqrt => {
                    if va < 0.0 {
                        return Err(DomainError::SqrtNegative.into());
                    }
                    va.sqrt()
                }
                Func::Abs => va.abs(),
            }
        }
    })
}

// ── Lexer and parser ───────────────────────────────────────────

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
}

struct Token {
    kind: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                let kind = match c {
                    b'+' => Tok::Plus,
                    b'-' => Tok::Minus,
                    b'*' => Tok::Star,
                    b'/' => Tok::Slash,
                    b'^' => Tok::Caret,
                    b'(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                toks.push(Token { kind, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j == i + 1 && bytes[i] == b'.' {
                    return Err(Error::Syntax {
                        offset: start,
                        message: "expected digits in number".into(),
                    });
                }
                // exponent part only when followed by digits (with optional sign)
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text = &src[i..j];
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("invalid number literal `{text}`"),
                })?;
                toks.push(Token {
                    kind: Tok::Num(value),
                    offset: start,
                });
                i = j;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                toks.push(Token {
                    kind: Tok::Ident(src[i..j].to_string()),
                    offset: start,
                });
                i = j;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    src_len: usize,
    x_alias: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src_len, |t| t.offset)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.kind);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&kind) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.power()?;
            Ok(Expr::Neg(Box::new(inner)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exponent = self.factor()?;
            Ok(Expr::Binary(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(*v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                if name == self.x_alias {
                    return Ok(Expr::Var(Var::X));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "lam" => Ok(Expr::Var(Var::Lam)),
                    "pi" => Ok(Expr::Const(NamedConst::Pi)),
                    "e" => Ok(Expr::Const(NamedConst::E)),
                    _ => {
                        if let Some(func) = Func::from_name(&name) {
                            self.expect(Tok::LParen, "`(` after function name")?;
                            let arg = self.expr()?;
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(Expr::Call(func, Box::new(arg)))
                        } else {
                            Err(Error::UnknownIdentifier { offset, name })
                        }
                    }
                }
            }
            _ => Err(Error::Syntax {
                offset,
                message: "expected a number, variable, function call, or `(`".into(),
            }),
        }
    }
}

/// Parse with an extra identifier accepted as an alias for `x` (used by the
/// CLI to accept synthetic set specs written in terms of `n`).
pub fn parse_with_x_alias(source: &str, alias: &str) -> Result<MapExpr> {
    if source.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        src_len: source.len(),
        x_alias: alias,
    };
    let ast = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(Error::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(MapExpr {
        ast,
        source: source.to_string(),
    })
}
