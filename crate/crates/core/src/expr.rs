//! Expression language for coordinate functions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' base)?
//! base   := NUMBER | COORD | FUNC '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! Coordinates are `x1..xn`. Exponents must be constant and are folded to a
//! number at parse time. A minus sign directly in front of a number literal
//! folds into the literal.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parsed expression tree. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: &'static str },
    #[error("coordinate {symbol} is outside a chart of dimension {dim}")]
    Dimension { symbol: String, dim: usize },
    #[error("{node} is undefined at {point:?}")]
    Domain { node: String, point: Vec<f64> },
}

/// Parses `text` for a chart of dimension `dim`.
pub fn parse_expression(text: &str, dim: usize) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(ExprError::Syntax { position: 0, expected: "expression" });
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("operator or end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn err(&self, expected: &'static str) -> ExprError {
        ExprError::Syntax { position: self.pos, expected }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8, what: &'static str) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let e = self.base()?;
            let k = e.constant_value().ok_or(ExprError::Syntax { position: at, expected: "constant exponent" })?;
            if !k.is_finite() {
                return Err(ExprError::Syntax { position: at, expected: "finite exponent" });
            }
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                match self.peek() {
                    Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Lit(-self.number()?)),
                    _ => Ok(Expr::Neg(Box::new(self.base()?))),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')', "')'")?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Lit(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("number, coordinate, function or '('")),
        }
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - b
        };
        let mut p = self.pos;
        let mut n = digits(&mut p);
        if p < s.len() && s[p] == b'.' {
            p += 1;
            n += digits(&mut p);
        }
        if n == 0 {
            return Err(self.err("digits"));
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) == 0 {
                self.pos = q;
                return Err(self.err("exponent digits"));
            }
            p = q;
        }
        let text = core::str::from_utf8(&s[start..p]).expect("ascii");
        let v: f64 = text.parse().map_err(|_| ExprError::Syntax { position: start, expected: "number" })?;
        if !v.is_finite() {
            return Err(ExprError::Syntax { position: start, expected: "finite number" });
        }
        self.pos = p;
        Ok(v)
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if let Some(f) = Func::from_name(word) {
            self.expect(b'(', "'(' after function name")?;
            let arg = self.expr()?;
            self.expect(b')', "')'")?;
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        let rest = word.strip_prefix('x').filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()));
        match rest {
            Some(r) => {
                let idx: usize = r.parse().unwrap_or(usize::MAX);
                if idx == 0 || idx > self.dim {
                    Err(ExprError::Dimension { symbol: word.to_string(), dim: self.dim })
                } else {
                    Ok(Expr::Coord(idx))
                }
            }
            None => {
                self.pos = start;
                Err(self.err("coordinate x<k> or function name"))
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(v) if v.is_sign_negative() => write!(f, "(-{})", -v),
            Expr::Lit(v) => write!(f, "{}", v),
            Expr::Coord(i) => write!(f, "x{}", i),
            Expr::Neg(e) => write!(f, "(-({}))", e),
            Expr::Call(func, e) => write!(f, "{}({})", func.name(), e),
            Expr::Bin(op, a, b) => {
                let c = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({} {} {})", a, c, b)
            }
            Expr::Pow(b, k) => {
                if k.is_sign_negative() {
                    write!(f, "(({})^(-{}))", b, -k)
                } else {
                    write!(f, "(({})^{})", b, k)
                }
            }
        }
    }
}

impl Expr {
    /// Value of a coordinate-free expression.
    pub fn constant_value(&self) -> Option<f64> {
        if self.max_coord() > 0 {
            return None;
        }
        self.eval_with(&[]).ok().map(|j| j.value())
    }

    /// Largest coordinate index used, 0 if none.
    pub fn max_coord(&self) -> usize {
        match self {
            Expr::Lit(_) => 0,
            Expr::Coord(i) => *i,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => e.max_coord(),
            Expr::Bin(_, a, b) => a.max_coord().max(b.max_coord()),
        }
    }

    /// Evaluates at `point` with coordinates seeded to the given order.
    pub fn eval_jet(&self, point: &[f64], order: u8) -> Result<Jet, ExprError> {
        self.eval_with(&Jet::seed(point, order))
    }

    /// Evaluates with coordinate `x_k` replaced by `inputs[k-1]`.
    ///
    /// This composes expressions, e.g. to pull a metric back along a map.
    pub fn eval_with(&self, inputs: &[Jet]) -> Result<Jet, ExprError> {
        let domain = |node: &Expr| ExprError::Domain {
            node: node.to_string(),
            point: inputs.iter().map(|j| j.value()).collect(),
        };
        Ok(match self {
            Expr::Lit(v) => Jet::constant(*v),
            Expr::Coord(i) => *inputs.get(*i - 1).ok_or_else(|| ExprError::Dimension {
                symbol: format!("x{}", i),
                dim: inputs.len(),
            })?,
            Expr::Neg(e) => -e.eval_with(inputs)?,
            Expr::Call(func, e) => {
                let u = e.eval_with(inputs)?;
                let v = u.value();
                let smooth = u.order() == 0 || v != 0.0;
                match func {
                    Func::Sqrt if v < 0.0 || !smooth => return Err(domain(self)),
                    Func::Log if v <= 0.0 => return Err(domain(self)),
                    Func::Sqrt => u.sqrt(),
                    Func::Log => u.ln(),
                    Func::Exp => u.exp(),
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                }
            }
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval_with(inputs)?, b.eval_with(inputs)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div if y.value() == 0.0 => return Err(domain(self)),
                    BinOp::Div => x / y,
                }
            }
            Expr::Pow(b, k) => {
                let u = b.eval_with(inputs)?;
                let ki = *k as i32;
                if ki as f64 == *k {
                    if ki < 0 && u.value() == 0.0 {
                        return Err(domain(self));
                    }
                    u.powi(ki)
                } else if u.value() > 0.0 {
                    u.powf(*k)
                } else {
                    return Err(domain(self));
                }
            }
        })
    }
}

/// Convenience: parse a list of expressions.
pub fn parse_all(texts: &[&str], dim: usize) -> Result<Vec<Expr>, ExprError> {
    texts.iter().map(|t| parse_expression(t, dim)).collect()
}
