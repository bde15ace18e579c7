//! Small arithmetic expression language for polynomial data.
//!
//! Grammar: numbers, identifiers, `+ - * / ^`, parentheses, implicit
//! multiplication (`2(g+1)`, `3z`), and the rising factorial `poch(x, k)`
//! with a constant non-negative integer `k`.

use crate::parampoly::{Bindings, ParamPoly};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("division by zero")]
    DivByZero,
    #[error("division by a non-constant polynomial")]
    NonPolynomial,
    #[error("exponent must be a constant integer")]
    BadExponent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Poch(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((st, Tok::Num(BigInt::from_str(&s[st..i]).unwrap())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'\'') {
                i += 1;
            }
            out.push((st, Tok::Ident(s[st..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError::Parse { pos: i, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ExprError> {
        Err(ExprError::Parse { pos: self.at(), msg: msg.to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')))
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if self.starts_factor() {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                // only known function names take an argument list; `b(b+4)` is a product
                if name == "poch" && self.eat('(') {
                    let a = self.expr()?;
                    if !self.eat(',') {
                        return self.err("expected ','");
                    }
                    let k = self.expr()?;
                    if !self.eat(')') {
                        return self.err("expected ')'");
                    }
                    Ok(Expr::Poch(Box::new(a), Box::new(k)))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            _ => self.err("expected a number, variable or '('"),
        }
    }
}

/// Target domain for expression evaluation.
trait Domain: Sized + Clone {
    fn num(r: &Rational) -> Self;
    fn var(name: &str, ctx: &Bindings) -> Result<Self, ExprError>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Result<Self, ExprError>;
    fn as_const(&self) -> Option<Rational>;
    fn one() -> Self {
        Self::num(&<Rational as One>::one())
    }
}

impl Domain for Rational {
    fn num(r: &Rational) -> Self {
        r.clone()
    }
    fn var(name: &str, ctx: &Bindings) -> Result<Self, ExprError> {
        ctx.get(name).cloned().ok_or_else(|| ExprError::Unbound(name.to_string()))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self, ExprError> {
        if o.is_zero() {
            Err(ExprError::DivByZero)
        } else {
            Ok(self / o)
        }
    }
    fn as_const(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Domain for ParamPoly {
    fn num(r: &Rational) -> Self {
        ParamPoly::constant(r.clone())
    }
    fn var(name: &str, ctx: &Bindings) -> Result<Self, ExprError> {
        Ok(match ctx.get(name) {
            Some(v) => ParamPoly::constant(v.clone()),
            None => ParamPoly::var(name),
        })
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self, ExprError> {
        match o.constant_value() {
            Some(c) if c.is_zero() => Err(ExprError::DivByZero),
            Some(c) => Ok(self.scale(&c.recip())),
            None => Err(ExprError::NonPolynomial),
        }
    }
    fn as_const(&self) -> Option<Rational> {
        self.constant_value()
    }
}

fn const_int(r: Option<Rational>) -> Result<i64, ExprError> {
    match r {
        Some(r) if r.is_integer() => r.to_integer().to_i64().ok_or(ExprError::BadExponent),
        _ => Err(ExprError::BadExponent),
    }
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr, ExprError> {
        let toks = lex(s)?;
        let mut p = Parser { toks, pos: 0, end: s.len() };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }

    fn run<D: Domain>(&self, ctx: &Bindings) -> Result<D, ExprError> {
        Ok(match self {
            Expr::Num(r) => D::num(r),
            Expr::Var(v) => D::var(v, ctx)?,
            Expr::Neg(a) => D::num(&Rational::zero()).sub(&a.run(ctx)?),
            Expr::Add(a, b) => a.run::<D>(ctx)?.add(&b.run(ctx)?),
            Expr::Sub(a, b) => a.run::<D>(ctx)?.sub(&b.run(ctx)?),
            Expr::Mul(a, b) => a.run::<D>(ctx)?.mul(&b.run(ctx)?),
            Expr::Div(a, b) => a.run::<D>(ctx)?.div(&b.run(ctx)?)?,
            Expr::Pow(a, e) => {
                let k = const_int(e.run::<D>(ctx)?.as_const())?;
                let base: D = a.run(ctx)?;
                let mut acc = D::one();
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(&base);
                }
                if k < 0 {
                    acc = D::one().div(&acc)?;
                }
                acc
            }
            Expr::Poch(a, k) => {
                let k = const_int(k.run::<D>(ctx)?.as_const())?;
                if k < 0 {
                    return Err(ExprError::BadExponent);
                }
                let base: D = a.run(ctx)?;
                let mut acc = D::one();
                for i in 0..k {
                    acc = acc.mul(&base.add(&D::num(&Rational::from_integer(i.into()))));
                }
                acc
            }
        })
    }

    /// Numeric value with every variable bound.
    pub fn eval(&self, b: &Bindings) -> Result<Rational, ExprError> {
        self.run(b)
    }

    /// Expanded polynomial; unbound variables stay symbolic.
    pub fn to_poly_with(&self, b: &Bindings) -> Result<ParamPoly, ExprError> {
        self.run(b)
    }

    pub fn to_poly(&self) -> Result<ParamPoly, ExprError> {
        self.run(&Bindings::new())
    }
}

/// Parses and expands in one step.
pub fn poly(s: &str) -> Result<ParamPoly, ExprError> {
    Expr::parse(s)?.to_poly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parampoly::bindings;
    use crate::rational::{int, rat};

    #[test]
    fn precedence_and_implicit_mul() {
        let b = bindings([("g", int(2)), ("z", int(3))]);
        assert_eq!(Expr::parse("64(3z^2+2(10g+11)z+2(2g+1)(6g+13))").unwrap().eval(&b).unwrap(), int(64 * (27 + 2 * 31 * 3 + 2 * 5 * 25)));
        assert_eq!(Expr::parse("-2^2").unwrap().eval(&b).unwrap(), int(-4));
        assert_eq!(Expr::parse("1/2(g+1)").unwrap().eval(&b).unwrap(), rat(3, 2));
        assert_eq!(Expr::parse("g^-1").unwrap().eval(&b).unwrap(), rat(1, 2));
        assert_eq!(Expr::parse("g(g+1)").unwrap().eval(&b).unwrap(), int(6));
    }

    #[test]
    fn pochhammer() {
        let b = bindings([("n", int(2))]);
        assert_eq!(Expr::parse("poch(n+1,2)").unwrap().eval(&b).unwrap(), int(12));
        assert_eq!(Expr::parse("poch(n,0)").unwrap().eval(&b).unwrap(), int(1));
    }

    #[test]
    fn to_poly_expands() {
        let p = poly("(eta+g+1/2)*(2eta)").unwrap();
        assert_eq!(p, poly("2eta^2+2g*eta+eta").unwrap());
        assert_eq!(Expr::parse("1/eta").unwrap().to_poly(), Err(ExprError::NonPolynomial));
    }

    #[test]
    fn errors() {
        assert!(matches!(Expr::parse("2+"), Err(ExprError::Parse { .. })));
        assert!(matches!(Expr::parse("(1"), Err(ExprError::Parse { .. })));
        assert_eq!(Expr::parse("x").unwrap().eval(&Bindings::new()), Err(ExprError::Unbound("x".into())));
        assert_eq!(Expr::parse("1/(g-2)").unwrap().eval(&bindings([("g", int(2))])), Err(ExprError::DivByZero));
    }
}
