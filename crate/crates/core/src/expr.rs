//! Scalar holomorphic expressions: parsing, evaluation and symbolic gradients.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' int)?
//! base   := number | 'i' | 'z'digits | fn '(' expr ')' | '(' expr ')' | '-' base
//! fn     := exp | log | sqrt
//! ```
//!
//! Variables are 1-based in text (`z1`, `z2`, …) and 0-based in the tree.
//! Note that `-z1^2` parses as `(-z1)^2`, exactly as the grammar reads.

use std::fmt;

use rand::Rng;

use crate::error::{LabError, Result};
use crate::linalg::{c, C64};

/// Below this modulus a divisor is treated as zero.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Distance to the negative real axis below which a branch-cut warning is raised.
pub const BRANCH_CUT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C64),
    I,
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

// Smart constructors with light constant folding, used by the differentiator.

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(z) if *z == c(v, 0.0))
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(z) => Expr::Const(-z),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (a, b) if is_const(&a, 0.0) => b,
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) if is_const(&a, 0.0) => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, b) if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(c(0.0, 0.0)),
        (a, b) if is_const(&a, 1.0) => b,
        (a, b) if is_const(&b, 1.0) => a,
        (a, Expr::Const(y)) => Expr::Mul(Box::new(Expr::Const(y)), Box::new(a)),
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, _) if is_const(&a, 0.0) => Expr::Const(c(0.0, 0.0)),
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, k: i32) -> Expr {
    match k {
        0 => Expr::Const(c(1.0, 0.0)),
        1 => a,
        _ => Expr::Pow(Box::new(a), k),
    }
}

fn cnum(v: f64) -> Expr {
    Expr::Const(c(v, 0.0))
}

impl Expr {
    pub fn parse(text: &str, dimension: usize) -> Result<Expr> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            dim: dimension,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Highest variable index used, 0-based.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) | Expr::I => None,
            Expr::Var(j) => Some(*j),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    /// Principal-branch evaluation.
    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        self.eval_inner(z, &mut None)
    }

    /// Evaluation that also reports contact with the branch cut of `log`/`sqrt`.
    pub fn eval_with_warnings(&self, z: &[C64], warnings: &mut Vec<String>) -> Result<C64> {
        let mut sink = Some(std::mem::take(warnings));
        let out = self.eval_inner(z, &mut sink);
        *warnings = sink.unwrap_or_default();
        out
    }

    fn eval_inner(&self, z: &[C64], warn: &mut Option<Vec<String>>) -> Result<C64> {
        Ok(match self {
            Expr::Const(v) => *v,
            Expr::I => c(0.0, 1.0),
            Expr::Var(j) => *z.get(*j).ok_or(LabError::DimensionMismatch {
                expected: j + 1,
                got: z.len(),
            })?,
            Expr::Neg(a) => -a.eval_inner(z, warn)?,
            Expr::Add(a, b) => a.eval_inner(z, warn)? + b.eval_inner(z, warn)?,
            Expr::Sub(a, b) => a.eval_inner(z, warn)? - b.eval_inner(z, warn)?,
            Expr::Mul(a, b) => a.eval_inner(z, warn)? * b.eval_inner(z, warn)?,
            Expr::Div(a, b) => {
                let num = a.eval_inner(z, warn)?;
                let den = b.eval_inner(z, warn)?;
                if den.norm() < SINGULAR_TOL {
                    return Err(LabError::singular(format!("division by {den} in {self}")));
                }
                num / den
            }
            Expr::Pow(a, k) => {
                let base = a.eval_inner(z, warn)?;
                if *k < 0 && base.norm() < SINGULAR_TOL {
                    return Err(LabError::singular(format!("negative power of {base} in {self}")));
                }
                base.powi(*k)
            }
            Expr::Func(f, a) => {
                let arg = a.eval_inner(z, warn)?;
                if *f != Func::Exp && arg.re < 0.0 && arg.im.abs() < BRANCH_CUT_TOL {
                    if let Some(w) = warn.as_mut() {
                        w.push(format!("{}({arg}) evaluated on its branch cut", f.name()));
                    }
                }
                match f {
                    Func::Exp => arg.exp(),
                    Func::Log => {
                        if arg.norm() == 0.0 {
                            return Err(LabError::singular("log of zero"));
                        }
                        arg.ln()
                    }
                    Func::Sqrt => arg.sqrt(),
                }
            }
        })
    }

    /// Symbolic partial derivative with respect to variable `j` (0-based).
    pub fn derivative(&self, j: usize) -> Expr {
        match self {
            Expr::Const(_) | Expr::I => cnum(0.0),
            Expr::Var(k) => cnum(if *k == j { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.derivative(j)),
            Expr::Add(a, b) => add(a.derivative(j), b.derivative(j)),
            Expr::Sub(a, b) => sub(a.derivative(j), b.derivative(j)),
            Expr::Mul(a, b) => add(
                mul(a.derivative(j), (**b).clone()),
                mul((**a).clone(), b.derivative(j)),
            ),
            Expr::Div(a, b) => {
                let da = a.derivative(j);
                let db = b.derivative(j);
                if is_const(&db, 0.0) {
                    return div(da, (**b).clone());
                }
                div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), 2),
                )
            }
            Expr::Pow(a, k) => {
                let da = a.derivative(j);
                mul(mul(cnum(*k as f64), pow((**a).clone(), k - 1)), da)
            }
            Expr::Func(f, a) => {
                let da = a.derivative(j);
                if is_const(&da, 0.0) {
                    return cnum(0.0);
                }
                match f {
                    Func::Exp => mul(self.clone(), da),
                    Func::Log => div(da, (**a).clone()),
                    Func::Sqrt => div(da, mul(cnum(2.0), self.clone())),
                }
            }
        }
    }

    /// One symbolic partial derivative per variable.
    pub fn gradient(&self, dimension: usize) -> Vec<Expr> {
        (0..dimension).map(|j| self.derivative(j)).collect()
    }

    /// Random expression over `dimension` variables, for property tests.
    ///
    /// Generated trees use only constructs that the parser can produce, so
    /// they survive a print/parse round trip.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dimension: usize, depth: usize) -> Expr {
        if depth == 0 || rng.random::<f64>() < 0.2 {
            return match rng.random_range(0..4) {
                0 => Expr::Const(c((rng.random_range(1..=20) as f64) / 4.0, 0.0)),
                1 => Expr::I,
                _ => Expr::Var(rng.random_range(0..dimension)),
            };
        }
        let sub = |rng: &mut R| Box::new(Expr::random(rng, dimension, depth - 1));
        match rng.random_range(0..10) {
            0 => Expr::Neg(sub(rng)),
            1 | 2 => Expr::Add(sub(rng), sub(rng)),
            3 => Expr::Sub(sub(rng), sub(rng)),
            4 | 5 => Expr::Mul(sub(rng), sub(rng)),
            6 => Expr::Div(sub(rng), sub(rng)),
            7 => Expr::Pow(sub(rng), rng.random_range(-2..=3)),
            _ => {
                let f = [Func::Exp, Func::Log, Func::Sqrt][rng.random_range(0..3)];
                Expr::Func(f, sub(rng))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Neg(_) => 4,
            Expr::Const(v) if v.im != 0.0 || v.re < 0.0 || v.re.is_sign_negative() => 0,
            _ => 5,
        }
    }
}

/// Writes `e`, parenthesized when its precedence is below `min`.
fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "(")?;
        write_at(f, e, 0)?;
        return write!(f, ")");
    }
    match e {
        Expr::Const(v) => {
            if v.im == 0.0 && !v.re.is_sign_negative() {
                write!(f, "{}", v.re)
            } else if v.im == 0.0 {
                write!(f, "-{}", -v.re)
            } else {
                write!(f, "{}+{}*i", v.re, v.im)
            }
        }
        Expr::I => write!(f, "i"),
        Expr::Var(j) => write!(f, "z{}", j + 1),
        // The operand of '-' is a base, so anything weaker than a base is wrapped.
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, 4)
        }
        Expr::Add(a, b) => {
            write_at(f, a, 1)?;
            write!(f, "+")?;
            write_at(f, b, 2)
        }
        Expr::Sub(a, b) => {
            write_at(f, a, 1)?;
            write!(f, "-")?;
            write_at(f, b, 2)
        }
        Expr::Mul(a, b) => {
            write_at(f, a, 2)?;
            write!(f, "*")?;
            write_at(f, b, 3)
        }
        Expr::Div(a, b) => {
            write_at(f, a, 2)?;
            write!(f, "/")?;
            write_at(f, b, 3)
        }
        // The base of '^' must itself be a base (no nested powers without parentheses).
        Expr::Pow(a, k) => {
            write_at(f, a, 4)?;
            write!(f, "^{k}")
        }
        Expr::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_at(f, a, 0)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, 0)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> LabError {
        LabError::Parse {
            position: self.pos,
            message: msg.into(),
        }
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

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", ch as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat(b'-');
        if !negative {
            self.eat(b'+');
        }
        self.skip_ws();
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits_start == self.pos {
            self.pos = start;
            return Err(self.err("exponent must be an integer literal"));
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).expect("ascii digits");
        let k: i32 = text.parse().map_err(|_| self.err("exponent out of range"))?;
        Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => self.number(),
            Some(ch) if ch.is_ascii_alphabetic() => self.word(),
            Some(ch) => Err(self.err(format!("unexpected character '{}'", ch as char))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        let v: f64 = text.parse().map_err(|_| LabError::Parse {
            position: start,
            message: format!("malformed number {text:?}"),
        })?;
        Ok(Expr::Const(c(v, 0.0)))
    }

    fn word(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii word");
        let func = match word {
            "i" => return Ok(Expr::I),
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            w if w.len() > 1 && w.starts_with('z') && w[1..].bytes().all(|b| b.is_ascii_digit()) => {
                let idx: usize = w[1..].parse().map_err(|_| LabError::Parse {
                    position: start,
                    message: format!("bad variable {w:?}"),
                })?;
                if idx == 0 || idx > self.dim {
                    return Err(LabError::Parse {
                        position: start,
                        message: format!("variable {w} out of range for dimension {}", self.dim),
                    });
                }
                return Ok(Expr::Var(idx - 1));
            }
            w => {
                return Err(LabError::Parse {
                    position: start,
                    message: format!("unknown identifier {w:?}"),
                })
            }
        };
        self.expect(b'(')?;
        let arg = self.expr()?;
        self.expect(b')')?;
        Ok(Expr::Func(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, dim: usize) -> Expr {
        Expr::parse(s, dim).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("z1^2", 1), Expr::Pow(Box::new(Expr::Var(0)), 2));
        p("0.5*log((0.5+z1)/(0.5-z1))", 1);
        let err = Expr::parse("z3", 2).unwrap_err();
        assert!(matches!(err, LabError::Parse { position: 0, .. }));
        assert!(Expr::parse("z0", 2).is_err());
        assert!(Expr::parse("1+", 1).is_err());
        assert!(Expr::parse("z1^1.5", 1).is_err());
        assert!(Expr::parse("sin(z1)", 1).is_err());
    }

    #[test]
    fn unary_minus_binds_to_base() {
        assert_eq!(
            p("-z1^2", 1),
            Expr::Pow(Box::new(Expr::Neg(Box::new(Expr::Var(0)))), 2)
        );
        assert_eq!(p("z1^-2", 1), Expr::Pow(Box::new(Expr::Var(0)), -2));
    }

    #[test]
    fn eval_examples() {
        let v = p("z1+z2", 2).eval(&[c(1.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert_eq!(v, c(1.0, 2.0));
        assert_eq!(p("log(1)", 1).eval(&[c(0.0, 0.0)]).unwrap(), c(0.0, 0.0));
        assert!(p("1/(1-z1)", 1).eval(&[c(1.0, 0.0)]).unwrap_err().is_singularity());
        assert!(p("log(z1)", 1).eval(&[c(0.0, 0.0)]).unwrap_err().is_singularity());
        assert_eq!(p("i*i", 0).eval(&[]).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn branch_cut_warning() {
        let mut w = Vec::new();
        let v = p("log(z1)", 1).eval_with_warnings(&[c(-1.0, 0.0)], &mut w).unwrap();
        assert!((v - c(0.0, std::f64::consts::PI)).norm() < 1e-15);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(
            p("z1^2", 1).gradient(1),
            vec![Expr::Mul(Box::new(cnum(2.0)), Box::new(Expr::Var(0)))]
        );
        assert_eq!(p("z1*z2", 2).gradient(2), vec![Expr::Var(1), Expr::Var(0)]);
    }

    #[test]
    fn extremal_log_gradient_at_origin() {
        let f = p("0.5*log((0.5+z1)/(0.5-z1))", 1);
        let g = f.gradient(1)[0].eval(&[c(0.0, 0.0)]).unwrap();
        // Disk case with ‖a‖ = 1/2: f = atanh(2 z1), so f'(0) = 2.
        assert!((g - c(2.0, 0.0)).norm() < 1e-14);
        let f = p("0.5*log((1+z1)/(1-z1))", 1);
        let g = f.gradient(1)[0].eval(&[c(0.0, 0.0)]).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn print_round_trip_examples() {
        for s in ["-z1^2", "-(z1^2)", "(z1+z2)*(z1-z2)", "z1-(z2-z1)", "z1/(z2*z1)", "exp(-z1)/2", "(z1^2)^3", "--z1", "2.5e-3*i"] {
            let e = p(s, 2);
            assert_eq!(p(&e.to_string(), 2), e, "{s} printed as {e}");
        }
    }
}
