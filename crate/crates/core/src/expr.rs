//! A small expression language for analytic curve components.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?          right associative
//! atom    := number | "s" | "pi" | func "(" sum ")" | "(" sum ")"
//! func    := sin | cos | tan | sinh | cosh | sqrt | exp | log | abs
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::jet::Jet4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Sqrt,
    Exp,
    Log,
    Abs,
}

impl Func {
    const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
        Func::Exp,
        Func::Log,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: &Jet4) -> Result<Jet4> {
        match self {
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
            Func::Tan => x.tan(),
            Func::Sinh => Ok(x.sinh()),
            Func::Cosh => Ok(x.cosh()),
            Func::Sqrt => x.sqrt(),
            Func::Exp => Ok(x.exp()),
            Func::Log => x.ln(),
            Func::Abs => Ok(x.abs()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

/// Parsed expression tree in the single variable `s`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Pi,
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// True when the tree does not mention `s`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn eval_jet(&self, s: f64) -> Result<Jet4> {
        eval_jet(self, s)
    }

    /// Plain value at `s`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        Ok(eval_jet(self, s)?.value())
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

impl FromStr for Expr {
    type Err = Error;
    fn from_str(src: &str) -> Result<Expr> {
        parse_expr(src)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` prints the shortest representation that reparses exactly.
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var => f.write_str("s"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_operand(f, e, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                let (lp, rp) = if *op == BinOp::Pow {
                    // right associative; a negative base must be wrapped
                    (a.precedence() <= p, b.precedence() < 3)
                } else {
                    // left associative: an equal-precedence right operand needs parens
                    (a.precedence() < p, b.precedence() <= p)
                };
                write_operand(f, a, lp)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, b, rp)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(x) => format!("number {x}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
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
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| Error::Syntax {
                offset: start,
                expected: format!("a number, found `{text}`"),
            })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(Error::Syntax {
                        offset: start,
                        expected: format!("an operand or operator, found `{ch}`"),
                    });
                }
            };
            i += 1;
            out.push((tok, start));
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn error(&self, what: &str) -> Error {
        Error::Syntax {
            offset: self.offset(),
            expected: format!("{what}, found {}", describe(self.peek())),
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Const(x))
            }
            Tok::LParen => {
                self.bump();
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "s" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Pi),
                    _ => match Func::lookup(&name) {
                        Some(func) => {
                            self.expect(Tok::LParen, "`(` after function name")?;
                            let arg = self.sum()?;
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(Expr::call(func, arg))
                        }
                        None => Err(Error::UnknownIdentifier { name, offset }),
                    },
                }
            }
            _ => Err(self.error("a number, `s`, `pi`, a function or `(`")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    if src.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            expected: "an expression, found empty input".into(),
        });
    }
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
    };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

/// Exponent usable by repeated multiplication.
fn integer_exponent(e: &Expr) -> Option<i32> {
    if !e.is_constant() {
        return None;
    }
    let v = eval_jet(e, 0.0).ok()?.value();
    (v.fract() == 0.0 && v.abs() <= 64.0).then_some(v as i32)
}

pub fn eval_jet(e: &Expr, s: f64) -> Result<Jet4> {
    let out = match e {
        Expr::Const(c) => Jet4::constant(*c),
        Expr::Pi => Jet4::constant(std::f64::consts::PI),
        Expr::Var => Jet4::variable(s),
        Expr::Neg(a) => -eval_jet(a, s)?,
        Expr::Call(f, a) => f.apply(&eval_jet(a, s)?)?,
        Expr::Binary(op, a, b) => {
            let x = eval_jet(a, s)?;
            match op {
                BinOp::Add => x + eval_jet(b, s)?,
                BinOp::Sub => x - eval_jet(b, s)?,
                BinOp::Mul => x * eval_jet(b, s)?,
                BinOp::Div => x.checked_div(&eval_jet(b, s)?)?,
                BinOp::Pow => match integer_exponent(b) {
                    Some(n) => x.powi(n)?,
                    None => x.powf(&eval_jet(b, s)?)?,
                },
            }
        }
    };
    if !out.is_finite() {
        return Err(Error::domain(format!(
            "non-finite result evaluating `{e}` at s = {s}"
        )));
    }
    Ok(out)
}

/// Evaluates a constant expression such as `2*pi`.
pub fn eval_constant(src: &str) -> Result<f64> {
    let e = parse_expr(src)?;
    if !e.is_constant() {
        return Err(Error::InvalidInput(format!("`{src}` must not depend on s")));
    }
    e.eval(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Expr {
        Expr::Const(x)
    }

    #[test]
    fn parses_power() {
        assert_eq!(
            parse_expr("s^3").unwrap(),
            Expr::binary(BinOp::Pow, Expr::Var, c(3.0))
        );
    }

    #[test]
    fn parses_sqrt_call() {
        let want = Expr::call(
            Func::Sqrt,
            Expr::binary(
                BinOp::Add,
                c(1.0),
                Expr::binary(BinOp::Pow, Expr::Var, c(4.0)),
            ),
        );
        assert_eq!(parse_expr("sqrt(1+s^4)").unwrap(), want);
        assert_eq!(parse_expr("  sqrt ( 1 + s ^ 4 ) ").unwrap(), want);
    }

    #[test]
    fn parses_product() {
        let want = Expr::binary(
            BinOp::Mul,
            c(3.0),
            Expr::call(Func::Sin, Expr::binary(BinOp::Mul, c(2.0), Expr::Var)),
        );
        assert_eq!(parse_expr("3*sin(2*s)").unwrap(), want);
    }

    #[test]
    fn precedence_rules() {
        // unary minus binds looser than ^
        assert_eq!(
            parse_expr("-s^2").unwrap(),
            Expr::Neg(Box::new(Expr::binary(BinOp::Pow, Expr::Var, c(2.0))))
        );
        // ^ is right associative
        assert_eq!(
            parse_expr("2^3^2").unwrap(),
            Expr::binary(BinOp::Pow, c(2.0), Expr::binary(BinOp::Pow, c(3.0), c(2.0)))
        );
        assert_eq!(eval_constant("2^3^2").unwrap(), 512.0);
        assert_eq!(eval_constant("1-2-3").unwrap(), -4.0);
        assert_eq!(eval_constant("8/2/2").unwrap(), 2.0);
        assert_eq!(eval_constant("2*pi").unwrap(), 2.0 * std::f64::consts::PI);
        assert_eq!(eval_constant("1.5e-1*2").unwrap(), 0.3);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_expr("1 + * 2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse_expr("sin(s") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr(""), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_expr("2 $ 3"),
            Err(Error::Syntax { offset: 2, .. })
        ));
        match parse_expr("1 + t") {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "t");
                assert_eq!(offset, 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jet_evaluation() {
        let j = parse_expr("s^2").unwrap().eval_jet(3.0).unwrap();
        assert_eq!(j.derivatives(), [9.0, 6.0, 2.0, 0.0, 0.0]);
        let j = parse_expr("sin(s)").unwrap().eval_jet(0.0).unwrap();
        assert_eq!(j.derivatives(), [0.0, 1.0, 0.0, -1.0, 0.0]);
        let j = parse_expr("sqrt(1+s^4)").unwrap().eval_jet(1.0).unwrap();
        assert!((j.value() - 2f64.sqrt()).abs() < 1e-15);
        assert!((j.d(1) - 2.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn integer_powers_accept_negative_bases() {
        let j = parse_expr("s^3").unwrap().eval_jet(-2.0).unwrap();
        assert_eq!(j.derivatives(), [-8.0, 12.0, -12.0, 6.0, 0.0]);
        assert!(parse_expr("s^0.5").unwrap().eval_jet(-2.0).is_err());
        let j = parse_expr("s^0.5").unwrap().eval_jet(4.0).unwrap();
        assert!((j.value() - 2.0).abs() < 1e-15);
        assert!((j.d(1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            parse_expr("sqrt(s)").unwrap().eval_jet(-1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            parse_expr("log(s)").unwrap().eval_jet(0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            parse_expr("1/s").unwrap().eval_jet(0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn display_reparses() {
        for src in [
            "s^3",
            "-s^2",
            "(-s)^2",
            "1-(2-s)",
            "s/(2*s)",
            "2^3^2",
            "(2^3)^2",
            "-(1+s)*cos(s)",
            "sqrt(1+sin(s)^6+cos(s)^6)",
            "-3*sin(2*s)*sqrt(4+sin(2*s)^2)/sqrt(26+6*cos(4*s))",
            "-2^-s",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }
}
