//! Arithmetic expressions in one variable `x`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! exponent := '-'? power          (must fold to a number)
//! atom   := number | 'x' | '(' expr ')' | func '(' expr ')'
//! func   := sqrt | sin | cos | exp | log
//! ```
//!
//! So `-x^2` is `-(x^2)` and `2^3^2` is `2^9`. Exponents are numeric only,
//! which keeps the derivative of a power a power.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sqrt => v.sqrt(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
        }
    }
}

/// Expression tree. Subtrees are shared, so cloning is cheap.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, f64),
    Call(Func, Arc<Expr>),
}

use Expr::*;

fn num(v: f64) -> Arc<Expr> {
    Arc::new(Num(v))
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src, tokens: tokenize(src)?, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            Tok::End => Ok(e),
            _ => Err(p.error("unexpected trailing input")),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Num(v) => *v,
            X => x,
            Neg(e) => -e.eval(x),
            Add(l, r) => l.eval(x) + r.eval(x),
            Sub(l, r) => l.eval(x) - r.eval(x),
            Mul(l, r) => l.eval(x) * r.eval(x),
            Div(l, r) => l.eval(x) / r.eval(x),
            Pow(base, p) => powf(base.eval(x), *p),
            Call(f, e) => f.apply(e.eval(x)),
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Num(v) => Some(*v),
            _ => None,
        }
    }

    /// d/dx, already folded.
    pub fn derivative(&self) -> Expr {
        self.diff().simplify()
    }

    fn diff(&self) -> Expr {
        match self {
            Num(_) => Num(0.0),
            X => Num(1.0),
            Neg(e) => Neg(Arc::new(e.diff())),
            Add(l, r) => Add(Arc::new(l.diff()), Arc::new(r.diff())),
            Sub(l, r) => Sub(Arc::new(l.diff()), Arc::new(r.diff())),
            Mul(l, r) => {
                Add(Arc::new(Mul(Arc::new(l.diff()), r.clone())), Arc::new(Mul(l.clone(), Arc::new(r.diff()))))
            }
            Div(l, r) => Div(
                Arc::new(Sub(
                    Arc::new(Mul(Arc::new(l.diff()), r.clone())),
                    Arc::new(Mul(l.clone(), Arc::new(r.diff()))),
                )),
                Arc::new(Pow(r.clone(), 2.0)),
            ),
            Pow(base, p) => Mul(Arc::new(Mul(num(*p), Arc::new(Pow(base.clone(), p - 1.0)))), Arc::new(base.diff())),
            Call(f, e) => {
                let outer = match f {
                    Func::Sqrt => Mul(num(0.5), Arc::new(Pow(e.clone(), -0.5))),
                    Func::Sin => Call(Func::Cos, e.clone()),
                    Func::Cos => Neg(Arc::new(Call(Func::Sin, e.clone()))),
                    Func::Exp => Call(Func::Exp, e.clone()),
                    Func::Log => Pow(e.clone(), -1.0),
                };
                Mul(Arc::new(outer), Arc::new(e.diff()))
            }
        }
    }

    /// Constant folding plus the identities for 0 and 1.
    pub fn simplify(&self) -> Expr {
        match self {
            Num(_) | X => self.clone(),
            Neg(e) => match e.simplify() {
                Num(v) => Num(-v),
                Neg(inner) => (*inner).clone(),
                s => Neg(Arc::new(s)),
            },
            Add(l, r) => match (l.simplify(), r.simplify()) {
                (Num(a), Num(b)) => Num(a + b),
                (Num(z), s) | (s, Num(z)) if z == 0.0 => s,
                (a, Neg(b)) => Sub(Arc::new(a), b),
                (a, b) => Add(Arc::new(a), Arc::new(b)),
            },
            Sub(l, r) => match (l.simplify(), r.simplify()) {
                (Num(a), Num(b)) => Num(a - b),
                (s, Num(z)) if z == 0.0 => s,
                (Num(z), s) if z == 0.0 => Neg(Arc::new(s)).simplify(),
                (a, Neg(b)) => Add(Arc::new(a), b),
                (a, b) => Sub(Arc::new(a), Arc::new(b)),
            },
            Mul(l, r) => match (l.simplify(), r.simplify()) {
                (Num(a), Num(b)) => Num(a * b),
                (Num(z), _) | (_, Num(z)) if z == 0.0 => Num(0.0),
                (Num(o), s) | (s, Num(o)) if o == 1.0 => s,
                (Num(m), s) | (s, Num(m)) if m == -1.0 => Neg(Arc::new(s)),
                (Num(a), Mul(inner_l, inner_r)) if inner_l.as_number().is_some() => {
                    Mul(num(a * inner_l.as_number().unwrap()), inner_r)
                }
                (s, Num(c)) => Mul(num(c), Arc::new(s)),
                (a, b) => Mul(Arc::new(a), Arc::new(b)),
            },
            Div(l, r) => match (l.simplify(), r.simplify()) {
                (Num(a), Num(b)) if b != 0.0 => Num(a / b),
                (Num(z), _) if z == 0.0 => Num(0.0),
                (s, Num(o)) if o == 1.0 => s,
                (a, b) => Div(Arc::new(a), Arc::new(b)),
            },
            Pow(base, p) => {
                if *p == 0.0 {
                    return Num(1.0);
                }
                match base.simplify() {
                    Num(v) => Num(powf(v, *p)),
                    s if *p == 1.0 => s,
                    Pow(inner, q) => Pow(inner, q * p),
                    s => Pow(Arc::new(s), *p),
                }
            }
            Call(f, e) => match e.simplify() {
                Num(v) => Num(f.apply(v)),
                s => Call(*f, Arc::new(s)),
            },
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Num(_) | X => 1,
            Neg(e) | Pow(e, _) | Call(_, e) => 1 + e.node_count(),
            Add(l, r) | Sub(l, r) | Mul(l, r) | Div(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }
}

// Integer exponents go through powi so that negative bases work.
fn powf(base: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        base.powi(p as i32)
    } else {
        base.powf(p)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(v) if *v < 0.0 => write!(f, "({v})"),
            Num(v) => write!(f, "{v}"),
            X => write!(f, "x"),
            Neg(e) => write!(f, "-({e})"),
            Add(l, r) => write!(f, "({l} + {r})"),
            Sub(l, r) => write!(f, "({l} - {r})"),
            Mul(l, r) => write!(f, "{l}*{r}"),
            Div(l, r) => write!(f, "{l}/({r})"),
            Pow(b, p) if *p < 0.0 => write!(f, "({b})^({p})"),
            Pow(b, p) => write!(f, "({b})^{p}"),
            Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part: 1e-3, 2.5E+4
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 =
                text.parse().map_err(|_| Error::Syntax { pos: start, msg: format!("malformed number `{text}`") })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") }),
            };
            out.push((tok, i));
            i += 1;
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            _ => format!("`{}`", self.src[self.offset()..].chars().next().unwrap_or(' ')),
        };
        Error::Syntax { pos: self.offset(), msg: format!("{msg} (found {found})") }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Add(Arc::new(lhs), Arc::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Sub(Arc::new(lhs), Arc::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Mul(Arc::new(lhs), Arc::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Div(Arc::new(lhs), Arc::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Tok::Op('-') = self.peek() {
            self.bump();
            return Ok(Neg(Arc::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let at = self.offset();
            let negate = matches!(self.peek(), Tok::Op('-'));
            if negate {
                self.bump();
            }
            let exp = self.power()?.simplify();
            let p =
                exp.as_number().ok_or(Error::Syntax { pos: at, msg: "exponent must be a numeric constant".into() })?;
            return Ok(Pow(Arc::new(base), if negate { -p } else { p }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Num(v))
            }
            Tok::Ident(name) if name == "x" => {
                self.bump();
                Ok(X)
            }
            Tok::Ident(name) => {
                let func = Func::from_name(&name)
                    .ok_or(Error::Syntax { pos: at, msg: format!("unknown identifier `{name}`") })?;
                self.bump();
                if self.bump() != Tok::LParen {
                    return Err(Error::Syntax { pos: at + name.len(), msg: format!("expected `(` after `{name}`") });
                }
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Call(func, Arc::new(arg)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            _ => Err(self.error("expected a number, `x`, a function or `(`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.error("expected `)`"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-x^2").eval(3.0), -9.0);
        assert_eq!(p("2^3^2").eval(0.0), 512.0);
        assert_eq!(p("1 + 2*3 - 4/2").eval(0.0), 5.0);
        assert_eq!(p("(1+x)^-0.5").eval(3.0), 0.5);
        assert_eq!(p("2*-x").eval(1.5), -3.0);
        assert_eq!(p("1e-2*x").eval(2.0), 0.02);
    }

    #[test]
    fn functions() {
        let e = p("sqrt(x) + sin(0) + cos(0) + exp(0) + log(1)");
        assert_eq!(e.eval(4.0), 4.0);
    }

    #[test]
    fn syntax_errors_report_position() {
        match Expr::parse("1 + * x") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match Expr::parse("x^x") {
            Err(Error::Syntax { pos, msg }) => {
                assert_eq!(pos, 2);
                assert!(msg.contains("numeric"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(Expr::parse("tan(x)"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(Expr::parse("(1+x"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(Expr::parse("1 $"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(Expr::parse(""), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn derivative_of_polynomial() {
        let e = p("1 + x^2");
        let d1 = e.derivative();
        let d2 = d1.derivative();
        assert_eq!(d1.eval(-0.5), -1.0);
        assert_eq!(d2.eval(0.3), 2.0);
        assert_eq!(d2.derivative(), Num(0.0));
    }

    #[test]
    fn derivative_of_constant_folds_to_zero() {
        assert_eq!(p("1").derivative(), Num(0.0));
        assert_eq!(p("3*2 - 1/4").derivative(), Num(0.0));
    }

    #[test]
    fn folding_shrinks_derivative_trees() {
        let e = p("(1+x)^1.5");
        let raw = e.diff().diff();
        let folded = e.derivative().derivative();
        assert!(folded.node_count() < raw.node_count());
        for x in [0.0, 0.25, 0.9] {
            assert!((folded.eval(x) - raw.eval(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn parsing_is_deterministic() {
        let src = "sqrt(1+x^2)*exp(-x)/(2+cos(x))";
        assert_eq!(p(src), p(src));
    }
}
