//! Small expression grammar for time profiles and initial data:
//! `+ - * / ^`, `sin`, `cos`, `exp`, numeric literals and the constants
//! `pi`, `e`, over a single named variable. Parsed expressions evaluate
//! generically and differentiate symbolically, which is what gives the
//! commuting evolution structures their analytic derivatives.

use crate::error::{Error, Result};
use crate::scalar::{rf, RealScalar};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn num(x: f64) -> Self {
        Expr::Num(x)
    }

    pub fn var() -> Self {
        Expr::Var
    }

    /// Parse `src` with `var` as the free variable name.
    pub fn parse(src: &str, var: &str) -> Result<Expr> {
        Parser::new(src, var)?.parse()
    }

    pub fn eval<R: RealScalar>(&self, t: R) -> R {
        match self {
            Expr::Num(x) => rf(*x),
            Expr::Var => t,
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
            Expr::Div(a, b) => a.eval(t) / b.eval(t),
            Expr::Pow(a, b) => a.eval(t).powf(b.eval(t)),
            Expr::Neg(a) => -a.eval(t),
            Expr::Sin(a) => a.eval(t).sin(),
            Expr::Cos(a) => a.eval(t).cos(),
            Expr::Exp(a) => a.eval(t).exp(),
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.contains_var() || b.contains_var(),
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => a.contains_var(),
        }
    }

    /// Symbolic derivative. Exponents must be constant (`f^c`); variable
    /// exponents are rejected rather than silently mis-differentiated.
    pub fn derivative(&self) -> Result<Expr> {
        use Expr::*;
        Ok(match self {
            Num(_) => Num(0.0),
            Var => Num(1.0),
            Add(a, b) => Add(Box::new(a.derivative()?), Box::new(b.derivative()?)),
            Sub(a, b) => Sub(Box::new(a.derivative()?), Box::new(b.derivative()?)),
            Mul(a, b) => Add(
                Box::new(Mul(Box::new(a.derivative()?), b.clone())),
                Box::new(Mul(a.clone(), Box::new(b.derivative()?))),
            ),
            Div(a, b) => Div(
                Box::new(Sub(
                    Box::new(Mul(Box::new(a.derivative()?), b.clone())),
                    Box::new(Mul(a.clone(), Box::new(b.derivative()?))),
                )),
                Box::new(Pow(b.clone(), Box::new(Num(2.0)))),
            ),
            Pow(f, g) => {
                if g.contains_var() {
                    return Err(Error::Expr(
                        "derivative of a variable exponent is unsupported".into(),
                    ));
                }
                // c f^{c-1} f'
                Mul(
                    Box::new(Mul(
                        g.clone(),
                        Box::new(Pow(f.clone(), Box::new(Sub(g.clone(), Box::new(Num(1.0)))))),
                    )),
                    Box::new(f.derivative()?),
                )
            }
            Neg(a) => Neg(Box::new(a.derivative()?)),
            Sin(a) => Mul(Box::new(Cos(a.clone())), Box::new(a.derivative()?)),
            Cos(a) => Neg(Box::new(Mul(Box::new(Sin(a.clone())), Box::new(a.derivative()?)))),
            Exp(a) => Mul(Box::new(Exp(a.clone())), Box::new(a.derivative()?)),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Var => write!(f, "t"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
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

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    var: String,
}

impl Parser {
    fn new(src: &str, var: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let bytes: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    tokens.push(Token::Plus);
                    i += 1;
                }
                '-' => {
                    tokens.push(Token::Minus);
                    i += 1;
                }
                '*' => {
                    tokens.push(Token::Star);
                    i += 1;
                }
                '/' => {
                    tokens.push(Token::Slash);
                    i += 1;
                }
                '^' => {
                    tokens.push(Token::Caret);
                    i += 1;
                }
                '(' => {
                    tokens.push(Token::LParen);
                    i += 1;
                }
                ')' => {
                    tokens.push(Token::RParen);
                    i += 1;
                }
                '0'..='9' | '.' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                        i += 1;
                    }
                    // scientific exponent only when followed by digits
                    if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                        let mut j = i + 1;
                        if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                            j += 1;
                        }
                        if j < bytes.len() && bytes[j].is_ascii_digit() {
                            i = j;
                            while i < bytes.len() && bytes[i].is_ascii_digit() {
                                i += 1;
                            }
                        }
                    }
                    let text: String = bytes[start..i].iter().collect();
                    let value: f64 = text
                        .parse()
                        .map_err(|_| Error::Expr(format!("bad numeric literal `{text}`")))?;
                    tokens.push(Token::Num(value));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                        i += 1;
                    }
                    tokens.push(Token::Ident(bytes[start..i].iter().collect()));
                }
                other => {
                    return Err(Error::Expr(format!(
                        "unexpected character `{other}` at position {i}"
                    )))
                }
            }
        }
        Ok(Self {
            tokens,
            pos: 0,
            var: var.to_string(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse(&mut self) -> Result<Expr> {
        let e = self.expr()?;
        if self.pos != self.tokens.len() {
            return Err(Error::Expr(format!(
                "trailing input at token {}",
                self.pos
            )));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Star => {
                    self.next();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.next();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.next();
            // right-associative; unary minus allowed in the exponent
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(x)) => Ok(Expr::Num(x)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Expr("expected `)`".into())),
                }
            }
            Some(Token::Ident(name)) => {
                if matches!(self.peek(), Some(Token::LParen)) {
                    self.next();
                    let arg = self.expr()?;
                    if !matches!(self.next(), Some(Token::RParen)) {
                        return Err(Error::Expr(format!("expected `)` after {name}(...")));
                    }
                    match name.as_str() {
                        "sin" => Ok(Expr::Sin(Box::new(arg))),
                        "cos" => Ok(Expr::Cos(Box::new(arg))),
                        "exp" => Ok(Expr::Exp(Box::new(arg))),
                        other => Err(Error::Expr(format!("unknown function `{other}`"))),
                    }
                } else if name == self.var {
                    Ok(Expr::Var)
                } else {
                    match name.as_str() {
                        "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                        "e" => Ok(Expr::Num(std::f64::consts::E)),
                        other => Err(Error::Expr(format!(
                            "unknown identifier `{other}` (variable is `{}`)",
                            self.var
                        ))),
                    }
                }
            }
            other => Err(Error::Expr(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, t: f64) -> f64 {
        Expr::parse(src, "t").unwrap().eval(t)
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("2 ^ 3 ^ 1", 0.0), 8.0);
        assert_eq!(ev("-t^2", 2.0), -4.0);
        assert_eq!(ev("6 / 3 / 2", 0.0), 1.0);
    }

    #[test]
    fn functions_and_constants() {
        assert!((ev("sin(pi / 2)", 0.0) - 1.0).abs() < 1e-15);
        assert!((ev("exp(1)", 0.0) - std::f64::consts::E).abs() < 1e-15);
        assert!((ev("cos(0) + e", 0.0) - (1.0 + std::f64::consts::E)).abs() < 1e-15);
        assert!((ev("2e2 + 1", 0.0) - 201.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_polynomial() {
        let f = Expr::parse("t^3 + 2*t", "t").unwrap();
        let df = f.derivative().unwrap();
        // 3 t^2 + 2 at t = 2 -> 14
        assert!((df.eval(2.0f64) - 14.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_chain_rule() {
        let f = Expr::parse("sin(t^2)", "t").unwrap();
        let df = f.derivative().unwrap();
        let t = 0.7f64;
        assert!((df.eval(t) - 2.0 * t * (t * t).cos()).abs() < 1e-12);
    }

    #[test]
    fn variable_exponent_rejected_in_derivative() {
        let f = Expr::parse("2^t", "t").unwrap();
        assert!(f.derivative().is_err());
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(Expr::parse("2 +", "t").is_err());
        assert!(Expr::parse("foo(3)", "t").is_err());
        assert!(Expr::parse("x + 1", "t").is_err());
        assert!(Expr::parse("(1 + 2", "t").is_err());
    }

    #[test]
    fn generic_eval_matches_f64() {
        let f = Expr::parse("exp(-t) * cos(2*t)", "t").unwrap();
        let a: f64 = f.eval(0.3f64);
        let b: f32 = f.eval(0.3f32);
        assert!((a - b as f64).abs() < 1e-6);
    }
}
