//! Expression language for user-supplied deformation functions.
//!
//! Grammar (whitespace insignificant, ASCII only):
//!
//! ```text
//! expr    := term (("+"|"-") term)* ;
//! term    := factor (("*"|"/") factor)* ;
//! factor  := unary ("^" factor)? ;
//! unary   := "-" unary | atom ;
//! atom    := NUMBER | "q" | "n" | FUNC "(" expr ")" | "(" expr ")" ;
//! FUNC    := "exp" | "ln" | "sinh" | "cosh" | "tanh" | "sqrt" ;
//! ```
//!
//! Power is right-associative and binds looser than unary minus, so `-q^2`
//! is `(-q)^2` while `q^-n` is `q^(-n)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Q,
    N,
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
    Ln,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

/// Parsed deformation expression in the variables `q` and `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalError {
    DivisionByZero,
    NonFinite,
}

impl Expr {
    /// Evaluates the tree. Non-finite intermediates are reported only if
    /// they reach the result; an exact zero divisor is always an error.
    pub fn eval(&self, q: f64, n: f64) -> Result<f64, EvalError> {
        let v = self.eval_inner(q, n)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn eval_inner(&self, q: f64, n: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::Q) => q,
            Expr::Var(Var::N) => n,
            Expr::Neg(e) => -e.eval_inner(q, n)?,
            Expr::Call(f, e) => f.apply(e.eval_inner(q, n)?),
            Expr::Binary(op, l, r) => {
                let a = l.eval_inner(q, n)?;
                let b = r.eval_inner(q, n)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::Q) => f.write_str("q"),
            Expr::Var(Var::N) => f.write_str("n"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l} {sym} {r})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    UnknownIdentifier(String),
    UnknownFunction(String),
}

/// Parse failure with the byte offset (0-based) where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax { expected, found } => write!(
                f,
                "syntax error at position {}: expected {expected}, found {found}",
                self.position
            ),
            ParseErrorKind::UnknownIdentifier(name) => write!(
                f,
                "unknown identifier '{name}' at position {} (only q and n are allowed)",
                self.position
            ),
            ParseErrorKind::UnknownFunction(name) => write!(
                f,
                "unknown function '{name}' at position {} (expected exp, ln, sinh, cosh, tanh or sqrt)",
                self.position
            ),
        }
    }
}

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
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(position: usize, expected: &str, found: String) -> ParseError {
    ParseError {
        position,
        kind: ParseErrorKind::Syntax {
            expected: expected.to_string(),
            found,
        },
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if !c.is_ascii() {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(syntax(i, "ASCII input", format!("'{ch}'")));
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
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
                let value = text
                    .parse::<f64>()
                    .map_err(|_| syntax(start, "number", format!("'{text}'")))?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(syntax(
                    i,
                    "number, identifier, operator or parenthesis",
                    format!("'{}'", other as char),
                ))
            }
        };
        out.push((tok, start));
        i += 1;
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

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), expected, self.peek().describe()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.factor()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "q" => Ok(Expr::Var(Var::Q)),
                "n" => Ok(Expr::Var(Var::N)),
                _ => {
                    if *self.peek() == Tok::LParen {
                        let func = Func::from_name(&name).ok_or(ParseError {
                            position: at,
                            kind: ParseErrorKind::UnknownFunction(name.clone()),
                        })?;
                        self.bump();
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    } else if Func::from_name(&name).is_some() {
                        Err(syntax(self.offset(), "'('", self.peek().describe()))
                    } else {
                        Err(ParseError {
                            position: at,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        })
                    }
                }
            },
            other => Err(syntax(at, "expression", other.describe())),
        }
    }
}

/// Parses a complete deformation expression; trailing tokens are an error.
pub fn parse_deformation(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: tokenize(source)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.offset(),
            "operator or end of input",
            p.peek().describe(),
        ));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Box<Expr> {
        Box::new(Expr::Num(v))
    }

    #[test]
    fn single_variable() {
        assert_eq!(parse_deformation("n").unwrap(), Expr::Var(Var::N));
        assert_eq!(parse_deformation("  q ").unwrap(), Expr::Var(Var::Q));
    }

    #[test]
    fn dangling_operator_reports_end_of_input() {
        let err = parse_deformation("q + ").unwrap_err();
        assert_eq!(err.position, 4);
        match err.kind {
            ParseErrorKind::Syntax { found, .. } => assert_eq!(found, "end of input"),
            k => panic!("unexpected {k:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        // 2^3^2 = 2^9
        let e = parse_deformation("2^3^2").unwrap();
        assert_eq!(e.eval(1.0, 0.0).unwrap(), 512.0);
        // unary minus binds tighter than ^
        assert_eq!(parse_deformation("-q^2").unwrap().eval(3.0, 0.0).unwrap(), 9.0);
        assert_eq!(parse_deformation("q^-n").unwrap().eval(2.0, 2.0).unwrap(), 0.25);
        assert_eq!(parse_deformation("1 - 2 - 3").unwrap().eval(0.0, 0.0).unwrap(), -4.0);
        assert_eq!(parse_deformation("8 / 4 / 2").unwrap().eval(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(parse_deformation("1 + 2 * 3").unwrap().eval(0.0, 0.0).unwrap(), 7.0);
        assert_eq!(
            parse_deformation("2*-3").unwrap(),
            Expr::Binary(BinOp::Mul, num(2.0), Box::new(Expr::Neg(num(3.0))))
        );
    }

    #[test]
    fn numbers_with_fraction_and_exponent() {
        assert_eq!(parse_deformation("1.5e2").unwrap(), Expr::Num(150.0));
        assert_eq!(parse_deformation("2.5E-1").unwrap(), Expr::Num(0.25));
        assert_eq!(parse_deformation("3.").unwrap(), Expr::Num(3.0));
    }

    #[test]
    fn functions() {
        let e = parse_deformation("sinh(n*ln(q))/sinh(ln(q))").unwrap();
        let v = e.eval(2.0, 2.0).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
        assert_eq!(parse_deformation("sqrt(n)").unwrap().eval(1.0, 4.0).unwrap(), 2.0);
    }

    #[test]
    fn error_kinds() {
        let e = parse_deformation("n + x").unwrap_err();
        assert_eq!(e.position, 4);
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("x".into()));

        let e = parse_deformation("sin(n)").unwrap_err();
        assert_eq!(e.position, 0);
        assert_eq!(e.kind, ParseErrorKind::UnknownFunction("sin".into()));

        let e = parse_deformation("(n").unwrap_err();
        assert_eq!(e.position, 2);

        let e = parse_deformation("n n").unwrap_err();
        assert_eq!(e.position, 2);

        let e = parse_deformation("exp n").unwrap_err();
        assert_eq!(e.position, 4);

        let e = parse_deformation("").unwrap_err();
        assert_eq!(e.position, 0);

        let e = parse_deformation("n é").unwrap_err();
        assert_eq!(e.position, 2);
    }

    #[test]
    fn division_by_zero() {
        let e = parse_deformation("n/(q-q)").unwrap();
        assert_eq!(e.eval(2.0, 1.0), Err(EvalError::DivisionByZero));
        let e = parse_deformation("ln(n)").unwrap();
        assert_eq!(e.eval(2.0, 0.0), Err(EvalError::NonFinite));
    }

    #[test]
    fn display_reparses_to_same_tree() {
        for src in ["(q^n - q^(-n))/(q - q^(-1))", "-q^2", "exp(-n)*2.5e-3", "n^2"] {
            let e = parse_deformation(src).unwrap();
            let again = parse_deformation(&e.to_string()).unwrap();
            assert_eq!(e, again, "{src}");
        }
    }
}
