//! Arithmetic expressions in `x` and `t` for initial data and forcing.
//!
//! ```text
//! expr    = term , { ("+" | "-") , term } ;
//! term    = unary , { ("*" | "/") , unary } ;
//! unary   = "-" , unary | power ;
//! power   = primary , [ "^" , unary ] ;
//! primary = number | "x" | "t" | func , "(" , expr , { "," , expr } , ")"
//!         | "(" , expr , ")" ;
//! func    = "sin" | "cos" | "exp" | "abs" | "sqrt" | "max" | "min" ;
//! number  = digits , [ "." , [ digits ] ] , [ exponent ]
//!         | "." , digits , [ exponent ] ;
//! exponent = ("e" | "E") , [ "+" | "-" ] , digits ;
//! ```
//!
//! `^` binds tighter than unary minus (`-x^2 = -(x^2)`) and is right
//! associative; its right operand may carry a sign (`2^-1`).

use std::fmt;

/// Nesting deeper than this is rejected instead of risking the stack.
const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    T,
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
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
    Max,
    Min,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "exp" => Self::Exp,
            "abs" => Self::Abs,
            "sqrt" => Self::Sqrt,
            "max" => Self::Max,
            "min" => Self::Min,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Exp => "exp",
            Self::Abs => "abs",
            Self::Sqrt => "sqrt",
            Self::Max => "max",
            Self::Min => "min",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Self::Max | Self::Min => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    pub message: String,
    /// Tokens that would have been accepted at `offset` (empty if not a syntax error).
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Num(f64),
    Ident(&'a str),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const OPERAND: &[&str] = &["number", "identifier", "'('", "'-'"];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok<'a>,
    start: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut p = Self {
            src,
            pos: 0,
            tok: Tok::End,
            start: 0,
            depth: 0,
        };
        p.advance()?;
        Ok(p)
    }

    fn error(&self, message: impl Into<String>, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.start,
            message: message.into(),
            expected: expected.to_vec(),
        }
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        self.error(format!("unexpected {}", self.tok.describe()), expected)
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            self.tok = tok;
            return Ok(());
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let end = bytes[self.pos..]
                .iter()
                .position(|b| !(b.is_ascii_alphanumeric() || *b == b'_'))
                .map_or(bytes.len(), |k| self.pos + k);
            self.tok = Tok::Ident(&self.src[self.pos..end]);
            self.pos = end;
            return Ok(());
        }
        let ch = self.src[self.pos..].chars().next().expect("in bounds");
        Err(self.error(format!("unexpected character {ch:?}"), OPERAND))
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        let digits = |mut i: usize| {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        let mut end = digits(self.pos);
        let mut mantissa_digits = end - self.pos;
        if end < bytes.len() && bytes[end] == b'.' {
            let frac_end = digits(end + 1);
            mantissa_digits += frac_end - end - 1;
            end = frac_end;
        }
        if mantissa_digits == 0 {
            return Err(self.error("a number needs at least one digit", &["digit"]));
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            let exp_end = digits(k);
            if exp_end == k {
                return Err(ParseError {
                    offset: k,
                    message: "exponent needs at least one digit".into(),
                    expected: vec!["digit"],
                });
            }
            end = exp_end;
        }
        let text = &self.src[self.pos..end];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(format!("malformed number {text:?}"), &[]))?;
        if !value.is_finite() {
            return Err(self.error(format!("number {text} is out of range"), &[]));
        }
        self.tok = Tok::Num(value);
        self.pos = end;
        Ok(())
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error(
                format!("expression nested deeper than {MAX_DEPTH} levels"),
                &[],
            ));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let e = if self.tok == Tok::Minus {
            self.advance()?;
            Expr::Neg(Box::new(self.unary()?))
        } else {
            let base = self.primary()?;
            if self.tok == Tok::Caret {
                self.advance()?;
                Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?))
            } else {
                base
            }
        };
        self.depth -= 1;
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.tok {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_close(&["')'", "'+'", "'-'", "'*'", "'/'", "'^'"])?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.start;
                self.advance()?;
                match name {
                    "x" => return Ok(Expr::Var(Var::X)),
                    "t" => return Ok(Expr::Var(Var::T)),
                    _ => {}
                }
                let Some(func) = Func::from_name(name) else {
                    return Err(ParseError {
                        offset: at,
                        message: format!("unknown identifier {name:?}"),
                        expected: vec!["x", "t", "sin", "cos", "exp", "abs", "sqrt", "max", "min"],
                    });
                };
                if self.tok != Tok::LParen {
                    return Err(self.unexpected(&["'('"]));
                }
                self.advance()?;
                let mut args = vec![self.expr()?];
                while self.tok == Tok::Comma {
                    self.advance()?;
                    args.push(self.expr()?);
                }
                self.expect_close(&["')'", "','"])?;
                if args.len() != func.arity() {
                    return Err(ParseError {
                        offset: at,
                        message: format!(
                            "{} takes {} argument{} but got {}",
                            func.name(),
                            func.arity(),
                            if func.arity() == 1 { "" } else { "s" },
                            args.len()
                        ),
                        expected: vec![],
                    });
                }
                Ok(Expr::Call(func, args))
            }
            _ => Err(self.unexpected(OPERAND)),
        }
    }

    fn expect_close(&mut self, expected: &[&'static str]) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return Err(self.unexpected(expected));
        }
        self.advance()
    }
}

/// Parses an expression in `x` and `t`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.unexpected(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    Ok(e)
}

/// [`parse`] for raw bytes; invalid UTF-8 is reported at its first offending byte.
pub fn parse_bytes(src: &[u8]) -> Result<Expr, ParseError> {
    match std::str::from_utf8(src) {
        Ok(s) => parse(s),
        Err(e) => Err(ParseError {
            offset: e.valid_up_to(),
            message: "invalid UTF-8".into(),
            expected: vec![],
        }),
    }
}

fn power(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        base.powi(exponent as i32)
    } else {
        // e^{y ln x}; NaN for negative bases
        base.powf(exponent)
    }
}

impl Expr {
    /// Value at `(x, t)`; IEEE semantics (division by zero gives ±inf, domain errors NaN).
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::T) => t,
            Expr::Neg(e) => -e.eval(x, t),
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(x, t), r.eval(x, t));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => power(a, b),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(x, t);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Sqrt => a.sqrt(),
                    Func::Max => a.max(args[1].eval(x, t)),
                    Func::Min => a.min(args[1].eval(x, t)),
                }
            }
        }
    }

    /// Whether `t` occurs in the expression.
    pub fn uses_t(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(Var::X) => false,
            Expr::Var(Var::T) => true,
            Expr::Neg(e) => e.uses_t(),
            Expr::Bin(_, l, r) => l.uses_t() || r.uses_t(),
            Expr::Call(_, args) => args.iter().any(Expr::uses_t),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical text with the fewest parentheses that preserve the tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_wrapped(f, e, e.precedence() < 3)
            }
            Expr::Bin(BinOp::Pow, l, r) => {
                write_wrapped(f, l, l.precedence() <= 4)?;
                f.write_str("^")?;
                write_wrapped(f, r, r.precedence() < 3)
            }
            Expr::Bin(op, l, r) => {
                let p = self.precedence();
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => " * ",
                    BinOp::Div => " / ",
                    BinOp::Pow => unreachable!(),
                };
                write_wrapped(f, l, l.precedence() < p)?;
                f.write_str(sym)?;
                write_wrapped(f, r, r.precedence() <= p)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Box<Expr> {
        Box::new(Expr::Num(v))
    }

    #[test]
    fn precedence_examples() {
        let e = parse("1 - x^2").unwrap();
        let want = Expr::Bin(
            BinOp::Sub,
            num(1.0),
            Box::new(Expr::Bin(BinOp::Pow, Box::new(Expr::Var(Var::X)), num(2.0))),
        );
        assert_eq!(e, want);
        assert_eq!(parse("-x^2").unwrap().eval(3.0, 0.0), -9.0);
        assert_eq!(parse("2^3^2").unwrap().eval(0.0, 0.0), 512.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0, 0.0), 0.5);
        assert_eq!(parse("8 / 2 / 2").unwrap().eval(0.0, 0.0), 2.0);
        assert_eq!(parse("1 - 2 - 3").unwrap().eval(0.0, 0.0), -4.0);
    }

    #[test]
    fn call_examples() {
        let e = parse("max(0, sin(3.14159265358979*x))").unwrap();
        assert!(matches!(e, Expr::Call(Func::Max, ref a) if a.len() == 2));
        assert_eq!(parse("abs(-3) + max(1, 2)").unwrap().eval(0.0, 0.0), 5.0);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(parse("1 - x^2").unwrap().eval(0.0, 0.0), 1.0);
        assert_eq!(parse("x*t + 2").unwrap().eval(2.0, 3.0), 8.0);
        assert!(parse("1/x").unwrap().eval(0.0, 0.0).is_infinite());
        assert!(parse("sqrt(x)").unwrap().eval(-1.0, 0.0).is_nan());
        assert!(parse("x^0.5").unwrap().eval(-1.0, 0.0).is_nan());
    }

    #[test]
    fn error_positions() {
        let e = parse("2 *").unwrap_err();
        assert_eq!(e.offset, 3);
        assert!(e.expected.contains(&"number"));
        let e = parse("1 - y").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.message.contains("unknown identifier"));
        let e = parse("max(1)").unwrap_err();
        assert_eq!(e.offset, 0);
        assert!(e.message.contains("2 arguments"));
        let e = parse("sin(1, 2)").unwrap_err();
        assert!(e.message.contains("1 argument "));
        assert_eq!(parse("(1 + 2").unwrap_err().offset, 6);
        assert_eq!(parse("1 2").unwrap_err().offset, 2);
        assert_eq!(parse("1e").unwrap_err().offset, 2);
        assert_eq!(parse("3 $ 4").unwrap_err().offset, 2);
        assert!(parse("1e999").is_err());
        assert_eq!(parse_bytes(b"1 + \xff").unwrap_err().offset, 4);
        assert_eq!(parse("").unwrap_err().offset, 0);
        assert!(parse("sin x").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected_not_fatal() {
        let deep = "(".repeat(100_000) + "1" + &")".repeat(100_000);
        assert!(parse(&deep).unwrap_err().message.contains("nested"));
        let signs = "-".repeat(100_000) + "1";
        assert!(parse(&signs).is_err());
        let ok = "(".repeat(50) + "x" + &")".repeat(50);
        assert!(parse(&ok).is_ok());
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        for (src, want) in [
            ("(1 - (x^2))", "1 - x^2"),
            ("(-x)^2", "(-x)^2"),
            ("-(x^2)", "-x^2"),
            ("(2^3)^2", "(2^3)^2"),
            ("2^(3^2)", "2^3^2"),
            ("a", ""),
        ] {
            if want.is_empty() {
                assert!(parse(src).is_err());
                continue;
            }
            assert_eq!(parse(src).unwrap().to_string(), want);
        }
        assert_eq!(parse("1-(2-3)").unwrap().to_string(), "1 - (2 - 3)");
        assert_eq!(parse("(1-2)-3").unwrap().to_string(), "1 - 2 - 3");
        assert_eq!(parse("2^(-x)").unwrap().to_string(), "2^-x");
        assert_eq!(parse("max( 1 ,x*t )").unwrap().to_string(), "max(1, x * t)");
    }

    #[test]
    fn uses_t_detects_time() {
        assert!(parse("x + sin(t)").unwrap().uses_t());
        assert!(!parse("x + 1").unwrap().uses_t());
    }
}
