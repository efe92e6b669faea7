//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor (('*'|'/') factor)* ;
//! factor := unary ('^' factor)? ;            // right-associative
//! unary  := '-' unary | atom ;
//! atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')' ;
//! ```

use super::{BinaryOp, Expr, UnaryOp};
use crate::error::{Error, Result};

/// Names a parser accepts as variables and as parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseContext {
    pub variables: Vec<String>,
    pub parameters: Vec<String>,
}

impl Default for ParseContext {
    /// Variable `t`; parameters `a` (the order α) and `b` (β).
    fn default() -> Self {
        ParseContext {
            variables: vec!["t".into()],
            parameters: vec!["a".into(), "b".into()],
        }
    }
}

impl ParseContext {
    pub fn new<V, P>(variables: V, parameters: P) -> Self
    where
        V: IntoIterator,
        V::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        ParseContext {
            variables: variables.into_iter().map(Into::into).collect(),
            parameters: parameters.into_iter().map(Into::into).collect(),
        }
    }

    /// Coordinate variables `x1..xn`.
    pub fn coordinates<P>(n: usize, parameters: P) -> Self
    where
        P: IntoIterator,
        P::Item: Into<String>,
    {
        ParseContext::new((1..=n).map(|i| format!("x{i}")), parameters)
    }

    pub fn with_parameter(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        if !self.parameters.contains(&name) {
            self.parameters.push(name);
        }
        self
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

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, start));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
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
            let lit = &text[start..i];
            let value: f64 = lit
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{lit}`")))?;
            if !value.is_finite() {
                return Err(syntax(start, format!("number `{lit}` is out of range")));
            }
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(syntax(start, format!("unexpected character `{ch}`")));
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'c> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: &'c ParseContext,
}

impl Parser<'_> {
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

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!("expected {}, found {}", describe(&want), describe(self.peek())),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(op) = UnaryOp::from_function_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(syntax(
                            self.offset(),
                            format!("function `{name}` must be followed by `(`"),
                        ));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::unary(op, arg));
                }
                if *self.peek() == Tok::LParen {
                    return Err(Error::UnknownIdentifier { name, offset: at });
                }
                if self.ctx.variables.contains(&name) {
                    Ok(Expr::Var(name))
                } else if self.ctx.parameters.contains(&name) {
                    Ok(Expr::Param(name))
                } else {
                    Err(Error::UnknownIdentifier { name, offset: at })
                }
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            other => Err(syntax(at, format!("unexpected {}", describe(&other)))),
        }
    }
}

/// Parses with the default context (variable `t`, parameters `a`, `b`).
pub fn parse(text: &str) -> Result<Expr> {
    parse_with(text, &ParseContext::default())
}

pub fn parse_with(text: &str, ctx: &ParseContext) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        ctx,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.offset(),
            format!("unexpected {} after expression", describe(p.peek())),
        ));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    #[test]
    fn conformable_coefficient() {
        let e = parse("t^(1-a)").unwrap();
        let want = Expr::binary(
            BinaryOp::Pow,
            Expr::var("t"),
            Expr::binary(BinaryOp::Sub, c(1.0), Expr::param("a")),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn truncated_m_coefficient() {
        let e = parse("t^(1-a)/gamma(1+b)").unwrap();
        let want = Expr::binary(
            BinaryOp::Div,
            parse("t^(1-a)").unwrap(),
            Expr::unary(UnaryOp::Gamma, Expr::binary(BinaryOp::Add, c(1.0), Expr::param("b"))),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn incomplete_expression_offset() {
        assert_eq!(
            parse("1+"),
            Err(Error::Syntax {
                offset: 2,
                message: "unexpected end of input".into()
            })
        );
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse("2^3^2").unwrap();
        let want = Expr::binary(BinaryOp::Pow, c(2.0), Expr::binary(BinaryOp::Pow, c(3.0), c(2.0)));
        assert_eq!(e, want);
    }

    #[test]
    fn unary_minus_binds_to_its_operand() {
        // factor := unary ('^' factor)?, so -t^2 is (-t)^2
        let e = parse("-t^2").unwrap();
        let want = Expr::binary(BinaryOp::Pow, Expr::unary(UnaryOp::Neg, Expr::var("t")), c(2.0));
        assert_eq!(e, want);
        assert!(parse("2^-t").is_ok());
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse(" t  *\t2 ").unwrap(), parse("t*2").unwrap());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse("1.5e-3").unwrap(), c(1.5e-3));
        assert_eq!(parse("2E2").unwrap(), c(200.0));
        assert_eq!(parse(".25").unwrap(), c(0.25));
        assert!(matches!(parse("1e999"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("."), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn unknown_identifiers() {
        assert_eq!(
            parse("t + k"),
            Err(Error::UnknownIdentifier {
                name: "k".into(),
                offset: 4
            })
        );
        assert!(matches!(parse("sqrt(t)"), Err(Error::UnknownIdentifier { offset: 0, .. })));
        let ctx = ParseContext::default().with_parameter("k");
        assert_eq!(parse_with("k", &ctx).unwrap(), Expr::param("k"));
    }

    #[test]
    fn coordinates_context() {
        let ctx = ParseContext::coordinates(2, Vec::<String>::new());
        let e = parse_with("sin(x1)^2", &ctx).unwrap();
        assert!(e.mentions("x1"));
        assert!(matches!(parse_with("t", &ctx), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("(t"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("t)"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse("exp t"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse("t $ 2"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("*t"), Err(Error::Syntax { offset: 0, .. })));
    }
}
