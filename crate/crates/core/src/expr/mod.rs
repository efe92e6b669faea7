//! Coefficient-function expressions.
//!
//! Expressions are parsed from text (see [`parse`]) into an [`Expr`] tree and
//! evaluated on order-2 jets, which yields the value together with its first
//! and second derivative along one direction. Parameters are constants during
//! differentiation; only variables carry derivatives.

mod jet;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

pub use jet::Jet2;
pub use parser::{parse, parse_with, ParseContext};

use crate::error::{Error, Result};
use crate::special::gamma_fn;

/// Parameter name to value.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Gamma,
}

impl UnaryOp {
    pub(crate) fn from_function_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "gamma" => UnaryOp::Gamma,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Expression tree. Variables carry derivatives, parameters do not.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Param(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Evaluates the jet of the expression in `env`.
    pub fn eval(&self, env: &Env<'_>) -> Result<Jet2> {
        let out = match self {
            Expr::Const(c) => Jet2::constant(*c),
            Expr::Var(name) => env.var(name)?,
            Expr::Param(name) => Jet2::constant(env.param(name)?),
            Expr::Unary(op, arg) => eval_unary(*op, arg.eval(env)?)?,
            Expr::Binary(op, l, r) => eval_binary(*op, l.eval(env)?, r.eval(env)?)?,
        };
        if !out.is_finite() {
            return Err(Error::domain(format!("`{self}` is not finite here ({out:?})")));
        }
        Ok(out)
    }

    /// Plain value, no derivatives.
    pub fn value(&self, env: &Env<'_>) -> Result<f64> {
        self.eval(env).map(|j| j.v)
    }

    /// True if the tree mentions the variable `name`.
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Expr::Var(v) => v == name,
            Expr::Const(_) | Expr::Param(_) => false,
            Expr::Unary(_, a) => a.mentions(name),
            Expr::Binary(_, l, r) => l.mentions(name) || r.mentions(name),
        }
    }

    /// Parameter names referenced by the tree, sorted and deduplicated.
    pub fn params(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Param(p) => out.push(p.clone()),
                Expr::Const(_) | Expr::Var(_) => {}
                Expr::Unary(_, a) => walk(a, out),
                Expr::Binary(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

fn eval_unary(op: UnaryOp, a: Jet2) -> Result<Jet2> {
    Ok(match op {
        UnaryOp::Neg => -a,
        UnaryOp::Exp => a.exp(),
        UnaryOp::Ln => {
            if a.v <= 0.0 {
                return Err(Error::domain(format!("ln of non-positive value {}", a.v)));
            }
            a.ln()
        }
        UnaryOp::Sin => a.sin(),
        UnaryOp::Cos => a.cos(),
        UnaryOp::Gamma => {
            if !a.is_constant() {
                return Err(Error::domain(
                    "gamma() argument must not depend on the differentiation variable",
                ));
            }
            Jet2::constant(gamma_fn(a.v)?)
        }
    })
}

fn eval_binary(op: BinaryOp, l: Jet2, r: Jet2) -> Result<Jet2> {
    Ok(match op {
        BinaryOp::Add => l + r,
        BinaryOp::Sub => l - r,
        BinaryOp::Mul => l * r,
        BinaryOp::Div => {
            if r.v == 0.0 {
                return Err(Error::domain("division by zero"));
            }
            l / r
        }
        BinaryOp::Pow => {
            if r.is_constant() {
                let out = l.powf(r.v);
                if out.v.is_nan() {
                    return Err(Error::domain(format!(
                        "{}^{} is undefined over the reals",
                        l.v, r.v
                    )));
                }
                out
            } else {
                if l.v <= 0.0 {
                    return Err(Error::domain(format!(
                        "power with varying exponent needs a positive base, got {}",
                        l.v
                    )));
                }
                l.powj(r)
            }
        }
    })
}

/// Evaluation environment: variable jets plus parameter values.
#[derive(Debug, Clone)]
pub struct Env<'a> {
    vars: Vec<(&'a str, Jet2)>,
    params: &'a Bindings,
}

impl<'a> Env<'a> {
    pub fn new(params: &'a Bindings) -> Self {
        Env {
            vars: Vec::new(),
            params,
        }
    }

    pub fn with_var(mut self, name: &'a str, jet: Jet2) -> Self {
        self.vars.push((name, jet));
        self
    }

    fn var(&self, name: &str) -> Result<Jet2> {
        self.vars
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, j)| *j)
            .ok_or_else(|| Error::UnboundParameter(name.to_string()))
    }

    fn param(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnboundParameter(name.to_string()))
    }
}

/// Jet of a single-variable expression in `t` at `t`.
pub fn eval_jet2(expr: &Expr, t: f64, bindings: &Bindings) -> Result<Jet2> {
    expr.eval(&Env::new(bindings).with_var("t", Jet2::variable(t)))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(n) | Expr::Param(n) => f.write_str(n),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}
