//! Local fractional derivative operators of the form `c_α(t) · d/dt`.
//!
//! Every named operator is an instance of the same shape and differs only in
//! its coefficient function:
//!
//! | kind          | coefficient `c_α(t)`                         |
//! |---------------|----------------------------------------------|
//! | conformable   | `t^(1-α)`                                    |
//! | alternative   | `t^(1-α)` (same closed form as conformable)  |
//! | truncated M   | `t^(1-α) / Γ(1+β)`                           |
//! | truncated V   | `t^(1-α) Γ(β)(ρ)_q / (Γ(γ+β)(δ)_p)`          |
//! | custom        | any positive C² expression in `t`            |
//!
//! The truncated V-derivative can also be evaluated from its limit
//! definition, `lim_{ε→0} [f(t·H(ε t^{-α})) − f(t)] / ε`, which
//! [`apply_limit_def`] does by Richardson extrapolation. The two routes are
//! independent and are used to check each other.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{self, eval_jet2, Bindings, Expr, Jet2, ParseContext};
use crate::mittag_leffler::{gamma_fn, h_function, pochhammer, MLParams};

/// Coefficient values below this are treated as degenerate.
pub const DEGENERATE_COEFF: f64 = 1e-12;

const SAMPLE_COUNT: usize = 33;

/// Open interval `(lo, hi)` with `0 ≤ lo < hi`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && lo.is_finite() && hi > lo) {
            return Err(Error::invalid(
                "domain",
                format!("need 0 <= lo < hi, got ({lo}, {hi})"),
            ));
        }
        Ok(Interval { lo, hi })
    }

    pub fn positive_reals() -> Self {
        Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    /// Contained in the closure, i.e. usable as an integration endpoint.
    pub fn contains_closed(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    /// Deterministic interior sample used for positivity spot checks.
    fn samples(&self) -> Vec<f64> {
        let n = SAMPLE_COUNT;
        if self.hi.is_finite() {
            let w = self.hi - self.lo;
            (0..n).map(|k| self.lo + w * (k as f64 + 0.5) / n as f64).collect()
        } else {
            (0..n)
                .map(|k| self.lo + libm::pow(10.0, -3.0 + 5.0 * k as f64 / (n - 1) as f64))
                .collect()
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// A positive coefficient function `c_α` on an interval, with its order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFunction {
    alpha: f64,
    expr: Expr,
    bindings: Bindings,
    domain: Interval,
}

impl CoefficientFunction {
    /// Builds the coefficient and spot-checks positivity and smoothness on a
    /// fixed sample of the domain. The parameter `a` is bound to `alpha`.
    pub fn new(alpha: f64, expr: Expr, mut bindings: Bindings, domain: Interval) -> Result<Self> {
        check_alpha(alpha)?;
        bindings.insert("a".into(), alpha);
        let coeff = CoefficientFunction {
            alpha,
            expr,
            bindings,
            domain,
        };
        for t in domain.samples() {
            coeff.jet(t)?;
        }
        Ok(coeff)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// `(c, c', c'')` at `t`.
    pub fn jet(&self, t: f64) -> Result<Jet2> {
        if !self.domain.contains(t) {
            return Err(Error::domain(format!(
                "t = {t} outside coefficient domain ({}, {})",
                self.domain.lo, self.domain.hi
            )));
        }
        self.jet_unchecked(t)
    }

    /// As [`jet`](Self::jet) but along `t + s·rate`, returning derivatives in `s`.
    pub fn jet_along(&self, t: f64, rate: f64) -> Result<Jet2> {
        let j = self.jet(t)?;
        Ok(Jet2::along(t, rate).compose(j.v, j.d1, j.d2))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.jet(t).map(|j| j.v)
    }

    fn jet_unchecked(&self, t: f64) -> Result<Jet2> {
        let j = eval_jet2(&self.expr, t, &self.bindings)?;
        if !(j.v > 0.0) {
            return Err(Error::domain(format!(
                "coefficient `{}` is not positive at t = {t} (value {})",
                self.expr, j.v
            )));
        }
        Ok(j)
    }
}

/// A function of one positive variable that can be evaluated on jets.
pub trait ScalarFunction {
    fn jet(&self, t: f64) -> Result<Jet2>;

    fn value(&self, t: f64) -> Result<f64> {
        self.jet(t).map(|j| j.v)
    }
}

/// An expression in `t` with bound parameters.
#[derive(Debug, Clone)]
pub struct ExprFunction {
    pub expr: Expr,
    pub bindings: Bindings,
}

impl ExprFunction {
    pub fn new(expr: Expr, bindings: Bindings) -> Self {
        ExprFunction { expr, bindings }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(ExprFunction::new(expr::parse(text)?, Bindings::new()))
    }
}

impl ScalarFunction for ExprFunction {
    fn jet(&self, t: f64) -> Result<Jet2> {
        eval_jet2(&self.expr, t, &self.bindings)
    }
}

/// A built-in function given directly as jet arithmetic, e.g.
/// `JetFn(|t: Jet2| t.sin() * t)`.
#[derive(Clone, Copy)]
pub struct JetFn<F>(pub F);

impl<F: Fn(Jet2) -> Jet2> ScalarFunction for JetFn<F> {
    fn jet(&self, t: f64) -> Result<Jet2> {
        let j = (self.0)(Jet2::variable(t));
        if !j.is_finite() {
            return Err(Error::domain(format!("function is not finite at t = {t}")));
        }
        Ok(j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Conformable,
    Alternative,
    TruncatedM,
    TruncatedV,
    Custom,
}

/// Which operator to build, with its kind-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    Conformable,
    Alternative,
    TruncatedM { beta: f64 },
    TruncatedV(MLParams),
    Custom(Expr),
}

impl OperatorSpec {
    pub fn kind(&self) -> OperatorKind {
        match self {
            OperatorSpec::Conformable => OperatorKind::Conformable,
            OperatorSpec::Alternative => OperatorKind::Alternative,
            OperatorSpec::TruncatedM { .. } => OperatorKind::TruncatedM,
            OperatorSpec::TruncatedV(_) => OperatorKind::TruncatedV,
            OperatorSpec::Custom(_) => OperatorKind::Custom,
        }
    }

    /// Parses `conformable`, `alternative`, `truncated-m:beta=<v>`,
    /// `truncated-v:gamma=..,beta=..,rho=..,delta=..,p=..,q=..,trunc=<n>` or
    /// `custom:<expression>`. Custom expressions are parsed against `ctx`.
    pub fn parse_with(text: &str, ctx: &ParseContext) -> Result<Self> {
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r)),
            None => (text.trim(), None),
        };
        match (head, rest) {
            ("conformable", None) => Ok(OperatorSpec::Conformable),
            ("alternative", None) => Ok(OperatorSpec::Alternative),
            ("truncated-m", Some(args)) => {
                let kv = key_values(args, &["beta"])?;
                Ok(OperatorSpec::TruncatedM {
                    beta: required(&kv, "beta")?,
                })
            }
            ("truncated-v", Some(args)) => {
                let kv = key_values(args, &["gamma", "beta", "rho", "delta", "p", "q", "trunc"])?;
                let trunc = required(&kv, "trunc")?;
                if trunc < 0.0 || trunc.fract() != 0.0 || trunc > u32::MAX as f64 {
                    return Err(Error::invalid("trunc", format!("must be a non-negative integer, got {trunc}")));
                }
                Ok(OperatorSpec::TruncatedV(MLParams {
                    gamma: required(&kv, "gamma")?,
                    beta: required(&kv, "beta")?,
                    rho: required(&kv, "rho")?,
                    delta: required(&kv, "delta")?,
                    p: required(&kv, "p")?,
                    q: required(&kv, "q")?,
                    trunc: trunc as u32,
                }))
            }
            ("custom", Some(e)) => Ok(OperatorSpec::Custom(expr::parse_with(e, ctx)?)),
            ("truncated-m", None) => Err(Error::invalid("beta", "truncated-m requires beta=<v>")),
            ("truncated-v", None) => Err(Error::invalid(
                "gamma",
                "truncated-v requires gamma, beta, rho, delta, p, q and trunc",
            )),
            _ => Err(Error::Spec(format!("unrecognised operator `{text}`"))),
        }
    }
}

impl FromStr for OperatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorSpec::parse_with(s, &ParseContext::default())
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorSpec::Conformable => f.write_str("conformable"),
            OperatorSpec::Alternative => f.write_str("alternative"),
            OperatorSpec::TruncatedM { beta } => write!(f, "truncated-m:beta={beta}"),
            OperatorSpec::TruncatedV(m) => write!(
                f,
                "truncated-v:gamma={},beta={},rho={},delta={},p={},q={},trunc={}",
                m.gamma, m.beta, m.rho, m.delta, m.p, m.q, m.trunc
            ),
            OperatorSpec::Custom(e) => write!(f, "custom:{e}"),
        }
    }
}

fn key_values(args: &str, allowed: &[&str]) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Spec(format!("expected key=value, got `{part}`")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(Error::Spec(format!("unknown operator parameter `{k}`")));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Spec(format!("parameter `{k}` is not a number: `{}`", v.trim())))?;
        out.push((k.to_string(), v));
    }
    Ok(out)
}

fn required(kv: &[(String, f64)], key: &str) -> Result<f64> {
    kv.iter()
        .rev()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::invalid(key, "missing"))
}

/// `Γ(β)(ρ)_q / (Γ(γ+β)(δ)_p)`, the t-independent factor of the V-coefficient.
fn v_constant(params: &MLParams) -> Result<f64> {
    params.validate()?;
    let num = gamma_fn(params.beta)? * pochhammer(params.rho, params.q, 1)?;
    let den = gamma_fn(params.gamma + params.beta)? * pochhammer(params.delta, params.p, 1)?;
    Ok(num / den)
}

/// Closed-form coefficient of the truncated V-fractional derivative,
/// `t^(1-α) Γ(β)(ρ)_q / (Γ(γ+β)(δ)_p)`.
pub fn v_coefficient(params: &MLParams, alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    Ok(libm::pow(t, 1.0 - alpha) * v_constant(params)?)
}

/// `c_α(t) · d/dt` bound to a concrete coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFractionalOperator {
    kind: OperatorKind,
    coeff: CoefficientFunction,
    ml: Option<MLParams>,
}

impl LocalFractionalOperator {
    /// Wraps an arbitrary coefficient as a `Custom` operator.
    pub fn custom(coeff: CoefficientFunction) -> Self {
        LocalFractionalOperator {
            kind: OperatorKind::Custom,
            coeff,
            ml: None,
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn coeff(&self) -> &CoefficientFunction {
        &self.coeff
    }

    pub fn alpha(&self) -> f64 {
        self.coeff.alpha
    }

    pub fn ml_params(&self) -> Option<&MLParams> {
        self.ml.as_ref()
    }
}

fn conformable_expr() -> Expr {
    use expr::BinaryOp::{Pow, Sub};
    Expr::binary(
        Pow,
        Expr::var("t"),
        Expr::binary(Sub, Expr::Const(1.0), Expr::param("a")),
    )
}

/// Builds a named operator. `extra` supplies parameter bindings for custom
/// coefficients.
pub fn make_operator(spec: &OperatorSpec, alpha: f64, extra: &Bindings) -> Result<LocalFractionalOperator> {
    use expr::BinaryOp::{Add, Div, Mul};
    check_alpha(alpha)?;
    let domain = Interval::positive_reals();
    let (expr, bindings, ml) = match spec {
        OperatorSpec::Conformable | OperatorSpec::Alternative => {
            (conformable_expr(), Bindings::new(), None)
        }
        OperatorSpec::TruncatedM { beta } => {
            if !(*beta > 0.0 && beta.is_finite()) {
                return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
            }
            let e = Expr::binary(
                Div,
                conformable_expr(),
                Expr::unary(
                    expr::UnaryOp::Gamma,
                    Expr::binary(Add, Expr::Const(1.0), Expr::param("b")),
                ),
            );
            (e, Bindings::from([("b".to_string(), *beta)]), None)
        }
        OperatorSpec::TruncatedV(params) => {
            params.validate()?;
            if params.trunc == 0 {
                return Err(Error::invalid(
                    "trunc",
                    "must be at least 1; with trunc = 0 the limit definition is identically 0",
                ));
            }
            let k = v_constant(params)?;
            let e = Expr::binary(Mul, conformable_expr(), Expr::Const(k));
            (e, Bindings::new(), Some(*params))
        }
        OperatorSpec::Custom(e) => (e.clone(), extra.clone(), None),
    };
    let coeff = CoefficientFunction::new(alpha, expr, bindings, domain)?;
    Ok(LocalFractionalOperator {
        kind: spec.kind(),
        coeff,
        ml,
    })
}

/// `c_α(t) · f'(t)`.
pub fn apply(op: &LocalFractionalOperator, f: &dyn ScalarFunction, t: f64) -> Result<f64> {
    let c = op.coeff.jet(t)?.v;
    let fj = f.jet(t)?;
    Ok(c * fj.d1)
}

/// Result of a numerically extrapolated limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub value: f64,
    /// Difference between the last two extrapolants.
    pub achieved_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitOptions {
    pub eps_schedule: Vec<f64>,
    /// Relative to `max(1, |value|)`.
    pub tol: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            eps_schedule: (0..=6).map(|k| 1e-2 * libm::pow(2.0, -(k as f64))).collect(),
            tol: 1e-6,
        }
    }
}

fn check_schedule(name: &str, s: &[f64], min_len: usize) -> Result<()> {
    if s.len() < min_len {
        return Err(Error::invalid(name, format!("needs at least {min_len} entries")));
    }
    if s.iter().any(|e| !(*e > 0.0 && e.is_finite())) || s.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid(name, "must be positive and strictly decreasing"));
    }
    Ok(())
}

/// Neville extrapolation of `(x_k, y_k)` to `x = 0`, `levels` deep.
/// Returns every extrapolant of the deepest level, in schedule order.
fn extrapolate_to_zero(xs: &[f64], ys: &[f64], levels: usize) -> Vec<f64> {
    let mut cur = ys.to_vec();
    for level in 1..=levels {
        cur = (0..cur.len() - 1)
            .map(|k| {
                let (xa, xb) = (xs[k], xs[k + level]);
                (xa * cur[k + 1] - xb * cur[k]) / (xa - xb)
            })
            .collect();
    }
    cur
}

/// Evaluates the truncated V-fractional derivative from its limit
/// definition, `lim [f(t·H(ε t^{-α})) − f(t)] / ε`, using two levels of
/// Richardson extrapolation over `opts.eps_schedule`.
pub fn apply_limit_def(
    params: &MLParams,
    alpha: f64,
    f: &dyn ScalarFunction,
    t: f64,
    opts: &LimitOptions,
) -> Result<LimitEstimate> {
    params.validate()?;
    check_alpha(alpha)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    check_schedule("eps_schedule", &opts.eps_schedule, 3)?;
    let base = f.value(t)?;
    let scale = libm::pow(t, -alpha);
    let quotients = opts
        .eps_schedule
        .iter()
        .map(|&eps| {
            let moved = t * h_function(params, eps * scale)?;
            Ok((f.value(moved)? - base) / eps)
        })
        .collect::<Result<Vec<f64>>>()?;
    let xs = &opts.eps_schedule;
    let level2 = extrapolate_to_zero(xs, &quotients, 2);
    let value = *level2.last().expect("schedule has at least 3 entries");
    let previous = if level2.len() >= 2 {
        level2[level2.len() - 2]
    } else {
        *extrapolate_to_zero(xs, &quotients, 1).last().unwrap()
    };
    let achieved_tol = (value - previous).abs();
    if !value.is_finite() || achieved_tol > opts.tol * value.abs().max(1.0) {
        return Err(Error::NonConvergence {
            message: format!(
                "limit definition at t = {t} did not stabilise (spread {achieved_tol:e})"
            ),
            last: [previous, value],
        });
    }
    Ok(LimitEstimate {
        value,
        achieved_tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLimitOptions {
    pub t_schedule: Vec<f64>,
    /// Absolute.
    pub tol: f64,
}

impl Default for ZeroLimitOptions {
    fn default() -> Self {
        ZeroLimitOptions {
            t_schedule: (1..=8).map(|k| libm::pow(10.0, -(k as f64))).collect(),
            tol: 1e-6,
        }
    }
}

/// Value of the operator at `t = 0` as the right limit of `apply` along a
/// decreasing schedule. Converged when the last two samples differ by at
/// most `opts.tol`.
pub fn value_at_zero(
    op: &LocalFractionalOperator,
    f: &dyn ScalarFunction,
    opts: &ZeroLimitOptions,
) -> Result<f64> {
    check_schedule("t_schedule", &opts.t_schedule, 2)?;
    let samples = opts
        .t_schedule
        .iter()
        .map(|&t| apply(op, f, t))
        .collect::<Result<Vec<f64>>>()?;
    let n = samples.len();
    let (prev, last) = (samples[n - 2], samples[n - 1]);
    if !((last - prev).abs() <= opts.tol) {
        return Err(Error::NonConvergence {
            message: format!(
                "derivative has no numerical limit as t -> 0+ (last t = {:e})",
                opts.t_schedule[n - 1]
            ),
            last: [prev, last],
        });
    }
    Ok(last)
}
