use serde::Deserialize;

use super::metric::{AnyMetric, DiagonalMetric, GeneralMetric};
use crate::error::{Error, Result};
use crate::expr::{self, Bindings, ParseContext};
use crate::fracderiv::{make_operator, CoefficientFunction, Interval, OperatorSpec};

/// JSON metric description.
///
/// ```json
/// {"type":"diagonal","n":2,"alpha":0.5,"coeff":["t^(1-a)","t^(1-a)"],"params":{}}
/// {"type":"general","n":2,"components":[["1","0"],["0","sin(x1)^2"]]}
/// ```
///
/// A diagonal `coeff` entry is either an expression in `t` (parameters `a`,
/// `b` and anything in `params`) or an operator string such as
/// `truncated-m:beta=2`. The optional `domain` is `[lo, hi]` with `hi`
/// possibly `null` for +∞; it defaults to `[0, null]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MetricSpec {
    Diagonal {
        n: usize,
        alpha: f64,
        coeff: Vec<String>,
        #[serde(default)]
        params: Bindings,
        #[serde(default)]
        domain: Option<(f64, Option<f64>)>,
    },
    General {
        n: usize,
        components: Vec<Vec<String>>,
        #[serde(default)]
        params: Bindings,
    },
}

fn looks_like_operator(s: &str) -> bool {
    let s = s.trim();
    matches!(s, "conformable" | "alternative" | "truncated-m" | "truncated-v")
        || ["truncated-m:", "truncated-v:", "custom:"].iter().any(|h| s.starts_with(h))
}

impl MetricSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("metric JSON: {e}")))
    }

    /// A diagonal metric with the same coefficient string on every axis.
    pub fn uniform_diagonal(n: usize, alpha: f64, coeff: &str, params: Bindings) -> Self {
        MetricSpec::Diagonal {
            n,
            alpha,
            coeff: vec![coeff.to_string(); n],
            params,
            domain: None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MetricSpec::Diagonal { n, .. } | MetricSpec::General { n, .. } => *n,
        }
    }

    /// Same specification at a different α (diagonal metrics only).
    pub fn with_alpha(&self, new_alpha: f64) -> Result<Self> {
        match self {
            MetricSpec::Diagonal { .. } => {
                let mut s = self.clone();
                if let MetricSpec::Diagonal { alpha, .. } = &mut s {
                    *alpha = new_alpha;
                }
                Ok(s)
            }
            MetricSpec::General { .. } => Err(Error::Spec("alpha only applies to diagonal metrics".into())),
        }
    }

    pub fn build(&self) -> Result<AnyMetric> {
        match self {
            MetricSpec::Diagonal {
                n,
                alpha,
                coeff,
                params,
                domain,
            } => {
                if coeff.len() != *n {
                    return Err(Error::Spec(format!(
                        "diagonal metric has n = {n} but {} coefficient entries",
                        coeff.len()
                    )));
                }
                let domain = match domain {
                    None => Interval::positive_reals(),
                    Some((lo, hi)) => Interval::new(*lo, hi.unwrap_or(f64::INFINITY))?,
                };
                let ctx = params
                    .keys()
                    .fold(ParseContext::default(), |ctx, k| ctx.with_parameter(k.clone()));
                let coeffs = coeff
                    .iter()
                    .map(|text| {
                        if looks_like_operator(text) {
                            let spec = OperatorSpec::parse_with(text, &ctx)?;
                            let op = make_operator(&spec, *alpha, params)?;
                            let c = op.coeff();
                            CoefficientFunction::new(*alpha, c.expr().clone(), c.bindings().clone(), domain)
                        } else {
                            let e = expr::parse_with(text, &ctx)?;
                            CoefficientFunction::new(*alpha, e, params.clone(), domain)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyMetric::Diagonal(DiagonalMetric::new(coeffs)?))
            }
            MetricSpec::General { n, components, params } => {
                if components.len() != *n {
                    return Err(Error::Spec(format!(
                        "general metric has n = {n} but {} component rows",
                        components.len()
                    )));
                }
                Ok(AnyMetric::General(GeneralMetric::from_strings(components, params.clone())?))
            }
        }
    }
}
