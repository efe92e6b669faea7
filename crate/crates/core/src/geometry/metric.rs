use nalgebra::DMatrix;

use super::curvature::{self, ChristoffelValues};
use super::Point;
use crate::error::{Error, Result};
use crate::expr::{self, Bindings, Env, Expr, Jet2, ParseContext};
use crate::fracderiv::{CoefficientFunction, LocalFractionalOperator, DEGENERATE_COEFF};

/// A Riemannian metric field on a coordinate patch.
pub trait Metric: Sync {
    fn dim(&self) -> usize;

    /// `(g, g⁻¹)` at `x`.
    fn metric_at(&self, x: &Point) -> Result<(DMatrix<f64>, DMatrix<f64>)>;

    /// Jets of all components `g_ij` along the line `x + s·dir`, row-major.
    fn component_jets(&self, x: &Point, dir: &[f64]) -> Result<Vec<Jet2>>;

    /// Christoffel symbols at `x`, using the fastest exact route available.
    fn christoffel(&self, x: &Point) -> Result<ChristoffelValues> {
        curvature::christoffel_general(self, x)
    }

    fn as_diagonal(&self) -> Option<&DiagonalMetric> {
        None
    }
}

pub(crate) fn check_dim(n: usize, x: &Point) -> Result<()> {
    if x.dim() != n {
        return Err(Error::invalid(
            "point",
            format!("expected {n} coordinates, got {}", x.dim()),
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("point {:?} has non-finite coordinates", x.0)));
    }
    Ok(())
}

/// `⟨,⟩ = Σ_i dx_i² / c_i(x_i)²` with one positive coefficient per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMetric {
    coeffs: Vec<CoefficientFunction>,
}

impl DiagonalMetric {
    /// All coefficients must share the same order α.
    pub fn new(coeffs: Vec<CoefficientFunction>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::invalid("n", format!("dimension must be at least 2, got {}", coeffs.len())));
        }
        let alpha = coeffs[0].alpha();
        if coeffs.iter().any(|c| c.alpha() != alpha) {
            return Err(Error::invalid("alpha", "all axes must share the same alpha"));
        }
        Ok(DiagonalMetric { coeffs })
    }

    /// The same operator on every axis.
    pub fn uniform(op: &LocalFractionalOperator, n: usize) -> Result<Self> {
        DiagonalMetric::new(vec![op.coeff().clone(); n])
    }

    pub fn coeffs(&self) -> &[CoefficientFunction] {
        &self.coeffs
    }

    pub fn alpha(&self) -> f64 {
        self.coeffs[0].alpha()
    }

    /// `(c_i, c_i', c_i'')` at `t`, rejecting degenerate values.
    pub(crate) fn coeff_jet(&self, axis: usize, t: f64) -> Result<Jet2> {
        let j = self.coeffs[axis].jet(t)?;
        if j.v < DEGENERATE_COEFF {
            return Err(Error::domain(format!(
                "coefficient on axis {} is degenerate at {t} (value {:e})",
                axis + 1,
                j.v
            )));
        }
        Ok(j)
    }
}

impl Metric for DiagonalMetric {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn metric_at(&self, x: &Point) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.dim();
        check_dim(n, x)?;
        let mut g = DMatrix::zeros(n, n);
        let mut ginv = DMatrix::zeros(n, n);
        for i in 0..n {
            let c = self.coeff_jet(i, x[i])?.v;
            g[(i, i)] = 1.0 / (c * c);
            ginv[(i, i)] = c * c;
        }
        Ok((g, ginv))
    }

    fn component_jets(&self, x: &Point, dir: &[f64]) -> Result<Vec<Jet2>> {
        let n = self.dim();
        check_dim(n, x)?;
        let mut out = vec![Jet2::constant(0.0); n * n];
        for i in 0..n {
            let c = self.coeff_jet(i, x[i])?;
            let along = Jet2::along(x[i], dir[i]).compose(c.v, c.d1, c.d2);
            out[i * n + i] = (along * along).recip();
        }
        Ok(out)
    }

    fn christoffel(&self, x: &Point) -> Result<ChristoffelValues> {
        curvature::christoffel_diagonal(self, x)
    }

    fn as_diagonal(&self) -> Option<&DiagonalMetric> {
        Some(self)
    }
}

/// A symmetric metric whose components are expressions in `x1..xn`.
/// Only the upper triangle is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralMetric {
    n: usize,
    upper: Vec<Expr>,
    params: Bindings,
    vars: Vec<String>,
}

impl GeneralMetric {
    /// `components` must be a full n×n matrix whose mirrored entries parse
    /// to identical trees.
    pub fn from_strings(components: &[Vec<String>], params: Bindings) -> Result<Self> {
        let n = components.len();
        if n < 2 {
            return Err(Error::invalid("n", format!("dimension must be at least 2, got {n}")));
        }
        if components.iter().any(|row| row.len() != n) {
            return Err(Error::Spec("metric components must form a square matrix".into()));
        }
        let ctx = ParseContext::coordinates(n, params.keys().cloned());
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let e = expr::parse_with(&components[i][j], &ctx)?;
                if i != j {
                    let mirror = expr::parse_with(&components[j][i], &ctx)?;
                    if mirror != e {
                        return Err(Error::Spec(format!(
                            "components ({}, {}) and ({}, {}) differ; the metric must be symmetric",
                            i + 1,
                            j + 1,
                            j + 1,
                            i + 1
                        )));
                    }
                }
                upper.push(e);
            }
        }
        Ok(GeneralMetric {
            n,
            upper,
            params,
            vars: (1..=n).map(|i| format!("x{i}")).collect(),
        })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        let comps: Vec<Vec<String>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { "1" } else { "0" }.to_string()).collect())
            .collect();
        GeneralMetric::from_strings(&comps, Bindings::new())
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + j
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.upper[self.upper_index(i, j)]
    }
}

impl Metric for GeneralMetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn metric_at(&self, x: &Point) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.n;
        let jets = self.component_jets(x, &vec![0.0; n])?;
        let g = DMatrix::from_fn(n, n, |i, j| jets[i * n + j].v);
        for k in 1..=n {
            let minor = g.view((0, 0), (k, k)).clone_owned().determinant();
            if !(minor > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    point: x.0.clone(),
                    minor: k,
                    value: minor,
                });
            }
        }
        let chol = g.clone().cholesky().ok_or_else(|| Error::NotPositiveDefinite {
            point: x.0.clone(),
            minor: n,
            value: f64::NAN,
        })?;
        Ok((g, chol.inverse()))
    }

    fn component_jets(&self, x: &Point, dir: &[f64]) -> Result<Vec<Jet2>> {
        let n = self.n;
        check_dim(n, x)?;
        let env = self
            .vars
            .iter()
            .zip(x.iter().zip(dir))
            .fold(Env::new(&self.params), |env, (name, (&xi, &di))| {
                env.with_var(name, Jet2::along(xi, di))
            });
        let mut out = vec![Jet2::constant(0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.component(i, j).eval(&env)?;
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Ok(out)
    }
}

/// Either kind of metric, as loaded from a specification.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMetric {
    Diagonal(DiagonalMetric),
    General(GeneralMetric),
}

impl AnyMetric {
    fn inner(&self) -> &dyn Metric {
        match self {
            AnyMetric::Diagonal(d) => d,
            AnyMetric::General(g) => g,
        }
    }
}

impl Metric for AnyMetric {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn metric_at(&self, x: &Point) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        self.inner().metric_at(x)
    }

    fn component_jets(&self, x: &Point, dir: &[f64]) -> Result<Vec<Jet2>> {
        self.inner().component_jets(x, dir)
    }

    fn christoffel(&self, x: &Point) -> Result<ChristoffelValues> {
        self.inner().christoffel(x)
    }

    fn as_diagonal(&self) -> Option<&DiagonalMetric> {
        self.inner().as_diagonal()
    }
}
