use serde::Serialize;

use super::metric::{check_dim, DiagonalMetric, Metric};
use super::Point;
use crate::error::Result;

/// `Γ^k_ij` at a point, stored as `values[k][i][j]` flattened.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChristoffelValues {
    pub point: Point,
    pub n: usize,
    pub values: Vec<f64>,
}

impl ChristoffelValues {
    fn zeros(point: Point) -> Self {
        let n = point.dim();
        ChristoffelValues {
            point,
            n,
            values: vec![0.0; n * n * n],
        }
    }

    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.n + i) * self.n + j
    }

    /// `Γ^k_ij` (zero-based indices).
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.values[self.idx(k, i, j)]
    }

    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let at = self.idx(k, i, j);
        self.values[at] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Nested `[k][i][j]` arrays.
    pub fn nested(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.n;
        (0..n)
            .map(|k| (0..n).map(|i| (0..n).map(|j| self.get(k, i, j)).collect()).collect())
            .collect()
    }
}

/// `R^i_jkl` at a point, stored as `values[i][j][k][l]` flattened.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiemannValues {
    pub point: Point,
    pub n: usize,
    pub values: Vec<f64>,
    /// Finite-difference mode only: worst number of decimal digits lost to
    /// cancellation in a central difference.
    pub digits_lost: Option<f64>,
}

impl RiemannValues {
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    /// `R^i_jkl` (zero-based indices).
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.values[self.idx(i, j, k, l)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Zero-based `(i, j, k, l)` of the first entry with the largest magnitude.
    pub fn argmax(&self) -> [usize; 4] {
        let n = self.n;
        let mut best = (0.0, 0);
        for (at, v) in self.values.iter().enumerate() {
            if v.abs() > best.0 {
                best = (v.abs(), at);
            }
        }
        let a = best.1;
        [a / (n * n * n), (a / (n * n)) % n, (a / n) % n, a % n]
    }

    /// True when more than half the working digits cancelled somewhere.
    pub fn step_too_small(&self) -> bool {
        self.digits_lost.is_some_and(|d| d > f64::DIGITS as f64 / 2.0)
    }

    pub fn nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| (0..n).map(|l| self.get(i, j, k, l)).collect()).collect())
                    .collect()
            })
            .collect()
    }
}

/// How derivatives of the Christoffel symbols are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureMode {
    /// Exact derivatives propagated through order-2 jets.
    ClosedFormJets,
    /// Central differences of Christoffel values. `step` overrides the
    /// default `1e-4 · max(1, |x_l|)` on every axis.
    FiniteDifference { step: Option<f64> },
}

/// `Γ^k_ij = ½ Σ_m g^{km} (∂_i g_jm + ∂_j g_im − ∂_m g_ij)` with the
/// component derivatives taken from jets.
pub fn christoffel_general<M: Metric + ?Sized>(metric: &M, x: &Point) -> Result<ChristoffelValues> {
    Ok(christoffel_with_derivative(metric, x, false)?.0)
}

/// Closed form for the diagonal metric: `Γ^i_ii = −c_i'(x_i)/c_i(x_i)`,
/// every other entry exactly zero.
pub fn christoffel_diagonal(metric: &DiagonalMetric, x: &Point) -> Result<ChristoffelValues> {
    Ok(diagonal_with_derivative(metric, x)?.0)
}

/// `∂_l Γ^k_ij`, stored as `[l][k][i][j]` flattened.
type ChristoffelDerivative = Vec<f64>;

fn unit(n: usize, a: usize) -> Vec<f64> {
    let mut d = vec![0.0; n];
    d[a] = 1.0;
    d
}

fn diagonal_with_derivative(metric: &DiagonalMetric, x: &Point) -> Result<(ChristoffelValues, ChristoffelDerivative)> {
    let n = metric.dim();
    check_dim(n, x)?;
    let mut gamma = ChristoffelValues::zeros(x.clone());
    let mut dgamma = vec![0.0; n * n * n * n];
    for i in 0..n {
        let c = metric.coeff_jet(i, x[i])?;
        gamma.set(i, i, i, -c.d1 / c.v);
        // d/dx (−c'/c) = −(c''c − c'²)/c²
        dgamma[((i * n + i) * n + i) * n + i] = -(c.d2 * c.v - c.d1 * c.d1) / (c.v * c.v);
    }
    Ok((gamma, dgamma))
}

/// General Christoffel symbols, optionally with their exact first
/// derivatives. Mixed second partials of the components come from
/// polarisation: the second derivative along `e_a + e_b` equals
/// `H_aa + 2 H_ab + H_bb`.
fn christoffel_with_derivative<M: Metric + ?Sized>(
    metric: &M,
    x: &Point,
    with_derivative: bool,
) -> Result<(ChristoffelValues, ChristoffelDerivative)> {
    let n = metric.dim();
    check_dim(n, x)?;
    let (_, ginv) = metric.metric_at(x)?;
    let nn = n * n;

    // axis jets: first and pure second partials of every component
    let axis: Vec<_> = (0..n)
        .map(|a| metric.component_jets(x, &unit(n, a)))
        .collect::<Result<_>>()?;
    // dg[a][i*n+j] = ∂_a g_ij
    let dg: Vec<Vec<f64>> = axis.iter().map(|js| js.iter().map(|j| j.d1).collect()).collect();

    // S[m][i][j] = ∂_i g_jm + ∂_j g_im − ∂_m g_ij
    let s = |m: usize, i: usize, j: usize, d: &dyn Fn(usize, usize) -> f64| -> f64 {
        d(i, j * n + m) + d(j, i * n + m) - d(m, i * n + j)
    };
    let first = |a: usize, c: usize| dg[a][c];

    let mut gamma = ChristoffelValues::zeros(x.clone());
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for m in 0..n {
                    acc += ginv[(k, m)] * s(m, i, j, &first);
                }
                gamma.set(k, i, j, 0.5 * acc);
            }
        }
    }
    if !with_derivative {
        return Ok((gamma, Vec::new()));
    }

    // hess[a][b][c] = ∂_a ∂_b of component c
    let mut hess = vec![vec![vec![0.0; nn]; n]; n];
    for a in 0..n {
        for c in 0..nn {
            hess[a][a][c] = axis[a][c].d2;
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut dir = vec![0.0; n];
            dir[a] = 1.0;
            dir[b] = 1.0;
            let diag = metric.component_jets(x, &dir)?;
            for c in 0..nn {
                let mixed = 0.5 * (diag[c].d2 - hess[a][a][c] - hess[b][b][c]);
                hess[a][b][c] = mixed;
                hess[b][a][c] = mixed;
            }
        }
    }

    let mut dgamma = vec![0.0; n * n * n * n];
    for l in 0..n {
        // ∂_l g⁻¹ = −g⁻¹ (∂_l g) g⁻¹
        let dgl = nalgebra::DMatrix::from_fn(n, n, |i, j| dg[l][i * n + j]);
        let dginv = -(&ginv * dgl * &ginv);
        let second = |a: usize, c: usize| hess[l][a][c];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        acc += dginv[(k, m)] * s(m, i, j, &first) + ginv[(k, m)] * s(m, i, j, &second);
                    }
                    dgamma[((l * n + k) * n + i) * n + j] = 0.5 * acc;
                }
            }
        }
    }
    Ok((gamma, dgamma))
}

/// `R^i_jkl = ∂_l Γ^i_kj − ∂_k Γ^i_lj + Σ_m Γ^i_lm Γ^m_kj − Σ_m Γ^i_km Γ^m_lj`.
fn assemble(gamma: &ChristoffelValues, dgamma: &[f64], digits_lost: Option<f64>) -> RiemannValues {
    let n = gamma.n;
    let dg = |l: usize, k: usize, i: usize, j: usize| dgamma[((l * n + k) * n + i) * n + j];
    let mut values = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut r = dg(l, i, k, j) - dg(k, i, l, j);
                    for m in 0..n {
                        r += gamma.get(i, l, m) * gamma.get(m, k, j);
                        r -= gamma.get(i, k, m) * gamma.get(m, l, j);
                    }
                    values[((i * n + j) * n + k) * n + l] = r;
                }
            }
        }
    }
    RiemannValues {
        point: gamma.point.clone(),
        n,
        values,
        digits_lost,
    }
}

/// Riemann curvature components at `x`.
///
/// In closed-form mode diagonal metrics differentiate the closed-form
/// Christoffel symbols through the coefficient jets, and general metrics
/// differentiate the general formula exactly. Finite-difference mode takes
/// central differences of [`christoffel_general`] and is independent of
/// both.
pub fn riemann<M: Metric + ?Sized>(metric: &M, x: &Point, mode: CurvatureMode) -> Result<RiemannValues> {
    match mode {
        CurvatureMode::ClosedFormJets => {
            let (gamma, dgamma) = match metric.as_diagonal() {
                Some(d) => diagonal_with_derivative(d, x)?,
                None => christoffel_with_derivative(metric, x, true)?,
            };
            Ok(assemble(&gamma, &dgamma, None))
        }
        CurvatureMode::FiniteDifference { step } => {
            let n = metric.dim();
            check_dim(n, x)?;
            let gamma = christoffel_general(metric, x)?;
            let mut dgamma = vec![0.0; n * n * n * n];
            let mut worst: f64 = 0.0;
            for l in 0..n {
                let h = step.unwrap_or(1e-4 * x[l].abs().max(1.0));
                let plus = christoffel_general(metric, &x.shifted(l, h))?;
                let minus = christoffel_general(metric, &x.shifted(l, -h))?;
                for (at, (p, m)) in plus.values.iter().zip(&minus.values).enumerate() {
                    let diff = p - m;
                    let scale = p.abs().max(m.abs());
                    if diff != 0.0 {
                        worst = worst.max((scale / diff.abs()).log10().max(0.0));
                    }
                    dgamma[l * n * n * n + at] = diff / (2.0 * h);
                }
            }
            Ok(assemble(&gamma, &dgamma, Some(worst)))
        }
    }
}
