//! Oracles and fixtures shared by the integration tests. Nothing here calls
//! into the library's special functions or curvature code.

#![allow(dead_code)]

use fracgeom::expr::{self, Bindings};
use fracgeom::fracderiv::{make_operator, LocalFractionalOperator, OperatorSpec};
use fracgeom::geometry::DiagonalMetric;
use fracgeom::mittag_leffler::MLParams;
use rand::Rng;

pub const TAU_LN_HALF: f64 = 0.918_938_533_204_672_8; // ½ ln(2π)

/// Γ(x) for x > 0 from the Stirling series after shifting the argument
/// above 30 with the recurrence. About 1e-14 relative accuracy.
pub fn gamma_oracle(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut y = x;
    let mut shift = 1.0;
    while y < 30.0 {
        shift *= y;
        y += 1.0;
    }
    let r = 1.0 / y;
    let r2 = r * r;
    let series = r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
    let ln = (y - 0.5) * y.ln() - y + TAU_LN_HALF + series;
    ln.exp() / shift
}

/// Term-by-term partial sum of the six-parameter series, with its absolute
/// sum for condition-aware comparisons.
pub fn ml_naive(p: &MLParams, z: f64) -> (f64, f64) {
    let (g_rho, g_delta) = (gamma_oracle(p.rho), gamma_oracle(p.delta));
    let mut sum = 0.0;
    let mut abs = 0.0;
    for k in 0..=p.trunc {
        let k = k as f64;
        let num = gamma_oracle(p.rho + p.q * k) / g_rho;
        let den = gamma_oracle(p.delta + p.p * k) / g_delta;
        let term = num / den * z.powi(k as i32) / gamma_oracle(p.gamma * k + p.beta);
        sum += term;
        abs += term.abs();
    }
    (sum, abs)
}

/// Metric as a plain closure of the coordinates.
pub type MetricFn<'a> = &'a dyn Fn(&[f64]) -> Vec<Vec<f64>>;

fn d5(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let row_c = m[c].clone();
                for (v, w) in m[r].iter_mut().zip(row_c) {
                    *v -= f * w;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Γ^k_ij, indexed `[k][i][j]`, by fourth-order differences of the metric.
pub fn christoffel_oracle(g: MetricFn, x: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
    let n = x.len();
    let ginv = invert(&g(x));
    // dg[m][a][b] = ∂_m g_ab
    let dg: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|m| {
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            let f = |s: f64| {
                                let mut y = x.to_vec();
                                y[m] = s;
                                g(&y)[a][b]
                            };
                            d5(&f, x[m], h)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            0.5 * (0..n)
                                .map(|m| ginv[k][m] * (dg[i][j][m] + dg[j][i][m] - dg[m][i][j]))
                                .sum::<f64>()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `R^i_jkl = ∂_l Γ^i_kj − ∂_k Γ^i_lj + Γ^i_lm Γ^m_kj − Γ^i_km Γ^m_lj`,
/// indexed `[i][j][k][l]`, differentiating the oracle Christoffel symbols.
pub fn riemann_oracle(g: MetricFn, x: &[f64], h: f64) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = x.len();
    let gam = christoffel_oracle(g, x, h);
    // dgam[m][i][a][b] = ∂_m Γ^i_ab
    let dgam: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|m| {
            let at = |s: f64| {
                let mut y = x.to_vec();
                y[m] = s;
                christoffel_oracle(g, &y, h)
            };
            let (p2, p1, m1, m2) = (at(x[m] + 2.0 * h), at(x[m] + h), at(x[m] - h), at(x[m] - 2.0 * h));
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|a| {
                            (0..n)
                                .map(|b| {
                                    (-p2[i][a][b] + 8.0 * p1[i][a][b] - 8.0 * m1[i][a][b] + m2[i][a][b]) / (12.0 * h)
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dgam[l][i][k][j] - dgam[k][i][l][j];
                    for m in 0..n {
                        v += gam[i][l][m] * gam[m][k][j] - gam[i][k][m] * gam[m][l][j];
                    }
                    r[i][j][k][l] = v;
                }
            }
        }
    }
    r
}

/// Operator families used throughout the acceptance suite.
#[derive(Debug, Clone)]
pub enum Family {
    Conformable,
    Alternative,
    TruncatedM(f64),
    TruncatedV(MLParams),
    Exp,
    OnePlusSquare,
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Conformable => "conformable".into(),
            Family::Alternative => "alternative".into(),
            Family::TruncatedM(b) => format!("truncated-m(beta={b})"),
            Family::TruncatedV(p) => format!(
                "truncated-v(gamma={:.3},beta={:.3},rho={:.3},delta={:.3},p={:.3},q={:.3},trunc={})",
                p.gamma, p.beta, p.rho, p.delta, p.p, p.q, p.trunc
            ),
            Family::Exp => "custom e^t".into(),
            Family::OnePlusSquare => "custom 1+t^2".into(),
        }
    }

    pub fn spec(&self) -> OperatorSpec {
        match self {
            Family::Conformable => OperatorSpec::Conformable,
            Family::Alternative => OperatorSpec::Alternative,
            Family::TruncatedM(b) => OperatorSpec::TruncatedM { beta: *b },
            Family::TruncatedV(p) => OperatorSpec::TruncatedV(*p),
            Family::Exp => OperatorSpec::Custom(expr::parse("exp(t)").unwrap()),
            Family::OnePlusSquare => OperatorSpec::Custom(expr::parse("1 + t^2").unwrap()),
        }
    }

    pub fn operator(&self, alpha: f64) -> LocalFractionalOperator {
        make_operator(&self.spec(), alpha, &Bindings::new()).unwrap()
    }

    pub fn metric(&self, alpha: f64, n: usize) -> DiagonalMetric {
        DiagonalMetric::uniform(&self.operator(alpha), n).unwrap()
    }

    /// c(t), written out by hand.
    pub fn coeff(&self, alpha: f64, t: f64) -> f64 {
        match self {
            Family::Conformable | Family::Alternative => t.powf(1.0 - alpha),
            Family::TruncatedM(b) => t.powf(1.0 - alpha) / gamma_oracle(1.0 + b),
            Family::TruncatedV(p) => {
                let poch = |r: f64, s: f64| gamma_oracle(r + s) / gamma_oracle(r);
                let k = gamma_oracle(p.beta) * poch(p.rho, p.q) / (gamma_oracle(p.gamma + p.beta) * poch(p.delta, p.p));
                t.powf(1.0 - alpha) * k
            }
            Family::Exp => t.exp(),
            Family::OnePlusSquare => 1.0 + t * t,
        }
    }

    /// c'(t)/c(t), written out by hand.
    pub fn log_derivative(&self, alpha: f64, t: f64) -> f64 {
        match self {
            Family::Conformable | Family::Alternative | Family::TruncatedM(_) | Family::TruncatedV(_) => {
                (1.0 - alpha) / t
            }
            Family::Exp => 1.0,
            Family::OnePlusSquare => 2.0 * t / (1.0 + t * t),
        }
    }
}

pub fn random_ml_params<R: Rng>(rng: &mut R, lo: f64, hi: f64, max_trunc: u32) -> MLParams {
    let mut v = || rng.random_range(lo..hi);
    let (gamma, beta, rho, delta, p, q) = (v(), v(), v(), v(), v(), v());
    MLParams::new(gamma, beta, rho, delta, p, q, rng.random_range(1..=max_trunc)).unwrap()
}

/// conformable; alternative; truncated-M with β ∈ {0.5, 1, 2}; truncated-V
/// with two random parameter sets; e^t; 1 + t².
pub fn families<R: Rng>(rng: &mut R) -> Vec<Family> {
    vec![
        Family::Conformable,
        Family::Alternative,
        Family::TruncatedM(0.5),
        Family::TruncatedM(1.0),
        Family::TruncatedM(2.0),
        Family::TruncatedV(random_ml_params(rng, 0.5, 2.0, 8)),
        Family::TruncatedV(random_ml_params(rng, 0.5, 2.0, 8)),
        Family::Exp,
        Family::OnePlusSquare,
    ]
}

/// α ∈ {0.1, 0.2, …, 1.0}.
pub fn alpha_grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

pub fn sphere_fn(x: &[f64]) -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.0], vec![0.0, x[0].sin().powi(2)]]
}

pub fn sphere_strings() -> Vec<Vec<String>> {
    vec![
        vec!["1".to_string(), "0".to_string()],
        vec!["0".to_string(), "sin(x1)^2".to_string()],
    ]
}

/// Scale-aware relative error: `|a − b| / max(scale, tiny)`.
pub fn rel_to(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Fixed CLI invocations whose JSON output is pinned under `tests/golden`.
pub fn golden_cases() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        (
            "ml",
            vec!["ml", "--gamma", "1", "--beta", "1", "--rho", "1", "--delta", "1", "--p", "1", "--q", "1", "--trunc", "20", "--z", "1"],
        ),
        (
            "deriv",
            vec![
                "deriv",
                "--op",
                "truncated-v:gamma=1,beta=1,rho=1,delta=1,p=1,q=1,trunc=10",
                "--alpha",
                "0.5",
                "--f",
                "t^2",
                "--t",
                "4",
                "--check-limit-def",
            ],
        ),
        (
            "christoffel",
            vec!["christoffel", "--op", "conformable", "--alpha", "0.5", "--n", "2", "--point", "1,4"],
        ),
        (
            "riemann",
            vec![
                "riemann",
                "--metric",
                r#"{"type":"general","n":2,"components":[["1","0"],["0","sin(x1)^2"]]}"#,
                "--point",
                "1.5707963267948966,0.5",
            ],
        ),
        (
            "riemann_fd",
            vec![
                "riemann",
                "--mode",
                "finite-difference",
                "--metric",
                r#"{"type":"general","n":2,"components":[["1","0"],["0","sin(x1)^2"]]}"#,
                "--point",
                "0.7853981633974483,0.5",
            ],
        ),
        (
            "flatness",
            vec![
                "flatness",
                "--op",
                "truncated-m:beta=2",
                "--n",
                "2",
                "--grid",
                "0.5:5:5",
                "--alpha-sweep",
                "0.1:1.0:0.1",
            ],
        ),
        (
            "geodesic",
            vec![
                "geodesic",
                "--op",
                "conformable",
                "--alpha",
                "0.5",
                "--n",
                "2",
                "--x0",
                "1,1",
                "--v0",
                "1,0.5",
                "--steps",
                "20",
                "--check-isometry",
                "--output",
                "json",
            ],
        ),
        (
            "isometry",
            vec!["isometry", "--op", "conformable", "--alpha", "0.5", "--n", "2", "--base", "0,0", "--x", "4,1", "--x", "9,2"],
        ),
    ]
}
