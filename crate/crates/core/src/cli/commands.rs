use serde::Serialize;

use super::output::{coord_names, num, render, Report};
use super::{
    exit_code, Cli, Command, DerivArgs, FlatnessArgs, Format, GeodesicArgs, IsometryArgs, MetricArgs, MlArgs, Mode,
    PointArgs, EXIT_NOT_FLAT, EXIT_NUMERIC, EXIT_OK,
};
use crate::error::{Error, Result};
use crate::expr::{self, Bindings, ParseContext};
use crate::fracderiv::{
    apply, apply_limit_def, make_operator, value_at_zero, ExprFunction, LimitOptions, OperatorSpec, ZeroLimitOptions,
};
use crate::geometry::{
    flatness_scan, geodesic_integrate, isometry_jacobian, isometry_map, riemann, AnyMetric, Grid, Metric, MetricSpec,
    Point, ScanReport,
};
use crate::mittag_leffler::{h_function, ml_truncated, MLParams};

pub(crate) struct Outcome {
    pub body: String,
    pub code: i32,
    pub error: Option<Error>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome {
            body,
            code: EXIT_OK,
            error: None,
        }
    }

    fn failed(e: Error) -> Self {
        Outcome {
            body: String::new(),
            code: exit_code(&e),
            error: Some(e),
        }
    }
}

pub(crate) fn dispatch(cli: &Cli) -> Outcome {
    let format = cli.output.unwrap_or(match cli.command {
        Command::Geodesic(_) => Format::Csv,
        _ => Format::Json,
    });
    let result = match &cli.command {
        Command::Ml(a) => cmd_ml(a, format).map(Outcome::ok),
        Command::Deriv(a) => cmd_deriv(a, cli.tol, format),
        Command::Christoffel(a) => cmd_christoffel(a, format).map(Outcome::ok),
        Command::Riemann(a) => cmd_riemann(a, cli.mode, cli.tol, format).map(Outcome::ok),
        Command::Flatness(a) => cmd_flatness(a, cli.mode, cli.tol, format),
        Command::Geodesic(a) => cmd_geodesic(a, format),
        Command::Isometry(a) => cmd_isometry(a, format).map(Outcome::ok),
    };
    result.unwrap_or_else(Outcome::failed)
}

fn bindings(pairs: &[(String, f64)]) -> Bindings {
    pairs.iter().cloned().collect()
}

fn context(params: &Bindings) -> ParseContext {
    params
        .keys()
        .fold(ParseContext::default(), |ctx, k| ctx.with_parameter(k.clone()))
}

fn scalar_csv(fields: &[(&str, String)]) -> (Vec<String>, Vec<Vec<String>>) {
    (
        fields.iter().map(|(k, _)| k.to_string()).collect(),
        vec![fields.iter().map(|(_, v)| v.clone()).collect()],
    )
}

// ml

#[derive(Serialize)]
struct MlReport {
    command: &'static str,
    params: MLParams,
    z: f64,
    value: f64,
    h: f64,
}

impl Report for MlReport {
    fn csv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let p = &self.params;
        scalar_csv(&[
            ("gamma", num(p.gamma)),
            ("beta", num(p.beta)),
            ("rho", num(p.rho)),
            ("delta", num(p.delta)),
            ("p", num(p.p)),
            ("q", num(p.q)),
            ("trunc", p.trunc.to_string()),
            ("z", num(self.z)),
            ("value", num(self.value)),
            ("h", num(self.h)),
        ])
    }
}

fn cmd_ml(a: &MlArgs, format: Format) -> Result<String> {
    let params = MLParams::new(a.gamma, a.beta, a.rho, a.delta, a.p, a.q, a.trunc)?;
    let report = MlReport {
        command: "ml",
        value: ml_truncated(&params, a.z)?,
        h: h_function(&params, a.z)?,
        params,
        z: a.z,
    };
    Ok(render(&report, format))
}

// deriv

#[derive(Serialize)]
struct LimitCheck {
    value: f64,
    achieved_tol: f64,
    difference: f64,
    relative_difference: f64,
    tol: f64,
    agree: bool,
}

#[derive(Serialize)]
struct DerivReport {
    command: &'static str,
    op: String,
    alpha: f64,
    f: String,
    t: f64,
    method: &'static str,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit_def: Option<LimitCheck>,
}

impl Report for DerivReport {
    fn csv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut fields = vec![
            ("op", self.op.clone()),
            ("alpha", num(self.alpha)),
            ("f", self.f.clone()),
            ("t", num(self.t)),
            ("method", self.method.to_string()),
            ("value", num(self.value)),
        ];
        if let Some(l) = &self.limit_def {
            fields.push(("limit_def", num(l.value)));
            fields.push(("difference", num(l.difference)));
            fields.push(("agree", l.agree.to_string()));
        }
        scalar_csv(&fields)
    }
}

fn cmd_deriv(a: &DerivArgs, tol: Option<f64>, format: Format) -> Result<Outcome> {
    let extra = bindings(&a.params);
    let ctx = context(&extra);
    let spec = OperatorSpec::parse_with(&a.op, &ctx)?;
    let op = make_operator(&spec, a.alpha, &extra)?;
    let mut fb = extra.clone();
    fb.insert("a".into(), a.alpha);
    let f = ExprFunction::new(expr::parse_with(&a.function, &ctx)?, fb);

    let (t, method, value) = if a.limit_at_zero {
        if a.t.is_some_and(|t| t != 0.0) {
            return Err(Error::Spec("--limit-at-zero evaluates at t = 0; drop --t or pass 0".into()));
        }
        (0.0, "limit-at-zero", value_at_zero(&op, &f, &ZeroLimitOptions::default())?)
    } else {
        let t = a
            .t
            .ok_or_else(|| Error::Spec("--t is required unless --limit-at-zero is given".into()))?;
        (t, "closed-form", apply(&op, &f, t)?)
    };

    let mut agree = true;
    let limit_def = if a.check_limit_def {
        let params = op
            .ml_params()
            .ok_or_else(|| Error::Spec("--check-limit-def needs a truncated-v operator".into()))?;
        if a.limit_at_zero {
            return Err(Error::Spec("--check-limit-def cannot be combined with --limit-at-zero".into()));
        }
        let est = apply_limit_def(params, a.alpha, &f, t, &LimitOptions::default())?;
        let tol = tol.unwrap_or(1e-6);
        let difference = (est.value - value).abs();
        let relative_difference = difference / value.abs().max(f64::MIN_POSITIVE);
        agree = difference <= tol * value.abs().max(1.0);
        Some(LimitCheck {
            value: est.value,
            achieved_tol: est.achieved_tol,
            difference,
            relative_difference,
            tol,
            agree,
        })
    } else {
        None
    };

    let report = DerivReport {
        command: "deriv",
        op: spec.to_string(),
        alpha: a.alpha,
        f: a.function.clone(),
        t,
        method,
        value,
        limit_def,
    };
    let body = render(&report, format);
    if agree {
        Ok(Outcome::ok(body))
    } else {
        Ok(Outcome {
            body,
            code: EXIT_NUMERIC,
            error: Some(Error::domain("limit definition and closed form disagree")),
        })
    }
}

// metric plumbing

fn metric_spec(m: &MetricArgs, alpha_override: Option<f64>) -> Result<MetricSpec> {
    let alpha = alpha_override.or(m.alpha);
    match (&m.metric, &m.op) {
        (Some(text), _) => {
            let json = if text.trim_start().starts_with('{') {
                text.clone()
            } else {
                std::fs::read_to_string(text).map_err(|e| Error::Spec(format!("cannot read metric file `{text}`: {e}")))?
            };
            let spec = MetricSpec::from_json(&json)?;
            match alpha {
                Some(a) => spec.with_alpha(a),
                None => Ok(spec),
            }
        }
        (None, Some(op)) => {
            let n = m.n.ok_or_else(|| Error::Spec("--op needs --n".into()))?;
            let alpha = alpha.ok_or_else(|| Error::Spec("--op needs --alpha".into()))?;
            Ok(MetricSpec::uniform_diagonal(n, alpha, op, bindings(&m.params)))
        }
        (None, None) => Err(Error::Spec("give either --metric or --op".into())),
    }
}

fn point(coords: &[f64], name: &str, n: usize) -> Result<Point> {
    if coords.len() != n {
        return Err(Error::Spec(format!(
            "--{name} has {} coordinates, the metric has dimension {n}",
            coords.len()
        )));
    }
    Ok(Point::new(coords.to_vec()))
}

// christoffel

#[derive(Serialize)]
struct ChristoffelReport {
    command: &'static str,
    point: Point,
    n: usize,
    max_abs: f64,
    /// `values[k][i][j] = Γ^k_ij`, zero-based.
    values: Vec<Vec<Vec<f64>>>,
}

impl Report for ChristoffelReport {
    fn csv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let header = ["k", "i", "j", "value"].map(String::from).to_vec();
        let mut rows = Vec::new();
        for (k, a) in self.values.iter().enumerate() {
            for (i, b) in a.iter().enumerate() {
                for (j, v) in b.iter().enumerate() {
                    rows.push(vec![k.to_string(), i.to_string(), j.to_string(), num(*v)]);
                }
            }
        }
        (header, rows)
    }
}

fn cmd_christoffel(a: &PointArgs, format: Format) -> Result<String> {
    let metric = metric_spec(&a.metric, None)?.build()?;
    let x = point(&a.point.0, "point", metric.dim())?;
    let g = metric.christoffel(&x)?;
    let report = ChristoffelReport {
        command: "christoffel",
        n: g.n,
        max_abs: g.max_abs(),
        values: g.nested(),
        point: g.point,
    };
    Ok(render(&report, format))
}

// riemann

#[derive(Serialize)]
struct RiemannReport {
    command: &'static str,
    mode: &'static str,
    point: Point,
    n: usize,
    #[serde(rename = "max_abs_R")]
    max_abs_r: f64,
    /// Zero-based `(i, j, k, l)` of the largest component.
    argmax: [usize; 4],
    pass: bool,
    tol: f64,
    digits_lost: Option<f64>,
    /// `values[i][j][k][l] = R^i_jkl`, zero-based.
    values: Vec<Vec<Vec<Vec<f64>>>>,
}

impl Report for RiemannReport {
    fn csv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let header = ["i", "j", "k", "l", "value"].map(String::from).to_vec();
        let mut rows = Vec::new();
        for (i, a) in self.values.iter().enumerate() {
            for (j, b) in a.iter().enumerate() {
                for (k, c) in b.iter().enumerate() {
                    for (l, v) in c.iter().enumerate() {
                        rows.push(vec![i.to_string(), j.to_string(), k.to_string(), l.to_string(), num(*v)]);
                    }
                }
            }
        }
        (header, rows)
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::ClosedForm => "closed-form",
        Mode::FiniteDifference => "finite-difference",
    }
}

fn cmd_riemann(a: &PointArgs, mode: Mode, tol: Option<f64>, format: Format) -> Result<String> {
    let metric = metric_spec(&a.metric, None)?.build()?;
    let x = point(&a.point.0, "point", metric.dim())?;
    let r = riemann(&metric, &x, mode.curvature(a.h))?;
    let tol = tol.unwrap_or(mode.default_tol());
    let max_abs_r = r.max_abs();
    let report = RiemannReport {
        command: "riemann",
        mode: mode_name(mode),
        n: r.n,
        max_abs_r,
        argmax: r.argmax(),
        pass: max_abs_r <= tol,
        tol,
        digits_lost: r.digits_lost,
        values: r.nested(),
        point: r.point,
    };
    Ok(render(&report, format))
}

// flatness

#[derive(Serialize)]
struct FlatnessRun {
    alpha: Option<f64>,
    #[serde(flatten)]
    scan: ScanReport,
    #[serde(skip)]
    points: Vec<Point>,
}

#[derive(Serialize)]
struct FlatnessReport {
    command: &'static str,
    mode: &'static str,
    grid: String,
    tol: f64,
    pass: bool,
    runs: Vec<FlatnessRun>,
}

impl Report for FlatnessReport {
    /// One row per grid point and α.
    fn csv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let n = self.runs.first().map_or(0, |r| r.scan.argmax_point.dim());
        let mut header = vec!["alpha".to_string(), "index".to_string()];
        header.extend(coord_names("x", n));
        header.push("max_abs_R".into());
        let mut rows = Vec::new();
        for run in &self.runs {
            for (k, (p, v)) in run.points.iter().zip(&run.scan.per_point).enumerate() {
                let mut row = vec![run.alpha.map_or(String::new(), num), k.to_string()];
                row.extend(p.iter().map(|c| num(*c)));
                row.push(num(*v));
                rows.push(row);
            }
        }
        (header, rows)
    }
}

fn parse_triple(text: &str, flag: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Spec(format!("--{flag} expects a:b:c, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(bad)?;
    Ok((v[0], v[1], v[2]))
}

/// `from:to:step` inclusive, rounded to 12 decimals so that `0.1:1.0:0.1`
/// yields exactly 0.1, 0.2, ..., 1.0.
fn sweep(text: &str) -> Result<Vec<f64>> {
    let (from, to, step) = parse_triple(text, "alpha-sweep")?;
    if !(step > 0.0) || to < from {
        return Err(Error::Spec("--alpha-sweep needs from <= to and a positive step".into()));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| (libm::round((from + step * k as f64) * 1e12)) / 1e12)
        .collect())
}

fn grid(text: &str, n: usize) -> Result<Grid> {
    let (lo, hi, count) = parse_triple(text, "grid")?;
    if count < 1.0 || count.fract() != 0.0 || !(lo <= hi) {
        return Err(Error::Spec("--grid expects lo:hi:count with lo <= hi and an integer count >= 1".into()));
    }
    Grid::uniform(n, lo, hi, count as usize)
}

fn cmd_flatness(a: &FlatnessArgs, mode: Mode, tol: Option<f64>, format: Format) -> Result<Outcome> {
    let tol = tol.unwrap_or(mode.default_tol());
    let alphas: Vec<Option<f64>> = match &a.alpha_sweep {
        Some(s) => sweep(s)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut runs = Vec::new();
    for alpha in alphas {
        let metric: AnyMetric = metric_spec(&a.metric, alpha)?.build()?;
        let g = grid(&a.grid, metric.dim())?;
        let scan = flatness_scan(&metric, &g, tol, mode.curvature(a.h))?;
        let points = (0..g.len()).map(|k| g.point(k)).collect();
        runs.push(FlatnessRun {
            alpha: alpha.or(metric.as_diagonal().map(|d| d.alpha())),
            scan,
            points,
        });
    }
    let pass = runs.iter().all(|r| r.scan.pass);
    let report = FlatnessReport {
        command: "flatness",
        mode: mode_name(mode),
        grid: a.grid.clone(),
        tol,
        pass,
        runs,
    };
    let body = render(&report, format);
    Ok(Outcome {
        body,
        code: if pass { EXIT_OK } else { EXIT_NOT_FLAT },
        error: None,
    })
}

// geodesic

#[derive(Serialize)]
struct IsometryCheck {
    /// Largest distance between a mapped path point and the point at the
    /// same parameter on the straight chord from φ(x0) to φ(x_end).
    max_chord_deviation: f64,
    #[serde(skip)]
    mapped: Vec<Point>,
    #[serde(skip)]
    deviations: Vec<f64>,
}

#[derive(Serialize)]
struct GeodesicReport {
    command: &'static str,
    x0: Point,
    v0: Vec<f64>,
    duration: f64,
    steps: usize,
    complete: bool,
    path: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    isometry: Option<IsometryCheck>,
}

impl Report for GeodesicReport {
    fn csv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let n = self.x0.dim();
        let mut header = vec!["step".to_string(), "s".to_string()];
        header.extend(coord_names("x", n));
        if self.isometry.is_some() {
            header.extend(coord_names("phi", n));
            header.push("chord_deviation".into());
        }
        let h = self.duration / self.steps as f64;
        let rows = self
            .path
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut row = vec![k.to_string(), num(h * k as f64)];
                row.extend(p.iter().map(|c| num(*c)));
                if let Some(iso) = &self.isometry {
                    row.extend(iso.mapped[k].iter().map(|c| num(*c)));
                    row.push(num(iso.deviations[k]));
                }
                row
            })
            .collect();
        (header, rows)
    }
}

fn chord_check(metric: &AnyMetric, path: &[Point]) -> Result<IsometryCheck> {
    let d = metric
        .as_diagonal()
        .ok_or_else(|| Error::Spec("--check-isometry needs a diagonal metric".into()))?;
    let base = &path[0];
    let mapped = path
        .iter()
        .map(|p| isometry_map(d, base, p))
        .collect::<Result<Vec<_>>>()?;
    let last = mapped.last().expect("path is non-empty").clone();
    let m = (path.len() - 1).max(1) as f64;
    let deviations: Vec<f64> = mapped
        .iter()
        .enumerate()
        .map(|(k, phi)| {
            let s = k as f64 / m;
            phi.iter()
                .zip(last.iter())
                .map(|(p, e)| (p - s * e).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(IsometryCheck {
        max_chord_deviation: deviations.iter().fold(0.0, |a: f64, &b| a.max(b)),
        mapped,
        deviations,
    })
}

fn cmd_geodesic(a: &GeodesicArgs, format: Format) -> Result<Outcome> {
    let metric = metric_spec(&a.metric, None)?.build()?;
    let n = metric.dim();
    let x0 = point(&a.x0.0, "x0", n)?;
    point(&a.v0.0, "v0", n)?;
    let (path, failure) = match geodesic_integrate(&metric, &x0, &a.v0.0, a.duration, a.steps) {
        Ok(p) => (p, None),
        Err(Error::DomainExit { partial, steps }) => {
            let path = partial.iter().cloned().map(Point::new).collect();
            (path, Some(Error::DomainExit { partial, steps }))
        }
        Err(e) => return Err(e),
    };
    let isometry = if a.check_isometry && failure.is_none() {
        Some(chord_check(&metric, &path)?)
    } else {
        None
    };
    let report = GeodesicReport {
        command: "geodesic",
        x0,
        v0: a.v0.0.clone(),
        duration: a.duration,
        steps: a.steps,
        complete: failure.is_none(),
        path,
        isometry,
    };
    let body = render(&report, format);
    Ok(match failure {
        None => Outcome::ok(body),
        Some(e) => Outcome {
            body,
            code: EXIT_NUMERIC,
            error: Some(e),
        },
    })
}

// isometry

#[derive(Serialize)]
struct Mapped {
    x: Point,
    phi: Point,
    /// Diagonal of the Jacobian of φ at x.
    jacobian: Vec<f64>,
}

#[derive(Serialize)]
struct IsometryReport {
    command: &'static str,
    base: Point,
    points: Vec<Mapped>,
}

impl Report for IsometryReport {
    fn csv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let n = self.base.dim();
        let mut header = coord_names("x", n);
        header.extend(coord_names("phi", n));
        header.extend(coord_names("jac", n));
        let rows = self
            .points
            .iter()
            .map(|m| {
                m.x.iter()
                    .chain(m.phi.iter())
                    .chain(&m.jacobian)
                    .map(|v| num(*v))
                    .collect()
            })
            .collect();
        (header, rows)
    }
}

fn cmd_isometry(a: &IsometryArgs, format: Format) -> Result<String> {
    let metric = metric_spec(&a.metric, None)?.build()?;
    let d = metric
        .as_diagonal()
        .ok_or_else(|| Error::Spec("isometry needs a diagonal metric".into()))?;
    let n = d.dim();
    let base = point(&a.base.0, "base", n)?;
    let points = a
        .points
        .iter()
        .map(|x| {
            let x = point(&x.0, "x", n)?;
            Ok(Mapped {
                phi: isometry_map(d, &base, &x)?,
                jacobian: isometry_jacobian(d, &x)?,
                x,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = IsometryReport {
        command: "isometry",
        base,
        points,
    };
    Ok(render(&report, format))
}
