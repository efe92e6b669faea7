//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use common::*;
use fracgeom::expr::{self, eval_jet2, Bindings};
use fracgeom::fracderiv::{apply, apply_limit_def, make_operator, ExprFunction, LimitOptions, OperatorSpec};
use fracgeom::geometry::{
    christoffel_diagonal, christoffel_general, flatness_scan, geodesic_integrate, isometry_jacobian, isometry_map,
    riemann, CurvatureMode, GeneralMetric, Grid, Metric, Point,
};
use fracgeom::mittag_leffler::{gamma_fn, ml_truncated, MLParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_point<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Point {
    Point::new((0..n).map(|_| rng.random_range(lo..hi)).collect::<Vec<_>>())
}

fn flatness_theorem() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    // five interior points of (0.5, 5)
    let axis: Vec<f64> = (1..=5).map(|k| 0.5 + 0.75 * k as f64).collect();
    let mut worst = (0.0_f64, String::new());
    let mut scans = 0;
    for fam in families(&mut r) {
        for alpha in alpha_grid() {
            for n in 2..=4 {
                let m = fam.metric(alpha, n);
                let grid = Grid::new(vec![axis.clone(); n]).unwrap();
                let rep = flatness_scan(&m, &grid, 1e-9, CurvatureMode::ClosedFormJets)
                    .map_err(|e| format!("{} alpha={alpha} n={n}: {e}", fam.name()))?;
                scans += 1;
                if rep.max_abs_r >= worst.0 {
                    worst = (rep.max_abs_r, format!("{} alpha={alpha} n={n}", fam.name()));
                }
                if !rep.pass {
                    return Err(format!("max |R| = {:e} for {}", rep.max_abs_r, worst.1));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(format!("{scans} scans, worst max |R| = {:e} ({}), {secs:.1} s", worst.0, worst.1))
}

fn mode_agreement() -> Outcome {
    let mut r = rng(2);
    let fams = families(&mut r);
    let mut worst = 0.0_f64;
    for case in 0..50 {
        let fam = &fams[r.random_range(0..fams.len())];
        let alpha = alpha_grid()[r.random_range(0..10)];
        let n = r.random_range(2..=4);
        let m = fam.metric(alpha, n);
        let x = random_point(&mut r, n, 0.5, 5.0);
        let cf = riemann(&m, &x, CurvatureMode::ClosedFormJets).map_err(|e| e.to_string())?;
        let fd = riemann(&m, &x, CurvatureMode::FiniteDifference { step: None }).map_err(|e| e.to_string())?;
        let d = cf.values.iter().zip(&fd.values).fold(0.0_f64, |a, (p, q)| a.max((p - q).abs()));
        worst = worst.max(d);
        if d > 1e-5 {
            return Err(format!("case {case}: {} alpha={alpha} at {:?} differs by {d:e}", fam.name(), x.0));
        }
    }
    Ok(format!("50 cases, max |R_fd - R_cf| = {worst:e}"))
}

fn limit_definition() -> Outcome {
    let sets = [
        MLParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10).unwrap(),
        MLParams::new(0.8, 1.3, 1.7, 0.6, 1.2, 0.9, 6).unwrap(),
    ];
    let mut cells = 0;
    let mut worst = 0.0_f64;
    for params in &sets {
        for f_text in ["t^2", "sin(t)", "exp(t)"] {
            let f = ExprFunction::parse(f_text).unwrap();
            for t in [0.5, 1.0, 2.0] {
                for alpha in [0.25, 0.5, 0.75, 1.0] {
                    let op = make_operator(&OperatorSpec::TruncatedV(*params), alpha, &Bindings::new()).unwrap();
                    let closed = apply(&op, &f, t).map_err(|e| e.to_string())?;
                    let lim = apply_limit_def(params, alpha, &f, t, &LimitOptions::default())
                        .map_err(|e| format!("{f_text} t={t} alpha={alpha}: {e}"))?;
                    let rel = rel_to(lim.value, closed, closed.abs());
                    worst = worst.max(rel);
                    cells += 1;
                    if rel > 1e-6 {
                        return Err(format!("{f_text} t={t} alpha={alpha}: {} vs {closed} (rel {rel:e})", lim.value));
                    }
                }
            }
        }
    }
    Ok(format!("{cells} cells, max relative error {worst:e}"))
}

fn negative_control() -> Outcome {
    // oracle values first, from the closure metric alone
    let thetas = [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2];
    let oracle: Vec<f64> = thetas
        .iter()
        .map(|&th| riemann_oracle(&sphere_fn, &[th, 0.3], 1e-3)[0][1][0][1].abs())
        .collect();
    for (&th, &o) in thetas.iter().zip(&oracle) {
        if (o - th.sin().powi(2)).abs() > 1e-8 {
            return Err(format!("oracle itself is off at {th}: {o}"));
        }
    }
    let m = GeneralMetric::from_strings(&sphere_strings(), Bindings::new()).unwrap();
    let (mut w_cf, mut w_fd) = (0.0_f64, 0.0_f64);
    for (&th, &o) in thetas.iter().zip(&oracle) {
        let x = Point::new(vec![th, 0.3]);
        let cf = riemann(&m, &x, CurvatureMode::ClosedFormJets).map_err(|e| e.to_string())?.get(0, 1, 0, 1).abs();
        let fd = riemann(&m, &x, CurvatureMode::FiniteDifference { step: None })
            .map_err(|e| e.to_string())?
            .get(0, 1, 0, 1)
            .abs();
        let s2 = th.sin().powi(2);
        let e_cf = (cf - o).abs().max((cf - s2).abs());
        let e_fd = (fd - o).abs().max((fd - s2).abs());
        w_cf = w_cf.max(e_cf);
        w_fd = w_fd.max(e_fd);
        if e_cf > 1e-6 || e_fd > 1e-4 {
            return Err(format!("theta={th}: closed-form {cf}, finite-difference {fd}, expected {o}"));
        }
    }
    Ok(format!("4 angles, closed-form error {w_cf:e}, finite-difference error {w_fd:e}"))
}

fn operator_algebra() -> Outcome {
    const FUNCS: [&str; 8] = [
        "t^2",
        "sin(t)",
        "exp(t)",
        "ln(1 + t)",
        "t^3 - 2*t",
        "cos(t/2)",
        "1/(1 + t^2)",
        "exp(-t) * t",
    ];
    // outer function as a template and as a function of t
    const OUTER: [(&str, &str); 5] = [
        ("exp({})", "exp(t)"),
        ("sin({})", "sin(t)"),
        ("({})^3", "t^3"),
        ("ln(1 + ({})^2)", "ln(1 + t^2)"),
        ("cos({})", "cos(t)"),
    ];
    let mut r = rng(5);
    let fams = families(&mut r);
    let random_op = |r: &mut ChaCha8Rng| {
        let fam = &fams[r.random_range(0..fams.len())];
        fam.operator(r.random_range(0.05..=1.0))
    };
    let f = |s: &str| ExprFunction::parse(s).unwrap();
    let (mut w_l, mut w_c, mut w_lin) = (0.0_f64, 0.0_f64, 0.0_f64);
    for case in 0..1000 {
        let op = random_op(&mut r);
        let t = r.random_range(0.2..4.0);
        let (a, b) = (FUNCS[r.random_range(0..8)], FUNCS[r.random_range(0..8)]);
        let (fa, fb) = (f(a), f(b));
        let (va, vb) = (eval_jet2(&fa.expr, t, &Bindings::new()).unwrap().v, eval_jet2(&fb.expr, t, &Bindings::new()).unwrap().v);
        let (da, db) = (apply(&op, &fa, t).unwrap(), apply(&op, &fb, t).unwrap());

        // Leibniz
        let lhs = apply(&op, &f(&format!("({a})*({b})")), t).unwrap();
        let e = rel_to(lhs, va * db + vb * da, (va * db).abs() + (vb * da).abs());
        w_l = w_l.max(e);
        if e > 1e-12 {
            return Err(format!("Leibniz case {case}: ({a})*({b}) at t={t}, rel {e:e}"));
        }

        // chain
        let (tmpl, outer) = OUTER[r.random_range(0..5)];
        let lhs = apply(&op, &f(&tmpl.replace("{}", &format!("({a})"))), t).unwrap();
        let fprime = eval_jet2(&expr::parse(outer).unwrap(), va, &Bindings::new()).unwrap().d1;
        let e = rel_to(lhs, fprime * da, (fprime * da).abs());
        w_c = w_c.max(e);
        if e > 1e-12 {
            return Err(format!("chain case {case}: {tmpl} of {a} at t={t}, rel {e:e}"));
        }

        // linearity
        let (la, lb) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let lhs = apply(&op, &f(&format!("{la:?}*({a}) + {lb:?}*({b})")), t).unwrap();
        let e = rel_to(lhs, la * da + lb * db, (la * da).abs() + (lb * db).abs());
        w_lin = w_lin.max(e);
        if e > 1e-12 {
            return Err(format!("linearity case {case}: {la}*({a}) + {lb}*({b}) at t={t}, rel {e:e}"));
        }
    }
    Ok(format!("1000 cases each; max rel: Leibniz {w_l:e}, chain {w_c:e}, linearity {w_lin:e}"))
}

fn closed_form_christoffel() -> Outcome {
    let mut r = rng(6);
    let mut worst_formula = 0.0_f64;
    let mut worst_general = 0.0_f64;
    let mut checked = 0;
    for fam in families(&mut r) {
        for alpha in alpha_grid() {
            for n in 2..=4 {
                let m = fam.metric(alpha, n);
                for _ in 0..3 {
                    let x = random_point(&mut r, n, 0.5, 5.0);
                    let d = christoffel_diagonal(&m, &x).map_err(|e| e.to_string())?;
                    let g = christoffel_general(&m, &x).map_err(|e| e.to_string())?;
                    for k in 0..n {
                        for i in 0..n {
                            for j in 0..n {
                                let v = d.get(k, i, j);
                                if k == i && i == j {
                                    let expected = -fam.log_derivative(alpha, x[i]);
                                    worst_formula = worst_formula.max((v - expected).abs());
                                } else if v != 0.0 {
                                    return Err(format!("{}: Gamma^{k}_{i}{j} = {v:e}, expected exactly 0", fam.name()));
                                }
                                worst_general = worst_general.max((v - g.get(k, i, j)).abs());
                            }
                        }
                    }
                    checked += 1;
                }
            }
        }
    }
    if worst_formula > 1e-10 || worst_general > 1e-10 {
        return Err(format!("formula error {worst_formula:e}, general vs diagonal {worst_general:e}"));
    }
    Ok(format!(
        "{checked} points; off-pattern exactly 0, |diag + c'/c| <= {worst_formula:e}, |diag - general| <= {worst_general:e}"
    ))
}

fn constructive_isometry() -> Outcome {
    let mut r = rng(7);
    let fams = families(&mut r);
    let mut worst_dev = 0.0_f64;
    for case in 0..20 {
        let fam = &fams[r.random_range(0..fams.len())];
        let alpha = r.random_range(0.1..=1.0);
        let n = r.random_range(2..=4);
        let m = fam.metric(alpha, n);
        let x0 = random_point(&mut r, n, 1.5, 3.0);
        let v0: Vec<f64> = (0..n).map(|_| r.random_range(-0.3..0.3)).collect();
        let path = geodesic_integrate(&m, &x0, &v0, 1.0, 1000).map_err(|e| format!("case {case}: {e}"))?;
        let mapped = path
            .iter()
            .map(|p| isometry_map(&m, &x0, p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let end = mapped.last().unwrap();
        for (k, phi) in mapped.iter().enumerate() {
            let s = k as f64 / 1000.0;
            let dev = phi.iter().zip(end.iter()).map(|(p, e)| (p - s * e).powi(2)).sum::<f64>().sqrt();
            worst_dev = worst_dev.max(dev);
        }
        if worst_dev > 1e-6 {
            return Err(format!("case {case} ({} alpha={alpha}): chord deviation {worst_dev:e}", fam.name()));
        }
    }
    let mut worst_pull = 0.0_f64;
    for _ in 0..100 {
        let fam = &fams[r.random_range(0..fams.len())];
        let alpha = r.random_range(0.05..=1.0);
        let n = r.random_range(2..=4);
        let m = fam.metric(alpha, n);
        let x = random_point(&mut r, n, 0.5, 5.0);
        let jac = isometry_jacobian(&m, &x).map_err(|e| e.to_string())?;
        let (g, _) = m.metric_at(&x).map_err(|e| e.to_string())?;
        for i in 0..n {
            for j in 0..n {
                let pull = if i == j { jac[i] * jac[j] } else { 0.0 };
                worst_pull = worst_pull.max((pull - g[(i, j)]).abs());
            }
        }
    }
    if worst_pull > 1e-12 {
        return Err(format!("pullback differs by {worst_pull:e}"));
    }
    Ok(format!("20 geodesics, max chord deviation {worst_dev:e}; 100 pullbacks, max error {worst_pull:e}"))
}

fn special_functions() -> Outcome {
    // Γ(1/2) = √π; Γ(3/2) = √π/2; Γ(10.3) to 20 digits from multiprecision arithmetic
    let table = [
        (0.5, 1.772_453_850_905_516_027_3),
        (1.0, 1.0),
        (1.5, 0.886_226_925_452_758_013_65),
        (5.0, 24.0),
        (10.3, 716_430.689_062_375_244_55),
    ];
    let mut worst_g = 0.0_f64;
    for (x, want) in table {
        let got = gamma_fn(x).map_err(|e| e.to_string())?;
        let e = rel_to(got, want, want);
        worst_g = worst_g.max(e);
        if e > 1e-13 {
            return Err(format!("gamma({x}) = {got}, want {want} (rel {e:e})"));
        }
    }
    let mut r = rng(8);
    let mut worst_ml = 0.0_f64;
    for _ in 0..500 {
        let p = random_ml_params(&mut r, 0.25, 4.0, 30);
        let z = r.random_range(-10.0..10.0);
        let got = ml_truncated(&p, z).map_err(|e| e.to_string())?;
        let (want, abs) = ml_naive(&p, z);
        let e = rel_to(got, want, abs);
        worst_ml = worst_ml.max(e);
        if e > 1e-12 {
            return Err(format!("ml_truncated({p:?}, {z}) = {got}, oracle {want} (rel {e:e})"));
        }
    }
    Ok(format!("gamma max rel {worst_g:e}; 500 series, max rel {worst_ml:e}"))
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fracgeom"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn cli_golden() -> Outcome {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let cases = golden_cases();
    for (name, args) in &cases {
        let first = run_cli(args)?;
        let second = run_cli(args)?;
        if first != second {
            return Err(format!("{name}: two runs differ"));
        }
        let path = golden_dir().join(format!("{name}.json"));
        if update {
            std::fs::write(&path, &first).map_err(|e| e.to_string())?;
        }
        let pinned = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if pinned != first {
            return Err(format!(
                "{name}: output differs from {}\n  got:  {}",
                path.display(),
                String::from_utf8_lossy(&first).trim_end()
            ));
        }
    }
    Ok(format!("{} invocations byte-identical across runs and with the pinned files", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("flatness theorem, closed-form jets", flatness_theorem),
        ("finite-difference vs closed-form curvature", mode_agreement),
        ("limit definition vs closed form", limit_definition),
        ("sphere negative control", negative_control),
        ("Leibniz, chain and linearity", operator_algebra),
        ("closed-form Christoffel symbols", closed_form_christoffel),
        ("constructive isometry", constructive_isometry),
        ("gamma and Mittag-Leffler", special_functions),
        ("CLI golden files", cli_golden),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
