//! The verification suite run by `nullfront selftest` and the `acceptance`
//! test target. Each check recomputes its reference values independently of
//! the code under test.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nullfront::adsdist::{dist_sq_jets, locus_point};
use nullfront::curve::catalog;
use nullfront::framed::{
    extract_curvature, integrate_frame, standard_frame, uniform_grid, CurvatureQuad, FrameState,
};
use nullfront::geom4::{pseudo_dot, triple_product};
use nullfront::nullcone::{
    classify_at, find_singularities, jacobian_rank, sigma, sigma_jets, singular_lambda,
    transversality_det, FrontSheet, Origin, SingularClass, Tolerances, DEFAULT_TOL_DENOM,
};
use nullfront::{align_congruence, parse_expr, FramedCurve, Vec4, CATALOG_NAMES};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Debug)]
pub struct Check {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{verdict}] {:>2} {}: {}",
            self.id, self.title, self.detail
        )
    }
}

type Outcome = Result<(bool, String), String>;

fn check(id: u8, title: &'static str, body: impl FnOnce() -> Outcome) -> Check {
    let (passed, detail) = match body() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check {
        id,
        title,
        passed,
        detail,
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn curve(name: &str) -> Result<FramedCurve, String> {
    FramedCurve::from_catalog(name).map_err(err)
}

/// Runs every check; `exe` is the `nullfront` binary used by the determinism check.
pub fn run_all(exe: &Path) -> Vec<Check> {
    vec![
        check(1, "example1 curvature closed forms", example1_curvature),
        check(2, "example1 cuspidal edge at 0", example1_cusp),
        check(3, "example2 singular set", example2_singular_set),
        check(4, "example3 swallowtail at 0", example3_swallowtail),
        check(5, "transversality identity", transversality),
        check(6, "constant-curvature integration", constant_integration),
        check(7, "extract/integrate round trip", round_trip),
        check(8, "congruence of integrations", congruence),
        check(9, "distance-squared ladder", distance_ladder),
        check(10, "front jacobian rank", jacobian),
        check(11, "vector and jet kernels", kernels),
        check(12, "deterministic output", || determinism(exe)),
    ]
}

/// Closed forms of (alpha, ell, m, n) for example1, typed in by hand.
fn example1_closed_form(s: f64) -> [f64; 4] {
    let p = |k: i32| s.powi(k);
    let a = (1.0 + p(4)).sqrt();
    let b = (1.0 + p(6)).sqrt();
    let c = 8.0 + 18.0 * p(2) + p(6);
    let d = 4.0 + 9.0 * p(2) + 13.0 * p(6);
    let r2 = 2f64.sqrt();
    let alpha = s * d.sqrt() / (r2 * a * b);
    let ell = 6.0 * r2 * p(2) * (2.0 - 3.0 * p(2) - p(6)) / (c * d.sqrt());
    let m = (12.0 + 16.0 * p(4) + 21.0 * p(6) + 25.0 * p(10)) / (r2 * a * b * c.sqrt() * d.sqrt());
    let n = s * (-16.0 + 30.0 * p(2) + 81.0 * p(4) + 58.0 * p(6) + 102.0 * p(8) + 65.0 * p(12))
        / (a * b * c.sqrt() * d);
    [alpha, ell, m, n]
}

fn example1_curvature() -> Outcome {
    let start = Instant::now();
    let fc = curve("example1")?;
    let mut worst = 0.0f64;
    for s in uniform_grid(-1.0, 1.0, 101) {
        let c = fc.curvature_at(s).map_err(err)?;
        let want = example1_closed_form(s);
        for (got, want) in [c.alpha, c.ell, c.m, c.n].into_iter().zip(want) {
            worst = worst.max((got - want).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok((
        worst < 1e-8 && elapsed < 1.0,
        format!("max error {worst:.3e} (< 1e-8), {elapsed:.3} s (< 1 s)"),
    ))
}

fn example1_cusp() -> Outcome {
    let fc = curve("example1")?;
    let scan = find_singularities(
        &fc,
        FrontSheet::Plus,
        (-0.5, 0.5),
        64,
        Tolerances::default(),
    )
    .map_err(err)?;
    let root = scan
        .points
        .iter()
        .find(|p| p.origin != Origin::SigmaRoot && p.report.s0.abs() < 1e-6)
        .ok_or("no alpha root near 0")?;
    let alpha = fc.curvature_jets(root.report.s0).map_err(err)?.alpha;
    let r = classify_at(&fc, 0.0, FrontSheet::Plus, Tolerances::default()).map_err(err)?;
    let ok = alpha.value().abs() < 1e-12
        && alpha.d(1).abs() > 1e-6
        && r.class == SingularClass::CuspidalEdge
        && r.lambda0 == 0.0;
    Ok((
        ok,
        format!(
            "root {:.3e}, alpha {:.3e}, alpha' {:.6}, {} with lambda0 = {}",
            root.report.s0,
            alpha.value(),
            alpha.d(1),
            r.class,
            r.lambda0
        ),
    ))
}

fn example2_singular_set() -> Outcome {
    let fc = curve("example2")?;
    let scan = find_singularities(
        &fc,
        FrontSheet::Plus,
        (0.0, 2.0 * PI),
        512,
        Tolerances::default(),
    )
    .map_err(err)?;
    let alpha_roots: Vec<_> = scan
        .points
        .iter()
        .filter(|p| p.origin != Origin::SigmaRoot)
        .map(|p| p.report)
        .collect();
    let expected = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2, 2.0 * PI];
    let mut ok = alpha_roots.len() == expected.len();
    let mut worst = 0.0f64;
    for want in expected {
        match alpha_roots.iter().find(|r| (r.s0 - want).abs() < 1e-6) {
            Some(r) => {
                worst = worst.max((r.s0 - want).abs());
                ok &= r.class == SingularClass::CuspidalEdge;
            }
            None => ok = false,
        }
    }
    ok &= worst < 1e-9;
    let lambda =
        singular_lambda(&fc, FRAC_PI_4, FrontSheet::Plus, DEFAULT_TOL_DENOM).map_err(err)?;
    let lambda_err = (lambda - 3.0 * 5f64.sqrt()).abs();
    ok &= lambda_err < 1e-9;
    Ok((
        ok,
        format!(
            "{} alpha roots, max offset {worst:.2e}; lambda(pi/4) error {lambda_err:.2e}; \
             note: 3pi/2 is not among the documented parameters",
            alpha_roots.len()
        ),
    ))
}

fn example3_swallowtail() -> Outcome {
    let fc = curve("example3")?;
    let a = fc.curvature_jets(0.0).map_err(err)?.alpha;
    let (sig, dsig) = sigma(&fc, 0.0, FrontSheet::Plus).map_err(err)?;
    let r = classify_at(&fc, 0.0, FrontSheet::Plus, Tolerances::default()).map_err(err)?;
    let ok = a.value().abs() < 1e-12
        && a.d(1).abs() < 1e-12
        && a.d(2).abs() > 1e-6
        && sig.abs() < 1e-9
        && (dsig - 8.0).abs() < 1e-6
        && r.class == SingularClass::Swallowtail;
    Ok((
        ok,
        format!(
            "alpha'' = {:.6}, sigma = {sig:.3e}, sigma' = {dsig:.9}, {}",
            a.d(2),
            r.class
        ),
    ))
}

fn transversality() -> Outcome {
    let mut worst = 0.0f64;
    let mut skipped = 0;
    let mut evaluated = 0;
    for name in CATALOG_NAMES {
        let fc = curve(name)?;
        let (a, b) = fc.interval();
        let c = fc.curvature_at(0.5 * (a + b)).map_err(err)?;
        if c.m == 0.0 && c.n == 0.0 {
            // m = n = 0 everywhere: the front has no singular curve
            continue;
        }
        for sheet in FrontSheet::BOTH {
            for s in uniform_grid(a, b, 100) {
                let j = sigma_jets(&fc, s, sheet).map_err(err)?;
                let d = j.denom.value();
                if d.abs() <= DEFAULT_TOL_DENOM {
                    skipped += 1;
                    continue;
                }
                let det = transversality_det(&fc, s, sheet, DEFAULT_TOL_DENOM).map_err(err)?;
                worst = worst.max((det - j.sigma.value() / (d * d)).abs());
                evaluated += 1;
            }
        }
    }
    Ok((
        worst < 1e-8,
        format!("max error {worst:.3e} (< 1e-8) over {evaluated} points, {skipped} skipped"),
    ))
}

fn max_drift(states: &[FrameState], eps: f64) -> f64 {
    states.iter().map(|s| s.gram_drift(eps)).fold(0.0, f64::max)
}

fn constant_integration() -> Outcome {
    let k = [1.0, 0.0, 0.0, 0.0];
    let init = standard_frame(0.0, 1.0);
    let states = integrate_frame(&k, init, 1.0, 1.0, 1e-3, true).map_err(err)?;
    let end = states.last().ok_or("empty trajectory")?.gamma;
    let want = Vec4::new(1f64.cosh(), 0.0, 0.0, 1f64.sinh());
    let gamma_err = (end - want).max_abs();
    let drift = max_drift(&states, 1.0);
    let raw: Vec<f64> = [0.1, 0.05, 0.025]
        .into_iter()
        .map(|h| integrate_frame(&k, init, 1.0, 1.0, h, false).map(|st| max_drift(&st, 1.0)))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let ratios = [raw[0] / raw[1], raw[1] / raw[2]];
    let ok = gamma_err < 1e-6 && drift < 1e-8 && ratios.iter().all(|r| *r >= 8.0);
    Ok((
        ok,
        format!(
            "gamma(1) error {gamma_err:.2e}, drift {drift:.2e}, halving ratios {:.2} {:.2}",
            ratios[0], ratios[1]
        ),
    ))
}

fn round_trip() -> Outcome {
    let fc = curve("example1")?;
    let frames = uniform_grid(-1.0, 1.0, 2001)
        .into_iter()
        .map(|s| fc.frame_at(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let cq = extract_curvature(&frames).map_err(err)?;
    let states = integrate_frame(&cq, frames[0], fc.epsilon(), 1.0, 1e-3, true).map_err(err)?;
    let mut worst = 0.0f64;
    for st in &states {
        let want = fc.frame_at(st.s.clamp(-1.0, 1.0)).map_err(err)?.gamma;
        worst = worst.max((st.gamma - want).max_abs());
    }
    Ok((worst < 1e-5, format!("sup error {worst:.3e} (< 1e-5)")))
}

fn congruence() -> Outcome {
    let parse = |t: &str| parse_expr(t).map_err(err);
    let quad = CurvatureQuad {
        alpha: parse("cos(s)")?,
        ell: parse("0.5*s")?,
        m: parse("1 + s^2/4")?,
        n: parse("sin(2*s)")?,
        epsilon: 1.0,
    };
    let first = standard_frame(0.0, 1.0);
    // a boost in (u1, u3) composed with rotations in (u1, u2) and (u3, u4)
    let (a, b, c) = (0.4f64, 1.1f64, -0.7f64);
    let map = |v: Vec4| {
        let [x1, x2, x3, x4] = v.0;
        let (x1, x2) = (b.cos() * x1 - b.sin() * x2, b.sin() * x1 + b.cos() * x2);
        let (x3, x4) = (c.cos() * x3 - c.sin() * x4, c.sin() * x3 + c.cos() * x4);
        Vec4::new(
            a.cosh() * x1 + a.sinh() * x3,
            x2,
            a.sinh() * x1 + a.cosh() * x3,
            x4,
        )
    };
    let second = FrameState::new(0.0, map(first.gamma), map(first.v1), map(first.v2));
    let one = integrate_frame(&quad, first, 1.0, 2.0, 1e-3, true).map_err(err)?;
    let two = integrate_frame(&quad, second, 1.0, 2.0, 1e-3, true).map_err(err)?;
    let samples: Vec<f64> = one.iter().step_by(50).map(|s| s.s).collect();
    let cg = align_congruence(&one, &two, 0.0, &samples).map_err(err)?;
    Ok((
        cg.residual < 1e-6 && cg.isometry_defect < 1e-8,
        format!(
            "residual {:.3e} (< 1e-6), isometry defect {:.3e} (< 1e-8)",
            cg.residual, cg.isometry_defect
        ),
    ))
}

fn distance_ladder() -> Outcome {
    let ex2 = curve("example2")?;
    let v0 = locus_point(&ex2, FRAC_PI_4, FrontSheet::Plus, DEFAULT_TOL_DENOM).map_err(err)?;
    let d2 = dist_sq_jets(&ex2, FRAC_PI_4, v0).map_err(err)?.d;
    let first = d2[..3].iter().all(|x| x.abs() < 1e-7) && d2[3].abs() > 1e-3;

    let ex3 = curve("example3")?;
    let v0 = locus_point(&ex3, 0.0, FrontSheet::Plus, DEFAULT_TOL_DENOM).map_err(err)?;
    let d3 = dist_sq_jets(&ex3, 0.0, v0).map_err(err)?.d;
    let second = d3[..4].iter().all(|x| x.abs() < 1e-7) && d3[4].abs() > 1e-3;

    let show = |d: &[f64; 5]| {
        d.iter()
            .map(|x| format!("{x:.3e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok((
        first && second,
        format!(
            "example2 at pi/4: d = [{}] needs |d'''| > 1e-3; example3 at 0: d = [{}] needs |d''''| > 1e-3",
            show(&d2),
            show(&d3)
        ),
    ))
}

fn jacobian() -> Outcome {
    let fc = curve("example2")?;
    let sheet = FrontSheet::Plus;
    let mut bad = Vec::new();
    for s in uniform_grid(0.0, 2.0 * PI, 50) {
        let l = singular_lambda(&fc, s, sheet, DEFAULT_TOL_DENOM).map_err(err)?;
        let on = jacobian_rank(&fc, s, l, sheet).map_err(err)?.0;
        let below = jacobian_rank(&fc, s, l - 0.1, sheet).map_err(err)?.0;
        let above = jacobian_rank(&fc, s, l + 0.1, sheet).map_err(err)?.0;
        if (on, below, above) != (1, 2, 2) {
            bad.push(format!("s = {s:.4}: ranks {on} {below} {above}"));
        }
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            "rank 1 on the singular curve and 2 at lambda +/- 0.1 at 50 points".to_string()
        } else {
            bad.join("; ")
        },
    ))
}

fn rel(err: f64, scale: f64) -> f64 {
    err / scale.max(f64::MIN_POSITIVE)
}

fn kernels() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x6e75_6c6c);
    let mut draw = || Vec4(std::array::from_fn(|_| rng.random_range(-10.0..10.0)));
    let norm = |v: Vec4| v.0.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (u, v, w, x) = (draw(), draw(), draw(), draw());
        let t = triple_product(u, v, w);
        let scale = norm(u) * norm(v) * norm(w);
        for y in [u, v, w] {
            worst = worst.max(rel(pseudo_dot(t, y).abs(), scale * norm(y)));
        }
        for swapped in [
            triple_product(v, u, w),
            triple_product(u, w, v),
            triple_product(w, v, u),
        ] {
            worst = worst.max(rel(norm(t + swapped), scale));
        }
        let (p, q) = (x.0[0], x.0[1]);
        let lhs = pseudo_dot(u * p + v * q, w);
        let rhs = p * pseudo_dot(u, w) + q * pseudo_dot(v, w);
        worst = worst.max(rel(
            (lhs - rhs).abs(),
            (p.abs() * norm(u) + q.abs() * norm(v)) * norm(w),
        ));
        worst = worst.max(rel(
            (pseudo_dot(u, w) - pseudo_dot(w, u)).abs(),
            norm(u) * norm(w),
        ));
    }

    let mut jet_worst = 0.0f64;
    let h = 1e-5;
    for name in CATALOG_NAMES {
        let frame = catalog(name).map_err(err)?;
        let (a, b) = frame.interval;
        for spec in [&frame.gamma, &frame.v1, &frame.v2] {
            for e in &spec.components {
                for s in uniform_grid(a + 0.01 * (b - a), b - 0.01 * (b - a), 25) {
                    let jet = |x: f64| e.eval_jet(x).map_err(err);
                    let (lo, mid, hi) = (jet(s - h)?, jet(s)?, jet(s + h)?);
                    for k in 1..=3 {
                        let fd = (hi.d(k - 1) - lo.d(k - 1)) / (2.0 * h);
                        jet_worst =
                            jet_worst.max(rel((mid.d(k) - fd).abs(), mid.d(k).abs().max(1.0)));
                    }
                }
            }
        }
    }
    Ok((
        worst < 1e-10 && jet_worst < 1e-6,
        format!(
            "vector kernels {worst:.2e} (< 1e-10), jets vs differences {jet_worst:.2e} (< 1e-6)"
        ),
    ))
}

fn determinism(exe: &Path) -> Outcome {
    let dir = std::env::temp_dir().join(format!("nullfront-selftest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.join(format!("run{k}.json"));
        let status = Command::new(exe)
            .args([
                "singular", "--curve", "example2", "--sheet", "plus", "--range", "0", "2*pi",
                "--out",
            ])
            .arg(&path)
            .output()
            .map_err(err)?;
        if !status.status.success() {
            return Ok((false, format!("run {k} exited with {}", status.status)));
        }
        outputs.push(std::fs::read(&path).map_err(err)?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
    Ok((
        same,
        format!(
            "two runs, {} bytes each, identical: {same}",
            outputs[0].len()
        ),
    ))
}
