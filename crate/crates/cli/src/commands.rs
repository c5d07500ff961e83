use std::fmt::Write as _;
use std::path::Path;

use nullfront::adsdist::{check_conditions, locus_point, VanishTol, DEFAULT_VANISH_TOL};
use nullfront::expr::eval_constant;
use nullfront::framed::{integrate_frame, uniform_grid, CurvatureQuadFile};
use nullfront::nullcone::{
    find_singularities, front_point, sample_mesh, FrontSheet, MeshRequest, Projection,
    SingularityScan, Tolerances,
};
use nullfront::regular::{frenet_at, DEFAULT_FRENET_TOL};
use nullfront::{
    align_congruence, catalog, documented_singular_parameters, CurveSpecFile, FramedCurve, Vec4,
    CATALOG_NAMES,
};
use serde::Serialize;

use crate::args::*;
use crate::output::{csv_float, csv_floats, csv_line, emit, json};
use crate::{selftest, CliError, CliResult};

pub fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Catalog(a) => catalog_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Frame(a) => frame(a),
        Command::Frenet(a) => frenet(a),
        Command::Front(a) => front(a),
        Command::Singular(a) => singular(a),
        Command::Integrate(a) => integrate(a),
        Command::Congruence(a) => congruence(a),
        Command::Distance(a) => distance(a),
        Command::Selftest(_) => selftest_cmd(),
    }
}

/// Largest overshoot of the curve interval, relative to its width, that
/// [`param_range`] clamps instead of rejecting.
const CLAMP_SLACK: f64 = 1e-4;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn load_source(src: &SourceArgs) -> CliResult<FramedCurve> {
    let fc = match (&src.curve, &src.spec, &src.samples) {
        (Some(name), _, _) => FramedCurve::from_catalog(name)?,
        (_, Some(path), _) => FramedCurve::from_spec_file(path)?,
        (_, _, Some(path)) => FramedCurve::from_samples(path)?,
        _ => return Err(usage("one of --curve, --spec or --samples is required")),
    };
    Ok(fc)
}

fn number(text: &str, what: &str) -> CliResult<f64> {
    let x = eval_constant(text).map_err(|e| usage(format!("bad {what} `{text}`: {e}")))?;
    if !x.is_finite() {
        return Err(usage(format!("{what} `{text}` is not finite")));
    }
    Ok(x)
}

fn range(values: Option<&[String]>, default: (f64, f64), what: &str) -> CliResult<(f64, f64)> {
    let Some(v) = values else {
        return Ok(default);
    };
    let (a, b) = (number(&v[0], what)?, number(&v[1], what)?);
    if !(a < b) {
        return Err(usage(format!("{what} [{a}, {b}] is empty")));
    }
    Ok((a, b))
}

/// Range over the curve parameter. Literal endpoints such as `6.2832` for
/// `2*pi` may overshoot the curve interval slightly; such ranges are clamped.
fn param_range(
    values: Option<&[String]>,
    interval: (f64, f64),
    what: &str,
) -> CliResult<(f64, f64)> {
    let (a, b) = range(values, interval, what)?;
    let (lo, hi) = interval;
    let slack = CLAMP_SLACK * (hi - lo);
    if a < lo - slack || b > hi + slack {
        return Err(nullfront::Error::OutOfInterval {
            s: if a < lo - slack { a } else { b },
            a: lo,
            b: hi,
        }
        .into());
    }
    let clamped = (a.max(lo), b.min(hi));
    if clamped != (a, b) {
        eprintln!(
            "nullfront: note: {what} [{a}, {b}] clamped to the curve interval [{}, {}]",
            clamped.0, clamped.1
        );
    }
    Ok(clamped)
}

fn grid_size(n: usize, what: &str) -> CliResult<usize> {
    if n < 2 {
        return Err(usage(format!("{what} must be at least 2, got {n}")));
    }
    Ok(n)
}

fn positive(x: Option<f64>, default: f64, what: &str) -> CliResult<f64> {
    let x = x.unwrap_or(default);
    if !(x > 0.0) || !x.is_finite() {
        return Err(usage(format!("{what} must be positive, got {x}")));
    }
    Ok(x)
}

fn tolerances(t: &TolArgs) -> CliResult<Tolerances> {
    let d = Tolerances::default();
    Ok(Tolerances {
        tol: positive(t.tol, d.tol, "--tol")?,
        tol_denom: positive(t.tol_denom, d.tol_denom, "--tol-denom")?,
    })
}

fn sheet(s: SheetArg) -> FrontSheet {
    match s {
        SheetArg::Plus => FrontSheet::Plus,
        SheetArg::Minus => FrontSheet::Minus,
    }
}

/// Picks the output format: explicit flag, then the `--out` extension, then `default`.
fn format_of(out: &OutArgs, allowed: &[Format], default: Format) -> CliResult<Format> {
    let guessed = out.format.or_else(|| {
        let ext = out
            .out
            .as_deref()?
            .extension()?
            .to_str()?
            .to_ascii_lowercase();
        allowed
            .iter()
            .copied()
            .find(|f| format!("{f:?}").eq_ignore_ascii_case(&ext))
    });
    let f = guessed.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(usage(format!(
            "format {f:?} is not available for this subcommand"
        )));
    }
    Ok(f)
}

fn catalog_cmd(a: CatalogArgs) -> CliResult<()> {
    let bytes = match &a.curve {
        Some(name) => json(&CurveSpecFile::from_frame(&catalog(name)?))?,
        None => {
            let mut text = String::new();
            for name in CATALOG_NAMES {
                let f = catalog(name)?;
                let _ = writeln!(text, "{name}\t[{}, {}]", f.interval.0, f.interval.1);
            }
            text.into_bytes()
        }
    };
    emit(a.out.out.as_deref(), &bytes)
}

fn verify(a: VerifyArgs) -> CliResult<()> {
    let fc = load_source(&a.source)?;
    let grid = grid_size(a.grid, "--grid")?;
    let report = fc.validate(grid)?;
    let bytes = match format_of(&a.out, &[Format::Text, Format::Json], Format::Text)? {
        Format::Json => json(&report)?,
        _ => report.to_string().into_bytes(),
    };
    if !report.passed {
        eprint!("{}", String::from_utf8_lossy(&bytes));
        return Err(CliError::Validation(format!(
            "{} is not a framed curve within {:e}",
            report.curve, report.tolerance
        )));
    }
    emit(a.out.out.as_deref(), &bytes)
}

fn frame(a: FrameArgs) -> CliResult<()> {
    let fc = load_source(&a.source)?;
    let (s0, s1) = param_range(a.range.as_deref(), fc.interval(), "--range")?;
    let grid = grid_size(a.grid, "--grid")?;
    let rows = uniform_grid(s0, s1, grid)
        .into_iter()
        .map(|s| fc.curvature_at(s))
        .collect::<Result<Vec<_>, _>>()?;
    let bytes = match format_of(&a.out, &[Format::Csv, Format::Json], Format::Csv)? {
        Format::Json => json(&rows)?,
        _ => {
            let mut text = String::from("s,alpha,ell,m,n,dalpha,dell,dm,dn\n");
            for c in &rows {
                text += &csv_floats(&[c.s, c.alpha, c.ell, c.m, c.n, c.dalpha, c.dell, c.dm, c.dn]);
            }
            text.into_bytes()
        }
    };
    emit(a.out.out.as_deref(), &bytes)
}

fn frenet(a: FrenetArgs) -> CliResult<()> {
    let (gamma, interval) = match (&a.source.curve, &a.source.spec) {
        (Some(name), _) => {
            let f = catalog(name)?;
            (f.gamma, f.interval)
        }
        (_, Some(path)) => {
            let file = CurveSpecFile::read(path)?;
            let [x, y] = file.interval;
            (file.gamma_spec()?, (x, y))
        }
        _ => return Err(usage("frenet needs an analytic curve (--curve or --spec)")),
    };
    let (s0, s1) = param_range(a.range.as_deref(), interval, "--range")?;
    let grid = grid_size(a.grid, "--grid")?;
    let tol = positive(a.tol, DEFAULT_FRENET_TOL, "--tol")?;
    let rows = uniform_grid(s0, s1, grid)
        .into_iter()
        .map(|s| frenet_at(&gamma, s, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let bytes = match format_of(&a.out, &[Format::Csv, Format::Json], Format::Csv)? {
        Format::Json => json(&rows)?,
        _ => {
            let mut text = String::from(
                "s,kappa,delta,tau,geodesic,degenerate,t1,t2,t3,t4,n11,n12,n13,n14,n21,n22,n23,n24\n",
            );
            let opt = |x: Option<f64>| x.map(csv_float).unwrap_or_default();
            let vec = |v: Option<Vec4>| -> Vec<String> {
                match v {
                    Some(v) => v.0.iter().map(|x| csv_float(*x)).collect(),
                    None => vec![String::new(); 4],
                }
            };
            for r in &rows {
                let mut fields = vec![
                    csv_float(r.s),
                    csv_float(r.kappa),
                    opt(r.delta),
                    opt(r.tau),
                    r.geodesic.to_string(),
                    r.degenerate.to_string(),
                ];
                fields.extend(vec(Some(r.tangent)));
                fields.extend(vec(r.n1));
                fields.extend(vec(r.n2));
                text += &csv_line(fields);
            }
            text.into_bytes()
        }
    };
    emit(a.out.out.as_deref(), &bytes)
}

fn projection(spec: Option<&[String]>) -> CliResult<Projection> {
    let Some(v) = spec else {
        return Ok(Projection::default());
    };
    match (v[0].as_str(), v.get(1)) {
        ("matrix", Some(path)) => Ok(Projection::read_matrix(Path::new(path))?),
        ("matrix", None) => Err(usage("--projection matrix needs a FILE")),
        (mode, None) => match mode
            .strip_prefix("drop")
            .and_then(|k| k.parse::<usize>().ok())
        {
            Some(k @ 1..=4) => Ok(Projection::Drop(k - 1)),
            _ => Err(usage(format!(
                "unknown projection `{mode}`; expected drop1..drop4"
            ))),
        },
        (mode, Some(_)) => Err(usage(format!("projection `{mode}` takes no file"))),
    }
}

fn front(a: FrontArgs) -> CliResult<()> {
    let fc = load_source(&a.source)?;
    let s_range = param_range(a.s_range.as_deref(), fc.interval(), "--s-range")?;
    let l_range = range(a.l_range.as_deref(), (-1.0, 1.0), "--l-range")?;
    let (ns, nl) = match a.grid.as_deref() {
        Some(&[ns, nl]) => (grid_size(ns, "NS")?, grid_size(nl, "NL")?),
        _ => (64, 16),
    };
    let format = format_of(
        &a.out,
        &[Format::Obj, Format::Csv, Format::Json],
        Format::Obj,
    )?;
    let mut req = MeshRequest::new(sheet(a.sheet), s_range, l_range, ns, nl);
    req.projection = projection(a.projection.as_deref())?;
    req.tol = tolerances(&a.tol)?;
    let mesh = sample_mesh(&fc, &req)?;
    if !mesh.locus_gaps.is_empty() {
        eprintln!(
            "nullfront: singular curve broken at {} parameter(s) where m {} n is near zero",
            mesh.locus_gaps.len(),
            if req.sheet == FrontSheet::Plus {
                "+"
            } else {
                "-"
            }
        );
    }
    let bytes = match format {
        Format::Json => json(&mesh)?,
        Format::Csv => {
            let mut buf = Vec::new();
            mesh.write_csv(&mut buf)?;
            buf
        }
        _ => {
            let mut buf = Vec::new();
            mesh.write_obj(&mut buf)
                .map_err(|source| nullfront::Error::Io {
                    path: "<mesh>".into(),
                    source,
                })?;
            buf
        }
    };
    emit(a.out.out.as_deref(), &bytes)
}

fn report_scan_notes(fc: &FramedCurve, scan: &SingularityScan, catalog_source: bool) {
    for (s, why) in &scan.failures {
        eprintln!("nullfront: warning: s = {s}: {why}");
    }
    if !catalog_source {
        return;
    }
    let documented = documented_singular_parameters(fc.name());
    for p in &scan.points {
        let s = p.report.s0;
        if p.report.alpha.abs() <= 1e-6 && !documented.iter().any(|q| (q - s).abs() <= 1e-6) {
            eprintln!(
                "nullfront: note: singular point at s = {s} is not among the documented parameters of {}",
                fc.name()
            );
        }
    }
}

fn singular(a: SingularArgs) -> CliResult<()> {
    let fc = load_source(&a.source)?;
    let r = param_range(a.range.as_deref(), fc.interval(), "--range")?;
    let tol = tolerances(&a.tol)?;
    let scan = find_singularities(&fc, sheet(a.sheet), r, a.grid, tol)?;
    report_scan_notes(&fc, &scan, a.source.curve.is_some());
    let reports = scan.reports();
    let bytes = match format_of(&a.out, &[Format::Json, Format::Csv], Format::Json)? {
        Format::Csv => {
            let mut text =
                String::from("s0,lambda0,class,alpha,dalpha,ddalpha,sigma,dsigma,sheet\n");
            for r in &reports {
                let mut fields = vec![csv_float(r.s0), csv_float(r.lambda0), r.class.to_string()];
                fields.extend([r.alpha, r.dalpha, r.ddalpha, r.sigma, r.dsigma].map(csv_float));
                fields.push(r.sheet.to_string());
                text += &csv_line(fields);
            }
            text.into_bytes()
        }
        _ => json(&reports)?,
    };
    emit(a.out.out.as_deref(), &bytes)
}

fn integrate(a: IntegrateArgs) -> CliResult<()> {
    let file = CurvatureQuadFile::read(&a.quad)?;
    let quad = file.quad()?;
    let default = file.interval.map(|[x, y]| (x, y)).unwrap_or((0.0, 1.0));
    let (s0, s1) = range(a.range.as_deref(), default, "--range")?;
    let step = positive(Some(a.step), 1e-3, "--step")?;
    let states = integrate_frame(
        &quad,
        file.initial_state(s0),
        quad.epsilon,
        s1,
        step,
        !a.no_reorth,
    )?;
    let bytes = match format_of(&a.out, &[Format::Csv, Format::Json], Format::Csv)? {
        Format::Json => json(&states)?,
        _ => {
            let mut text =
                String::from("s,g1,g2,g3,g4,v11,v12,v13,v14,v21,v22,v23,v24,mu1,mu2,mu3,mu4\n");
            for st in &states {
                let mut row = vec![st.s];
                row.extend(st.components());
                text += &csv_floats(&row);
            }
            text.into_bytes()
        }
    };
    emit(a.out.out.as_deref(), &bytes)
}

fn load_other(spec: &str) -> CliResult<FramedCurve> {
    if CATALOG_NAMES.contains(&spec) {
        return Ok(FramedCurve::from_catalog(spec)?);
    }
    let path = Path::new(spec);
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        Ok(FramedCurve::from_samples(path)?)
    } else if path.exists() {
        Ok(FramedCurve::from_spec_file(path)?)
    } else {
        Err(nullfront::Error::UnknownCatalogEntry(spec.to_string()).into())
    }
}

#[derive(Serialize)]
struct CongruenceOutput {
    isometry: [[f64; 4]; 4],
    residual: f64,
    isometry_defect: f64,
    tolerance: f64,
    congruent: bool,
}

fn congruence(a: CongruenceArgs) -> CliResult<()> {
    let first = load_source(&a.source)?;
    let second = load_other(&a.with)?;
    let (a1, b1) = first.interval();
    let (a2, b2) = second.interval();
    let (lo, hi) = (a1.max(a2), b1.min(b2));
    if !(lo < hi) {
        return Err(usage(format!(
            "parameter intervals [{a1}, {b1}] and [{a2}, {b2}] do not overlap"
        )));
    }
    let s0 = match &a.s0 {
        Some(t) => number(t, "--s0")?,
        None => lo,
    };
    let grid = uniform_grid(lo, hi, grid_size(a.grid, "--grid")?);
    let tol = positive(Some(a.tol), 1e-6, "--tol")?;
    let cg = align_congruence(&first, &second, s0, &grid)?;
    let m = cg.isometry.to_matrix();
    let out = CongruenceOutput {
        isometry: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])),
        residual: cg.residual,
        isometry_defect: cg.isometry_defect,
        tolerance: tol,
        congruent: cg.residual <= tol && cg.isometry_defect <= tol,
    };
    let bytes = json(&out)?;
    if !out.congruent {
        eprint!("{}", String::from_utf8_lossy(&bytes));
        return Err(CliError::Validation(format!(
            "curves are not congruent within {tol:e}"
        )));
    }
    emit(a.out.out.as_deref(), &bytes)
}

fn distance(a: DistanceArgs) -> CliResult<()> {
    let fc = load_source(&a.source)?;
    let s0 = number(&a.s0, "--s0")?;
    let sh = sheet(a.sheet);
    let tol_denom = positive(a.tol_denom, Tolerances::default().tol_denom, "--tol-denom")?;
    let v0 = match (&a.v0, &a.lambda, a.locus) {
        (Some(v), _, _) => {
            let mut u = [0.0; 4];
            for (slot, text) in u.iter_mut().zip(v) {
                *slot = number(text, "--v0")?;
            }
            Vec4(u)
        }
        (None, Some(l), _) => front_point(&fc, s0, number(l, "--lambda")?, sh)?,
        (None, None, true) => locus_point(&fc, s0, sh, tol_denom)?,
        (None, None, false) => return Err(usage("distance needs --v0, --lambda or --locus")),
    };
    let t = positive(a.tol, DEFAULT_VANISH_TOL, "--tol")?;
    let vt = if a.relative {
        VanishTol::Relative(t)
    } else {
        VanishTol::Absolute(t)
    };
    let report = check_conditions(&fc, s0, v0, vt, tol_denom)?;
    emit(a.out.out.as_deref(), &json(&report)?)
}

fn selftest_cmd() -> CliResult<()> {
    let exe = std::env::current_exe().map_err(|source| nullfront::Error::Io {
        path: "<current executable>".into(),
        source,
    })?;
    let checks = selftest::run_all(&exe);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Validation(format!(
            "{failed} of {} checks failed",
            checks.len()
        )));
    }
    Ok(())
}
