//! Curve definitions: analytic component expressions, the built-in catalog,
//! curve-spec files and sampled (CSV) curves.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::geom4::{PseudoSphereKind, Vec4};
use crate::jet::{vec_value, Jet4, VecJet};

/// Four component expressions of a curve (or frame vector) in `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    pub name: String,
    pub components: [Expr; 4],
    pub intended_sphere: PseudoSphereKind,
}

impl CurveSpec {
    pub fn parse(name: &str, sources: &[&str; 4], sphere: PseudoSphereKind) -> Result<Self> {
        let mut components = Vec::with_capacity(4);
        for src in sources {
            components.push(parse_expr(src)?);
        }
        Ok(CurveSpec {
            name: name.to_string(),
            components: components.try_into().expect("four components"),
            intended_sphere: sphere,
        })
    }

    pub fn eval_jets(&self, s: f64) -> Result<VecJet> {
        let mut out = [Jet4::default(); 4];
        for (slot, e) in out.iter_mut().zip(&self.components) {
            *slot = e.eval_jet(s)?;
        }
        Ok(out)
    }

    pub fn eval(&self, s: f64) -> Result<Vec4> {
        Ok(vec_value(&self.eval_jets(s)?))
    }

    pub fn sources(&self) -> [String; 4] {
        std::array::from_fn(|i| self.components[i].to_string())
    }
}

/// Anything that supplies the triple `(gamma, v1, v2)` as jets in `s`.
pub trait FrameSource: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Parameter interval `[a, b]` on which the source is defined.
    fn interval(&self) -> (f64, f64);

    /// Jets of `gamma`, `v1`, `v2` at `s`.
    fn jets(&self, s: f64) -> Result<[VecJet; 3]>;
}

/// A frame given by closed-form expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticFrame {
    pub name: String,
    pub gamma: CurveSpec,
    pub v1: CurveSpec,
    pub v2: CurveSpec,
    pub interval: (f64, f64),
}

impl FrameSource for AnalyticFrame {
    fn name(&self) -> &str {
        &self.name
    }

    fn interval(&self) -> (f64, f64) {
        self.interval
    }

    fn jets(&self, s: f64) -> Result<[VecJet; 3]> {
        Ok([
            self.gamma.eval_jets(s)?,
            self.v1.eval_jets(s)?,
            self.v2.eval_jets(s)?,
        ])
    }
}

/// A source mapped through a fixed linear transformation.
#[derive(Clone, Debug)]
pub struct TransformedFrame {
    inner: Arc<dyn FrameSource>,
    matrix: [[f64; 4]; 4],
    name: String,
}

impl TransformedFrame {
    pub fn new(inner: Arc<dyn FrameSource>, matrix: [[f64; 4]; 4]) -> Self {
        let name = format!("{}(transformed)", inner.name());
        TransformedFrame {
            inner,
            matrix,
            name,
        }
    }
}

fn apply_matrix(m: &[[f64; 4]; 4], v: &VecJet) -> VecJet {
    std::array::from_fn(|i| (0..4).fold(Jet4::default(), |acc, j| acc + v[j].scale(m[i][j])))
}

impl FrameSource for TransformedFrame {
    fn name(&self) -> &str {
        &self.name
    }

    fn interval(&self) -> (f64, f64) {
        self.inner.interval()
    }

    fn jets(&self, s: f64) -> Result<[VecJet; 3]> {
        let j = self.inner.jets(s)?;
        Ok(j.map(|v| apply_matrix(&self.matrix, &v)))
    }
}

/// On-disk curve-spec document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpecFile {
    pub name: String,
    pub gamma: [String; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<[String; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v2: Option<[String; 4]>,
    pub interval: [f64; 2],
}

fn as_refs(a: &[String; 4]) -> [&str; 4] {
    std::array::from_fn(|i| a[i].as_str())
}

impl CurveSpecFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn gamma_spec(&self) -> Result<CurveSpec> {
        CurveSpec::parse(
            &format!("{}.gamma", self.name),
            &as_refs(&self.gamma),
            PseudoSphereKind::AdS3,
        )
    }

    /// Builds the full frame; both `v1` and `v2` must be present.
    pub fn to_frame(&self) -> Result<AnalyticFrame> {
        let [a, b] = self.interval;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!("bad interval [{a}, {b}]")));
        }
        let missing = |which: &str| Error::InvalidInput(format!("curve spec lacks `{which}`"));
        let v1 = self.v1.as_ref().ok_or_else(|| missing("v1"))?;
        let v2 = self.v2.as_ref().ok_or_else(|| missing("v2"))?;
        // Sphere of v1/v2 is only known once epsilon is detected; record the usual case.
        Ok(AnalyticFrame {
            name: self.name.clone(),
            gamma: self.gamma_spec()?,
            v1: CurveSpec::parse(
                &format!("{}.v1", self.name),
                &as_refs(v1),
                PseudoSphereKind::S3_2,
            )?,
            v2: CurveSpec::parse(
                &format!("{}.v2", self.name),
                &as_refs(v2),
                PseudoSphereKind::AdS3,
            )?,
            interval: (a, b),
        })
    }

    pub fn from_frame(frame: &AnalyticFrame) -> Self {
        CurveSpecFile {
            name: frame.name.clone(),
            gamma: frame.gamma.sources(),
            v1: Some(frame.v1.sources()),
            v2: Some(frame.v2.sources()),
            interval: [frame.interval.0, frame.interval.1],
        }
    }
}

/// A frame known only at sample points; jets come from local quintic
/// interpolation through the six nearest samples.
#[derive(Clone, Debug)]
pub struct SampledFrame {
    name: String,
    s: Vec<f64>,
    rows: Vec<[Vec4; 3]>,
}

/// Number of nodes in each local interpolant (degree five).
const STENCIL: usize = 6;

impl SampledFrame {
    pub fn new(name: impl Into<String>, s: Vec<f64>, rows: Vec<[Vec4; 3]>) -> Result<Self> {
        if s.len() != rows.len() {
            return Err(Error::InvalidInput(
                "sample columns differ in length".into(),
            ));
        }
        if s.len() < STENCIL {
            return Err(Error::InsufficientSamples {
                needed: STENCIL,
                got: s.len(),
            });
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("s must be strictly increasing".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) || s.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        Ok(SampledFrame {
            name: name.into(),
            s,
            rows,
        })
    }

    /// Reads the `s,g1..g4,v11..v14,v21..v24` CSV layout; further columns
    /// (such as `mu1..mu4`) are ignored.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|x| x.to_string_lossy().into_owned())
            .unwrap_or_else(|| "samples".into());
        Self::from_reader(name, file)
    }

    pub fn from_reader(name: impl Into<String>, reader: impl std::io::Read) -> Result<Self> {
        const HEADER: [&str; 13] = [
            "s", "g1", "g2", "g3", "g4", "v11", "v12", "v13", "v14", "v21", "v22", "v23", "v24",
        ];
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < HEADER.len() || header.iter().zip(HEADER).any(|(h, w)| h != w) {
            return Err(Error::InvalidInput(format!(
                "expected CSV header `{}`",
                HEADER.join(",")
            )));
        }
        let mut s = Vec::new();
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let mut vals = [0.0; 13];
            for (slot, field) in vals.iter_mut().zip(record.iter()) {
                *slot = field
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad number `{field}`")))?;
            }
            s.push(vals[0]);
            let v = |k: usize| Vec4::new(vals[k], vals[k + 1], vals[k + 2], vals[k + 3]);
            rows.push([v(1), v(5), v(9)]);
        }
        Self::new(name, s, rows)
    }

    pub fn samples(&self) -> (&[f64], &[[Vec4; 3]]) {
        (&self.s, &self.rows)
    }

    fn window(&self, s: f64) -> usize {
        let n = self.s.len();
        let idx = self.s.partition_point(|x| *x < s);
        idx.saturating_sub(STENCIL / 2).min(n - STENCIL)
    }
}

/// Jet at `s` of the interpolating polynomial through `(xs[i], ys[i])`.
fn newton_jet(xs: &[f64], ys: &[f64], s: f64) -> Jet4 {
    let n = xs.len();
    let mut c = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            c[i] = (c[i] - c[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let t = Jet4::variable(s);
    let mut acc = Jet4::constant(c[n - 1]);
    for i in (0..n - 1).rev() {
        acc = acc * (t - Jet4::constant(xs[i])) + Jet4::constant(c[i]);
    }
    acc
}

impl FrameSource for SampledFrame {
    fn name(&self) -> &str {
        &self.name
    }

    fn interval(&self) -> (f64, f64) {
        (self.s[0], *self.s.last().unwrap())
    }

    fn jets(&self, s: f64) -> Result<[VecJet; 3]> {
        let start = self.window(s);
        let xs = &self.s[start..start + STENCIL];
        let mut out = [[Jet4::default(); 4]; 3];
        for (k, vec) in out.iter_mut().enumerate() {
            for (c, slot) in vec.iter_mut().enumerate() {
                let ys: Vec<f64> = self.rows[start..start + STENCIL]
                    .iter()
                    .map(|r| r[k][c])
                    .collect();
                *slot = newton_jet(xs, &ys, s);
            }
        }
        Ok(out)
    }
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 4] = ["example1", "example2", "example3", "geodesic"];

/// Built-in framed curves with closed-form components.
pub fn catalog(name: &str) -> Result<AnalyticFrame> {
    use PseudoSphereKind::{AdS3, S3_2};
    let frame = |gamma: [&str; 4], v1: [&str; 4], v2: [&str; 4], interval: (f64, f64)| {
        Ok(AnalyticFrame {
            name: name.to_string(),
            gamma: CurveSpec::parse(&format!("{name}.gamma"), &gamma, AdS3)?,
            v1: CurveSpec::parse(&format!("{name}.v1"), &v1, S3_2)?,
            v2: CurveSpec::parse(&format!("{name}.v2"), &v2, AdS3)?,
            interval,
        })
    };
    match name {
        "example1" => {
            const N1: &str = "sqrt(2*(8+18*s^2+s^6))";
            const N2: &str = "(sqrt(8+18*s^2+s^6)*sqrt(4+9*s^2+13*s^6))";
            frame(
                [
                    "sqrt(1+s^4)/sqrt(2)",
                    "sqrt(1+s^6)/sqrt(2)",
                    "s^2/sqrt(2)",
                    "s^3/sqrt(2)",
                ],
                [
                    &format!("s^3*sqrt(1+s^4)/{N1}"),
                    &format!("s^3*sqrt(1+s^6)/{N1}"),
                    &format!("(s^5+6*s)/{N1}"),
                    &format!("(s^6-4)/{N1}"),
                ],
                [
                    &format!("-sqrt(1+s^4)*(4+9*s^2-2*s^6)/{N2}"),
                    &format!("sqrt(1+s^6)*(4+9*s^2+3*s^6)/{N2}"),
                    &format!("2*s^2*(-2+3*s^2+s^6)/{N2}"),
                    &format!("3*s^3*(-2+3*s^2+s^6)/{N2}"),
                ],
                (-1.0, 1.0),
            )
        }
        "example2" => {
            const D: &str = "sqrt(1+sin(s)^2*cos(s)^2)";
            frame(
                ["0", "sqrt(1+sin(s)^6+cos(s)^6)", "cos(s)^3", "sin(s)^3"],
                [
                    "0",
                    &format!("sin(s)*cos(s)*sqrt(1+cos(s)^6+sin(s)^6)/{D}"),
                    &format!("sin(s)*(1+cos(s)^4)/{D}"),
                    &format!("cos(s)*(1+sin(s)^4)/{D}"),
                ],
                ["1", "0", "0", "0"],
                (0.0, 2.0 * std::f64::consts::PI),
            )
        }
        "example3" => {
            const E: &str = "sqrt(s^8+16*s^2+9)";
            frame(
                ["0", "sqrt(1+s^6+s^8)", "s^3", "s^4"],
                [
                    "0",
                    &format!("s^4*sqrt(1+s^6+s^8)/{E}"),
                    &format!("(s^7+4*s)/{E}"),
                    &format!("(s^8-3)/{E}"),
                ],
                ["1", "0", "0", "0"],
                (-1.0, 1.0),
            )
        }
        "geodesic" => frame(
            ["cosh(s)", "0", "0", "sinh(s)"],
            ["0", "0", "1", "0"],
            ["0", "1", "0", "0"],
            (-1.0, 1.0),
        ),
        other => Err(Error::UnknownCatalogEntry(other.to_string())),
    }
}

/// Singular parameters documented for each catalog curve. Scans may find
/// more; callers report the difference.
pub fn documented_singular_parameters(name: &str) -> &'static [f64] {
    use std::f64::consts::{FRAC_PI_2, PI};
    match name {
        "example1" | "example3" => &[0.0],
        "example2" => &[0.0, FRAC_PI_2, PI, 2.0 * PI],
        _ => &[],
    }
}
