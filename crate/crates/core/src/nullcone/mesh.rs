//! Sampling of a front sheet on a uniform `(s, lambda)` grid, with OBJ and
//! CSV export.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{find_singularities, FrontSheet, SingularClass, Tolerances};
use crate::error::{Error, Result};
use crate::framed::{uniform_grid, FramedCurve};
use crate::geom4::Vec4;

/// Map from the ambient 4-space to 3-space for display.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Projection {
    /// Drop one coordinate (zero-based index).
    Drop(usize),
    Matrix([[f64; 4]; 3]),
}

impl Default for Projection {
    fn default() -> Self {
        Projection::Drop(0)
    }
}

impl Projection {
    pub fn apply(&self, u: Vec4) -> [f64; 3] {
        match *self {
            Projection::Drop(k) => {
                let mut out = [0.0; 3];
                let mut i = 0;
                for (j, x) in u.0.iter().enumerate() {
                    if j != k {
                        out[i] = *x;
                        i += 1;
                    }
                }
                out
            }
            Projection::Matrix(m) => std::array::from_fn(|i| (0..4).map(|j| m[i][j] * u[j]).sum()),
        }
    }

    /// Reads a 3x4 matrix stored as a JSON array of rows.
    pub fn read_matrix(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let m: [[f64; 4]; 3] = serde_json::from_str(&text)?;
        if m.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "projection matrix has non-finite entries".into(),
            ));
        }
        Ok(Projection::Matrix(m))
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Projection::Drop(k) if k > 3 => Err(Error::InvalidInput(format!(
                "cannot drop coordinate {k}; expected 0..=3"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshRequest {
    pub sheet: FrontSheet,
    pub s_range: (f64, f64),
    pub l_range: (f64, f64),
    pub ns: usize,
    pub nl: usize,
    pub projection: Projection,
    pub tol: Tolerances,
    /// Grid used to locate the distinguished singular points.
    pub scan_grid: usize,
}

impl MeshRequest {
    pub fn new(
        sheet: FrontSheet,
        s_range: (f64, f64),
        l_range: (f64, f64),
        ns: usize,
        nl: usize,
    ) -> Self {
        MeshRequest {
            sheet,
            s_range,
            l_range,
            ns,
            nl,
            projection: Projection::default(),
            tol: Tolerances::default(),
            scan_grid: 256,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocusVertex {
    pub s: f64,
    pub lambda: f64,
    pub point: Vec4,
    pub projected: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub s: f64,
    pub lambda: f64,
    pub class: SingularClass,
    pub point: Vec4,
    pub projected: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontMesh {
    pub sheet: FrontSheet,
    pub ns: usize,
    pub nl: usize,
    pub s_values: Vec<f64>,
    pub l_values: Vec<f64>,
    /// Row-major: vertex `(i, j)` sits at `i * nl + j`.
    pub vertices: Vec<Vec4>,
    pub projected: Vec<[f64; 3]>,
    /// Area density at each vertex.
    pub omega: Vec<f64>,
    /// Connected runs of the singular curve inside the lambda range.
    pub locus: Vec<Vec<LocusVertex>>,
    /// Parameters where `m +/- n` was too small to place the locus.
    pub locus_gaps: Vec<f64>,
    pub marked: Vec<MarkedPoint>,
}

struct Row {
    vertices: Vec<Vec4>,
    omega: Vec<f64>,
    locus: std::result::Result<Option<LocusVertex>, ()>,
}

pub fn sample_mesh(fc: &FramedCurve, req: &MeshRequest) -> Result<FrontMesh> {
    if req.ns < 2 || req.nl < 2 {
        return Err(Error::InvalidInput(format!(
            "mesh grid must be at least 2x2, got {}x{}",
            req.ns, req.nl
        )));
    }
    for (name, (a, b)) in [("s", req.s_range), ("lambda", req.l_range)] {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!(
                "empty {name} range [{a}, {b}]"
            )));
        }
    }
    req.projection.validate()?;
    let p = req.sheet.sign();
    let s_values = uniform_grid(req.s_range.0, req.s_range.1, req.ns);
    let l_values = uniform_grid(req.l_range.0, req.l_range.1, req.nl);
    let (lmin, lmax) = req.l_range;

    let rows: Vec<Row> = s_values
        .par_iter()
        .map(|&s| -> Result<Row> {
            let f = fc.frame_at(s)?;
            let c = fc.curvature_at(s)?;
            let dir = f.v1 + f.v2 * p;
            let denom = c.m + p * c.n;
            let vertices = l_values.iter().map(|&l| f.gamma + dir * l).collect();
            let omega = l_values.iter().map(|&l| -(c.alpha + l * denom)).collect();
            let locus = if denom.abs() > req.tol.tol_denom {
                let lambda = -c.alpha / denom;
                Ok((lambda >= lmin && lambda <= lmax).then(|| {
                    let point = f.gamma + dir * lambda;
                    LocusVertex {
                        s,
                        lambda,
                        point,
                        projected: req.projection.apply(point),
                    }
                }))
            } else {
                Err(())
            };
            Ok(Row {
                vertices,
                omega,
                locus,
            })
        })
        .collect::<Result<_>>()?;

    let mut mesh = FrontMesh {
        sheet: req.sheet,
        ns: req.ns,
        nl: req.nl,
        vertices: Vec::with_capacity(req.ns * req.nl),
        projected: Vec::with_capacity(req.ns * req.nl),
        omega: Vec::with_capacity(req.ns * req.nl),
        locus: Vec::new(),
        locus_gaps: Vec::new(),
        marked: Vec::new(),
        s_values,
        l_values,
    };
    let mut run: Vec<LocusVertex> = Vec::new();
    for (row, &s) in rows.into_iter().zip(&mesh.s_values) {
        mesh.projected
            .extend(row.vertices.iter().map(|v| req.projection.apply(*v)));
        mesh.vertices.extend(row.vertices);
        mesh.omega.extend(row.omega);
        match row.locus {
            Ok(Some(v)) => run.push(v),
            Ok(None) => {}
            Err(()) => mesh.locus_gaps.push(s),
        }
        if !matches!(row.locus, Ok(Some(_))) && !run.is_empty() {
            mesh.locus.push(std::mem::take(&mut run));
        }
    }
    if !run.is_empty() {
        mesh.locus.push(run);
    }

    let scan = find_singularities(fc, req.sheet, req.s_range, req.scan_grid.max(16), req.tol)?;
    for pt in scan.points {
        let r = pt.report;
        if r.lambda0 >= lmin && r.lambda0 <= lmax {
            let point = super::front_point(fc, r.s0, r.lambda0, req.sheet)?;
            mesh.marked.push(MarkedPoint {
                s: r.s0,
                lambda: r.lambda0,
                class: r.class,
                point,
                projected: req.projection.apply(point),
            });
        }
    }
    Ok(mesh)
}

impl FrontMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn swallowtails(&self) -> impl Iterator<Item = &MarkedPoint> {
        self.marked
            .iter()
            .filter(|m| m.class == SingularClass::Swallowtail)
    }

    /// Wavefront OBJ: the front as quads, then the singular curve as
    /// polylines and the distinguished points as point elements.
    pub fn write_obj<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# nullcone front, sheet {}, {}x{} grid",
            self.sheet, self.ns, self.nl
        )?;
        writeln!(w, "o front")?;
        for [x, y, z] in &self.projected {
            writeln!(w, "v {x:?} {y:?} {z:?}")?;
        }
        for i in 0..self.ns - 1 {
            for j in 0..self.nl - 1 {
                let a = i * self.nl + j + 1;
                let b = a + self.nl;
                writeln!(w, "f {a} {b} {} {}", b + 1, a + 1)?;
            }
        }
        let mut next = self.vertices.len() + 1;
        if !self.locus.is_empty() {
            writeln!(w, "o singular_curve")?;
            for run in &self.locus {
                for v in run {
                    let [x, y, z] = v.projected;
                    writeln!(w, "v {x:?} {y:?} {z:?}")?;
                }
                if run.len() >= 2 {
                    let ids: Vec<String> =
                        (next..next + run.len()).map(|k| k.to_string()).collect();
                    writeln!(w, "l {}", ids.join(" "))?;
                }
                next += run.len();
            }
        }
        if !self.marked.is_empty() {
            writeln!(w, "o singular_points")?;
            for m in &self.marked {
                let [x, y, z] = m.projected;
                writeln!(w, "# {} s={:?} lambda={:?}", m.class, m.s, m.lambda)?;
                writeln!(w, "v {x:?} {y:?} {z:?}")?;
                writeln!(w, "p {next}")?;
                next += 1;
            }
        }
        Ok(())
    }

    /// One row per vertex: `s, lambda, u1..u4, x, y, z, omega`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "s", "lambda", "u1", "u2", "u3", "u4", "x", "y", "z", "omega",
        ])?;
        for i in 0..self.ns {
            for j in 0..self.nl {
                let k = i * self.nl + j;
                let u = self.vertices[k];
                let q = self.projected[k];
                let fields = [
                    self.s_values[i],
                    self.l_values[j],
                    u[0],
                    u[1],
                    u[2],
                    u[3],
                    q[0],
                    q[1],
                    q[2],
                    self.omega[k],
                ];
                out.write_record(fields.iter().map(|x| format!("{x:.16e}")))?;
            }
        }
        out.flush().map_err(|source| Error::Io {
            path: "<mesh csv>".into(),
            source,
        })?;
        Ok(())
    }
}
