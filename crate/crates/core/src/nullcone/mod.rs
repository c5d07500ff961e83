//! Nullcone fronts `NF(s, lambda) = gamma(s) + lambda (v1(s) +/- v2(s))` and
//! the classification of their singular points.
//!
//! The singular set is the zero set of the area density
//! `Omega = -(alpha + lambda (m +/- n))`, i.e. the curve
//! `lambda(s) = -alpha / (m +/- n)`. A point of it is a cuspidal edge when
//!
//! ```text
//! sigma = alpha (-(m' +/- n') + ell (n +/- m)) + alpha' (m +/- n)
//! ```
//!
//! is nonzero, and a swallowtail when `sigma = 0` but `sigma' != 0`.

mod mesh;

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4x2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framed::FramedCurve;
use crate::geom4::{pseudo_dot, triple_product, Vec4};
use crate::jet::{vec_d, vec_value, Jet4};
use crate::roots::{scan_roots, RootScan};

pub use mesh::{sample_mesh, FrontMesh, LocusVertex, MarkedPoint, MeshRequest, Projection};

/// Default zero band for `alpha` and `sigma`.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default zero band for `m +/- n`.
pub const DEFAULT_TOL_DENOM: f64 = 1e-10;
/// Relative singular-value threshold for the numerical rank of the Jacobian.
pub const RANK_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontSheet {
    Plus,
    Minus,
}

impl FrontSheet {
    pub const BOTH: [FrontSheet; 2] = [FrontSheet::Plus, FrontSheet::Minus];

    pub fn sign(self) -> f64 {
        match self {
            FrontSheet::Plus => 1.0,
            FrontSheet::Minus => -1.0,
        }
    }
}

impl fmt::Display for FrontSheet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrontSheet::Plus => "plus",
            FrontSheet::Minus => "minus",
        })
    }
}

impl FromStr for FrontSheet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(FrontSheet::Plus),
            "minus" | "-" => Ok(FrontSheet::Minus),
            other => Err(Error::InvalidInput(format!(
                "sheet must be plus or minus, got `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularClass {
    CuspidalEdge,
    Swallowtail,
    HigherDegenerate,
}

impl fmt::Display for SingularClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingularClass::CuspidalEdge => "CuspidalEdge",
            SingularClass::Swallowtail => "Swallowtail",
            SingularClass::HigherDegenerate => "HigherDegenerate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub tol_denom: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol: DEFAULT_TOL,
            tol_denom: DEFAULT_TOL_DENOM,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularPointReport {
    pub s0: f64,
    pub lambda0: f64,
    pub class: SingularClass,
    pub alpha: f64,
    pub dalpha: f64,
    pub ddalpha: f64,
    pub sigma: f64,
    pub dsigma: f64,
    pub sheet: FrontSheet,
}

/// Why a point was singled out by [`find_singularities`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    AlphaRoot,
    SigmaRoot,
    AlphaAndSigmaRoot,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishedPoint {
    pub origin: Origin,
    pub report: SingularPointReport,
}

/// Outcome of a singularity scan over a parameter range.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SingularityScan {
    pub points: Vec<DistinguishedPoint>,
    /// Roots that could not be classified, or grid points that could not be
    /// evaluated, with the reason.
    pub failures: Vec<(f64, String)>,
}

impl SingularityScan {
    pub fn reports(&self) -> Vec<SingularPointReport> {
        self.points.iter().map(|p| p.report).collect()
    }
}

/// Jets of `alpha`, `m +/- n` and `sigma` at one point.
#[derive(Clone, Copy, Debug)]
pub struct SigmaJets {
    pub alpha: Jet4,
    pub ell: Jet4,
    pub denom: Jet4,
    pub sigma: Jet4,
}

pub fn sigma_jets(fc: &FramedCurve, s: f64, sheet: FrontSheet) -> Result<SigmaJets> {
    let p = sheet.sign();
    let c = fc.curvature_jets(s)?;
    let denom = c.m + c.n.scale(p);
    let sigma = c.alpha * (-denom.derivative() + c.ell * (c.n + c.m.scale(p)))
        + c.alpha.derivative() * denom;
    Ok(SigmaJets {
        alpha: c.alpha,
        ell: c.ell,
        denom,
        sigma,
    })
}

pub fn front_point(fc: &FramedCurve, s: f64, lambda: f64, sheet: FrontSheet) -> Result<Vec4> {
    let f = fc.frame_at(s)?;
    Ok(f.gamma + (f.v1 + f.v2 * sheet.sign()) * lambda)
}

/// The null direction `v1 +/- v2` at `s`.
pub fn null_direction(fc: &FramedCurve, s: f64, sheet: FrontSheet) -> Result<Vec4> {
    let f = fc.frame_at(s)?;
    Ok(f.v1 + f.v2 * sheet.sign())
}

pub fn area_density(fc: &FramedCurve, s: f64, lambda: f64, sheet: FrontSheet) -> Result<f64> {
    let c = fc.curvature_at(s)?;
    Ok(-(c.alpha + lambda * (c.m + sheet.sign() * c.n)))
}

fn checked_denom(s: f64, denom: f64, tol_denom: f64) -> Result<f64> {
    if denom.abs() > tol_denom {
        Ok(denom)
    } else {
        Err(Error::DenominatorNearZero { s, value: denom })
    }
}

/// `lambda(s) = -alpha / (m +/- n)`.
pub fn singular_lambda(fc: &FramedCurve, s: f64, sheet: FrontSheet, tol_denom: f64) -> Result<f64> {
    let c = fc.curvature_at(s)?;
    let d = checked_denom(s, c.m + sheet.sign() * c.n, tol_denom)?;
    Ok(-c.alpha / d)
}

/// `(sigma, sigma')` at `s`.
pub fn sigma(fc: &FramedCurve, s: f64, sheet: FrontSheet) -> Result<(f64, f64)> {
    let j = sigma_jets(fc, s, sheet)?;
    Ok((j.sigma.value(), j.sigma.d(1)))
}

pub fn classify_at(
    fc: &FramedCurve,
    s0: f64,
    sheet: FrontSheet,
    tol: Tolerances,
) -> Result<SingularPointReport> {
    let j = sigma_jets(fc, s0, sheet)?;
    let d = checked_denom(s0, j.denom.value(), tol.tol_denom)?;
    let (sigma, dsigma) = (j.sigma.value(), j.sigma.d(1));
    let class = if sigma.abs() > tol.tol {
        SingularClass::CuspidalEdge
    } else if dsigma.abs() > tol.tol {
        SingularClass::Swallowtail
    } else {
        SingularClass::HigherDegenerate
    };
    Ok(SingularPointReport {
        s0,
        lambda0: -j.alpha.value() / d,
        class,
        alpha: j.alpha.value(),
        dalpha: j.alpha.d(1),
        ddalpha: j.alpha.d(2),
        sigma,
        dsigma,
        sheet,
    })
}

/// `det(c'(s0), xi(s0))` for the singular curve `c(s) = (s, lambda(s))` and
/// the null vector field `xi = (1, +/- alpha ell / (m +/- n))`.
pub fn transversality_det(
    fc: &FramedCurve,
    s0: f64,
    sheet: FrontSheet,
    tol_denom: f64,
) -> Result<f64> {
    let j = sigma_jets(fc, s0, sheet)?;
    checked_denom(s0, j.denom.value(), tol_denom)?;
    let lambda = (-j.alpha).checked_div(&j.denom)?;
    let xi2 = sheet.sign() * j.alpha.value() * j.ell.value() / j.denom.value();
    Ok(xi2 - lambda.d(1))
}

/// `NF x d_s NF x d_lambda NF`, which vanishes exactly on the singular set.
pub fn front_triple(fc: &FramedCurve, s: f64, lambda: f64, sheet: FrontSheet) -> Result<Vec4> {
    let (nf, ds, dl) = front_partials(fc, s, lambda, sheet)?;
    Ok(triple_product(nf, ds, dl))
}

fn front_partials(
    fc: &FramedCurve,
    s: f64,
    lambda: f64,
    sheet: FrontSheet,
) -> Result<(Vec4, Vec4, Vec4)> {
    let j = fc.frame_jets(s)?;
    let p = sheet.sign();
    let dir = vec_value(&j.v1) + vec_value(&j.v2) * p;
    let nf = vec_value(&j.gamma) + dir * lambda;
    let ds = vec_d(&j.gamma, 1) + (vec_d(&j.v1, 1) + vec_d(&j.v2, 1) * p) * lambda;
    Ok((nf, ds, dir))
}

/// Numerical rank of the 4x2 Jacobian of the front, with its singular values.
pub fn jacobian_rank(
    fc: &FramedCurve,
    s: f64,
    lambda: f64,
    sheet: FrontSheet,
) -> Result<(usize, [f64; 2])> {
    let (_, ds, dl) = front_partials(fc, s, lambda, sheet)?;
    let jac = Matrix4x2::from_fn(|i, k| if k == 0 { ds[i] } else { dl[i] });
    let sv = jac.singular_values();
    let (hi, lo) = (sv[0].max(sv[1]), sv[0].min(sv[1]));
    let rank = if hi == 0.0 {
        0
    } else if lo > RANK_THRESHOLD * hi {
        2
    } else {
        1
    };
    Ok((rank, [hi, lo]))
}

/// Max of `|<v1 +/- v2, v1 +/- v2>|` over a uniform grid.
pub fn null_direction_defect(fc: &FramedCurve, sheet: FrontSheet, grid: usize) -> Result<f64> {
    let (a, b) = fc.interval();
    let mut worst = 0.0f64;
    for s in crate::framed::uniform_grid(a, b, grid) {
        let d = null_direction(fc, s, sheet)?;
        worst = worst.max(pseudo_dot(d, d).abs());
    }
    Ok(worst)
}

/// Finds the roots of `alpha` and of `sigma` on `range` and classifies each.
pub fn find_singularities(
    fc: &FramedCurve,
    sheet: FrontSheet,
    range: (f64, f64),
    grid: usize,
    tol: Tolerances,
) -> Result<SingularityScan> {
    if grid < 16 {
        return Err(Error::InvalidInput(format!(
            "scan grid must be >= 16, got {grid}"
        )));
    }
    let (a, b) = range;
    if !(a < b) {
        return Err(Error::InvalidInput(format!("empty range [{a}, {b}]")));
    }
    let (ia, ib) = fc.interval();
    let slack = 1e-9 * (ib - ia).abs().max(1.0);
    if a < ia - slack || b > ib + slack {
        return Err(Error::OutOfInterval {
            s: if a < ia { a } else { b },
            a: ia,
            b: ib,
        });
    }

    let alpha_scan = scan_roots(
        |s| {
            fc.curvature_jets(s)
                .map(|c| (c.alpha.value(), c.alpha.d(1)))
        },
        a,
        b,
        grid,
        tol.tol,
    );
    let sigma_scan = scan_roots(
        |s| sigma_jets(fc, s, sheet).map(|j| (j.sigma.value(), j.sigma.d(1))),
        a,
        b,
        grid,
        tol.tol,
    );

    let mut candidates: Vec<(f64, Origin)> = Vec::new();
    candidates.extend(alpha_scan.roots.iter().map(|r| (r.s, Origin::AlphaRoot)));
    for r in &sigma_scan.roots {
        match candidates.iter_mut().find(|(s, _)| (s - r.s).abs() < 1e-6) {
            Some(c) => c.1 = Origin::AlphaAndSigmaRoot,
            None => candidates.push((r.s, Origin::SigmaRoot)),
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));

    let classified: Vec<(f64, Origin, Result<SingularPointReport>)> = candidates
        .par_iter()
        .map(|&(s, origin)| (s, origin, classify_at(fc, s, sheet, tol)))
        .collect();

    let mut out = SingularityScan::default();
    for (s, origin, r) in classified {
        match r {
            Ok(report) => out.points.push(DistinguishedPoint { origin, report }),
            Err(e) => out.failures.push((s, e.to_string())),
        }
    }
    for RootScan { failures, .. } in [alpha_scan, sigma_scan] {
        out.failures.extend(failures);
    }
    Ok(out)
}
