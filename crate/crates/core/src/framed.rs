//! Pseudo-spherical spacelike framed curves in AdS^3.
//!
//! A framed curve is a triple `(gamma, v1, v2)` with `gamma` in AdS^3, the
//! pair `(v1, v2)` pseudo-orthonormal, orthogonal to `gamma`, and
//! `<gamma', v_i> = 0`. Completing with `mu = gamma x v1 x v2` gives a frame
//! that stays defined where `gamma' = 0`; its derivative is governed by
//!
//! ```text
//! gamma' = alpha mu
//! v1'    = ell v2 + m mu
//! v2'    = ell v1 + n mu
//! mu'    = alpha gamma - eps m v1 + eps n v2
//! ```
//!
//! with `eps = <v1, v1>`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::curve::{catalog, CurveSpecFile, FrameSource, SampledFrame, TransformedFrame};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::geom4::{cross3, metric, pseudo_dot, triple_product, Vec4, SIGNATURE};
use crate::jet::{vec_derivative, vec_value, Jet4, VecJet};

/// Residual bound on the framed-curve identities.
pub const FRAME_TOL: f64 = 1e-7;

/// Largest Gram drift tolerated by the integrator before it gives up.
pub const MAX_STEP_DRIFT: f64 = 1e-3;

/// Jets of the full frame at one parameter value.
#[derive(Clone, Copy, Debug)]
pub struct FrameJets {
    pub gamma: VecJet,
    pub v1: VecJet,
    pub v2: VecJet,
    pub mu: VecJet,
}

/// Curvature functions as jets. Each is a pairing with one differentiated
/// frame vector, so derivatives are exact up to order 3.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureJets {
    pub alpha: Jet4,
    pub ell: Jet4,
    pub m: Jet4,
    pub n: Jet4,
}

/// Curvature values and their first derivatives at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    pub s: f64,
    pub alpha: f64,
    pub ell: f64,
    pub m: f64,
    pub n: f64,
    pub dalpha: f64,
    pub dell: f64,
    pub dm: f64,
    pub dn: f64,
}

impl CurvatureJets {
    fn at(&self, s: f64) -> Curvature {
        Curvature {
            s,
            alpha: self.alpha.value(),
            ell: self.ell.value(),
            m: self.m.value(),
            n: self.n.value(),
            dalpha: self.alpha.d(1),
            dell: self.ell.d(1),
            dm: self.m.d(1),
            dn: self.n.d(1),
        }
    }
}

/// The frame `(gamma, v1, v2, mu)` at a parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameState {
    pub s: f64,
    pub gamma: Vec4,
    pub v1: Vec4,
    pub v2: Vec4,
    pub mu: Vec4,
}

impl FrameState {
    /// Builds a state with `mu` completed by the triple product.
    pub fn new(s: f64, gamma: Vec4, v1: Vec4, v2: Vec4) -> Self {
        FrameState {
            s,
            gamma,
            v1,
            v2,
            mu: triple_product(gamma, v1, v2),
        }
    }

    pub fn vectors(&self) -> [Vec4; 4] {
        [self.gamma, self.v1, self.v2, self.mu]
    }

    pub fn gram(&self) -> [[f64; 4]; 4] {
        let v = self.vectors();
        std::array::from_fn(|i| std::array::from_fn(|j| pseudo_dot(v[i], v[j])))
    }

    /// Max deviation of the Gram matrix from `diag(-1, eps, -eps, 1)`.
    pub fn gram_drift(&self, eps: f64) -> f64 {
        let target = [-1.0, eps, -eps, 1.0];
        let g = self.gram();
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let t = if i == j { target[i] } else { 0.0 };
                worst = worst.max((g[i][j] - t).abs());
            }
        }
        worst
    }

    /// The 16 components in the CSV column order.
    pub fn components(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (k, v) in self.vectors().iter().enumerate() {
            out[4 * k..4 * k + 4].copy_from_slice(&v.0);
        }
        out
    }

    /// Column-stack matrix `[gamma | v1 | v2 | mu]`.
    pub fn matrix(&self) -> Matrix4<f64> {
        let v = self.vectors();
        Matrix4::from_fn(|i, j| v[j][i])
    }

    fn axpy(&self, h: f64, d: &[Vec4; 4]) -> FrameState {
        FrameState {
            s: self.s,
            gamma: self.gamma + d[0] * h,
            v1: self.v1 + d[1] * h,
            v2: self.v2 + d[2] * h,
            mu: self.mu + d[3] * h,
        }
    }
}

/// Which of `v1`, `v2` is spacelike.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameOrdering {
    /// `eps = +1`: `v1` in S^3_2, `v2` in AdS^3.
    V1SpacelikeV2Timelike,
    /// `eps = -1`: `v1` in AdS^3, `v2` in S^3_2.
    V1TimelikeV2Spacelike,
}

impl FrameOrdering {
    pub fn from_epsilon(eps: f64) -> Self {
        if eps > 0.0 {
            FrameOrdering::V1SpacelikeV2Timelike
        } else {
            FrameOrdering::V1TimelikeV2Spacelike
        }
    }
}

/// Max residual of each framed-curve identity over a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub curve: String,
    pub grid: usize,
    pub epsilon: f64,
    pub ordering: FrameOrdering,
    /// `(identity, max |residual|)`, in a fixed order.
    pub residuals: Vec<(String, f64)>,
    /// Parameters where `<v1, v1>` had the wrong sign.
    pub epsilon_flips: Vec<f64>,
    pub evaluation_errors: Vec<(f64, String)>,
    pub tolerance: f64,
    pub passed: bool,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|r| r.0 == name).map(|r| r.1)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "curve {} (eps = {:+}, {:?}), grid {}",
            self.curve, self.epsilon, self.ordering, self.grid
        )?;
        for (name, r) in &self.residuals {
            let mark = if *r <= self.tolerance { "ok" } else { "FAIL" };
            writeln!(f, "  {name:<22} {r:.3e}  {mark}")?;
        }
        for s in &self.epsilon_flips {
            writeln!(f, "  sign of <v1,v1> flips at s = {s}")?;
        }
        for (s, e) in &self.evaluation_errors {
            writeln!(f, "  evaluation failed at s = {s}: {e}")?;
        }
        write!(f, "{}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// A framed curve backed by any [`FrameSource`].
#[derive(Clone, Debug)]
pub struct FramedCurve {
    source: Arc<dyn FrameSource>,
    interval: (f64, f64),
    epsilon: f64,
}

impl FramedCurve {
    /// Wraps a source, detecting `eps` from `<v1, v1>` at the interval midpoint.
    pub fn new(source: Arc<dyn FrameSource>) -> Result<Self> {
        let interval = source.interval();
        let mid = 0.5 * (interval.0 + interval.1);
        let [_, v1, _] = source.jets(mid)?;
        let q = pseudo_dot(vec_value(&v1), vec_value(&v1));
        if q == 0.0 || !q.is_finite() {
            return Err(Error::InvalidInput(format!(
                "v1 is lightlike at the midpoint s = {mid}"
            )));
        }
        Ok(FramedCurve {
            source,
            interval,
            epsilon: q.signum(),
        })
    }

    pub fn from_catalog(name: &str) -> Result<Self> {
        Self::new(Arc::new(catalog(name)?))
    }

    pub fn from_spec_file(path: &Path) -> Result<Self> {
        Self::new(Arc::new(CurveSpecFile::read(path)?.to_frame()?))
    }

    pub fn from_samples(path: &Path) -> Result<Self> {
        Self::new(Arc::new(SampledFrame::read_csv(path)?))
    }

    /// The image of this curve under a linear map of the ambient space.
    pub fn transformed(&self, matrix: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Arc::new(TransformedFrame::new(self.source.clone(), matrix)))
    }

    pub fn name(&self) -> &str {
        self.source.name()
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn ordering(&self) -> FrameOrdering {
        FrameOrdering::from_epsilon(self.epsilon)
    }

    fn check_parameter(&self, s: f64) -> Result<()> {
        let (a, b) = self.interval;
        let slack = 1e-9 * (b - a).abs().max(1.0);
        if s.is_finite() && s >= a - slack && s <= b + slack {
            Ok(())
        } else {
            Err(Error::OutOfInterval { s, a, b })
        }
    }

    pub fn frame_jets(&self, s: f64) -> Result<FrameJets> {
        self.check_parameter(s)?;
        let [gamma, v1, v2] = self.source.jets(s)?;
        Ok(FrameJets {
            gamma,
            v1,
            v2,
            mu: cross3(&gamma, &v1, &v2),
        })
    }

    pub fn frame_at(&self, s: f64) -> Result<FrameState> {
        let j = self.frame_jets(s)?;
        Ok(FrameState {
            s,
            gamma: vec_value(&j.gamma),
            v1: vec_value(&j.v1),
            v2: vec_value(&j.v2),
            mu: vec_value(&j.mu),
        })
    }

    pub fn mu_of(&self, s: f64) -> Result<Vec4> {
        Ok(self.frame_at(s)?.mu)
    }

    pub fn curvature_jets(&self, s: f64) -> Result<CurvatureJets> {
        let j = self.frame_jets(s)?;
        let dg = vec_derivative(&j.gamma);
        let dv1 = vec_derivative(&j.v1);
        let dv2 = vec_derivative(&j.v2);
        Ok(CurvatureJets {
            alpha: metric(&dg, &j.mu),
            ell: metric(&dv1, &j.v2).scale(-self.epsilon),
            m: metric(&dv1, &j.mu),
            n: metric(&dv2, &j.mu),
        })
    }

    pub fn curvature_at(&self, s: f64) -> Result<Curvature> {
        Ok(self.curvature_jets(s)?.at(s))
    }

    /// Checks every framed-curve identity on `grid` uniform points.
    pub fn validate(&self, grid: usize) -> Result<ValidationReport> {
        if grid < 2 {
            return Err(Error::InvalidInput("validation grid must be >= 2".into()));
        }
        const NAMES: [&str; 8] = [
            "<g,g> + 1",
            "<v1,v1> - eps",
            "<v2,v2> + eps",
            "<g,v1>",
            "<g,v2>",
            "<v1,v2>",
            "<g',v1>",
            "<g',v2>",
        ];
        let eps = self.epsilon;
        let mut worst = [0.0f64; 8];
        let mut flips = Vec::new();
        let mut errors = Vec::new();
        for s in uniform_grid(self.interval.0, self.interval.1, grid) {
            let j = match self.source.jets(s) {
                Ok(j) => j,
                Err(e) => {
                    errors.push((s, e.to_string()));
                    continue;
                }
            };
            let [g, v1, v2] = j.map(|v| vec_value(&v));
            let dg = Vec4(j[0].map(|c| c.d(1)));
            let q1 = pseudo_dot(v1, v1);
            if q1.signum() != eps {
                flips.push(s);
            }
            let r = [
                pseudo_dot(g, g) + 1.0,
                q1 - eps,
                pseudo_dot(v2, v2) + eps,
                pseudo_dot(g, v1),
                pseudo_dot(g, v2),
                pseudo_dot(v1, v2),
                pseudo_dot(dg, v1),
                pseudo_dot(dg, v2),
            ];
            for (w, x) in worst.iter_mut().zip(r) {
                *w = w.max(if x.is_nan() { f64::INFINITY } else { x.abs() });
            }
        }
        let passed = worst.iter().all(|w| *w <= FRAME_TOL) && flips.is_empty() && errors.is_empty();
        Ok(ValidationReport {
            curve: self.name().to_string(),
            grid,
            epsilon: eps,
            ordering: self.ordering(),
            residuals: NAMES.iter().map(|n| n.to_string()).zip(worst).collect(),
            epsilon_flips: flips,
            evaluation_errors: errors,
            tolerance: FRAME_TOL,
            passed,
        })
    }
}

/// `n` uniformly spaced points from `a` to `b` inclusive.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// A curvature quadruple `(alpha, ell, m, n)` as a function of `s`.
pub trait CurvatureFn: Sync {
    fn curvature(&self, s: f64) -> Result<[f64; 4]>;
}

impl CurvatureFn for FramedCurve {
    fn curvature(&self, s: f64) -> Result<[f64; 4]> {
        let c = self.curvature_jets(s)?;
        Ok([c.alpha.value(), c.ell.value(), c.m.value(), c.n.value()])
    }
}

impl CurvatureFn for [f64; 4] {
    fn curvature(&self, _s: f64) -> Result<[f64; 4]> {
        Ok(*self)
    }
}

/// Prescribed curvature given by four expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureQuad {
    pub alpha: Expr,
    pub ell: Expr,
    pub m: Expr,
    pub n: Expr,
    pub epsilon: f64,
}

impl CurvatureFn for CurvatureQuad {
    fn curvature(&self, s: f64) -> Result<[f64; 4]> {
        Ok([
            self.alpha.eval(s)?,
            self.ell.eval(s)?,
            self.m.eval(s)?,
            self.n.eval(s)?,
        ])
    }
}

/// Initial frame of an integration job; `mu` is completed by the triple product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialFrame {
    pub gamma: Vec4,
    pub v1: Vec4,
    pub v2: Vec4,
}

/// On-disk form of a [`CurvatureQuad`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureQuadFile {
    pub alpha: String,
    pub ell: String,
    pub m: String,
    pub n: String,
    pub epsilon: i8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitialFrame>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
}

impl CurvatureQuadFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn quad(&self) -> Result<CurvatureQuad> {
        if self.epsilon != 1 && self.epsilon != -1 {
            return Err(Error::InvalidInput(format!(
                "epsilon must be +1 or -1, got {}",
                self.epsilon
            )));
        }
        Ok(CurvatureQuad {
            alpha: parse_expr(&self.alpha)?,
            ell: parse_expr(&self.ell)?,
            m: parse_expr(&self.m)?,
            n: parse_expr(&self.n)?,
            epsilon: f64::from(self.epsilon),
        })
    }

    /// The file's initial frame at `s0`, or the standard one for its `eps`.
    pub fn initial_state(&self, s0: f64) -> FrameState {
        match &self.init {
            Some(f) => FrameState::new(s0, f.gamma, f.v1, f.v2),
            None => standard_frame(s0, f64::from(self.epsilon)),
        }
    }
}

/// `gamma = e1` with `(v1, v2) = (e3, e2)` for `eps = +1`, `(e2, e3)` otherwise.
pub fn standard_frame(s: f64, eps: f64) -> FrameState {
    let e = Vec4::basis;
    if eps > 0.0 {
        FrameState::new(s, e(0), e(2), e(1))
    } else {
        FrameState::new(s, e(0), e(1), e(2))
    }
}

fn frame_rhs(state: &FrameState, k: [f64; 4], eps: f64) -> [Vec4; 4] {
    let [alpha, ell, m, n] = k;
    [
        state.mu * alpha,
        state.v2 * ell + state.mu * m,
        state.v1 * ell + state.mu * n,
        state.gamma * alpha - state.v1 * (eps * m) + state.v2 * (eps * n),
    ]
}

fn normalize(v: Vec4) -> Option<Vec4> {
    let q = pseudo_dot(v, v).abs().sqrt();
    (q > 0.0 && q.is_finite()).then(|| v * (1.0 / q))
}

/// Projects a nearly pseudo-orthonormal state back onto the frame manifold:
/// `gamma` first, then `v1`, then `v2`, and `mu` by the triple product.
pub fn reorthonormalize(state: &FrameState, eps: f64) -> Option<FrameState> {
    let gg = pseudo_dot(state.gamma, state.gamma);
    if !(gg < 0.0) {
        return None;
    }
    let gamma = state.gamma * (1.0 / (-gg).sqrt());
    let v1 = normalize(state.v1 + gamma * pseudo_dot(state.v1, gamma))?;
    let v2 = state.v2 + gamma * pseudo_dot(state.v2, gamma) - v1 * (eps * pseudo_dot(state.v2, v1));
    let v2 = normalize(v2)?;
    Some(FrameState::new(state.s, gamma, v1, v2))
}

/// Integrates the frame system with classical RK4 from `init.s` to `s_end`.
///
/// The step is shrunk so that a whole number of steps lands on `s_end`.
pub fn integrate_frame(
    cq: &dyn CurvatureFn,
    init: FrameState,
    eps: f64,
    s_end: f64,
    step: f64,
    reorthonormalize_each_step: bool,
) -> Result<Vec<FrameState>> {
    if eps != 1.0 && eps != -1.0 {
        return Err(Error::InvalidInitialFrame(format!(
            "eps must be +1 or -1, got {eps}"
        )));
    }
    if !(step > 0.0) || !step.is_finite() || !s_end.is_finite() {
        return Err(Error::InvalidInput(format!(
            "bad step {step} or end {s_end}"
        )));
    }
    let drift = init.gram_drift(eps);
    if !(drift <= 1e-9) {
        return Err(Error::InvalidInitialFrame(format!(
            "Gram matrix deviates from diag(-1, {eps}, {}, 1) by {drift:e}",
            -eps
        )));
    }
    let completed = triple_product(init.gamma, init.v1, init.v2);
    if (completed - init.mu).max_abs() > 1e-9 {
        return Err(Error::InvalidInitialFrame(
            "mu is not gamma x v1 x v2".into(),
        ));
    }

    let span = s_end - init.s;
    let steps = (span.abs() / step - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(init);
    if steps == 0 {
        return Ok(out);
    }
    let h = span / steps as f64;
    let mut state = init;
    for i in 0..steps {
        let s = init.s + h * i as f64;
        let k1 = frame_rhs(&state, cq.curvature(s)?, eps);
        let k2 = frame_rhs(&state.axpy(0.5 * h, &k1), cq.curvature(s + 0.5 * h)?, eps);
        let k3 = frame_rhs(&state.axpy(0.5 * h, &k2), cq.curvature(s + 0.5 * h)?, eps);
        let k4 = frame_rhs(&state.axpy(h, &k3), cq.curvature(s + h)?, eps);
        let mut next = state;
        for (slot, idx) in [
            (&mut next.gamma, 0),
            (&mut next.v1, 1),
            (&mut next.v2, 2),
            (&mut next.mu, 3),
        ] {
            *slot += (k1[idx] + k2[idx] * 2.0 + k3[idx] * 2.0 + k4[idx]) * (h / 6.0);
        }
        next.s = if i + 1 == steps {
            s_end
        } else {
            init.s + h * (i + 1) as f64
        };
        let drift = next.gram_drift(eps);
        if !(drift <= MAX_STEP_DRIFT) {
            return Err(Error::StepError { s: next.s, drift });
        }
        if reorthonormalize_each_step {
            next = reorthonormalize(&next, eps).ok_or(Error::StepError { s: next.s, drift })?;
        }
        state = next;
        out.push(state);
    }
    Ok(out)
}

/// Five-point finite-difference weights (times `12 h`) for the derivative at
/// position `at` of a five-sample window.
const FD5: [[f64; 5]; 5] = [
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
    [1.0, -8.0, 0.0, 8.0, -1.0],
    [-1.0, 6.0, -18.0, 10.0, 3.0],
    [3.0, -16.0, 36.0, -48.0, 25.0],
];

fn fd_derivative<T, F>(values: &[T], h: f64, i: usize, zero: T, mut axpy: F) -> T
where
    T: Copy,
    F: FnMut(T, T, f64) -> T,
{
    let n = values.len();
    let start = i.saturating_sub(2).min(n - 5);
    let w = &FD5[i - start];
    let mut acc = zero;
    for (k, wk) in w.iter().enumerate() {
        acc = axpy(acc, values[start + k], *wk / (12.0 * h));
    }
    acc
}

fn fd_scalar(values: &[f64], h: f64) -> Vec<f64> {
    (0..values.len())
        .map(|i| fd_derivative(values, h, i, 0.0, |acc, x, w| acc + x * w))
        .collect()
}

fn fd_vector(values: &[Vec4], h: f64) -> Vec<Vec4> {
    (0..values.len())
        .map(|i| fd_derivative(values, h, i, Vec4::ZERO, |acc, x, w| acc + x * w))
        .collect()
}

/// Curvature sampled on a uniform grid, with derivatives from finite differences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCurvature {
    pub epsilon: f64,
    pub s: Vec<f64>,
    pub alpha: Vec<f64>,
    pub ell: Vec<f64>,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    pub dalpha: Vec<f64>,
    pub dell: Vec<f64>,
    pub dm: Vec<f64>,
    pub dn: Vec<f64>,
}

impl SampledCurvature {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn row(&self, i: usize) -> Curvature {
        Curvature {
            s: self.s[i],
            alpha: self.alpha[i],
            ell: self.ell[i],
            m: self.m[i],
            n: self.n[i],
            dalpha: self.dalpha[i],
            dell: self.dell[i],
            dm: self.dm[i],
            dn: self.dn[i],
        }
    }
}

fn hermite(s0: f64, s1: f64, y0: f64, y1: f64, d0: f64, d1: f64, s: f64) -> f64 {
    let h = s1 - s0;
    let t = (s - s0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

impl CurvatureFn for SampledCurvature {
    /// Cubic Hermite interpolation between samples.
    fn curvature(&self, s: f64) -> Result<[f64; 4]> {
        let n = self.s.len();
        let (a, b) = (self.s[0], self.s[n - 1]);
        let slack = 1e-9 * (b - a).abs().max(1.0);
        if !(s >= a - slack && s <= b + slack) {
            return Err(Error::OutOfInterval { s, a, b });
        }
        let i = self.s.partition_point(|x| *x <= s).clamp(1, n - 1) - 1;
        let interp = |y: &[f64], d: &[f64]| {
            hermite(self.s[i], self.s[i + 1], y[i], y[i + 1], d[i], d[i + 1], s)
        };
        Ok([
            interp(&self.alpha, &self.dalpha),
            interp(&self.ell, &self.dell),
            interp(&self.m, &self.dm),
            interp(&self.n, &self.dn),
        ])
    }
}

/// Recovers `(alpha, ell, m, n)` from a uniformly spaced list of frames.
pub fn extract_curvature(states: &[FrameState]) -> Result<SampledCurvature> {
    const MIN: usize = 5;
    if states.len() < MIN {
        return Err(Error::InsufficientSamples {
            needed: MIN,
            got: states.len(),
        });
    }
    let h = states[1].s - states[0].s;
    if h == 0.0 || !h.is_finite() {
        return Err(Error::InvalidInput("samples must have distinct s".into()));
    }
    for w in states.windows(2) {
        if ((w[1].s - w[0].s) - h).abs() > 1e-6 * h.abs() {
            return Err(Error::InvalidInput(
                "samples are not uniformly spaced".into(),
            ));
        }
    }
    let eps = pseudo_dot(states[0].v1, states[0].v1).signum();
    let col = |f: fn(&FrameState) -> Vec4| states.iter().map(f).collect::<Vec<_>>();
    let dgamma = fd_vector(&col(|x| x.gamma), h);
    let dv1 = fd_vector(&col(|x| x.v1), h);
    let dv2 = fd_vector(&col(|x| x.v2), h);

    let mut alpha = Vec::with_capacity(states.len());
    let mut ell = Vec::with_capacity(states.len());
    let mut m = Vec::with_capacity(states.len());
    let mut n = Vec::with_capacity(states.len());
    for (i, st) in states.iter().enumerate() {
        alpha.push(pseudo_dot(dgamma[i], st.mu));
        ell.push(-eps * pseudo_dot(dv1[i], st.v2));
        m.push(pseudo_dot(dv1[i], st.mu));
        n.push(pseudo_dot(dv2[i], st.mu));
    }
    Ok(SampledCurvature {
        epsilon: eps,
        s: states.iter().map(|x| x.s).collect(),
        dalpha: fd_scalar(&alpha, h),
        dell: fd_scalar(&ell, h),
        dm: fd_scalar(&m, h),
        dn: fd_scalar(&n, h),
        alpha,
        ell,
        m,
        n,
    })
}

/// A linear map of the ambient space, expected to preserve the metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry22 {
    pub matrix: [[f64; 4]; 4],
}

impl Isometry22 {
    pub fn identity() -> Self {
        Isometry22 {
            matrix: std::array::from_fn(|i| {
                std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 })
            }),
        }
    }

    pub fn from_matrix(m: &Matrix4<f64>) -> Self {
        Isometry22 {
            matrix: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])),
        }
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.matrix[i][j])
    }

    pub fn apply(&self, v: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| {
            (0..4).map(|j| self.matrix[i][j] * v[j]).sum()
        }))
    }

    /// `max |A^T G A - G|`.
    pub fn defect(&self) -> f64 {
        let a = self.to_matrix();
        let g = Matrix4::from_diagonal(&nalgebra::Vector4::from(SIGNATURE));
        (a.transpose() * g * a - g).abs().max()
    }
}

/// Anything that yields a frame at a parameter value.
pub trait FrameField {
    fn frame_at(&self, s: f64) -> Result<FrameState>;
}

impl FrameField for FramedCurve {
    fn frame_at(&self, s: f64) -> Result<FrameState> {
        FramedCurve::frame_at(self, s)
    }
}

/// An integrated trajectory; frames are available at its sample points only.
impl FrameField for [FrameState] {
    fn frame_at(&self, s: f64) -> Result<FrameState> {
        let scale = if self.len() > 1 {
            (self[1].s - self[0].s).abs()
        } else {
            1.0
        };
        let i = self
            .iter()
            .map(|x| (x.s - s).abs())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?;
        if (self[i].s - s).abs() <= 1e-6 * scale {
            Ok(self[i])
        } else {
            Err(Error::InvalidInput(format!(
                "s = {s} is not a trajectory sample"
            )))
        }
    }
}

impl FrameField for Vec<FrameState> {
    fn frame_at(&self, s: f64) -> Result<FrameState> {
        self.as_slice().frame_at(s)
    }
}

/// Result of aligning two framed curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Congruence {
    pub isometry: Isometry22,
    /// `max_s |A gamma1(s) - gamma2(s)|_inf` over the comparison points.
    pub residual: f64,
    /// `max |A^T G A - G|`.
    pub isometry_defect: f64,
}

/// Finds the linear map taking the frame of `first` at `s0` to that of
/// `second`, then measures how well it carries one base curve onto the other.
pub fn align_congruence(
    first: &dyn FrameField,
    second: &dyn FrameField,
    s0: f64,
    samples: &[f64],
) -> Result<Congruence> {
    let f1 = first.frame_at(s0)?.matrix();
    let f2 = second.frame_at(s0)?.matrix();
    if f1.determinant().abs() < 1e-12 {
        return Err(Error::SingularFrameMatrix(s0));
    }
    let inv = f1.try_inverse().ok_or(Error::SingularFrameMatrix(s0))?;
    let isometry = Isometry22::from_matrix(&(f2 * inv));
    let mut residual = 0.0f64;
    for &s in samples {
        let g1 = first.frame_at(s)?.gamma;
        let g2 = second.frame_at(s)?.gamma;
        residual = residual.max((isometry.apply(g1) - g2).max_abs());
    }
    Ok(Congruence {
        isometry_defect: isometry.defect(),
        isometry,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    fn close(a: Vec4, b: Vec4, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn mu_examples() {
        let geo = FramedCurve::from_catalog("geodesic").unwrap();
        assert!(close(geo.mu_of(0.0).unwrap(), Vec4::basis(3), 1e-15));

        // printed mu(0) of the trigonometric example
        let e2 = FramedCurve::from_catalog("example2").unwrap();
        assert!(close(
            e2.mu_of(0.0).unwrap(),
            Vec4::new(0.0, 1.0, SQRT_2, 0.0),
            1e-14
        ));

        for name in ["example1", "example2", "example3", "geodesic"] {
            let fc = FramedCurve::from_catalog(name).unwrap();
            let (a, b) = fc.interval();
            for s in uniform_grid(a, b, 37) {
                let mu = fc.mu_of(s).unwrap();
                assert!((pseudo_dot(mu, mu) - 1.0).abs() < 1e-7, "{name} {s}");
            }
        }
    }

    #[test]
    fn catalog_curves_validate() {
        for name in ["example1", "example2", "example3", "geodesic"] {
            let fc = FramedCurve::from_catalog(name).unwrap();
            let report = fc.validate(200).unwrap();
            assert!(report.passed, "{report}");
            assert_eq!(report.epsilon, 1.0);
        }
    }

    #[test]
    fn broken_frame_fails_validation() {
        let mut f = catalog("example1").unwrap();
        f.v2 = f.gamma.clone();
        let fc = FramedCurve::new(Arc::new(f)).unwrap();
        let report = fc.validate(50).unwrap();
        assert!(!report.passed);
        assert!((report.residual("<g,v2>").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_tiny_grid() {
        let fc = FramedCurve::from_catalog("example1").unwrap();
        assert!(fc.validate(1).is_err());
    }

    #[test]
    fn out_of_interval() {
        let fc = FramedCurve::from_catalog("example1").unwrap();
        assert!(matches!(fc.mu_of(1.5), Err(Error::OutOfInterval { .. })));
    }

    #[test]
    fn curvature_examples() {
        let e1 = FramedCurve::from_catalog("example1").unwrap();
        let c = e1.curvature_at(1.0).unwrap();
        assert!((c.alpha - 13f64.sqrt() / 2.0).abs() < 1e-12);

        let e2 = FramedCurve::from_catalog("example2").unwrap();
        let c = e2.curvature_at(FRAC_PI_4).unwrap();
        assert!((c.alpha + 1.5).abs() < 1e-12);
        for s in uniform_grid(0.0, 2.0 * PI, 41) {
            let c = e2.curvature_at(s).unwrap();
            assert!(c.ell.abs() < 1e-12 && c.n.abs() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn singular_point_of_example1() {
        let e1 = FramedCurve::from_catalog("example1").unwrap();
        let j = e1.frame_jets(0.0).unwrap();
        assert_eq!(e1.curvature_at(0.0).unwrap().alpha, 0.0);
        assert!(j.gamma.iter().all(|c| c.d(1) == 0.0));
    }

    #[test]
    fn constant_curvature_integration() {
        let init = standard_frame(0.0, 1.0);
        let states = integrate_frame(&[1.0, 0.0, 0.0, 0.0], init, 1.0, 1.0, 1e-3, true).unwrap();
        let last = states.last().unwrap();
        assert_eq!(last.s, 1.0);
        let want = Vec4::new(1f64.cosh(), 0.0, 0.0, 1f64.sinh());
        assert!(close(last.gamma, want, 1e-6));
        assert!((last.gamma[0] - 1.5430806).abs() < 1e-7);
        assert!((last.gamma[3] - 1.1752012).abs() < 1e-7);
    }

    #[test]
    fn zero_curvature_keeps_frame() {
        let init = standard_frame(0.0, 1.0);
        let states = integrate_frame(&[0.0; 4], init, 1.0, 2.0, 0.1, false).unwrap();
        assert_eq!(states.len(), 21);
        for st in &states {
            assert_eq!(st.vectors(), init.vectors());
        }
    }

    #[test]
    fn integration_runs_backwards() {
        let init = standard_frame(0.0, 1.0);
        let states = integrate_frame(&[1.0, 0.0, 0.0, 0.0], init, 1.0, -1.0, 1e-3, true).unwrap();
        let last = states.last().unwrap();
        assert!(close(
            last.gamma,
            Vec4::new(1f64.cosh(), 0.0, 0.0, -1f64.sinh()),
            1e-6
        ));
    }

    #[test]
    fn invalid_initial_frames() {
        let mut bad = standard_frame(0.0, 1.0);
        bad.v1 = bad.v1 * 2.0;
        assert!(matches!(
            integrate_frame(&[0.0; 4], bad, 1.0, 1.0, 0.1, true),
            Err(Error::InvalidInitialFrame(_))
        ));
        let mut flipped = standard_frame(0.0, 1.0);
        flipped.mu = -flipped.mu;
        assert!(matches!(
            integrate_frame(&[0.0; 4], flipped, 1.0, 1.0, 0.1, true),
            Err(Error::InvalidInitialFrame(_))
        ));
        // eps inconsistent with the frame
        assert!(matches!(
            integrate_frame(&[0.0; 4], standard_frame(0.0, 1.0), -1.0, 1.0, 0.1, true),
            Err(Error::InvalidInitialFrame(_))
        ));
    }

    #[test]
    fn huge_step_is_rejected() {
        let init = standard_frame(0.0, 1.0);
        let r = integrate_frame(&[5.0, 3.0, 4.0, -2.0], init, 1.0, 4.0, 1.0, false);
        assert!(matches!(r, Err(Error::StepError { .. })), "{r:?}");
    }

    #[test]
    fn negative_epsilon_frame() {
        let init = standard_frame(0.0, -1.0);
        assert!(init.gram_drift(-1.0) < 1e-15);
        let states = integrate_frame(&[0.7, 0.3, -0.4, 0.2], init, -1.0, 1.0, 1e-3, true).unwrap();
        assert!(states.last().unwrap().gram_drift(-1.0) < 1e-10);
        let cq = extract_curvature(&states).unwrap();
        assert_eq!(cq.epsilon, -1.0);
        for i in (0..cq.len()).step_by(50) {
            let r = cq.row(i);
            assert!((r.alpha - 0.7).abs() < 1e-6);
            assert!((r.ell - 0.3).abs() < 1e-6);
            assert!((r.m + 0.4).abs() < 1e-6);
            assert!((r.n - 0.2).abs() < 1e-6);
        }
    }

    #[test]
    fn extract_from_constant_run() {
        let init = standard_frame(0.0, 1.0);
        let states = integrate_frame(&[1.0, 0.0, 0.0, 0.0], init, 1.0, 1.0, 1e-3, true).unwrap();
        let cq = extract_curvature(&states).unwrap();
        for i in 0..cq.len() {
            let r = cq.row(i);
            assert!((r.alpha - 1.0).abs() < 1e-6);
            assert!(r.ell.abs() < 1e-6 && r.m.abs() < 1e-6 && r.n.abs() < 1e-6);
        }
    }

    #[test]
    fn extract_from_example2_samples() {
        let e2 = FramedCurve::from_catalog("example2").unwrap();
        let states: Vec<FrameState> = uniform_grid(0.0, 2.0 * PI, 2001)
            .into_iter()
            .map(|s| e2.frame_at(s).unwrap())
            .collect();
        let cq = extract_curvature(&states).unwrap();
        assert!(cq.n.iter().all(|n| n.abs() < 1e-6));
        let i = 250; // s = pi/4
        assert!((cq.s[i] - FRAC_PI_4).abs() < 1e-12);
        assert!((cq.alpha[i] + 1.5).abs() < 1e-6);
    }

    #[test]
    fn extract_needs_samples() {
        let one = [standard_frame(0.0, 1.0)];
        assert!(matches!(
            extract_curvature(&one),
            Err(Error::InsufficientSamples { needed: 5, got: 1 })
        ));
    }

    #[test]
    fn sampled_curvature_interpolates() {
        let e2 = FramedCurve::from_catalog("example2").unwrap();
        let states: Vec<FrameState> = uniform_grid(0.0, 1.0, 201)
            .into_iter()
            .map(|s| e2.frame_at(s).unwrap())
            .collect();
        let cq = extract_curvature(&states).unwrap();
        let got = cq.curvature(0.4321).unwrap();
        let want = e2.curvature_at(0.4321).unwrap();
        assert!((got[0] - want.alpha).abs() < 1e-7);
        assert!((got[2] - want.m).abs() < 1e-7);
    }

    #[test]
    fn congruence_identity() {
        let e1 = FramedCurve::from_catalog("example1").unwrap();
        let grid = uniform_grid(-1.0, 1.0, 51);
        let c = align_congruence(&e1, &e1, 0.3, &grid).unwrap();
        assert!(c.residual < 1e-12);
        let id = Isometry22::identity();
        for i in 0..4 {
            for j in 0..4 {
                assert!((c.isometry.matrix[i][j] - id.matrix[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn congruence_recovers_rotation() {
        let t = PI / 3.0;
        let rot = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, t.cos(), -t.sin()],
            [0.0, 0.0, t.sin(), t.cos()],
        ];
        let e1 = FramedCurve::from_catalog("example1").unwrap();
        let moved = e1.transformed(rot).unwrap();
        let grid = uniform_grid(-1.0, 1.0, 51);
        let c = align_congruence(&e1, &moved, 0.5, &grid).unwrap();
        assert!(c.residual < 1e-8);
        assert!(c.isometry_defect < 1e-8);
        for i in 0..4 {
            for j in 0..4 {
                assert!((c.isometry.matrix[i][j] - rot[i][j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn different_curvatures_are_not_congruent() {
        let init = standard_frame(0.0, 1.0);
        let a = integrate_frame(&[1.0, 0.2, 0.5, 0.1], init, 1.0, 1.0, 1e-2, true).unwrap();
        let b = integrate_frame(&[1.0, 0.2, 1.5, 0.1], init, 1.0, 1.0, 1e-2, true).unwrap();
        let grid: Vec<f64> = a.iter().map(|x| x.s).collect();
        let c = align_congruence(&a, &b, 0.0, &grid).unwrap();
        assert!(c.residual > 1e-2, "{}", c.residual);
    }

    #[test]
    fn singular_frame_matrix() {
        let mut st = standard_frame(0.0, 1.0);
        st.v2 = st.v1;
        let degenerate = vec![st];
        let good = vec![standard_frame(0.0, 1.0)];
        assert!(matches!(
            align_congruence(&degenerate, &good, 0.0, &[0.0]),
            Err(Error::SingularFrameMatrix(_))
        ));
    }

    #[test]
    fn curvature_quad_file() {
        let doc: CurvatureQuadFile =
            serde_json::from_str(r#"{"alpha":"1","ell":"0","m":"0.5*s","n":"0","epsilon":1}"#)
                .unwrap();
        let q = doc.quad().unwrap();
        assert_eq!(q.curvature(2.0).unwrap(), [1.0, 0.0, 1.0, 0.0]);
        assert_eq!(doc.initial_state(0.0), standard_frame(0.0, 1.0));
        let bad: CurvatureQuadFile =
            serde_json::from_str(r#"{"alpha":"1","ell":"0","m":"0","n":"0","epsilon":2}"#).unwrap();
        assert!(bad.quad().is_err());
    }
}
