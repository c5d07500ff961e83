//! One-dimensional root scanning: sign changes are bracketed on a uniform
//! grid and bisected, and roots of even multiplicity are picked up from local
//! minima of `|f|` by solving `f' = 0` nearby.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::framed::uniform_grid;

/// Width below which a bracket is considered resolved.
pub const BRACKET_WIDTH: f64 = 1e-12;

/// Roots closer than this are merged.
pub const DEDUPE_DISTANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootKind {
    /// Found by bracketing a sign change.
    SignChange,
    /// `f` touches zero without changing sign.
    Tangential,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub s: f64,
    pub value: f64,
    pub kind: RootKind,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RootScan {
    pub roots: Vec<Root>,
    /// Grid points where `f` could not be evaluated.
    pub failures: Vec<(f64, String)>,
}

/// Bisects a bracket `[a, b]` with `fa * fb < 0` down to machine resolution.
pub fn bisect<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

fn golden_min<F>(f: &F, mut a: f64, mut b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?.abs(), f(d)?.abs());
    while (b - a).abs() > BRACKET_WIDTH {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?.abs();
        }
    }
    Ok(0.5 * (a + b))
}

/// Finds the roots of `f` on `[a, b]` from a scan of `grid` points.
///
/// `f` returns the value and first derivative. A local minimum of `|f|`
/// with no adjacent sign change is refined by solving `f' = 0` (or by a
/// golden-section search when `f'` does not change sign) and kept if the
/// refined `|f|` is at most `tol`.
pub fn scan_roots<F>(f: F, a: f64, b: f64, grid: usize, tol: f64) -> RootScan
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    let grid = grid.max(2);
    let xs = uniform_grid(a, b, grid);
    let evals: Vec<Result<(f64, f64)>> = xs.par_iter().map(|&s| f(s)).collect();
    let mut out = RootScan::default();
    let mut ys = vec![f64::NAN; grid];
    let mut ds = vec![f64::NAN; grid];
    for (i, e) in evals.into_iter().enumerate() {
        match e {
            Ok((y, d)) if y.is_finite() => {
                ys[i] = y;
                ds[i] = d;
            }
            Ok((y, _)) => out.failures.push((xs[i], format!("non-finite value {y}"))),
            Err(e) => out.failures.push((xs[i], e.to_string())),
        }
    }
    let value = |s: f64| f(s).map(|v| v.0);
    let slope = |s: f64| f(s).map(|v| v.1);
    let mut candidates: Vec<(f64, RootKind)> = Vec::new();

    let sign_change = |i: usize| {
        i + 1 < grid
            && ys[i].is_finite()
            && ys[i + 1].is_finite()
            && ys[i] != 0.0
            && ys[i + 1] != 0.0
            && (ys[i] < 0.0) != (ys[i + 1] < 0.0)
    };

    for i in 0..grid {
        if ys[i] == 0.0 {
            candidates.push((xs[i], RootKind::SignChange));
        }
        if sign_change(i) {
            match bisect(&value, xs[i], xs[i + 1], ys[i]) {
                Ok(s) => candidates.push((s, RootKind::SignChange)),
                Err(e) => out.failures.push((xs[i], e.to_string())),
            }
        }
    }

    for i in 0..grid {
        let y = ys[i].abs();
        if !y.is_finite() || ys[i] == 0.0 {
            continue;
        }
        let left_ok = i == 0 || (ys[i - 1].is_finite() && y <= ys[i - 1].abs());
        let right_ok = i + 1 == grid || (ys[i + 1].is_finite() && y <= ys[i + 1].abs());
        let adjacent_change = (i > 0 && sign_change(i - 1)) || sign_change(i);
        if !(left_ok && right_ok) || adjacent_change {
            continue;
        }
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(grid - 1)];
        let d_lo = if i == 0 { ds[i] } else { ds[i - 1] };
        let d_hi = if i + 1 == grid { ds[i] } else { ds[i + 1] };
        let refined = if d_lo.is_finite() && d_hi.is_finite() && (d_lo < 0.0) != (d_hi < 0.0) {
            bisect(&slope, lo, hi, d_lo)
        } else {
            golden_min(&value, lo, hi)
        };
        match refined.and_then(|s| value(s).map(|v| (s, v))) {
            Ok((s, v)) if v.abs() <= tol => candidates.push((s, RootKind::Tangential)),
            Ok(_) => {}
            Err(e) => out.failures.push((xs[i], e.to_string())),
        }
    }

    let mut found = Vec::with_capacity(candidates.len());
    for (s, kind) in candidates {
        match value(s) {
            Ok(v) => found.push(Root { s, value: v, kind }),
            Err(e) => out.failures.push((s, e.to_string())),
        }
    }
    found.sort_by(|p, q| p.s.total_cmp(&q.s));
    for r in found {
        match out.roots.last_mut() {
            Some(last) if (r.s - last.s).abs() < DEDUPE_DISTANCE => {
                if r.value.abs() < last.value.abs() {
                    *last = r;
                }
            }
            _ => out.roots.push(r),
        }
    }
    out
}
