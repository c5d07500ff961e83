//! The anti-de Sitter distance-squared family `D(s, v) = <gamma(s) - v, gamma(s) - v>`
//! and the vanishing-order conditions linking it to the nullcone front.
//!
//! For fixed `v0` in AdS^3, write `d(s) = D(s, v0)`. The number of leading
//! derivatives of `d` vanishing at `s0` is tied to the position of `v0`
//! relative to the frame at `s0` and to the jets of `alpha` and `sigma`.
//! [`check_conditions`] reports the derivative side and each geometric
//! alternative separately, so the two can be compared.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framed::FramedCurve;
use crate::geom4::{check_membership, metric, pseudo_dot, PseudoSphereKind, Vec4};
use crate::jet::vec_constant;
use crate::nullcone::{front_point, sigma_jets, singular_lambda, FrontSheet};

/// Membership tolerance for the target point.
pub const ADS_MEMBERSHIP_TOL: f64 = 1e-7;
/// Default band for a derivative of `d` to count as zero.
pub const DEFAULT_VANISH_TOL: f64 = 1e-7;

/// How a derivative is judged to vanish.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum VanishTol {
    /// `|d^(k)| <= tol`.
    Absolute(f64),
    /// `|d^(k)| <= tol * max_j |d^(j)|`, over the five computed derivatives.
    Relative(f64),
}

impl Default for VanishTol {
    fn default() -> Self {
        VanishTol::Absolute(DEFAULT_VANISH_TOL)
    }
}

impl VanishTol {
    fn threshold(self, d: &[f64; 5]) -> f64 {
        match self {
            VanishTol::Absolute(t) => t,
            VanishTol::Relative(t) => t * d.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        }
    }

    /// Number of leading entries of `d` that vanish.
    pub fn leading_zeros(self, d: &[f64; 5]) -> usize {
        let t = self.threshold(d);
        d.iter().take_while(|x| x.abs() <= t).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceEvaluation {
    pub s0: f64,
    pub v0: Vec4,
    /// `d, d', d'', d''', d''''` at `s0`.
    pub d: [f64; 5],
    /// Largest `k` with `d = ... = d^(k) = 0`, if `d` itself vanishes.
    pub satisfied_levels: Option<usize>,
}

fn check_target(v0: Vec4) -> Result<()> {
    if check_membership(v0, PseudoSphereKind::AdS3, ADS_MEMBERSHIP_TOL) {
        Ok(())
    } else {
        Err(Error::NotOnAdS3 {
            norm2: pseudo_dot(v0, v0),
        })
    }
}

fn dist_derivatives(fc: &FramedCurve, s0: f64, v0: Vec4) -> Result<[f64; 5]> {
    let j = fc.frame_jets(s0)?;
    let v = vec_constant(v0);
    let w: [_; 4] = std::array::from_fn(|i| j.gamma[i] - v[i]);
    let d = metric(&w, &w);
    Ok(std::array::from_fn(|k| d.d(k)))
}

pub fn dist_sq_jets(fc: &FramedCurve, s0: f64, v0: Vec4) -> Result<DistanceEvaluation> {
    dist_sq_jets_with(fc, s0, v0, VanishTol::default())
}

pub fn dist_sq_jets_with(
    fc: &FramedCurve,
    s0: f64,
    v0: Vec4,
    tol: VanishTol,
) -> Result<DistanceEvaluation> {
    check_target(v0)?;
    let d = dist_derivatives(fc, s0, v0)?;
    let zeros = tol.leading_zeros(&d);
    Ok(DistanceEvaluation {
        s0,
        v0,
        d,
        satisfied_levels: zeros.checked_sub(1),
    })
}

/// `gamma(s0) - alpha / (m +/- n) (v1 +/- v2)`: the point of the singular
/// curve of the front over `s0`.
pub fn locus_point(fc: &FramedCurve, s0: f64, sheet: FrontSheet, tol_denom: f64) -> Result<Vec4> {
    let lambda = singular_lambda(fc, s0, sheet, tol_denom)?;
    front_point(fc, s0, lambda, sheet)
}

/// Coefficients of `v0 - gamma = g gamma + a v1 + b v2 + c mu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub g: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn decompose(fc: &FramedCurve, s0: f64, v0: Vec4) -> Result<Decomposition> {
    let f = fc.frame_at(s0)?;
    let eps = fc.epsilon();
    let w = v0 - f.gamma;
    Ok(Decomposition {
        g: -pseudo_dot(w, f.gamma),
        a: eps * pseudo_dot(w, f.v1),
        b: -eps * pseudo_dot(w, f.v2),
        c: pseudo_dot(w, f.mu),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub s0: f64,
    pub v0: Vec4,
    pub d: [f64; 5],
    /// Number of leading vanishing derivatives, `0..=5`.
    pub levels: usize,
    /// Labels of the geometric alternatives that `v0` satisfies.
    pub alternatives: Vec<String>,
}

impl ConditionReport {
    pub fn has(&self, label: &str) -> bool {
        self.alternatives.iter().any(|a| a == label)
    }
}

/// Evaluates the derivative ladder of `d` at `s0` and every geometric
/// alternative, on both front sheets.
///
/// Labels carry the sheet as a `+`/`-` suffix where it matters. Two items
/// whose printed predicate on `alpha` is incomplete are read as `alpha = 0`
/// and tagged `as-amended`.
pub fn check_conditions(
    fc: &FramedCurve,
    s0: f64,
    v0: Vec4,
    tol: VanishTol,
    tol_denom: f64,
) -> Result<ConditionReport> {
    let eval = dist_sq_jets_with(fc, s0, v0, tol)?;
    let zero_band = match tol {
        VanishTol::Absolute(t) | VanishTol::Relative(t) => t,
    };
    let zero = |x: f64| x.abs() <= zero_band;

    let c = fc.curvature_jets(s0)?;
    let alpha_zero: [bool; 4] = std::array::from_fn(|k| zero(c.alpha.d(k)));
    let alpha_upto = |k: usize| alpha_zero[..=k].iter().all(|z| *z);

    let f = fc.frame_at(s0)?;
    let eps = fc.epsilon();
    let w = v0 - f.gamma;
    let dec = decompose(fc, s0, v0)?;

    let mut alt = Vec::new();
    if zero(dec.g) && zero(dec.c * dec.c + eps * (dec.a * dec.a - dec.b * dec.b)) {
        alt.push("(1)".to_string());
    }
    if alpha_upto(0) {
        alt.push("(2) alpha=0 [as-amended]".to_string());
    }
    let at_base = w.max_abs() <= zero_band;
    for sheet in FrontSheet::BOTH {
        let sfx = if sheet == FrontSheet::Plus { "+" } else { "-" };
        let dir = f.v1 + f.v2 * sheet.sign();
        let lambda = eps * pseudo_dot(w, f.v1);
        let on_ray = (w - dir * lambda).max_abs() <= zero_band;
        if on_ray {
            alt.push(format!("(2) null ray{sfx}"));
            if alpha_upto(0) {
                alt.push(format!("(3)(ii){sfx} [as-amended]"));
            }
            if alpha_upto(1) {
                alt.push(format!("(4)(ii){sfx}"));
            }
            if alpha_upto(2) {
                alt.push(format!("(5)(ii){sfx}"));
            }
        }
        if let Ok(p) = locus_point(fc, s0, sheet, tol_denom) {
            if (v0 - p).max_abs() <= zero_band {
                alt.push(format!("(3)(iii){sfx}"));
                let sj = sigma_jets(fc, s0, sheet)?;
                if zero(sj.sigma.value()) {
                    alt.push(format!("(4)(iv){sfx}"));
                    if zero(sj.sigma.d(1)) {
                        alt.push(format!("(5)(iv){sfx}"));
                    }
                }
            }
        }
    }
    if alpha_upto(1) {
        alt.push("(3)(i)".to_string());
    }
    if alpha_upto(2) {
        alt.push("(4)(i)".to_string());
    }
    if alpha_upto(3) {
        alt.push("(5)(i)".to_string());
    }
    if at_base && alpha_upto(0) {
        alt.push("(4)(iii)".to_string());
    }
    if at_base && alpha_upto(1) {
        alt.push("(5)(iii)".to_string());
    }

    Ok(ConditionReport {
        s0,
        v0,
        d: eval.d,
        levels: tol.leading_zeros(&eval.d),
        alternatives: alt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framed::uniform_grid;
    use crate::nullcone::DEFAULT_TOL_DENOM;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn fc(name: &str) -> FramedCurve {
        FramedCurve::from_catalog(name).unwrap()
    }

    #[test]
    fn base_point_distance() {
        let e1 = fc("example1");
        let g = e1.frame_at(0.4).unwrap().gamma;
        let ev = dist_sq_jets(&e1, 0.4, g).unwrap();
        assert_eq!(ev.d[0], 0.0);
    }

    #[test]
    fn value_identity() {
        let e2 = fc("example2");
        let v0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
        for s in uniform_grid(0.0, 6.0, 25) {
            let ev = dist_sq_jets(&e2, s, v0).unwrap();
            let g = e2.frame_at(s).unwrap().gamma;
            assert!((ev.d[0] - (-2.0 - 2.0 * pseudo_dot(g, v0))).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_points_off_ads() {
        let r = dist_sq_jets(&fc("example1"), 0.0, Vec4::new(1.0, 1.0, 0.0, 0.0));
        assert!(matches!(r, Err(Error::NotOnAdS3 { .. })));
    }

    #[test]
    fn locus_point_examples() {
        let e1 = fc("example1");
        let p = locus_point(&e1, 0.0, FrontSheet::Plus, DEFAULT_TOL_DENOM).unwrap();
        assert!((p - Vec4::new(1.0 / SQRT_2, 1.0 / SQRT_2, 0.0, 0.0)).max_abs() < 1e-15);
        let e2 = fc("example2");
        let p = locus_point(&e2, FRAC_PI_4, FrontSheet::Plus, DEFAULT_TOL_DENOM).unwrap();
        let q = front_point(&e2, FRAC_PI_4, 3.0 * 5f64.sqrt(), FrontSheet::Plus).unwrap();
        assert!((p - q).max_abs() < 1e-12);
    }

    #[test]
    fn ladder_on_example2_swallowtail() {
        // sigma vanishes at pi/4, so the locus point reaches the fourth rung
        let e2 = fc("example2");
        let v0 = locus_point(&e2, FRAC_PI_4, FrontSheet::Plus, DEFAULT_TOL_DENOM).unwrap();
        let ev = dist_sq_jets(&e2, FRAC_PI_4, v0).unwrap();
        assert!(ev.d[..4].iter().all(|x| x.abs() < 1e-7), "{:?}", ev.d);
        assert!((ev.d[4] + 244.8).abs() < 1e-6, "{:?}", ev.d);
        assert_eq!(ev.satisfied_levels, Some(3));
    }

    #[test]
    fn ladder_on_generic_locus_point() {
        let e2 = fc("example2");
        let v0 = locus_point(&e2, 0.5, FrontSheet::Plus, DEFAULT_TOL_DENOM).unwrap();
        let ev = dist_sq_jets(&e2, 0.5, v0).unwrap();
        assert_eq!(ev.satisfied_levels, Some(2));
        assert!((ev.d[3] - 14.471_911_014_9).abs() < 1e-8, "{}", ev.d[3]);
        assert!((ev.d[4] - 63.686_647_518_2).abs() < 1e-8, "{}", ev.d[4]);

        let e1 = fc("example1");
        let v0 = locus_point(&e1, 0.3, FrontSheet::Plus, DEFAULT_TOL_DENOM).unwrap();
        let ev = dist_sq_jets(&e1, 0.3, v0).unwrap();
        assert_eq!(ev.satisfied_levels, Some(2));
        assert!((ev.d[3] - 2.169_180_041_86).abs() < 1e-8, "{}", ev.d[3]);
    }

    #[test]
    fn example3_base_point() {
        let e3 = fc("example3");
        let v0 = Vec4::new(0.0, 1.0, 0.0, 0.0);
        let r = check_conditions(&e3, 0.0, v0, VanishTol::default(), DEFAULT_TOL_DENOM).unwrap();
        assert_eq!(r.levels, 5);
        assert!(r.has("(4)(iii)") && r.has("(5)(iii)"));
        assert!(r.has("(3)(iii)+") && r.has("(4)(iv)+"));
        assert!(!r.has("(5)(iv)+"));
    }

    #[test]
    fn example1_null_ray() {
        let e1 = fc("example1");
        let f = e1.frame_at(0.0).unwrap();
        let v0 = f.gamma + (f.v1 + f.v2) * 0.5;
        let r = check_conditions(&e1, 0.0, v0, VanishTol::default(), DEFAULT_TOL_DENOM).unwrap();
        assert!(r.levels >= 2);
        assert!(r.has("(2) null ray+") && r.has("(2) alpha=0 [as-amended]"));
        assert!(r.has("(1)"));
    }

    #[test]
    fn generic_point() {
        let e1 = fc("example1");
        let v0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let r = check_conditions(&e1, 0.5, v0, VanishTol::default(), DEFAULT_TOL_DENOM).unwrap();
        assert_eq!(r.levels, 0);
        assert!(r.alternatives.is_empty(), "{:?}", r.alternatives);
    }

    #[test]
    fn relative_tolerance() {
        let t = VanishTol::Relative(1e-9);
        assert_eq!(t.leading_zeros(&[1e-12, 1e-11, 5.0, 0.0, 1e3]), 2);
        assert_eq!(t.leading_zeros(&[0.0; 5]), 5);
    }

    #[test]
    fn decomposition_reassembles() {
        let e2 = fc("example2");
        let v0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let dec = decompose(&e2, 0.7, v0).unwrap();
        let f = e2.frame_at(0.7).unwrap();
        let back = f.gamma + f.gamma * dec.g + f.v1 * dec.a + f.v2 * dec.b + f.mu * dec.c;
        assert!((back - v0).max_abs() < 1e-12);
    }
}
