//! Frenet apparatus of regular unit-speed spacelike curves in AdS^3.
//!
//! For `gamma` with `<gamma', gamma'> = 1` the tangent is `T = gamma'`, the
//! first normal `N1 = T' - gamma`, `kappa = ||N1||` and, when `kappa > 0`,
//! `n1 = N1 / kappa`, `n2 = gamma x T x n1` and
//! `tau = (delta / kappa^2) det(gamma, gamma', gamma'', gamma''')`.

use serde::{Deserialize, Serialize};

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::geom4::{cross3, det4, metric, pseudo_dot, triple_product, Vec4};
use crate::jet::{vec_d, vec_derivative, vec_value, VecJet};

pub const DEFAULT_FRENET_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    pub s: f64,
    pub tangent: Vec4,
    /// `N1 = T' - gamma`.
    pub big_n1: Vec4,
    pub n1: Option<Vec4>,
    pub n2: Option<Vec4>,
    pub kappa: f64,
    /// Sign of `<N1, N1>`; absent when `kappa` vanishes.
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub geodesic: bool,
    /// `kappa = 0` while `N1 != 0`: the first normal is null.
    pub degenerate: bool,
}

fn checked_jets(gamma: &CurveSpec, s: f64, tol: f64) -> Result<VecJet> {
    let g = gamma.eval_jets(s)?;
    let norm2 = pseudo_dot(vec_value(&g), vec_value(&g));
    if !((norm2 + 1.0).abs() <= tol) {
        return Err(Error::NotOnAdS3 { norm2 });
    }
    let t = vec_d(&g, 1);
    let speed2 = pseudo_dot(t, t);
    if !((speed2 - 1.0).abs() <= tol) {
        return Err(Error::NotUnitSpeed { s, speed2 });
    }
    Ok(g)
}

pub fn frenet_at(gamma: &CurveSpec, s: f64, tol: f64) -> Result<FrenetData> {
    let g = checked_jets(gamma, s, tol)?;
    let p = vec_value(&g);
    let t = vec_d(&g, 1);
    let big_n1 = vec_d(&g, 2) - p;
    let q = pseudo_dot(big_n1, big_n1);
    let kappa = q.abs().sqrt();
    let geodesic = big_n1.max_abs() <= tol;
    let mut out = FrenetData {
        s,
        tangent: t,
        big_n1,
        n1: None,
        n2: None,
        kappa,
        delta: None,
        tau: None,
        geodesic,
        degenerate: false,
    };
    if kappa > tol {
        let delta = q.signum();
        let n1 = big_n1 * (1.0 / kappa);
        out.n1 = Some(n1);
        out.n2 = Some(triple_product(p, t, n1));
        out.delta = Some(delta);
        out.tau = Some(delta / (kappa * kappa) * det4(p, t, vec_d(&g, 2), vec_d(&g, 3)));
    } else {
        out.degenerate = !geodesic;
    }
    Ok(out)
}

/// Max residual of the Frenet-Serret system
/// `T' = gamma + kappa n1`, `n1' = -delta kappa T + tau n2`, `n2' = tau n1`,
/// with derivatives taken exactly through jets.
pub fn frenet_residual(gamma: &CurveSpec, s: f64, tol: f64) -> Result<f64> {
    let data = frenet_at(gamma, s, tol)?;
    let (Some(delta), Some(tau)) = (data.delta, data.tau) else {
        return Err(Error::domain(format!("curvature vanishes at s = {s}")));
    };
    let g = checked_jets(gamma, s, tol)?;
    let t = vec_derivative(&g);
    let dt = vec_derivative(&t);
    let big_n1: VecJet = std::array::from_fn(|i| dt[i] - g[i]);
    let q = metric(&big_n1, &big_n1).scale(delta);
    let inv_kappa = q.sqrt()?.recip()?;
    let n1: VecJet = big_n1.map(|c| c * inv_kappa);
    let n2 = cross3(&g, &t, &n1);
    let dn1 = vec_d(&n1, 1);
    let dn2 = vec_d(&n2, 1);
    let (kappa, tv, n1v, n2v) = (data.kappa, data.tangent, vec_value(&n1), vec_value(&n2));
    let residuals = [
        vec_d(&g, 2) - vec_value(&g) - n1v * kappa,
        dn1 + tv * (delta * kappa) - n2v * tau,
        dn2 - n1v * tau,
    ];
    Ok(residuals.iter().map(Vec4::max_abs).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::catalog;
    use crate::framed::uniform_grid;
    use crate::geom4::PseudoSphereKind;

    fn spec(src: [&str; 4]) -> CurveSpec {
        CurveSpec::parse("t", &src, PseudoSphereKind::AdS3).unwrap()
    }

    #[test]
    fn geodesic_is_flagged() {
        let g = spec(["cosh(s)", "0", "sinh(s)", "0"]);
        let f = frenet_at(&g, 0.0, DEFAULT_FRENET_TOL).unwrap();
        assert!(f.geodesic && !f.degenerate);
        assert_eq!(f.kappa, 0.0);
        assert!(f.n1.is_none() && f.tau.is_none());
    }

    #[test]
    fn circle_constants() {
        let g = spec(["sqrt(2)", "0", "cos(s)", "sin(s)"]);
        for s in uniform_grid(0.0, 6.0, 13) {
            let f = frenet_at(&g, s, DEFAULT_FRENET_TOL).unwrap();
            assert!((f.kappa - 2f64.sqrt()).abs() < 1e-12);
            assert_eq!(f.delta, Some(1.0));
            assert!(f.tau.unwrap().abs() < 1e-12);
            let want = Vec4::new(-(2f64.sqrt()), 0.0, -2.0 * s.cos(), -2.0 * s.sin());
            assert!((f.big_n1 - want).max_abs() < 1e-12);
        }
    }

    #[test]
    fn circle_frenet_serret() {
        let g = spec(["sqrt(2)", "0", "cos(s)", "sin(s)"]);
        for s in uniform_grid(0.0, 6.0, 50) {
            assert!(frenet_residual(&g, s, DEFAULT_FRENET_TOL).unwrap() < 1e-6);
            let f = frenet_at(&g, s, DEFAULT_FRENET_TOL).unwrap();
            let n2 = f.n2.unwrap();
            assert!((pseudo_dot(n2, n2) + f.delta.unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn helix_torsion() {
        let g = spec([
            "sqrt(2)*cos(s)",
            "sqrt(2)*sin(s)",
            "cos(sqrt(3)*s)",
            "sin(sqrt(3)*s)",
        ]);
        for s in uniform_grid(-2.0, 2.0, 21) {
            let f = frenet_at(&g, s, DEFAULT_FRENET_TOL).unwrap();
            assert!((f.kappa - 2.0 * 2f64.sqrt()).abs() < 1e-10);
            assert_eq!(f.delta, Some(1.0));
            assert!((f.tau.unwrap() - 3f64.sqrt()).abs() < 1e-10);
            let n2 = f.n2.unwrap();
            assert!((pseudo_dot(n2, n2) + 1.0).abs() < 1e-10);
            assert!(frenet_residual(&g, s, DEFAULT_FRENET_TOL).unwrap() < 1e-9);
        }
    }

    #[test]
    fn singular_curve_is_not_unit_speed() {
        let e1 = catalog("example1").unwrap();
        assert!(matches!(
            frenet_at(&e1.gamma, 0.0, DEFAULT_FRENET_TOL),
            Err(Error::NotUnitSpeed { .. })
        ));
    }

    #[test]
    fn off_the_quadric() {
        let g = spec(["2", "0", "s", "0"]);
        assert!(matches!(
            frenet_at(&g, 0.0, DEFAULT_FRENET_TOL),
            Err(Error::NotOnAdS3 { .. })
        ));
    }
}
