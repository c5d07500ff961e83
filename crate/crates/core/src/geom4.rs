//! Linear algebra of the semi-Euclidean 4-space of index 2.
//!
//! The pseudo-scalar product is `<u, w> = -u1 w1 - u2 w2 + u3 w3 + u4 w4`.
//! Everything here is a closed-form expression; nothing iterates.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::jet::Scalar;

/// Metric signature, diagonal of the Gram matrix of the canonical basis.
pub const SIGNATURE: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

/// Default band on `<u, u>` inside which a vector counts as lightlike.
pub const DEFAULT_CAUSAL_TOL: f64 = 1e-9;

/// A point or vector of the index-2 semi-Euclidean 4-space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub const fn new(u1: f64, u2: f64, u3: f64, u4: f64) -> Self {
        Vec4([u1, u2, u3, u4])
    }

    /// Canonical basis vector `e_{i+1}` (zero based index).
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        Vec4(v)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Max-norm, used for Euclidean scale estimates.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }

    pub fn dot(&self, other: &Vec4) -> f64 {
        pseudo_dot(*self, *other)
    }

    pub fn to_array(self) -> [f64; 4] {
        self.0
    }
}

impl From<[f64; 4]> for Vec4 {
    fn from(a: [f64; 4]) -> Self {
        Vec4(a)
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec4 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, rhs: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for Vec4 {
    fn add_assign(&mut self, rhs: Vec4) {
        *self = *self + rhs;
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, rhs: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl SubAssign for Vec4 {
    fn sub_assign(&mut self, rhs: Vec4) {
        *self = *self - rhs;
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, k: f64) -> Vec4 {
        Vec4(self.0.map(|x| x * k))
    }
}

impl Mul<Vec4> for f64 {
    type Output = Vec4;
    fn mul(self, v: Vec4) -> Vec4 {
        v * self
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        Vec4(self.0.map(|x| -x))
    }
}

impl fmt::Display for Vec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Lightlike,
}

/// The three pseudo-spheres of the index-2 space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PseudoSphereKind {
    /// `<u, u> = -1`
    AdS3,
    /// `<u, u> = +1`
    S3_2,
    /// `<u, u> = 0`, `u != 0`
    Lambda3,
}

impl PseudoSphereKind {
    pub fn target(self) -> f64 {
        match self {
            PseudoSphereKind::AdS3 => -1.0,
            PseudoSphereKind::S3_2 => 1.0,
            PseudoSphereKind::Lambda3 => 0.0,
        }
    }
}

/// Pseudo-scalar product over any scalar ring (plain floats or jets).
pub fn metric<T: Scalar>(u: &[T; 4], w: &[T; 4]) -> T {
    -(u[0] * w[0]) - u[1] * w[1] + u[2] * w[2] + u[3] * w[3]
}

fn det3<T: Scalar>(a: [T; 3], b: [T; 3], c: [T; 3]) -> T {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn drop_column<T: Scalar>(v: &[T; 4], j: usize) -> [T; 3] {
    let mut out = [v[0]; 3];
    let mut k = 0;
    for (i, x) in v.iter().enumerate() {
        if i != j {
            out[k] = *x;
            k += 1;
        }
    }
    out
}

/// Triple vector product over any scalar ring.
///
/// Cofactor expansion of the formal determinant whose first row is
/// `(-e1, -e2, e3, e4)`.
pub fn cross3<T: Scalar>(u: &[T; 4], v: &[T; 4], w: &[T; 4]) -> [T; 4] {
    let minor = |j: usize| det3(drop_column(u, j), drop_column(v, j), drop_column(w, j));
    [-minor(0), minor(1), minor(2), -minor(3)]
}

pub fn pseudo_dot(u: Vec4, w: Vec4) -> f64 {
    metric(&u.0, &w.0)
}

pub fn pseudo_norm(u: Vec4) -> f64 {
    pseudo_dot(u, u).abs().sqrt()
}

pub fn causal_character(u: Vec4, tol: f64) -> CausalClass {
    let q = pseudo_dot(u, u);
    if q > tol {
        CausalClass::Spacelike
    } else if q < -tol {
        CausalClass::Timelike
    } else {
        CausalClass::Lightlike
    }
}

pub fn triple_product(u: Vec4, v: Vec4, w: Vec4) -> Vec4 {
    Vec4(cross3(&u.0, &v.0, &w.0))
}

/// Determinant of the 4x4 matrix whose rows are `a, b, c, d`.
pub fn det4(a: Vec4, b: Vec4, c: Vec4, d: Vec4) -> f64 {
    let rows = [a.0, b.0, c.0, d.0];
    (0..4)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let m = det3(
                drop_column(&rows[1], j),
                drop_column(&rows[2], j),
                drop_column(&rows[3], j),
            );
            sign * rows[0][j] * m
        })
        .sum()
}

pub fn check_membership(u: Vec4, kind: PseudoSphereKind, tol: f64) -> bool {
    let on_quadric = (pseudo_dot(u, u) - kind.target()).abs() <= tol;
    match kind {
        PseudoSphereKind::Lambda3 => on_quadric && u.max_abs() > tol,
        _ => on_quadric,
    }
}
