//! Truncated Taylor jets of order 4.
//!
//! A [`Jet4`] carries a value together with its first four derivatives with
//! respect to the curve parameter. Arithmetic and the elementary functions
//! propagate them exactly (up to rounding) by the usual Taylor recurrences,
//! so every derivative-based formula downstream is evaluated without finite
//! differences.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Highest derivative order carried by a jet.
pub const ORDER: usize = 4;
const N: usize = ORDER + 1;
const FACTORIAL: [f64; N] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Smallest admissible magnitude of a divisor.
pub const DIVISION_FLOOR: f64 = 1e-300;

/// The ring operations shared by `f64` and [`Jet4`].
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl Scalar for f64 {}
impl Scalar for Jet4 {}

/// Value and derivatives up to order 4, stored as Taylor coefficients.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Jet4 {
    coeffs: [f64; N],
}

impl fmt::Debug for Jet4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Jet4").field(&self.derivatives()).finish()
    }
}

impl Jet4 {
    pub fn constant(c: f64) -> Self {
        let mut coeffs = [0.0; N];
        coeffs[0] = c;
        Jet4 { coeffs }
    }

    /// The independent variable evaluated at `s`.
    pub fn variable(s: f64) -> Self {
        let mut coeffs = [0.0; N];
        coeffs[0] = s;
        coeffs[1] = 1.0;
        Jet4 { coeffs }
    }

    pub fn from_derivatives(d: [f64; N]) -> Self {
        Jet4 {
            coeffs: std::array::from_fn(|k| d[k] / FACTORIAL[k]),
        }
    }

    pub fn from_taylor(coeffs: [f64; N]) -> Self {
        Jet4 { coeffs }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// The `k`-th derivative, `k <= 4`.
    pub fn d(&self, k: usize) -> f64 {
        self.coeffs[k] * FACTORIAL[k]
    }

    pub fn derivatives(&self) -> [f64; N] {
        std::array::from_fn(|k| self.d(k))
    }

    pub fn taylor(&self) -> [f64; N] {
        self.coeffs
    }

    /// Differentiates the jet. The top order is unknown afterwards and set to zero,
    /// so a jet that has been differentiated `k` times is exact up to order `4 - k`.
    pub fn derivative(&self) -> Jet4 {
        let mut coeffs = [0.0; N];
        for k in 0..ORDER {
            coeffs[k] = (k + 1) as f64 * self.coeffs[k + 1];
        }
        Jet4 { coeffs }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, k: f64) -> Jet4 {
        Jet4 {
            coeffs: self.coeffs.map(|c| c * k),
        }
    }

    pub fn recip(&self) -> Result<Jet4> {
        Jet4::constant(1.0).checked_div(self)
    }

    pub fn checked_div(&self, rhs: &Jet4) -> Result<Jet4> {
        let b = &rhs.coeffs;
        if b[0].abs() < DIVISION_FLOOR || !b[0].is_finite() {
            return Err(Error::domain(format!("division by {:e}", b[0])));
        }
        let mut q = [0.0; N];
        for k in 0..N {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= b[j] * q[k - j];
            }
            q[k] = acc / b[0];
        }
        Ok(Jet4 { coeffs: q })
    }

    pub fn exp(&self) -> Jet4 {
        let a = &self.coeffs;
        let mut e = [0.0; N];
        e[0] = a[0].exp();
        for k in 1..N {
            let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = acc / k as f64;
        }
        Jet4 { coeffs: e }
    }

    pub fn ln(&self) -> Result<Jet4> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::domain(format!("log of non-positive value {}", a[0])));
        }
        let mut l = [0.0; N];
        l[0] = a[0].ln();
        for k in 1..N {
            let acc: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
            l[k] = (a[k] - acc / k as f64) / a[0];
        }
        Ok(Jet4 { coeffs: l })
    }

    pub fn sqrt(&self) -> Result<Jet4> {
        let a = &self.coeffs;
        if a[0] < 0.0 || a[0].is_nan() {
            return Err(Error::domain(format!("sqrt of negative value {}", a[0])));
        }
        if a[0] == 0.0 {
            // Only the identically vanishing jet has a finite square root here.
            if a.iter().all(|c| *c == 0.0) {
                return Ok(Jet4::default());
            }
            return Err(Error::domain("sqrt is not differentiable at 0"));
        }
        let mut r = [0.0; N];
        r[0] = a[0].sqrt();
        for k in 1..N {
            let acc: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
            r[k] = (a[k] - acc) / (2.0 * r[0]);
        }
        Ok(Jet4 { coeffs: r })
    }

    fn sin_cos(&self) -> (Jet4, Jet4) {
        let a = &self.coeffs;
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..N {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet4 { coeffs: s }, Jet4 { coeffs: c })
    }

    fn sinh_cosh(&self) -> (Jet4, Jet4) {
        let a = &self.coeffs;
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = a[0].sinh();
        c[0] = a[0].cosh();
        for k in 1..N {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Jet4 { coeffs: s }, Jet4 { coeffs: c })
    }

    pub fn sin(&self) -> Jet4 {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet4 {
        self.sin_cos().1
    }

    pub fn tan(&self) -> Result<Jet4> {
        let (s, c) = self.sin_cos();
        s.checked_div(&c)
    }

    pub fn sinh(&self) -> Jet4 {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Jet4 {
        self.sinh_cosh().1
    }

    /// Absolute value; the branch is chosen by the sign of the value, with
    /// `+` at exactly zero.
    pub fn abs(&self) -> Jet4 {
        if self.coeffs[0] < 0.0 {
            -*self
        } else {
            *self
        }
    }

    /// Integer power by repeated multiplication, valid for every base.
    pub fn powi(&self, n: i32) -> Result<Jet4> {
        let mut result = Jet4::constant(1.0);
        let mut base = *self;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            result.recip()
        } else {
            Ok(result)
        }
    }

    /// General power `self^exponent` through `exp(exponent * ln(self))`.
    pub fn powf(&self, exponent: &Jet4) -> Result<Jet4> {
        if !(self.coeffs[0] > 0.0) {
            return Err(Error::domain(format!(
                "non-integer power of non-positive base {}",
                self.coeffs[0]
            )));
        }
        Ok((*exponent * self.ln()?).exp())
    }
}

impl Add for Jet4 {
    type Output = Jet4;
    fn add(self, rhs: Jet4) -> Jet4 {
        Jet4 {
            coeffs: std::array::from_fn(|k| self.coeffs[k] + rhs.coeffs[k]),
        }
    }
}

impl AddAssign for Jet4 {
    fn add_assign(&mut self, rhs: Jet4) {
        *self = *self + rhs;
    }
}

impl Sub for Jet4 {
    type Output = Jet4;
    fn sub(self, rhs: Jet4) -> Jet4 {
        Jet4 {
            coeffs: std::array::from_fn(|k| self.coeffs[k] - rhs.coeffs[k]),
        }
    }
}

impl Mul for Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: Jet4) -> Jet4 {
        let mut c = [0.0; N];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate().take(N - i) {
                c[i + j] += a * b;
            }
        }
        Jet4 { coeffs: c }
    }
}

impl Mul<f64> for Jet4 {
    type Output = Jet4;
    fn mul(self, k: f64) -> Jet4 {
        self.scale(k)
    }
}

impl Neg for Jet4 {
    type Output = Jet4;
    fn neg(self) -> Jet4 {
        self.scale(-1.0)
    }
}

/// A 4-vector whose components are jets.
pub type VecJet = [Jet4; 4];

pub fn vec_value(v: &VecJet) -> crate::geom4::Vec4 {
    crate::geom4::Vec4(v.map(|c| c.value()))
}

/// The `k`-th derivative of a vector jet as a plain vector.
pub fn vec_d(v: &VecJet, k: usize) -> crate::geom4::Vec4 {
    crate::geom4::Vec4(v.map(|c| c.d(k)))
}

pub fn vec_derivative(v: &VecJet) -> VecJet {
    v.map(|c| c.derivative())
}

pub fn vec_constant(v: crate::geom4::Vec4) -> VecJet {
    v.0.map(Jet4::constant)
}
