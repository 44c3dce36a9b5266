use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::Rational;
use crate::error::{Error, Result};

/// Field-like scalar used by every generic algorithm in the crate.
///
/// Division is fallible: exact backends fail on an exact zero, float
/// backends on a magnitude below [`FLOAT_POLE_EPS`].
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn try_recip(&self) -> Result<Self>;

    /// A k-th root of `base`; `symbol` names it when it has to be adjoined.
    fn root(base: &Self, k: u32, symbol: &str) -> Result<Self>;

    /// Size used for pole detection and residual norms; exact backends
    /// return 0 for zero and 1 otherwise.
    fn magnitude(&self) -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n))
    }

    fn frac(n: i64, d: i64) -> Self {
        Self::from_rational(&Rational::frac(n, d))
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.try_recip()?)
    }

    fn scale(&self, r: &Rational) -> Self {
        self.clone() * Self::from_rational(r)
    }

    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

pub const FLOAT_POLE_EPS: f64 = 1e-12;

/// Divide, reporting `what` as the vanishing denominator.
pub fn div<S: Scalar>(a: &S, b: &S, what: &str) -> Result<S> {
    a.try_div(b).map_err(|e| e.at(what))
}

pub fn recip<S: Scalar>(a: &S, what: &str) -> Result<S> {
    a.try_recip().map_err(|e| e.at(what))
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn try_recip(&self) -> Result<Self> {
        self.recip()
    }
    fn root(base: &Self, k: u32, symbol: &str) -> Result<Self> {
        base.exact_root(k)
            .ok_or_else(|| Error::NoRoot(format!("{symbol}^{k} = {base} has no rational solution")))
    }
    fn magnitude(&self) -> f64 {
        if Rational::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn try_div(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn try_recip(&self) -> Result<Self> {
        if self.abs() < FLOAT_POLE_EPS {
            Err(Error::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }
    fn root(base: &Self, k: u32, symbol: &str) -> Result<Self> {
        if *base < 0.0 && k % 2 == 0 {
            return Err(Error::NoRoot(format!("{symbol}^{k} = {base} has no real solution")));
        }
        let r = match k {
            2 => base.abs().sqrt(),
            3 => base.abs().cbrt(),
            _ => base.abs().powf(1.0 / k as f64),
        };
        Ok(if *base < 0.0 { -r } else { r })
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

/// Principal branch: real positive bases take the real root, everything
/// else the root with the smallest argument.
impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(r.to_f64(), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn try_recip(&self) -> Result<Self> {
        if self.norm() < FLOAT_POLE_EPS {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.inv())
        }
    }
    fn root(base: &Self, k: u32, _symbol: &str) -> Result<Self> {
        if base.im == 0.0 && base.re >= 0.0 {
            return Ok(Complex64::new(f64::root(&base.re, k, "")?, 0.0));
        }
        if k == 2 {
            return Ok(base.sqrt());
        }
        let (r, theta) = base.to_polar();
        Ok(Complex64::from_polar(r.powf(1.0 / k as f64), theta / k as f64))
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}
