use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Rational, Scalar};
use crate::error::Result;

/// First-order dual number `value + tangent·ε`, ε² = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<S> {
    pub value: S,
    pub tangent: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(value: S, tangent: S) -> Self {
        Dual { value, tangent }
    }

    pub fn constant(value: S) -> Self {
        Dual { value, tangent: S::zero() }
    }

    pub fn variable(value: S) -> Self {
        Dual { value, tangent: S::one() }
    }
}

/// Evaluate `f` at `point` given as (value, tangent) pairs.
pub fn dual_lift<S, F>(f: F, point: &[(S, S)]) -> Result<Dual<S>>
where
    S: Scalar,
    F: FnOnce(&[Dual<S>]) -> Result<Dual<S>>,
{
    let args: Vec<Dual<S>> = point.iter().map(|(v, t)| Dual::new(v.clone(), t.clone())).collect();
    f(&args)
}

impl<S: Scalar> fmt::Display for Dual<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.value, self.tangent)
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.value + rhs.value, self.tangent + rhs.tangent)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.value - rhs.value, self.tangent - rhs.tangent)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let t = self.tangent * rhs.value.clone() + self.value.clone() * rhs.tangent;
        Dual::new(self.value * rhs.value, t)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.value, -self.tangent)
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn zero() -> Self {
        Dual::constant(S::zero())
    }
    fn one() -> Self {
        Dual::constant(S::one())
    }
    fn from_rational(r: &Rational) -> Self {
        Dual::constant(S::from_rational(r))
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.tangent.is_zero()
    }
    fn try_recip(&self) -> Result<Self> {
        let inv = self.value.try_recip()?;
        let t = -(self.tangent.clone() * inv.clone() * inv.clone());
        Ok(Dual::new(inv, t))
    }
    /// Differentiates through `r^k = base`: r' = base' / (k r^(k-1)).
    fn root(base: &Self, k: u32, symbol: &str) -> Result<Self> {
        let r = S::root(&base.value, k, symbol)?;
        let denom = r.powi(k - 1) * S::from_int(k as i64);
        let t = base.tangent.try_div(&denom)?;
        Ok(Dual::new(r, t))
    }
    fn magnitude(&self) -> f64 {
        self.value.magnitude().max(self.tangent.magnitude())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_numerics::ExtScalar;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn lift_examples() {
        let sq = dual_lift(|x| Ok(x[0].clone() * x[0].clone()), &[(q(3, 1), q(1, 1))]).unwrap();
        assert_eq!(sq, Dual::new(q(9, 1), q(6, 1)));

        let quot = dual_lift(|x| x[0].try_div(&x[1]), &[(q(1, 1), q(0, 1)), (q(2, 1), q(1, 1))]).unwrap();
        assert_eq!(quot, Dual::new(q(1, 2), q(-1, 4)));

        let cub = dual_lift(
            |x| Ok(x[0].powi(3) - x[0].clone()),
            &[(q(2, 1), q(5, 1))],
        )
        .unwrap();
        // (3x^2 - 1)·5 at x = 2
        assert_eq!(cub, Dual::new(q(6, 1), q(55, 1)));
    }

    #[test]
    fn pole_is_error() {
        let r = dual_lift(|x| x[0].try_recip(), &[(q(0, 1), q(1, 1))]);
        assert!(r.is_err());
    }

    #[test]
    fn root_tangent_satisfies_relation() {
        // s^2 = t with t' = 1 gives 2 s s' = 1
        let t = Dual::new(ExtScalar::from_int(3), ExtScalar::one());
        let s = Dual::root(&t, 2, "s").unwrap();
        let two = ExtScalar::from_int(2);
        assert_eq!(two * s.value.clone() * s.tangent.clone(), ExtScalar::one());
        assert_eq!(s.clone() * s, t);
    }
}
