//! Exact scalars: rationals, pure root extensions and forward duals.

mod dual;
mod ext;
mod linear;
mod rational;
mod scalar;

pub use dual::{dual_lift, Dual};
pub use linear::solve_linear;
pub use ext::{ExtScalar, Extension, RootSymbol};
pub use rational::Rational;
pub use scalar::{div, recip, Scalar, FLOAT_POLE_EPS};
