//! Exact coefficient fields, polynomials and rational functions.

mod field;
mod mpoly;
mod radical;
mod ratfn;
mod scalar;
mod upoly;

pub use field::Field;
pub use mpoly::{bipoly_reduce_mod_curve, MPoly, Monomial, Var};
pub(crate) use mpoly::reduce_in as mpoly_reduce_in;
pub use radical::Radical;
pub use ratfn::{ratfunc_normalize, RatFn};
pub use scalar::{scalar_ops, Number, Scalar, ScalarOp};
pub use upoly::{poly_gcd, UPoly};


use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("values from different quadratic extensions Q(sqrt({0})) and Q(sqrt({1}))")]
    MixedExtensions(i64, i64),
    #[error("exact and floating values cannot be mixed without an explicit downcast")]
    ExactFloatMix,
    #[error("invalid quadratic extension radicand {0}")]
    InvalidExtension(i64),
    #[error("radicand {0} is too large to make square-free")]
    RadicandTooLarge(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot reduce modulo a constant polynomial")]
    ConstantModulus,
}
