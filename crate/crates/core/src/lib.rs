//! Exact analysis of planar birational maps that preserve a fibration by
//! rational curves: parametrization of the invariant curves, per-fiber
//! Möbius maps, Lie symmetries, invariant measures, conjugations, rotation
//! numbers and periods, with orbit-level cross-checks.

pub mod arith;
pub mod builtins;
pub mod curves;
pub mod dynamics;
pub mod eval;
pub mod mobius;
pub mod orbits;
pub mod par;
pub mod parse;
pub mod report;
pub mod spec_file;

/// Names of the distinguished variables.
pub mod vars {
    use crate::arith::Var;

    pub fn x() -> Var {
        Var::new("x")
    }
    pub fn y() -> Var {
        Var::new("y")
    }
    pub fn t() -> Var {
        Var::new("t")
    }
    pub fn h() -> Var {
        Var::new("h")
    }
    pub fn k() -> Var {
        Var::new("k")
    }
    pub fn delta() -> Var {
        Var::new("delta")
    }
}
