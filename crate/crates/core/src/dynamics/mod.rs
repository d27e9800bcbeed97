//! Integrable birational maps with a genus-0 invariant fibration: first
//! integrals, per-fiber Möbius maps, Lie symmetries, invariant measures,
//! conjugations, rotation numbers and fiber reports.

mod conjugation;
mod fiber;
mod rotation;
mod symmetry;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::arith::{ArithError, RatFn, Scalar, Var};
use crate::curves::{invert_parametrization, CurveError, Parametrization, PlaneCurve};
use crate::mobius::{Mobius, MobiusError};
use crate::vars;

pub use conjugation::{
    auto_conjugation, build_conjugation, level_candidates, suggest_level_correspondence,
    ConjugationResult,
};
pub use fiber::{
    analyze_fiber, analyze_grid, fiber_degeneracy, parametrize_fiber, planar_fixed_point, FiberReport,
    FiberStatus, PlanarPoint,
};
pub use rotation::{
    float_fiber_point, period_bound, rotation_profile, solve_period_level, theta_float,
};
pub(crate) use rotation::{float_mobius, float_values};
pub use symmetry::{
    is_tangent, lie_symmetry_field, measure_density, verify_lie_compatibility,
    verify_measure_identity, CheckMode, PlanarVectorField,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynError {
    #[error("composition hits an identically zero denominator")]
    DegenerateComposition,
    #[error("no parametrization available for this fiber family")]
    NoParametrization,
    #[error("parametrization depends non-rationally on the fiber parameter: {0}")]
    NonRational(String),
    #[error("the two density formulas disagree; X is not tangent to the fibers")]
    InconsistentDensity,
    #[error("both partial derivatives of the first integral vanish")]
    NoGradient,
    #[error("all {0} sample points hit poles")]
    AllPoles(usize),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("the map's inverse is not verified")]
    InverseUnverified,
    #[error("rotation profile is not monotone on the sampled interval")]
    NonMonotone,
    #[error("fiber h = {0} is not of rotation type")]
    NotRotation(String),
    #[error("no rotation interval declared for this system")]
    NoInterval,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Mobius(#[from] MobiusError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A planar rational map `(F1, F2)` in `x, y` with optional inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMapPlane {
    pub f1: RatFn,
    pub f2: RatFn,
    pub inverse: Option<(RatFn, RatFn)>,
}

impl RationalMapPlane {
    pub fn new(f1: RatFn, f2: RatFn) -> Self {
        RationalMapPlane {
            f1,
            f2,
            inverse: None,
        }
    }

    pub fn with_inverse(mut self, g1: RatFn, g2: RatFn) -> Self {
        self.inverse = Some((g1, g2));
        self
    }

    /// `g ∘ (p1, p2)` for any rational `g` in `x, y`.
    pub fn substitute(g: &RatFn, p1: &RatFn, p2: &RatFn) -> Result<RatFn, ArithError> {
        let mut map = BTreeMap::new();
        map.insert(vars::x(), p1.clone());
        map.insert(vars::y(), p2.clone());
        g.subs(&map)
    }

    /// `g ∘ F`.
    pub fn pull_back(&self, g: &RatFn) -> Result<RatFn, ArithError> {
        Self::substitute(g, &self.f1, &self.f2)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RationalMapPlane) -> Result<RationalMapPlane, ArithError> {
        Ok(RationalMapPlane::new(
            other.pull_back(&self.f1)?,
            other.pull_back(&self.f2)?,
        ))
    }

    pub fn jacobian(&self) -> [[RatFn; 2]; 2] {
        let (x, y) = (vars::x(), vars::y());
        [
            [self.f1.derivative(&x), self.f1.derivative(&y)],
            [self.f2.derivative(&x), self.f2.derivative(&y)],
        ]
    }

    pub fn jacobian_det(&self) -> RatFn {
        let j = self.jacobian();
        j[0][0].mul(&j[1][1]).sub(&j[0][1].mul(&j[1][0]))
    }

    pub fn is_identity(&self) -> bool {
        self.f1 == RatFn::var(&vars::x()) && self.f2 == RatFn::var(&vars::y())
    }

    /// `F⁻¹ ∘ F = id`, or `None` without an inverse.
    pub fn verify_inverse(&self) -> Result<Option<bool>, ArithError> {
        let Some((g1, g2)) = &self.inverse else {
            return Ok(None);
        };
        let inv = RationalMapPlane::new(g1.clone(), g2.clone());
        Ok(Some(inv.compose(self)?.is_identity()))
    }

    pub fn inverse_map(&self) -> Option<RationalMapPlane> {
        self.inverse
            .as_ref()
            .map(|(a, b)| RationalMapPlane::new(a.clone(), b.clone()).with_inverse(self.f1.clone(), self.f2.clone()))
    }

    pub fn specialize(&self, values: &BTreeMap<Var, Scalar>) -> Result<RationalMapPlane, ArithError> {
        Ok(RationalMapPlane {
            f1: self.f1.eval_partial(values)?,
            f2: self.f2.eval_partial(values)?,
            inverse: match &self.inverse {
                Some((a, b)) => Some((a.eval_partial(values)?, b.eval_partial(values)?)),
                None => None,
            },
        })
    }
}

/// A map together with a rational first integral `V` and a description of
/// its fibers `{V = h}`.
#[derive(Clone, Debug)]
pub struct IntegrableSystem {
    pub name: String,
    pub map: RationalMapPlane,
    pub integral: RatFn,
    /// Closed-form parametrization of the fibers, symbolic in `h` (and the
    /// parameters), with its inverse.
    pub param: Option<Parametrization>,
    /// Abscissa of the base point for parametrization by lines.
    pub base_x0: Option<RatFn>,
    /// Symbolic parameters and their declared values.
    pub params: Vec<Var>,
    pub param_values: BTreeMap<Var, Scalar>,
    pub critical_level: Option<RatFn>,
    pub rotation_interval: Option<(RatFn, RatFn)>,
    pub admissible: String,
}

impl IntegrableSystem {
    pub fn new(name: &str, map: RationalMapPlane, integral: RatFn) -> Self {
        IntegrableSystem {
            name: name.to_string(),
            map,
            integral,
            param: None,
            base_x0: None,
            params: Vec::new(),
            param_values: BTreeMap::new(),
            critical_level: None,
            rotation_interval: None,
            admissible: String::new(),
        }
    }

    /// `V1 − h·V2`.
    pub fn fiber_poly(&self) -> crate::arith::MPoly {
        self.integral
            .numer()
            .sub(&self.integral.denom().mul(&crate::arith::MPoly::var(&vars::h())))
    }

    pub fn curve(&self) -> Result<PlaneCurve, CurveError> {
        PlaneCurve::new(self.fiber_poly())
    }

    /// Declared parameter values together with `h`.
    pub fn values_at(&self, h: &Scalar) -> BTreeMap<Var, Scalar> {
        let mut v = self.param_values.clone();
        v.insert(vars::h(), h.clone());
        v
    }

    pub fn curve_at(&self, h: &Scalar) -> Result<PlaneCurve, CurveError> {
        PlaneCurve::new(self.fiber_poly().eval_partial(&self.values_at(h)))
    }

    /// The system with all declared parameter values substituted.
    pub fn specialized(&self) -> Result<IntegrableSystem, DynError> {
        let vals = &self.param_values;
        let ev = |r: &RatFn| r.eval_partial(vals);
        let param = match &self.param {
            Some(p) => {
                let mut q = p.clone();
                q.p1 = ev(&p.p1)?;
                q.p2 = ev(&p.p2)?;
                q.inverse = p.inverse.as_ref().map(ev).transpose()?;
                if let Some(r) = &p.radical {
                    q.radical = Some(crate::arith::Radical::new(
                        r.sym().clone(),
                        ev(r.radicand())?,
                    ));
                }
                Some(q)
            }
            None => None,
        };
        Ok(IntegrableSystem {
            name: self.name.clone(),
            map: self.map.specialize(vals)?,
            integral: ev(&self.integral)?,
            param,
            base_x0: self.base_x0.as_ref().map(ev).transpose()?,
            params: Vec::new(),
            param_values: BTreeMap::new(),
            critical_level: self.critical_level.as_ref().map(ev).transpose()?,
            rotation_interval: match &self.rotation_interval {
                Some((lo, hi)) => Some((ev(lo)?, ev(hi)?)),
                None => None,
            },
            admissible: self.admissible.clone(),
        })
    }

    /// Evaluates a parameter-only expression (e.g. the critical level).
    pub fn eval_const(&self, r: &RatFn) -> Result<Option<Scalar>, ArithError> {
        r.eval(&self.param_values)
    }
}

/// `V ∘ F = V` as rational functions, symbolically in all parameters.
pub fn verify_first_integral(sys: &IntegrableSystem) -> Result<bool, DynError> {
    let lhs = sys.map.pull_back(&sys.integral).map_err(|e| match e {
        ArithError::ZeroDenominator => DynError::DegenerateComposition,
        e => e.into(),
    })?;
    Ok(lhs == sys.integral)
}

/// `M = P⁻¹ ∘ F ∘ P` on the fibers parametrized by `param`.
///
/// `curve` is the fiber (symbolic in `h` or specialized); the inverse of the
/// parametrization is computed when not supplied.
pub fn extract_mobius(
    map: &RationalMapPlane,
    param: &Parametrization,
    curve: &PlaneCurve,
) -> Result<Mobius<RatFn>, DynError> {
    let pinv = match &param.inverse {
        Some(q) => q.clone(),
        None => invert_parametrization(param, curve)?,
    };
    let fp1 = param.pull_back(&map.f1)?;
    let fp2 = param.pull_back(&map.f2)?;
    let m = param.reduce(&RationalMapPlane::substitute(&pinv, &fp1, &fp2)?)?;
    Ok(Mobius::<RatFn>::from_ratfn(&m)?)
}

/// Cached symbolic data of a system: the closed-form family with inverse
/// and the Möbius map `M_h` symbolic in `h`.
#[derive(Clone, Debug)]
pub struct SystemAnalysis {
    pub sys: IntegrableSystem,
    pub param: Parametrization,
    pub mobius: Mobius<RatFn>,
}

impl SystemAnalysis {
    pub fn new(sys: &IntegrableSystem) -> Result<Self, DynError> {
        let mut param = sys.param.clone().ok_or(DynError::NoParametrization)?;
        let curve = sys.curve()?;
        if param.inverse.is_none() {
            param.inverse = Some(invert_parametrization(&param, &curve)?);
        }
        let mobius = extract_mobius(&sys.map, &param, &curve)?;
        Ok(SystemAnalysis {
            sys: sys.clone(),
            param,
            mobius,
        })
    }

    /// `M_h` at a concrete fiber (declared parameter values substituted).
    pub fn mobius_at(&self, h: &Scalar) -> Result<Mobius<Scalar>, DynError> {
        let mut vals = self.sys.values_at(h);
        if let Some(rad) = &self.param.radical {
            if self.mobius_uses(rad.sym()) {
                let s = rad.value_at(&vals)?.ok_or(ArithError::ZeroDenominator)?;
                vals.insert(rad.sym().clone(), s);
            }
        }
        Ok(self.mobius.specialize(&vals)?)
    }

    fn mobius_uses(&self, v: &Var) -> bool {
        [&self.mobius.a, &self.mobius.b, &self.mobius.c, &self.mobius.d]
            .iter()
            .any(|r| r.contains_var(v))
    }

    /// The closed-form parametrization at a concrete fiber.
    pub fn param_at(&self, h: &Scalar) -> Result<Parametrization, DynError> {
        Ok(self.param.specialize(&self.sys.values_at(h))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    #[test]
    fn saito_integral_and_mobius() {
        let sys = builtins::saito();
        assert!(verify_first_integral(&sys).unwrap());
        let mut wrong = sys.clone();
        wrong.integral = RatFn::from_poly(crate::arith::MPoly::named("x").mul(&crate::arith::MPoly::named("y")));
        assert!(!verify_first_integral(&wrong).unwrap());
        let a = SystemAnalysis::new(&sys).unwrap();
        assert_eq!(a.mobius.to_ratfn().to_string(), "h*t/(t + 1)");
    }
}
