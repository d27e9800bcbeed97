//! Per-fiber analysis: Möbius map, classification, fixed points in the
//! plane and consistency checks.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{extract_mobius, DynError, IntegrableSystem, RationalMapPlane, SystemAnalysis};
use crate::arith::{ArithError, MPoly, RatFn, Scalar};
use crate::curves::{
    check_proper, conic_base_point, invert_parametrization, parametrize_by_lines, Parametrization,
    PlaneCurve,
};
use crate::mobius::{FixedPoint, Mobius, MobiusClass};
use crate::par::{self, Exec};
use crate::vars;

/// Image of a fixed point of `M_h` under `P_h`.
#[derive(Clone, Debug, PartialEq)]
pub enum PlanarPoint {
    Exact(Scalar, Scalar),
    /// `P_h` has a pole at this parameter: the fixed point lies at infinity.
    AtInfinity(FixedPoint),
    Approx(Complex64, Complex64),
}

impl PlanarPoint {
    pub fn to_complex(&self) -> Option<(Complex64, Complex64)> {
        match self {
            PlanarPoint::Exact(x, y) => Some((x.to_complex(), y.to_complex())),
            PlanarPoint::Approx(x, y) => Some((*x, *y)),
            PlanarPoint::AtInfinity(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FiberStatus {
    Regular,
    /// Reducible or otherwise unusable fiber, excluded from the analysis.
    Degenerate(String),
    /// `M_h` is the identity.
    Identity,
    Failed(String),
}

impl FiberStatus {
    pub fn name(&self) -> &'static str {
        match self {
            FiberStatus::Regular => "regular",
            FiberStatus::Degenerate(_) => "degenerate",
            FiberStatus::Identity => "identity",
            FiberStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiberReport {
    pub h: Scalar,
    pub curve: Option<PlaneCurve>,
    pub status: FiberStatus,
    /// `"closed-form"` or `"generated"`.
    pub source: &'static str,
    pub param: Option<Parametrization>,
    pub mobius: Option<Mobius<Scalar>>,
    pub class: Option<MobiusClass>,
    /// Images of `t0`, `t1` in that order.
    pub fixed_points: Vec<PlanarPoint>,
    pub theta: Option<f64>,
    pub verdicts: BTreeMap<String, bool>,
}

impl FiberReport {
    fn new(h: &Scalar, source: &'static str) -> Self {
        FiberReport {
            h: h.clone(),
            curve: None,
            status: FiberStatus::Regular,
            source,
            param: None,
            mobius: None,
            class: None,
            fixed_points: Vec::new(),
            theta: None,
            verdicts: BTreeMap::new(),
        }
    }

    /// All recorded checks passed.
    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| *v)
    }
}

/// Determinant of the symmetric matrix of a conic; zero iff degenerate.
fn conic_determinant(f: &MPoly) -> Result<Scalar, ArithError> {
    let (x, y) = (vars::x(), vars::y());
    let mut c = [[Scalar::zero(), Scalar::zero(), Scalar::zero()], [Scalar::zero(), Scalar::zero(), Scalar::zero()], [Scalar::zero(), Scalar::zero(), Scalar::zero()]];
    let half = Scalar::frac(1, 2);
    for (m, k) in f.terms() {
        let (i, j) = (m.exp(&x) as usize, m.exp(&y) as usize);
        let (r, s, w) = match (i, j) {
            (2, 0) => (0, 0, Scalar::one()),
            (0, 2) => (1, 1, Scalar::one()),
            (1, 1) => (0, 1, half.clone()),
            (1, 0) => (0, 2, half.clone()),
            (0, 1) => (1, 2, half.clone()),
            _ => (2, 2, Scalar::one()),
        };
        let v = k.try_mul(&w)?;
        c[r][s] = v.clone();
        c[s][r] = v;
    }
    let minor = |a: &Scalar, b: &Scalar, d: &Scalar, e: &Scalar| a.try_mul(e)?.try_sub(&b.try_mul(d)?);
    let t0 = c[0][0].try_mul(&minor(&c[1][1], &c[1][2], &c[2][1], &c[2][2])?)?;
    let t1 = c[0][1].try_mul(&minor(&c[1][0], &c[1][2], &c[2][0], &c[2][2])?)?;
    let t2 = c[0][2].try_mul(&minor(&c[1][0], &c[1][1], &c[2][0], &c[2][1])?)?;
    t0.try_sub(&t1)?.try_add(&t2)
}

/// `None` when the fiber is usable, else the reason it is degenerate.
pub fn fiber_degeneracy(curve: &PlaneCurve) -> Result<Option<String>, ArithError> {
    if curve.degree() == 2 && conic_determinant(curve.poly())?.is_zero() {
        return Ok(Some("reducible conic".into()));
    }
    Ok(None)
}

fn line_parametrization(curve: &PlaneCurve) -> Result<Parametrization, DynError> {
    let (x, y, t) = (vars::x(), vars::y(), vars::t());
    let f = curve.poly();
    let coeff = |v: &crate::arith::Var| {
        f.coeffs_in(v).get(1).and_then(|c| c.constant_value()).unwrap_or_else(Scalar::zero)
    };
    let (cx, cy) = (coeff(&x), coeff(&y));
    let c0 = f.coeffs_in(&x)[0].coeffs_in(&y)[0].constant_value().unwrap_or_else(Scalar::zero);
    let tt = RatFn::var(&t);
    let (p, inv) = if !cy.is_zero() {
        let rest = tt.scale(&cx).add(&RatFn::constant(c0)).scale(&(-&cy.try_inv()?));
        (Parametrization::new(tt, rest), RatFn::var(&x))
    } else {
        let xv = RatFn::constant((-&c0).try_div(&cx)?);
        (Parametrization::new(xv, tt), RatFn::var(&y))
    };
    Ok(p.with_inverse(inv))
}

/// A proper parametrization of the fiber `{V = h}` built from the curve
/// alone: by lines through a base point for conics, directly for lines.
///
/// The base abscissa is the system's `x0` when declared, else the first of
/// `0, 1, −1, 2, −2, …` giving a usable base point.
pub fn parametrize_fiber(sys: &IntegrableSystem, h: &Scalar) -> Result<Parametrization, DynError> {
    let curve = sys.curve_at(h)?;
    let mut param = if curve.degree() == 1 {
        line_parametrization(&curve)?
    } else {
        let vals = sys.values_at(h);
        let candidates: Vec<Scalar> = match &sys.base_x0 {
            Some(x0) => vec![x0.eval(&vals)?.ok_or(DynError::NoParametrization)?],
            None => (0..12)
                .map(|i: i64| Scalar::from_int(if i % 2 == 0 { -i / 2 } else { (i + 1) / 2 }))
                .collect(),
        };
        let mut found = None;
        let mut last_err = DynError::NoParametrization;
        for x0 in candidates {
            let attempt = (|| -> Result<Parametrization, DynError> {
                let (bx, by) = conic_base_point(&curve, &x0, false)?;
                let p = parametrize_by_lines(&curve, (&RatFn::constant(bx), &RatFn::constant(by)), None)?;
                if !check_proper(&p, &curve) {
                    return Err(DynError::Verification("generated parametrization is not proper".into()));
                }
                Ok(p)
            })();
            match attempt {
                Ok(p) => {
                    found = Some(p);
                    break;
                }
                Err(e) => last_err = e,
            }
        }
        found.ok_or(last_err)?
    };
    if param.inverse.is_none() {
        param.inverse = Some(invert_parametrization(&param, &curve)?);
    }
    param.h = Some(h.clone());
    Ok(param)
}

fn eval_at_point(r: &RatFn, t: &Scalar) -> Result<Option<Scalar>, ArithError> {
    let vals = BTreeMap::from([(vars::t(), t.clone())]);
    match r.denom().try_eval(&vals)? {
        Some(d) if d.is_zero() => Ok(None),
        Some(_) => r.eval(&vals),
        None => Err(ArithError::ZeroDenominator),
    }
}

fn component_at_infinity(r: &RatFn) -> Option<Scalar> {
    let t = vars::t();
    let (dn, dd) = (r.numer().degree_in(&t), r.denom().degree_in(&t));
    if dn > dd {
        return None;
    }
    if dn < dd {
        return Some(Scalar::zero());
    }
    let a = r.numer().lc_in(&t).constant_value()?;
    let b = r.denom().lc_in(&t).constant_value()?;
    a.try_div(&b).ok()
}

fn complex_point(p: &Parametrization, z: Complex64) -> PlanarPoint {
    let vals = BTreeMap::from([(vars::t(), z)]);
    let d1 = p.p1.denom().eval_complex(&vals).unwrap_or_default();
    let d2 = p.p2.denom().eval_complex(&vals).unwrap_or_default();
    if d1.norm() < 1e-12 || d2.norm() < 1e-12 {
        return PlanarPoint::AtInfinity(FixedPoint::Approx(z));
    }
    match (p.p1.eval_complex(&vals), p.p2.eval_complex(&vals)) {
        (Some(x), Some(y)) => PlanarPoint::Approx(x, y),
        _ => PlanarPoint::AtInfinity(FixedPoint::Approx(z)),
    }
}

/// `P_h(t_j)` for a fixed point `t_j` of `M_h`.
pub fn planar_fixed_point(p: &Parametrization, fp: &FixedPoint) -> PlanarPoint {
    match fp {
        FixedPoint::Infinity => match (component_at_infinity(&p.p1), component_at_infinity(&p.p2)) {
            (Some(x), Some(y)) => PlanarPoint::Exact(x, y),
            _ => PlanarPoint::AtInfinity(FixedPoint::Infinity),
        },
        FixedPoint::Approx(z) => complex_point(p, *z),
        FixedPoint::Finite(t) => match (eval_at_point(&p.p1, t), eval_at_point(&p.p2, t)) {
            (Ok(Some(x)), Ok(Some(y))) => PlanarPoint::Exact(x, y),
            (Ok(None), _) | (_, Ok(None)) => PlanarPoint::AtInfinity(fp.clone()),
            _ => match complex_point(p, t.to_complex()) {
                PlanarPoint::AtInfinity(_) => PlanarPoint::AtInfinity(fp.clone()),
                other => other,
            },
        },
    }
}

fn is_fixed(map: &RationalMapPlane, x: &Scalar, y: &Scalar) -> Result<bool, ArithError> {
    let vals = BTreeMap::from([(vars::x(), x.clone()), (vars::y(), y.clone())]);
    let fx = map.f1.eval(&vals)?;
    let fy = map.f2.eval(&vals)?;
    Ok(fx.as_ref() == Some(x) && fy.as_ref() == Some(y))
}

/// `Y(M(t))·(ct + d)² = det(M)·Y(t)` with `Y = −b + (d − a)t + ct²`.
fn lie_1d_compatible(m: &Mobius<Scalar>) -> Result<bool, ArithError> {
    let t = vars::t();
    let y = RatFn::from_poly(m.lie_symmetry_1d().to_mpoly());
    let mt = m.to_ratfn();
    let lhs = y.subs_one(&t, &mt)?;
    let rhs = mt.derivative(&t).mul(&y);
    Ok(lhs == rhs)
}

/// Full analysis of the fiber `{V = h}`.
///
/// With `an`, the closed-form family is used; otherwise the fiber is
/// parametrized from the curve.
pub fn analyze_fiber(sys: &IntegrableSystem, an: Option<&SystemAnalysis>, h: &Scalar) -> FiberReport {
    let source = if an.is_some() { "closed-form" } else { "generated" };
    let mut rep = FiberReport::new(h, source);
    if let Err(e) = fill_report(sys, an, h, &mut rep) {
        rep.status = match e {
            DynError::Curve(c) => FiberStatus::Degenerate(c.to_string()),
            DynError::Mobius(crate::mobius::MobiusError::Identity) => FiberStatus::Identity,
            e => FiberStatus::Failed(e.to_string()),
        };
    }
    rep
}

fn fill_report(
    sys: &IntegrableSystem,
    an: Option<&SystemAnalysis>,
    h: &Scalar,
    rep: &mut FiberReport,
) -> Result<(), DynError> {
    let curve = sys.curve_at(h)?;
    rep.curve = Some(curve.clone());
    if let Some(why) = fiber_degeneracy(&curve)? {
        rep.status = FiberStatus::Degenerate(why);
        return Ok(());
    }
    let map = sys.map.specialize(&sys.param_values)?;
    let (param, m) = match an {
        Some(an) => (an.param_at(h)?, an.mobius_at(h)?),
        None => {
            let p = parametrize_fiber(sys, h)?;
            let m = extract_mobius(&map, &p, &curve)?;
            (p, m.specialize(&BTreeMap::new())?)
        }
    };
    rep.verdicts.insert("param_on_curve".into(), param.lies_on(&curve)?);
    rep.verdicts.insert("proper".into(), check_proper(&param, &curve));
    rep.verdicts.insert("lie_1d_compatible".into(), lie_1d_compatible(&m)?);
    rep.param = Some(param.clone());
    rep.mobius = Some(m.clone());
    if m.is_identity() {
        rep.status = FiberStatus::Identity;
        return Ok(());
    }
    let class = m.classify()?;
    let mut fps = vec![class.t0.clone()];
    fps.extend(class.t1.clone());
    let mut all_fixed = true;
    for fp in &fps {
        let pt = planar_fixed_point(&param, fp);
        if let PlanarPoint::Exact(x, y) = &pt {
            all_fixed &= is_fixed(&map, x, y).unwrap_or(false);
        }
        rep.fixed_points.push(pt);
    }
    rep.verdicts.insert("fixed_points_fixed".into(), all_fixed);
    rep.theta = class.theta();
    rep.class = Some(class);
    Ok(())
}

/// Analyzes each level of the grid; reports keep the grid order.
pub fn analyze_grid(
    sys: &IntegrableSystem,
    an: Option<&SystemAnalysis>,
    grid: &[Scalar],
    exec: Exec,
) -> Vec<FiberReport> {
    par::map(exec, grid, |h| analyze_fiber(sys, an, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::mobius::DynamicsClass;

    #[test]
    fn saito_zero_level_is_degenerate() {
        let sys = builtins::saito();
        let an = SystemAnalysis::new(&sys).unwrap();
        let rep = analyze_fiber(&sys, Some(&an), &Scalar::zero());
        assert_eq!(rep.status.name(), "degenerate");
        let rep = analyze_fiber(&sys, Some(&an), &Scalar::from_int(-1));
        assert_eq!(rep.status, FiberStatus::Regular);
        assert_eq!(rep.class.as_ref().unwrap().order(), Some(2));
        assert_eq!(rep.theta, Some(0.5));
    }

    #[test]
    fn br_fixed_points_at_infinity() {
        let sys = builtins::br();
        let an = SystemAnalysis::new(&sys).unwrap();
        let rep = analyze_fiber(&sys, Some(&an), &Scalar::from_int(3));
        assert!(rep.passed(), "{:?}", rep.verdicts);
        assert_eq!(rep.class.as_ref().unwrap().class, DynamicsClass::Hyperbolic);
        assert_eq!(rep.fixed_points.len(), 2);
        assert!(rep
            .fixed_points
            .iter()
            .all(|p| matches!(p, PlanarPoint::AtInfinity(FixedPoint::Finite(_)))));
    }

    #[test]
    fn nostra_parabolic_fixed_point() {
        let sys = builtins::nostra();
        let rep = analyze_fiber(&sys, None, &Scalar::frac(-1, 4));
        assert_eq!(rep.class.as_ref().unwrap().class, DynamicsClass::Parabolic);
        assert_eq!(
            rep.fixed_points,
            vec![PlanarPoint::Exact(Scalar::frac(-1, 2), Scalar::frac(-1, 2))]
        );
        assert!(rep.passed());
    }
}
