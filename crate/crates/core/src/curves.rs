//! Rational plane curves: base points on conics, parametrization by lines,
//! the properness test and inversion of parametrizations.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::arith::{ArithError, MPoly, Monomial, Radical, RatFn, Scalar, Var};
use crate::vars;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("the curve polynomial is constant in x and y")]
    ConstantCurve,
    #[error("f(x0, y) is constant in y")]
    ConstantSection,
    #[error("no real point over x0 = {0}")]
    NoRealPoint(String),
    #[error("the curve still depends on symbolic parameters")]
    Symbolic,
    #[error("base point is not on the curve")]
    NotOnCurve,
    #[error("curve is not a conic")]
    NotConic,
    #[error("degenerate conic: quadratic part vanishes along the pencil")]
    DegenerateConic,
    #[error("parametrization does not satisfy the curve equation")]
    NotAParametrization,
    #[error("gcd in t is not linear: parametrization not proper or curve reducible")]
    NotLinear,
    #[error("parametrization has a constant component")]
    ConstantComponent,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `f(x, y) = 0`, possibly with symbolic parameters in the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneCurve {
    f: MPoly,
}

impl PlaneCurve {
    /// Removes the content with respect to `x, y` and makes `f` monic.
    pub fn new(f: MPoly) -> Result<Self, CurveError> {
        let (x, y) = (vars::x(), vars::y());
        if f.degree_in(&x) == 0 && f.degree_in(&y) == 0 {
            return Err(CurveError::ConstantCurve);
        }
        let content = xy_content(&f);
        let f = f.div_exact(&content).expect("content divides").monic();
        Ok(PlaneCurve { f })
    }

    pub fn poly(&self) -> &MPoly {
        &self.f
    }

    pub fn deg_x(&self) -> u32 {
        self.f.degree_in(&vars::x())
    }

    pub fn deg_y(&self) -> u32 {
        self.f.degree_in(&vars::y())
    }

    /// Total degree in `x, y`.
    pub fn degree(&self) -> u32 {
        let (x, y) = (vars::x(), vars::y());
        self.f
            .terms()
            .map(|(m, _)| m.exp(&x) + m.exp(&y))
            .max()
            .unwrap_or(0)
    }

    /// Reduction variable of [`crate::arith::bipoly_reduce_mod_curve`].
    pub fn reduction_var(&self) -> Var {
        if self.deg_y() >= self.deg_x() {
            vars::y()
        } else {
            vars::x()
        }
    }

    /// Normal form modulo the curve (and the radical relation, if any).
    pub fn reduce(&self, g: &MPoly, radical: Option<&Radical>) -> MPoly {
        let g = match radical {
            Some(r) => r.reduce_poly(g).unwrap_or_else(|| g.clone()),
            None => g.clone(),
        };
        crate::arith::mpoly_reduce_in(&g, &self.f, &self.reduction_var())
    }

    /// Is the rational function `g` zero on the curve?
    pub fn vanishes(&self, g: &RatFn, radical: Option<&Radical>) -> bool {
        self.reduce(g.numer(), radical).is_zero()
    }

    pub fn eval_params(&self, values: &BTreeMap<Var, Scalar>) -> Result<PlaneCurve, CurveError> {
        PlaneCurve::new(self.f.eval_partial(values))
    }
}

/// gcd of the coefficients of `f` viewed as a polynomial in `x, y`.
fn xy_content(f: &MPoly) -> MPoly {
    let (x, y) = (vars::x(), vars::y());
    let mut groups: BTreeMap<(u32, u32), Vec<(Monomial, Scalar)>> = BTreeMap::new();
    for (m, c) in f.terms() {
        let rest: Vec<(Var, u32)> = m
            .factors()
            .iter()
            .filter(|(v, _)| *v != x && *v != y)
            .cloned()
            .collect();
        let mono = rest
            .iter()
            .fold(Monomial::one(), |acc, (v, e)| acc.mul(&Monomial::var(v, *e)));
        groups
            .entry((m.exp(&x), m.exp(&y)))
            .or_default()
            .push((mono, c.clone()));
    }
    let mut g = MPoly::zero();
    for (_, terms) in groups {
        g = g.gcd(&MPoly::from_terms(terms));
        if g.is_one() {
            break;
        }
    }
    g
}

/// A rational parametrization `t ↦ (p1(t), p2(t))`, possibly symbolic in
/// the fiber parameter and an adjoined radical.
#[derive(Clone, Debug, PartialEq)]
pub struct Parametrization {
    pub p1: RatFn,
    pub p2: RatFn,
    pub inverse: Option<RatFn>,
    pub radical: Option<Radical>,
    pub h: Option<Scalar>,
}

impl Parametrization {
    pub fn new(p1: RatFn, p2: RatFn) -> Self {
        Parametrization {
            p1,
            p2,
            inverse: None,
            radical: None,
            h: None,
        }
    }

    pub fn with_inverse(mut self, inv: RatFn) -> Self {
        self.inverse = Some(inv);
        self
    }

    pub fn with_radical(mut self, r: Radical) -> Self {
        self.radical = Some(r);
        self
    }

    pub fn reduce(&self, r: &RatFn) -> Result<RatFn, ArithError> {
        match &self.radical {
            Some(rad) => rad.reduce(r),
            None => Ok(r.clone()),
        }
    }

    /// Degree in `t`: the largest numerator/denominator degree.
    pub fn degree(&self) -> u32 {
        let t = vars::t();
        self.p1.degree_in(&t).max(self.p2.degree_in(&t))
    }

    /// `g(p1(t), p2(t))` in canonical form.
    pub fn pull_back(&self, g: &RatFn) -> Result<RatFn, ArithError> {
        let mut map = BTreeMap::new();
        map.insert(vars::x(), self.p1.clone());
        map.insert(vars::y(), self.p2.clone());
        self.reduce(&g.subs(&map)?)
    }

    pub fn lies_on(&self, curve: &PlaneCurve) -> Result<bool, ArithError> {
        Ok(self
            .pull_back(&RatFn::from_poly(curve.poly().clone()))?
            .is_zero())
    }

    /// Replaces symbolic parameters (including the fiber parameter `h`) by
    /// values; the radical symbol is replaced by its exact square root.
    pub fn specialize(&self, values: &BTreeMap<Var, Scalar>) -> Result<Parametrization, ArithError> {
        let mut vals = values.clone();
        if let Some(rad) = &self.radical {
            let s = rad
                .value_at(values)?
                .ok_or(ArithError::ZeroDenominator)?;
            vals.insert(rad.sym().clone(), s);
        }
        let ev = |r: &RatFn| r.eval_partial(&vals);
        Ok(Parametrization {
            p1: ev(&self.p1)?,
            p2: ev(&self.p2)?,
            inverse: self.inverse.as_ref().map(ev).transpose()?,
            radical: None,
            h: values.get(&vars::h()).cloned().or_else(|| self.h.clone()),
        })
    }
}

/// A point `(x0, y0)` on the curve above `x0`, taking the `+` root of the
/// quadratic in `y`. With `real_only`, negative discriminants are rejected.
pub fn conic_base_point(
    curve: &PlaneCurve,
    x0: &Scalar,
    real_only: bool,
) -> Result<(Scalar, Scalar), CurveError> {
    let mut vals = BTreeMap::new();
    vals.insert(vars::x(), x0.clone());
    let g = curve.poly().eval_partial(&vals);
    let y = vars::y();
    let coeffs = g
        .coeffs_in(&y)
        .into_iter()
        .map(|c| c.constant_value())
        .collect::<Option<Vec<_>>>()
        .ok_or(CurveError::Symbolic)?;
    let y0 = match coeffs.len() {
        0 | 1 => return Err(CurveError::ConstantSection),
        2 => (-&coeffs[0]).try_div(&coeffs[1])?,
        3 => {
            let (c0, c1, c2) = (&coeffs[0], &coeffs[1], &coeffs[2]);
            let disc = c1.try_mul(c1)?.try_sub(&Scalar::from_int(4).try_mul(c2)?.try_mul(c0)?)?;
            if real_only && disc.real_sign() == Some(std::cmp::Ordering::Less) {
                return Err(CurveError::NoRealPoint(x0.to_string()));
            }
            let root = disc.sqrt()?.ok_or(ArithError::MixedExtensions(disc.radicand(), 0))?;
            (-c1).try_add(&root)?.try_div(&Scalar::from_int(2).try_mul(c2)?)?
        }
        _ => return Err(CurveError::NotConic),
    };
    Ok((x0.clone(), y0))
}

/// Parametrizes a conic by the pencil of lines through `base`.
///
/// The base point may be symbolic (rational functions in parameters and the
/// radical symbol of `radical`).
pub fn parametrize_by_lines(
    curve: &PlaneCurve,
    base: (&RatFn, &RatFn),
    radical: Option<&Radical>,
) -> Result<Parametrization, CurveError> {
    if curve.degree() != 2 {
        return Err(CurveError::NotConic);
    }
    let (u, v) = (Var::new("_u"), Var::new("_v"));
    let reduce = |r: RatFn| -> Result<RatFn, ArithError> {
        match radical {
            Some(rad) => rad.reduce(&r),
            None => Ok(r),
        }
    };
    let mut shift = BTreeMap::new();
    shift.insert(vars::x(), RatFn::var(&u).add(base.0));
    shift.insert(vars::y(), RatFn::var(&v).add(base.1));
    let g = reduce(RatFn::from_poly(curve.poly().clone()).subs(&shift)?)?;
    let g = g.numer();
    let mut parts = [MPoly::zero(), MPoly::zero(), MPoly::zero()];
    for (m, c) in g.terms() {
        let d = (m.exp(&u) + m.exp(&v)) as usize;
        if d > 2 {
            return Err(CurveError::NotConic);
        }
        parts[d] = parts[d].add(&MPoly::term(c.clone(), m.clone()));
    }
    if !parts[0].is_zero() {
        return Err(CurveError::NotOnCurve);
    }
    let mut line = BTreeMap::new();
    line.insert(u.clone(), MPoly::one());
    line.insert(v.clone(), MPoly::var(&vars::t()));
    let f1 = parts[1].subs_poly(&line);
    let f2 = parts[2].subs_poly(&line);
    if f2.is_zero() {
        return Err(CurveError::DegenerateConic);
    }
    let ut = reduce(RatFn::new(f1.neg(), f2)?)?;
    let vt = reduce(ut.mul(&RatFn::var(&vars::t())))?;
    let p = Parametrization {
        p1: reduce(ut.add(base.0))?,
        p2: reduce(vt.add(base.1))?,
        inverse: None,
        radical: radical.cloned(),
        h: None,
    };
    if p.degree() == 0 {
        return Err(CurveError::DegenerateConic);
    }
    if !p.lies_on(curve)? {
        return Err(CurveError::NotAParametrization);
    }
    Ok(p)
}

/// Degree of the parametrization equals `max(deg_x f, deg_y f)`.
pub fn check_proper(param: &Parametrization, curve: &PlaneCurve) -> bool {
    param.degree() == curve.deg_x().max(curve.deg_y())
}

/// Inverse `t = D0(x, y) / D1(x, y)` of a proper parametrization, from the
/// gcd in `t` of `x·P12 − P11` and `y·P22 − P21` over the function field of
/// the curve.
pub fn invert_parametrization(
    param: &Parametrization,
    curve: &PlaneCurve,
) -> Result<RatFn, CurveError> {
    let t = vars::t();
    let rad = param.radical.as_ref();
    let red = |p: &MPoly| curve.reduce(p, rad);
    let h1 = MPoly::var(&vars::x())
        .mul(param.p1.denom())
        .sub(param.p1.numer());
    let h2 = MPoly::var(&vars::y())
        .mul(param.p2.denom())
        .sub(param.p2.numer());
    let mut a = red(&h1);
    let mut b = red(&h2);
    if a.degree_in(&t) == 0 || b.degree_in(&t) == 0 {
        // a component constant in t contributes no equation
        let one = if a.degree_in(&t) > 0 { a } else { b };
        if one.degree_in(&t) == 0 {
            return Err(CurveError::ConstantComponent);
        }
        return linear_root(&one.primitive_part_in(&t), param);
    }
    if a.degree_in(&t) < b.degree_in(&t) {
        std::mem::swap(&mut a, &mut b);
    }
    b = b.primitive_part_in(&t);
    loop {
        let r = red(&a.prem_in(&b, &t));
        if r.is_zero() {
            break;
        }
        if r.degree_in(&t) == 0 {
            return Err(CurveError::NotLinear);
        }
        a = b;
        b = red(&r.primitive_part_in(&t));
    }
    linear_root(&b, param)
}

fn linear_root(b: &MPoly, param: &Parametrization) -> Result<RatFn, CurveError> {
    let t = vars::t();
    if b.degree_in(&t) != 1 {
        return Err(CurveError::NotLinear);
    }
    let c = b.coeffs_in(&t);
    let q = RatFn::new(c[0].neg(), c[1].clone())?;
    Ok(param.reduce(&q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Scalar;

    fn circle() -> PlaneCurve {
        let x = MPoly::named("x");
        let y = MPoly::named("y");
        PlaneCurve::new(x.pow(2).add(&y.pow(2)).sub(&MPoly::one())).unwrap()
    }

    fn r(s: &str) -> RatFn {
        crate::parse::parse_expression(s, &["h", "a", "b", "t"]).unwrap()
    }

    #[test]
    fn circle_by_lines() {
        let c = circle();
        let (x0, y0) = conic_base_point(&c, &Scalar::from_int(-1), true).unwrap();
        assert_eq!((x0.clone(), y0.clone()), (Scalar::from_int(-1), Scalar::zero()));
        let p = parametrize_by_lines(&c, (&RatFn::constant(x0), &RatFn::constant(y0)), None).unwrap();
        assert_eq!(p.p1, r("(1 - t^2)/(1 + t^2)"));
        assert_eq!(p.p2, r("2*t/(1 + t^2)"));
        assert!(check_proper(&p, &c));
        let q = invert_parametrization(&p, &c).unwrap();
        assert!(c.vanishes(&q.sub(&r("y/(x + 1)")), None));
        assert_eq!(p.pull_back(&q).unwrap(), RatFn::named("t"));
    }

    #[test]
    fn empty_real_conic() {
        let x = MPoly::named("x");
        let y = MPoly::named("y");
        let c = PlaneCurve::new(x.pow(2).add(&y.pow(2)).add(&MPoly::one())).unwrap();
        assert!(matches!(
            conic_base_point(&c, &Scalar::zero(), true),
            Err(CurveError::NoRealPoint(_))
        ));
        // over C the point (0, i) exists
        let (_, y0) = conic_base_point(&c, &Scalar::zero(), false).unwrap();
        assert_eq!(y0, Scalar::i());
    }

    #[test]
    fn non_proper_detected() {
        let c = circle();
        let p = Parametrization::new(r("(1 - t^4)/(1 + t^4)"), r("2*t^2/(1 + t^4)"));
        assert!(p.lies_on(&c).unwrap());
        assert!(!check_proper(&p, &c));
        assert!(invert_parametrization(&p, &c).is_err());
    }

    #[test]
    fn hyperbola_trivial_inverse() {
        let c = PlaneCurve::new(r("y*(1 + x) - h").numer().clone()).unwrap();
        let p = Parametrization::new(r("t"), r("h/(t + 1)"));
        assert!(check_proper(&p, &c));
        assert_eq!(invert_parametrization(&p, &c).unwrap(), RatFn::named("x"));
    }

    #[test]
    fn parabola() {
        let c = PlaneCurve::new(r("y - x^2").numer().clone()).unwrap();
        let zero = RatFn::zero();
        let p = parametrize_by_lines(&c, (&zero, &zero), None).unwrap();
        assert!(p.lies_on(&c).unwrap());
        assert!(check_proper(&p, &c));
        let q = invert_parametrization(&p, &c).unwrap();
        assert_eq!(p.pull_back(&q).unwrap(), RatFn::named("t"));
    }

    #[test]
    fn content_is_removed() {
        let c = PlaneCurve::new(r("(h + 1)*(x*y - 1)").numer().clone()).unwrap();
        assert_eq!(c.poly(), r("x*y - 1").numer());
    }
}
