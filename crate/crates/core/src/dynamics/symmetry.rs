//! Planar Lie symmetries assembled from the per-fiber Möbius symmetry, and
//! the associated invariant-measure density.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DynError, IntegrableSystem, RationalMapPlane, SystemAnalysis};
use crate::arith::{ArithError, RatFn, Scalar, Var};
use crate::vars;

/// `X = X1 ∂/∂x + X2 ∂/∂y`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarVectorField {
    pub x1: RatFn,
    pub x2: RatFn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Symbolic,
    /// Exact check at `n` random rational points.
    Sampled { n: usize, seed: u64 },
}

/// `X(x, y) = DP_h(t) · Y_h(t)` at `t = P_h⁻¹(x, y)`, `h = V(x, y)`.
pub fn lie_symmetry_field(an: &SystemAnalysis) -> Result<PlanarVectorField, DynError> {
    let t = vars::t();
    let param = &an.param;
    let pinv = param.inverse.clone().ok_or(DynError::NoParametrization)?;
    let y_poly = an.mobius.lie_symmetry_1d();
    let y_t = y_poly.to_ratfn();
    let mut comps = Vec::new();
    for p in [&param.p1, &param.p2] {
        let xt = param.reduce(&p.derivative(&t).mul(&y_t))?;
        let mut sub = BTreeMap::new();
        sub.insert(t.clone(), pinv.clone());
        let in_xy = xt.subs(&sub)?;
        let on_level = match &param.radical {
            None => in_xy,
            Some(rad) => {
                let (even, odd) = rad.split(&in_xy)?;
                let odd = at_level(&odd, &an.sys.integral)?;
                if !odd.is_zero() {
                    return Err(DynError::NonRational(format!(
                        "{} survives the substitution h = V",
                        rad.sym()
                    )));
                }
                even
            }
        };
        comps.push(at_level(&on_level, &an.sys.integral)?);
    }
    let x2 = comps.pop().expect("two components");
    let x1 = comps.pop().expect("two components");
    Ok(PlanarVectorField { x1, x2 })
}

fn at_level(r: &RatFn, v: &RatFn) -> Result<RatFn, ArithError> {
    r.subs_one(&vars::h(), v)
}

/// `X(F(p)) = DF(p) X(p)`.
pub fn verify_lie_compatibility(
    x: &PlanarVectorField,
    f: &RationalMapPlane,
    mode: CheckMode,
) -> Result<bool, DynError> {
    let j = f.jacobian();
    match mode {
        CheckMode::Symbolic => {
            let lhs1 = f.pull_back(&x.x1)?;
            let lhs2 = f.pull_back(&x.x2)?;
            let rhs1 = j[0][0].mul(&x.x1).add(&j[0][1].mul(&x.x2));
            let rhs2 = j[1][0].mul(&x.x1).add(&j[1][1].mul(&x.x2));
            Ok(lhs1 == rhs1 && lhs2 == rhs2)
        }
        CheckMode::Sampled { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut free: Vec<Var> = [&x.x1, &x.x2, &f.f1, &f.f2]
                .iter()
                .flat_map(|r| r.vars())
                .collect();
            free.sort();
            free.dedup();
            let mut tested = 0;
            for _ in 0..n {
                let vals: BTreeMap<Var, Scalar> = free
                    .iter()
                    .map(|v| {
                        let num = rng.gen_range(-40i64..=40);
                        let den = rng.gen_range(1i64..=17);
                        (v.clone(), Scalar::frac(num, den))
                    })
                    .collect();
                let ev = |r: &RatFn| r.eval(&vals);
                let point = (|| -> Result<Option<[Scalar; 2]>, ArithError> {
                    let (Some(fx), Some(fy)) = (ev(&f.f1)?, ev(&f.f2)?) else {
                        return Ok(None);
                    };
                    let mut img = vals.clone();
                    img.insert(vars::x(), fx);
                    img.insert(vars::y(), fy);
                    let (Some(l1), Some(l2)) = (x.x1.eval(&img)?, x.x2.eval(&img)?) else {
                        return Ok(None);
                    };
                    let mut jv = [[Scalar::zero(), Scalar::zero()], [Scalar::zero(), Scalar::zero()]];
                    for (i, row) in j.iter().enumerate() {
                        for (k, entry) in row.iter().enumerate() {
                            jv[i][k] = ev(entry)?.ok_or(ArithError::ZeroDenominator)?;
                        }
                    }
                    let (Some(a1), Some(a2)) = (ev(&x.x1)?, ev(&x.x2)?) else {
                        return Ok(None);
                    };
                    let r1 = &(&jv[0][0] * &a1) + &(&jv[0][1] * &a2);
                    let r2 = &(&jv[1][0] * &a1) + &(&jv[1][1] * &a2);
                    Ok(Some([&l1 - &r1, &l2 - &r2]))
                })();
                match point {
                    Ok(Some([d1, d2])) => {
                        tested += 1;
                        if !d1.is_zero() || !d2.is_zero() {
                            return Ok(false);
                        }
                    }
                    Ok(None) | Err(ArithError::ZeroDenominator) | Err(ArithError::DivisionByZero) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            if tested == 0 {
                return Err(DynError::AllPoles(n));
            }
            Ok(true)
        }
    }
}

/// `μ` with `X = μ·(−V_y, V_x)`, computed from both components and
/// cross-checked.
pub fn measure_density(x: &PlanarVectorField, sys: &IntegrableSystem) -> Result<RatFn, DynError> {
    let vx = sys.integral.derivative(&vars::x());
    let vy = sys.integral.derivative(&vars::y());
    let from_1 = if vy.is_zero() {
        None
    } else {
        Some(x.x1.neg().try_div(&vy)?)
    };
    let from_2 = if vx.is_zero() {
        None
    } else {
        Some(x.x2.try_div(&vx)?)
    };
    match (from_1, from_2) {
        (Some(a), Some(b)) if a == b => Ok(a),
        (Some(_), Some(_)) => Err(DynError::InconsistentDensity),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) => Err(DynError::NoGradient),
    }
}

/// `μ ∘ F = det(DF) · μ`.
pub fn verify_measure_identity(mu: &RatFn, f: &RationalMapPlane) -> Result<bool, DynError> {
    Ok(f.pull_back(mu)? == f.jacobian_det().mul(mu))
}

/// `X1·V_x + X2·V_y = 0`.
pub fn is_tangent(x: &PlanarVectorField, v: &RatFn) -> bool {
    let vx = v.derivative(&vars::x());
    let vy = v.derivative(&vars::y());
    x.x1.mul(&vx).add(&x.x2.mul(&vy)).is_zero()
}
