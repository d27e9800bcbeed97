//! Rotation numbers of the fibers, solving for levels with a prescribed
//! rotation number, and the minimal-period bound near the critical level.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{DynError, SystemAnalysis};
use crate::arith::{RatFn, Scalar, Var};
use crate::mobius::{turns, DynamicsClass};
use crate::par::{self, Exec};
use crate::vars;

const UNIT_TOL: f64 = 1e-9;
const BISECTION_TOL: f64 = 1e-12;
const MONOTONE_SAMPLES: usize = 64;

pub(crate) fn float_values(an: &SystemAnalysis, h: Complex64) -> BTreeMap<Var, Complex64> {
    let mut vals: BTreeMap<Var, Complex64> = an
        .sys
        .param_values
        .iter()
        .map(|(v, s)| (v.clone(), s.to_complex()))
        .collect();
    vals.insert(vars::h(), h);
    if let Some(rad) = &an.param.radical {
        if let Some(r) = rad.radicand().eval_complex(&vals) {
            vals.insert(rad.sym().clone(), r.sqrt());
        }
    }
    vals
}

/// Multiplier and fixed points of `M_h` in floating point, on the branch
/// of the exact classification.
#[derive(Clone, Copy, Debug)]
pub(crate) struct FloatMobius {
    pub xi: Complex64,
    pub t0: Complex64,
    pub t1: Complex64,
}

pub(crate) fn float_mobius(an: &SystemAnalysis, h: Complex64) -> Option<FloatMobius> {
    let vals = float_values(an, h);
    let m = &an.mobius;
    let ev = |r: &RatFn| r.eval_complex(&vals).filter(|z| z.is_finite());
    let (a, b, c, d) = (ev(&m.a)?, ev(&m.b)?, ev(&m.c)?, ev(&m.d)?);
    let delta = (d - a) * (d - a) + 4.0 * b * c;
    let mut s = delta.sqrt();
    let real = [a, b, c, d].iter().all(|z| z.im == 0.0);
    if real && delta.re < 0.0 && (s.im > 0.0) == (c.re > 0.0) {
        s = -s;
    }
    let tr = a + d;
    let xi = (tr + s) / (tr - s);
    if c.norm() == 0.0 {
        // affine: t1 = ∞
        return Some(FloatMobius {
            xi: d / a,
            t0: b / (d - a),
            t1: Complex64::new(f64::INFINITY, 0.0),
        });
    }
    Some(FloatMobius {
        xi,
        t0: (a - d + s) / (2.0 * c),
        t1: (a - d - s) / (2.0 * c),
    })
}

/// `P_h(t)` in floating point from the closed-form family.
pub fn float_fiber_point(an: &SystemAnalysis, h: Complex64, t: Complex64) -> Option<(Complex64, Complex64)> {
    let mut vals = float_values(an, h);
    vals.insert(vars::t(), t);
    let x = an.param.p1.eval_complex(&vals)?;
    let y = an.param.p2.eval_complex(&vals)?;
    (x.is_finite() && y.is_finite()).then_some((x, y))
}

/// `θ(h) = arg(ξ(h))/2π` in floating point, from the symbolic `M_h`.
///
/// The square root of `Δ` follows the branch of the exact classification.
pub fn theta_float(an: &SystemAnalysis, h: f64) -> Result<f64, DynError> {
    theta_at(an, Complex64::new(h, 0.0))
}

fn theta_at(an: &SystemAnalysis, h: Complex64) -> Result<f64, DynError> {
    let not_rot = || DynError::NotRotation(h.to_string());
    let fm = float_mobius(an, h).ok_or_else(not_rot)?;
    let xi = fm.xi;
    if !xi.is_finite() || (xi.norm() - 1.0).abs() > UNIT_TOL || (xi - 1.0).norm() < UNIT_TOL {
        return Err(not_rot());
    }
    Ok(turns(xi))
}

/// `(h, θ(h))` over a grid; non-rotation fibers are reported per sample.
pub fn rotation_profile(
    an: &SystemAnalysis,
    grid: &[f64],
    exec: Exec,
) -> Vec<(f64, Result<f64, DynError>)> {
    par::map(exec, grid, |&h| (h, theta_float(an, h)))
}

fn interval(an: &SystemAnalysis) -> Result<(f64, f64), DynError> {
    let (lo, hi) = an.sys.rotation_interval.as_ref().ok_or(DynError::NoInterval)?;
    let lo = an.sys.eval_const(lo)?.ok_or(DynError::NoInterval)?.to_f64();
    let hi = an.sys.eval_const(hi)?.ok_or(DynError::NoInterval)?.to_f64();
    Ok((lo, hi))
}

/// Solves `θ(h) = q/p` on the declared rotation interval by bisection.
///
/// `Ok(None)` when `q/p` lies outside the image of `θ`.
pub fn solve_period_level(an: &SystemAnalysis, q: u32, p: u32) -> Result<Option<f64>, DynError> {
    let target = q as f64 / p as f64;
    let (lo, hi) = interval(an)?;
    let eps = (hi - lo) * 1e-9;
    let (lo, hi) = (lo + eps, hi - eps);
    let step = (hi - lo) / (MONOTONE_SAMPLES - 1) as f64;
    let samples = (0..MONOTONE_SAMPLES)
        .map(|i| theta_float(an, lo + step * i as f64))
        .collect::<Result<Vec<_>, _>>()?;
    let increasing = samples[1] > samples[0];
    let monotone = samples
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
    if !monotone {
        return Err(DynError::NonMonotone);
    }
    let (t_lo, t_hi) = (samples[0], samples[MONOTONE_SAMPLES - 1]);
    if target < t_lo.min(t_hi) || target > t_lo.max(t_hi) {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let th = theta_float(an, mid)?;
        if (th - target).abs() < BISECTION_TOL {
            return Ok(Some(mid));
        }
        if (th < target) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Rotation number `θ_c` of the critical fiber and the bound
/// `p ≥ ⌊1/(1 − θ_c)⌋ + 1` on the minimal period of periodic fibers.
///
/// Computed exactly when the multiplier at the critical level is a root of
/// unity.
pub fn period_bound(an: &SystemAnalysis) -> Result<(f64, u32), DynError> {
    let hc = an.sys.critical_level.as_ref().ok_or(DynError::NoInterval)?;
    let hc: Scalar = an.sys.eval_const(hc)?.ok_or(DynError::NoInterval)?;
    let class = an.mobius_at(&hc)?.classify()?;
    let DynamicsClass::Rotation { theta, order } = class.class else {
        return Err(DynError::NotRotation(hc.to_string()));
    };
    let bound = match order {
        Some(n) => {
            let j = (theta * n as f64).round() as u32;
            n / (n - j) + 1
        }
        None => (1.0 / (1.0 - theta)).floor() as u32 + 1,
    };
    Ok((theta, bound))
}
