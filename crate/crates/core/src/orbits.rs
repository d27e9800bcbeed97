//! Orbit iteration in exact or floating arithmetic, period detection,
//! rotation-number estimation and checks of fiber predictions.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{ArithError, RatFn, Scalar};
use crate::curves::Parametrization;
use crate::dynamics::{
    float_mobius, DynError, FiberReport, IntegrableSystem, PlanarPoint, RationalMapPlane,
    SystemAnalysis,
};
use crate::eval::{Compiled, CompiledMap, Coord, EvalOutcome};
use crate::mobius::{DynamicsClass, FixedPoint, ROOT_OF_UNITY_CAP};
use crate::vars;

/// Float orbits stop once a coordinate exceeds this modulus.
pub const DIVERGENCE_BOUND: f64 = 1e12;
pub const PERIOD_TOL: f64 = 1e-8;
pub const ROTATION_TOL: f64 = 1e-6;
/// Steps allowed for convergence to an attractor.
pub const CONVERGENCE_STEPS: usize = 1000;
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Parabolic convergence is algebraic (`~1/n`), so a looser bound applies.
pub const PARABOLIC_TOL: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("the map has parameters without values or is not rational in x, y")]
    NotCompilable,
    #[error("the starting point is a pole of the map")]
    StartOnPole,
    #[error("orbit left the good set at step {0}")]
    LeftGoodSet(usize),
    #[error("fiber is not of rotation type")]
    NotRotation,
    #[error("the fiber report is incomplete: {0}")]
    IncompleteReport(String),
    #[error(transparent)]
    Dyn(#[from] DynError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitStatus {
    Completed,
    /// A denominator of the map vanished at this step.
    DenominatorVanished(usize),
    Diverged(usize),
    /// Exact return to the start after this many steps (confirmed at twice
    /// the period).
    PeriodDetected(usize),
}

impl OrbitStatus {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitStatus::Completed => "completed",
            OrbitStatus::DenominatorVanished(_) => "denominator-vanished",
            OrbitStatus::Diverged(_) => "diverged",
            OrbitStatus::PeriodDetected(_) => "period-detected",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Orbit<T> {
    pub points: Vec<(T, T)>,
    pub status: OrbitStatus,
}

impl Orbit<Scalar> {
    /// `"exact-rational"` or `"exact-quadratic"`.
    pub fn mode(&self) -> &'static str {
        if self.points.iter().all(|(x, y)| x.is_rational() && y.is_rational()) {
            "exact-rational"
        } else {
            "exact-quadratic"
        }
    }
}

impl Orbit<Complex64> {
    pub fn mode(&self) -> &'static str {
        "float"
    }
}

/// The map with declared parameter values substituted, compiled.
pub fn compile_map<T: Coord>(map: &RationalMapPlane) -> Result<CompiledMap<T>, OrbitError> {
    CompiledMap::new(&map.f1, &map.f2).ok_or(OrbitError::NotCompilable)
}

fn too_large(z: &Complex64) -> bool {
    !z.is_finite() || z.norm() > DIVERGENCE_BOUND
}

/// Applies the map up to `n` times.
///
/// With `stop_on_return`, an exact orbit stops once it has returned to its
/// start twice at the same period.
pub fn iterate<T: Coord>(
    map: &CompiledMap<T>,
    p0: (T, T),
    n: usize,
    stop_on_return: bool,
) -> Result<Orbit<T>, ArithError> {
    let mut points = vec![p0.clone()];
    let mut status = OrbitStatus::Completed;
    let mut first_return = None;
    for k in 0..n {
        let cur = points.last().expect("nonempty");
        let Some(next) = map.apply(cur)? else {
            status = OrbitStatus::DenominatorVanished(k);
            break;
        };
        if !T::EXACT && (too_large(&next.0.to_complex()) || too_large(&next.1.to_complex())) {
            points.push(next);
            status = OrbitStatus::Diverged(k + 1);
            break;
        }
        let back = T::EXACT && next == p0;
        points.push(next);
        if stop_on_return && back {
            match first_return {
                None => first_return = Some(k + 1),
                Some(p) if k + 1 == 2 * p => {
                    status = OrbitStatus::PeriodDetected(p);
                    break;
                }
                Some(_) => {}
            }
        }
    }
    Ok(Orbit { points, status })
}

fn dist(a: &(Complex64, Complex64), b: &(Complex64, Complex64)) -> f64 {
    (a.0 - b.0).norm().max((a.1 - b.1).norm())
}

/// Smallest period visible in the orbit.
///
/// Exact orbits need an exact return at `p` and `2p`; float orbits a return
/// within `tol` (max-norm) at `p`, `2p` and `3p`.
pub fn detect_period<T: Coord>(orbit: &Orbit<T>, tol: f64) -> Option<usize> {
    let pts = &orbit.points;
    let p0 = &pts[0];
    if T::EXACT {
        (1..pts.len())
            .filter(|p| 2 * p < pts.len())
            .find(|&p| pts[p] == *p0 && pts[2 * p] == *p0)
    } else {
        let c = |q: &(T, T)| (q.0.to_complex(), q.1.to_complex());
        let z0 = c(p0);
        (1..pts.len())
            .filter(|p| 3 * p < pts.len())
            .find(|&p| (1..=3).all(|k| dist(&c(&pts[k * p]), &z0) < tol))
    }
}

/// Data to move between the plane and the Möbius coordinate of one fiber
/// in floating point.
struct FloatFiber {
    pinv: RatFn,
    vals: BTreeMap<crate::arith::Var, Complex64>,
    t0: Complex64,
    t1: Complex64,
}

impl FloatFiber {
    fn new(an: &SystemAnalysis, h: Complex64) -> Result<Self, OrbitError> {
        let fm = float_mobius(an, h).ok_or(OrbitError::NotRotation)?;
        let pinv = an.param.inverse.clone().ok_or(DynError::NoParametrization)?;
        Ok(FloatFiber {
            pinv,
            vals: crate::dynamics::float_values(an, h),
            t0: fm.t0,
            t1: fm.t1,
        })
    }

    fn t_of(&self, p: &(Complex64, Complex64)) -> Option<Complex64> {
        let mut vals = self.vals.clone();
        vals.insert(vars::x(), p.0);
        vals.insert(vars::y(), p.1);
        self.pinv.eval_complex(&vals).filter(|z| z.is_finite())
    }

    /// `w = (t − t1)/(t − t0)`, multiplied by `ξ` at each step.
    fn w_of(&self, t: Complex64) -> Complex64 {
        if self.t1.is_finite() {
            (t - self.t1) / (t - self.t0)
        } else {
            1.0 / (t - self.t0)
        }
    }
}

fn integral_at(sys: &IntegrableSystem, p: &(Complex64, Complex64)) -> Option<Complex64> {
    let mut vals: BTreeMap<_, _> = sys
        .param_values
        .iter()
        .map(|(v, s)| (v.clone(), s.to_complex()))
        .collect();
    vals.insert(vars::x(), p.0);
    vals.insert(vars::y(), p.1);
    sys.integral.eval_complex(&vals)
}

/// Average rotation, in turns in `[0, 1)`, of the Möbius coordinate
/// `w = (t − t1)/(t − t0)` along `n` float steps from `p0`.
pub fn estimate_rotation_number(
    an: &SystemAnalysis,
    p0: (Complex64, Complex64),
    n: usize,
) -> Result<f64, OrbitError> {
    let h = integral_at(&an.sys, &p0).ok_or(OrbitError::StartOnPole)?;
    let fib = FloatFiber::new(an, h)?;
    let xi = float_mobius(an, h).ok_or(OrbitError::NotRotation)?.xi;
    if (xi.norm() - 1.0).abs() > 1e-9 {
        return Err(OrbitError::NotRotation);
    }
    let map = compile_map::<Complex64>(&an.sys.map.specialize(&an.sys.param_values)?)?;
    let mut p = p0;
    let mut w = fib.w_of(fib.t_of(&p).ok_or(OrbitError::LeftGoodSet(0))?);
    let mut total = 0.0;
    for k in 0..n {
        p = map.apply(&p)?.ok_or(OrbitError::LeftGoodSet(k))?;
        let w_next = fib.w_of(fib.t_of(&p).ok_or(OrbitError::LeftGoodSet(k + 1))?);
        total += (w_next / w).arg();
        w = w_next;
    }
    let mut th = total / (n as f64 * 2.0 * std::f64::consts::PI);
    th -= th.floor();
    if th >= 1.0 {
        th -= 1.0;
    }
    Ok(th)
}

/// Outcome of [`verify_fiber_prediction`].
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub passed: bool,
    pub trials_run: usize,
    pub details: Vec<String>,
}

fn random_fiber_point(
    param: &Parametrization,
    rng: &mut ChaCha8Rng,
) -> Option<(Complex64, Complex64)> {
    let t = Complex64::new(rng.gen_range(-3.0..3.0), 0.0);
    let vals = BTreeMap::from([(vars::t(), t)]);
    let x = param.p1.eval_complex(&vals)?;
    let y = param.p2.eval_complex(&vals)?;
    (x.is_finite() && y.is_finite() && x.norm() < 1e6 && y.norm() < 1e6).then_some((x, y))
}

enum Target {
    Point((Complex64, Complex64)),
    /// Approached in the Möbius coordinate; `None` is `t = ∞`.
    Parameter(Option<Complex64>),
}

fn target_of(pt: &PlanarPoint, fp: &FixedPoint) -> Target {
    match pt.to_complex() {
        Some(z) => Target::Point(z),
        None => Target::Parameter(fp.to_complex()),
    }
}

fn fixed_point_by_index(report: &FiberReport, i: usize) -> Option<(PlanarPoint, FixedPoint)> {
    let class = report.class.as_ref()?;
    let fp = if i == 0 { Some(class.t0.clone()) } else { class.t1.clone() }?;
    Some((report.fixed_points.get(i)?.clone(), fp))
}

/// Distance of the final orbit point to the target (0 when an orbit
/// heading to a point at infinity diverged).
fn final_distance(
    orbit: &Orbit<Complex64>,
    target: &Target,
    pinv: Option<&Compiled<Complex64>>,
) -> Option<f64> {
    let last = orbit.points.last()?;
    match target {
        Target::Point(z) => match orbit.status {
            OrbitStatus::Diverged(_) | OrbitStatus::DenominatorVanished(_) => None,
            _ => Some(dist(last, z)),
        },
        Target::Parameter(t) => {
            if let OrbitStatus::Diverged(_) = orbit.status {
                return Some(0.0);
            }
            let tv = match pinv?.eval(&last.0, &last.1).ok()? {
                EvalOutcome::Value(v) => v,
                EvalOutcome::Pole => return Some(if t.is_none() { 0.0 } else { f64::INFINITY }),
            };
            Some(match t {
                Some(t) => (tv - t).norm(),
                None => 1.0 / tv.norm(),
            })
        }
    }
}

/// Checks the dynamics predicted by a fiber report against float orbits
/// from `trials` random points of the fiber.
///
/// Hyperbolic fibers: forward orbits converge to the attractor within
/// [`CONVERGENCE_STEPS`] and, when the inverse map is known, backward orbits
/// to the repeller. Parabolic: convergence to the fixed point. Rotation:
/// the detected period agrees with the order of `ξ` (none below the cap
/// when `ξ` is not a root of unity).
pub fn verify_fiber_prediction(
    sys: &IntegrableSystem,
    report: &FiberReport,
    trials: usize,
    seed: u64,
) -> Result<Verdict, OrbitError> {
    let class = report
        .class
        .as_ref()
        .ok_or_else(|| OrbitError::IncompleteReport(report.status.name().into()))?;
    let param = report
        .param
        .as_ref()
        .ok_or_else(|| OrbitError::IncompleteReport("no parametrization".into()))?;
    let plane = sys.map.specialize(&sys.param_values)?;
    let fwd = compile_map::<Complex64>(&plane)?;
    let bwd = match plane.inverse_map() {
        Some(inv) => Some(compile_map::<Complex64>(&inv)?),
        None => None,
    };
    let pinv = param.inverse.as_ref().and_then(Compiled::<Complex64>::new);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut details = Vec::new();
    let mut passed = true;
    let mut run = 0;
    for trial in 0..trials * 4 {
        if run == trials {
            break;
        }
        let Some(p0) = random_fiber_point(param, &mut rng) else {
            continue;
        };
        let ok = match &class.class {
            DynamicsClass::Hyperbolic | DynamicsClass::Parabolic => {
                let parabolic = class.class == DynamicsClass::Parabolic;
                let (pt, fp) = fixed_point_by_index(report, 0)
                    .ok_or_else(|| OrbitError::IncompleteReport("fixed points".into()))?;
                let orbit = iterate(&fwd, p0, CONVERGENCE_STEPS, false)?;
                if matches!(orbit.status, OrbitStatus::DenominatorVanished(_)) {
                    continue;
                }
                let tol = if parabolic { PARABOLIC_TOL } else { CONVERGENCE_TOL };
                let d = final_distance(&orbit, &target_of(&pt, &fp), pinv.as_ref());
                let mut ok = d.is_some_and(|d| d < tol);
                if !ok {
                    details.push(format!("trial {trial}: forward distance {d:?} to attractor"));
                }
                if let (false, Some(bwd), Some((rp, rfp))) = (parabolic, &bwd, fixed_point_by_index(report, 1)) {
                    let orbit = iterate(bwd, p0, CONVERGENCE_STEPS, false)?;
                    if !matches!(orbit.status, OrbitStatus::DenominatorVanished(_)) {
                        let d = final_distance(&orbit, &target_of(&rp, &rfp), pinv.as_ref());
                        if !d.is_some_and(|d| d < CONVERGENCE_TOL) {
                            details.push(format!("trial {trial}: backward distance {d:?} to repeller"));
                            ok = false;
                        }
                    }
                }
                ok
            }
            DynamicsClass::Rotation { order, .. } => {
                let cap = ROOT_OF_UNITY_CAP as usize;
                let orbit = iterate(&fwd, p0, 3 * cap + 1, false)?;
                if orbit.status != OrbitStatus::Completed {
                    continue;
                }
                let found = detect_period(&orbit, PERIOD_TOL);
                let ok = found == order.map(|o| o as usize);
                if !ok {
                    details.push(format!("trial {trial}: period {found:?}, predicted {order:?}"));
                }
                ok
            }
        };
        run += 1;
        passed &= ok;
    }
    if run == 0 {
        return Err(OrbitError::LeftGoodSet(0));
    }
    Ok(Verdict {
        passed,
        trials_run: run,
        details,
    })
}

/// Exact period of the fiber through `P_h(t)` for a rational `t`.
pub fn exact_fiber_period(
    sys: &IntegrableSystem,
    param: &Parametrization,
    t: &Scalar,
    max_steps: usize,
) -> Result<Option<usize>, OrbitError> {
    let vals = BTreeMap::from([(vars::t(), t.clone())]);
    let x = param.p1.eval(&vals)?.ok_or(OrbitError::StartOnPole)?;
    let y = param.p2.eval(&vals)?.ok_or(OrbitError::StartOnPole)?;
    let map = compile_map::<Scalar>(&sys.map.specialize(&sys.param_values)?)?;
    let orbit = iterate(&map, (x, y), max_steps, true)?;
    Ok(match orbit.status {
        OrbitStatus::PeriodDetected(p) => Some(p),
        _ => detect_period(&orbit, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::dynamics::analyze_fiber;

    fn exact_map(sys: &IntegrableSystem) -> CompiledMap<Scalar> {
        compile_map(&sys.map.specialize(&sys.param_values).unwrap()).unwrap()
    }

    #[test]
    fn saito_collapses_to_origin() {
        let map = exact_map(&builtins::saito());
        let o = iterate(&map, (Scalar::frac(3, 7), Scalar::zero()), 3, false).unwrap();
        assert!(o.points[1..].iter().all(|p| *p == (Scalar::zero(), Scalar::zero())));
        let o = iterate(&map, (Scalar::from_int(-1), Scalar::frac(2, 5)), 2, false).unwrap();
        assert_eq!(o.points[2], (Scalar::zero(), Scalar::zero()));
        assert_eq!(detect_period(&o, 0.0), None);
    }

    #[test]
    fn nostra_pole_at_start() {
        let map = exact_map(&builtins::nostra());
        let o = iterate(&map, (Scalar::from_int(2), Scalar::from_int(-1)), 5, false).unwrap();
        assert_eq!(o.status, OrbitStatus::DenominatorVanished(0));
    }

    #[test]
    fn br_fixed_point_has_period_one() {
        let map = exact_map(&builtins::br());
        let o = iterate(&map, (Scalar::one(), Scalar::one()), 4, false).unwrap();
        assert_eq!(detect_period(&o, 0.0), Some(1));
    }

    #[test]
    fn saito_rotation_at_i() {
        let an = SystemAnalysis::new(&builtins::saito()).unwrap();
        let i = Complex64::new(0.0, 1.0);
        // (x, i/(1 + x)) lies on y(1 + x) = i
        let p0 = (Complex64::new(0.3, 0.0), i / 1.3);
        let th = estimate_rotation_number(&an, p0, 100).unwrap();
        assert!((th - 0.75).abs() < 1e-9);
    }

    #[test]
    fn nostra_attractor() {
        let sys = builtins::nostra();
        let an = SystemAnalysis::new(&sys).unwrap();
        let rep = analyze_fiber(&sys, Some(&an), &Scalar::one());
        let v = verify_fiber_prediction(&sys, &rep, 20, 7).unwrap();
        assert!(v.passed, "{:?}", v.details);
        assert_eq!(v.trials_run, 20);
    }
}
