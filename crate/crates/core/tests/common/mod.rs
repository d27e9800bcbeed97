//! Shared strategies and checks for the integration tests and the
//! acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeMap;

use genus0::arith::{ArithError, RatFn, Scalar};
use genus0::builtins;
use genus0::dynamics::{analyze_grid, IntegrableSystem, SystemAnalysis};
use genus0::eval::CompiledMap;
use genus0::orbits::{compile_map, iterate};
use genus0::par::Exec;
use genus0::parse::parse_expression;
use genus0::report;
use genus0::vars;
use proptest::prelude::*;

pub fn e(src: &str) -> RatFn {
    parse_expression(src, &["a", "b"]).unwrap_or_else(|err| panic!("{src}: {err}"))
}

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::frac(n, d)
}

pub fn small_rational() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Scalar::frac(n, d))
}

/// Random arithmetic expression text over `x, y, t, h, a`.
pub fn expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        Just("t".to_string()),
        Just("h".to_string()),
        Just("a".to_string()),
        (0i64..20).prop_map(|n| n.to_string()),
        (1i64..9, 2i64..9).prop_map(|(n, d)| format!("{n}/{d}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l}) + ({r})")),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l}) - ({r})")),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("{l}*({r})")),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l})/({r})")),
            (inner.clone(), 0u32..4).prop_map(|(l, k)| format!("({l})^{k}")),
            inner.prop_map(|l| format!("-({l})")),
        ]
    })
}

/// `parse(print(parse(s))) == parse(s)` with identical text; `None` when `s`
/// divides by the zero polynomial.
pub fn round_trip(src: &str) -> Option<Result<(), String>> {
    let r = parse_expression(src, &["a"]).ok()?;
    let text = r.to_string();
    Some(match parse_expression(&text, &["a"]) {
        Ok(back) if back == r && back.to_string() == text => Ok(()),
        Ok(back) => Err(format!("{src} -> {text} -> {back}")),
        Err(err) => Err(format!("{src} -> {text}: {err}")),
    })
}

pub fn exact_map(sys: &IntegrableSystem) -> CompiledMap<Scalar> {
    compile_map(&sys.map.specialize(&sys.param_values).unwrap()).unwrap()
}

fn integral_at(v: &RatFn, p: &(Scalar, Scalar)) -> Option<Scalar> {
    let vals = BTreeMap::from([(vars::x(), p.0.clone()), (vars::y(), p.1.clone())]);
    v.eval(&vals).ok().flatten()
}

/// `V(Fⁿ(p0)) = V(p0)` exactly along an orbit of `steps` steps.
pub fn conserves_integral(sys: &IntegrableSystem, p0: (Scalar, Scalar), steps: usize) -> Result<(), String> {
    let v = sys.integral.eval_partial(&sys.param_values).unwrap();
    let Some(v0) = integral_at(&v, &p0) else {
        return Ok(());
    };
    let orbit = iterate(&exact_map(sys), p0.clone(), steps, false).map_err(|e| e.to_string())?;
    for (k, p) in orbit.points.iter().enumerate() {
        if let Some(vk) = integral_at(&v, p) {
            if vk != v0 {
                return Err(format!("{}: V changed at step {k} from {p0:?}", sys.name));
            }
        }
    }
    Ok(())
}

/// Exact value, `None` at a pole or an unassigned variable.
fn value_at(r: &RatFn, vals: &BTreeMap<genus0::arith::Var, Scalar>) -> Result<Option<Scalar>, String> {
    match r.eval(vals) {
        Err(ArithError::ZeroDenominator) => Ok(None),
        other => other.map_err(|e| e.to_string()),
    }
}

/// `P_h⁻¹(F(P_h(t))) = M_h(t)` exactly; `Ok(false)` when a pole is hit.
pub fn shadowing_square(an: &SystemAnalysis, h: &Scalar, t: &Scalar) -> Result<bool, String> {
    let (Ok(param), Ok(m)) = (an.param_at(h), an.mobius_at(h)) else {
        return Ok(false);
    };
    let tv = BTreeMap::from([(vars::t(), t.clone())]);
    let (Some(x), Some(y)) = (value_at(&param.p1, &tv)?, value_at(&param.p2, &tv)?) else {
        return Ok(false);
    };
    let next = match exact_map(&an.sys).apply(&(x, y)) {
        Ok(Some(p)) => p,
        Ok(None) | Err(ArithError::ZeroDenominator) => return Ok(false),
        Err(e) => return Err(e.to_string()),
    };
    let pinv = param.inverse.as_ref().ok_or("no inverse")?;
    let pv = BTreeMap::from([(vars::x(), next.0), (vars::y(), next.1)]);
    let Some(lhs) = value_at(pinv, &pv)? else {
        return Ok(false);
    };
    let Some(rhs) = m.apply(t) else {
        return Ok(false);
    };
    if lhs != rhs {
        return Err(format!("{} h = {h}, t = {t}: {lhs} vs {rhs}", an.sys.name));
    }
    Ok(true)
}

/// JSON of a BR fiber sweep under both execution strategies, rendered.
pub fn sweep_renderings() -> Vec<String> {
    let sys = builtins::br();
    let an = SystemAnalysis::new(&sys).unwrap();
    let grid: Vec<Scalar> = ["3", "2", "3/2", "7/4", "5/4", "1"]
        .iter()
        .map(|s| genus0::parse::parse_scalar(s).unwrap())
        .collect();
    [Exec::Parallel, Exec::Sequential, Exec::Parallel]
        .iter()
        .map(|&exec| {
            let fibers: Vec<_> = analyze_grid(&sys, Some(&an), &grid, exec)
                .iter()
                .map(report::fiber)
                .collect();
            report::render(&serde_json::Value::Array(fibers))
        })
        .collect()
}
