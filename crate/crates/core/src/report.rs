//! JSON and CSV serialization of analysis results.
//!
//! Objects have sorted keys, exact scalars are `{"p": "...", "q": "...",
//! "d": n}` for `p + q·√d`, floats carry 17 significant digits and
//! expressions are canonical strings, so equal inputs give byte-identical
//! output.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Number, Value};

use crate::arith::{RatFn, Scalar};
use crate::curves::Parametrization;
use crate::dynamics::{FiberReport, FiberStatus, PlanarPoint, PlanarVectorField};
use crate::mobius::{FixedPoint, Mobius, MobiusClass, Multiplier};
use crate::orbits::Orbit;

/// Digits after the point in exact decimal expansions of orbit points.
pub const CSV_DIGITS: usize = 30;

pub fn scalar(s: &Scalar) -> Value {
    json!({
        "p": s.rational_part().to_string(),
        "q": s.radical_part().to_string(),
        "d": s.radicand(),
    })
}

/// `null` for non-finite values.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(format!("{x:.16e}").parse::<Number>().expect("finite float"))
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": float(z.re), "im": float(z.im) })
}

pub fn expr(r: &RatFn) -> Value {
    Value::String(r.to_string())
}

pub fn fixed_point(fp: &FixedPoint) -> Value {
    match fp {
        FixedPoint::Finite(s) => json!({ "kind": "exact", "value": scalar(s), "text": s.to_string() }),
        FixedPoint::Infinity => json!({ "kind": "infinity" }),
        FixedPoint::Approx(z) => json!({ "kind": "approx", "value": complex(*z) }),
    }
}

pub fn planar_point(p: &PlanarPoint) -> Value {
    match p {
        PlanarPoint::Exact(x, y) => json!({
            "at_infinity": false,
            "kind": "exact",
            "x": scalar(x),
            "y": scalar(y),
            "text": format!("({x}, {y})"),
        }),
        PlanarPoint::AtInfinity(t) => json!({
            "at_infinity": true,
            "kind": "at-infinity",
            "t": fixed_point(t),
        }),
        PlanarPoint::Approx(x, y) => json!({
            "at_infinity": false,
            "kind": "approx",
            "x": complex(*x),
            "y": complex(*y),
        }),
    }
}

fn multiplier(m: &Multiplier) -> Value {
    match m {
        Multiplier::Exact(s) => json!({ "kind": "exact", "value": scalar(s), "text": s.to_string() }),
        Multiplier::Approx(z) => json!({ "kind": "approx", "value": complex(*z) }),
    }
}

pub fn classification(c: &MobiusClass) -> Value {
    json!({
        "class": c.class.name(),
        "delta": scalar(&c.delta),
        "xi": c.xi.as_ref().map_or(Value::Null, multiplier),
        "t0": fixed_point(&c.t0),
        "t1": c.t1.as_ref().map_or(Value::Null, fixed_point),
        "theta": c.theta().map_or(Value::Null, float),
        "order": c.order(),
    })
}

pub fn mobius<K: crate::arith::Field>(m: &Mobius<K>, coeff: impl Fn(&K) -> Value, text: String) -> Value {
    json!({
        "a": coeff(&m.a),
        "b": coeff(&m.b),
        "c": coeff(&m.c),
        "d": coeff(&m.d),
        "map": text,
    })
}

pub fn symbolic_mobius(m: &Mobius<RatFn>) -> Value {
    mobius(m, expr, m.to_ratfn().to_string())
}

pub fn exact_mobius(m: &Mobius<Scalar>) -> Value {
    mobius(m, scalar, m.to_string())
}

pub fn parametrization(p: &Parametrization) -> Value {
    json!({
        "p1": expr(&p.p1),
        "p2": expr(&p.p2),
        "pinv": p.inverse.as_ref().map_or(Value::Null, expr),
        "radical": p.radical.as_ref().map_or(Value::Null, |r| json!({
            "symbol": r.sym().to_string(),
            "radicand": expr(r.radicand()),
        })),
    })
}

pub fn vector_field(x: &PlanarVectorField) -> Value {
    json!({ "x1": expr(&x.x1), "x2": expr(&x.x2) })
}

pub fn fiber(r: &FiberReport) -> Value {
    let detail = match &r.status {
        FiberStatus::Degenerate(s) | FiberStatus::Failed(s) => Value::String(s.clone()),
        _ => Value::Null,
    };
    let verdicts: Map<String, Value> = r
        .verdicts
        .iter()
        .map(|(k, v)| (k.clone(), Value::Bool(*v)))
        .collect();
    json!({
        "h": scalar(&r.h),
        "h_text": r.h.to_string(),
        "status": r.status.name(),
        "status_detail": detail,
        "source": r.source,
        "curve": r.curve.as_ref().map_or(Value::Null, |c| Value::String(c.poly().to_string())),
        "parametrization": r.param.as_ref().map_or(Value::Null, parametrization),
        "mobius": r.mobius.as_ref().map_or(Value::Null, exact_mobius),
        "classification": r.class.as_ref().map_or(Value::Null, classification),
        "class": r.class.as_ref().map_or(Value::Null, |c| Value::String(c.class.name().into())),
        "fixed_points": r.fixed_points.iter().map(planar_point).collect::<Vec<_>>(),
        "theta": r.theta.map_or(Value::Null, float),
        "period": r.class.as_ref().and_then(|c| c.order()),
        "verdicts": verdicts,
        "passed": r.passed(),
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn write(path: &Path, v: &Value) -> io::Result<()> {
    std::fs::write(path, render(v))
}

/// Orbit point coordinates as CSV fields.
pub trait CsvCoord {
    fn header() -> &'static str;
    fn fields(x: &Self, y: &Self) -> String;
}

impl CsvCoord for Scalar {
    fn header() -> &'static str {
        "step,x,y,x_decimal,y_decimal"
    }
    fn fields(x: &Self, y: &Self) -> String {
        let dec = |s: &Scalar| s.to_decimal(CSV_DIGITS).unwrap_or_default();
        format!("{},{},{},{}", quote(&x.to_string()), quote(&y.to_string()), dec(x), dec(y))
    }
}

impl CsvCoord for Complex64 {
    fn header() -> &'static str {
        "step,x,y"
    }
    fn fields(x: &Self, y: &Self) -> String {
        format!("{},{}", complex_text(*x), complex_text(*y))
    }
}

fn quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn complex_text(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.16e}", z.re)
    } else {
        format!("{:.16e}{:+.16e}i", z.re, z.im)
    }
}

pub fn orbit_csv<T: CsvCoord>(orbit: &Orbit<T>) -> String {
    let mut out = String::from(T::header());
    out.push('\n');
    for (k, (x, y)) in orbit.points.iter().enumerate() {
        let _ = writeln!(out, "{k},{}", T::fields(x, y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::OrbitStatus;

    #[test]
    fn scalars_and_floats() {
        let s = Scalar::quadratic(
            num_rational::BigRational::new(1.into(), 2.into()),
            num_rational::BigRational::new((-3).into(), 2.into()),
            5,
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&scalar(&s)).unwrap(),
            r#"{"d":5,"p":"1/2","q":"-3/2"}"#
        );
        assert_eq!(serde_json::to_string(&float(0.1)).unwrap(), "1.0000000000000001e-1");
        assert_eq!(float(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_layout() {
        let orbit = Orbit {
            points: vec![(Scalar::frac(1, 3), Scalar::from_int(2))],
            status: OrbitStatus::Completed,
        };
        let csv = orbit_csv(&orbit);
        assert_eq!(
            csv,
            "step,x,y,x_decimal,y_decimal\n0,1/3,2,0.333333333333333333333333333333,2.000000000000000000000000000000\n"
        );
    }
}
