//! Subcommand implementations. Each returns the JSON report and whether
//! all checks passed.

use std::collections::BTreeMap;
use std::path::Path;

use genus0::arith::{RatFn, Scalar};
use genus0::builtins;
use genus0::dynamics::{
    analyze_fiber, analyze_grid, auto_conjugation, build_conjugation, float_fiber_point,
    is_tangent, lie_symmetry_field, measure_density, period_bound, rotation_profile,
    solve_period_level, suggest_level_correspondence, verify_first_integral,
    verify_lie_compatibility, verify_measure_identity, CheckMode, ConjugationResult, FiberReport,
    FiberStatus, IntegrableSystem, SystemAnalysis,
};
use genus0::mobius::Mobius;
use genus0::orbits::{
    compile_map, detect_period, estimate_rotation_number, iterate, verify_fiber_prediction, Orbit,
};
use genus0::par::{self, Exec};
use genus0::report;
use genus0::vars;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::system::{self, expr_arg, scalar_arg, summary, Loaded};
use crate::{CliError, OutArgs, Outcome, SystemArgs};

const PREDICTION_SEED: u64 = 0x5eed;
/// Parameter of the fiber point used for float orbits.
const SAMPLE_T: f64 = 0.37;

fn failed<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Failed(e.to_string())
}

fn analysis(sys: &IntegrableSystem) -> Result<SystemAnalysis, CliError> {
    SystemAnalysis::new(sys).map_err(failed)
}

fn levels(h: &[String], fallback: &[Scalar]) -> Result<Vec<Scalar>, CliError> {
    if h.is_empty() {
        return Ok(fallback.to_vec());
    }
    h.iter().map(|s| scalar_arg("h", s)).collect()
}

fn prediction(sys: &IntegrableSystem, rep: &FiberReport, trials: usize) -> Option<(Value, bool)> {
    if trials == 0 || rep.status != FiberStatus::Regular || rep.class.is_none() {
        return None;
    }
    Some(match verify_fiber_prediction(sys, rep, trials, PREDICTION_SEED) {
        Ok(v) => (
            json!({ "passed": v.passed, "trials_run": v.trials_run, "details": v.details }),
            v.passed,
        ),
        Err(e) => (json!({ "passed": false, "error": e.to_string() }), false),
    })
}

/// Fiber records with orbit cross-checks; degenerate and identity fibers
/// are reported without failing.
fn fibers(
    sys: &IntegrableSystem,
    an: Option<&SystemAnalysis>,
    grid: &[Scalar],
    trials: usize,
    exec: Exec,
) -> (Vec<Value>, bool) {
    let reports = analyze_grid(sys, an, grid, exec);
    let checked = par::map(exec, &reports, |rep| {
        let mut v = report::fiber(rep);
        let mut ok = match rep.status {
            FiberStatus::Regular => rep.passed(),
            FiberStatus::Degenerate(_) | FiberStatus::Identity => true,
            FiberStatus::Failed(_) => false,
        };
        if let Some((p, pass)) = prediction(sys, rep, trials) {
            v["prediction"] = p;
            ok &= pass;
        }
        v["passed"] = Value::Bool(ok);
        (v, ok)
    });
    let passed = checked.iter().all(|(_, ok)| *ok);
    (checked.into_iter().map(|(v, _)| v).collect(), passed)
}

fn symbolic(an: &SystemAnalysis) -> Value {
    json!({
        "parametrization": report::parametrization(&an.param),
        "mobius": report::symbolic_mobius(&an.mobius),
        "conjugacy_invariant": report::expr(&an.mobius.conjugacy_invariant()),
    })
}

pub fn analyze(args: &SystemArgs, h: &[String], trials: usize, out: &OutArgs) -> Result<Outcome, CliError> {
    let Loaded { sys, grid, .. } = system::load(args)?;
    let grid = levels(h, &grid)?;
    let an = match sys.param {
        Some(_) => Some(analysis(&sys)?),
        None => None,
    };
    let (records, passed) = fibers(&sys, an.as_ref(), &grid, trials, system::exec(out));
    Ok(Outcome {
        report: json!({
            "command": "analyze",
            "system": summary(&sys),
            "symbolic": an.as_ref().map_or(Value::Null, symbolic),
            "fibers": records,
            "passed": passed,
        }),
        passed,
    })
}

/// First integral, inverse, Lie symmetry and measure checks.
fn invariant_checks(sys: &IntegrableSystem) -> Result<(Value, bool), CliError> {
    let an = analysis(sys)?;
    let x = lie_symmetry_field(&an).map_err(failed)?;
    let mu = measure_density(&x, sys).map_err(failed)?;
    let mut checks = BTreeMap::new();
    checks.insert("first_integral", verify_first_integral(sys).map_err(failed)?);
    if let Some(inv) = sys.map.verify_inverse().map_err(failed)? {
        checks.insert("inverse", inv);
    }
    checks.insert(
        "lie_compatible",
        verify_lie_compatibility(&x, &sys.map, CheckMode::Symbolic).map_err(failed)?,
    );
    checks.insert("tangent_to_fibers", is_tangent(&x, &sys.integral));
    checks.insert("measure_identity", verify_measure_identity(&mu, &sys.map).map_err(failed)?);
    let passed = checks.values().all(|v| *v);
    Ok((
        json!({
            "lie_symmetry": report::vector_field(&x),
            "density": report::expr(&mu),
            "mobius": report::symbolic_mobius(&an.mobius),
            "checks": checks,
        }),
        passed,
    ))
}

pub fn symmetry(args: &SystemArgs) -> Result<Outcome, CliError> {
    let Loaded { sys, .. } = system::load(args)?;
    let (mut v, passed) = invariant_checks(&sys)?;
    v["command"] = json!("symmetry");
    v["system"] = summary(&sys);
    v["passed"] = json!(passed);
    Ok(Outcome { report: v, passed })
}

pub fn mobius(args: &SystemArgs, h: &[String], out: &OutArgs) -> Result<Outcome, CliError> {
    let Loaded { sys, grid, .. } = system::load(args)?;
    let grid = levels(h, &grid)?;
    let an = analysis(&sys)?;
    let (records, passed) = fibers(&sys, Some(&an), &grid, 0, system::exec(out));
    Ok(Outcome {
        report: json!({
            "command": "mobius",
            "system": summary(&sys),
            "symbolic": symbolic(&an),
            "lie_symmetry_1d": an.mobius.lie_symmetry_1d().to_string(),
            "fibers": records,
            "passed": passed,
        }),
        passed,
    })
}

pub enum Start {
    Point(String, String),
    Fiber(String, String),
}

fn exact_point(p: &(Scalar, Scalar)) -> Value {
    json!({ "x": report::scalar(&p.0), "y": report::scalar(&p.1), "text": format!("({}, {})", p.0, p.1) })
}

fn float_point(p: &(Complex64, Complex64)) -> Value {
    json!({ "x": report::complex(p.0), "y": report::complex(p.1) })
}

fn orbit_status(v: &mut Value, status: genus0::orbits::OrbitStatus, steps: usize) {
    use genus0::orbits::OrbitStatus::*;
    v["status"] = json!(status.name());
    v["status_step"] = match status {
        DenominatorVanished(k) | Diverged(k) => json!(k),
        PeriodDetected(p) => json!(p),
        Completed => Value::Null,
    };
    v["steps_completed"] = json!(steps);
}

fn write_csv(path: Option<&Path>, text: String) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| CliError::Failed(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

pub fn orbit(
    args: &SystemArgs,
    start: Start,
    steps: usize,
    mode: Option<&str>,
    csv: Option<&Path>,
) -> Result<Outcome, CliError> {
    let Loaded { sys, options, .. } = system::load(args)?;
    let mode = mode.unwrap_or(&options.mode);
    if !["exact", "float"].contains(&mode) {
        return Err(CliError::Usage(format!("--mode must be exact or float, not '{mode}'")));
    }
    let p0 = match start {
        Start::Point(x, y) => (scalar_arg("x", &x)?, scalar_arg("y", &y)?),
        Start::Fiber(h, t) => {
            let (h, t) = (scalar_arg("h", &h)?, scalar_arg("t", &t)?);
            let an = sys.param.as_ref().map(|_| analysis(&sys)).transpose()?;
            let rep = analyze_fiber(&sys, an.as_ref(), &h);
            let param = rep
                .param
                .ok_or_else(|| CliError::Failed(format!("fiber h = {h} is {}", rep.status.name())))?;
            let vals = BTreeMap::from([(vars::t(), t.clone())]);
            let ev = |r: &RatFn| r.eval(&vals).map_err(failed)?.ok_or_else(|| failed(format!("t = {t} is a pole of the parametrization")));
            (ev(&param.p1)?, ev(&param.p2)?)
        }
    };
    let plane = sys.map.specialize(&sys.param_values).map_err(failed)?;
    let integral = sys.integral.eval_partial(&sys.param_values).map_err(failed)?;
    let mut v = json!({ "command": "orbit", "system": summary(&sys) });
    let passed = if mode == "exact" {
        let map = compile_map::<Scalar>(&plane).map_err(failed)?;
        let orbit = iterate(&map, p0.clone(), steps, false).map_err(failed)?;
        let at = |p: &(Scalar, Scalar)| {
            let vals = BTreeMap::from([(vars::x(), p.0.clone()), (vars::y(), p.1.clone())]);
            integral.eval(&vals).ok().flatten()
        };
        let v0 = at(&p0);
        let conserved = orbit.points.iter().all(|p| at(p).is_none_or(|w| Some(w) == v0));
        v["mode"] = json!(orbit.mode());
        v["start"] = exact_point(&p0);
        v["last"] = exact_point(orbit.points.last().expect("nonempty"));
        v["integral"] = v0.as_ref().map_or(Value::Null, report::scalar);
        v["integral_conserved"] = json!(conserved);
        v["period"] = json!(detect_period(&orbit, 0.0));
        orbit_status(&mut v, orbit.status, orbit.points.len() - 1);
        write_csv(csv, report::orbit_csv(&orbit))?;
        conserved
    } else {
        let map = compile_map::<Complex64>(&plane).map_err(failed)?;
        let z0 = (p0.0.to_complex(), p0.1.to_complex());
        let orbit: Orbit<Complex64> = iterate(&map, z0, steps, false).map_err(failed)?;
        let at = |p: &(Complex64, Complex64)| {
            let vals = BTreeMap::from([(vars::x(), p.0), (vars::y(), p.1)]);
            integral.eval_complex(&vals)
        };
        let v0 = at(&z0);
        let dev = v0.map(|w0| {
            orbit
                .points
                .iter()
                .filter_map(|p| at(p).filter(|w| w.is_finite()))
                .map(|w| (w - w0).norm() / (1.0 + w0.norm()))
                .fold(0.0, f64::max)
        });
        v["mode"] = json!("float");
        v["start"] = float_point(&z0);
        v["last"] = float_point(orbit.points.last().expect("nonempty"));
        v["integral"] = v0.map_or(Value::Null, report::complex);
        v["max_integral_deviation"] = dev.map_or(Value::Null, report::float);
        v["period"] = json!(detect_period(&orbit, options.period_tol));
        orbit_status(&mut v, orbit.status, orbit.points.len() - 1);
        write_csv(csv, report::orbit_csv(&orbit))?;
        true
    };
    v["passed"] = json!(passed);
    Ok(Outcome { report: v, passed })
}

fn interval(sys: &IntegrableSystem) -> Option<(f64, f64)> {
    let (lo, hi) = sys.rotation_interval.as_ref()?;
    let lo = sys.eval_const(lo).ok()??.to_f64();
    let hi = sys.eval_const(hi).ok()??.to_f64();
    Some((lo, hi))
}

pub fn rotation(
    args: &SystemArgs,
    h: &[f64],
    from: Option<f64>,
    to: Option<f64>,
    samples: usize,
    estimate: Option<usize>,
    out: &OutArgs,
) -> Result<Outcome, CliError> {
    let Loaded { sys, options, .. } = system::load(args)?;
    let an = analysis(&sys)?;
    let grid: Vec<f64> = if !h.is_empty() {
        h.to_vec()
    } else {
        match (from, to, interval(&sys)) {
            // endpoints included
            (Some(lo), Some(hi), _) => match samples {
                0 => Vec::new(),
                1 => vec![0.5 * (lo + hi)],
                n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
            },
            // midpoints of the declared interval, whose ends are not rotation fibers
            (None, None, Some((lo, hi))) => (0..samples)
                .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / samples as f64)
                .collect(),
            _ => {
                return Err(CliError::Usage(
                    "give --h, or --from and --to (no rotation interval declared)".into(),
                ))
            }
        }
    };
    let exec = system::exec(out);
    let profile = rotation_profile(&an, &grid, exec);
    let rows = par::map(exec, &profile, |(h, th)| {
        let mut row = json!({
            "h": report::float(*h),
            "theta": th.as_ref().map_or(Value::Null, |t| report::float(*t)),
            "note": th.as_ref().err().map(|e| e.to_string()),
        });
        let mut ok = true;
        if let (Some(n), Ok(th)) = (estimate, th) {
            let est = float_fiber_point(&an, Complex64::new(*h, 0.0), Complex64::new(SAMPLE_T, 0.0))
                .ok_or_else(|| "no fiber point".to_string())
                .and_then(|p0| estimate_rotation_number(&an, p0, n).map_err(|e| e.to_string()));
            match est {
                Ok(e) => {
                    let diff = (e - th).abs().min(1.0 - (e - th).abs());
                    ok = diff < options.rotation_tol;
                    row["estimate"] = report::float(e);
                    row["estimate_error"] = report::float(diff);
                }
                Err(e) => {
                    ok = false;
                    row["estimate_failure"] = json!(e);
                }
            }
        }
        (row, ok)
    });
    let passed = rows.iter().all(|(_, ok)| *ok);
    Ok(Outcome {
        report: json!({
            "command": "rotation",
            "system": summary(&sys),
            "profile": rows.into_iter().map(|(r, _)| r).collect::<Vec<_>>(),
            "passed": passed,
        }),
        passed,
    })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn periods(args: &SystemArgs, p: u32, q: u32) -> Result<Outcome, CliError> {
    if p == 0 || q >= p {
        return Err(CliError::Usage("need 0 <= q < p".into()));
    }
    let Loaded { sys, options, .. } = system::load(args)?;
    let an = analysis(&sys)?;
    let level = solve_period_level(&an, q, p).map_err(failed)?;
    let period = p / gcd(p, q);
    let mut v = json!({
        "command": "periods",
        "system": summary(&sys),
        "rotation_number": format!("{q}/{p}"),
        "level": level.map_or(Value::Null, report::float),
    });
    match period_bound(&an) {
        Ok((theta, bound)) => {
            v["critical_theta"] = report::float(theta);
            v["period_bound"] = json!(bound);
            v["period_bound_text"] = json!(format!("p >= {bound}"));
        }
        Err(e) => v["period_bound_note"] = json!(e.to_string()),
    }
    let mut passed = true;
    if let Some(h) = level {
        let plane = sys.map.specialize(&sys.param_values).map_err(failed)?;
        let map = compile_map::<Complex64>(&plane).map_err(failed)?;
        let p0 = float_fiber_point(&an, Complex64::new(h, 0.0), Complex64::new(SAMPLE_T, 0.0))
            .ok_or_else(|| failed("no point on the solved fiber"))?;
        let orbit = iterate(&map, p0, 3 * period as usize + 1, false).map_err(failed)?;
        let found = detect_period(&orbit, options.period_tol);
        passed = found == Some(period as usize);
        v["expected_period"] = json!(period);
        v["detected_period"] = json!(found);
    }
    v["passed"] = json!(passed);
    Ok(Outcome { report: v, passed })
}

fn conjugation_json(c: &ConjugationResult) -> Value {
    json!({
        "level": report::expr(&c.level),
        "level_inverse": report::expr(&c.level_inv),
        "conjugator": report::expr(&c.conjugator.to_ratfn()),
        "psi": [report::expr(&c.psi.f1), report::expr(&c.psi.f2)],
        "psi_inverse": [report::expr(&c.psi_inv.f1), report::expr(&c.psi_inv.f2)],
        "checks": {
            "psi_inverse_psi_identity": true,
            "conjugates_maps": true,
            "fibers_correspond": true,
        },
    })
}

pub fn conjugate(f: &str, g: &str, given: Option<(String, String)>) -> Result<Outcome, CliError> {
    let fl = system::load_named(f, &None, &None)?;
    let gl = system::load_named(g, &None, &None)?;
    let fa = analysis(&fl.sys)?;
    let ga = analysis(&gl.sys)?;
    let suggested = suggest_level_correspondence(&fa, &ga).map_err(failed)?;
    let mut v = json!({
        "command": "conjugate",
        "f": summary(&fl.sys),
        "g": summary(&gl.sys),
        "suggested_level": suggested.as_ref().map_or(Value::Null, report::expr),
    });
    let result = match given {
        Some((level, m)) => {
            let names: Vec<String> = fl.sys.params.iter().chain(&gl.sys.params).map(|p| p.to_string()).collect();
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            let level = expr_arg("level", &level, &names)?;
            let m = expr_arg("m", &m, &names)?;
            let m = Mobius::<RatFn>::from_ratfn(&m)
                .map_err(|e| CliError::Usage(format!("--m is not a Möbius map in t: {e}")))?;
            build_conjugation(&fa, &ga, &level, None, &m).map_err(|e| e.to_string())
        }
        None => match auto_conjugation(&fa, &ga).map_err(failed)? {
            Some(c) => Ok(c),
            None => Err("no conjugation found".to_string()),
        },
    };
    let passed = match result {
        Ok(c) => {
            v["conjugation"] = conjugation_json(&c);
            true
        }
        Err(e) => {
            v["conjugation"] = Value::Null;
            v["failure"] = json!(e);
            false
        }
    };
    v["passed"] = json!(passed);
    Ok(Outcome { report: v, passed })
}

/// Representative fibers of each built-in at its default parameters.
fn sample_levels(name: &str) -> Vec<Scalar> {
    let s = |src: &str| genus0::parse::parse_scalar(src).expect("sample level");
    let list: &[&str] = match name {
        "br" => &["3", "2", "3/2"],
        "saito" => &["-1", "1/2", "1/2 + 1/2*sqrt(-3)"],
        "nostra" => &["1", "-1/4"],
        _ => &["1/2", "3"],
    };
    list.iter().map(|h| s(h)).collect()
}

pub fn verify(builtin: Option<&str>, trials: usize, out: &OutArgs) -> Result<Outcome, CliError> {
    let systems: Vec<IntegrableSystem> = match builtin {
        Some(n) => vec![builtins::by_name(n).ok_or_else(|| CliError::Usage(format!("unknown built-in '{n}'")))?],
        None => builtins::all(),
    };
    let exec = system::exec(out);
    let results = par::map(exec, &systems, |sys| -> Result<(Value, bool), CliError> {
        let (mut v, inv_ok) = invariant_checks(sys)?;
        let an = analysis(sys)?;
        let (records, fib_ok) = fibers(sys, Some(&an), &sample_levels(&sys.name), trials, Exec::Sequential);
        v["name"] = json!(sys.name);
        v["fibers"] = json!(records);
        v["passed"] = json!(inv_ok && fib_ok);
        Ok((v, inv_ok && fib_ok))
    });
    let mut systems_json = Vec::new();
    let mut passed = true;
    for r in results {
        let (v, ok) = r?;
        systems_json.push(v);
        passed &= ok;
    }
    Ok(Outcome {
        report: json!({ "command": "verify", "systems": systems_json, "passed": passed }),
        passed,
    })
}
