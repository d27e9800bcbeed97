//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use common::{conserves_integral, e, q, round_trip, shadowing_square, sweep_renderings};
use genus0::arith::{RatFn, Scalar};
use genus0::builtins;
use genus0::curves::{check_proper, conic_base_point, invert_parametrization, parametrize_by_lines};
use genus0::dynamics::{
    analyze_fiber, build_conjugation, extract_mobius, is_tangent, level_candidates, lie_symmetry_field,
    measure_density, period_bound, rotation_profile, solve_period_level,
    suggest_level_correspondence, verify_first_integral, verify_lie_compatibility,
    verify_measure_identity, CheckMode, FiberStatus, PlanarPoint, SystemAnalysis,
};
use genus0::mobius::{DynamicsClass, FixedPoint, Mobius};
use genus0::orbits::{
    compile_map, detect_period, estimate_rotation_number, exact_fiber_period, iterate,
    verify_fiber_prediction,
};
use genus0::par::Exec;
use genus0::vars;
use num_complex::Complex64;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type AttractorCase = (&'static str, Scalar, Box<dyn Fn(&PlanarPoint) -> bool>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn analysis(name: &str) -> SystemAnalysis {
    SystemAnalysis::new(&builtins::by_name(name).unwrap()).unwrap()
}

// Independent displays of the first integrals.
const INTEGRALS: [(&str, &str); 9] = [
    ("br", "(x^2 + y^2 - x - y + a)/(x*y)"),
    ("saito", "y*(1 + x)"),
    ("nostra", "y*(1 + x)"),
    ("pal1", "(1 + b*x + b*y + b^2*x*y)/y"),
    ("pal2", "(1 + b*y + x*y)/(x*y)"),
    ("pal3", "(y + b)/x"),
    ("pal4", "(x + b)/y"),
    ("pal5", "y*(x + b)"),
    ("pal6", "x*(y + b)"),
];

fn c1_first_integrals() -> Outcome {
    for (name, v) in INTEGRALS {
        let sys = builtins::by_name(name).unwrap();
        ensure(sys.integral == e(v), || format!("{name}: integral differs from {v}"))?;
        ensure(verify_first_integral(&sys).map_err(|e| e.to_string())?, || {
            format!("{name}: V ∘ F ≠ V")
        })?;
    }
    Ok("V ∘ F = V symbolically for all nine built-ins".into())
}

const MOBIUS: [(&str, &str); 9] = [
    ("br", "((h + 1)*t - 1)/(t + 1)"),
    ("saito", "h*t/(t + 1)"),
    ("nostra", "h/(t + 1)"),
    ("pal1", "(-b*t - 1)/(b^2*t + b - h)"),
    ("pal2", "1/((h - 1)*t - b)"),
    ("pal3", "h*t - b"),
    ("pal4", "(t + b)/h"),
    ("pal5", "h/(t + b)"),
    ("pal6", "(-b*t + h)/t"),
];

fn c2_mobius_extraction() -> Outcome {
    for (name, m) in MOBIUS {
        let an = analysis(name);
        let expected = Mobius::<RatFn>::from_ratfn(&e(m)).unwrap();
        ensure(an.mobius.proj_eq(&expected), || format!("{name}: M_h = {} ≠ {m}", an.mobius))?;
    }
    Ok("M_h matches all nine displayed Möbius maps projectively".into())
}

fn c3_generated_pipeline() -> Outcome {
    let sys = builtins::br();
    let closed = SystemAnalysis::new(&sys).unwrap();
    let mut details = Vec::new();
    for h in [q(3, 2), q(7, 4), q(3, 1)] {
        let curve = sys.curve_at(&h).map_err(|e| e.to_string())?;
        let (bx, by) = conic_base_point(&curve, &Scalar::one(), false).map_err(|e| e.to_string())?;
        let mut param = parametrize_by_lines(&curve, (&RatFn::constant(bx), &RatFn::constant(by)), None)
            .map_err(|e| e.to_string())?;
        ensure(param.degree() == 2 && check_proper(&param, &curve), || format!("h = {h}: not proper"))?;
        let inv = invert_parametrization(&param, &curve).map_err(|e| e.to_string())?;
        // P⁻¹ ∘ P = t
        let back = genus0::dynamics::RationalMapPlane::substitute(&inv, &param.p1, &param.p2)
            .map_err(|e| e.to_string())?;
        ensure(back == RatFn::var(&vars::t()), || format!("h = {h}: P⁻¹ ∘ P = {back}"))?;

        // inverting the closed-form family reproduces its displayed inverse on the curve
        let mut closed_form = closed.param_at(&h).map_err(|e| e.to_string())?;
        let displayed = closed_form.inverse.take().unwrap();
        let computed = invert_parametrization(&closed_form, &curve).map_err(|e| e.to_string())?;
        let diff = computed.sub(&displayed);
        ensure(curve.vanishes(&diff, None), || format!("h = {h}: inverse differs: {computed} vs {displayed}"))?;

        param.inverse = Some(inv);
        let m = extract_mobius(&sys.map.specialize(&sys.param_values).unwrap(), &param, &curve)
            .map_err(|e| e.to_string())?;
        let m = m.specialize(&BTreeMap::new()).map_err(|e| e.to_string())?;
        let inv_expected = h.try_add(&Scalar::from_int(2)).unwrap();
        ensure(m.conjugacy_invariant() == inv_expected, || {
            format!("h = {h}: invariant {} ≠ h + 2", m.conjugacy_invariant())
        })?;
        details.push(format!("h={h}"));
    }
    Ok(format!("BR a = 1 lines parametrization proper, inverse exact, invariant h + 2 at {}", details.join(", ")))
}

const LIE: [(&str, &str, &str); 8] = [
    ("br", "(x^2 - y^2 + a - x)/y", "(x^2 - y^2 - a + y)/x"),
    ("saito", "-x*(1 + x)*(y - 1)", "x*y*(y - 1)"),
    ("pal1", "-(x - y)*(b*x + 1)/y", "-b*(x - y)*(b*y + 1)"),
    ("pal2", "(x - y)/y", "-(x - y)*(b*y + 1)/x"),
    ("pal3", "x - y", "(x - y)*(b + y)/x"),
    ("pal4", "x - y", "y*(x - y)/(x + b)"),
    ("pal5", "(x - y)*(b + x)", "-y*(x - y)"),
    ("pal6", "x*(x - y)", "-(x - y)*(y + b)"),
];

fn c4_lie_symmetries() -> Outcome {
    for (name, x1, x2) in LIE {
        let an = analysis(name);
        let x = lie_symmetry_field(&an).map_err(|e| e.to_string())?;
        ensure(x.x1 == e(x1) && x.x2 == e(x2), || format!("{name}: X = ({}, {})", x.x1, x.x2))?;
    }
    for sys in builtins::all() {
        let an = SystemAnalysis::new(&sys).unwrap();
        let x = lie_symmetry_field(&an).map_err(|e| e.to_string())?;
        let ok = verify_lie_compatibility(&x, &sys.map, CheckMode::Symbolic).map_err(|e| e.to_string())?;
        ensure(ok && is_tangent(&x, &sys.integral), || format!("{}: X ∘ F ≠ DF·X", sys.name))?;
    }
    Ok("X matches the eight displayed fields; X ∘ F = DF·X for all built-ins".into())
}

fn c5_measures() -> Outcome {
    for (name, mu) in [("br", "x*y"), ("saito", "x*(y - 1)"), ("pal5", "y - x")] {
        let an = analysis(name);
        let x = lie_symmetry_field(&an).map_err(|e| e.to_string())?;
        let got = measure_density(&x, &an.sys).map_err(|e| e.to_string())?;
        ensure(got == e(mu), || format!("{name}: μ = {got}, expected {mu}"))?;
    }
    for sys in builtins::all() {
        let an = SystemAnalysis::new(&sys).unwrap();
        let x = lie_symmetry_field(&an).map_err(|e| e.to_string())?;
        let mu = measure_density(&x, &sys).map_err(|e| e.to_string())?;
        ensure(verify_measure_identity(&mu, &sys.map).map_err(|e| e.to_string())?, || {
            format!("{}: μ ∘ F ≠ det(DF)·μ", sys.name)
        })?;
    }
    Ok("μ = xy, x(y − 1), y − x; μ ∘ F = det(DF)·μ for all built-ins".into())
}

fn closed_form_theta(h: f64) -> f64 {
    let z = Complex64::new(h, -(4.0 - h * h).sqrt()) / 2.0;
    z.arg().rem_euclid(2.0 * PI) / (2.0 * PI)
}

fn c6_classification() -> Outcome {
    let sys = builtins::br();
    let an = SystemAnalysis::new(&sys).unwrap();

    let rep = analyze_fiber(&sys, Some(&an), &q(3, 1));
    let class = rep.class.as_ref().ok_or("h = 3 unclassified")?;
    ensure(class.class == DynamicsClass::Hyperbolic, || format!("h = 3: {:?}", class.class))?;
    let phi_plus = genus0::parse::parse_scalar("3/2 + 1/2*sqrt(5)").unwrap();
    let phi_minus = genus0::parse::parse_scalar("3/2 - 1/2*sqrt(5)").unwrap();
    let mut ts: Vec<Scalar> = Vec::new();
    for p in &rep.fixed_points {
        match p {
            PlanarPoint::AtInfinity(FixedPoint::Finite(t)) => ts.push(t.clone()),
            other => return Err(format!("h = 3: fixed point {other:?} not at infinity")),
        }
    }
    ensure(ts.contains(&phi_plus) && ts.contains(&phi_minus), || format!("h = 3: t = {ts:?}"))?;

    let rep = analyze_fiber(&sys, Some(&an), &q(2, 1));
    let class = rep.class.as_ref().ok_or("h = 2 unclassified")?;
    ensure(
        class.class == DynamicsClass::Parabolic && class.t0 == FixedPoint::Finite(Scalar::one()),
        || format!("h = 2: {:?} at {:?}", class.class, class.t0),
    )?;

    let rep = analyze_fiber(&sys, Some(&an), &q(3, 2));
    let theta = rep.theta.ok_or("h = 3/2 not rotation")?;
    let expected = closed_form_theta(1.5);
    ensure((theta - expected).abs() < 1e-12, || format!("θ(3/2) = {theta}, closed form {expected}"))?;

    let nostra = builtins::nostra();
    let rep = analyze_fiber(&nostra, None, &q(-1, 4));
    let class = rep.class.as_ref().ok_or("nostra h = -1/4 unclassified")?;
    ensure(class.class == DynamicsClass::Parabolic, || format!("nostra: {:?}", class.class))?;
    ensure(rep.fixed_points == vec![PlanarPoint::Exact(q(-1, 2), q(-1, 2))], || {
        format!("nostra fixed point {:?}", rep.fixed_points)
    })?;
    Ok(format!("BR h=3 hyperbolic at ∞ with t = (3±√5)/2, h=2 parabolic at t=1, θ(3/2) = {theta:.12}; nostra parabolic at (-1/2, -1/2)"))
}

fn c7_rotation_cross_check() -> Outcome {
    let an = analysis("br");
    let grid = [1.1, 1.5, 1.9];
    let profile = rotation_profile(&an, &grid, Exec::Sequential);
    let mut worst: f64 = 0.0;
    for (h, th) in profile {
        let th = th.map_err(|e| e.to_string())?;
        let p0 = genus0::dynamics::float_fiber_point(&an, Complex64::new(h, 0.0), Complex64::new(0.37, 0.0))
            .ok_or("no fiber point")?;
        let est = estimate_rotation_number(&an, p0, 10_000).map_err(|e| e.to_string())?;
        let d = (est - th).abs();
        ensure(d < 1e-6, || format!("h = {h}: estimate {est} vs profile {th}"))?;
        worst = worst.max(d);
    }
    Ok(format!("estimates over 10^4 steps agree with θ(h) at h = 1.1, 1.5, 1.9 (max diff {worst:.1e})"))
}

fn c8_periods() -> Outcome {
    let an = analysis("br");
    let h = solve_period_level(&an, 6, 7).map_err(|e| e.to_string())?.ok_or("6/7 not attained")?;
    let expected = 2.0 * (12.0 * PI / 7.0).cos();
    ensure((h - expected).abs() < 1e-9, || format!("h = {h}, expected {expected}"))?;
    let plane = an.sys.map.specialize(&an.sys.param_values).unwrap();
    let map = compile_map::<Complex64>(&plane).map_err(|e| e.to_string())?;
    let p0 = genus0::dynamics::float_fiber_point(&an, Complex64::new(h, 0.0), Complex64::new(0.37, 0.0))
        .ok_or("no fiber point")?;
    let orbit = iterate(&map, p0, 3 * 7 + 1, false).map_err(|e| e.to_string())?;
    let p = detect_period(&orbit, 1e-8);
    ensure(p == Some(7), || format!("float period {p:?}"))?;
    let (theta_a, bound) = period_bound(&an).map_err(|e| e.to_string())?;
    ensure((theta_a - 5.0 / 6.0).abs() < 1e-12 && bound == 7, || format!("θ_a = {theta_a}, bound {bound}"))?;

    let saito = analysis("saito");
    let omega = genus0::parse::parse_scalar("-1/2 + 1/2*sqrt(-3)").unwrap();
    let m = saito.mobius_at(&omega).map_err(|e| e.to_string())?;
    ensure(m.pow(3).is_identity() && !m.is_identity(), || "M_h^3 ≠ id at h = ω".into())?;
    let param = saito.param_at(&omega).map_err(|e| e.to_string())?;
    let p3 = exact_fiber_period(&saito.sys, &param, &q(1, 1), 20).map_err(|e| e.to_string())?;
    ensure(p3 == Some(3), || format!("exact period {p3:?} at h = ω"))?;
    let param = saito.param_at(&q(-1, 1)).map_err(|e| e.to_string())?;
    let p2 = exact_fiber_period(&saito.sys, &param, &q(1, 3), 20).map_err(|e| e.to_string())?;
    ensure(p2 == Some(2), || format!("exact period {p2:?} at h = -1"))?;
    Ok(format!("h(6/7) = {h:.9}, float period 7, bound p ≥ {bound} (θ_a = 5/6); Saito exact periods 3 and 2"))
}

fn c9_conjugations() -> Outcome {
    // Ψ and Ψ⁻¹ as displayed
    let cases = [
        ("pal1", "pal2", ("-(b*y + 1)/b", "-(b*x + 1)/(b*(b*x - b*y + 1))"), ("-(b^2*x*y + 2*b*y + 1)/(b*(b*y + 1))", "-(b*x + 1)/b")),
        ("pal2", "pal5", ("-(b*x + 1)/x", "-(b*y + 1)/y"), ("-1/(x + b)", "-1/(y + b)")),
        ("pal6", "pal5", ("-y - b", "-x*(y + b)/y"), ("-y*(x + b)/x", "-x - b")),
        ("pal3", "pal4", ("b*x/(y - x)", "-b*x*y/((x - y)*(y + b))"), ("b*x*y/((x - y)*(x + b))", "b*y/(x - y)")),
    ];
    for (f, g, psi, psi_inv) in cases {
        let (level, m) = builtins::known_conjugation(f, g).unwrap();
        let m = Mobius::<RatFn>::from_ratfn(&m).unwrap();
        let res = build_conjugation(&analysis(f), &analysis(g), &level, None, &m)
            .map_err(|e| format!("{f} → {g}: {e}"))?;
        ensure(res.psi.f1 == e(psi.0) && res.psi.f2 == e(psi.1), || {
            format!("{f} → {g}: Ψ = ({}, {})", res.psi.f1, res.psi.f2)
        })?;
        ensure(res.psi_inv.f1 == e(psi_inv.0) && res.psi_inv.f2 == e(psi_inv.1), || {
            format!("{f} → {g}: Ψ⁻¹ = ({}, {})", res.psi_inv.f1, res.psi_inv.f2)
        })?;
    }
    let s12 = suggest_level_correspondence(&analysis("pal1"), &analysis("pal2")).map_err(|e| e.to_string())?;
    ensure(s12 == Some(e("-(b^3 - h)/h")), || format!("F1/F2 level {s12:?}"))?;
    let s65 = suggest_level_correspondence(&analysis("pal6"), &analysis("pal5")).map_err(|e| e.to_string())?;
    ensure(s65 == Some(e("h")), || format!("F6/F5 level {s65:?}"))?;
    let l34 = level_candidates(&analysis("pal3"), &analysis("pal4")).map_err(|e| e.to_string())?;
    ensure(l34.contains(&e("h")) && l34.contains(&e("1/h")), || format!("F3/F4 levels {l34:?}"))?;
    let s53 = suggest_level_correspondence(&analysis("pal5"), &analysis("pal3")).map_err(|e| e.to_string())?;
    ensure(s53.is_none(), || format!("F5/F3 level {s53:?}"))?;
    Ok("four conjugations verified symbolically in b; k = f(h) recovered (both roots h, 1/h for F3/F4), none for F5/F3".into())
}

fn c10_attractors() -> Outcome {
    let mut lines = Vec::new();
    let golden = genus0::parse::parse_scalar("-1/2 + 1/2*sqrt(5)").unwrap();
    let half = q(1, 2);
    let saito_h = [q(1, 2), genus0::parse::parse_scalar("1/2*sqrt(-1)").unwrap()];
    let mut cases: Vec<AttractorCase> = vec![
        ("nostra", q(1, 1), Box::new(move |p| matches!(p, PlanarPoint::Exact(x, _) if *x == golden))),
        ("pal3", half, Box::new(|p| *p == PlanarPoint::Exact(q(-2, 1), q(-2, 1)))),
    ];
    for h in saito_h {
        let expected = PlanarPoint::Exact(Scalar::zero(), h.clone());
        cases.push(("saito", h, Box::new(move |p| *p == expected)));
    }
    for (name, h, is_attractor) in cases {
        let sys = builtins::by_name(name).unwrap();
        let an = SystemAnalysis::new(&sys).unwrap();
        let rep = analyze_fiber(&sys, Some(&an), &h);
        ensure(rep.status == FiberStatus::Regular, || format!("{name} h = {h}: {:?}", rep.status))?;
        let attractor = rep.fixed_points.first().ok_or("no fixed points")?;
        ensure(is_attractor(attractor), || format!("{name} h = {h}: attractor {attractor:?}"))?;
        let v = verify_fiber_prediction(&sys, &rep, 20, 11).map_err(|e| e.to_string())?;
        ensure(v.passed && v.trials_run == 20, || format!("{name} h = {h}: {:?}", v.details))?;
        lines.push(format!("{name}@{h}"));
    }
    Ok(format!("20 starts converge within 10^3 steps for {}", lines.join(", ")))
}

fn c11_property_suites() -> Outcome {
    use proptest::test_runner::{TestCaseError, TestError};
    use std::cell::Cell;

    // A runner stops generating once it has run its cases, so each suite
    // gets a fresh one with its own seed.
    let runner = |cases: u32, seed: u8| {
        TestRunner::new_with_rng(
            Config { cases, failure_persistence: None, ..Config::default() },
            TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]),
        )
    };
    fn fail<T: std::fmt::Debug>(e: TestError<T>) -> String {
        e.to_string()
    }
    let starts = || (common::small_rational(), common::small_rational());

    let orbits = Cell::new(0);
    for (i, sys) in builtins::all().into_iter().enumerate() {
        runner(50, i as u8 + 1)
            .run(&starts(), |p0| {
                orbits.set(orbits.get() + 1);
                conserves_integral(&sys, p0, 8).map_err(TestCaseError::fail)
            })
            .map_err(|e| format!("conservation: {}", fail(e)))?;
    }
    ensure(orbits.get() == 450, || format!("{} conservation cases ran", orbits.get()))?;

    let squares = Cell::new(0);
    for (i, sys) in builtins::all().into_iter().enumerate() {
        let an = SystemAnalysis::new(&sys).unwrap();
        runner(50, i as u8 + 101)
            .run(&starts(), |(h, t)| {
                let hit = shadowing_square(&an, &h, &t).map_err(TestCaseError::fail)?;
                squares.set(squares.get() + hit as usize);
                Ok(())
            })
            .map_err(|e| format!("shadowing: {}", fail(e)))?;
    }
    ensure(squares.get() >= 300, || format!("only {} of 450 shadowing squares avoided poles", squares.get()))?;

    let parsed = Cell::new(0);
    runner(500, 201)
        .run(&common::expression(), |src| match round_trip(&src) {
            Some(Err(msg)) => Err(TestCaseError::fail(msg)),
            Some(Ok(())) => {
                parsed.set(parsed.get() + 1);
                Ok(())
            }
            None => Ok(()),
        })
        .map_err(|e| format!("round trip: {}", fail(e)))?;
    ensure(parsed.get() >= 400, || format!("only {} of 500 expressions were well defined", parsed.get()))?;

    let renders = sweep_renderings();
    ensure(renders.windows(2).all(|w| w[0] == w[1]), || "fiber reports differ between runs".into())?;
    Ok(format!(
        "V conserved on 450 exact orbits, {} shadowing squares, {} parser round trips, identical reports across executors",
        squares.get(),
        parsed.get()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("first integrals", c1_first_integrals),
        ("Möbius extraction", c2_mobius_extraction),
        ("generated parametrization pipeline", c3_generated_pipeline),
        ("Lie symmetries", c4_lie_symmetries),
        ("invariant measures", c5_measures),
        ("classification", c6_classification),
        ("rotation cross-check", c7_rotation_cross_check),
        ("periods", c8_periods),
        ("conjugations", c9_conjugations),
        ("attractors", c10_attractors),
        ("property suites", c11_property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS {name} ({secs:.2}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2}s): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
