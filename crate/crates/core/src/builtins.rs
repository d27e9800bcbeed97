//! Built-in integrable maps: the Bastien–Rogalski family, the Saito–Saitoh
//! map, the map of the difference equation `u_{n+2} = u_{n+1}(1+u_n)/(1+u_{n+1})`
//! and the six maps pal1 … pal6 of third-order-type recurrences.

use std::collections::BTreeMap;

use crate::arith::{Radical, RatFn, Scalar, Var};
use crate::curves::Parametrization;
use crate::dynamics::{IntegrableSystem, RationalMapPlane};
use crate::parse::parse_expression;
use crate::vars;

pub const NAMES: [&str; 9] = [
    "br", "saito", "nostra", "pal1", "pal2", "pal3", "pal4", "pal5", "pal6",
];

fn e(src: &str) -> RatFn {
    parse_expression(src, &["a", "b", "delta"]).expect("built-in expression")
}

fn system(
    name: &str,
    f: (&str, &str),
    finv: (&str, &str),
    v: &str,
    p: (&str, &str),
    pinv: &str,
) -> IntegrableSystem {
    let map = RationalMapPlane::new(e(f.0), e(f.1)).with_inverse(e(finv.0), e(finv.1));
    let mut sys = IntegrableSystem::new(name, map, e(v));
    sys.param = Some(Parametrization::new(e(p.0), e(p.1)).with_inverse(e(pinv)));
    sys
}

fn with_param(mut sys: IntegrableSystem, name: &str, value: i64) -> IntegrableSystem {
    let v = Var::new(name);
    sys.params = vec![v.clone()];
    sys.param_values = BTreeMap::from([(v, Scalar::from_int(value))]);
    sys
}

/// `F(x, y) = (y, (a − y + y²)/x)`, `V = (x² + y² − x − y + a)/(xy)`.
pub fn br() -> IntegrableSystem {
    let mut sys = system(
        "br",
        ("y", "(a - y + y^2)/x"),
        ("(a - x + x^2)/y", "x"),
        "(x^2 + y^2 - x - y + a)/(x*y)",
        (
            "(2*delta*t - a*h^2 - (1 + delta)*h - 2 + 4*a)/(2*(-t^2 + h*t - 1)) + a",
            "((-a*h + delta - 1)*t^2 + (4*a - 2)*t - a*h - delta - 1)/(2*(-t^2 + h*t - 1))",
        ),
        "(-2*delta*x + (a*h^2 + (delta + 1)*h - 4*a + 2)*y - a*h + 2*a + delta - 1)\
         /((a*h^2 + (1 - delta)*h - 4*a + 2)*x + 2*delta*y + a*h - 2*a - delta + 1)",
    );
    let param = sys.param.take().expect("set above");
    sys.param = Some(param.with_radical(Radical::new(vars::delta(), e("(a*h + 1)^2 - 4*a^2"))));
    sys.base_x0 = Some(e("a"));
    sys.critical_level = Some(e("2 - 1/a"));
    sys.rotation_interval = Some((e("2 - 1/a"), e("2")));
    sys.admissible = "h > 2 - 1/a on the positive quadrant".into();
    with_param(sys, "a", 1)
}

/// The point of the BR fiber used for parametrization by lines:
/// `(a, (ah + 1 + δ)/2)`.
pub fn br_base_point() -> (RatFn, RatFn) {
    (e("a"), e("(a*h + 1 + delta)/2"))
}

/// `F(x, y) = (xy, y(1 + x)/(1 + xy))`, `V = y(1 + x)`.
pub fn saito() -> IntegrableSystem {
    let mut sys = system(
        "saito",
        ("x*y", "y*(1 + x)/(1 + x*y)"),
        ("x/(y + x*y - x)", "y + x*y - x"),
        "y*(1 + x)",
        ("t", "h/(t + 1)"),
        "x",
    );
    sys.admissible = "h in C; h = 0 is a union of lines".into();
    sys
}

/// `F(x, y) = (y, y(1 + x)/(1 + y))`, `V = y(1 + x)`.
pub fn nostra() -> IntegrableSystem {
    let mut sys = system(
        "nostra",
        ("y", "y*(1 + x)/(1 + y)"),
        ("(y*(1 + x) - x)/x", "x"),
        "y*(1 + x)",
        ("t", "h/(t + 1)"),
        "x",
    );
    sys.admissible = "h > -1/4: hyperbolic; h = -1/4: parabolic".into();
    sys
}

pub fn pal1() -> IntegrableSystem {
    with_param(
        system(
            "pal1",
            ("y", "y/(1 + b*(x - y))"),
            ("x + (x - y)/(b*y)", "x"),
            "(1 + b*x + b*y + b^2*x*y)/y",
            ("t", "(-b*t - 1)/(b^2*t + b - h)"),
            "x",
        ),
        "b",
        1,
    )
}

pub fn pal2() -> IntegrableSystem {
    with_param(
        system(
            "pal2",
            ("y", "x/(1 + b*(y - x))"),
            ("y*(1 + b*x)/(1 + b*y)", "x"),
            "(1 + b*y + x*y)/(x*y)",
            ("t", "1/((h - 1)*t - b)"),
            "x",
        ),
        "b",
        1,
    )
}

pub fn pal3() -> IntegrableSystem {
    with_param(
        system(
            "pal3",
            ("y", "(-b*x + b*y + y^2)/x"),
            ("x*(x + b)/(y + b)", "x"),
            "(y + b)/x",
            ("t", "h*t - b"),
            "x",
        ),
        "b",
        1,
    )
}

pub fn pal4() -> IntegrableSystem {
    with_param(
        system(
            "pal4",
            ("y", "(b*y + y^2)/(x + b)"),
            ("x*(x + b)/y - b", "x"),
            "(x + b)/y",
            ("t", "(t + b)/h"),
            "x",
        ),
        "b",
        1,
    )
}

pub fn pal5() -> IntegrableSystem {
    with_param(
        system(
            "pal5",
            ("y", "(b*y + x*y)/(y + b)"),
            ("y*(x + b)/x - b", "x"),
            "y*(x + b)",
            ("t", "h/(t + b)"),
            "x",
        ),
        "b",
        1,
    )
}

pub fn pal6() -> IntegrableSystem {
    with_param(
        system(
            "pal6",
            ("y", "(b*x - b*y + x*y)/y"),
            ("x*(y + b)/(x + b)", "x"),
            "x*(y + b)",
            ("t", "(-b*t + h)/t"),
            "x",
        ),
        "b",
        1,
    )
}

/// Looks up a built-in by name.
pub fn by_name(name: &str) -> Option<IntegrableSystem> {
    Some(match name {
        "br" => br(),
        "saito" => saito(),
        "nostra" => nostra(),
        "pal1" => pal1(),
        "pal2" => pal2(),
        "pal3" => pal3(),
        "pal4" => pal4(),
        "pal5" => pal5(),
        "pal6" => pal6(),
        _ => return None,
    })
}

pub fn all() -> Vec<IntegrableSystem> {
    NAMES.iter().filter_map(|n| by_name(n)).collect()
}

/// Level correspondence `k = f(h)` and conjugator family `m_h` for the
/// conjugate pairs `(F, G)` among pal1 … pal6, with `M_h = m_h⁻¹ ∘ N_{f(h)} ∘ m_h`.
pub fn known_conjugation(f: &str, g: &str) -> Option<(RatFn, RatFn)> {
    let (level, m) = match (f, g) {
        ("pal1", "pal2") => ("(h - b^3)/h", "h/(b*(b^2*t + b - h))"),
        ("pal2", "pal5") => ("h - 1", "-(b*t + 1)/t"),
        ("pal6", "pal5") => ("h", "-h/t"),
        ("pal3", "pal4") => ("h", "b*t/((h - 1)*t - b)"),
        _ => return None,
    };
    Some((e(level), e(m)))
}
