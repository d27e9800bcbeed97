//! Loading systems from built-ins or spec files.

use std::path::Path;

use genus0::arith::{Scalar, Var};
use genus0::builtins;
use genus0::dynamics::IntegrableSystem;
use genus0::par::Exec;
use genus0::parse::{parse_expression, parse_scalar};
use genus0::report;
use genus0::spec_file::{MapSpec, Options, SpecError};
use serde_json::{json, Map, Value};

use crate::{CliError, OutArgs, SystemArgs};

pub struct Loaded {
    pub sys: IntegrableSystem,
    pub options: Options,
    pub grid: Vec<Scalar>,
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Io { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

pub fn scalar_arg(name: &str, src: &str) -> Result<Scalar, CliError> {
    parse_scalar(src).map_err(|e| CliError::Parse(format!("--{name} '{src}': {e}")))
}

pub fn expr_arg(name: &str, src: &str, params: &[&str]) -> Result<genus0::arith::RatFn, CliError> {
    parse_expression(src, params).map_err(|e| CliError::Parse(format!("--{name} '{src}': {e}")))
}

fn set_param(sys: &mut IntegrableSystem, name: &str, src: &Option<String>) -> Result<(), CliError> {
    let Some(src) = src else {
        return Ok(());
    };
    let v = Var::new(name);
    if !sys.params.contains(&v) {
        return Err(CliError::Usage(format!("{} has no parameter '{name}'", sys.name)));
    }
    sys.param_values.insert(v, scalar_arg(name, src)?);
    Ok(())
}

/// A built-in name, or else a spec file path.
pub fn load_named(src: &str, a: &Option<String>, b: &Option<String>) -> Result<Loaded, CliError> {
    let base = match builtins::by_name(src) {
        Some(sys) if !Path::new(src).exists() => Loaded {
            sys,
            options: Options::default(),
            grid: Vec::new(),
        },
        _ => {
            let spec = MapSpec::read(Path::new(src))?.load()?;
            Loaded {
                sys: spec.system,
                options: spec.options,
                grid: spec.h_grid,
            }
        }
    };
    let mut l = base;
    set_param(&mut l.sys, "a", a)?;
    set_param(&mut l.sys, "b", b)?;
    Ok(l)
}

pub fn load(args: &SystemArgs) -> Result<Loaded, CliError> {
    match (&args.builtin, &args.spec) {
        (Some(name), None) => {
            if builtins::by_name(name).is_none() {
                return Err(CliError::Usage(format!(
                    "unknown built-in '{name}' (expected one of {})",
                    builtins::NAMES.join(", ")
                )));
            }
            load_named(name, &args.a, &args.b)
        }
        (None, Some(path)) => {
            let path = path.to_str().ok_or_else(|| CliError::Usage("non-UTF-8 path".into()))?;
            if !Path::new(path).exists() {
                return Err(CliError::Usage(format!("spec file {path} not found")));
            }
            load_named(path, &args.a, &args.b)
        }
        _ => Err(CliError::Usage("give exactly one of --builtin or --spec".into())),
    }
}

pub fn exec(out: &OutArgs) -> Exec {
    if out.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

/// Name, parameters, map, inverse and first integral.
pub fn summary(sys: &IntegrableSystem) -> Value {
    let params: Map<String, Value> = sys
        .param_values
        .iter()
        .map(|(k, v)| (k.to_string(), report::scalar(v)))
        .collect();
    json!({
        "name": sys.name,
        "params": params,
        "map": [report::expr(&sys.map.f1), report::expr(&sys.map.f2)],
        "inverse": sys.map.inverse.as_ref().map_or(Value::Null, |(a, b)| json!([report::expr(a), report::expr(b)])),
        "integral": report::expr(&sys.integral),
    })
}
