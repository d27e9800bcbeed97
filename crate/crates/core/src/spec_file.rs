//! Map specification files: a TOML layout whose values are expression
//! strings in the grammar of [`crate::parse`].
//!
//! ```toml
//! name = "pal5"
//!
//! [map]
//! fx = "y"
//! fy = "(b*y + x*y)/(y + b)"
//!
//! [inverse]
//! fx = "y*(x + b)/x - b"
//! fy = "x"
//!
//! [integral]
//! num = "y*(x + b)"
//! den = "1"
//!
//! [params]
//! b = "1"
//!
//! [parametrization]
//! p1 = "t"
//! p2 = "h/(t + b)"
//! pinv = "x"
//!
//! [options]
//! mode = "exact"
//! h_grid = ["1", "2"]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{Radical, RatFn, Scalar, Var};
use crate::curves::Parametrization;
use crate::dynamics::{IntegrableSystem, RationalMapPlane};
use crate::orbits::{PERIOD_TOL, ROTATION_TOL};
use crate::parse::{parse_expression, parse_scalar, ParseError};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed spec file: {0}")]
    Toml(String),
    #[error("{field}: {err}")]
    Expr { field: String, err: ParseError },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub fx: String,
    pub fy: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralSection {
    pub num: String,
    #[serde(default = "one")]
    pub den: String,
}

fn one() -> String {
    "1".into()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSection {
    pub p1: String,
    pub p2: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinv: Option<String>,
    /// Symbol of an adjoined square root, e.g. `delta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radical: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radicand: Option<String>,
    /// Abscissa of the base point for parametrization by lines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// `"exact"` or `"float"`.
    #[serde(default = "exact")]
    pub mode: String,
    #[serde(default)]
    pub h_grid: Vec<String>,
    #[serde(default = "period_tol")]
    pub period_tol: f64,
    #[serde(default = "rotation_tol")]
    pub rotation_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_level: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_interval: Option<[String; 2]>,
}

fn exact() -> String {
    "exact".into()
}
fn period_tol() -> f64 {
    PERIOD_TOL
}
fn rotation_tol() -> f64 {
    ROTATION_TOL
}

impl Default for Options {
    fn default() -> Self {
        Options {
            mode: exact(),
            h_grid: Vec::new(),
            period_tol: PERIOD_TOL,
            rotation_tol: ROTATION_TOL,
            critical_level: None,
            rotation_interval: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    #[serde(default)]
    pub name: String,
    pub map: MapSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<MapSection>,
    pub integral: IntegralSection,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parametrization: Option<ParamSection>,
    #[serde(default)]
    pub options: Options,
}

/// A parsed specification: the system and the numeric options.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub system: IntegrableSystem,
    pub options: Options,
    pub h_grid: Vec<Scalar>,
}

impl MapSpec {
    pub fn from_toml(src: &str) -> Result<Self, SpecError> {
        toml::from_str(src).map_err(|e| SpecError::Toml(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn read(path: &Path) -> Result<Self, SpecError> {
        let src = std::fs::read_to_string(path).map_err(|e| SpecError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&src)
    }

    /// The specification of an existing system, options left at defaults.
    pub fn from_system(sys: &IntegrableSystem) -> Self {
        let s = |r: &RatFn| r.to_string();
        MapSpec {
            name: sys.name.clone(),
            map: MapSection {
                fx: s(&sys.map.f1),
                fy: s(&sys.map.f2),
            },
            inverse: sys.map.inverse.as_ref().map(|(a, b)| MapSection {
                fx: s(a),
                fy: s(b),
            }),
            integral: IntegralSection {
                num: sys.integral.numer().to_string(),
                den: sys.integral.denom().to_string(),
            },
            params: sys
                .param_values
                .iter()
                .map(|(v, c)| (v.to_string(), c.to_string()))
                .collect(),
            parametrization: sys.param.as_ref().map(|p| ParamSection {
                p1: s(&p.p1),
                p2: s(&p.p2),
                pinv: p.inverse.as_ref().map(s),
                radical: p.radical.as_ref().map(|r| r.sym().to_string()),
                radicand: p.radical.as_ref().map(|r| s(r.radicand())),
                x0: sys.base_x0.as_ref().map(s),
            }),
            options: Options {
                critical_level: sys.critical_level.as_ref().map(s),
                rotation_interval: sys.rotation_interval.as_ref().map(|(a, b)| [s(a), s(b)]),
                ..Options::default()
            },
        }
    }

    /// Parses every expression and assembles the system.
    pub fn load(&self) -> Result<LoadedSpec, SpecError> {
        let names: Vec<&str> = self.params.keys().map(String::as_str).collect();
        for n in &names {
            if ["x", "y", "t", "h", "k", "sqrt"].contains(n) {
                return Err(SpecError::Invalid(format!("parameter name '{n}' is reserved")));
            }
        }
        let expr = |field: &str, src: &str, allowed: &[&str]| {
            parse_expression(src, allowed).map_err(|err| SpecError::Expr {
                field: field.to_string(),
                err,
            })
        };
        let e = |field: &str, src: &str| expr(field, src, &names);

        let mut map = RationalMapPlane::new(e("map.fx", &self.map.fx)?, e("map.fy", &self.map.fy)?);
        if let Some(inv) = &self.inverse {
            map = map.with_inverse(e("inverse.fx", &inv.fx)?, e("inverse.fy", &inv.fy)?);
        }
        let num = e("integral.num", &self.integral.num)?;
        let den = e("integral.den", &self.integral.den)?;
        let integral = num
            .try_div(&den)
            .map_err(|_| SpecError::Invalid("integral.den is zero".into()))?;
        for r in [&map.f1, &map.f2, &integral] {
            if r.vars().iter().any(|v| ["t", "h"].contains(&v.name())) {
                return Err(SpecError::Invalid(
                    "map and integral may only use x, y and declared parameters".into(),
                ));
            }
        }
        let name = if self.name.is_empty() { "spec" } else { &self.name };
        let mut sys = IntegrableSystem::new(name, map, integral);

        for (k, v) in &self.params {
            let value = parse_scalar(v).map_err(|err| SpecError::Expr {
                field: format!("params.{k}"),
                err,
            })?;
            let var = Var::new(k);
            sys.params.push(var.clone());
            sys.param_values.insert(var, value);
        }

        if let Some(p) = &self.parametrization {
            let mut allowed = names.clone();
            if let Some(sym) = &p.radical {
                allowed.push(sym.as_str());
            }
            let ep = |field: &str, src: &str| expr(field, src, &allowed);
            let mut param = Parametrization::new(
                ep("parametrization.p1", &p.p1)?,
                ep("parametrization.p2", &p.p2)?,
            );
            if let Some(q) = &p.pinv {
                param = param.with_inverse(ep("parametrization.pinv", q)?);
            }
            match (&p.radical, &p.radicand) {
                (Some(sym), Some(rad)) => {
                    let radicand = e("parametrization.radicand", rad)?;
                    param = param.with_radical(Radical::new(Var::new(sym), radicand));
                }
                (None, None) => {}
                _ => {
                    return Err(SpecError::Invalid(
                        "parametrization.radical and radicand go together".into(),
                    ))
                }
            }
            if let Some(x0) = &p.x0 {
                sys.base_x0 = Some(e("parametrization.x0", x0)?);
            }
            sys.param = Some(param);
        }

        let o = &self.options;
        if !["exact", "float"].contains(&o.mode.as_str()) {
            return Err(SpecError::Invalid(format!(
                "options.mode must be \"exact\" or \"float\", not \"{}\"",
                o.mode
            )));
        }
        if let Some(c) = &o.critical_level {
            sys.critical_level = Some(e("options.critical_level", c)?);
        }
        if let Some([lo, hi]) = &o.rotation_interval {
            sys.rotation_interval = Some((
                e("options.rotation_interval", lo)?,
                e("options.rotation_interval", hi)?,
            ));
        }
        let h_grid = o
            .h_grid
            .iter()
            .map(|s| {
                parse_scalar(s).map_err(|err| SpecError::Expr {
                    field: "options.h_grid".into(),
                    err,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LoadedSpec {
            system: sys,
            options: o.clone(),
            h_grid,
        })
    }
}

/// Reads and loads a specification file.
pub fn load_spec(path: &Path) -> Result<LoadedSpec, SpecError> {
    MapSpec::read(path)?.load()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    #[test]
    fn builtins_round_trip() {
        for sys in builtins::all() {
            let spec = MapSpec::from_system(&sys);
            let text = spec.to_toml();
            let back = MapSpec::from_toml(&text).unwrap();
            assert_eq!(back, spec, "{}", sys.name);
            let loaded = back.load().unwrap().system;
            assert_eq!(loaded.map, sys.map);
            assert_eq!(loaded.integral, sys.integral);
            assert_eq!(loaded.param, sys.param);
            assert_eq!(loaded.param_values, sys.param_values);
            assert_eq!(loaded.critical_level, sys.critical_level);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let base = "[map]\nfx = \"y\"\nfy = \"x\"\n[integral]\nnum = \"x + y\"\n";
        assert!(MapSpec::from_toml(base).unwrap().load().is_ok());
        let unknown = base.replace("x + y", "x + c");
        assert!(matches!(
            MapSpec::from_toml(&unknown).unwrap().load(),
            Err(SpecError::Expr { .. })
        ));
        let extra = format!("{base}[bogus]\nq = \"1\"\n");
        assert!(matches!(MapSpec::from_toml(&extra), Err(SpecError::Toml(_))));
        let grid = format!("{base}[options]\nh_grid = [\"1/2\", \"sqrt(-3)\"]\n");
        let loaded = MapSpec::from_toml(&grid).unwrap().load().unwrap();
        assert_eq!(loaded.h_grid[1].radicand(), -3);
    }
}
