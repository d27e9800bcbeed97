//! Fast evaluation of rational functions in `x, y` over exact scalars or
//! complex floats.

use std::fmt::Debug;

use num_complex::Complex64;

use crate::arith::{ArithError, MPoly, RatFn, Scalar};
use crate::vars;

/// Coordinates of orbit points: exact scalars or complex floats.
pub trait Coord: Clone + Debug + PartialEq + Send + Sync {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_scalar(s: &Scalar) -> Self;
    fn add(&self, o: &Self) -> Result<Self, ArithError>;
    fn mul(&self, o: &Self) -> Result<Self, ArithError>;
    fn div(&self, o: &Self) -> Result<Self, ArithError>;
    fn is_zero(&self) -> bool;
    fn to_complex(&self) -> Complex64;
}

impl Coord for Scalar {
    const EXACT: bool = true;
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.clone()
    }
    fn add(&self, o: &Self) -> Result<Self, ArithError> {
        self.try_add(o)
    }
    fn mul(&self, o: &Self) -> Result<Self, ArithError> {
        self.try_mul(o)
    }
    fn div(&self, o: &Self) -> Result<Self, ArithError> {
        self.try_div(o)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn to_complex(&self) -> Complex64 {
        Scalar::to_complex(self)
    }
}

impl Coord for Complex64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.to_complex()
    }
    fn add(&self, o: &Self) -> Result<Self, ArithError> {
        Ok(self + o)
    }
    fn mul(&self, o: &Self) -> Result<Self, ArithError> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Result<Self, ArithError> {
        if *o == Complex64::new(0.0, 0.0) {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self / o)
    }
    fn is_zero(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

#[derive(Clone, Debug)]
struct CompiledPoly<T> {
    terms: Vec<(T, u32, u32)>,
    max_x: u32,
    max_y: u32,
}

impl<T: Coord> CompiledPoly<T> {
    fn new(p: &MPoly) -> Option<Self> {
        let (x, y) = (vars::x(), vars::y());
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            let (ex, ey) = (m.exp(&x), m.exp(&y));
            if m.degree() != ex + ey {
                return None;
            }
            terms.push((T::from_scalar(c), ex, ey));
        }
        Some(CompiledPoly {
            max_x: terms.iter().map(|t| t.1).max().unwrap_or(0),
            max_y: terms.iter().map(|t| t.2).max().unwrap_or(0),
            terms,
        })
    }

    fn eval(&self, xp: &[T], yp: &[T]) -> Result<T, ArithError> {
        let mut acc = T::zero();
        for (c, ex, ey) in &self.terms {
            let t = c.mul(&xp[*ex as usize])?.mul(&yp[*ey as usize])?;
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }
}

fn powers<T: Coord>(v: &T, n: u32) -> Result<Vec<T>, ArithError> {
    let mut out = vec![T::one()];
    for k in 1..=n as usize {
        out.push(out[k - 1].mul(v)?);
    }
    Ok(out)
}

/// A rational function of `x, y` with numeric coefficients.
#[derive(Clone, Debug)]
pub struct Compiled<T> {
    num: CompiledPoly<T>,
    den: CompiledPoly<T>,
}

/// Outcome of evaluating a compiled function at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalOutcome<T> {
    Value(T),
    Pole,
}

impl<T: Coord> Compiled<T> {
    /// `None` if `r` involves variables other than `x, y`.
    pub fn new(r: &RatFn) -> Option<Self> {
        Some(Compiled {
            num: CompiledPoly::new(r.numer())?,
            den: CompiledPoly::new(r.denom())?,
        })
    }

    pub fn eval(&self, x: &T, y: &T) -> Result<EvalOutcome<T>, ArithError> {
        let mx = self.num.max_x.max(self.den.max_x);
        let my = self.num.max_y.max(self.den.max_y);
        let xp = powers(x, mx)?;
        let yp = powers(y, my)?;
        self.eval_powers(&xp, &yp)
    }

    fn eval_powers(&self, xp: &[T], yp: &[T]) -> Result<EvalOutcome<T>, ArithError> {
        let d = self.den.eval(xp, yp)?;
        if d.is_zero() {
            return Ok(EvalOutcome::Pole);
        }
        Ok(EvalOutcome::Value(self.num.eval(xp, yp)?.div(&d)?))
    }
}

/// A planar map `(F1, F2)` compiled for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledMap<T> {
    f1: Compiled<T>,
    f2: Compiled<T>,
    mx: u32,
    my: u32,
}

impl<T: Coord> CompiledMap<T> {
    pub fn new(f1: &RatFn, f2: &RatFn) -> Option<Self> {
        let f1 = Compiled::new(f1)?;
        let f2 = Compiled::new(f2)?;
        let mx = [&f1.num, &f1.den, &f2.num, &f2.den]
            .iter()
            .map(|p| p.max_x)
            .max()
            .unwrap_or(0);
        let my = [&f1.num, &f1.den, &f2.num, &f2.den]
            .iter()
            .map(|p| p.max_y)
            .max()
            .unwrap_or(0);
        Some(CompiledMap { f1, f2, mx, my })
    }

    /// `None` when a denominator vanishes.
    pub fn apply(&self, p: &(T, T)) -> Result<Option<(T, T)>, ArithError> {
        let xp = powers(&p.0, self.mx)?;
        let yp = powers(&p.1, self.my)?;
        let (EvalOutcome::Value(a), EvalOutcome::Value(b)) =
            (self.f1.eval_powers(&xp, &yp)?, self.f2.eval_powers(&xp, &yp)?)
        else {
            return Ok(None);
        };
        Ok(Some((a, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;

    #[test]
    fn exact_and_float_agree() {
        let f1 = parse_expression("x*y", &[]).unwrap();
        let f2 = parse_expression("y*(1 + x)/(1 + x*y)", &[]).unwrap();
        let ex = CompiledMap::<Scalar>::new(&f1, &f2).unwrap();
        let fl = CompiledMap::<Complex64>::new(&f1, &f2).unwrap();
        let p = (Scalar::frac(1, 3), Scalar::frac(2, 5));
        let q = ex.apply(&p).unwrap().unwrap();
        assert_eq!(q, (Scalar::frac(2, 15), Scalar::frac(8, 17)));
        let qf = fl.apply(&(p.0.to_complex(), p.1.to_complex())).unwrap().unwrap();
        assert!((qf.1 - q.1.to_complex()).norm() < 1e-15);
        // pole on x*y = -1
        assert_eq!(ex.apply(&(Scalar::from_int(1), Scalar::from_int(-1))).unwrap(), None);
    }

    #[test]
    fn rejects_free_parameters() {
        let f = parse_expression("a*x", &["a"]).unwrap();
        assert!(Compiled::<Scalar>::new(&f).is_none());
    }
}
