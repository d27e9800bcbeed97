//! Multivariate rational functions in reduced form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;

use super::{ArithError, Field, MPoly, Monomial, Scalar, Var};

/// `num / den` with `gcd(num, den) = 1` and the leading coefficient of
/// `den` equal to one, so equal functions have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: MPoly,
    den: MPoly,
}

/// Builds the canonical reduced form of `num / den`.
pub fn ratfunc_normalize(num: MPoly, den: MPoly) -> Result<RatFn, ArithError> {
    RatFn::new(num, den)
}

impl RatFn {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFn::zero());
        }
        if let Some(c) = den.constant_value() {
            return Ok(RatFn {
                num: num.scale(&c.try_inv()?),
                den: MPoly::one(),
            });
        }
        let g = num.gcd(&den);
        if g.is_one() {
            Ok(RatFn::from_coprime(num, den))
        } else {
            Ok(RatFn::from_coprime(
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            ))
        }
    }

    /// Normalizes the scaling of an already coprime pair.
    fn from_coprime(num: MPoly, den: MPoly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RatFn { num, den }
        } else {
            let inv = lc.try_inv().expect("nonzero leading coefficient");
            RatFn {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn zero() -> Self {
        RatFn {
            num: MPoly::zero(),
            den: MPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFn::from_poly(MPoly::one())
    }

    pub fn from_poly(p: MPoly) -> Self {
        RatFn {
            num: p,
            den: MPoly::one(),
        }
    }

    pub fn constant(c: Scalar) -> Self {
        RatFn::from_poly(MPoly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        RatFn::from_poly(MPoly::int(n))
    }

    pub fn var(v: &Var) -> Self {
        RatFn::from_poly(MPoly::var(v))
    }

    pub fn named(name: &str) -> Self {
        RatFn::from_poly(MPoly::named(name))
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom(&self) -> &MPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MPoly, MPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    /// max(deg num, deg den) in `v`.
    pub fn degree_in(&self, v: &Var) -> u32 {
        self.num.degree_in(v).max(self.den.degree_in(v))
    }

    pub fn radicand(&self) -> i64 {
        match self.num.radicand() {
            1 => self.den.radicand(),
            d => d,
        }
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return RatFn::new(self.num.add(&other.num), self.den.clone()).expect("nonzero");
        }
        let g = self.den.gcd(&other.den);
        if g.is_one() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            let den = self.den.mul(&other.den);
            // any common factor must divide one of the denominators
            return RatFn::new(num, den).expect("nonzero");
        }
        let bg = self.den.div_exact(&g).expect("gcd divides");
        let dg = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&dg).add(&other.num.mul(&bg));
        RatFn::new(num, self.den.mul(&dg)).expect("nonzero")
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        if self.is_zero() || other.is_zero() {
            return RatFn::zero();
        }
        if self.is_polynomial() && other.is_polynomial() {
            return RatFn::from_poly(self.num.mul(&other.num));
        }
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = other.den.div_exact(&g1).expect("gcd divides");
        let c = other.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        RatFn::from_coprime(a.mul(&c), b.mul(&d))
    }

    pub fn scale(&self, c: &Scalar) -> RatFn {
        if c.is_zero() {
            return RatFn::zero();
        }
        RatFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn try_inv(&self) -> Result<RatFn, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(RatFn::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn try_div(&self, other: &RatFn) -> Result<RatFn, ArithError> {
        Ok(self.mul(&other.try_inv()?))
    }

    pub fn pow(&self, e: i32) -> RatFn {
        let base = if e < 0 {
            self.try_inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let k = e.unsigned_abs();
        RatFn {
            num: base.num.pow(k),
            den: base.den.pow(k),
        }
        .renormalized()
    }

    fn renormalized(self) -> RatFn {
        RatFn::from_coprime(self.num, self.den)
    }

    pub fn derivative(&self, v: &Var) -> RatFn {
        if self.is_polynomial() {
            return RatFn::from_poly(self.num.derivative(v));
        }
        let num = self
            .num
            .derivative(v)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(v)));
        RatFn::new(num, self.den.mul(&self.den)).expect("nonzero")
    }

    /// Simultaneous substitution of rational functions for variables.
    pub fn subs(&self, map: &BTreeMap<Var, RatFn>) -> Result<RatFn, ArithError> {
        let relevant: BTreeMap<Var, RatFn> = map
            .iter()
            .filter(|(v, _)| self.contains_var(v))
            .map(|(v, r)| (v.clone(), r.clone()))
            .collect();
        if relevant.is_empty() {
            return Ok(self.clone());
        }
        let (nn, nd) = self.num.subs_fraction(&relevant);
        let (dn, dd) = self.den.subs_fraction(&relevant);
        if dn.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        // (nn/nd) / (dn/dd); nd and dd are products of powers of the
        // substituted denominators
        let g = nd.gcd(&dd);
        let nd_g = nd.div_exact(&g).expect("gcd divides");
        let dd_g = dd.div_exact(&g).expect("gcd divides");
        RatFn::new(nn.mul(&dd_g), dn.mul(&nd_g))
    }

    pub fn subs_one(&self, v: &Var, value: &RatFn) -> Result<RatFn, ArithError> {
        let mut map = BTreeMap::new();
        map.insert(v.clone(), value.clone());
        self.subs(&map)
    }

    /// Substitutes exact scalar values for some variables.
    pub fn eval_partial(&self, values: &BTreeMap<Var, Scalar>) -> Result<RatFn, ArithError> {
        RatFn::new(self.num.eval_partial(values), self.den.eval_partial(values))
    }

    /// Exact evaluation; `Ok(None)` when a variable is unassigned.
    pub fn eval(&self, values: &BTreeMap<Var, Scalar>) -> Result<Option<Scalar>, ArithError> {
        let (Some(n), Some(d)) = (self.num.try_eval(values)?, self.den.try_eval(values)?) else {
            return Ok(None);
        };
        if d.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Some(n.try_div(&d)?))
    }

    pub fn eval_complex(&self, values: &BTreeMap<Var, Complex64>) -> Option<Complex64> {
        let n = self.num.eval_complex(values)?;
        let d = self.den.eval_complex(values)?;
        Some(n / d)
    }

    pub fn rename(&self, from: &Var, to: &Var) -> RatFn {
        RatFn {
            num: self.num.rename(from, to),
            den: self.den.rename(from, to),
        }
        .renormalized()
    }
}

impl Field for RatFn {
    fn zero() -> Self {
        RatFn::zero()
    }
    fn one() -> Self {
        RatFn::one()
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        RatFn::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RatFn::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFn::mul(self, other)
    }
    fn neg(&self) -> Self {
        RatFn::neg(self)
    }
    fn inv(&self) -> Self {
        self.try_inv().expect("inverse of zero")
    }
}

impl From<MPoly> for RatFn {
    fn from(p: MPoly) -> Self {
        RatFn::from_poly(p)
    }
}

impl From<Scalar> for RatFn {
    fn from(c: Scalar) -> Self {
        RatFn::constant(c)
    }
}

fn single_atom(p: &MPoly) -> bool {
    if p.num_terms() != 1 {
        return false;
    }
    let (m, c) = p.leading_term().expect("one term");
    (c.is_one() && m.factors().len() == 1 && m.factors()[0].1 == 1)
        || (m == &Monomial::one() && c.is_rational() && c.real_sign() != Some(std::cmp::Ordering::Less) && c.as_rational().is_some_and(|r| r.is_integer()))
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() == 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        if single_atom(&self.den) {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
