//! A square root adjoined as a symbol: `s` with `s² = R` for a rational
//! function `R` that is not a square.

use std::collections::BTreeMap;

use super::{ArithError, MPoly, RatFn, Scalar, Var};

#[derive(Clone, Debug, PartialEq)]
pub struct Radical {
    sym: Var,
    radicand: RatFn,
}

impl Radical {
    pub fn new(sym: Var, radicand: RatFn) -> Self {
        Radical { sym, radicand }
    }

    pub fn sym(&self) -> &Var {
        &self.sym
    }

    pub fn radicand(&self) -> &RatFn {
        &self.radicand
    }

    pub fn as_ratfn(&self) -> RatFn {
        RatFn::var(&self.sym)
    }

    /// Splits a polynomial in the symbol as `even + odd·s` with `s`-free parts.
    fn split_poly(&self, p: &MPoly) -> (RatFn, RatFn) {
        let mut even = RatFn::zero();
        let mut odd = RatFn::zero();
        let mut rpow = RatFn::one();
        for (k, c) in p.coeffs_in(&self.sym).into_iter().enumerate() {
            if k > 0 && k % 2 == 0 {
                rpow = rpow.mul(&self.radicand);
            }
            if c.is_zero() {
                continue;
            }
            let term = RatFn::from_poly(c).mul(&rpow);
            if k % 2 == 0 {
                even = even.add(&term);
            } else {
                odd = odd.add(&term);
            }
        }
        (even, odd)
    }

    /// Replaces `s²` by the radicand in a polynomial; requires a polynomial
    /// radicand.
    pub fn reduce_poly(&self, p: &MPoly) -> Option<MPoly> {
        if p.degree_in(&self.sym) < 2 {
            return Some(p.clone());
        }
        if !self.radicand.is_polynomial() {
            return None;
        }
        let r = self.radicand.numer();
        let s = MPoly::var(&self.sym);
        let mut out = MPoly::zero();
        let mut rpow = MPoly::one();
        for (k, c) in p.coeffs_in(&self.sym).into_iter().enumerate() {
            if k > 0 && k % 2 == 0 {
                rpow = rpow.mul(r);
            }
            let term = c.mul(&rpow);
            out = out.add(&if k % 2 == 1 { term.mul(&s) } else { term });
        }
        Some(out)
    }

    /// Writes `r` as `p + q·s` with `p`, `q` free of the symbol.
    pub fn split(&self, r: &RatFn) -> Result<(RatFn, RatFn), ArithError> {
        let (a, b) = self.split_poly(r.numer());
        if !r.denom().contains_var(&self.sym) {
            let d = RatFn::from_poly(r.denom().clone());
            return Ok((a.try_div(&d)?, b.try_div(&d)?));
        }
        let (c, d) = self.split_poly(r.denom());
        // (a + b s)(c − d s) / (c² − d² R)
        let den = c.mul(&c).sub(&d.mul(&d).mul(&self.radicand));
        if den.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        let p = a.mul(&c).sub(&b.mul(&d).mul(&self.radicand));
        let q = b.mul(&c).sub(&a.mul(&d));
        Ok((p.try_div(&den)?, q.try_div(&den)?))
    }

    /// Canonical form `p + q·s`; two expressions are equal iff their
    /// canonical forms are identical.
    pub fn reduce(&self, r: &RatFn) -> Result<RatFn, ArithError> {
        if !r.contains_var(&self.sym) {
            return Ok(r.clone());
        }
        let (p, q) = self.split(r)?;
        Ok(p.add(&q.mul(&self.as_ratfn())))
    }

    /// Substitution followed by reduction.
    pub fn subs(&self, r: &RatFn, map: &BTreeMap<Var, RatFn>) -> Result<RatFn, ArithError> {
        self.reduce(&r.subs(map)?)
    }

    /// Evaluates the radicand at concrete variable values and returns the
    /// exact square root, in ℚ or a quadratic extension.
    pub fn value_at(&self, values: &BTreeMap<Var, Scalar>) -> Result<Option<Scalar>, ArithError> {
        match self.radicand.eval(values)? {
            Some(r) => r.sqrt(),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalizes_denominator() {
        let s = Var::new("s");
        let rad = Radical::new(s.clone(), RatFn::int(2));
        let sv = MPoly::var(&s);
        // 1/(1 + s) = s − 1 when s² = 2
        let r = RatFn::new(MPoly::one(), sv.add(&MPoly::one())).unwrap();
        assert_eq!(rad.reduce(&r).unwrap(), RatFn::from_poly(sv.sub(&MPoly::one())));
        // s³ = 2s
        let cube = RatFn::from_poly(sv.pow(3));
        assert_eq!(rad.reduce(&cube).unwrap(), RatFn::from_poly(sv.scale(&Scalar::from_int(2))));
    }

    #[test]
    fn symbolic_radicand() {
        let s = Var::new("s");
        let h = MPoly::named("h");
        let rad = Radical::new(s.clone(), RatFn::from_poly(h.pow(2).sub(&MPoly::int(4))));
        let sv = MPoly::var(&s);
        // (h + s)(h − s) = 4
        let r = RatFn::from_poly(h.add(&sv).mul(&h.sub(&sv)));
        assert_eq!(rad.reduce(&r).unwrap(), RatFn::int(4));
        let mut vals = BTreeMap::new();
        vals.insert(Var::new("h"), Scalar::from_int(3));
        let v = rad.value_at(&vals).unwrap().unwrap();
        assert_eq!(v.radicand(), 5);
    }
}
