//! Sparse multivariate polynomials over [`Scalar`] with named variables.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{ArithError, RatFn, Scalar};

/// A named indeterminate. Variables are ordered by name; the
/// alphabetically largest variable is the most significant one in the
/// lexicographic monomial order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Power product; exponents are positive and variables sorted ascending.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: &Var, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v.clone(), e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exp(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v.clone(), e - f)),
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        (j == other.0.len()).then_some(Monomial(out))
    }

    fn without(&self, v: &Var) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| w != v).cloned().collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (self.0.len(), other.0.len());
        loop {
            match (i > 0, j > 0) {
                (false, false) => return Ordering::Equal,
                (true, false) => return Ordering::Greater,
                (false, true) => return Ordering::Less,
                (true, true) => {
                    let (va, ea) = &self.0[i - 1];
                    let (vb, eb) = &other.0[j - 1];
                    match va.cmp(vb) {
                        Ordering::Greater => return Ordering::Greater,
                        Ordering::Less => return Ordering::Less,
                        Ordering::Equal => match ea.cmp(eb) {
                            Ordering::Equal => {
                                i -= 1;
                                j -= 1;
                            }
                            o => return o,
                        },
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Polynomial as a map from monomials to nonzero coefficients, kept in
/// lexicographic order so the last entry is the leading term.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MPoly { terms }
    }

    pub fn int(n: i64) -> Self {
        MPoly::constant(Scalar::from_int(n))
    }

    pub fn var(v: &Var) -> Self {
        MPoly::term(Scalar::one(), Monomial::var(v, 1))
    }

    pub fn named(name: &str) -> Self {
        MPoly::var(&Var::new(name))
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = MPoly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Scalar {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// True when every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(Scalar::is_real)
    }

    /// Radicand of the coefficient field (1 for ℚ).
    pub fn radicand(&self) -> i64 {
        self.terms
            .values()
            .map(Scalar::radicand)
            .find(|&d| d != 1)
            .unwrap_or(1)
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        if self.is_zero() || other.is_zero() {
            return MPoly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_term(&self, c: &Scalar, mono: &Monomial) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact square root, if `self` is the square of a polynomial over the
    /// same coefficient field. Terms are peeled off from the leading one.
    pub fn sqrt(&self) -> Option<MPoly> {
        let Some((lm, lc)) = self.leading_term() else {
            return Some(MPoly::zero());
        };
        let lowest = self.terms.keys().map(Monomial::degree).min()?;
        let highest = self.total_degree();
        let half = |m: &Monomial| {
            let mut out = Monomial::one();
            for (v, e) in m.factors() {
                if e % 2 != 0 {
                    return None;
                }
                out = out.mul(&Monomial::var(v, e / 2));
            }
            Some(out)
        };
        let c0 = lc.sqrt().ok()??;
        if !c0.is_rational() && c0.radicand() != self.radicand() {
            return None;
        }
        let m0 = half(lm)?;
        let two_c0 = c0.try_add(&c0).ok()?;
        let mut last = m0.clone();
        let mut root = MPoly::term(c0, m0.clone());
        loop {
            let rest = self.sub(&root.mul(&root));
            let Some((rm, rc)) = rest.leading_term() else {
                return Some(root);
            };
            let m = rm.div(&m0)?;
            if m >= last || 2 * m.degree() < lowest || 2 * m.degree() > highest {
                return None;
            }
            root = root.add(&MPoly::term(rc.try_div(&two_c0).ok()?, m.clone()));
            last = m;
        }
    }

    /// Scales so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> MPoly {
        match self.leading_term() {
            None => MPoly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.try_inv().expect("nonzero leading coefficient")),
        }
    }

    /// Coefficients with respect to `v`, indexed by exponent.
    pub fn coeffs_in(&self, v: &Var) -> Vec<MPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![MPoly::zero(); deg + 1];
        if self.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            out[e].terms.insert(m.without(v), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: &Var, coeffs: &[MPoly]) -> MPoly {
        let mut out = MPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let mono = Monomial::var(v, e as u32);
            for (m, a) in &c.terms {
                out.add_term(m.mul(&mono), a.clone());
            }
        }
        out
    }

    /// Leading coefficient with respect to `v`.
    pub fn lc_in(&self, v: &Var) -> MPoly {
        self.coeffs_in(v).pop().unwrap_or_default()
    }

    pub fn derivative(&self, v: &Var) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let m2 = m.div(&Monomial::var(v, 1)).expect("exponent is positive");
            out.add_term(m2, c * &Scalar::from_int(e as i64));
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves
    /// a remainder.
    pub fn div_exact(&self, divisor: &MPoly) -> Option<MPoly> {
        let (lm, lc) = divisor.leading_term()?;
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.try_inv().ok()?));
        }
        let lc_inv = lc.try_inv().ok()?;
        let mut rem = self.clone();
        let mut quot = MPoly::zero();
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(lm)?;
            let qc = c * &lc_inv;
            for (dm, dc) in &divisor.terms {
                rem.add_term(dm.mul(&qm), -(dc * &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Sparse pseudo-remainder of `self` by `b` with respect to `v`.
    pub fn prem_in(&self, b: &MPoly, v: &Var) -> MPoly {
        let db = b.degree_in(v);
        let lb = b.lc_in(v);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= db {
            let dr = r.degree_in(v);
            let lr = r.lc_in(v);
            let shift = Monomial::var(v, dr - db);
            r = r.mul(&lb).sub(&b.mul(&lr).mul_term(&Scalar::one(), &shift));
        }
        r
    }

    /// Content with respect to `v` (gcd of the coefficients), monic.
    pub fn content_in(&self, v: &Var) -> MPoly {
        let mut g = MPoly::zero();
        for c in self.coeffs_in(v).into_iter().rev() {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn primitive_part_in(&self, v: &Var) -> MPoly {
        if self.is_zero() {
            return MPoly::zero();
        }
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides").monic()
    }

    /// Monic greatest common divisor (recursive primitive PRS).
    pub fn gcd(&self, other: &MPoly) -> MPoly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return MPoly::one();
        }
        if self.monic() == other.monic() {
            return self.monic();
        }
        if self.coprime_by_images(other) {
            return MPoly::one();
        }
        let main = self
            .vars()
            .into_iter()
            .chain(other.vars())
            .max()
            .expect("nonconstant");
        let (da, db) = (self.degree_in(&main), other.degree_in(&main));
        if da == 0 {
            return self.gcd(&other.content_in(&main));
        }
        if db == 0 {
            return other.gcd(&self.content_in(&main));
        }
        let ca = self.content_in(&main);
        let cb = other.content_in(&main);
        let content = ca.gcd(&cb);
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = other.div_exact(&cb).expect("content divides");
        if a.degree_in(&main) < b.degree_in(&main) {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.prem_in(&b, &main);
            if r.is_zero() {
                break;
            }
            if r.degree_in(&main) == 0 {
                b = MPoly::one();
                break;
            }
            a = b;
            b = r.primitive_part_in(&main);
        }
        let g = if b.is_constant() {
            MPoly::one()
        } else {
            b.primitive_part_in(&main)
        };
        content.mul(&g).monic()
    }

    /// Cheap sufficient test for a trivial gcd: for every variable, the
    /// univariate gcd of images at sample points (with leading coefficients
    /// kept) is constant.
    fn coprime_by_images(&self, other: &MPoly) -> bool {
        let all: BTreeSet<Var> = self.vars().into_iter().chain(other.vars()).collect();
        for (i, v) in all.iter().enumerate() {
            if self.degree_in(v) == 0 || other.degree_in(v) == 0 {
                continue;
            }
            let mut decided = false;
            for attempt in 0..3u64 {
                let vals: BTreeMap<Var, Scalar> = all
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| *w != v)
                    .map(|(j, w)| {
                        let k = (i as u64 * 31 + j as u64 * 17 + attempt * 53) % 89;
                        (w.clone(), Scalar::from_int(k as i64 + 3))
                    })
                    .collect();
                let (Ok(Some(a)), Ok(Some(b))) = (
                    self.lc_in(v).try_eval(&vals),
                    other.lc_in(v).try_eval(&vals),
                ) else {
                    return false;
                };
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let ia = super::UPoly::from_mpoly(&self.eval_partial(&vals), v);
                let ib = super::UPoly::from_mpoly(&other.eval_partial(&vals), v);
                let (Some(ia), Some(ib)) = (ia, ib) else {
                    return false;
                };
                if super::poly_gcd(&ia, &ib).degree() != Some(0) {
                    return false;
                }
                decided = true;
                break;
            }
            if !decided {
                return false;
            }
        }
        true
    }

    /// Substitutes polynomials for variables (simultaneously).
    pub fn subs_poly(&self, map: &BTreeMap<Var, MPoly>) -> MPoly {
        let mut out = MPoly::zero();
        let mut cache: BTreeMap<(Var, u32), MPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut term = MPoly::constant(c.clone());
            let mut rest = Vec::new();
            for (v, e) in &m.0 {
                if let Some(val) = map.get(v) {
                    let p = cache
                        .entry((v.clone(), *e))
                        .or_insert_with(|| val.pow(*e))
                        .clone();
                    term = term.mul(&p);
                } else {
                    rest.push((v.clone(), *e));
                }
            }
            out = out.add(&term.mul_term(&Scalar::one(), &Monomial(rest)));
        }
        out
    }

    /// Substitutes rational functions for variables (simultaneously).
    ///
    /// Works on the homogenized numerator so only one reduction happens.
    pub fn subs(&self, map: &BTreeMap<Var, RatFn>) -> RatFn {
        let (num, den) = self.subs_fraction(map);
        RatFn::new(num, den).expect("products of nonzero denominators are nonzero")
    }

    /// Unreduced `(numerator, denominator)` of a rational substitution.
    pub(crate) fn subs_fraction(&self, map: &BTreeMap<Var, RatFn>) -> (MPoly, MPoly) {
        let active: Vec<(&Var, &RatFn, u32)> = map
            .iter()
            .filter_map(|(v, r)| {
                let e = self.degree_in(v);
                (e > 0).then_some((v, r, e))
            })
            .collect();
        let mut num_pows: Vec<Vec<MPoly>> = Vec::new();
        let mut den_pows: Vec<Vec<MPoly>> = Vec::new();
        let mut den = MPoly::one();
        for (_, r, e) in &active {
            let mut np = vec![MPoly::one()];
            let mut dp = vec![MPoly::one()];
            for k in 1..=*e as usize {
                np.push(np[k - 1].mul(r.numer()));
                dp.push(dp[k - 1].mul(r.denom()));
            }
            den = den.mul(&dp[*e as usize]);
            num_pows.push(np);
            den_pows.push(dp);
        }
        let mut num = MPoly::zero();
        for (m, c) in &self.terms {
            let mut term = MPoly::constant(c.clone());
            let mut rest = Vec::new();
            let mut used = vec![0u32; active.len()];
            for (v, e) in &m.0 {
                match active.iter().position(|(w, _, _)| *w == v) {
                    Some(i) => used[i] = *e,
                    None => rest.push((v.clone(), *e)),
                }
            }
            for (i, (_, _, e)) in active.iter().enumerate() {
                term = term
                    .mul(&num_pows[i][used[i] as usize])
                    .mul(&den_pows[i][(e - used[i]) as usize]);
            }
            num = num.add(&term.mul_term(&Scalar::one(), &Monomial(rest)));
        }
        (num, den)
    }

    /// Substitutes scalar values for some variables.
    pub fn eval_partial(&self, values: &BTreeMap<Var, Scalar>) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (v, e) in &m.0 {
                match values.get(v) {
                    Some(x) => coeff = &coeff * &x.pow(*e),
                    None => rest.push((v.clone(), *e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Full evaluation; `None` if a variable has no value.
    pub fn eval(&self, values: &BTreeMap<Var, Scalar>) -> Option<Scalar> {
        self.eval_partial(values).constant_value()
    }

    /// Fallible version of [`MPoly::eval`] for mixed-field inputs.
    pub fn try_eval(&self, values: &BTreeMap<Var, Scalar>) -> Result<Option<Scalar>, ArithError> {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            for (v, e) in &m.0 {
                match values.get(v) {
                    Some(x) => {
                        let mut p = Scalar::one();
                        for _ in 0..*e {
                            p = p.try_mul(x)?;
                        }
                        coeff = coeff.try_mul(&p)?;
                    }
                    None => return Ok(None),
                }
            }
            acc = acc.try_add(&coeff)?;
        }
        Ok(Some(acc))
    }

    /// Evaluation in complex floating point (explicit downcast).
    pub fn eval_complex(
        &self,
        values: &BTreeMap<Var, num_complex::Complex64>,
    ) -> Option<num_complex::Complex64> {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (v, e) in &m.0 {
                t *= values.get(v)?.powu(*e);
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn rename(&self, from: &Var, to: &Var) -> MPoly {
        let mut map = BTreeMap::new();
        map.insert(from.clone(), MPoly::var(to));
        self.subs_poly(&map)
    }
}

/// Reduces `g` modulo the curve `f = 0`.
///
/// The reduction variable is whichever of `x`, `y` has the larger degree in
/// `f` (ties go to `y`). When the leading coefficient of `f` in that
/// variable is not a constant, fraction-free pseudo-division is used, so the
/// result represents `c·g` for a power `c` of that leading coefficient.
pub fn bipoly_reduce_mod_curve(g: &MPoly, f: &MPoly) -> Result<MPoly, ArithError> {
    let (x, y) = (Var::new("x"), Var::new("y"));
    let (dx, dy) = (f.degree_in(&x), f.degree_in(&y));
    if dx == 0 && dy == 0 {
        return Err(ArithError::ConstantModulus);
    }
    let v = if dy >= dx { y } else { x };
    Ok(reduce_in(g, f, &v))
}

pub(crate) fn reduce_in(g: &MPoly, f: &MPoly, v: &Var) -> MPoly {
    let df = f.degree_in(v);
    let lf = f.lc_in(v);
    let lf_const = lf.constant_value();
    let mut r = g.clone();
    while !r.is_zero() && r.degree_in(v) >= df {
        let dr = r.degree_in(v);
        let lr = r.lc_in(v);
        let shift = Monomial::var(v, dr - df);
        r = match &lf_const {
            Some(c) => {
                let factor = lr.scale(&c.try_inv().expect("nonzero"));
                r.sub(&f.mul(&factor).mul_term(&Scalar::one(), &shift))
            }
            None => r.mul(&lf).sub(&f.mul(&lr).mul_term(&Scalar::one(), &shift)),
        };
    }
    r
}

impl fmt::Display for MPoly {
    /// Parser-compatible rendering, leading term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let (neg, abs) = match c.as_rational() {
                Some(r) if r < &num_rational::BigRational::from_integer(0.into()) => {
                    (true, -c)
                }
                _ => (false, c.clone()),
            };
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let coeff = if abs.is_rational() {
                abs.to_string()
            } else {
                format!("({abs})")
            };
            if m.is_one() {
                f.write_str(&coeff)?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{coeff}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MPoly {
        MPoly::named("x")
    }
    fn y() -> MPoly {
        MPoly::named("y")
    }
    fn t() -> MPoly {
        MPoly::named("t")
    }
    fn c(n: i64) -> MPoly {
        MPoly::int(n)
    }

    #[test]
    fn lex_order_and_leading_term() {
        let p = x().pow(3).add(&y()).add(&c(1));
        let (m, _) = p.leading_term().unwrap();
        assert_eq!(m.to_string(), "y");
        assert_eq!(p.to_string(), "y + x^3 + 1");
    }

    #[test]
    fn square_roots() {
        let p = x().mul(&y()).sub(&c(3).mul(&t())).add(&c(2));
        let r = p.mul(&p).sqrt().unwrap();
        assert!(r == p || r == p.neg());
        assert_eq!(c(4).mul(&x().pow(2)).sqrt(), Some(c(2).mul(&x())));
        assert_eq!(x().pow(2).add(&c(1)).sqrt(), None);
        assert_eq!(x().pow(3).sqrt(), None);
        assert_eq!(c(2).mul(&x().pow(2)).sqrt(), None);
        assert_eq!(MPoly::zero().sqrt(), Some(MPoly::zero()));
    }

    #[test]
    fn exact_division() {
        let a = x().add(&y());
        let b = x().sub(&y());
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(prod.add(&c(1)).div_exact(&a).is_none());
    }

    #[test]
    fn multivariate_gcd() {
        let common = x().mul(&y()).add(&c(1));
        let a = common.mul(&x().add(&c(2))).mul(&y());
        let b = common.mul(&y().sub(&x())).mul(&y());
        let g = a.gcd(&b);
        assert_eq!(g, common.mul(&y()).monic());
        assert!(x().add(&c(1)).gcd(&y()).is_one());
    }

    #[test]
    fn gcd_of_univariate() {
        let a = t().add(&c(1)).mul(&t().pow(2).add(&c(3)));
        let b = t().mul(&t().add(&c(1)));
        assert_eq!(a.gcd(&b), t().add(&c(1)));
    }

    #[test]
    fn reduce_on_circle() {
        let f = x().pow(2).add(&y().pow(2)).sub(&c(1));
        let r = bipoly_reduce_mod_curve(&y().pow(2), &f).unwrap();
        assert_eq!(r, c(1).sub(&x().pow(2)));
        assert!(bipoly_reduce_mod_curve(&f, &f).unwrap().is_zero());
        assert!(matches!(
            bipoly_reduce_mod_curve(&y(), &c(3)),
            Err(ArithError::ConstantModulus)
        ));
    }

    #[test]
    fn reduce_with_pseudo_division() {
        // y(1+x) − h
        let h = MPoly::named("h");
        let f = y().mul(&x().add(&c(1))).sub(&h);
        assert!(bipoly_reduce_mod_curve(&f, &f).unwrap().is_zero());
        // y²(1+x)² − h² is a multiple of f
        let g = f.mul(&y().mul(&x().add(&c(1))).add(&h));
        assert!(bipoly_reduce_mod_curve(&g, &f).unwrap().is_zero());
    }

    #[test]
    fn rational_substitution() {
        let mut map = BTreeMap::new();
        map.insert(Var::new("x"), RatFn::new(c(1).sub(&t().pow(2)), c(1).add(&t().pow(2))).unwrap());
        map.insert(Var::new("y"), RatFn::new(t().scale(&Scalar::from_int(2)), c(1).add(&t().pow(2))).unwrap());
        let f = x().pow(2).add(&y().pow(2)).sub(&c(1));
        assert!(f.subs(&map).is_zero());
    }

    #[test]
    fn derivative() {
        let p = x().pow(3).mul(&y()).add(&x());
        assert_eq!(p.derivative(&Var::new("x")), x().pow(2).mul(&y()).scale(&Scalar::from_int(3)).add(&c(1)));
    }
}
