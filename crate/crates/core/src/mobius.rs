//! Möbius transformations `t ↦ (a t + b) / (c t + d)`: composition,
//! classification of the dynamics, the one-dimensional Lie symmetry and
//! conjugacy.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{ArithError, Field, MPoly, RatFn, Scalar, UPoly, Var};
use crate::vars;

/// Largest order tried when deciding whether a multiplier is a root of unity.
pub const ROOT_OF_UNITY_CAP: u32 = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobiusError {
    #[error("ad - bc = 0")]
    Singular,
    #[error("the identity has no dynamics to classify")]
    Identity,
    #[error("not a Möbius transformation: {0}")]
    NotMobius(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Coefficients of a Möbius map. The stored quadruple is one representative;
/// equality is projective.
#[derive(Clone, Debug)]
pub struct Mobius<K: Field> {
    pub a: K,
    pub b: K,
    pub c: K,
    pub d: K,
}

impl<K: Field> Mobius<K> {
    pub fn new(a: K, b: K, c: K, d: K) -> Result<Self, MobiusError> {
        let m = Mobius { a, b, c, d };
        if m.det().is_zero() {
            return Err(MobiusError::Singular);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Mobius {
            a: K::one(),
            b: K::zero(),
            c: K::zero(),
            d: K::one(),
        }
    }

    pub fn det(&self) -> K {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn trace(&self) -> K {
        self.a.add(&self.d)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Mobius {
            a: self.a.mul(&other.a).add(&self.b.mul(&other.c)),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.d)),
            c: self.c.mul(&other.a).add(&self.d.mul(&other.c)),
            d: self.c.mul(&other.b).add(&self.d.mul(&other.d)),
        }
    }

    pub fn inverse(&self) -> Self {
        Mobius {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Mobius::identity();
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Smallest `p ≤ cap` with `selfᵖ = id`.
    pub fn order(&self, cap: u32) -> Option<u32> {
        let mut acc = self.clone();
        for p in 1..=cap {
            if acc.is_identity() {
                return Some(p);
            }
            acc = acc.compose(self);
        }
        None
    }

    /// Projective equality: the coefficient vectors are proportional.
    pub fn proj_eq(&self, other: &Self) -> bool {
        let u = [&self.a, &self.b, &self.c, &self.d];
        let v = [&other.a, &other.b, &other.c, &other.d];
        for i in 0..4 {
            for j in i + 1..4 {
                if u[i].mul(v[j]) != u[j].mul(v[i]) {
                    return false;
                }
            }
        }
        true
    }

    /// `(a + d)² / (ad − bc)`, invariant under scaling and conjugation.
    pub fn conjugacy_invariant(&self) -> K {
        let tr = self.trace();
        tr.mul(&tr).div(&self.det())
    }

    /// `Y(t) = −b + (d − a) t + c t²`, satisfying `Y(M(t)) = M'(t) Y(t)`.
    pub fn lie_symmetry_1d(&self) -> UPoly<K> {
        UPoly::new(
            vars::t(),
            vec![self.b.neg(), self.d.sub(&self.a), self.c.clone()],
        )
    }

    /// `M(t)`, or `None` at the pole.
    pub fn apply(&self, t: &K) -> Option<K> {
        let den = self.c.mul(t).add(&self.d);
        if den.is_zero() {
            return None;
        }
        Some(self.a.mul(t).add(&self.b).div(&den))
    }

    /// `M'(t) = (ad − bc) / (ct + d)²`.
    pub fn derivative_at(&self, t: &K) -> Option<K> {
        let den = self.c.mul(t).add(&self.d);
        if den.is_zero() {
            return None;
        }
        Some(self.det().div(&den.mul(&den)))
    }

    /// `g⁻¹ ∘ self ∘ g`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.inverse().compose(self).compose(g)
    }

    pub fn map_coeffs<L: Field>(&self, f: impl Fn(&K) -> L) -> Mobius<L> {
        Mobius {
            a: f(&self.a),
            b: f(&self.b),
            c: f(&self.c),
            d: f(&self.d),
        }
    }
}

impl<K: Field> PartialEq for Mobius<K> {
    fn eq(&self, other: &Self) -> bool {
        self.proj_eq(other)
    }
}

impl Mobius<RatFn> {
    /// Conjugators `g` with `self = g⁻¹ ∘ other ∘ g`, coefficients rational
    /// in the parameters; empty when none is found.
    pub fn conjugators(&self, other: &Mobius<RatFn>) -> Vec<Mobius<RatFn>> {
        if self.conjugacy_invariant() != other.conjugacy_invariant() {
            return Vec::new();
        }
        let tr = other.trace();
        if tr.is_zero() {
            return Vec::new();
        }
        conjugator_candidates(self, other, &self.trace().div(&tr))
    }

    /// Reads `(a t + b) / (c t + d)` off a reduced rational function in `t`.
    ///
    /// The representative keeps the reduced fraction as is (its denominator
    /// has leading coefficient one); when `c = 0` it is scaled so `d = 1`.
    pub fn from_ratfn(r: &RatFn) -> Result<Self, MobiusError> {
        let t = vars::t();
        let (n, d) = (r.numer(), r.denom());
        if n.degree_in(&t) > 1 || d.degree_in(&t) > 1 {
            return Err(MobiusError::NotMobius(format!(
                "degree in t exceeds one: {r}"
            )));
        }
        let nc = n.coeffs_in(&t);
        let dc = d.coeffs_in(&t);
        let get = |v: &[MPoly], i: usize| RatFn::from_poly(v.get(i).cloned().unwrap_or_default());
        let (a, b, c, dd) = (get(&nc, 1), get(&nc, 0), get(&dc, 1), get(&dc, 0));
        let m = if c.is_zero() {
            let inv = dd.try_inv()?;
            Mobius::new(a.mul(&inv), b.mul(&inv), c, RatFn::one())?
        } else {
            Mobius::new(a, b, c, dd)?
        };
        Ok(m)
    }

    pub fn to_ratfn(&self) -> RatFn {
        let t = RatFn::var(&vars::t());
        self.a
            .mul(&t)
            .add(&self.b)
            .try_div(&self.c.mul(&t).add(&self.d))
            .expect("nonsingular")
    }

    /// Substitutes values for the symbolic parameters.
    pub fn specialize(&self, values: &BTreeMap<Var, Scalar>) -> Result<Mobius<Scalar>, MobiusError> {
        let ev = |r: &RatFn| -> Result<Scalar, MobiusError> {
            let e = r.eval_partial(values)?;
            e.constant_value()
                .filter(|_| e.vars().is_empty())
                .ok_or_else(|| MobiusError::NotMobius(format!("coefficient {r} is not fully specified")))
        };
        Mobius::new(ev(&self.a)?, ev(&self.b)?, ev(&self.c)?, ev(&self.d)?)
    }
}

impl Mobius<Scalar> {
    pub fn from_ratfn(r: &RatFn) -> Result<Self, MobiusError> {
        let m = Mobius::<RatFn>::from_ratfn(r)?;
        m.specialize(&BTreeMap::new())
    }

    pub fn checked(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self, MobiusError> {
        let ds: Vec<i64> = [&a, &b, &c, &d]
            .iter()
            .map(|s| s.radicand())
            .filter(|&d| d != 1)
            .collect();
        if let Some(w) = ds.windows(2).find(|w| w[0] != w[1]) {
            return Err(ArithError::MixedExtensions(w[0], w[1]).into());
        }
        Mobius::new(a, b, c, d)
    }

    pub fn radicand(&self) -> i64 {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .map(|s| s.radicand())
            .find(|&d| d != 1)
            .unwrap_or(1)
    }

    pub fn is_real(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|s| s.is_real())
    }

    pub fn to_complex(&self) -> [Complex64; 4] {
        [
            self.a.to_complex(),
            self.b.to_complex(),
            self.c.to_complex(),
            self.d.to_complex(),
        ]
    }

    pub fn to_ratfn(&self) -> RatFn {
        self.map_coeffs(|s| RatFn::constant(s.clone())).to_ratfn()
    }

    /// Full dynamical classification.
    pub fn classify(&self) -> Result<MobiusClass, MobiusError> {
        classify(self)
    }

    /// Some `g` with `self = g⁻¹ ∘ other ∘ g`, or `None` when the maps are
    /// not conjugate (over the fields available).
    pub fn solve_conjugator(&self, other: &Self) -> Option<Mobius<Scalar>> {
        solve_conjugator(self, other)
    }
}

impl fmt::Display for Mobius<RatFn> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ratfn())
    }
}

impl fmt::Display for Mobius<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ratfn())
    }
}

/// A fixed point on the projective line.
#[derive(Clone, Debug, PartialEq)]
pub enum FixedPoint {
    Finite(Scalar),
    Infinity,
    /// Not representable in the coefficient field; floating approximation.
    Approx(Complex64),
}

impl FixedPoint {
    pub fn to_complex(&self) -> Option<Complex64> {
        match self {
            FixedPoint::Finite(s) => Some(s.to_complex()),
            FixedPoint::Infinity => None,
            FixedPoint::Approx(z) => Some(*z),
        }
    }

    pub fn as_exact(&self) -> Option<&Scalar> {
        match self {
            FixedPoint::Finite(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Multiplier {
    Exact(Scalar),
    Approx(Complex64),
}

impl Multiplier {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Multiplier::Exact(s) => s.to_complex(),
            Multiplier::Approx(z) => *z,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DynamicsClass {
    /// `t0` attracting, `t1` repelling.
    Hyperbolic,
    /// Single fixed point `t0`, globally attracting.
    Parabolic,
    /// Conjugate to the rotation by `theta` (in turns); `order` is the exact
    /// period when the multiplier is a root of unity.
    Rotation { theta: f64, order: Option<u32> },
}

impl DynamicsClass {
    pub fn name(&self) -> &'static str {
        match self {
            DynamicsClass::Hyperbolic => "hyperbolic",
            DynamicsClass::Parabolic => "parabolic",
            DynamicsClass::Rotation { .. } => "rotation",
        }
    }
}

/// Result of [`classify`]: `M'(t0) = 1/ξ` and `M'(t1) = ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusClass {
    pub delta: Scalar,
    pub xi: Option<Multiplier>,
    pub t0: FixedPoint,
    pub t1: Option<FixedPoint>,
    pub class: DynamicsClass,
}

impl MobiusClass {
    pub fn theta(&self) -> Option<f64> {
        match self.class {
            DynamicsClass::Rotation { theta, .. } => Some(theta),
            _ => None,
        }
    }

    pub fn order(&self) -> Option<u32> {
        match self.class {
            DynamicsClass::Rotation { order, .. } => order,
            _ => None,
        }
    }
}

/// Angle of `z` in turns, normalized to `[0, 1)`.
pub fn turns(z: Complex64) -> f64 {
    let mut th = z.arg() / (2.0 * PI);
    if th < 0.0 {
        th += 1.0;
    }
    if th >= 1.0 {
        th -= 1.0;
    }
    th
}

fn is_principal(z: Complex64) -> bool {
    z.re > 0.0 || (z.re == 0.0 && z.im >= 0.0)
}

/// Orders `|ξ|` against 1 exactly.
fn abs_cmp_one(xi: &Scalar) -> Ordering {
    if xi.is_real() {
        let one = Scalar::one();
        let above = xi.real_cmp(&one).expect("real");
        let below = xi.real_cmp(&-&one).expect("real");
        if above == Ordering::Greater || below == Ordering::Less {
            Ordering::Greater
        } else if above == Ordering::Equal || below == Ordering::Equal {
            Ordering::Equal
        } else {
            Ordering::Less
        }
    } else {
        // d < 0: |p + q√d|² = p² − d q² is the norm
        let n = xi.norm();
        n.cmp(&num_rational::BigRational::from_integer(1.into()))
    }
}

fn root_of_unity_order(xi: &Scalar) -> Option<u32> {
    let mut acc = xi.clone();
    for p in 1..=ROOT_OF_UNITY_CAP {
        if acc.is_one() {
            return Some(p);
        }
        acc = &acc * xi;
    }
    None
}

/// Square root of Δ on the branch used throughout: for real maps with
/// Δ < 0, `Im(√Δ)·sign(c) < 0`; otherwise the principal root.
fn branch_sqrt_exact(m: &Mobius<Scalar>, delta: &Scalar) -> Result<Option<Scalar>, ArithError> {
    let Some(mut s) = delta.sqrt()? else {
        return Ok(None);
    };
    let z = s.to_complex();
    let flip = if m.is_real() && delta.real_sign() == Some(Ordering::Less) {
        let c_sign = m.c.real_sign().expect("real");
        (z.im > 0.0) == (c_sign == Ordering::Greater)
    } else {
        !is_principal(z)
    };
    if flip {
        s = -s;
    }
    Ok(Some(s))
}

fn branch_sqrt_float(m: &Mobius<Scalar>, delta: Complex64) -> Complex64 {
    let mut s = delta.sqrt();
    if m.is_real() && delta.re < 0.0 && delta.im == 0.0 {
        let c = m.c.to_f64();
        if (s.im > 0.0) == (c > 0.0) {
            s = -s;
        }
    }
    s
}

/// Classifies the dynamics of a non-identity Möbius map.
pub fn classify(m: &Mobius<Scalar>) -> Result<MobiusClass, MobiusError> {
    if m.is_identity() {
        return Err(MobiusError::Identity);
    }
    let (a, b, c, d) = (&m.a, &m.b, &m.c, &m.d);
    let dma = d.try_sub(a)?;
    let delta = dma.try_mul(&dma)?.try_add(&Scalar::from_int(4).try_mul(b)?.try_mul(c)?)?;

    if c.is_zero() {
        // affine: ∞ is fixed
        if delta.is_zero() {
            return Ok(MobiusClass {
                delta,
                xi: None,
                t0: FixedPoint::Infinity,
                t1: None,
                class: DynamicsClass::Parabolic,
            });
        }
        let t0 = b.try_div(&dma)?;
        let xi = d.try_div(a)?;
        let class = exact_class(&xi);
        return Ok(attractor_first(MobiusClass {
            delta,
            xi: Some(Multiplier::Exact(xi)),
            t0: FixedPoint::Finite(t0),
            t1: Some(FixedPoint::Infinity),
            class,
        }));
    }

    let two_c = Scalar::from_int(2).try_mul(c)?;
    let amd = a.try_sub(d)?;
    if delta.is_zero() {
        return Ok(MobiusClass {
            delta,
            xi: None,
            t0: FixedPoint::Finite(amd.try_div(&two_c)?),
            t1: None,
            class: DynamicsClass::Parabolic,
        });
    }
    let tr = a.try_add(d)?;
    let exact = (|| -> Result<Option<(Scalar, Scalar, Scalar)>, ArithError> {
        let Some(s) = branch_sqrt_exact(m, &delta)? else {
            return Ok(None);
        };
        let xi = tr.try_add(&s)?.try_div(&tr.try_sub(&s)?)?;
        let t0 = amd.try_add(&s)?.try_div(&two_c)?;
        let t1 = amd.try_sub(&s)?.try_div(&two_c)?;
        Ok(Some((xi, t0, t1)))
    })();
    if let Ok(Some((xi, t0, t1))) = exact {
        let class = exact_class(&xi);
        return Ok(attractor_first(MobiusClass {
            delta,
            xi: Some(Multiplier::Exact(xi)),
            t0: FixedPoint::Finite(t0),
            t1: Some(FixedPoint::Finite(t1)),
            class,
        }));
    }

    // √Δ lies outside the coefficient field: finish in floating point
    let [ca, _, cc, cd] = m.to_complex();
    let s = branch_sqrt_float(m, delta.to_complex());
    let xi = (ca + cd + s) / (ca + cd - s);
    let t0 = (ca - cd + s) / (2.0 * cc);
    let t1 = (ca - cd - s) / (2.0 * cc);
    let class = if (xi.norm() - 1.0).abs() < 1e-12 {
        let theta = turns(xi);
        let order = (1..=ROOT_OF_UNITY_CAP).find(|&p| (xi.powu(p) - 1.0).norm() < 1e-9);
        DynamicsClass::Rotation { theta, order }
    } else {
        DynamicsClass::Hyperbolic
    };
    Ok(attractor_first(MobiusClass {
        delta,
        xi: Some(Multiplier::Approx(xi)),
        t0: FixedPoint::Approx(t0),
        t1: Some(FixedPoint::Approx(t1)),
        class,
    }))
}

/// Swaps the fixed points of a hyperbolic map so that `t0` attracts
/// (`|ξ| > 1`).
fn attractor_first(mut c: MobiusClass) -> MobiusClass {
    if c.class != DynamicsClass::Hyperbolic {
        return c;
    }
    let swap = match &c.xi {
        Some(Multiplier::Exact(xi)) => abs_cmp_one(xi) == Ordering::Less,
        Some(Multiplier::Approx(z)) => z.norm() < 1.0,
        None => false,
    };
    if swap {
        if let Some(t1) = c.t1.take() {
            c.t1 = Some(std::mem::replace(&mut c.t0, t1));
        }
        c.xi = c.xi.map(|m| match m {
            Multiplier::Exact(xi) => Multiplier::Exact(xi.try_inv().expect("nonzero multiplier")),
            Multiplier::Approx(z) => Multiplier::Approx(1.0 / z),
        });
    }
    c
}

fn exact_class(xi: &Scalar) -> DynamicsClass {
    match abs_cmp_one(xi) {
        Ordering::Equal => DynamicsClass::Rotation {
            theta: turns(xi.to_complex()),
            order: root_of_unity_order(xi),
        },
        _ => DynamicsClass::Hyperbolic,
    }
}

/// Null space of a small matrix by Gaussian elimination.
fn nullspace<K: Field>(mut rows: Vec<Vec<K>>, n: usize) -> Vec<Vec<K>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv();
        rows[r] = rows[r].iter().map(|v| v.mul(&inv)).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                rows[i] = rows[i]
                    .iter()
                    .zip(&rows[r])
                    .map(|(x, y)| x.sub(&f.mul(y)))
                    .collect();
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![K::zero(); n];
            v[fc] = K::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = rows[i][fc].neg();
            }
            v
        })
        .collect()
}

/// Möbius maps `g` with `m = g⁻¹ ∘ n ∘ g`, from the null space of the
/// linear system `G·A = μ·B·G`: the basis vectors and a few combinations,
/// each verified by composition.
fn conjugator_candidates<K: Field>(m: &Mobius<K>, n: &Mobius<K>, mu: &K) -> Vec<Mobius<K>> {
    let (a, b, c, d) = (&m.a, &m.b, &m.c, &m.d);
    let mb = |s: &K| mu.mul(s);
    let z = K::zero();
    let rows = vec![
        vec![a.sub(&mb(&n.a)), c.clone(), mb(&n.b).neg(), z.clone()],
        vec![b.clone(), d.sub(&mb(&n.a)), z.clone(), mb(&n.b).neg()],
        vec![mb(&n.c).neg(), z.clone(), a.sub(&mb(&n.d)), c.clone()],
        vec![z.clone(), mb(&n.c).neg(), b.clone(), d.sub(&mb(&n.d))],
    ];
    let basis = nullspace(rows, 4);
    let mut candidates: Vec<Vec<K>> = basis.clone();
    if basis.len() >= 2 {
        let mut k = K::zero();
        for _ in 0..3 {
            k = k.add(&K::one());
            candidates.push(basis[0].iter().zip(&basis[1]).map(|(x, y)| x.add(&k.mul(y))).collect());
            candidates.push(basis[0].iter().zip(&basis[1]).map(|(x, y)| x.sub(&k.mul(y))).collect());
        }
    }
    candidates
        .into_iter()
        .filter_map(|v| Mobius::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()).ok())
        .filter(|g| m.proj_eq(&n.conjugate_by(g)))
        .collect()
}

fn solve_conjugator(m: &Mobius<Scalar>, n: &Mobius<Scalar>) -> Option<Mobius<Scalar>> {
    let inv_m = m.checked_invariant()?;
    let inv_n = n.checked_invariant()?;
    if !inv_m.try_sub(&inv_n).ok()?.is_zero() {
        return None;
    }
    if m.is_identity() || n.is_identity() {
        return (m.is_identity() && n.is_identity()).then(Mobius::identity);
    }
    let tr_n = n.trace();
    let mu = if !tr_n.is_zero() {
        m.trace().try_div(&tr_n).ok()?
    } else {
        m.det().try_div(&n.det()).ok()?.sqrt().ok()??
    };
    let solve = || -> Result<Option<Mobius<Scalar>>, ArithError> {
        Ok(conjugator_candidates(m, n, &mu).into_iter().next())
    };
    // elimination below uses infallible field operations
    let mut fields: Vec<i64> = vec![m.radicand(), n.radicand(), mu.radicand()];
    fields.retain(|&d| d != 1);
    fields.dedup();
    if fields.len() > 1 {
        return None;
    }
    solve().ok()?
}

impl Mobius<Scalar> {
    fn checked_invariant(&self) -> Option<Scalar> {
        let tr = self.a.try_add(&self.d).ok()?;
        let det = self
            .a
            .try_mul(&self.d)
            .ok()?
            .try_sub(&self.b.try_mul(&self.c).ok()?)
            .ok()?;
        tr.try_mul(&tr).ok()?.try_div(&det).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_scalar;

    fn s(src: &str) -> Scalar {
        parse_scalar(src).unwrap()
    }

    fn mob(a: &str, b: &str, c: &str, d: &str) -> Mobius<Scalar> {
        Mobius::new(s(a), s(b), s(c), s(d)).unwrap()
    }

    fn br(h: &str) -> Mobius<Scalar> {
        let h = s(h);
        Mobius::new(&h + &Scalar::one(), Scalar::from_int(-1), Scalar::one(), Scalar::one()).unwrap()
    }

    #[test]
    fn composition_and_inverse() {
        let m = br("3");
        assert!(m.compose(&m.inverse()).is_identity());
        let w = s("-1/2 + 1/2*sqrt(-3)");
        let saito = Mobius::new(w, Scalar::zero(), Scalar::one(), Scalar::one()).unwrap();
        assert!(saito.pow(3).is_identity());
        assert_eq!(saito.order(12), Some(3));
    }

    #[test]
    fn classify_br() {
        let k = br("3").classify().unwrap();
        assert_eq!(k.class, DynamicsClass::Hyperbolic);
        assert_eq!(k.delta, Scalar::from_int(5));
        let fps = [k.t0.as_exact().unwrap().clone(), k.t1.unwrap().as_exact().unwrap().clone()];
        assert!(fps.contains(&s("3/2 + 1/2*sqrt(5)")));
        assert!(fps.contains(&s("3/2 - 1/2*sqrt(5)")));

        let k = br("2").classify().unwrap();
        assert_eq!(k.class, DynamicsClass::Parabolic);
        assert_eq!(k.t0, FixedPoint::Finite(Scalar::one()));

        let k = br("3/2").classify().unwrap();
        let expected = turns(Complex64::new(1.5, -(4.0f64 - 2.25).sqrt()) / 2.0);
        assert!((k.theta().unwrap() - expected).abs() < 1e-12);
        assert!((k.theta().unwrap() - 0.884973).abs() < 1e-6);
    }

    #[test]
    fn classify_saito_roots_of_unity() {
        let i = Scalar::i();
        let m = Mobius::new(i.clone(), Scalar::zero(), Scalar::one(), Scalar::one()).unwrap();
        let k = m.classify().unwrap();
        assert_eq!(k.xi, Some(Multiplier::Exact(-&i)));
        assert_eq!(k.class, DynamicsClass::Rotation { theta: 0.75, order: Some(4) });
        let m = mob("-1", "0", "1", "1");
        assert_eq!(m.classify().unwrap().order(), Some(2));
    }

    #[test]
    fn affine_maps() {
        // t/2 + 1 attracts to 2
        let k = mob("1/2", "1", "0", "1").classify().unwrap();
        assert_eq!(k.t0, FixedPoint::Finite(Scalar::from_int(2)));
        assert_eq!(k.t1, Some(FixedPoint::Infinity));
        assert_eq!(k.class, DynamicsClass::Hyperbolic);
        let k = mob("1", "1", "0", "1").classify().unwrap();
        assert_eq!(k.class, DynamicsClass::Parabolic);
        assert_eq!(k.t0, FixedPoint::Infinity);
        assert!(Mobius::<Scalar>::identity().classify().is_err());
    }

    #[test]
    fn lie_symmetry() {
        let y = br("3").lie_symmetry_1d();
        assert_eq!(y.coeffs(), &[Scalar::one(), Scalar::from_int(-3), Scalar::one()]);
    }

    #[test]
    fn conjugators() {
        let m = br("3");
        assert_eq!(m.conjugacy_invariant(), Scalar::from_int(5));
        let g = mob("2", "1", "1", "1");
        let n = m.conjugate_by(&g.inverse());
        let found = m.solve_conjugator(&n).unwrap();
        assert_eq!(n.conjugate_by(&found), m);
        let saito = mob("3", "0", "1", "1");
        assert!(m.solve_conjugator(&saito).is_none());
        // involutions t ↦ 1/t and t ↦ 2/t are conjugate over Q(√2)
        let a = mob("0", "1", "1", "0");
        let b = mob("0", "2", "1", "0");
        let g = a.solve_conjugator(&b).unwrap();
        assert_eq!(b.conjugate_by(&g), a);
    }
}
