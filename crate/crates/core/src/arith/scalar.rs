//! Exact scalars in ℚ or a single quadratic extension ℚ(√d).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ArithError;

/// Exact element `p + q·√d` of ℚ(√d).
///
/// Canonical form: `d` is a square-free integer different from 1 whenever
/// `q ≠ 0`, and `d == 1` exactly when `q == 0`. For `d < 0`, `√d` denotes
/// `i·√|d|`. Structural equality is therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    p: BigRational,
    q: BigRational,
    d: i64,
}

/// A field value that is either exact or an explicitly downcast complex float.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Scalar),
    Float(Complex64),
}

impl Number {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Number::Exact(s) => s.to_complex(),
            Number::Float(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&Scalar> {
        match self {
            Number::Exact(s) => Some(s),
            Number::Float(_) => None,
        }
    }
}

/// Binary operation selector for [`scalar_ops`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies `op` to two field values.
///
/// Exact operands must live in a common field; an exact and a float operand
/// are never mixed implicitly (call [`Number::to_complex`] first).
pub fn scalar_ops(lhs: &Number, rhs: &Number, op: ScalarOp) -> Result<Number, ArithError> {
    match (lhs, rhs) {
        (Number::Exact(a), Number::Exact(b)) => {
            let r = match op {
                ScalarOp::Add => a.try_add(b)?,
                ScalarOp::Sub => a.try_sub(b)?,
                ScalarOp::Mul => a.try_mul(b)?,
                ScalarOp::Div => a.try_div(b)?,
            };
            Ok(Number::Exact(r))
        }
        (Number::Float(a), Number::Float(b)) => {
            let r = match op {
                ScalarOp::Add => a + b,
                ScalarOp::Sub => a - b,
                ScalarOp::Mul => a * b,
                ScalarOp::Div => {
                    if b.norm_sqr() == 0.0 {
                        return Err(ArithError::DivisionByZero);
                    }
                    a / b
                }
            };
            Ok(Number::Float(r))
        }
        _ => Err(ArithError::ExactFloatMix),
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n / d`; panics on `d == 0`.
    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_rational(ratio(n, d))
    }

    pub fn from_rational(p: BigRational) -> Self {
        Scalar {
            p,
            q: BigRational::zero(),
            d: 1,
        }
    }

    /// `p + q·√d` for any nonzero integer `d`; square factors of `d` are
    /// moved into `q`.
    pub fn quadratic(p: BigRational, q: BigRational, d: i64) -> Result<Self, ArithError> {
        if d == 0 {
            return Err(ArithError::InvalidExtension(0));
        }
        let (k, s) = squarefree_split(&BigInt::from(d))?;
        let q = q * BigRational::from_integer(k);
        Ok(Self::canonical(p, q, s))
    }

    /// The imaginary unit `√−1`.
    pub fn i() -> Self {
        Self::canonical(BigRational::zero(), BigRational::one(), -1)
    }

    fn canonical(p: BigRational, q: BigRational, d: i64) -> Self {
        if q.is_zero() || d == 1 {
            let p = if d == 1 { p + q } else { p };
            Scalar {
                p,
                q: BigRational::zero(),
                d: 1,
            }
        } else {
            Scalar { p, q, d }
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.p
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.q
    }

    /// The square-free radicand, or 1 for rationals.
    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.p.is_one() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.p)
    }

    /// True when the value lies on the real line.
    pub fn is_real(&self) -> bool {
        self.q.is_zero() || self.d > 0
    }

    fn common_d(&self, other: &Scalar) -> Result<i64, ArithError> {
        match (self.d, other.d) {
            (1, d) | (d, 1) => Ok(d),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(ArithError::MixedExtensions(a, b)),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        let d = self.common_d(other)?;
        Ok(Self::canonical(&self.p + &other.p, &self.q + &other.q, d))
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        let d = self.common_d(other)?;
        Ok(Self::canonical(&self.p - &other.p, &self.q - &other.q, d))
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        let d = self.common_d(other)?;
        let dd = BigRational::from_integer(BigInt::from(d));
        let p = &self.p * &other.p + &self.q * &other.q * dd;
        let q = &self.p * &other.q + &self.q * &other.p;
        Ok(Self::canonical(p, q, d))
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        self.try_mul(&other.try_inv()?)
    }

    pub fn try_inv(&self) -> Result<Scalar, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::canonical(&self.p / &n, -(&self.q / &n), self.d))
    }

    /// Field norm `p² − d·q²`; equals `|z|²` when `d < 0`.
    pub fn norm(&self) -> BigRational {
        let dd = BigRational::from_integer(BigInt::from(self.d));
        &self.p * &self.p - &self.q * &self.q * dd
    }

    /// Galois conjugate `p − q·√d` (complex conjugate when `d < 0`).
    pub fn conj(&self) -> Scalar {
        Self::canonical(self.p.clone(), -self.q.clone(), self.d)
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact sign of a real value; `None` for non-real values.
    pub fn real_sign(&self) -> Option<Ordering> {
        if !self.is_real() {
            return None;
        }
        if self.q.is_zero() {
            return Some(self.p.cmp(&BigRational::zero()));
        }
        // p + q√d with d > 0
        let sp = self.p.cmp(&BigRational::zero());
        let sq = self.q.cmp(&BigRational::zero());
        if sp == sq || sp == Ordering::Equal {
            return Some(sq);
        }
        // opposite signs: compare p² with d q²
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let lhs = &self.p * &self.p;
        let rhs = &self.q * &self.q * dd;
        Some(match lhs.cmp(&rhs) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => Ordering::Equal,
        })
    }

    /// Exact comparison of two real values.
    pub fn real_cmp(&self, other: &Scalar) -> Option<Ordering> {
        self.try_sub(other).ok()?.real_sign()
    }

    /// Square root, exact when it exists.
    ///
    /// Rationals always have a root (possibly opening ℚ(√s)); for
    /// `r < 0` the root `i·√|r|` is returned. Non-rational elements have
    /// a root only when they are squares in their own field. The root of
    /// a rational is the one with nonnegative real part, or positive
    /// imaginary part when purely imaginary.
    pub fn sqrt(&self) -> Result<Option<Scalar>, ArithError> {
        if self.is_zero() {
            return Ok(Some(Scalar::zero()));
        }
        if self.is_rational() {
            return rational_sqrt(&self.p).map(Some);
        }
        // (u + v√d)² = u² + d v² + 2uv√d
        let norm = self.norm();
        let Some(n) = rational_exact_sqrt(&norm) else {
            return Ok(None);
        };
        let two = BigRational::from_integer(BigInt::from(2));
        for cand in [(&self.p + &n) / &two, (&self.p - &n) / &two] {
            if let Some(u) = rational_exact_sqrt(&cand) {
                if u.is_zero() {
                    continue;
                }
                let v = &self.q / (&two * &u);
                let root = Self::canonical(u, v, self.d);
                debug_assert_eq!(&(&root * &root), self);
                return Ok(Some(root));
            }
        }
        Ok(None)
    }

    pub fn to_complex(&self) -> Complex64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        if self.d < 0 {
            Complex64::new(p, q * ((-self.d) as f64).sqrt())
        } else {
            Complex64::new(p + q * (self.d as f64).sqrt(), 0.0)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }

    /// Decimal expansion of a real value with `digits` fractional digits
    /// (truncated toward zero, last digit may be off by one for radicals).
    pub fn to_decimal(&self, digits: usize) -> Option<String> {
        if !self.is_real() {
            return None;
        }
        let scale = BigInt::from(10).pow(digits as u32);
        let mut scaled = (&self.p * BigRational::from_integer(scale.clone())).trunc().to_integer();
        if !self.q.is_zero() {
            // |q|·√d·10^digits = √(q² d 10^(2 digits))
            let sq = &self.q * &self.q * BigRational::from_integer(BigInt::from(self.d));
            let num = sq.numer() * sq.denom() * &scale * &scale;
            let root = num.sqrt() / sq.denom();
            if self.q.is_negative() {
                scaled -= root;
            } else {
                scaled += root;
            }
        }
        let neg = scaled.is_negative();
        let digits_str = scaled.abs().to_string();
        let padded = format!("{:0>width$}", digits_str, width = digits + 1);
        let (int_part, frac_part) = padded.split_at(padded.len() - digits);
        Some(format!(
            "{}{}.{}",
            if neg { "-" } else { "" },
            int_part,
            frac_part
        ))
    }
}

/// Exact rational square root when `r` is a perfect square.
pub(crate) fn rational_exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

fn rational_sqrt(r: &BigRational) -> Result<Scalar, ArithError> {
    // √(n/m) = √(n·m)/m
    let nm = r.numer() * r.denom();
    let (k, s) = squarefree_split(&nm)?;
    let coeff = BigRational::new(k, r.denom().clone());
    if s == 1 {
        Ok(Scalar::from_rational(coeff))
    } else {
        Ok(Scalar::canonical(BigRational::zero(), coeff, s))
    }
}

const TRIAL_LIMIT: u64 = 2_000_000;

/// Writes `n = k²·s` with `s` square-free (sign kept in `s`).
pub(crate) fn squarefree_split(n: &BigInt) -> Result<(BigInt, i64), ArithError> {
    if n.is_zero() {
        return Ok((BigInt::zero(), 0));
    }
    let sign: i64 = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut m = n.abs();
    let mut k = BigInt::one();
    let mut s = BigInt::one();
    let mut p: u64 = 2;
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb * &pb > m {
            break;
        }
        if p > TRIAL_LIMIT {
            return Err(ArithError::RadicandTooLarge(n.to_string()));
        }
        let mut e = 0u32;
        while m.is_multiple_of(&pb) {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            k *= pb.pow(e / 2);
            if e % 2 == 1 {
                s *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // m has at most two prime factors left
    let r = m.sqrt();
    if &r * &r == m {
        k *= r;
    } else {
        s *= m;
    }
    let s = (s * sign)
        .to_i64()
        .ok_or_else(|| ArithError::RadicandTooLarge(n.to_string()))?;
    Ok((k, s))
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a> std::ops::$tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            /// Panics if the operands live in different extensions.
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                self.$try(rhs).expect("incompatible scalar fields")
            }
        }
        impl std::ops::$tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$try(&rhs).expect("incompatible scalar fields")
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);
forward_op!(Div, div, try_div);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::canonical(-self.p.clone(), -self.q.clone(), self.d)
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Parser-compatible form: `3/4`, `sqrt(5)`, `1/2 - 3/2*sqrt(-3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", fmt_rational(&self.p));
        }
        let rad = if self.q.is_one() {
            format!("sqrt({})", self.d)
        } else if (-self.q.clone()).is_one() {
            format!("-sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", fmt_rational(&self.q), self.d)
        };
        if self.p.is_zero() {
            write!(f, "{rad}")
        } else if let Some(stripped) = rad.strip_prefix('-') {
            write!(f, "{} - {}", fmt_rational(&self.p), stripped)
        } else {
            write!(f, "{} + {}", fmt_rational(&self.p), rad)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
