//! Dense univariate polynomials over an arbitrary [`Field`].

use std::fmt;

use super::{Field, MPoly, Monomial, RatFn, Scalar, Var};

/// Coefficients low to high; the zero polynomial has no coefficients and
/// `degree() == None`.
#[derive(Clone, PartialEq)]
pub struct UPoly<K: Field> {
    var: Var,
    coeffs: Vec<K>,
}

impl<K: Field> UPoly<K> {
    pub fn new(var: Var, mut coeffs: Vec<K>) -> Self {
        while coeffs.last().is_some_and(Field::is_zero) {
            coeffs.pop();
        }
        UPoly { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        UPoly {
            var,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(var: Var, c: K) -> Self {
        UPoly::new(var, vec![c])
    }

    /// The monomial `var`.
    pub fn x(var: Var) -> Self {
        UPoly::new(var, vec![K::zero(), K::one()])
    }

    pub fn var(&self) -> &Var {
        &self.var
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(K::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> K {
        self.coeffs.last().cloned().unwrap_or_else(K::zero)
    }

    fn zip(&self, other: &Self, f: impl Fn(&K, &K) -> K) -> Self {
        assert_eq!(self.var, other.var, "variable mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f(&self.coeff(i), &other.coeff(i)))
            .collect();
        UPoly::new(self.var.clone(), coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.var, other.var, "variable mismatch");
        if self.is_zero() || other.is_zero() {
            return UPoly::zero(self.var.clone());
        }
        let mut out = vec![K::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UPoly::new(self.var.clone(), out)
    }

    pub fn scale(&self, c: &K) -> Self {
        UPoly::new(
            self.var.clone(),
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading_coeff().inv())
    }

    /// Euclidean division; panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let inv = divisor.leading_coeff().inv();
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (UPoly::zero(self.var.clone()), self.clone());
        }
        let mut quot = vec![K::zero(); n - dd];
        for k in (dd..n).rev() {
            let q = rem[k].mul(&inv);
            if q.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] = rem[k - dd + j].sub(&q.mul(dc));
            }
            quot[k - dd] = q;
        }
        rem.truncate(dd);
        (
            UPoly::new(self.var.clone(), quot),
            UPoly::new(self.var.clone(), rem),
        )
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let mut acc = K::zero();
                for _ in 0..i {
                    acc = acc.add(c);
                }
                acc
            })
            .collect();
        UPoly::new(self.var.clone(), coeffs)
    }

    pub fn eval(&self, x: &K) -> K {
        self.coeffs
            .iter()
            .rev()
            .fold(K::zero(), |acc, c| acc.mul(x).add(c))
    }
}

/// Monic gcd by the Euclidean algorithm; `gcd(0, 0) = 0`.
pub fn poly_gcd<K: Field>(p: &UPoly<K>, q: &UPoly<K>) -> UPoly<K> {
    let (mut a, mut b) = (p.clone(), q.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

impl UPoly<Scalar> {
    /// Views a polynomial in one variable; `None` if other variables occur.
    pub fn from_mpoly(p: &MPoly, var: &Var) -> Option<Self> {
        let coeffs = p
            .coeffs_in(var)
            .into_iter()
            .map(|c| c.constant_value())
            .collect::<Option<Vec<_>>>()?;
        Some(UPoly::new(var.clone(), coeffs))
    }

    pub fn to_mpoly(&self) -> MPoly {
        MPoly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(&self.var, i as u32), c.clone())),
        )
    }
}

impl UPoly<RatFn> {
    /// Polynomial in `var` with coefficients in the other variables.
    pub fn from_mpoly_over(p: &MPoly, var: &Var) -> Self {
        UPoly::new(
            var.clone(),
            p.coeffs_in(var).into_iter().map(RatFn::from_poly).collect(),
        )
    }

    pub fn to_ratfn(&self) -> RatFn {
        let t = RatFn::var(&self.var);
        self.eval(&t)
    }
}

impl<K: Field + fmt::Display> fmt::Display for UPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*{}", self.var)?,
                _ => write!(f, "({c})*{}^{i}", self.var)?,
            }
        }
        Ok(())
    }
}

impl<K: Field> fmt::Debug for UPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly({}, {:?})", self.var, self.coeffs)
    }
}
