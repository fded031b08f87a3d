//! Scalar rings used throughout: exact rationals, quadratic fields, `Z/p^M`,
//! and the shared `Ring`/`Field` traits that the generic linear algebra and
//! coefficient modules are written against.

pub mod poly;
pub mod quad;
pub mod zmod;

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use quad::Quad;
pub use zmod::Zp;

/// Exact rational numbers.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// A commutative ring whose elements may carry context (a modulus, a
/// truncation order), so constants are built "like" an existing element.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    fn from_bigint_like(&self, n: &BigInt) -> Self;
    /// `None` when the rational does not live in the ring (e.g. `1/p` in `Z/p^M`).
    fn from_q_like(&self, x: &Q) -> Option<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn vanishes(&self) -> bool;

    fn add_assign(&mut self, o: &Self) {
        *self = self.add(o);
    }

    fn mul_i64(&self, n: i64) -> Self {
        self.mul(&self.from_i64_like(n))
    }

    /// Division by a nonzero integer that is known to divide the value.
    /// Rings of finite precision lose `v_p(n)` digits here.
    fn div_int(&self, n: i64) -> Self;

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;

    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }
}

impl Ring for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        q(n)
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        Q::from_integer(n.clone())
    }
    fn from_q_like(&self, x: &Q) -> Option<Self> {
        Some(x.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn div_int(&self, n: i64) -> Self {
        self / q(n)
    }
}

impl Field for Q {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// `v_p` of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (qq, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = qq;
        v += 1;
    }
}

/// `v_p` of a nonzero rational.
pub fn vp_q(x: &Q, p: u64) -> i64 {
    vp_int(x.numer(), p) as i64 - vp_int(x.denom(), p) as i64
}

pub fn vp_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Content-normalise a rational vector: scale to coprime integers with the
/// first nonzero entry positive. Returns the scale factor used.
pub fn content_normalise(v: &mut [Q]) -> Q {
    let mut den = BigInt::one();
    for x in v.iter() {
        den = den.lcm(x.denom());
    }
    let mut g = BigInt::zero();
    for x in v.iter() {
        let n = x.numer() * (&den / x.denom());
        g = g.gcd(&n);
    }
    if g.is_zero() {
        return Q::one();
    }
    let mut scale = Q::new(den, g);
    if let Some(first) = v.iter().find(|x| !Zero::is_zero(*x)) {
        if first.is_negative() {
            scale = -scale;
        }
    }
    for x in v.iter_mut() {
        *x = &*x * &scale;
    }
    scale
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_normalisation_gives_coprime_integers() {
        let mut v = vec![q_frac(2, 3), q_frac(-4, 9), q(0)];
        content_normalise(&mut v);
        assert_eq!(v, vec![q(3), q(-2), q(0)]);
    }

    #[test]
    fn rational_valuations() {
        assert_eq!(vp_q(&q_frac(18, 5), 3), 2);
        assert_eq!(vp_q(&q_frac(5, 27), 3), -3);
    }
}
