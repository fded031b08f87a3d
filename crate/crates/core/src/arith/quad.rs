//! Exact arithmetic in `Q(sqrt(D))`, used when a Hecke polynomial does not
//! split over `Q` (the roots then live in a quadratic field).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{q, Field, Ring, Q};

/// `a + b*sqrt(d)` with `d` a non-square integer.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quad {
    pub a: Q,
    pub b: Q,
    pub d: i64,
}

impl Quad {
    pub fn new(a: Q, b: Q, d: i64) -> Self {
        Quad { a, b, d }
    }

    pub fn rational(a: Q, d: i64) -> Self {
        Quad { a, b: Q::zero(), d }
    }

    pub fn sqrt_d(d: i64) -> Self {
        Quad {
            a: Q::zero(),
            b: Q::one(),
            d,
        }
    }

    pub fn conj(&self) -> Self {
        Quad {
            a: self.a.clone(),
            b: -&self.b,
            d: self.d,
        }
    }

    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * q(self.d)
    }

    pub fn trace(&self) -> Q {
        &self.a + &self.a
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.b.is_zero() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    /// The two roots of `x^2 + c1*x + c0`, with discriminant square-free part
    /// `d` chosen automatically. Returns `(root_plus, root_minus)`.
    pub fn roots_of_monic_quadratic(c1: &Q, c0: &Q) -> (Quad, Quad) {
        let disc = c1 * c1 - q(4) * c0;
        let (sq, d) = squarefree_split(&disc);
        let half = Q::new(BigInt::from(1), BigInt::from(2));
        let a = -c1 * &half;
        let b = &sq * &half;
        (Quad::new(a.clone(), b.clone(), d), Quad::new(a, -b, d))
    }
}

/// Write a rational `x` as `s^2 * d` with `d` a square-free integer; returns
/// `(s, d)`. For a perfect square `d = 1`.
pub fn squarefree_split(x: &Q) -> (Q, i64) {
    if x.is_zero() {
        return (Q::zero(), 1);
    }
    // x = n/m = n*m / m^2
    let nm: BigInt = x.numer() * x.denom();
    let sign: i64 = if nm < BigInt::zero() { -1 } else { 1 };
    let mut rest: u128 =
        num_traits::ToPrimitive::to_u128(&(nm.clone() * sign)).expect("discriminant too large");
    let mut d: i64 = sign;
    let mut s = BigInt::one();
    let mut f: u128 = 2;
    while f * f <= rest {
        while rest % (f * f) == 0 {
            rest /= f * f;
            s *= BigInt::from(f);
        }
        if rest % f == 0 {
            rest /= f;
            d *= f as i64;
        }
        f += 1;
    }
    d *= rest as i64;
    (Q::new(s, x.denom().clone()), d)
}

impl Ring for Quad {
    fn zero_like(&self) -> Self {
        Quad::rational(Q::zero(), self.d)
    }
    fn one_like(&self) -> Self {
        Quad::rational(Q::one(), self.d)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Quad::rational(q(n), self.d)
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        Quad::rational(Q::from_integer(n.clone()), self.d)
    }
    fn from_q_like(&self, x: &Q) -> Option<Self> {
        Some(Quad::rational(x.clone(), self.d))
    }
    fn add(&self, o: &Self) -> Self {
        Quad::new(&self.a + &o.a, &self.b + &o.b, self.d)
    }
    fn sub(&self, o: &Self) -> Self {
        Quad::new(&self.a - &o.a, &self.b - &o.b, self.d)
    }
    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        let a = &self.a * &o.a + &self.b * &o.b * q(self.d);
        let b = &self.a * &o.b + &self.b * &o.a;
        Quad::new(a, b, self.d)
    }
    fn neg(&self) -> Self {
        Quad::new(-&self.a, -&self.b, self.d)
    }
    fn vanishes(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn div_int(&self, n: i64) -> Self {
        Quad::new(&self.a / q(n), &self.b / q(n), self.d)
    }
}

impl Field for Quad {
    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Quad::new(&c.a / &n, &c.b / &n, self.d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_frac;

    #[test]
    fn roots_satisfy_the_quadratic() {
        // x^2 + x + 3: Hecke polynomial of 11a at p = 3 (a_3 = -1)
        let (r1, r2) = Quad::roots_of_monic_quadratic(&q(1), &q(3));
        assert_eq!(r1.d, -11);
        for r in [&r1, &r2] {
            let v = r.mul(r).add(r).add(&r.from_i64_like(3));
            assert!(v.vanishes());
        }
        assert_eq!(r1.add(&r2).as_rational(), Some(q(-1)));
        assert_eq!(r1.mul(&r2).as_rational(), Some(q(3)));
    }

    #[test]
    fn squarefree_split_of_fraction() {
        let (s, d) = squarefree_split(&q_frac(-44, 9));
        assert_eq!(d, -11);
        assert_eq!(&s * &s * q(d), q_frac(-44, 9));
    }

    #[test]
    fn inverse() {
        let x = Quad::new(q(2), q(3), 5);
        let one = x.mul(&x.inv().unwrap());
        assert_eq!(one, x.one_like());
    }
}
