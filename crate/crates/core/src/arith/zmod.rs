//! Residues modulo `p^M`, the coefficient ring for all finite-precision
//! distributions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{Field, Ring, Q};

/// An element of `Z/p^M`. The modulus travels with the value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Zp {
    v: u64,
    p: u64,
    prec: u32,
    modulus: u64,
}

impl fmt::Debug for Zp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.v, self.p, self.prec)
    }
}

pub fn checked_modulus(p: u64, prec: u32) -> u64 {
    let m = (p as u128).pow(prec);
    assert!(m < (1u128 << 62), "p^M = {p}^{prec} exceeds 62 bits");
    m as u64
}

impl Zp {
    pub fn new(p: u64, prec: u32, value: i128) -> Self {
        let modulus = checked_modulus(p, prec);
        Zp {
            v: value.rem_euclid(modulus as i128) as u64,
            p,
            prec,
            modulus,
        }
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        Self::new(p, prec, 0)
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::new(p, prec, 1)
    }

    pub fn from_bigint(p: u64, prec: u32, n: &BigInt) -> Self {
        let modulus = checked_modulus(p, prec);
        let r = n.mod_floor(&BigInt::from(modulus)).to_u64().unwrap();
        Zp {
            v: r,
            p,
            prec,
            modulus,
        }
    }

    /// Image of a `p`-integral rational; `None` if `p` divides the denominator.
    pub fn from_q(p: u64, prec: u32, x: &Q) -> Option<Self> {
        let num = Self::from_bigint(p, prec, x.numer());
        let den = Self::from_bigint(p, prec, x.denom());
        den.inv().map(|d| num.mul(&d))
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    /// Symmetric lift to `(-p^M/2, p^M/2]`.
    pub fn signed_value(&self) -> i128 {
        let v = self.v as i128;
        if v > self.modulus as i128 / 2 {
            v - self.modulus as i128
        } else {
            v
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `v_p` of the representative, or `None` for zero (meaning `>= prec`).
    pub fn valuation(&self) -> Option<u32> {
        if self.v == 0 {
            None
        } else {
            Some(super::vp_u64(self.v, self.p))
        }
    }

    pub fn is_unit(&self) -> bool {
        self.v % self.p != 0
    }

    pub fn inv(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (g, x, _) = egcd(self.v as i128, self.modulus as i128);
        debug_assert_eq!(g, 1);
        Some(Zp {
            v: x.rem_euclid(self.modulus as i128) as u64,
            ..*self
        })
    }

    /// Reduce to a coarser modulus `p^prec`.
    pub fn reduce(&self, prec: u32) -> Self {
        assert!(prec <= self.prec);
        Self::new(self.p, prec, self.v as i128)
    }

    /// Reinterpret at a finer modulus using the canonical nonnegative lift.
    pub fn lift_to(&self, prec: u32) -> Self {
        Self::new(self.p, prec, self.v as i128)
    }

    /// Equality modulo `p^n` (trivially true for `n == 0`).
    pub fn eq_mod(&self, o: &Self, n: u32) -> bool {
        if n == 0 {
            return true;
        }
        let m = self.p.pow(n.min(self.prec));
        self.v % m == o.v % m
    }

    /// Multiply by `p^e` (losing nothing: the value is still known mod `p^prec`).
    pub fn mul_p_pow(&self, e: u32) -> Self {
        if e >= self.prec {
            return Self::zero(self.p, self.prec);
        }
        Self::new(self.p, self.prec, self.v as i128 * self.p.pow(e) as i128)
    }

    /// Divide by `p^e`, discarding the low digits. The top `e` digits of the
    /// result are unknown; callers account for that in their ledger.
    pub fn div_p_pow(&self, e: u32) -> Self {
        Self::new(self.p, self.prec, (self.v / self.p.pow(e)) as i128)
    }

    pub fn teichmuller(&self) -> Self {
        teichmuller(self.p, self.prec, self.v).expect("Teichmuller lift of a non-unit")
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// The Teichmuller representative of `a mod p`, to precision `p^prec`.
pub fn teichmuller(p: u64, prec: u32, a: u64) -> Option<Zp> {
    if a % p == 0 {
        return None;
    }
    let mut x = Zp::new(p, prec, a as i128);
    for _ in 0..prec {
        x = x.pow(p);
    }
    Some(x)
}

impl Ring for Zp {
    fn zero_like(&self) -> Self {
        Zp { v: 0, ..*self }
    }
    fn one_like(&self) -> Self {
        Zp {
            v: 1 % self.modulus,
            ..*self
        }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Zp::new(self.p, self.prec, n as i128)
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        Zp::from_bigint(self.p, self.prec, n)
    }
    fn from_q_like(&self, x: &Q) -> Option<Self> {
        Zp::from_q(self.p, self.prec, x)
    }
    fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        let s = self.v as u128 + o.v as u128;
        Zp {
            v: (s % self.modulus as u128) as u64,
            ..*self
        }
    }
    fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        let s = self.v as u128 + self.modulus as u128 - o.v as u128;
        Zp {
            v: (s % self.modulus as u128) as u64,
            ..*self
        }
    }
    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        let s = self.v as u128 * o.v as u128;
        Zp {
            v: (s % self.modulus as u128) as u64,
            ..*self
        }
    }
    fn neg(&self) -> Self {
        Zp {
            v: (self.modulus - self.v) % self.modulus,
            ..*self
        }
    }
    fn vanishes(&self) -> bool {
        self.v == 0
    }
    fn div_int(&self, n: i64) -> Self {
        assert!(n != 0);
        let e = super::vp_u64(n.unsigned_abs(), self.p);
        let unit = n / (self.p.pow(e) as i64);
        let u = self.from_i64_like(unit).inv().unwrap();
        self.div_p_pow(e).mul(&u)
    }
}

/// Only units are invertible; at precision one this makes `Z/p` a field.
impl Field for Zp {
    fn inv(&self) -> Option<Self> {
        Zp::inv(self)
    }
}

/// `p`-adic logarithm of `x ≡ 1 mod p`, to precision `p^prec`.
pub fn log_one_unit(x: &Zp) -> Zp {
    let p = x.p();
    let prec = x.prec();
    assert!(x.sub(&x.one_like()).value() % p == 0, "log of a non-1-unit");
    // log(1+y) = sum (-1)^{m+1} y^m / m, y = p*y'; term m has valuation >= m - v_p(m)
    let y = x.sub(&x.one_like());
    let y1 = y.div_p_pow(1); // y' exact since p | y
    let mut acc = x.zero_like();
    let mut ypow = x.one_like();
    let mut m = 1u32;
    loop {
        ypow = ypow.mul(&y1);
        // every later term has valuation >= m - log_p(m)
        if m >= prec + ilog(m as u64, p) {
            break;
        }
        let vm = super::vp_u64(m as u64, p);
        let unit = (m as u64 / p.pow(vm)) as i64;
        let term = ypow
            .mul_p_pow(m - vm)
            .mul(&x.from_i64_like(unit).inv().unwrap());
        if m % 2 == 1 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
        m += 1;
    }
    acc
}

fn ilog(n: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut q = n;
    while q >= p {
        q /= p;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_of_two_mod_625() {
        let w = teichmuller(5, 4, 2).unwrap();
        // oracle: iterate x <- x^5 from 2 until stable, check x^4 = 1
        let mut x: u64 = 2;
        loop {
            let nx = (0..5).fold(1u64, |acc, _| acc * x % 625);
            if nx == x {
                break;
            }
            x = nx;
        }
        assert_eq!(w.value(), x);
        assert_eq!(w.pow(4).value(), 1);
        assert_eq!(w.value() % 5, 2);
    }

    #[test]
    fn teichmuller_fixed_points() {
        assert_eq!(teichmuller(7, 6, 1).unwrap().value(), 1);
        let m = teichmuller(7, 6, 6).unwrap();
        assert_eq!(m, Zp::new(7, 6, -1));
        assert!(teichmuller(7, 6, 14).is_none());
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        for a in 1..11u64 {
            for b in 1..11u64 {
                let wa = teichmuller(11, 5, a).unwrap();
                let wb = teichmuller(11, 5, b).unwrap();
                let wab = teichmuller(11, 5, a * b % 11).unwrap();
                assert_eq!(wa.mul(&wb), wab);
            }
        }
    }

    #[test]
    fn inverse_and_division() {
        let x = Zp::new(3, 8, 7);
        assert_eq!(x.mul(&x.inv().unwrap()).value(), 1);
        assert!(Zp::new(3, 8, 6).inv().is_none());
        let y = Zp::new(3, 8, 18);
        assert_eq!(y.div_int(6).value(), 3);
    }

    #[test]
    fn log_is_additive_on_one_units() {
        let a = Zp::new(5, 10, 6);
        let b = Zp::new(5, 10, 11);
        let lhs = log_one_unit(&a.mul(&b));
        let rhs = log_one_unit(&a).add(&log_one_unit(&b));
        assert!(lhs.eq_mod(&rhs, 9));
    }
}
