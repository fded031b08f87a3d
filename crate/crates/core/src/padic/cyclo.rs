//! Exact arithmetic in the cyclotomic field `Q(zeta_n)`, used for classical
//! twisted L-values and Gauss sums before they are embedded p-adically.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::poly::Poly;
use crate::arith::{q, Q};

/// The `n`-th cyclotomic polynomial, memoised.
pub fn cyclotomic_poly(n: u64) -> Poly {
    static CACHE: OnceLock<Mutex<HashMap<u64, Poly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![Q::zero(); n as usize + 1];
    num[0] = q(-1);
    num[n as usize] = Q::one();
    let mut p = Poly::new(num);
    for d in 1..n {
        if n % d == 0 {
            let (qq, r) = p.divrem(&cyclotomic_poly(d));
            debug_assert!(r.is_zero());
            p = qq;
        }
    }
    cache.lock().unwrap().insert(n, p.clone());
    p
}

/// An element of `Q(zeta_n)` as a polynomial in `zeta_n` of degree below
/// `phi(n)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycloQ {
    pub n: u64,
    pub c: Vec<Q>,
}

impl CycloQ {
    pub fn zero(n: u64) -> Self {
        let d = cyclotomic_poly(n).degree().unwrap();
        CycloQ {
            n,
            c: vec![Q::zero(); d],
        }
    }

    pub fn from_q(n: u64, x: Q) -> Self {
        let mut z = Self::zero(n);
        z.c[0] = x;
        z
    }

    /// `zeta_n^k`.
    pub fn zeta_pow(n: u64, k: i64) -> Self {
        let e = k.rem_euclid(n as i64) as usize;
        let mut c = vec![Q::zero(); e + 1];
        c[e] = Q::one();
        Self::reduce(n, c)
    }

    fn reduce(n: u64, c: Vec<Q>) -> Self {
        let phi = cyclotomic_poly(n);
        let d = phi.degree().unwrap();
        let (_, r) = Poly::new(c).divrem(&phi);
        let mut c = r.c;
        c.resize(d, Q::zero());
        CycloQ { n, c }
    }

    pub fn add(&self, o: &Self) -> Self {
        let m = self.n.lcm(&o.n);
        let (a, b) = (self.lift(m), o.lift(m));
        CycloQ {
            n: m,
            c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&q(-1)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = self.n.lcm(&o.n);
        let (a, b) = (self.lift(m), o.lift(m));
        let mut c = vec![Q::zero(); a.c.len() + b.c.len()];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        Self::reduce(m, c)
    }

    pub fn scale(&self, s: &Q) -> Self {
        CycloQ {
            n: self.n,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    /// The same element viewed in `Q(zeta_m)` for a multiple `m` of `n`.
    pub fn lift(&self, m: u64) -> Self {
        if m == self.n {
            return self.clone();
        }
        assert!(
            m % self.n == 0,
            "cannot lift Q(zeta_{}) into Q(zeta_{m})",
            self.n
        );
        let step = (m / self.n) as usize;
        let mut c = vec![Q::zero(); step * self.c.len() + 1];
        for (i, x) in self.c.iter().enumerate() {
            c[i * step] = x.clone();
        }
        Self::reduce(m, c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.c.iter().skip(1).all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// Complex embedding `zeta_n -> exp(2 pi i / n)`, for diagnostics.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, x) in self.c.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * k as f64 / self.n as f64;
            let v = crate::arith::q_to_f64(x);
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), Poly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic_poly(4), Poly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(9), Poly::from_i64(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(cyclotomic_poly(12), Poly::from_i64(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn roots_of_unity_multiply() {
        let a = CycloQ::zeta_pow(12, 5);
        let b = CycloQ::zeta_pow(12, 9);
        assert_eq!(a.mul(&b), CycloQ::zeta_pow(12, 2));
        assert_eq!(CycloQ::zeta_pow(12, 6), CycloQ::from_q(12, q(-1)));
        // sum of all primitive 5th roots is -1
        let s = (1..5).fold(CycloQ::zero(5), |acc, k| acc.add(&CycloQ::zeta_pow(5, k)));
        assert_eq!(s.as_rational(), Some(q(-1)));
    }

    #[test]
    fn mixing_levels() {
        let i = CycloQ::zeta_pow(4, 1);
        let z3 = CycloQ::zeta_pow(3, 1);
        let prod = i.mul(&z3);
        assert_eq!(prod, CycloQ::zeta_pow(12, 3 + 4));
    }
}
