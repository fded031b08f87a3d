//! Dense univariate polynomials over `Q`, coefficients stored low degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{q, Q};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn x_minus(a: &Q) -> Self {
        Poly::new(vec![-a, Q::one()])
    }

    pub fn one() -> Self {
        Poly::new(vec![Q::one()])
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::new(vec![]);
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.c[dd].clone();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::new(vec![]), self.clone());
        }
        let mut qc = vec![Q::zero(); r.len() - dd];
        for i in (0..qc.len()).rev() {
            let t = &r[i + dd] / &lead;
            for j in 0..=dd {
                let s = &t * &d.c[j];
                r[i + j] -= s;
            }
            qc[i] = t;
        }
        r.truncate(dd);
        (Poly::new(qc), Poly::new(r))
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Multiplicity of `a` as a root.
    pub fn root_multiplicity(&self, a: &Q) -> usize {
        let lin = Poly::x_minus(a);
        let mut p = self.clone();
        let mut m = 0;
        while !p.is_zero() {
            let (qq, r) = p.divrem(&lin);
            if !r.is_zero() {
                break;
            }
            p = qq;
            m += 1;
        }
        m
    }

    /// All distinct rational roots, found via the rational root theorem on
    /// the content-cleared integer polynomial.
    pub fn rational_roots(&self) -> Vec<Q> {
        let mut roots = Vec::new();
        let Some(_) = self.degree() else { return roots };
        // strip factors of x
        let mut p = self.clone();
        if p.c[0].is_zero() {
            roots.push(Q::zero());
            while !p.is_empty_const() && p.c[0].is_zero() {
                p = Poly::new(p.c[1..].to_vec());
            }
        }
        if p.degree() == Some(0) {
            return roots;
        }
        let ints = p.integer_coeffs();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for sgn in [1i64, -1] {
                    let cand = Q::new(&num * BigInt::from(sgn), den.clone());
                    if p.eval(&cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    fn is_empty_const(&self) -> bool {
        self.c.len() <= 1
    }

    /// Integer multiple with coprime coefficients.
    pub fn integer_coeffs(&self) -> Vec<BigInt> {
        let mut den = BigInt::one();
        for x in &self.c {
            den = den.lcm(x.denom());
        }
        self.c
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect()
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.c
            .iter()
            .map(|x| {
                if x.is_integer() {
                    x.numer().to_i64()
                } else {
                    None
                }
            })
            .collect()
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.to_u128().expect("coefficient too large for root search");
    let mut out = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_frac;

    #[test]
    fn roots_of_a_product() {
        let p = Poly::x_minus(&q_frac(2, 3))
            .mul(&Poly::x_minus(&q(-5)))
            .mul(&Poly::from_i64(&[1, 0, 1]));
        assert_eq!(p.rational_roots(), vec![q(-5), q_frac(2, 3)]);
    }

    #[test]
    fn divrem_reconstructs() {
        let a = Poly::from_i64(&[3, -2, 0, 5, 1]);
        let b = Poly::from_i64(&[1, 2, 3]);
        let (qq, r) = a.divrem(&b);
        assert_eq!(qq.mul(&b).sub(&a.sub(&r)), Poly::new(vec![]));
        assert!(r.degree().map_or(true, |d| d < 2));
    }

    #[test]
    fn multiplicity() {
        let p = Poly::x_minus(&q(6)).pow(3).mul(&Poly::x_minus(&q(1)));
        assert_eq!(p.root_multiplicity(&q(6)), 3);
        assert_eq!(p.root_multiplicity(&q(2)), 0);
        assert_eq!(p.rational_roots(), vec![q(1), q(6)]);
    }
}
