//! `PadicScalar`: elements of `Z_p`, `Z_p[zeta_{p^r}]` or `Z_p[x]/(x^2 + c1 x + c0)`
//! written as `p^shift * sum c_i x^i` with the `c_i` known modulo `p^prec`.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::zmod::checked_modulus;
use crate::arith::{q, vp_u64, Q};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Extension {
    Trivial,
    /// `Z_p[x] / Phi_{p^r}(x)`, `x = zeta_{p^r}`.
    Cyclotomic {
        r: u32,
    },
    /// `Z_p[x] / (x^2 + c1 x + c0)`.
    Quadratic {
        c1: i64,
        c0: i64,
    },
}

impl Extension {
    pub fn degree(&self, p: u64) -> usize {
        match *self {
            Extension::Trivial => 1,
            Extension::Cyclotomic { r } => ((p - 1) * p.pow(r - 1)) as usize,
            Extension::Quadratic { .. } => 2,
        }
    }

    /// Ramification index used to express valuations.
    pub fn ramification(&self, p: u64) -> u64 {
        match *self {
            Extension::Trivial => 1,
            Extension::Cyclotomic { .. } => self.degree(p) as u64,
            Extension::Quadratic { .. } => 2,
        }
    }
}

/// `v_p`, with `v_p(p) = 1`. Zero-to-precision reports a lower bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Valuation {
    Exact(Q),
    AtLeast(Q),
}

impl Valuation {
    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    pub fn value(&self) -> &Q {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PadicScalar {
    pub p: u64,
    pub ext: Extension,
    pub shift: i64,
    /// Relative precision: coefficients are known modulo `p^prec`.
    pub prec: u32,
    pub coeffs: Vec<u64>,
}

fn modp(p: u64, prec: u32) -> u64 {
    checked_modulus(p, prec)
}

impl PadicScalar {
    pub fn zero(p: u64, ext: Extension, prec: u32) -> Self {
        PadicScalar {
            p,
            ext,
            shift: 0,
            prec,
            coeffs: vec![0; ext.degree(p)],
        }
    }

    pub fn from_int(p: u64, ext: Extension, prec: u32, n: i128) -> Self {
        let mut z = Self::zero(p, ext, prec);
        z.coeffs[0] = n.rem_euclid(modp(p, prec) as i128) as u64;
        z
    }

    pub fn one(p: u64, ext: Extension, prec: u32) -> Self {
        Self::from_int(p, ext, prec, 1)
    }

    /// A rational, with any power of `p` in the denominator moved into the shift.
    pub fn from_q(p: u64, ext: Extension, prec: u32, x: &Q) -> Self {
        if x.is_zero() {
            return Self::zero(p, ext, prec);
        }
        let v = crate::arith::vp_q(x, p);
        let pv = Q::from_integer(num_bigint::BigInt::from(p).pow(v.unsigned_abs() as u32));
        let unit = if v >= 0 { x / pv } else { x * pv };
        let zu = crate::arith::Zp::from_q(p, prec, &unit).expect("unit part is p-integral");
        let mut z = Self::zero(p, ext, prec);
        z.coeffs[0] = zu.value();
        z.shift = v;
        z
    }

    /// The generator `x` of the extension.
    pub fn gen(p: u64, ext: Extension, prec: u32) -> Self {
        let mut z = Self::zero(p, ext, prec);
        match ext {
            Extension::Trivial => panic!("trivial extension has no generator"),
            _ => z.coeffs[1] = 1,
        }
        z
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    fn modulus(&self) -> u64 {
        modp(self.p, self.prec)
    }

    /// Absolute precision: the value is known modulo `p^(shift + prec)`.
    pub fn abs_prec(&self) -> i64 {
        self.shift + self.prec as i64
    }

    /// Same value with relative precision lowered to `prec`.
    pub fn with_prec(&self, prec: u32) -> Self {
        let prec = prec.min(self.prec);
        let m = modp(self.p, prec);
        PadicScalar {
            coeffs: self.coeffs.iter().map(|c| c % m).collect(),
            prec,
            ..self.clone()
        }
    }

    /// Rewrite at a smaller shift `s` (multiplying coefficients by `p^(shift - s)`),
    /// keeping the absolute precision.
    fn at_shift(&self, s: i64) -> Self {
        assert!(s <= self.shift);
        let d = (self.shift - s) as u32;
        let prec = self.prec + d;
        let m = modp(self.p, prec) as u128;
        let f = (self.p as u128).pow(d);
        PadicScalar {
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| ((c as u128 * f) % m) as u64)
                .collect(),
            shift: s,
            prec,
            ..self.clone()
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(
            (self.p, self.ext),
            (o.p, o.ext),
            "mismatched scalar contexts"
        );
        let s = self.shift.min(o.shift);
        let abs = self.abs_prec().min(o.abs_prec());
        let rel = (abs - s).max(0) as u32;
        let a = self.at_shift(s).with_prec(rel);
        let b = o.at_shift(s).with_prec(rel);
        let m = a.modulus() as u128;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| ((x as u128 + y as u128) % m) as u64)
            .collect();
        PadicScalar { coeffs, ..a }
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        PadicScalar {
            coeffs: self.coeffs.iter().map(|&c| (m - c) % m).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(
            (self.p, self.ext),
            (o.p, o.ext),
            "mismatched scalar contexts"
        );
        let prec = self.prec.min(o.prec);
        let m = modp(self.p, prec) as u128;
        let n = self.degree();
        let mut prod = vec![0u128; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + (a as u128 % m) * (b as u128 % m)) % m;
            }
        }
        let coeffs = reduce_poly(self.p, self.ext, prod, m);
        PadicScalar {
            p: self.p,
            ext: self.ext,
            shift: self.shift + o.shift,
            prec,
            coeffs,
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        self.mul(&Self::from_int(self.p, self.ext, self.prec, n as i128))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.p, self.ext, self.prec);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `x^k` for the generator `x` of a cyclotomic extension.
    pub fn monomial(p: u64, ext: Extension, prec: u32, k: u64) -> Self {
        let mut c = vec![0u128; (k as usize + 1).max(ext.degree(p))];
        c[k as usize] = 1;
        let m = modp(p, prec) as u128;
        PadicScalar {
            p,
            ext,
            shift: 0,
            prec,
            coeffs: reduce_poly(p, ext, c, m),
        }
    }

    /// Multiply by `p^e` (exact; only the shift changes).
    pub fn mul_p_pow(&self, e: i64) -> Self {
        PadicScalar {
            shift: self.shift + e,
            ..self.clone()
        }
    }

    /// Pull powers of `p` dividing every coefficient into the shift.
    pub fn normalise(&self) -> Self {
        let mut z = self.clone();
        while z.prec > 0
            && z.coeffs.iter().any(|&c| c != 0)
            && z.coeffs.iter().all(|&c| c % z.p == 0)
        {
            z.coeffs.iter_mut().for_each(|c| *c /= z.p);
            z.prec -= 1;
            z.shift += 1;
        }
        z
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn valuation(&self) -> Valuation {
        let e = self.ext.ramification(self.p) as i64;
        let z = self.normalise();
        if z.is_zero_to_precision() {
            return Valuation::AtLeast(q(z.abs_prec()));
        }
        let inner = match self.ext {
            Extension::Trivial => q(vp_u64(z.coeffs[0], z.p) as i64),
            Extension::Cyclotomic { .. } => {
                // coordinates in the basis pi^j, pi = 1 - zeta
                let d = to_pi_basis(&z);
                let m = z.prec as i64;
                let best = d
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        let v = if c == 0 { m } else { vp_u64(c, z.p) as i64 };
                        e * v + j as i64
                    })
                    .min()
                    .unwrap();
                if best >= e * m {
                    return Valuation::AtLeast(q(z.abs_prec()));
                }
                Q::new(best.into(), e.into())
            }
            Extension::Quadratic { c1, c0 } => {
                let m = z.modulus() as i128;
                let (a, b) = (z.coeffs[0] as i128, z.coeffs[1] as i128);
                let n = (a * a % m - (c1 as i128).rem_euclid(m) * a % m * b % m
                    + (c0 as i128).rem_euclid(m) * b % m * b % m)
                    .rem_euclid(m);
                if n == 0 {
                    return Valuation::AtLeast(q(z.abs_prec()));
                }
                Q::new((vp_u64(n as u64, z.p) as i64).into(), 2.into())
            }
        };
        Valuation::Exact(inner + q(z.shift))
    }

    /// The Galois conjugate `zeta -> zeta^t` in the cyclotomic case.
    pub fn galois(&self, t: u64) -> Self {
        let Extension::Cyclotomic { r } = self.ext else {
            panic!("galois action needs a cyclotomic extension")
        };
        let pr = self.p.pow(r);
        assert!(t % self.p != 0);
        let m = self.modulus() as u128;
        let mut big = vec![0u128; pr as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let k = (i as u64 * t % pr) as usize;
            big[k] = (big[k] + c as u128) % m;
        }
        let coeffs = reduce_poly(self.p, self.ext, big, m);
        PadicScalar {
            coeffs,
            ..self.clone()
        }
    }

    /// Norm down to `Q_p`, returned as an element of the trivial extension.
    pub fn norm(&self) -> PadicScalar {
        let n = match self.ext {
            Extension::Trivial => return self.clone(),
            Extension::Cyclotomic { r } => {
                let pr = self.p.pow(r);
                let mut acc = self.clone();
                for t in 2..pr {
                    if t % self.p != 0 {
                        acc = acc.mul(&self.galois(t));
                    }
                }
                acc
            }
            Extension::Quadratic { .. } => self.mul(&self.conj_quadratic()),
        };
        debug_assert!(n.coeffs[1..].iter().all(|&c| c == 0));
        PadicScalar {
            ext: Extension::Trivial,
            coeffs: vec![n.coeffs[0]],
            ..n
        }
    }

    fn conj_quadratic(&self) -> Self {
        let Extension::Quadratic { c1, .. } = self.ext else {
            unreachable!()
        };
        let m = self.modulus() as i128;
        let (a, b) = (self.coeffs[0] as i128, self.coeffs[1] as i128);
        let a2 = (a - c1 as i128 * b).rem_euclid(m) as u64;
        let b2 = (-b).rem_euclid(m) as u64;
        PadicScalar {
            coeffs: vec![a2, b2],
            ..self.clone()
        }
    }

    /// Inverse via `x^{-1} = (prod of the other conjugates) / N(x)`. The
    /// relative precision drops by `v_p(N(x))` once the shift is removed.
    pub fn inv(&self) -> Option<Self> {
        let z = self.normalise();
        if z.is_zero_to_precision() {
            return None;
        }
        let cof = match z.ext {
            Extension::Trivial => PadicScalar::one(z.p, z.ext, z.prec),
            Extension::Cyclotomic { r } => {
                let pr = z.p.pow(r);
                let mut acc = PadicScalar::one(z.p, z.ext, z.prec);
                for t in 2..pr {
                    if t % z.p != 0 {
                        acc = acc.mul(&z.galois(t));
                    }
                }
                acc
            }
            Extension::Quadratic { .. } => z.conj_quadratic(),
        };
        let n = z.mul(&cof);
        let n0 = n.coeffs[0];
        if n0 == 0 {
            return None;
        }
        let v = vp_u64(n0, z.p);
        if v >= n.prec {
            return None;
        }
        let rel = n.prec - v;
        let unit = crate::arith::Zp::new(z.p, rel, (n0 / z.p.pow(v)) as i128);
        let uinv = unit.inv().unwrap();
        let cof = cof.with_prec(rel);
        let scaled = cof.mul(&PadicScalar::from_int(
            z.p,
            z.ext,
            rel,
            uinv.value() as i128,
        ));
        Some(PadicScalar {
            shift: scaled.shift - n.shift - v as i64,
            ..scaled
        })
    }

    /// Agreement to absolute precision `p^digits` (i.e. `v(self - o) >= digits`).
    pub fn agrees_with(&self, o: &Self, digits: i64) -> bool {
        let d = self.sub(o);
        let v = d.valuation();
        *v.value() >= q(digits)
    }

    /// Signed coefficients with the shift and precision, for reports.
    pub fn to_string_short(&self) -> String {
        let m = self.modulus();
        let show: Vec<String> = self
            .coeffs
            .iter()
            .map(|&c| {
                let s = if c > m / 2 {
                    c as i128 - m as i128
                } else {
                    c as i128
                };
                s.to_string()
            })
            .collect();
        if self.coeffs.len() == 1 {
            format!(
                "{}*{}^{} + O({}^{})",
                show[0],
                self.p,
                self.shift,
                self.p,
                self.abs_prec()
            )
        } else {
            format!(
                "{}^{}*[{}] + O({}^{})",
                self.p,
                self.shift,
                show.join(","),
                self.p,
                self.abs_prec()
            )
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_short())
    }
}

/// Reduce a polynomial with coefficients mod `m` modulo the defining polynomial.
fn reduce_poly(p: u64, ext: Extension, mut c: Vec<u128>, m: u128) -> Vec<u64> {
    let n = ext.degree(p);
    match ext {
        Extension::Trivial => {}
        Extension::Cyclotomic { r } => {
            // Phi_{p^r}(x) = sum_{i<p} x^{i p^{r-1}}: x^{n+t} = -sum_{i<p-1} x^{i p^{r-1} + t}
            let step = p.pow(r - 1) as usize;
            for top in (n..c.len()).rev() {
                let v = c[top];
                if v == 0 {
                    continue;
                }
                c[top] = 0;
                let t = top - n;
                for i in 0..(p as usize - 1) {
                    let k = i * step + t;
                    c[k] = (c[k] + m - v) % m;
                }
            }
        }
        Extension::Quadratic { c1, c0 } => {
            let c1 = (c1 as i128).rem_euclid(m as i128) as u128;
            let c0 = (c0 as i128).rem_euclid(m as i128) as u128;
            for top in (2..c.len()).rev() {
                let v = c[top];
                c[top] = 0;
                c[top - 1] = (c[top - 1] + m - v * c1 % m) % m;
                c[top - 2] = (c[top - 2] + m - v * c0 % m) % m;
            }
        }
    }
    c.truncate(n);
    c.resize(n, 0);
    c.into_iter().map(|x| (x % m) as u64).collect()
}

/// Coordinates in the basis `pi^j` (`pi = 1 - x`): substitute `x = 1 - pi`.
fn to_pi_basis(z: &PadicScalar) -> Vec<u64> {
    let n = z.degree();
    let m = z.modulus() as u128;
    // x^i = (1 - pi)^i = sum_j binom(i, j) (-1)^j pi^j, all j <= i < n
    let mut out = vec![0u128; n];
    let mut binom = vec![0u128; n];
    for (i, &c) in z.coeffs.iter().enumerate() {
        // binom row i
        if i == 0 {
            binom[0] = 1;
        } else {
            for j in (1..=i).rev() {
                binom[j] = (binom[j] + binom[j - 1]) % m;
            }
        }
        if c == 0 {
            continue;
        }
        for j in 0..=i {
            let t = c as u128 * binom[j] % m;
            out[j] = if j % 2 == 0 {
                (out[j] + t) % m
            } else {
                (out[j] + m - t) % m
            };
        }
    }
    out.into_iter().map(|x| x as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_frac;

    #[test]
    fn valuation_of_p_and_zero() {
        let x = PadicScalar::from_int(7, Extension::Trivial, 5, 7);
        assert_eq!(x.valuation(), Valuation::Exact(q(1)));
        let z = PadicScalar::zero(7, Extension::Trivial, 5);
        assert_eq!(z.valuation(), Valuation::AtLeast(q(5)));
    }

    #[test]
    fn uniformiser_valuation() {
        for (p, r) in [(3u64, 1u32), (5, 1), (3, 2), (5, 2)] {
            let ext = Extension::Cyclotomic { r };
            let pi = PadicScalar::one(p, ext, 6).sub(&PadicScalar::gen(p, ext, 6));
            let e = ext.degree(p) as i64;
            assert_eq!(pi.valuation(), Valuation::Exact(q_frac(1, e)));
            // norm oracle: N(1 - zeta_{p^r}) = Phi_{p^r}(1) = p
            let n = pi.norm();
            assert_eq!(n.coeffs[0], p);
        }
    }

    #[test]
    fn inverse_of_uniformiser() {
        let ext = Extension::Cyclotomic { r: 1 };
        let pi = PadicScalar::one(5, ext, 8).sub(&PadicScalar::gen(5, ext, 8));
        let inv = pi.inv().unwrap();
        let one = pi.mul(&inv);
        assert!(one.agrees_with(&PadicScalar::one(5, ext, 8), 6));
        assert_eq!(inv.valuation(), Valuation::Exact(q_frac(-1, 4)));
    }

    #[test]
    fn zeta_has_order_p_power() {
        let ext = Extension::Cyclotomic { r: 2 };
        let z = PadicScalar::gen(3, ext, 6);
        assert_eq!(z.pow(9), PadicScalar::one(3, ext, 6));
        assert_ne!(z.pow(3), PadicScalar::one(3, ext, 6));
    }

    #[test]
    fn rational_with_p_in_denominator() {
        let x = PadicScalar::from_q(5, Extension::Trivial, 6, &q_frac(3, 25));
        assert_eq!(x.shift, -2);
        assert_eq!(x.valuation(), Valuation::Exact(q(-2)));
        let y = x.mul_p_pow(2);
        assert!(y.agrees_with(&PadicScalar::from_int(5, Extension::Trivial, 6, 3), 6));
    }

    #[test]
    fn quadratic_ramified_valuation() {
        // x^2 + 5: x has valuation 1/2
        let ext = Extension::Quadratic { c1: 0, c0: 5 };
        let x = PadicScalar::gen(5, ext, 6);
        assert_eq!(x.valuation(), Valuation::Exact(q_frac(1, 2)));
        assert_eq!(x.mul(&x), PadicScalar::from_int(5, ext, 6, -5));
    }
}
