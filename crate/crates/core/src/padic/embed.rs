//! The embedding of number fields into `Q_p(zeta_{p^r})`. Nothing canonical
//! fixes it, so every choice is an explicit parameter.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::character::{primitive_root, DirichletCharacter};
use super::cyclo::CycloQ;
use super::scalar::{Extension, PadicScalar};
use crate::arith::zmod::teichmuller;
use crate::arith::{Quad, Ring, Zp};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub p: u64,
    /// Target is `Z_p[zeta_{p^r}]` (`r = 0` means `Z_p`).
    pub r: u32,
    pub prec: u32,
    /// `zeta_{p-1} -> teichmuller(g)` for this primitive root `g` mod `p`.
    pub generator: u64,
    /// `zeta_{p^r} -> x^twist` with `x` the generator of the target.
    pub twist: u64,
    /// Sign picking the square root in `Z_p`: `+1` takes the root whose
    /// residue lies in `1..=(p-1)/2`.
    pub sqrt_sign: i8,
}

impl Embedding {
    pub fn standard(p: u64, r: u32, prec: u32) -> Self {
        Embedding {
            p,
            r,
            prec,
            generator: primitive_root(p),
            twist: 1,
            sqrt_sign: 1,
        }
    }

    pub fn ext(&self) -> Extension {
        if self.r == 0 {
            Extension::Trivial
        } else {
            Extension::Cyclotomic { r: self.r }
        }
    }

    pub fn one(&self) -> PadicScalar {
        PadicScalar::one(self.p, self.ext(), self.prec)
    }

    pub fn zero(&self) -> PadicScalar {
        PadicScalar::zero(self.p, self.ext(), self.prec)
    }

    pub fn from_zp(&self, x: &Zp) -> PadicScalar {
        assert_eq!(x.p(), self.p);
        PadicScalar::from_int(
            self.p,
            self.ext(),
            self.prec.min(x.prec()),
            x.value() as i128,
        )
    }

    pub fn from_q(&self, x: &crate::arith::Q) -> PadicScalar {
        PadicScalar::from_q(self.p, self.ext(), self.prec, x)
    }

    /// Image of `zeta_n^k` for `n = e * p^s`, `e | p - 1`, `s <= r`.
    pub fn root_of_unity(&self, n: u64, k: i64) -> PadicScalar {
        let p = self.p;
        let mut s = 0;
        let mut e = n;
        while e % p == 0 {
            e /= p;
            s += 1;
        }
        assert!(
            (p - 1) % e == 0,
            "zeta_{n} does not live in Q_{p}(zeta_p^r)"
        );
        assert!(
            s <= self.r,
            "zeta_{n} needs cyclotomic level {s} > {}",
            self.r
        );
        let ps = p.pow(s);
        // zeta_n = zeta_e^u * zeta_{p^s}^v with u*p^s + v*e = 1
        let (u, v) = if e == 1 {
            (0i128, 1i128)
        } else if ps == 1 {
            (1, 0)
        } else {
            let g = (ps as i128).extended_gcd(&(e as i128));
            (g.x, g.y)
        };
        let k = k as i128;
        let omega = teichmuller(p, self.prec, self.generator).unwrap();
        let tame_exp = ((k * u).rem_euclid(e as i128) as u64) * ((p - 1) / e);
        let tame = omega.pow(tame_exp);
        let mut out = PadicScalar::from_int(p, self.ext(), self.prec, tame.value() as i128);
        if s > 0 {
            let wild_exp = (k * v).rem_euclid(ps as i128) as u64;
            let x_exp = wild_exp * self.twist * p.pow(self.r - s);
            out = out.mul(&PadicScalar::monomial(
                p,
                self.ext(),
                self.prec,
                x_exp % p.pow(self.r),
            ));
        }
        out
    }

    pub fn cyclo(&self, x: &CycloQ) -> PadicScalar {
        let z = self.root_of_unity(x.n, 1);
        let mut acc = self.zero();
        for c in x.c.iter().rev() {
            acc = acc.mul(&z).add(&self.from_q(c));
        }
        acc
    }

    pub fn character_value(&self, chi: &DirichletCharacter, a: i64) -> PadicScalar {
        match chi.exp(a) {
            None => self.zero(),
            Some(e) => self.root_of_unity(chi.n, e as i64),
        }
    }

    /// Chosen square root of `d` in `Z_p` (requires `d` a nonzero square mod `p`).
    pub fn sqrt(&self, d: i64) -> Option<Zp> {
        sqrt_zp(self.p, self.prec, d, self.sqrt_sign)
    }

    /// Image of `a + b sqrt(d)` in `Z_p`.
    pub fn quad(&self, x: &Quad) -> Option<Zp> {
        let a = Zp::from_q(self.p, self.prec, &x.a)?;
        if x.b == crate::arith::Q::default() {
            return Some(a);
        }
        let b = Zp::from_q(self.p, self.prec, &x.b)?;
        Some(a.add(&b.mul(&self.sqrt(x.d)?)))
    }
}

/// Hensel lift of a square root of `d` modulo `p^prec`.
pub fn sqrt_zp(p: u64, prec: u32, d: i64, sign: i8) -> Option<Zp> {
    let dm = d.rem_euclid(p as i64) as u64;
    if dm == 0 {
        return None;
    }
    let r0 = (1..=(p - 1) / 2).find(|&x| x * x % p == dm)?;
    let r0 = if sign >= 0 { r0 } else { p - r0 };
    let target = Zp::new(p, prec, d as i128);
    let mut x = Zp::new(p, prec, r0 as i128);
    for _ in 0..prec + 1 {
        // x <- x - (x^2 - d) / (2x)
        let f = x.mul(&x).sub(&target);
        let df = x.mul_i64(2).inv()?;
        x = x.sub(&f.mul(&df));
    }
    debug_assert_eq!(x.mul(&x), target);
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    #[test]
    fn roots_of_unity_have_the_right_order() {
        let emb = Embedding::standard(5, 2, 6);
        for n in [4u64, 5, 20, 25, 100] {
            let z = emb.root_of_unity(n, 1);
            assert_eq!(z.pow(n), emb.one(), "n = {n}");
            for d in 1..n {
                if n % d == 0 {
                    assert_ne!(z.pow(d), emb.one(), "n = {n}, d = {d}");
                }
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map_on_cyclotomic_elements() {
        let emb = Embedding::standard(3, 2, 6);
        let a = CycloQ::zeta_pow(18, 5).add(&CycloQ::from_q(18, q(2)));
        let b = CycloQ::zeta_pow(9, 4).scale(&q(-3));
        assert_eq!(emb.cyclo(&a.mul(&b)), emb.cyclo(&a).mul(&emb.cyclo(&b)));
        assert_eq!(emb.cyclo(&a.add(&b)), emb.cyclo(&a).add(&emb.cyclo(&b)));
    }

    #[test]
    fn square_roots() {
        let r = sqrt_zp(3, 10, -11, 1).unwrap();
        assert_eq!(r.mul(&r), Zp::new(3, 10, -11));
        let s = sqrt_zp(3, 10, -11, -1).unwrap();
        assert_eq!(r.add(&s).value(), 0);
        assert!(sqrt_zp(5, 4, 2, 1).is_none());
    }
}
