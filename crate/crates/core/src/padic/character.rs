//! Dirichlet characters stored as exponent tables: `chi(a) = zeta_n^{e(a)}`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::cyclo::CycloQ;
use crate::arith::Q;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DirichletCharacter {
    pub modulus: u64,
    /// Values are powers of `zeta_n` for this `n` (a multiple of the order).
    pub n: u64,
    /// `exps[a]` for `0 <= a < modulus`; `None` when `gcd(a, modulus) > 1`.
    pub exps: Vec<Option<u64>>,
}

fn factor(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= m {
        if m % f == 0 {
            let mut e = 0;
            while m % f == 0 {
                m /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn mul_order(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 % m {
        x = x * a % m;
        k += 1;
    }
    k
}

/// Smallest positive primitive root modulo an odd prime power.
pub fn primitive_root(pk: u64) -> u64 {
    let phi = totient(pk);
    (2..pk)
        .find(|&g| g.gcd(&pk) == 1 && mul_order(g, pk) == phi)
        .expect("no primitive root")
}

pub fn totient(m: u64) -> u64 {
    factor(m)
        .iter()
        .fold(1, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// Cyclic generators of `(Z/m)^x` with their orders, via CRT.
fn unit_generators(m: u64) -> Vec<(u64, u64)> {
    let mut gens = Vec::new();
    for (p, e) in factor(m) {
        let pe = p.pow(e);
        let rest = m / pe;
        let mut local: Vec<(u64, u64)> = Vec::new();
        if p == 2 {
            if e >= 2 {
                local.push((pe - 1, 2));
            }
            if e >= 3 {
                local.push((5, pe / 4));
            }
        } else {
            local.push((primitive_root(pe), pe / p * (p - 1)));
        }
        for (g, ord) in local {
            // g mod pe, 1 mod rest
            let x = crt(g, pe, 1, rest);
            gens.push((x, ord));
        }
    }
    gens
}

fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    if n == 1 {
        return a % m;
    }
    let (mi, ni) = (m as i128, n as i128);
    let e = num_integer::Integer::extended_gcd(&mi, &ni);
    let x = (a as i128 * e.y * ni + b as i128 * e.x * mi).rem_euclid(mi * ni);
    x as u64
}

/// Discrete logs of every unit with respect to the generators.
fn discrete_logs(m: u64, gens: &[(u64, u64)]) -> Vec<Option<Vec<u64>>> {
    let mut table = vec![None; m as usize];
    let mut idx = vec![0u64; gens.len()];
    loop {
        let mut x = 1 % m;
        for (k, &(g, _)) in gens.iter().enumerate() {
            for _ in 0..idx[k] {
                x = x * g % m;
            }
        }
        table[x as usize] = Some(idx.clone());
        let mut k = 0;
        loop {
            if k == gens.len() {
                return table;
            }
            idx[k] += 1;
            if idx[k] < gens[k].1 {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

impl DirichletCharacter {
    pub fn trivial(modulus: u64) -> Self {
        let exps = (0..modulus)
            .map(|a| (a.gcd(&modulus) == 1).then_some(0))
            .collect();
        DirichletCharacter {
            modulus,
            n: 1,
            exps,
        }
    }

    /// Every character modulo `m`, the trivial one first.
    pub fn all_mod(m: u64) -> Vec<Self> {
        let gens = unit_generators(m);
        let n = gens.iter().fold(1u64, |acc, &(_, o)| acc.lcm(&o));
        let logs = discrete_logs(m, &gens);
        let mut out = Vec::new();
        let mut choice = vec![0u64; gens.len()];
        loop {
            let exps = (0..m as usize)
                .map(|a| {
                    logs[a].as_ref().map(|l| {
                        l.iter()
                            .zip(&choice)
                            .zip(&gens)
                            .map(|((&li, &ci), &(_, o))| li * ci * (n / o))
                            .sum::<u64>()
                            % n
                    })
                })
                .collect();
            out.push(DirichletCharacter {
                modulus: m,
                n,
                exps,
            });
            let mut k = 0;
            loop {
                if k == gens.len() {
                    return out;
                }
                choice[k] += 1;
                if choice[k] < gens[k].1 {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    /// The quadratic character of the field of discriminant `disc`
    /// (Kronecker symbol `(disc / .)`), as a character modulo `|disc|`.
    pub fn kronecker(disc: i64) -> Self {
        let m = disc.unsigned_abs();
        let exps = (0..m)
            .map(|a| {
                if a.gcd(&m) != 1 {
                    None
                } else {
                    Some(if kronecker_symbol(disc, a) == 1 { 0 } else { 1 })
                }
            })
            .collect();
        DirichletCharacter {
            modulus: m,
            n: 2,
            exps,
        }
    }

    pub fn exp(&self, a: i64) -> Option<u64> {
        self.exps[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, a: i64) -> CycloQ {
        match self.exp(a) {
            None => CycloQ::zero(self.n),
            Some(e) => CycloQ::zeta_pow(self.n, e as i64),
        }
    }

    pub fn order(&self) -> u64 {
        let g = self.exps.iter().flatten().fold(self.n, |g, &e| g.gcd(&e));
        self.n / g
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// `+1` for even, `-1` for odd.
    pub fn parity(&self) -> i64 {
        match self.exp(-1) {
            Some(0) => 1,
            Some(e) if 2 * e == self.n => -1,
            _ => unreachable!("chi(-1) must be +-1"),
        }
    }

    pub fn conductor(&self) -> u64 {
        let m = self.modulus;
        let mut divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
        divisors.sort();
        for d in divisors {
            let ok = (0..m).all(|a| match self.exps[a as usize] {
                Some(e) if a % d == 1 % d => e == 0,
                _ => true,
            });
            if ok {
                return d;
            }
        }
        m
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .exps
            .iter()
            .map(|e| e.map(|e| (self.n - e) % self.n))
            .collect();
        DirichletCharacter {
            modulus: self.modulus,
            n: self.n,
            exps,
        }
    }

    /// Pointwise product, as a character modulo the lcm of the moduli.
    pub fn mul(&self, o: &Self) -> Self {
        let m = self.modulus.lcm(&o.modulus);
        let n = self.n.lcm(&o.n);
        let exps = (0..m as i64)
            .map(|a| match (self.exp(a), o.exp(a)) {
                (Some(x), Some(y)) => Some((x * (n / self.n) + y * (n / o.n)) % n),
                _ => None,
            })
            .collect();
        DirichletCharacter {
            modulus: m,
            n,
            exps,
        }
    }

    /// The same character viewed modulo a multiple `m` of its modulus.
    pub fn extend_to(&self, m: u64) -> Self {
        assert!(m % self.modulus == 0);
        let exps = (0..m as i64)
            .map(|a| {
                if (a as u64).gcd(&m) != 1 {
                    None
                } else {
                    self.exp(a)
                }
            })
            .collect();
        DirichletCharacter {
            modulus: m,
            n: self.n,
            exps,
        }
    }
}

/// Kronecker symbol `(d / a)` for `a >= 1`.
pub fn kronecker_symbol(d: i64, a: u64) -> i64 {
    let mut res = 1i64;
    let mut a = a;
    while a % 2 == 0 {
        a /= 2;
        let dm = d.rem_euclid(8);
        if dm % 2 == 0 {
            return 0;
        }
        if dm == 3 || dm == 5 {
            res = -res;
        }
    }
    res * jacobi(d, a)
}

fn jacobi(d: i64, n: u64) -> i64 {
    if n == 1 {
        return 1;
    }
    let mut a = d.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut res = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                res = -res;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            res = -res;
        }
        a %= n;
    }
    if n == 1 {
        res
    } else {
        0
    }
}

/// `tau(chi) = sum_a chi(a) zeta_m^a` in `Q(zeta_{lcm(n, m)})`.
pub fn gauss_sum_exact(chi: &DirichletCharacter) -> CycloQ {
    let m = chi.modulus;
    let mut acc = CycloQ::zero(chi.n.lcm(&m));
    for a in 0..m as i64 {
        if chi.exp(a).is_some() {
            acc = acc.add(&chi.value(a).mul(&CycloQ::zeta_pow(m, a)));
        }
    }
    acc
}

/// `sum_a chi(a) * f(a)` for a rational-valued `f`, as an element of `Q(zeta_n)`.
pub fn character_sum(chi: &DirichletCharacter, f: impl Fn(i64) -> Q) -> CycloQ {
    let mut c = vec![Q::default(); chi.n as usize];
    for a in 0..chi.modulus as i64 {
        if let Some(e) = chi.exp(a) {
            c[e as usize] += f(a);
        }
    }
    let mut out = CycloQ::zero(chi.n);
    for (e, x) in c.into_iter().enumerate() {
        if x != Q::default() {
            out = out.add(&CycloQ::zeta_pow(chi.n, e as i64).scale(&x));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    #[test]
    fn counts_and_parities_mod_nine() {
        let chars = DirichletCharacter::all_mod(9);
        assert_eq!(chars.len(), 6);
        let prim: Vec<_> = chars.iter().filter(|c| c.is_primitive()).collect();
        assert_eq!(prim.len(), 4);
        let cond3: Vec<_> = chars.iter().filter(|c| c.conductor() == 3).collect();
        assert_eq!(cond3.len(), 1);
        assert_eq!(cond3[0].parity(), -1);
        let odd = prim.iter().filter(|c| c.parity() == -1).count();
        assert_eq!(odd, 2);
    }

    #[test]
    fn multiplicativity() {
        for chi in DirichletCharacter::all_mod(25) {
            for a in 1..25i64 {
                for b in 1..25i64 {
                    let lhs = chi.value(a * b);
                    let rhs = chi.value(a).mul(&chi.value(b));
                    assert_eq!(lhs.lift(chi.n), rhs.lift(chi.n));
                }
            }
        }
    }

    #[test]
    fn quadratic_gauss_sum_mod_five_squares_to_five() {
        let chi = DirichletCharacter::all_mod(5)
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap();
        let t = gauss_sum_exact(&chi);
        assert_eq!(t.mul(&t).as_rational(), Some(q(5)));
    }

    #[test]
    fn gauss_sum_norm_identity() {
        for m in [3u64, 5, 7, 9, 25, 27] {
            for chi in DirichletCharacter::all_mod(m)
                .into_iter()
                .filter(|c| c.is_primitive())
            {
                let t = gauss_sum_exact(&chi);
                let tb = gauss_sum_exact(&chi.conj());
                assert_eq!(
                    t.mul(&tb).as_rational(),
                    Some(q(chi.parity() * m as i64)),
                    "m = {m}"
                );
            }
        }
    }

    #[test]
    fn kronecker_minus_four() {
        let chi = DirichletCharacter::kronecker(-4);
        assert_eq!(chi.exp(1), Some(0));
        assert_eq!(chi.exp(3), Some(1));
        assert_eq!(chi.parity(), -1);
        assert!(chi.is_primitive());
        assert_eq!(kronecker_symbol(-4, 5), 1);
        assert_eq!(kronecker_symbol(-4, 7), -1);
    }
}
