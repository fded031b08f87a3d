//! Cosets `Gamma_0(N) \ SL_2(Z)`, identified with `P^1(Z/N)`, and symbols
//! given by their values `x_c = Phi(g_c {0 -> oo})` on coset representatives.

use num_integer::Integer;
use rayon::prelude::*;

use super::mat2::{unimodular_path, Mat2};
use crate::arith::Ring;

#[derive(Clone, Debug)]
pub struct Manin {
    pub level: u64,
    /// `table[c * N + d]` is the coset index of `(c : d)`, if `gcd(c, d, N) = 1`.
    table: Vec<Option<u32>>,
    /// `g_c` in `SL_2(Z)` with bottom row representing coset `c`.
    pub reps: Vec<Mat2>,
}

impl Manin {
    pub fn new(level: u64) -> Self {
        assert!(level >= 1);
        let n = level as usize;
        let mut table = vec![None; n * n];
        let units: Vec<u64> = (1..=level)
            .filter(|u| u.gcd(&level) == 1)
            .map(|u| u % level)
            .collect();
        let mut reps = Vec::new();
        for c in 0..level {
            for d in 0..level {
                if table[(c * level + d) as usize].is_some() || c.gcd(&d).gcd(&level) != 1 {
                    continue;
                }
                let idx = reps.len() as u32;
                for &u in &units {
                    let (uc, ud) = (u * c % level, u * d % level);
                    table[(uc * level + ud) as usize] = Some(idx);
                }
                reps.push(lift_to_sl2(c, d, level));
            }
        }
        if level == 1 {
            table = vec![Some(0)];
            reps = vec![Mat2::new(1, 0, 0, 1)];
        }
        Manin { level, table, reps }
    }

    pub fn ncosets(&self) -> usize {
        self.reps.len()
    }

    /// Coset index of any integer matrix with coprime bottom row.
    pub fn coset_of(&self, g: &Mat2) -> usize {
        let n = self.level as i64;
        let c = g.c.rem_euclid(n) as usize;
        let d = g.d.rem_euclid(n) as usize;
        self.table[c * n as usize + d].expect("bottom row not coprime to the level") as usize
    }

    /// Index of the coset containing the identity.
    pub fn identity_coset(&self) -> usize {
        self.coset_of(&Mat2::new(1, 0, 0, 1))
    }
}

fn lift_to_sl2(c: u64, d: u64, n: u64) -> Mat2 {
    if n == 1 {
        return Mat2::new(1, 0, 0, 1);
    }
    let c1 = if c == 0 { n } else { c } as i64;
    let mut d1 = d as i64;
    while c1.gcd(&d1) != 1 {
        d1 += n as i64;
    }
    // a d1 - b c1 = 1
    let e = c1.extended_gcd(&d1);
    // e.x * c1 + e.y * d1 = 1  =>  a = e.y, b = -e.x
    let g = Mat2::new(e.y, -e.x, c1, d1);
    debug_assert_eq!(g.det(), 1);
    g
}

/// A right action of integer matrices on coefficient vectors over `R`.
pub trait Action<R: Ring>: Send + Sync {
    fn act(&self, v: &[R], g: &Mat2) -> Vec<R>;
    fn zero(&self) -> Vec<R>;
}

pub fn vec_add<R: Ring>(a: &mut [R], b: &[R]) {
    for (x, y) in a.iter_mut().zip(b) {
        x.add_assign(y);
    }
}

pub fn vec_sub<R: Ring>(a: &mut [R], b: &[R]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.sub(y);
    }
}

pub fn vec_scale<R: Ring>(a: &[R], s: &R) -> Vec<R> {
    a.iter().map(|x| x.mul(s)).collect()
}

/// A modular symbol for `Gamma_0(N)` with coefficients in `R^n`, stored as
/// its values on the coset representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol<R> {
    pub values: Vec<Vec<R>>,
}

impl<R: Ring> Symbol<R> {
    pub fn zero(manin: &Manin, act: &dyn Action<R>) -> Self {
        Symbol {
            values: vec![act.zero(); manin.ncosets()],
        }
    }

    /// `Phi(g {0 -> oo})` for `g` in `SL_2(Z)`: `x_c | (g_c g^{-1})`.
    pub fn eval_unimodular(&self, manin: &Manin, act: &dyn Action<R>, g: &Mat2) -> Vec<R> {
        let c = manin.coset_of(g);
        let h = manin.reps[c].mul(&g.inv_unimodular());
        act.act(&self.values[c], &h)
    }

    /// `Phi({oo -> num/den})`.
    pub fn eval_from_infinity(
        &self,
        manin: &Manin,
        act: &dyn Action<R>,
        num: i64,
        den: i64,
    ) -> Vec<R> {
        let mut acc = act.zero();
        for g in unimodular_path(num, den) {
            vec_add(&mut acc, &self.eval_unimodular(manin, act, &g));
        }
        acc
    }

    /// `Phi({r -> s})` for cusps given as `(num, den)`.
    pub fn eval_path(
        &self,
        manin: &Manin,
        act: &dyn Action<R>,
        r: (i64, i64),
        s: (i64, i64),
    ) -> Vec<R> {
        let mut v = self.eval_from_infinity(manin, act, s.0, s.1);
        vec_sub(&mut v, &self.eval_from_infinity(manin, act, r.0, r.1));
        v
    }

    /// `Phi({a/m -> oo})`.
    pub fn eval_to_infinity(&self, manin: &Manin, act: &dyn Action<R>, a: i64, m: i64) -> Vec<R> {
        let mut v = self.eval_from_infinity(manin, act, a, m);
        v.iter_mut().for_each(|x| *x = x.neg());
        v
    }

    /// `sum_beta Phi(beta D) | beta`, evaluated on every coset path.
    pub fn apply_double_coset(&self, manin: &Manin, act: &dyn Action<R>, betas: &[Mat2]) -> Self {
        let values = (0..manin.ncosets())
            .into_par_iter()
            .map(|c| {
                let g = manin.reps[c];
                let mut acc = act.zero();
                for beta in betas {
                    let bg = beta.mul(&g);
                    let r = bg.act_cusp(0, 1);
                    let s = bg.act_cusp(1, 0);
                    let v = self.eval_path(manin, act, r, s);
                    vec_add(&mut acc, &act.act(&v, beta));
                }
                acc
            })
            .collect();
        Symbol { values }
    }

    /// Pull a symbol of level `M` back to level `N` (a multiple of `M`).
    pub fn pullback(&self, from: &Manin, to: &Manin, act: &dyn Action<R>) -> Self {
        assert!(to.level % from.level == 0);
        let values = to
            .reps
            .iter()
            .map(|g| self.eval_unimodular(from, act, g))
            .collect();
        Symbol { values }
    }

    pub fn add(&self, o: &Self) -> Self {
        let values = self
            .values
            .iter()
            .zip(&o.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
            .collect();
        Symbol { values }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let values = self
            .values
            .iter()
            .zip(&o.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.sub(y)).collect())
            .collect();
        Symbol { values }
    }

    pub fn scale(&self, s: &R) -> Self {
        Symbol {
            values: self.values.iter().map(|v| vec_scale(v, s)).collect(),
        }
    }

    pub fn map<S>(&self, f: impl Fn(&R) -> S) -> Symbol<S> {
        Symbol {
            values: self
                .values
                .iter()
                .map(|v| v.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|x| x.vanishes()))
    }

    /// Defects of the Manin relations (two-term, three-term, and `-1`),
    /// which vanish exactly for a genuine symbol.
    pub fn relation_defects(&self, manin: &Manin, act: &dyn Action<R>) -> Vec<Vec<R>> {
        use super::mat2::{MINUS_ONE, S, TAU};
        let mut out = Vec::new();
        for g in &manin.reps {
            let mut two = self.eval_unimodular(manin, act, g);
            vec_add(&mut two, &self.eval_unimodular(manin, act, &g.mul(&S)));
            out.push(two);
            let gt = g.mul(&TAU);
            let mut three = self.eval_unimodular(manin, act, g);
            vec_add(&mut three, &self.eval_unimodular(manin, act, &gt));
            vec_add(&mut three, &self.eval_unimodular(manin, act, &gt.mul(&TAU)));
            out.push(three);
            let mut minus = self.eval_unimodular(manin, act, &g.mul(&MINUS_ONE));
            vec_sub(&mut minus, &self.eval_unimodular(manin, act, g));
            out.push(minus);
        }
        out
    }
}

/// The operators as lists of matrices `beta` in `sum_beta Phi(beta D)|beta`.
pub fn hecke_betas(op: &super::HeckeOp) -> Vec<Mat2> {
    use super::HeckeOp;
    match *op {
        HeckeOp::T(l) => {
            let l = l as i64;
            let mut v: Vec<Mat2> = (0..l).map(|a| Mat2::new(1, a, 0, l)).collect();
            v.push(Mat2::new(l, 0, 0, 1));
            v
        }
        HeckeOp::U(q) => (0..q as i64)
            .map(|a| Mat2::new(1, a, 0, q as i64))
            .collect(),
        HeckeOp::Iota => vec![super::mat2::IOTA],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index(n: u64) -> u64 {
        let mut idx = n;
        let mut m = n;
        let mut f = 2;
        while f * f <= m {
            if m % f == 0 {
                idx = idx / f * (f + 1);
                while m % f == 0 {
                    m /= f;
                }
            }
            f += 1;
        }
        if m > 1 {
            idx = idx / m * (m + 1);
        }
        idx
    }

    #[test]
    fn coset_counts_match_the_index_formula() {
        for n in [1u64, 2, 11, 33, 36, 55, 77, 100] {
            assert_eq!(Manin::new(n).ncosets() as u64, index(n), "N = {n}");
        }
        assert_eq!(Manin::new(33).ncosets(), 48);
    }

    #[test]
    fn representatives_are_in_their_cosets() {
        let m = Manin::new(45);
        for (i, g) in m.reps.iter().enumerate() {
            assert_eq!(g.det(), 1);
            assert_eq!(m.coset_of(g), i);
        }
    }
}
