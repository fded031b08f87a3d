//! The dual of polynomials of degree `<= k`, stored as moments
//! `mu(z^0), ..., mu(z^k)`, with `(mu|g)(z^j) = mu((a + c z)^{k-j} (b + d z)^j)`.

use num_bigint::BigInt;

use super::manin::Action;
use super::mat2::Mat2;
use crate::arith::Ring;

#[derive(Clone, Debug)]
pub struct SymK<R> {
    pub k: u32,
    pub like: R,
}

impl<R: Ring> SymK<R> {
    pub fn new(k: u32, like: R) -> Self {
        SymK { k, like }
    }
}

/// Coefficients of `(a + c z)^e1 (b + d z)^e2` as exact integers.
pub fn expand_binomials(a: i64, c: i64, e1: u32, b: i64, d: i64, e2: u32) -> Vec<i128> {
    let mut poly = vec![1i128];
    let mut mul_lin = |x: i128, y: i128| {
        let mut next = vec![0i128; poly.len() + 1];
        for (i, &v) in poly.iter().enumerate() {
            next[i] += v * x;
            next[i + 1] += v * y;
        }
        poly = next;
    };
    for _ in 0..e1 {
        mul_lin(a as i128, c as i128);
    }
    for _ in 0..e2 {
        mul_lin(b as i128, d as i128);
    }
    poly
}

/// The `(k+1) x (k+1)` integer matrix `A` with `(mu|g)_j = sum_m A[j][m] mu_m`.
pub fn symk_matrix(k: u32, g: &Mat2) -> Vec<Vec<i128>> {
    (0..=k)
        .map(|j| expand_binomials(g.a, g.c, k - j, g.b, g.d, j))
        .collect()
}

impl<R: Ring> Action<R> for SymK<R> {
    fn act(&self, v: &[R], g: &Mat2) -> Vec<R> {
        let m = symk_matrix(self.k, g);
        m.iter()
            .map(|row| {
                let mut acc = self.like.zero_like();
                for (coef, x) in row.iter().zip(v) {
                    if *coef != 0 && !x.vanishes() {
                        acc = acc.add(&x.mul(&self.like.from_bigint_like(&BigInt::from(*coef))));
                    }
                }
                acc
            })
            .collect()
    }

    fn zero(&self) -> Vec<R> {
        vec![self.like.zero_like(); self.k as usize + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, Q};

    #[test]
    fn action_is_a_right_action() {
        let act = SymK::new(3, q(0));
        let mu: Vec<Q> = vec![q(1), q(-2), q(5), q(7)];
        let g1 = Mat2::new(2, 1, 3, 2);
        let g2 = Mat2::new(1, -4, 11, -43);
        let lhs = act.act(&act.act(&mu, &g1), &g2);
        let rhs = act.act(&mu, &g1.mul(&g2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn identity_acts_trivially() {
        let act = SymK::new(4, q(0));
        let mu: Vec<Q> = (0..5).map(|i| q(i * i - 3)).collect();
        assert_eq!(act.act(&mu, &Mat2::new(1, 0, 0, 1)), mu);
    }
}
