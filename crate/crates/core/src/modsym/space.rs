//! The exact space of `Gamma_0(N)` modular symbols of weight `k + 2`, built
//! from the Manin relations, with Hecke matrices and sign decomposition.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::coeff::{symk_matrix, SymK};
use super::manin::{hecke_betas, Manin, Symbol};
use super::mat2::{Mat2, MINUS_ONE, S, TAU};
use super::HeckeOp;
use crate::arith::{q, Q};
use crate::error::{Error, Result};
use crate::linalg::{solve_in_span, Matrix};

#[derive(Clone, Debug)]
pub struct SymbolSpace {
    pub manin: Arc<Manin>,
    pub k: u32,
    pub sign: Option<i8>,
    /// Basis of the full (unsigned) space as symbols.
    full_basis: Vec<Symbol<Q>>,
    /// Unknown positions `c * (k+1) + j` that are free in the relation system;
    /// a symbol's full coordinates are its values there.
    free: Vec<usize>,
    /// Basis of this (possibly signed) space in full coordinates.
    basis: Vec<Vec<Q>>,
}

impl SymbolSpace {
    pub fn build(level: u64, k: u32, sign: Option<i8>) -> Self {
        let manin = Arc::new(Manin::new(level));
        let n = manin.ncosets();
        let w = k as usize + 1;
        let nvars = n * w;
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let mut push_relation = |terms: &[(usize, Mat2, i64)]| {
            for j in 0..w {
                let mut row = vec![Q::zero(); nvars];
                for (c, h, sgn) in terms {
                    let a = symk_matrix(k, h);
                    for m in 0..w {
                        if a[j][m] != 0 {
                            row[c * w + m] += q(*sgn) * Q::from_integer((a[j][m]).into());
                        }
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        };
        // val(g) = x_{c(g)} | (g_{c(g)} g^{-1})
        let term = |g: &Mat2, sgn: i64| {
            let c = manin.coset_of(g);
            (c, manin.reps[c].mul(&g.inv_unimodular()), sgn)
        };
        for g in &manin.reps {
            push_relation(&[term(g, 1), term(&g.mul(&S), 1)]);
            let gt = g.mul(&TAU);
            push_relation(&[term(g, 1), term(&gt, 1), term(&gt.mul(&TAU), 1)]);
            push_relation(&[term(&g.mul(&MINUS_ONE), 1), term(g, -1)]);
        }
        let (full_basis_vecs, free) = if rows.is_empty() {
            let id: Vec<Vec<Q>> = (0..nvars)
                .map(|i| {
                    (0..nvars)
                        .map(|j| if i == j { Q::one() } else { Q::zero() })
                        .collect()
                })
                .collect();
            (id, (0..nvars).collect())
        } else {
            let m = Matrix::from_rows(rows);
            let mut r = m.clone();
            let piv = r.rref();
            let free: Vec<usize> = (0..nvars).filter(|c| !piv.contains(c)).collect();
            (m.kernel(), free)
        };
        let full_basis: Vec<Symbol<Q>> = full_basis_vecs
            .iter()
            .map(|v| Symbol {
                values: v.chunks(w).map(|c| c.to_vec()).collect(),
            })
            .collect();
        let dim = full_basis.len();
        let identity: Vec<Vec<Q>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Q::one() } else { Q::zero() })
                    .collect()
            })
            .collect();
        let mut space = SymbolSpace {
            manin,
            k,
            sign: None,
            full_basis,
            free,
            basis: identity,
        };
        if let Some(eps) = sign {
            let iota = space
                .hecke_matrix(HeckeOp::Iota)
                .expect("iota is always defined");
            let basis = if dim == 0 {
                vec![]
            } else {
                iota.minus_scalar(&q(eps as i64)).kernel()
            };
            space.basis = basis;
            space.sign = Some(eps);
        }
        space
    }

    pub fn level(&self) -> u64 {
        self.manin.level
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn full_dim(&self) -> usize {
        self.full_basis.len()
    }

    pub fn action(&self) -> SymK<Q> {
        SymK::new(self.k, Q::zero())
    }

    /// The symbol with the given coordinates in this space's basis.
    pub fn symbol(&self, coords: &[Q]) -> Symbol<Q> {
        assert_eq!(coords.len(), self.dim());
        let mut full = vec![Q::zero(); self.full_dim()];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (f, x) in full.iter_mut().zip(b) {
                *f += c * x;
            }
        }
        self.symbol_from_full(&full)
    }

    fn symbol_from_full(&self, full: &[Q]) -> Symbol<Q> {
        let w = self.k as usize + 1;
        let mut values = vec![vec![Q::zero(); w]; self.manin.ncosets()];
        for (c, b) in full.iter().zip(&self.full_basis) {
            if c.is_zero() {
                continue;
            }
            for (vals, bv) in values.iter_mut().zip(&b.values) {
                for (x, y) in vals.iter_mut().zip(bv) {
                    *x += c * y;
                }
            }
        }
        Symbol { values }
    }

    pub fn basis_symbols(&self) -> Vec<Symbol<Q>> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                let e: Vec<Q> = (0..d)
                    .map(|j| if i == j { Q::one() } else { Q::zero() })
                    .collect();
                self.symbol(&e)
            })
            .collect()
    }

    fn full_coords(&self, s: &Symbol<Q>) -> Vec<Q> {
        let w = self.k as usize + 1;
        self.free
            .iter()
            .map(|&u| s.values[u / w][u % w].clone())
            .collect()
    }

    /// Coordinates of a symbol of this level in this space's basis, or `None`
    /// if it does not lie in the space.
    pub fn coords(&self, s: &Symbol<Q>) -> Option<Vec<Q>> {
        let full = self.full_coords(s);
        if self.symbol_from_full(&full) != *s {
            return None;
        }
        if self.sign.is_none() {
            return Some(full);
        }
        if self.dim() == 0 {
            return if full.iter().all(|x| x.is_zero()) {
                Some(vec![])
            } else {
                None
            };
        }
        solve_in_span(&Matrix::from_cols(&self.basis, &Q::zero()), &full)
    }

    pub fn check_op(&self, op: HeckeOp) -> Result<()> {
        let n = self.level();
        match op {
            HeckeOp::T(l) if n % l == 0 => Err(Error::Config(format!(
                "T_{l} requested at level {n}; use U_{l}"
            ))),
            HeckeOp::U(l) if n % l != 0 => Err(Error::Config(format!(
                "U_{l} requested but {l} does not divide {n}"
            ))),
            HeckeOp::T(l) | HeckeOp::U(l) if !is_prime(l) => {
                Err(Error::Config(format!("{l} is not prime")))
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, op: HeckeOp, s: &Symbol<Q>) -> Symbol<Q> {
        s.apply_double_coset(&self.manin, &self.action(), &hecke_betas(&op))
    }

    /// Matrix of a Hecke operator in this space's basis (columns are images).
    pub fn hecke_matrix(&self, op: HeckeOp) -> Result<Matrix<Q>> {
        self.check_op(op)?;
        let d = self.dim();
        if d == 0 {
            return Ok(Matrix {
                rows: 0,
                cols: 0,
                data: vec![],
            });
        }
        let cols: Vec<Vec<Q>> = self
            .basis_symbols()
            .iter()
            .map(|b| {
                let img = self.apply(op, b);
                self.coords(&img).expect("Hecke image left the space")
            })
            .collect();
        Ok(Matrix::from_cols(&cols, &Q::zero()))
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|f| f * f <= n).all(|f| n % f != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::Poly;

    #[test]
    fn dimension_at_level_eleven() {
        let s = SymbolSpace::build(11, 0, None);
        assert_eq!(s.dim(), 3);
        assert_eq!(SymbolSpace::build(11, 0, Some(1)).dim(), 2);
        assert_eq!(SymbolSpace::build(11, 0, Some(-1)).dim(), 1);
    }

    #[test]
    fn level_one() {
        assert_eq!(SymbolSpace::build(1, 0, None).dim(), 0);
        // weight 12: Delta (both signs) plus Eisenstein; tau(2) = -24
        let s = SymbolSpace::build(1, 10, Some(-1));
        assert_eq!(s.dim(), 1);
        assert_eq!(s.hecke_matrix(HeckeOp::T(2)).unwrap().get(0, 0), &q(-24));
        assert_eq!(SymbolSpace::build(1, 10, None).dim(), 3);
    }

    #[test]
    fn t3_at_level_eleven() {
        let s = SymbolSpace::build(11, 0, None);
        let t3 = s.hecke_matrix(HeckeOp::T(3)).unwrap();
        // cuspidal root a_3 = -1 (twice, one per sign), Eisenstein root 1 + 3 = 4
        let expected = Poly::x_minus(&q(-1)).pow(2).mul(&Poly::x_minus(&q(4)));
        assert_eq!(t3.charpoly(), expected);
    }

    #[test]
    fn iota_is_an_involution_and_hecke_commutes() {
        let s = SymbolSpace::build(23, 0, None);
        let i = s.hecke_matrix(HeckeOp::Iota).unwrap();
        assert_eq!(i.mul(&i), Matrix::identity(s.dim(), &q(0)));
        let t2 = s.hecke_matrix(HeckeOp::T(2)).unwrap();
        let t3 = s.hecke_matrix(HeckeOp::T(3)).unwrap();
        assert_eq!(t2.mul(&t3), t3.mul(&t2));
        assert_eq!(t2.mul(&i), i.mul(&t2));
    }

    #[test]
    fn bad_prime_rejected() {
        let s = SymbolSpace::build(33, 0, None);
        assert!(s.hecke_matrix(HeckeOp::T(3)).is_err());
        assert!(s.hecke_matrix(HeckeOp::U(5)).is_err());
    }

    #[test]
    fn basis_symbols_satisfy_relations() {
        let s = SymbolSpace::build(15, 2, None);
        for b in s.basis_symbols() {
            let d = b.relation_defects(&s.manin, &s.action());
            assert!(d.iter().all(|v| v.iter().all(|x| x.is_zero())));
        }
    }
}
