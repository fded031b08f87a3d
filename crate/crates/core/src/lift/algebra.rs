//! Generalised eigenspaces of commuting operators and the finite algebras
//! they generate, with the local-algebra invariants (maximal ideal, socle)
//! needed for Gorenstein checks.

use serde::Serialize;

use crate::arith::Field;
use crate::error::{Error, Result};
use crate::linalg::{common_kernel, solve_in_span, span_basis, Matrix};

#[derive(Clone, Debug)]
pub struct GeneralisedEigenspace<F> {
    /// Basis in ambient coordinates.
    pub basis: Vec<Vec<F>>,
    /// The honest eigenspace, in ambient coordinates.
    pub eigenspace: Vec<Vec<F>>,
    /// Each operator restricted to `basis`.
    pub ops: Vec<(String, Matrix<F>)>,
    /// `(label, T - a_T restricted, nilpotency index)`.
    pub nilpotent: Vec<(String, Matrix<F>, usize)>,
}

impl<F: Field> GeneralisedEigenspace<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_semisimple(&self) -> bool {
        self.nilpotent.iter().all(|(_, _, e)| *e <= 1)
    }
}

/// `∩ ker (T - a_T)^d` over the given operators, `d` the ambient dimension.
pub fn generalised_eigenspace<F: Field>(
    ops: &[(String, Matrix<F>, F)],
) -> Result<GeneralisedEigenspace<F>> {
    let (_, first, _) = ops
        .first()
        .ok_or_else(|| Error::Config("no operators given".into()))?;
    let d = first.rows;
    let shifted: Vec<Matrix<F>> = ops.iter().map(|(_, m, a)| m.minus_scalar(a)).collect();
    let basis = common_kernel(&shifted.iter().map(|m| m.pow(d)).collect::<Vec<_>>());
    if basis.is_empty() {
        return Err(Error::Check("the generalised eigenspace is zero".into()));
    }
    let eigenspace = common_kernel(&shifted);
    let mut restricted = Vec::new();
    let mut nilpotent = Vec::new();
    for ((label, m, _), n) in ops.iter().zip(&shifted) {
        restricted.push((label.clone(), m.restrict(&basis)));
        let nr = n.restrict(&basis);
        let index = (0..=basis.len())
            .find(|&e| nr.pow(e).is_zero())
            .unwrap_or(basis.len());
        nilpotent.push((label.clone(), nr, index));
    }
    Ok(GeneralisedEigenspace {
        basis,
        eigenspace,
        ops: restricted,
        nilpotent,
    })
}

/// A finite-dimensional commutative algebra of operators on a module,
/// stored by a basis of matrices (the identity first) and structure
/// constants.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra<F> {
    pub generators: Vec<String>,
    pub basis: Vec<Matrix<F>>,
    /// `table[i][j]` holds the coordinates of `basis[i] * basis[j]`.
    pub table: Vec<Vec<Vec<F>>>,
}

fn flatten<F: Clone>(m: &Matrix<F>) -> Vec<F> {
    m.data.clone()
}

impl<F: Field> FiniteAlgebra<F> {
    /// The unital subalgebra generated by `gens`.
    pub fn generated_by(gens: &[(String, Matrix<F>)]) -> Self {
        assert!(!gens.is_empty(), "an algebra needs a generator");
        let like = gens[0].1.like();
        let n = gens[0].1.rows;
        let mut basis = vec![Matrix::identity(n, &like)];
        let mut next = 0;
        while next < basis.len() {
            let b = basis[next].clone();
            next += 1;
            for (_, g) in gens {
                let prod = g.mul(&b);
                if Self::coords_in(&basis, &prod).is_none() {
                    basis.push(prod);
                }
            }
        }
        let table = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .map(|b| Self::coords_in(&basis, &a.mul(b)).expect("algebra is closed"))
                    .collect()
            })
            .collect();
        FiniteAlgebra {
            generators: gens.iter().map(|g| g.0.clone()).collect(),
            basis,
            table,
        }
    }

    fn coords_in(basis: &[Matrix<F>], m: &Matrix<F>) -> Option<Vec<F>> {
        let like = m.like();
        let cols: Vec<Vec<F>> = basis.iter().map(flatten).collect();
        solve_in_span(&Matrix::from_cols(&cols, &like), &flatten(m))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn like(&self) -> F {
        self.basis[0].like()
    }

    pub fn coords(&self, m: &Matrix<F>) -> Option<Vec<F>> {
        Self::coords_in(&self.basis, m)
    }

    pub fn element(&self, c: &[F]) -> Matrix<F> {
        let like = self.like();
        let n = self.basis[0].rows;
        c.iter()
            .zip(&self.basis)
            .fold(Matrix::zeros(n, n, &like), |acc, (x, b)| {
                acc.add(&b.scale(x))
            })
    }

    pub fn one(&self) -> Vec<F> {
        let like = self.like();
        (0..self.dim())
            .map(|i| {
                if i == 0 {
                    like.one_like()
                } else {
                    like.zero_like()
                }
            })
            .collect()
    }

    pub fn mul(&self, a: &[F], b: &[F]) -> Vec<F> {
        let like = self.like();
        let mut out = vec![like.zero_like(); self.dim()];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.vanishes()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.vanishes()) {
                let xy = x.mul(y);
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    *o = o.add(&xy.mul(t));
                }
            }
        }
        out
    }

    fn unit_vectors(&self) -> Vec<Vec<F>> {
        let like = self.like();
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| {
                        if i == j {
                            like.one_like()
                        } else {
                            like.zero_like()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.table[i][j] == self.table[j][i]))
    }

    pub fn is_associative(&self) -> bool {
        let e = self.unit_vectors();
        e.iter().all(|a| {
            e.iter().all(|b| {
                e.iter()
                    .all(|c| self.mul(&self.mul(a, b), c) == self.mul(a, &self.mul(b, c)))
            })
        })
    }

    /// Basis of the ideal generated by `elts`.
    pub fn ideal(&self, elts: &[Vec<F>]) -> Vec<Vec<F>> {
        let e = self.unit_vectors();
        let prods: Vec<Vec<F>> = elts
            .iter()
            .flat_map(|x| e.iter().map(move |b| self.mul(x, b)))
            .collect();
        span_basis(&prods)
            .into_iter()
            .filter(|v| v.iter().any(|x| !x.vanishes()))
            .collect()
    }

    /// The maximal ideal if the algebra is local with residue field the base
    /// field: every generator must have a single eigenvalue.
    pub fn maximal_ideal(&self) -> Option<Vec<Vec<F>>> {
        let like = self.like();
        let n = self.basis[0].rows;
        let mut shifted = Vec::new();
        for b in &self.basis {
            let tr = (0..n).fold(like.zero_like(), |acc, i| acc.add(b.get(i, i)));
            let a = tr.mul(&like.from_i64_like(n as i64).inv()?);
            let x = b.minus_scalar(&a);
            if !x.pow(n).is_zero() {
                return None;
            }
            shifted.push(self.coords(&x)?);
        }
        let m = self.ideal(&shifted);
        (m.len() + 1 == self.dim()).then_some(m)
    }

    /// `{x : x m = 0 for all m in ideal}`.
    pub fn annihilator(&self, ideal: &[Vec<F>]) -> Vec<Vec<F>> {
        let like = self.like();
        let d = self.dim();
        if ideal.is_empty() {
            return self.unit_vectors();
        }
        // x -> (x m_1, ..., x m_r) as a (d r) x d matrix
        let e = self.unit_vectors();
        let mut rows = vec![vec![like.zero_like(); d]; d * ideal.len()];
        for (j, ej) in e.iter().enumerate() {
            for (t, m) in ideal.iter().enumerate() {
                for (i, v) in self.mul(ej, m).into_iter().enumerate() {
                    rows[t * d + i][j] = v;
                }
            }
        }
        Matrix::from_rows(rows).kernel()
    }

    /// Socle dimension and the Gorenstein verdict (socle of dimension one).
    pub fn gorenstein(&self) -> Result<GorensteinVerdict> {
        let m = self
            .maximal_ideal()
            .ok_or_else(|| Error::Check("the algebra is not local".into()))?;
        let socle = self.annihilator(&m).len();
        Ok(GorensteinVerdict {
            dim: self.dim(),
            socle_dim: socle,
            gorenstein: socle == 1,
        })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GorensteinVerdict {
    pub dim: usize,
    pub socle_dim: usize,
    pub gorenstein: bool,
}

/// The algebra generated by the operators on a generalised eigenspace.
pub fn hecke_algebra_image<F: Field>(space: &GeneralisedEigenspace<F>) -> FiniteAlgebra<F> {
    FiniteAlgebra::generated_by(&space.ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::quad::Quad;
    use crate::arith::{q, Q};
    use crate::modsym::{HeckeOp, SymbolSpace};

    fn lift_matrix(m: &Matrix<Q>, d: i64) -> Matrix<Quad> {
        Matrix {
            rows: m.rows,
            cols: m.cols,
            data: m
                .data
                .iter()
                .map(|x| Quad::rational(x.clone(), d))
                .collect(),
        }
    }

    #[test]
    fn regular_stabilisation_of_eleven_a() {
        // 11a at p = 3: a_3 = -1, so alpha is a root of X^2 + X + 3
        let space = SymbolSpace::build(33, 0, Some(1));
        let t2 = space.hecke_matrix(HeckeOp::T(2)).unwrap();
        let u3 = space.hecke_matrix(HeckeOp::U(3)).unwrap();
        let (alpha, _) = Quad::roots_of_monic_quadratic(&q(1), &q(3));
        let d = alpha.d;
        let a2 = Quad::rational(q(-2), d);
        let old =
            generalised_eigenspace(&[("T2".into(), lift_matrix(&t2, d), a2.clone())]).unwrap();
        assert_eq!(old.dim(), 2);
        let both = generalised_eigenspace(&[
            ("T2".into(), lift_matrix(&t2, d), a2),
            ("U3".into(), lift_matrix(&u3, d), alpha),
        ])
        .unwrap();
        assert_eq!((both.dim(), both.eigenspace.len()), (1, 1));
        assert_eq!(hecke_algebra_image(&both).dim(), 1);
        // on the old space U3 has distinct roots: a split algebra L x L
        let split =
            FiniteAlgebra::generated_by(&[("U3".into(), lift_matrix(&u3, d).restrict(&old.basis))]);
        assert_eq!(split.dim(), 2);
        assert!(split.maximal_ideal().is_none());
    }

    #[test]
    fn socles_of_small_local_algebras() {
        let x = Matrix::from_i64(&[&[0, 0], &[1, 0]]);
        let a = FiniteAlgebra::generated_by(&[("X".into(), x)]);
        assert!(a.is_commutative() && a.is_associative());
        assert_eq!(
            a.gorenstein().unwrap(),
            GorensteinVerdict {
                dim: 2,
                socle_dim: 1,
                gorenstein: true
            }
        );
        // Q[X, Y] / (X, Y)^2 on the basis 1, X, Y
        let x = Matrix::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]);
        let y = Matrix::from_i64(&[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
        let b = FiniteAlgebra::generated_by(&[("X".into(), x), ("Y".into(), y)]);
        assert_eq!(b.gorenstein().unwrap().socle_dim, 2);
        let diag = Matrix::from_i64(&[&[1, 0], &[0, 2]]);
        assert!(FiniteAlgebra::generated_by(&[("D".into(), diag)])
            .gorenstein()
            .is_err());
    }
}
