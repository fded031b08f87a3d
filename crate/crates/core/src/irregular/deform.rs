//! Truncated families over `R = L[w]/(w^n)` through the irregular point:
//! `U - alpha` deforms to `X` with `X^2 = w u`, so the family algebra is
//! `R[X]/(X^2 - w u)` (rank two) or its tensor square (rank four). An
//! `R`-matrix is stored by `w`-degree.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{kron, SyntheticEigenspace};
use crate::arith::Q;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// An `R`-matrix by `w`-degree.
pub type RMat = Vec<Matrix<Q>>;
type RVec = Vec<Vec<Q>>;

fn rzero(n: usize, d: usize) -> RMat {
    vec![Matrix::zeros(d, d, &Q::zero()); n]
}

fn rid(n: usize, d: usize) -> RMat {
    let mut out = rzero(n, d);
    out[0] = Matrix::identity(d, &Q::zero());
    out
}

fn rmul(a: &RMat, b: &RMat) -> RMat {
    let n = a.len();
    let mut out = rzero(n, a[0].rows);
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] = out[i + j].add(&a[i].mul(&b[j]));
        }
    }
    out
}

fn rmul_vec(a: &RMat, v: &RVec) -> RVec {
    let n = a.len();
    let mut out = vec![vec![Q::zero(); a[0].rows]; n];
    for i in 0..n {
        for j in 0..n - i {
            for (o, x) in out[i + j].iter_mut().zip(a[i].mul_vec(&v[j])) {
                *o += x;
            }
        }
    }
    out
}

fn rkron(a: &RMat, b: &RMat) -> RMat {
    let n = a.len();
    let mut out = rzero(n, a[0].rows * b[0].rows);
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] = out[i + j].add(&kron(&a[i], &b[j]));
        }
    }
    out
}

fn is_rzero(a: &RMat) -> bool {
    a.iter().all(|m| m.is_zero())
}

/// Solve `M c = e` over `R` when `M mod w` is invertible, lifting one degree
/// at a time: `c_i = M_0^{-1} (e_i - sum_{t >= 1} M_t c_{i-t})`.
fn nakayama_solve(m: &RMat, e: &RVec) -> Option<RVec> {
    let inv = m[0].inverse()?;
    let n = m.len();
    let mut c: RVec = Vec::with_capacity(n);
    for i in 0..n {
        let mut rhs = e[i].clone();
        for t in 1..=i {
            for (r, x) in rhs.iter_mut().zip(m[t].mul_vec(&c[i - t])) {
                *r -= x;
            }
        }
        c.push(inv.mul_vec(&rhs));
    }
    Some(c)
}

/// One truncated family and what was verified about it.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyScenario {
    pub name: String,
    pub rank: usize,
    pub n: usize,
    /// `X^2 = w u` (and `XY = YX`).
    pub relations: bool,
    /// The fibre at `w = 0` is conjugate to the synthetic model.
    pub fibre_matches: bool,
    /// `a -> a g` is an `R`-isomorphism from the monomial span onto `R^rank`.
    pub free: bool,
    /// Products of monomials stay in their `R`-span.
    pub closed: bool,
}

impl FamilyScenario {
    pub fn pass(&self) -> bool {
        self.relations && self.fibre_matches && self.free && self.closed
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeformationReport {
    pub scenarios: Vec<FamilyScenario>,
    pub pass: bool,
}

impl DeformationReport {
    pub fn summary(&self) -> String {
        self.scenarios
            .iter()
            .map(|s| {
                format!(
                    "{} (rank {}, w^{}): relations {}, fibre {}, free {}, closed {}",
                    s.name, s.rank, s.n, s.relations, s.fibre_matches, s.free, s.closed
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn monomial(xs: &[RMat], m: &[usize], n: usize, d: usize) -> RMat {
    m.iter().fold(rid(n, d), |acc, &i| rmul(&acc, &xs[i]))
}

/// Freeness on the generator `e_0` and closure of the monomial span.
fn freeness(xs: &[RMat], monomials: &[Vec<usize>], n: usize) -> (bool, bool) {
    let d = xs[0][0].rows;
    let mut g = vec![vec![Q::zero(); d]; n];
    g[0][0] = Q::one();
    let mons: Vec<RMat> = monomials.iter().map(|m| monomial(xs, m, n, d)).collect();
    // columns of M are the images a_i g
    let images: Vec<RVec> = mons.iter().map(|a| rmul_vec(a, &g)).collect();
    let m: RMat = (0..n)
        .map(|t| {
            Matrix::from_cols(
                &images.iter().map(|im| im[t].clone()).collect::<Vec<_>>(),
                &Q::zero(),
            )
        })
        .collect();
    if m[0].rows != m[0].cols || m[0].inverse().is_none() {
        return (false, false);
    }
    let mut free = true;
    for i in 0..d {
        let mut e = vec![vec![Q::zero(); d]; n];
        e[0][i] = Q::one();
        match nakayama_solve(&m, &e) {
            Some(c) => free &= rmul_vec(&m, &c) == e,
            None => free = false,
        }
    }
    let mut closed = true;
    for a in &mons {
        for x in xs {
            let prod = rmul(a, x);
            let Some(c) = nakayama_solve(&m, &rmul_vec(&prod, &g)) else {
                closed = false;
                continue;
            };
            // sum_t c_t a_t must equal the product as an R-matrix
            let mut acc = rzero(n, d);
            for (ti, mt) in mons.iter().enumerate() {
                let coeff: RMat = (0..n)
                    .map(|deg| Matrix::identity(d, &Q::zero()).scale(&c[deg][ti]))
                    .collect();
                let term = rmul(&coeff, mt);
                for (s, t) in acc.iter_mut().zip(&term) {
                    *s = s.add(t);
                }
            }
            closed &= acc == prod;
        }
    }
    (free, closed)
}

/// A truncated family: generators acting on `R^rank`, the monomials forming
/// an `R`-basis of the algebra they generate, and a pairing functional.
#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub n: usize,
    pub gens: Vec<RMat>,
    pub monomials: Vec<Vec<usize>>,
    pub functional: Vec<Q>,
}

impl Family {
    pub fn rank(&self) -> usize {
        self.gens[0][0].rows
    }

    /// Largest `w`-degree of a monomial read as a polynomial matrix.
    pub fn degree(&self) -> usize {
        let deg = |g: &RMat| g.iter().rposition(|m| !m.is_zero()).unwrap_or(0);
        self.monomials
            .iter()
            .map(|m| m.iter().map(|&i| deg(&self.gens[i])).sum())
            .max()
            .unwrap_or(0)
    }

    /// The monomials as `R`-matrices.
    pub fn basis(&self) -> Vec<RMat> {
        let d = self.rank();
        self.monomials
            .iter()
            .map(|m| monomial(&self.gens, m, self.n, d))
            .collect()
    }

    /// The algebra basis at the weight `w`, reading each truncated entry as a
    /// polynomial of degree below `n`.
    pub fn specialise(&self, w: &Q) -> Vec<Matrix<Q>> {
        let d = self.rank();
        let gens: Vec<Matrix<Q>> = self
            .gens
            .iter()
            .map(|g| {
                let mut acc = Matrix::zeros(d, d, &Q::zero());
                let mut wt = Q::one();
                for m in g {
                    acc = acc.add(&m.scale(&wt));
                    wt *= w;
                }
                acc
            })
            .collect();
        self.monomials
            .iter()
            .map(|m| {
                m.iter()
                    .fold(Matrix::identity(d, &Q::zero()), |acc, &i| acc.mul(&gens[i]))
            })
            .collect()
    }
}

fn companion(n: usize, u: &Q) -> RMat {
    let mut x: RMat = rzero(n, 2);
    x[0] = Matrix::from_rows(vec![vec![Q::zero(), Q::zero()], vec![Q::one(), Q::zero()]]);
    if n > 1 {
        x[1] = Matrix::from_rows(vec![vec![Q::zero(), u.clone()], vec![Q::zero(), Q::zero()]]);
    }
    x
}

fn check_params(n: usize, u: &Q) -> Result<()> {
    if n == 0 || u.is_zero() {
        return Err(Error::Config(
            "need n >= 1 and a nonzero deformation parameter".into(),
        ));
    }
    Ok(())
}

/// `R[X]/(X^2 - w u)` on `R^2 = R e_0 + R X e_0`, paired by `l = (1, 1)`.
pub fn rational_family(n: usize, u: &Q) -> Result<Family> {
    check_params(n, u)?;
    Ok(Family {
        name: "rational".into(),
        n,
        gens: vec![companion(n, u)],
        monomials: vec![vec![], vec![0]],
        functional: vec![Q::one(), Q::one()],
    })
}

/// The tensor square, paired by `l ⊗ l`.
pub fn bianchi_family(n: usize, u: &Q) -> Result<Family> {
    check_params(n, u)?;
    let x = companion(n, u);
    let id = rid(n, 2);
    Ok(Family {
        name: "base change".into(),
        n,
        gens: vec![rkron(&x, &id), rkron(&id, &x)],
        monomials: vec![vec![], vec![0], vec![1], vec![0, 1]],
        functional: vec![Q::one(); 4],
    })
}

/// The rational family with an extra direction `e` and an extra generator
/// `Z` projecting onto it, invisible to the functional: `Z` pairs to zero
/// with everything.
pub fn planted_family(n: usize, u: &Q) -> Result<Family> {
    check_params(n, u)?;
    let x = companion(n, u);
    let mut big = rzero(n, 3);
    let mut z = rzero(n, 3);
    for t in 0..n {
        for i in 0..2 {
            for j in 0..2 {
                big[t].set(i, j, x[t].get(i, j).clone());
            }
        }
    }
    z[0].set(2, 2, Q::one());
    Ok(Family {
        name: "planted".into(),
        n,
        gens: vec![big, z],
        monomials: vec![vec![], vec![0], vec![1]],
        functional: vec![Q::one(), Q::one(), Q::zero()],
    })
}

/// Rank-two and rank-four families over `L[w]/(w^n)` with `X^2 = w u`,
/// compared at `w = 0` with the given synthetic models.
pub fn deformation_scenarios(
    rational: &SyntheticEigenspace,
    bianchi: &SyntheticEigenspace,
    n: usize,
    u: &Q,
) -> Result<DeformationReport> {
    let zero = Q::zero();
    let fam2 = rational_family(n, u)?;
    let x = fam2.gens[0].clone();
    let mut wu = rzero(n, 2);
    if n > 1 {
        wu[1] = Matrix::identity(2, &zero).scale(u);
    }

    // fibre: P = [f_new, X f_new] conjugates the family fibre to the model
    let xs = rational.nilpotents();
    let p = Matrix::from_cols(
        &[rational.f_new.clone(), xs[0].mul_vec(&rational.f_new)],
        &zero,
    );
    let fibre2 = p.inverse().is_some() && xs[0].mul(&p) == p.mul(&x[0]);

    let (free, closed) = freeness(&fam2.gens, &fam2.monomials, n);
    let rank2 = FamilyScenario {
        name: fam2.name.clone(),
        rank: 2,
        n,
        relations: rmul(&x, &x) == wu && !is_rzero(&x),
        fibre_matches: fibre2,
        free,
        closed,
    };

    let fam4 = bianchi_family(n, u)?;
    let (xa, ya) = (&fam4.gens[0], &fam4.gens[1]);
    let wu4 = rkron(&wu, &rid(n, 2));
    let bx = bianchi.nilpotents();
    let p4 = kron(&p, &p);
    let fibre4 = p4.inverse().is_some()
        && bx[0].mul(&p4) == p4.mul(&xa[0])
        && bx[1].mul(&p4) == p4.mul(&ya[0]);
    let (free, closed) = freeness(&fam4.gens, &fam4.monomials, n);
    let rank4 = FamilyScenario {
        name: fam4.name.clone(),
        rank: 4,
        n,
        relations: rmul(xa, xa) == wu4 && rmul(ya, ya) == wu4 && rmul(xa, ya) == rmul(ya, xa),
        fibre_matches: fibre4,
        free,
        closed,
    };
    let scenarios = vec![rank2, rank4];
    let pass = scenarios.iter().all(|s| s.pass());
    Ok(DeformationReport { scenarios, pass })
}

#[cfg(test)]
mod tests {
    use super::super::{build_irregular, Kind};
    use super::*;
    use crate::arith::q;

    #[test]
    fn families_are_free_of_rank_one() {
        let r = build_irregular(Kind::Rational, 5, 3).unwrap();
        let b = build_irregular(Kind::Bianchi, 5, 3).unwrap();
        for n in [1, 2, 4] {
            let rep = deformation_scenarios(&r, &b, n, &q(7)).unwrap();
            assert!(rep.pass, "{}", rep.summary());
        }
    }

    #[test]
    fn nakayama_lift_inverts_unipotent_family() {
        // M = 1 + w N with N nilpotent
        let n = 3;
        let mut m = rid(n, 2);
        m[1] = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let e = vec![vec![q(1), q(2)], vec![q(0), q(0)], vec![q(0), q(0)]];
        let c = nakayama_solve(&m, &e).unwrap();
        assert_eq!(rmul_vec(&m, &c), e);
    }

    #[test]
    fn planted_family_is_not_free() {
        let f = planted_family(2, &q(1)).unwrap();
        let (free, _) = freeness(&f.gens, &f.monomials, 2);
        assert!(!free);
        assert_eq!(f.specialise(&q(0)).len(), 3);
    }
}
