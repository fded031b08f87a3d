//! Exact models of a `p`-irregular eigensystem, where `X^2 - a_p X + p^{k+1}`
//! has the double root `alpha`, and checks of the structure they force:
//! a non-semisimple `U_p`, local Gorenstein Hecke algebras, a perfect
//! duality, and freeness of rank one, also over truncated families.
//!
//! The rational model is the old space in the basis `{f_new, f_new(pz)}`;
//! the base-change model is its tensor square with `U_P = A ⊗ 1` and
//! `U_Pbar = 1 ⊗ A`.

pub mod deform;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{q, Q};
use crate::error::{Error, Result};
use crate::lift::{generalised_eigenspace, FiniteAlgebra};
use crate::linalg::{span_basis, Matrix};
use crate::modsym::eigen::hecke_polynomial;

pub use deform::{
    bianchi_family, deformation_scenarios, planted_family, rational_family, DeformationReport,
    Family, FamilyScenario,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kind {
    Rational,
    Bianchi,
}

/// A finite model of the generalised eigenspace at an irregular point.
#[derive(Clone, Debug)]
pub struct SyntheticEigenspace {
    pub kind: Kind,
    pub alpha: Q,
    /// The `U` operators as matrices acting on column vectors.
    pub ops: Vec<(String, Matrix<Q>)>,
    /// Tame operators, acting by scalars.
    pub tame: Vec<(String, Q)>,
    /// The stabilised eigenvector.
    pub f: Vec<Q>,
    /// The newform at the higher level.
    pub f_new: Vec<Q>,
}

impl SyntheticEigenspace {
    pub fn dim(&self) -> usize {
        self.f.len()
    }

    /// All operators with their eigenvalue, tame ones as scalar matrices.
    pub fn operators(&self) -> Vec<(String, Matrix<Q>, Q)> {
        let n = self.dim();
        let mut out: Vec<_> = self
            .ops
            .iter()
            .map(|(l, m)| (l.clone(), m.clone(), self.alpha.clone()))
            .collect();
        for (l, a) in &self.tame {
            out.push((
                l.clone(),
                Matrix::identity(n, &Q::zero()).scale(a),
                a.clone(),
            ));
        }
        out
    }

    /// `X = U - alpha` for each `U` operator.
    pub fn nilpotents(&self) -> Vec<Matrix<Q>> {
        self.ops
            .iter()
            .map(|(_, m)| m.minus_scalar(&self.alpha))
            .collect()
    }

    /// The leading-coefficient functional: the coefficient of `f_new` in the
    /// basis `{f_new, f_new(pz)}` (tensor square for the base change).
    pub fn functional(&self) -> Vec<Q> {
        let mut l = vec![Q::zero(); self.dim()];
        l[0] = Q::one();
        l
    }
}

pub(crate) fn kron(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    let (n, m) = (a.rows, b.rows);
    let mut out = Matrix::zeros(n * m, n * m, &Q::zero());
    for i in 0..n {
        for j in 0..n {
            for r in 0..m {
                for s in 0..m {
                    out.set(i * m + r, j * m + s, a.get(i, j) * b.get(r, s));
                }
            }
        }
    }
    out
}

fn kron_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// The model with `U_p` of characteristic polynomial `X^2 - a_p X + c`,
/// `alpha` a root. Irregular when `a_p = 2 alpha`.
pub fn build_model(kind: Kind, a_p: &Q, c: &Q, alpha: &Q) -> Result<SyntheticEigenspace> {
    if alpha.is_zero() {
        return Err(Error::Config("alpha must be nonzero".into()));
    }
    if alpha * alpha - a_p * alpha + c != Q::zero() {
        return Err(Error::Config(format!(
            "{alpha} is not a root of X^2 - ({a_p}) X + {c}"
        )));
    }
    let a = Matrix::from_rows(vec![
        vec![a_p.clone(), Q::one()],
        vec![-c.clone(), Q::zero()],
    ]);
    let beta = a_p - alpha;
    // f = f_new - beta f_new(pz)
    let f1 = vec![Q::one(), -beta];
    let n1 = vec![Q::one(), Q::zero()];
    let tame = vec![("T2".to_string(), q(-2))];
    Ok(match kind {
        Kind::Rational => SyntheticEigenspace {
            kind,
            alpha: alpha.clone(),
            ops: vec![("Up".into(), a)],
            tame,
            f: f1,
            f_new: n1,
        },
        Kind::Bianchi => {
            let id = Matrix::identity(2, &Q::zero());
            SyntheticEigenspace {
                kind,
                alpha: alpha.clone(),
                ops: vec![
                    ("UP".into(), kron(&a, &id)),
                    ("UPbar".into(), kron(&id, &a)),
                ],
                tame,
                f: kron_vec(&f1, &f1),
                f_new: kron_vec(&n1, &n1),
            }
        }
    })
}

/// `alpha = p^{(k+1)/2}`, `a_p = 2 alpha`: rational exactly when `k` is odd.
pub fn build_irregular(kind: Kind, p: u64, k: u32) -> Result<SyntheticEigenspace> {
    if k % 2 == 0 {
        return Err(Error::Config(format!(
            "k = {k} is even: the double root p^((k+1)/2) is irrational"
        )));
    }
    let alpha = Q::from_integer(BigInt::from(p).pow((k + 1) / 2));
    let (poly, irregular) = hecke_polynomial(&(q(2) * &alpha), k, p);
    debug_assert!(irregular);
    build_model(kind, &(q(2) * &alpha), &poly.c[0], &alpha)
}

/// The subalgebra of `End(V)` generated by the operators.
pub fn algebra_of(space: &SyntheticEigenspace) -> FiniteAlgebra<Q> {
    FiniteAlgebra::generated_by(&space.ops)
}

/// Coordinates (as columns) of the given monomials in the nilpotents
/// `X_i = U_i - alpha`, if they form a basis of the algebra. This is the
/// explicit isomorphism with `L[X_1, ...]/(relations)`.
pub fn monomial_basis(
    alg: &FiniteAlgebra<Q>,
    xs: &[Matrix<Q>],
    monomials: &[Vec<usize>],
) -> Option<Matrix<Q>> {
    let n = xs[0].rows;
    let mut cols = Vec::new();
    for m in monomials {
        let mut prod = Matrix::identity(n, &Q::zero());
        for &i in m {
            prod = prod.mul(&xs[i]);
        }
        cols.push(alg.coords(&prod)?);
    }
    let change = Matrix::from_cols(&cols, &Q::zero());
    (change.rows == change.cols && change.rank() == change.rows).then_some(change)
}

/// One labelled pass/fail line of the lab report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LabReport {
    pub p: u64,
    pub k: u32,
    pub alpha: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn vec_is_zero(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Gram matrix `l(T_j v_i)` for a module basis `v` and algebra basis `T`.
pub fn gram(l: &[Q], module: &[Vec<Q>], alg: &[Matrix<Q>]) -> Matrix<Q> {
    Matrix::from_rows(
        module
            .iter()
            .map(|v| alg.iter().map(|t| dot(l, &t.mul_vec(v))).collect())
            .collect(),
    )
}

fn cor_identities(s: &SyntheticEigenspace) -> (bool, String) {
    let xs = s.nilpotents();
    let a = &s.alpha;
    match s.kind {
        Kind::Rational => {
            let x = &xs[0];
            let first = x.mul_vec(&s.f_new) == s.f.iter().map(|c| c * a).collect::<Vec<_>>();
            let eigen = vec_is_zero(&x.mul_vec(&s.f));
            let square = x.mul(x).is_zero();
            // in the basis {f, f_new}, U is a Jordan block with corner alpha
            let jordan = s.ops[0].1.restrict(&[s.f.clone(), s.f_new.clone()])
                == Matrix::from_rows(vec![vec![a.clone(), a.clone()], vec![Q::zero(), a.clone()]]);
            (
                first && eigen && square && jordan,
                format!("(U-a) f_new = a f: {first}; (U-a) f = 0: {eigen}; (U-a)^2 = 0: {square}; [[a, a], [0, a]] in {{f, f_new}}: {jordan}"),
            )
        }
        Kind::Bianchi => {
            let both = xs[0].mul(&xs[1]).mul_vec(&s.f_new)
                == s.f.iter().map(|c| c * a * a).collect::<Vec<_>>();
            let squares = xs.iter().all(|x| vec_is_zero(&x.mul(x).mul_vec(&s.f_new)));
            let commute = s.ops[0].1.mul(&s.ops[1].1) == s.ops[1].1.mul(&s.ops[0].1);
            let eigen = xs.iter().all(|x| vec_is_zero(&x.mul_vec(&s.f)));
            (
                both && squares && commute && eigen,
                format!(
                    "(U_P-a)(U_Pbar-a) f_new = a^2 f: {both}; squares kill f_new: {squares}; commute: {commute}; f eigen: {eigen}"
                ),
            )
        }
    }
}

fn dims(s: &SyntheticEigenspace) -> Result<(usize, usize)> {
    let g = generalised_eigenspace(&s.operators())?;
    Ok((g.dim(), g.eigenspace.len()))
}

/// Submodules `A v` generated by the given vectors.
fn cyclic_submodule(alg: &FiniteAlgebra<Q>, v: &[Q]) -> Vec<Vec<Q>> {
    span_basis(&alg.basis.iter().map(|t| t.mul_vec(v)).collect::<Vec<_>>())
        .into_iter()
        .filter(|w| !vec_is_zero(w))
        .collect()
}

/// Perfectness of `M x A/Ann(M) -> L`: the pairing matrix has rank
/// `dim M = dim A - dim Ann(M)`.
fn quotient_pairing_perfect(alg: &FiniteAlgebra<Q>, l: &[Q], m: &[Vec<Q>]) -> (bool, String) {
    let g = gram(l, m, &alg.basis);
    let ann = annihilator_of_module(alg, m);
    let ok = g.rank() == m.len() && m.len() == alg.dim() - ann;
    (
        ok,
        format!(
            "dim M = {}, dim A/Ann(M) = {}, rank = {}",
            m.len(),
            alg.dim() - ann,
            g.rank()
        ),
    )
}

fn annihilator_of_module(alg: &FiniteAlgebra<Q>, m: &[Vec<Q>]) -> usize {
    // a = sum c_j T_j kills M iff sum c_j T_j v = 0 for every v in M
    let n = m.first().map_or(0, |v| v.len());
    let mut rows = Vec::new();
    for v in m {
        let images: Vec<Vec<Q>> = alg.basis.iter().map(|t| t.mul_vec(v)).collect();
        for i in 0..n {
            rows.push(images.iter().map(|w| w[i].clone()).collect());
        }
    }
    if rows.is_empty() {
        return alg.dim();
    }
    Matrix::from_rows(rows).kernel().len()
}

/// Duality: the Gram matrix of `(v, T) -> l(T v)` on the whole space is
/// invertible, and on every cyclic Hecke-stable subspace the induced
/// pairing with `A/Ann(M)` is perfect (for the eigenline, `A/m = L`).
pub fn duality_check(s: &SyntheticEigenspace) -> (bool, String) {
    let alg = algebra_of(s);
    let l = s.functional();
    let n = s.dim();
    let unit: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect();
    let g = gram(&l, &unit, &alg.basis);
    let det = if g.rows == g.cols { g.det() } else { Q::zero() };
    let mut ok = !det.is_zero();
    let mut detail = format!("gram {}x{} det {det}", g.rows, g.cols);
    let mut gens = vec![s.f.clone(), s.f_new.clone()];
    for x in s.nilpotents() {
        gens.push(x.mul_vec(&s.f_new));
    }
    for v in &gens {
        let m = cyclic_submodule(&alg, v);
        let (good, d) = quotient_pairing_perfect(&alg, &l, &m);
        ok &= good;
        detail.push_str(&format!("; {d}"));
    }
    (ok, detail)
}

/// Freeness of rank one: `a -> a f_new` is an isomorphism `A -> V`; the dual
/// is free on `l`; restriction of `l ∘ a` to the eigenline is `a mod m`
/// times `l(f) != 0`.
pub fn rank_one_check(s: &SyntheticEigenspace) -> (bool, String) {
    let alg = algebra_of(s);
    let l = s.functional();
    let n = s.dim();
    let module_map = Matrix::from_cols(
        &alg.basis
            .iter()
            .map(|t| t.mul_vec(&s.f_new))
            .collect::<Vec<_>>(),
        &Q::zero(),
    );
    let free = module_map.rows == module_map.cols && module_map.rank() == n;
    let dual_map = Matrix::from_rows(
        alg.basis
            .iter()
            .map(|t| t.transpose().mul_vec(&l))
            .collect::<Vec<Vec<Q>>>(),
    );
    let dual_free = dual_map.rows == dual_map.cols && dual_map.rank() == n;
    let lf = dot(&l, &s.f);
    // kernel of a -> (l ∘ a)(f) must be the maximal ideal
    let values: Vec<Q> = alg
        .basis
        .iter()
        .map(|t| dot(&l, &t.mul_vec(&s.f)))
        .collect();
    let kernel = Matrix::from_rows(vec![values]).kernel();
    let maximal = alg.maximal_ideal();
    let restriction = match &maximal {
        Some(m) => {
            kernel.len() == m.len()
                && m.iter().all(|x| {
                    let img = alg.element(x).mul_vec(&s.f);
                    dot(&l, &img).is_zero()
                })
        }
        None => false,
    };
    let ok = free && dual_free && !lf.is_zero() && restriction;
    (ok, format!("A -> V iso: {free}; dual free on l: {dual_free}; l(f) = {lf}; restriction = reduction mod m: {restriction}"))
}

fn gorenstein_line(alg: &FiniteAlgebra<Q>) -> (bool, usize) {
    match alg.gorenstein() {
        Ok(v) => (v.gorenstein, v.socle_dim),
        Err(_) => (false, 0),
    }
}

/// `L[X, Y]/(X, Y)^2`, realised on the basis `1, X, Y`.
pub fn planted_counterexample() -> FiniteAlgebra<Q> {
    let x = Matrix::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]);
    let y = Matrix::from_i64(&[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
    FiniteAlgebra::generated_by(&[("X".into(), x), ("Y".into(), y)])
}

/// All twelve checks for the double root `alpha = p^{(k+1)/2}`.
pub fn run_lab(p: u64, k: u32) -> Result<LabReport> {
    let rat = build_irregular(Kind::Rational, p, k)?;
    let bia = build_irregular(Kind::Bianchi, p, k)?;
    let alpha = rat.alpha.clone();
    let mut checks = Vec::new();

    let (ok, d) = cor_identities(&rat);
    checks.push(Check::new("rational_identities", ok, d));

    let x = &rat.nilpotents()[0];
    let sq = x.mul(x).is_zero() && !x.is_zero();
    checks.push(Check::new(
        "up_minus_alpha_squared_zero",
        sq,
        format!("X != 0 and X^2 = 0: {sq}"),
    ));

    let (gd, ed) = dims(&rat)?;
    let (bgd, bed) = dims(&bia)?;
    let ok = (gd, ed) == (2, 1) && (bgd, bed) == (4, 1);
    checks.push(Check::new(
        "non_semisimple_dimensions",
        ok,
        format!("rational (generalised, eigen) = ({gd}, {ed}); base change = ({bgd}, {bed})"),
    ));

    let (ok, d) = cor_identities(&bia);
    checks.push(Check::new("base_change_identities", ok, d));

    // L[X]/(X^2), and invariance under alpha -> u alpha
    let ra = algebra_of(&rat);
    let iso = monomial_basis(&ra, &rat.nilpotents(), &[vec![], vec![0]]);
    let u = q(3);
    let ua = &u * &alpha;
    let scaled = build_model(Kind::Rational, &(q(2) * &ua), &(&ua * &ua), &ua)?;
    let sx = &scaled.nilpotents()[0];
    let u_inv = q(1) / &u;
    let sxu = sx.scale(&u_inv);
    let scale_ok = !sxu.is_zero()
        && sxu.mul(&sxu).is_zero()
        && algebra_of(&scaled).dim() == 2
        && monomial_basis(
            &algebra_of(&scaled),
            &[sx.scale(&u_inv)],
            &[vec![], vec![0]],
        )
        .is_some();
    let ok =
        ra.dim() == 2 && iso.is_some() && ra.is_commutative() && ra.is_associative() && scale_ok;
    checks.push(Check::new(
        "rational_algebra_dual_numbers",
        ok,
        format!(
            "dim {}, basis 1, X: {}; alpha -> {u} alpha invariant after X -> X/{u}: {scale_ok}",
            ra.dim(),
            iso.is_some()
        ),
    ));

    let ba = algebra_of(&bia);
    let bx = bia.nilpotents();
    let iso = monomial_basis(&ba, &bx, &[vec![], vec![0], vec![1], vec![0, 1]]);
    let rel =
        bx[0].mul(&bx[0]).is_zero() && bx[1].mul(&bx[1]).is_zero() && !bx[0].mul(&bx[1]).is_zero();
    let ok = ba.dim() == 4 && iso.is_some() && rel && ba.is_commutative();
    checks.push(Check::new(
        "base_change_algebra",
        ok,
        format!(
            "dim {}, basis 1, X, Y, XY: {}; X^2 = Y^2 = 0 != XY: {rel}",
            ba.dim(),
            iso.is_some()
        ),
    ));

    let (g1, s1) = gorenstein_line(&ra);
    let (g2, s2) = gorenstein_line(&ba);
    checks.push(Check::new(
        "gorenstein_verdicts",
        g1 && g2 && s1 == 1 && s2 == 1,
        format!("socle dims {s1} and {s2}"),
    ));

    let planted = planted_counterexample();
    let (g3, s3) = gorenstein_line(&planted);
    checks.push(Check::new(
        "planted_not_gorenstein",
        !g3 && s3 == 2,
        format!("socle dim {s3}"),
    ));

    // distinct roots p^{k+1} and 1
    let pk1 = Q::from_integer(BigInt::from(p).pow(k + 1));
    let reg = build_model(Kind::Rational, &(&pk1 + q(1)), &pk1, &pk1)?;
    let reg_alg = algebra_of(&reg);
    let (rgd, _) = dims(&reg)?;
    let ok = reg_alg.dim() == 2
        && reg_alg.maximal_ideal().is_none()
        && reg_alg.gorenstein().is_err()
        && rgd == 1;
    checks.push(Check::new(
        "regular_control_split",
        ok,
        format!(
            "roots {pk1} and 1: algebra dim {}, local: {}, generalised eigenspace dim {rgd}",
            reg_alg.dim(),
            reg_alg.maximal_ideal().is_some()
        ),
    ));

    let (o1, d1) = duality_check(&rat);
    let (o2, d2) = duality_check(&bia);
    checks.push(Check::new(
        "duality_pairing",
        o1 && o2,
        format!("rational: {d1} | base change: {d2}"),
    ));

    let (o1, d1) = rank_one_check(&rat);
    let (o2, d2) = rank_one_check(&bia);
    checks.push(Check::new(
        "rank_one_freeness",
        o1 && o2,
        format!("rational: {d1} | base change: {d2}"),
    ));

    let dep = deformation_scenarios(&rat, &bia, 3, &q(1))?;
    checks.push(Check::new("deformation_scenarios", dep.pass, dep.summary()));

    let pass = checks.iter().all(|c| c.pass);
    Ok(LabReport {
        p,
        k,
        alpha: alpha.to_string(),
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::eigen::old_subspace_up_matrix;

    #[test]
    fn all_twelve_checks_pass() {
        for (p, k) in [(5u64, 3u32), (3, 1), (7, 1)] {
            let rep = run_lab(p, k).unwrap();
            assert_eq!(rep.checks.len(), 12);
            for c in &rep.checks {
                assert!(c.pass, "p = {p}, k = {k}: {} failed: {}", c.name, c.detail);
            }
        }
    }

    #[test]
    fn even_weight_parameter_is_rejected() {
        assert!(build_irregular(Kind::Rational, 5, 2).is_err());
    }

    #[test]
    fn model_matches_the_old_space_matrix() {
        let s = build_irregular(Kind::Rational, 5, 3).unwrap();
        assert_eq!(s.ops[0].1, old_subspace_up_matrix(&q(50), 3, 5));
        let (poly, irregular) = hecke_polynomial(&q(50), 3, 5);
        assert!(irregular);
        assert_eq!(s.ops[0].1.charpoly(), poly);
    }

    #[test]
    fn degenerate_functional_breaks_duality() {
        let s = build_irregular(Kind::Rational, 5, 3).unwrap();
        let alg = algebra_of(&s);
        // a functional vanishing on f kills the image of X
        let l = vec![q(25), q(1)];
        assert!(dot(&l, &s.f).is_zero());
        let unit = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert!(gram(&l, &unit, &alg.basis).det().is_zero());
        assert!(!gram(&s.functional(), &unit, &alg.basis).det().is_zero());
    }
}
