//! Eigen-symbols, the Hecke polynomial at `p`, p-stabilisation and twisted
//! period sums.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::coeff::SymK;
use super::manin::{Manin, Symbol};
use super::space::{is_prime, SymbolSpace};
use super::HeckeOp;
use crate::arith::poly::Poly;
use crate::arith::{content_normalise, q, q_to_f64, Field, Q};
use crate::error::{Error, Result};
use crate::linalg::{common_kernel, Matrix};
use crate::padic::character::{gauss_sum_exact, DirichletCharacter};
use crate::padic::cyclo::CycloQ;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<(HeckeOp, Q)>,
}

impl EigenSystem {
    /// Operator label to exact eigenvalue, rendered as strings.
    pub fn to_json(&self) -> serde_json::Value {
        self.eigenvalues
            .iter()
            .map(|(op, a)| (op.to_string(), serde_json::Value::String(a.to_string())))
            .collect::<serde_json::Map<_, _>>()
            .into()
    }

    pub fn get(&self, op: HeckeOp) -> Option<&Q> {
        self.eigenvalues
            .iter()
            .find(|(o, _)| *o == op)
            .map(|(_, v)| v)
    }

    /// Ramanujan bound `|a_l| <= 2 l^{(k+1)/2}` on every `T_l`; Eisenstein
    /// systems fail it at every prime.
    pub fn looks_cuspidal(&self, k: u32) -> bool {
        self.eigenvalues.iter().all(|(op, a)| match op {
            HeckeOp::T(l) => {
                q_to_f64(a).abs() <= 2.0 * (*l as f64).powf((k as f64 + 1.0) / 2.0) + 1e-9
            }
            _ => true,
        })
    }

    /// The sub-system of operators that make sense at `level`.
    pub fn restricted_to(&self, level: u64) -> EigenSystem {
        let eigenvalues = self
            .eigenvalues
            .iter()
            .filter(|(op, _)| matches!(op, HeckeOp::T(l) if level % l != 0))
            .cloned()
            .collect();
        EigenSystem { eigenvalues }
    }
}

/// A rational symbol together with the data needed to evaluate it.
#[derive(Clone, Debug)]
pub struct ClassicalSymbol {
    pub manin: Arc<Manin>,
    pub k: u32,
    pub sign: Option<i8>,
    pub symbol: Symbol<Q>,
}

impl ClassicalSymbol {
    pub fn level(&self) -> u64 {
        self.manin.level
    }

    pub fn action(&self) -> SymK<Q> {
        SymK::new(self.k, Q::zero())
    }

    /// `Phi({a/m -> oo})` as moments.
    pub fn to_infinity(&self, a: i64, m: i64) -> Vec<Q> {
        self.symbol
            .eval_to_infinity(&self.manin, &self.action(), a, m)
    }
}

/// Scale a symbol to coprime integer values with positive leading entry.
pub fn normalise_symbol(s: &mut Symbol<Q>) {
    let mut flat: Vec<Q> = s.values.iter().flatten().cloned().collect();
    content_normalise(&mut flat);
    let w = s.values.first().map_or(0, |v| v.len());
    for (i, v) in s.values.iter_mut().enumerate() {
        v.clone_from_slice(&flat[i * w..(i + 1) * w]);
    }
}

/// Basis (in space coordinates) of the joint eigenspace of a system.
pub fn eigenspace(space: &SymbolSpace, sys: &EigenSystem) -> Result<Vec<Vec<Q>>> {
    if space.dim() == 0 {
        return Ok(vec![]);
    }
    let mats = sys
        .eigenvalues
        .iter()
        .map(|(op, a)| Ok(space.hecke_matrix(*op)?.minus_scalar(a)))
        .collect::<Result<Vec<_>>>()?;
    if mats.is_empty() {
        return Ok(Matrix::identity(space.dim(), &q(0)).kernel_complement_basis());
    }
    Ok(common_kernel(&mats))
}

impl Matrix<Q> {
    /// Standard basis of the ambient space.
    fn kernel_complement_basis(&self) -> Vec<Vec<Q>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }
}

/// The content-normalised generator of the one-dimensional joint eigenspace
/// of `sys` in the signed space.
pub fn eigen_symbol(
    space: &SymbolSpace,
    sys: &EigenSystem,
    cuspidal: bool,
) -> Result<ClassicalSymbol> {
    if space.sign.is_none() {
        return Err(Error::Config("eigen-symbols need a signed space".into()));
    }
    if cuspidal && !sys.looks_cuspidal(space.k) {
        return Err(Error::Config(
            "eigensystem violates the Ramanujan bound (Eisenstein?)".into(),
        ));
    }
    let basis = eigenspace(space, sys)?;
    if basis.len() != 1 {
        return Err(Error::Config(format!(
            "eigenspace has dimension {}, expected 1",
            basis.len()
        )));
    }
    let mut symbol = space.symbol(&basis[0]);
    normalise_symbol(&mut symbol);
    Ok(ClassicalSymbol {
        manin: space.manin.clone(),
        k: space.k,
        sign: space.sign,
        symbol,
    })
}

/// All eigensystems with rational eigenvalues for `ops`, with the dimension
/// of the joint eigenspace.
pub fn rational_eigensystems(
    space: &SymbolSpace,
    ops: &[HeckeOp],
) -> Result<Vec<(EigenSystem, usize)>> {
    let mats = ops
        .iter()
        .map(|op| space.hecke_matrix(*op))
        .collect::<Result<Vec<_>>>()?;
    let d = space.dim();
    let mut branches: Vec<(Vec<(HeckeOp, Q)>, Vec<Vec<Q>>)> = vec![(
        vec![],
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { Q::one() } else { Q::zero() })
                    .collect()
            })
            .collect(),
    )];
    for (op, m) in ops.iter().zip(&mats) {
        let mut next = Vec::new();
        for (vals, basis) in branches {
            if basis.is_empty() {
                continue;
            }
            let r = m.restrict(&basis);
            for root in r.charpoly().rational_roots() {
                let sub = r.minus_scalar(&root).kernel();
                let full: Vec<Vec<Q>> = sub
                    .iter()
                    .map(|c| {
                        let mut v = vec![Q::zero(); d];
                        for (x, b) in c.iter().zip(&basis) {
                            for (vi, bi) in v.iter_mut().zip(b) {
                                *vi += x * bi;
                            }
                        }
                        v
                    })
                    .collect();
                let mut vals = vals.clone();
                vals.push((*op, root));
                next.push((vals, full));
            }
        }
        branches = next;
    }
    Ok(branches
        .into_iter()
        .filter(|(_, b)| !b.is_empty())
        .map(|(v, b)| (EigenSystem { eigenvalues: v }, b.len()))
        .collect())
}

/// Eigenvalues of an eigen-symbol under the given operators.
pub fn eigenvalues_of(
    space: &SymbolSpace,
    phi: &ClassicalSymbol,
    ops: &[HeckeOp],
) -> Result<EigenSystem> {
    let mut eigenvalues = Vec::new();
    let (ci, cj) = phi
        .symbol
        .values
        .iter()
        .enumerate()
        .find_map(|(i, v)| v.iter().position(|x| !x.is_zero()).map(|j| (i, j)))
        .ok_or_else(|| Error::Config("zero symbol has no eigenvalues".into()))?;
    for op in ops {
        space.check_op(*op)?;
        let img = space.apply(*op, &phi.symbol);
        let lambda = &img.values[ci][cj] / &phi.symbol.values[ci][cj];
        if img != phi.symbol.scale(&lambda) {
            return Err(Error::Check(format!(
                "symbol is not an eigenvector of {op}"
            )));
        }
        eigenvalues.push((*op, lambda));
    }
    Ok(EigenSystem { eigenvalues })
}

/// A small table of rational newforms, identified inside the symbol space by
/// their `T_2` (or `T_3`) eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownForm {
    pub label: &'static str,
    pub level: u64,
    pub k: u32,
    pub selector: (u64, i64),
}

pub const KNOWN_FORMS: &[KnownForm] = &[
    KnownForm {
        label: "11a",
        level: 11,
        k: 0,
        selector: (2, -2),
    },
    KnownForm {
        label: "14a",
        level: 14,
        k: 0,
        selector: (3, -2),
    },
    KnownForm {
        label: "15a",
        level: 15,
        k: 0,
        selector: (2, -1),
    },
    KnownForm {
        label: "17a",
        level: 17,
        k: 0,
        selector: (2, -1),
    },
    KnownForm {
        label: "19a",
        level: 19,
        k: 0,
        selector: (2, 0),
    },
    KnownForm {
        label: "37a",
        level: 37,
        k: 0,
        selector: (2, -2),
    },
    KnownForm {
        label: "37b",
        level: 37,
        k: 0,
        selector: (2, 0),
    },
    KnownForm {
        label: "5k2",
        level: 5,
        k: 2,
        selector: (2, -4),
    },
    KnownForm {
        label: "7k2",
        level: 7,
        k: 2,
        selector: (2, -1),
    },
];

pub fn known_form(label: &str) -> Result<KnownForm> {
    KNOWN_FORMS
        .iter()
        .find(|f| f.label == label)
        .copied()
        .ok_or_else(|| Error::Config(format!("unknown form label {label:?}")))
}

/// A newform located in its signed space, with tame eigenvalues for every
/// prime below `bound` not dividing the level.
#[derive(Clone, Debug)]
pub struct Newform {
    pub form: KnownForm,
    pub space: SymbolSpace,
    pub phi: ClassicalSymbol,
    pub system: EigenSystem,
}

impl Newform {
    pub fn find(label: &str, sign: i8, bound: u64) -> Result<Self> {
        let form = known_form(label)?;
        let space = SymbolSpace::build(form.level, form.k, Some(sign));
        let (l, a) = form.selector;
        let sel = EigenSystem {
            eigenvalues: vec![(HeckeOp::T(l), q(a))],
        };
        let phi = eigen_symbol(&space, &sel, true)?;
        let ops: Vec<HeckeOp> = (2..bound)
            .filter(|&l| is_prime(l) && form.level % l != 0)
            .map(HeckeOp::T)
            .collect();
        let system = eigenvalues_of(&space, &phi, &ops)?;
        Ok(Newform {
            form,
            space,
            phi,
            system,
        })
    }

    pub fn a(&self, l: u64) -> Option<&Q> {
        self.system.get(HeckeOp::T(l))
    }
}

/// `X^2 - a_p X + p^{k+1}` and whether its discriminant vanishes.
pub fn hecke_polynomial(a_p: &Q, k: u32, p: u64) -> (Poly, bool) {
    let pk1 = Q::from_integer(BigInt::from(p).pow(k + 1));
    let disc = a_p * a_p - q(4) * &pk1;
    (Poly::new(vec![pk1, -a_p.clone(), Q::one()]), disc.is_zero())
}

/// `U_p` on the old space in the basis `{f, f(pz)}`.
pub fn old_subspace_up_matrix(a_p: &Q, k: u32, p: u64) -> Matrix<Q> {
    let pk1 = Q::from_integer(BigInt::from(p).pow(k + 1));
    Matrix::from_rows(vec![vec![a_p.clone(), Q::one()], vec![-pk1, Q::zero()]])
}

/// `U_p` restricted to the `f`-old part of the signed space at level `Mp`,
/// cut out by the tame eigenvalues of `f`. Returns the 2x2 matrix.
pub fn computed_old_up_matrix(f: &Newform, p: u64) -> Result<Matrix<Q>> {
    let n = f.form.level * p;
    let space = SymbolSpace::build(n, f.form.k, f.space.sign);
    let sys = f.system.restricted_to(n);
    let basis = eigenspace(&space, &sys)?;
    if basis.len() != 2 {
        return Err(Error::Check(format!(
            "old eigenspace at level {n} has dimension {}",
            basis.len()
        )));
    }
    Ok(space.hecke_matrix(HeckeOp::U(p))?.restrict(&basis))
}

/// `phi_alpha = alpha^{-1} (U_p - beta) phi`, where `phi` is the level-`M`
/// symbol pulled back to level `Mp` and `alpha, beta` are the roots of the
/// Hecke polynomial. With `alpha = beta` this is the irregular stabilisation.
/// The result is checked to be a `U_p`-eigenvector with eigenvalue `alpha`.
pub fn p_stabilise<R: Field>(
    phi: &ClassicalSymbol,
    to: &Arc<Manin>,
    p: u64,
    alpha: &R,
    beta: &R,
) -> Result<Symbol<R>> {
    if to.level != phi.level() * p {
        return Err(Error::Config(format!(
            "stabilisation target level {} is not {}*{p}",
            to.level,
            phi.level()
        )));
    }
    let like = alpha.zero_like();
    let act = SymK::new(phi.k, like.clone());
    let lifted = phi
        .symbol
        .map(|x| like.from_q_like(x).expect("field contains Q"));
    let from = &phi.manin;
    let pulled = lifted.pullback(from, to, &act);
    let betas = super::manin::hecke_betas(&HeckeOp::U(p));
    let up = pulled.apply_double_coset(to, &act, &betas);
    let ainv = alpha
        .inv()
        .ok_or_else(|| Error::Config("alpha = 0".into()))?;
    let stab = up.sub(&pulled.scale(beta)).scale(&ainv);
    let check = stab.apply_double_coset(to, &act, &betas);
    if check != stab.scale(alpha) {
        return Err(Error::Check(
            "stabilised symbol is not a U_p eigenvector; alpha is not a root".into(),
        ));
    }
    Ok(stab)
}

/// `sum_a chi(a) Phi({a/m -> oo})((a + m z)^j)` with `m` the modulus of `chi`.
pub fn twisted_period_sum(
    phi: &ClassicalSymbol,
    chi: &DirichletCharacter,
    j: u32,
) -> Result<CycloQ> {
    if j > phi.k {
        return Err(Error::Config(format!(
            "j = {j} outside the critical range 0..={}",
            phi.k
        )));
    }
    let m = chi.modulus as i64;
    let pair = |a: i64| {
        let mu = phi.to_infinity(a, m);
        let mut acc = Q::zero();
        // (a + m z)^j = sum_i binom(j, i) a^{j-i} m^i z^i
        let mut binom = BigInt::one();
        for i in 0..=j as usize {
            let coef = &binom * BigInt::from(a).pow(j - i as u32) * BigInt::from(m).pow(i as u32);
            acc += Q::from_integer(coef) * &mu[i];
            binom = binom * BigInt::from(j as usize - i) / BigInt::from(i + 1);
        }
        acc
    };
    Ok(crate::padic::character::character_sum(chi, pair))
}

/// The algebraic part of `L(f, chi^{-1}, j+1)`, normalised as
/// `tau(chi^{-1}) / m^{j+1} * twisted_period_sum`.
pub fn classical_l_value(
    phi: &ClassicalSymbol,
    chi: &DirichletCharacter,
    j: u32,
) -> Result<CycloQ> {
    let s = twisted_period_sum(phi, chi, j)?;
    let m = BigInt::from(chi.modulus).pow(j + 1);
    let tau = if chi.modulus == 1 {
        CycloQ::from_q(1, q(1))
    } else {
        gauss_sum_exact(&chi.conj())
    };
    Ok(tau.mul(&s).scale(&Q::new(BigInt::one(), m)))
}

/// Signs `eps` for which the twisted sum can be nonzero.
pub fn parity_sign(k: u32, j: u32, chi: &DirichletCharacter) -> i8 {
    let s = if (k + j) % 2 == 0 { 1 } else { -1 };
    (s * chi.parity()) as i8
}

/// Ratio of two rational numbers as an `f64`, for diagnostics.
pub fn ratio_f64(a: &Q, b: &Q) -> f64 {
    if b.is_zero() {
        f64::NAN
    } else {
        (a / b).to_f64().unwrap_or(f64::NAN)
    }
}

pub fn is_integral(x: &Q) -> bool {
    x.denom().is_one() || x.denom().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Quad;

    #[test]
    fn hecke_polynomial_examples() {
        let (f, irr) = hecke_polynomial(&q(0), 0, 5);
        assert_eq!(f, Poly::from_i64(&[5, 0, 1]));
        assert!(!irr);
        let (f, irr) = hecke_polynomial(&q(50), 3, 5);
        assert_eq!(f, Poly::x_minus(&q(25)).pow(2));
        assert!(irr);
        let (f, _) = hecke_polynomial(&q(-1), 0, 3);
        assert_eq!(f, Poly::from_i64(&[3, 1, 1]));
    }

    #[test]
    fn up_matrix_charpoly() {
        for (a, k, p) in [(-1, 0, 3), (7, 2, 5), (0, 1, 7), (50, 3, 5)] {
            let m = old_subspace_up_matrix(&q(a), k, p);
            assert_eq!(m.charpoly(), hecke_polynomial(&q(a), k, p).0);
        }
    }

    #[test]
    fn eleven_a() {
        let f = Newform::find("11a", 1, 14).unwrap();
        assert_eq!(f.a(2), Some(&q(-2)));
        assert_eq!(f.a(3), Some(&q(-1)));
        assert_eq!(f.a(5), Some(&q(1)));
        assert_eq!(f.a(7), Some(&q(-2)));
        assert_eq!(f.a(13), Some(&q(4)));
    }

    #[test]
    fn every_known_form_is_found_in_both_signs() {
        for f in KNOWN_FORMS {
            for sign in [1, -1] {
                let nf = Newform::find(f.label, sign, 8).unwrap();
                assert!(nf.system.looks_cuspidal(f.k), "{}", f.label);
            }
        }
    }

    #[test]
    fn eisenstein_is_rejected() {
        let s = SymbolSpace::build(11, 0, Some(1));
        let sys = EigenSystem {
            eigenvalues: vec![(HeckeOp::T(2), q(3))],
        };
        assert!(eigen_symbol(&s, &sys, true).is_err());
        assert!(eigen_symbol(&s, &sys, false).is_ok());
    }

    #[test]
    fn old_up_law_at_three_levels() {
        for (label, p) in [("11a", 3u64), ("11a", 5), ("19a", 3)] {
            let f = Newform::find(label, 1, 30).unwrap();
            let m = computed_old_up_matrix(&f, p).unwrap();
            let a_p = f.a(p).unwrap().clone();
            assert_eq!(
                m.charpoly(),
                hecke_polynomial(&a_p, 0, p).0,
                "{label} p={p}"
            );
        }
    }

    #[test]
    fn stabilisation_is_an_eigenvector() {
        let f = Newform::find("11a", 1, 14).unwrap();
        let to = Arc::new(Manin::new(33));
        // roots of X^2 + X + 3
        let (a, b) = Quad::roots_of_monic_quadratic(&q(1), &q(3));
        let sa = p_stabilise(&f.phi, &to, 3, &a, &b).unwrap();
        let sb = p_stabilise(&f.phi, &to, 3, &b, &a).unwrap();
        assert!(!sa.is_zero() && !sb.is_zero());
        assert!(p_stabilise(&f.phi, &to, 3, &a, &a).is_err());
    }

    #[test]
    fn trivial_twist_is_the_period_on_zero_to_infinity() {
        let f = Newform::find("11a", 1, 3).unwrap();
        let chi = DirichletCharacter::trivial(1);
        let l = classical_l_value(&f.phi, &chi, 0).unwrap();
        let direct = f.phi.symbol.values[f.phi.manin.identity_coset()][0].clone();
        assert_eq!(l.as_rational(), Some(direct.clone()));
        assert!(!direct.is_zero());
    }

    #[test]
    fn parity_selects_the_nonvanishing_sign() {
        let plus = Newform::find("11a", 1, 3).unwrap();
        let minus = Newform::find("11a", -1, 3).unwrap();
        for chi in DirichletCharacter::all_mod(5).into_iter().skip(1) {
            let good = parity_sign(0, 0, &chi);
            let (on, off) = if good == 1 {
                (&plus, &minus)
            } else {
                (&minus, &plus)
            };
            assert!(!twisted_period_sum(&on.phi, &chi, 0).unwrap().is_zero());
            assert!(twisted_period_sum(&off.phi, &chi, 0).unwrap().is_zero());
        }
    }
}
