//! Overconvergent lifts of classical eigensymbols: a single weight by the
//! contraction of `U_p`, and a whole weight disc by killing the other Hecke
//! systems and iterating.

pub mod algebra;
pub mod family;
pub mod plan;

use std::sync::Arc;

use serde::Serialize;

pub use algebra::{
    generalised_eigenspace, hecke_algebra_image, FiniteAlgebra, GeneralisedEigenspace,
    GorensteinVerdict,
};
pub use family::{family_lift, FamilyLift};
pub use plan::{relations_hold, LiftPlan};

use crate::arith::{Ring, Zp, Q};
use crate::dist::{classical_to_zp, specialise_rho, DistCoeff, DistModule};
use crate::error::{Error, Result};
use crate::modsym::eigen::ClassicalSymbol;
use crate::modsym::manin::hecke_betas;
use crate::modsym::{Action, HeckeOp, Manin, SymK, Symbol};

/// One precision event: where digits were lost and how many.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LedgerEntry {
    pub step: String,
    pub digits_lost: u32,
}

/// Running account of precision, starting from the working precision.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Ledger {
    pub start: u32,
    pub entries: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn new(start: u32) -> Self {
        Ledger {
            start,
            entries: vec![],
        }
    }

    pub fn lose(&mut self, step: impl Into<String>, digits: u32) {
        self.entries.push(LedgerEntry {
            step: step.into(),
            digits_lost: digits,
        });
    }

    /// Digits still guaranteed at moment 0.
    pub fn remaining(&self) -> u32 {
        let lost: u32 = self.entries.iter().map(|e| e.digits_lost).sum();
        self.start.saturating_sub(lost)
    }
}

/// A distribution-valued symbol with its `U_p` eigenvalue.
#[derive(Debug)]
pub struct OvcSymbol<R: DistCoeff> {
    pub module: Arc<DistModule<R>>,
    pub manin: Arc<Manin>,
    pub symbol: Symbol<R>,
    pub alpha: R,
    pub ledger: Ledger,
}

impl<R: DistCoeff> OvcSymbol<R> {
    pub fn p(&self) -> u64 {
        self.module.p
    }

    pub fn apply(&self, op: HeckeOp) -> Symbol<R> {
        apply_op(&self.module, &self.manin, &self.symbol, op)
    }

    /// The first `k + 1` moments of every value.
    pub fn rho(&self, k: u32) -> Result<Symbol<R>> {
        let values = self
            .symbol
            .values
            .iter()
            .map(|v| specialise_rho(v, k))
            .collect::<Result<_>>()?;
        Ok(Symbol { values })
    }

    pub fn relations_hold(&self) -> bool {
        self.relation_digits() >= self.ledger.remaining()
    }

    /// Filtration digits to which every Manin relation holds.
    pub fn relation_digits(&self) -> u32 {
        let zero = Action::zero(self.module.as_ref());
        self.symbol
            .relation_defects(&self.manin, self.module.as_ref())
            .iter()
            .map(|d| filtered_digits(d, &zero, self.module.nmom as u32))
            .fold(self.module.nmom as u32, u32::min)
    }

    /// Filtration digits to which `op` acts by `lambda`.
    pub fn eigen_digits(&self, op: HeckeOp, lambda: &R) -> u32 {
        let img = self.apply(op);
        img.values
            .iter()
            .zip(&self.symbol.values)
            .map(|(a, b)| {
                let sb: Vec<R> = b.iter().map(|x| x.mul(lambda)).collect();
                filtered_digits(a, &sb, self.module.nmom as u32)
            })
            .fold(self.module.nmom as u32, u32::min)
    }

    /// Whether `op` acts by `lambda` to the ledger's precision.
    pub fn is_eigen(&self, op: HeckeOp, lambda: &R) -> bool {
        self.eigen_digits(op, lambda) >= self.ledger.remaining()
    }

    /// Whether two symbols agree to the ledger's precision.
    pub fn agrees_with(&self, o: &Symbol<R>) -> bool {
        symbol_digits(&self.symbol, o, self.module.nmom as u32) >= self.ledger.remaining()
    }
}

/// Digits to which two moment vectors agree in the filtration quotient: the
/// least `v(x_j - y_j) + j` over moments and coordinates, capped at `cap`.
pub fn filtered_digits<R: DistCoeff>(a: &[R], b: &[R], cap: u32) -> u32 {
    let mut best = cap;
    for (j, (x, y)) in a.iter().zip(b).enumerate() {
        for z in x.sub(y).coords() {
            if let Some(v) = z.valuation() {
                best = best.min(v + j as u32);
            }
        }
    }
    best
}

/// Least plain valuation of `x_j - y_j` over moments `j < upto`, capped.
pub fn plain_digits(a: &Symbol<Zp>, b: &Symbol<Zp>, upto: usize, cap: u32) -> u32 {
    let mut best = cap;
    for (x, y) in a.values.iter().zip(&b.values) {
        for (u, v) in x.iter().zip(y).take(upto) {
            if let Some(val) = u.sub(v).valuation() {
                best = best.min(val);
            }
        }
    }
    best
}

/// `filtered_digits` over all cosets.
pub fn symbol_digits<R: DistCoeff>(a: &Symbol<R>, b: &Symbol<R>, cap: u32) -> u32 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| filtered_digits(x, y, cap))
        .fold(cap, u32::min)
}

pub fn apply_op<R: DistCoeff>(
    module: &DistModule<R>,
    manin: &Manin,
    s: &Symbol<R>,
    op: HeckeOp,
) -> Symbol<R> {
    s.apply_double_coset(manin, module, &hecke_betas(&op))
}

/// The unit root `alpha` of `X^2 - a_p X + p^{k+1}` and the other root.
pub fn unit_root(a_p: &Q, k: u32, p: u64, prec: u32) -> Result<(Zp, Zp)> {
    let a =
        Zp::from_q(p, prec, a_p).ok_or_else(|| Error::Config("a_p is not p-integral".into()))?;
    if !a.is_unit() {
        return Err(Error::Config(format!(
            "a_{p} = {a_p} is not a unit: the form is not ordinary at {p}"
        )));
    }
    let pk1 = Zp::one(p, prec).mul_p_pow(k + 1);
    let mut x = a;
    // Newton: f'(x) = 2x - a_p is a unit near the unit root
    for _ in 0..=prec {
        let f = x.mul(&x).sub(&a.mul(&x)).add(&pk1);
        let df = x.mul_i64(2).sub(&a);
        x = x.sub(&f.mul(&df.inv().expect("derivative is a unit")));
    }
    Ok((x, a.sub(&x)))
}

/// The `p`-stabilisation `alpha^{-1} (U_p - beta)` of `phi` pulled back to
/// `to`, with values in `Z/p^prec`; checked to be a `U_p`-eigensymbol.
pub fn stabilise_zp(
    phi: &ClassicalSymbol,
    to: &Arc<Manin>,
    p: u64,
    alpha: &Zp,
    beta: &Zp,
) -> Result<Symbol<Zp>> {
    if to.level != phi.level() * p {
        return Err(Error::Config(format!(
            "stabilisation target level {} is not {}*{p}",
            to.level,
            phi.level()
        )));
    }
    let prec = alpha.prec();
    let values = phi
        .symbol
        .values
        .iter()
        .map(|v| classical_to_zp(v, p, prec))
        .collect::<Result<_>>()?;
    let lifted = Symbol { values };
    let act = SymK::new(phi.k, Zp::zero(p, prec));
    let pulled = lifted.pullback(&phi.manin, to, &act);
    let betas = hecke_betas(&HeckeOp::U(p));
    let ainv = alpha
        .inv()
        .ok_or_else(|| Error::Config("alpha is not a unit".into()))?;
    let stab = pulled
        .apply_double_coset(to, &act, &betas)
        .sub(&pulled.scale(beta))
        .scale(&ainv);
    if stab.apply_double_coset(to, &act, &betas) != stab.scale(alpha) {
        return Err(Error::Check(
            "stabilised symbol is not a U_p eigenvector".into(),
        ));
    }
    Ok(stab)
}

/// Iterate `Phi <- alpha^{-1} U_p Phi` until it is stable in the filtration
/// quotient, returning the number of steps.
fn iterate_up<R: DistCoeff>(
    module: &DistModule<R>,
    manin: &Manin,
    s: &mut Symbol<R>,
    alpha_inv: &R,
    cap: usize,
) -> Result<usize> {
    let p = module.p;
    for step in 1..=cap {
        let next = apply_op(module, manin, s, HeckeOp::U(p)).scale(alpha_inv);
        let stable = next
            .values
            .iter()
            .zip(&s.values)
            .all(|(a, b)| module.eq_filtered(a, b));
        *s = next;
        if stable {
            return Ok(step);
        }
    }
    Err(Error::Precision(format!(
        "U_{p} iteration did not stabilise in {cap} steps"
    )))
}

fn check_lift_args(manin: &Manin, p: u64, k: u32, nmom: usize, alpha: &Zp) -> Result<Zp> {
    if manin.level % p != 0 {
        return Err(Error::Config(format!(
            "level {} is not divisible by {p}",
            manin.level
        )));
    }
    if nmom <= k as usize {
        return Err(Error::Config(format!(
            "{nmom} moments cannot carry weight parameter {k}"
        )));
    }
    let prec = nmom as u32;
    let alpha = alpha.reduce(prec.min(alpha.prec())).lift_to(prec);
    alpha.inv().ok_or_else(|| {
        Error::Config("only ordinary (unit) U_p eigenvalues are supported".into())
    })?;
    Ok(alpha)
}

fn start<R: DistCoeff>(
    manin: &Arc<Manin>,
    module: &DistModule<R>,
    classical: &Symbol<R>,
    seed: Option<u64>,
    approximate: bool,
) -> Result<Symbol<R>> {
    LiftPlan::new(manin.clone(), module.p)?.lift(module, classical, seed, approximate)
}

/// The unique overconvergent `U_p`-eigenlift with `nmom` moments of an
/// ordinary `U_p`-eigensymbol `phi` of weight `k + 2` (level divisible by
/// `p`). `seed` perturbs the starting lift; the result does not depend on it.
pub fn lift_symbol(
    phi: &Symbol<Zp>,
    manin: &Arc<Manin>,
    p: u64,
    k: u32,
    alpha: &Zp,
    nmom: usize,
    seed: Option<u64>,
) -> Result<OvcSymbol<Zp>> {
    let alpha = check_lift_args(manin, p, k, nmom, alpha)?;
    let prec = nmom as u32;
    let module = Arc::new(DistModule::single(p, nmom, k));
    let classical = phi.map(|x| x.reduce(prec.min(x.prec())).lift_to(prec));
    let mut s = start(manin, &module, &classical, seed, false)?;
    iterate_up(&module, manin, &mut s, &alpha.inv().unwrap(), 2 * nmom + 2)?;
    let symbol = Symbol {
        values: s.values.iter().map(|v| module.normalise(v)).collect(),
    };
    Ok(OvcSymbol {
        module,
        manin: manin.clone(),
        symbol,
        alpha,
        ledger: Ledger::new(prec),
    })
}

/// `(alpha^{-1} U_p)^steps` applied to a lift of `phi`, for symbols that are
/// eigen only to limited precision (such as specialised families).
pub fn lift_approximate(
    phi: &Symbol<Zp>,
    manin: &Arc<Manin>,
    p: u64,
    k: u32,
    alpha: &Zp,
    nmom: usize,
    steps: usize,
) -> Result<OvcSymbol<Zp>> {
    let alpha = check_lift_args(manin, p, k, nmom, alpha)?;
    let prec = nmom as u32;
    let module = Arc::new(DistModule::single(p, nmom, k));
    let classical = phi.map(|x| x.reduce(prec.min(x.prec())).lift_to(prec));
    let mut s = start(manin, &module, &classical, None, true)?;
    let ainv = alpha.inv().unwrap();
    for _ in 0..steps {
        s = apply_op(&module, manin, &s, HeckeOp::U(p)).scale(&ainv);
    }
    let symbol = Symbol {
        values: s.values.iter().map(|v| module.normalise(v)).collect(),
    };
    Ok(OvcSymbol {
        module,
        manin: manin.clone(),
        symbol,
        alpha,
        ledger: Ledger::new(prec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::eigen::Newform;

    fn eleven_a_at(p: u64, nmom: usize) -> (Arc<Manin>, Symbol<Zp>, Zp) {
        let f = Newform::find("11a", 1, 8).unwrap();
        let prec = nmom as u32 + 4;
        let ap = f.a(p).unwrap().clone();
        let (alpha, beta) = unit_root(&ap, 0, p, prec).unwrap();
        let to = Arc::new(Manin::new(11 * p));
        let stab = stabilise_zp(&f.phi, &to, p, &alpha, &beta).unwrap();
        (to, stab, alpha)
    }

    #[test]
    fn unit_root_of_eleven_a() {
        let (a, b) = unit_root(&crate::arith::q(-1), 0, 3, 10).unwrap();
        assert!(a.is_unit());
        assert_eq!(a.mul(&b), Zp::new(3, 10, 3));
        assert!(unit_root(&crate::arith::q(0), 0, 3, 10).is_err());
    }

    #[test]
    fn lift_at_three_is_an_eigensymbol() {
        let (manin, stab, alpha) = eleven_a_at(3, 8);
        let lift = lift_symbol(&stab, &manin, 3, 0, &alpha, 8, None).unwrap();
        assert!(lift.relations_hold());
        assert!(lift.is_eigen(HeckeOp::U(3), &lift.alpha));
        let rho = lift.rho(0).unwrap();
        for (a, b) in rho.values.iter().zip(&stab.values) {
            assert!(a[0].eq_mod(&b[0], 8));
        }
        let other = lift_symbol(&stab, &manin, 3, 0, &alpha, 8, Some(7)).unwrap();
        assert!(lift.agrees_with(&other.symbol));
    }

    #[test]
    fn starting_lift_solves_the_relations() {
        let (manin, stab, _) = eleven_a_at(5, 7);
        let module = DistModule::single(5, 7, 0);
        let plan = LiftPlan::new(manin.clone(), 5).unwrap();
        let classical = stab.map(|x| x.reduce(7));
        let a = plan.lift(&module, &classical, Some(1), false).unwrap();
        let b = plan.lift(&module, &classical, Some(2), false).unwrap();
        assert!(relations_hold(&module, &manin, &a));
        assert!(relations_hold(&module, &manin, &b));
        assert_ne!(a, b);
        for (x, y) in a.values.iter().zip(&classical.values) {
            assert_eq!(x[0], y[0]);
        }
    }

    #[test]
    fn weight_four_lift() {
        let f = Newform::find("7k2", 1, 8).unwrap();
        let p = 3;
        let (alpha, beta) = unit_root(f.a(p).unwrap(), 2, p, 12).unwrap();
        let to = Arc::new(Manin::new(21));
        let stab = stabilise_zp(&f.phi, &to, p, &alpha, &beta).unwrap();
        let lift = lift_symbol(&stab, &to, p, 2, &alpha, 8, Some(3)).unwrap();
        assert!(lift.relations_hold());
        assert!(lift.is_eigen(HeckeOp::U(p), &lift.alpha));
        assert!(lift.is_eigen(HeckeOp::T(2), &Zp::from_q(p, 8, f.a(2).unwrap()).unwrap()));
    }
}
