//! The lift over the weight disc `Z/p^M[w]/(w^n)`.
//!
//! Starting from any lift of the ordinary stabilisation, the other Hecke
//! systems are removed by a power of `Q(T_l)`, where `Q` is the tame
//! characteristic polynomial with the factor of `f` taken out; since every
//! family eigenvalue moves by multiples of `p w`, `Q(lambda_g(w))^n`
//! vanishes modulo `w^n`. Positive slope is removed by iterating `U_p`.
//! The price is the valuation of `Q(a_l(f))^n`, paid once by a division.

use std::sync::Arc;

use super::{apply_op, stabilise_zp, unit_root, Ledger, LiftPlan, OvcSymbol};
use crate::arith::poly::Poly;
use crate::arith::{vp_q, Ring, Zp};
use crate::dist::family::truncation_digits;
use crate::dist::{bigint_to_zp, family_weight_value, DistModule, FamilyScalar};
use crate::error::{Error, Result};
use crate::modsym::eigen::Newform;
use crate::modsym::space::is_prime;
use crate::modsym::{HeckeOp, Manin, Symbol, SymbolSpace};

/// The auxiliary operator used to isolate `f`.
#[derive(Clone, Debug)]
pub struct KillData {
    pub ell: u64,
    /// `Q` with integer coefficients, constant term first.
    pub poly: Poly,
    /// `v_p(Q(a_l(f)))`.
    pub congruence: u32,
}

/// Choose `l` (prime, coprime to `Np`, below `bound`) minimising the
/// congruence valuation of `Q(a_l(f))`. Only primes at which `a_l(f)` occurs
/// exactly `old_mult` times (the copies of `f` itself) can separate `f`.
pub fn choose_kill(
    space: &SymbolSpace,
    f: &Newform,
    p: u64,
    old_mult: usize,
    bound: u64,
) -> Result<KillData> {
    let level = space.level();
    let mut best: Option<KillData> = None;
    for ell in (2..bound).filter(|&l| is_prime(l) && level % l != 0) {
        let a = f
            .a(ell)
            .ok_or_else(|| Error::Config(format!("a_{ell} not computed")))?
            .clone();
        let charpoly = space.hecke_matrix(HeckeOp::T(ell))?.charpoly();
        let mult = charpoly.root_multiplicity(&a);
        if mult != old_mult {
            continue;
        }
        let (poly, rem) = charpoly.divrem(&Poly::x_minus(&a).pow(mult));
        debug_assert!(rem.is_zero());
        let val = poly.eval(&a);
        let congruence = vp_q(&val, p) as u32;
        if best.as_ref().is_none_or(|b| congruence < b.congruence) {
            best = Some(KillData {
                ell,
                poly,
                congruence,
            });
        }
        if congruence == 0 {
            break;
        }
    }
    best.ok_or_else(|| {
        Error::Config(format!(
            "no prime below {bound} separates {} from the other systems",
            f.form.label
        ))
    })
}

/// A family of overconvergent eigensymbols through the ordinary
/// stabilisation of `f`, with its `U_p` eigenvalue `alpha(w)`.
#[derive(Debug)]
pub struct FamilyLift {
    pub lift: OvcSymbol<FamilyScalar>,
    pub k0: u32,
    pub kill: KillData,
    /// Coset whose moment 0 fixes the normalisation.
    pub anchor: usize,
    /// The stabilised classical symbol at the centre.
    pub centre: Symbol<Zp>,
}

impl FamilyLift {
    pub fn alpha(&self) -> &FamilyScalar {
        &self.lift.alpha
    }

    /// Truncation order `n` of `Z/p^M[w]/(w^n)`.
    pub fn order(&self) -> usize {
        self.lift.module.like.order() + 1
    }

    /// Digits guaranteed after specialising away from the centre.
    pub fn specialisation_digits(&self) -> u32 {
        let m = &self.lift.module;
        let n = m.like.order();
        self.lift.ledger.remaining().min(truncation_digits(m.p, n))
    }

    /// Specialise every moment at weight `k'`; the result is a weight `k'`
    /// distribution-valued symbol (as raw moments).
    pub fn specialise(&self, kp: u32) -> Result<Symbol<Zp>> {
        let w = family_weight_value(self.lift.p(), self.k0, kp)?;
        let like = self.lift.module.like.constant_term();
        let wz = like.from_i64_like(w);
        Ok(self.lift.symbol.map(|x| x.eval(&wz)))
    }

    pub fn alpha_at(&self, kp: u32) -> Result<Zp> {
        let w = family_weight_value(self.lift.p(), self.k0, kp)?;
        let a = self.alpha();
        Ok(a.eval(&a.constant_term().from_i64_like(w)))
    }
}

/// Lift the ordinary `p`-stabilisation of `f` over `Z/p^M[w]/(w^n)` with
/// `M = nmom` moments. `n = 1` is the single-weight lift.
pub fn family_lift(
    f: &Newform,
    p: u64,
    nmom: usize,
    n: usize,
    seed: Option<u64>,
) -> Result<FamilyLift> {
    if n == 0 {
        return Err(Error::Config(
            "family truncation order must be at least 1".into(),
        ));
    }
    // highest surviving power of w
    let n = n - 1;
    let k0 = f.phi.k;
    let sign = f
        .phi
        .sign
        .ok_or_else(|| Error::Config("family lift needs a signed form".into()))?;
    if f.phi.level() % p == 0 {
        return Err(Error::Config(format!(
            "{p} divides the level of {}",
            f.form.label
        )));
    }
    let prec = nmom as u32;
    let ap = f
        .a(p)
        .ok_or_else(|| Error::Config(format!("a_{p} not computed")))?;
    let (alpha0, beta0) = unit_root(ap, k0, p, prec)?;
    let manin = Arc::new(Manin::new(f.phi.level() * p));
    let centre = stabilise_zp(&f.phi, &manin, p, &alpha0, &beta0)?;
    let space = SymbolSpace::build(manin.level, k0, Some(sign));
    // f(z) and f(pz)
    let kill = choose_kill(&space, f, p, 2, 30)?;
    let mut ledger = Ledger::new(prec);

    let module = Arc::new(DistModule::family(p, nmom, k0, n));
    let like = module.like.clone();
    let classical = centre.map(|x| FamilyScalar::constant(*x, n));
    let plan = LiftPlan::new(manin.clone(), p)?;
    let mut s = plan.lift(&module, &classical, seed, false)?;

    // sign projection (1 + sign * iota) / 2
    let iota = apply_op(&module, &manin, &s, HeckeOp::Iota);
    s = s
        .add(&iota.scale(&like.from_i64_like(sign as i64)))
        .scale(&like.from_i64_like(2).inv().unwrap());

    // Q(T_l)^{n+1} by Horner
    let qpow = kill.poly.pow(n + 1);
    let coeffs = qpow.integer_coeffs();
    let to_lam = |c: &num_bigint::BigInt| FamilyScalar::constant(bigint_to_zp(c, p, prec), n);
    let mut acc = s.scale(&to_lam(coeffs.last().unwrap()));
    for c in coeffs.iter().rev().skip(1) {
        acc = apply_op(&module, &manin, &acc, HeckeOp::T(kill.ell)).add(&s.scale(&to_lam(c)));
    }
    s = acc;

    // remove positive slope
    let ainv = FamilyScalar::constant(alpha0.inv().unwrap(), n);
    for _ in 0..nmom + 2 {
        s = apply_op(&module, &manin, &s, HeckeOp::U(p)).scale(&ainv);
    }

    // the result is B(w) F with F the normalised family; first remove the
    // common power of p
    let e = common_valuation(&s, prec);
    if e >= prec {
        return Err(Error::Precision(format!(
            "the kill operator at T_{} annihilated the lift",
            kill.ell
        )));
    }
    if e > 0 {
        s = s.map(|x| FamilyScalar {
            c: x.c.iter().map(|z| z.div_p_pow(e)).collect(),
        });
        ledger.lose(format!("common factor of Q(T_{})^{}", kill.ell, n + 1), e);
    }
    // the anchor is a coset whose moment 0 has least valuation va
    let anchor = (0..centre.values.len())
        .min_by_key(|&c| centre.values[c][0].valuation().unwrap_or(prec))
        .ok_or_else(|| Error::Check("empty symbol".into()))?;
    let va = centre.values[anchor][0].valuation().unwrap_or(prec);
    if va + e >= prec {
        return Err(Error::Check(
            "stabilised symbol vanishes at this precision".into(),
        ));
    }
    if va > 0 {
        ledger.lose("non-unit normalising value (in the eigenvalue)", va);
    }
    // phi = p^va phi' with phi' primitive, and what is left is B(w) F' for
    // the family F' through phi'; B = Psi_anchor / phi'_anchor
    let phi_inv = centre.values[anchor][0].div_p_pow(va).inv().unwrap();
    let b = s.values[anchor][0].mul_scalar(&phi_inv);
    let a0 = b.c[0].valuation().unwrap_or(prec);
    if (n as u32 + 1) * a0 + e >= prec {
        return Err(Error::Precision(format!(
            "normalising the family costs {} digits, more than the {} left",
            (n as u32 + 1) * a0,
            prec - e
        )));
    }
    if a0 > 0 {
        ledger.lose("division by the anchor series", (n as u32 + 1) * a0);
    }
    let pva = FamilyScalar::constant(alpha0.one_like().mul_p_pow(va), n);
    s = s.map(|x| divide_series(x, &b, a0).mul(&pva));
    let up = apply_op(&module, &manin, &s, HeckeOp::U(p));
    let alpha = {
        let x = &up.values[anchor][0];
        FamilyScalar {
            c: x.c.iter().map(|z| z.div_p_pow(va).mul(&phi_inv)).collect(),
        }
    };
    let symbol = Symbol {
        values: s.values.iter().map(|v| module.normalise(v)).collect(),
    };
    let mut lift = OvcSymbol {
        module,
        manin,
        symbol,
        alpha,
        ledger,
    };
    let measured = lift.relation_digits();
    let remaining = lift.ledger.remaining();
    if measured < remaining {
        lift.ledger.lose(
            "action of the weight character (measured on the relations)",
            remaining - measured,
        );
    }
    Ok(FamilyLift {
        lift,
        k0,
        kill,
        anchor,
        centre,
    })
}

/// Least valuation of a meaningful coefficient (moment `j` known modulo
/// `p^{prec - j}`).
fn common_valuation(s: &Symbol<FamilyScalar>, prec: u32) -> u32 {
    let mut best = prec;
    for v in &s.values {
        for (j, x) in v.iter().enumerate() {
            for z in &x.c {
                if let Some(val) = z.valuation() {
                    if val < prec.saturating_sub(j as u32) {
                        best = best.min(val);
                    }
                }
            }
        }
    }
    best
}

/// `x / b` in the truncated ring, where `b_0 = p^{a0} u`; layer `i` of the
/// quotient loses `(i + 1) a0` digits.
fn divide_series(x: &FamilyScalar, b: &FamilyScalar, a0: u32) -> FamilyScalar {
    let u_inv = b.c[0].div_p_pow(a0).inv().expect("anchor unit part");
    let mut q: Vec<Zp> = Vec::with_capacity(x.c.len());
    for i in 0..x.c.len() {
        let mut r = x.c[i];
        for j in 1..=i {
            r = r.sub(&b.c[j].mul(&q[i - j]));
        }
        q.push(r.div_p_pow(a0).mul(&u_inv));
    }
    FamilyScalar { c: q }
}

/// Reduce a family symbol to its `w^0` layer.
pub fn centre_layer(s: &Symbol<FamilyScalar>) -> Symbol<Zp> {
    s.map(|x| x.constant_term())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{lift_approximate, lift_symbol, plain_digits, symbol_digits};

    #[test]
    fn eleven_a_family_at_seven() {
        let f = Newform::find("11a", 1, 30).unwrap();
        let (p, nmom, n) = (7u64, 20usize, 3usize);
        let fam = family_lift(&f, p, nmom, n, Some(5)).unwrap();
        let good = fam.lift.ledger.remaining();
        assert!(good >= 4, "{:?}", fam.lift.ledger);
        assert!(fam.lift.relations_hold());
        assert!(fam.lift.is_eigen(HeckeOp::U(p), fam.alpha()));

        // centre layer against the single-weight lift
        let alpha0 = fam.alpha().constant_term();
        let single = lift_symbol(&fam.centre, &fam.lift.manin, p, 0, &alpha0, nmom, None).unwrap();
        let centre = centre_layer(&fam.lift.symbol);
        assert!(symbol_digits(&centre, &single.symbol, nmom as u32) >= good);

        // weight 8 against a lift built from the specialised classical part alone
        let kp = p as u32 - 1;
        let digits = fam.specialisation_digits();
        let spec = fam.specialise(kp).unwrap();
        let alpha = fam.alpha_at(kp).unwrap();
        let classical = Symbol {
            values: spec
                .values
                .iter()
                .map(|v| v[..=kp as usize].to_vec())
                .collect(),
        };
        let indep =
            lift_approximate(&classical, &fam.lift.manin, p, kp, &alpha, nmom, nmom + 2).unwrap();
        let upto = nmom - good as usize;
        let got = plain_digits(&spec, &indep.symbol, upto, digits);
        assert!(
            got >= 2,
            "only {got} of {digits} digits at weight {}",
            kp + 2
        );
        assert!(!fam.alpha().c[1].vanishes());
    }

    #[test]
    fn order_one_is_the_single_weight_lift() {
        let f = Newform::find("11a", 1, 30).unwrap();
        let (p, nmom) = (5u64, 12usize);
        let fam = family_lift(&f, p, nmom, 1, None).unwrap();
        assert_eq!(fam.order(), 1);
        let (alpha0, _) = unit_root(f.a(p).unwrap(), 0, p, nmom as u32).unwrap();
        let single = lift_symbol(&fam.centre, &fam.lift.manin, p, 0, &alpha0, nmom, None).unwrap();
        let got = symbol_digits(&centre_layer(&fam.lift.symbol), &single.symbol, nmom as u32);
        assert!(
            got >= fam.lift.ledger.remaining(),
            "{got} {:?}",
            fam.lift.ledger
        );
    }
}
