//! Quadratic twists of symbols by the path formula
//! `Phi_psi(D) = sum_b psi(b) Phi(M_b D) | M_b` with `M_b = [[m, b], [0, m]]`,
//! which is a symbol of level `N m^2` when `m` is prime to `N`. Twisting the
//! overconvergent symbol directly avoids a lift at the larger level.

use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;

use crate::arith::{Ring, Zp};
use crate::error::{Error, Result};
use crate::lift::OvcSymbol;
use crate::modsym::eigen::ClassicalSymbol;
use crate::modsym::manin::vec_add;
use crate::modsym::mat2::Mat2;
use crate::modsym::{Action, Manin, Symbol};
use crate::padic::DirichletCharacter;

/// `psi(b)` for `0 <= b < m` as `-1, 0, 1`.
fn quadratic_values(psi: &DirichletCharacter) -> Result<Vec<i64>> {
    if psi.order() > 2 {
        return Err(Error::Config(format!(
            "twisting needs a quadratic character, not one of order {}",
            psi.order()
        )));
    }
    Ok((0..psi.modulus as i64)
        .map(|b| match psi.exp(b) {
            None => 0,
            Some(0) => 1,
            Some(_) => -1,
        })
        .collect())
}

pub fn twist_symbol<R: Ring>(
    s: &Symbol<R>,
    from: &Manin,
    to: &Manin,
    act: &dyn Action<R>,
    psi: &DirichletCharacter,
) -> Result<Symbol<R>> {
    let m = psi.modulus;
    if m.gcd(&from.level) != 1 {
        return Err(Error::Config(format!(
            "twisting modulus {m} is not prime to the level {}",
            from.level
        )));
    }
    if to.level != from.level * m * m {
        return Err(Error::Config(format!(
            "twist of level {} lands at {}, not {}",
            from.level,
            from.level * m * m,
            to.level
        )));
    }
    let signs = quadratic_values(psi)?;
    let mats: Vec<(i64, Mat2)> = signs
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(b, &e)| (e, Mat2::new(m as i64, b as i64, 0, m as i64)))
        .collect();
    let values = to
        .reps
        .par_iter()
        .map(|g| {
            let r = g.act_cusp(0, 1);
            let t = g.act_cusp(1, 0);
            let mut acc = act.zero();
            for (e, mb) in &mats {
                let v = s.eval_path(from, act, mb.act_cusp(r.0, r.1), mb.act_cusp(t.0, t.1));
                let mut w = act.act(&v, mb);
                if *e < 0 {
                    w.iter_mut().for_each(|x| *x = x.neg());
                }
                vec_add(&mut acc, &w);
            }
            acc
        })
        .collect();
    Ok(Symbol { values })
}

/// The twist of a rational symbol, checked against the Manin relations.
pub fn twist_classical(phi: &ClassicalSymbol, psi: &DirichletCharacter) -> Result<ClassicalSymbol> {
    let m = psi.modulus;
    let to = Arc::new(Manin::new(phi.level() * m * m));
    let act = phi.action();
    let symbol = twist_symbol(&phi.symbol, &phi.manin, &to, &act, psi)?;
    if symbol
        .relation_defects(&to, &act)
        .iter()
        .any(|d| d.iter().any(|x| !x.vanishes()))
    {
        return Err(Error::Check(
            "twisted symbol violates the Manin relations".into(),
        ));
    }
    let sign = phi.sign.map(|s| s * psi.parity() as i8);
    Ok(ClassicalSymbol {
        manin: to,
        k: phi.k,
        sign,
        symbol,
    })
}

/// The twist of an overconvergent eigensymbol. The `U_p`-eigenvalue becomes
/// `psi(p) alpha`.
pub fn twist_ovc(phi: &OvcSymbol<Zp>, psi: &DirichletCharacter) -> Result<OvcSymbol<Zp>> {
    let m = psi.modulus;
    let p = phi.p();
    let psi_p = quadratic_values(psi)?[(p % m) as usize];
    if psi_p == 0 {
        return Err(Error::Config(format!(
            "p = {p} divides the twisting modulus {m}"
        )));
    }
    let to = Arc::new(Manin::new(phi.manin.level * m * m));
    let symbol = twist_symbol(&phi.symbol, &phi.manin, &to, phi.module.as_ref(), psi)?;
    let alpha = if psi_p < 0 {
        phi.alpha.neg()
    } else {
        phi.alpha.clone()
    };
    let out = OvcSymbol {
        module: phi.module.clone(),
        manin: to,
        symbol,
        alpha,
        ledger: phi.ledger.clone(),
    };
    if !out.relations_hold() {
        return Err(Error::Check(format!(
            "twisted symbol satisfies the Manin relations to only {} digits",
            out.relation_digits()
        )));
    }
    Ok(out)
}
