//! p-adic scalars, Dirichlet characters, Gauss sums, and the embedding of
//! cyclotomic and quadratic numbers into `Q_p(zeta_{p^r})`.

pub mod character;
pub mod cyclo;
pub mod embed;
pub mod scalar;

pub use character::{gauss_sum_exact, DirichletCharacter};
pub use cyclo::CycloQ;
pub use embed::Embedding;
pub use scalar::{Extension, PadicScalar, Valuation};

use crate::arith::Zp;
use crate::error::{Error, Result};

/// `omega(a)`: the `(p-1)`-st root of unity congruent to `a` mod `p`.
pub fn teichmuller(p: u64, a: u64, prec: u32) -> Result<Zp> {
    crate::arith::zmod::teichmuller(p, prec, a).ok_or_else(|| {
        Error::Config(format!(
            "Teichmuller lift of {a}, which is divisible by {p}"
        ))
    })
}

/// `tau(chi)` embedded in `Z_p[zeta_{p^r}]`. Requires a primitive character of
/// conductor `p^r` with `r >= 1`.
pub fn gauss_sum(chi: &DirichletCharacter, emb: &Embedding) -> Result<PadicScalar> {
    let m = chi.modulus;
    if m == 1 || !chi.is_primitive() {
        return Err(Error::Config(format!(
            "Gauss sum needs a primitive character (modulus {m})"
        )));
    }
    let mut acc = emb.zero();
    for a in 0..m as i64 {
        if chi.exp(a).is_some() {
            acc = acc.add(&emb.character_value(chi, a).mul(&emb.root_of_unity(m, a)));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_sum_identity_padically() {
        for (p, r) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (3, 3), (5, 3)] {
            let m = p.pow(r);
            let emb = Embedding::standard(p, r, 8);
            for chi in DirichletCharacter::all_mod(m)
                .into_iter()
                .filter(|c| c.is_primitive())
            {
                let t = gauss_sum(&chi, &emb).unwrap();
                let tb = gauss_sum(&chi.conj(), &emb).unwrap();
                let rhs = PadicScalar::from_int(p, emb.ext(), 8, chi.parity() as i128 * m as i128);
                assert_eq!(t.mul(&tb), rhs);
                // individual valuations follow Stickelberger; only the sum is forced
                let v = t.valuation().value() + tb.valuation().value();
                assert_eq!(v, crate::arith::q(r as i64));
            }
        }
    }

    #[test]
    fn trivial_character_rejected() {
        let emb = Embedding::standard(5, 1, 4);
        assert!(gauss_sum(&DirichletCharacter::trivial(5), &emb).is_err());
        assert!(gauss_sum(&DirichletCharacter::trivial(1), &emb).is_err());
    }

    #[test]
    fn exact_and_padic_gauss_sums_agree() {
        let emb = Embedding::standard(3, 2, 8);
        for chi in DirichletCharacter::all_mod(9)
            .into_iter()
            .filter(|c| c.is_primitive())
        {
            assert_eq!(
                emb.cyclo(&gauss_sum_exact(&chi)),
                gauss_sum(&chi, &emb).unwrap()
            );
        }
    }
}
