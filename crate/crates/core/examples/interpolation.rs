//! The 3-adic L-function of 11a at characters of conductor 3 and 9, against
//! the classical L-values times the interpolation factor.

use padic_lfun::lfun::{interpolation_factor, lift_newform, mellin, Interpolation};
use padic_lfun::modsym::eigen::{classical_l_value, parity_sign};
use padic_lfun::modsym::Newform;
use padic_lfun::padic::{DirichletCharacter, Embedding};

fn main() -> padic_lfun::error::Result<()> {
    let p = 3;
    for sign in [1i8, -1] {
        let f = Newform::find("11a", sign, 12)?;
        let ovc = lift_newform(&f, p, 12)?;
        let l = mellin(&ovc, 2, 4)?;
        for (m, r) in [(3u64, 1u32), (9, 2)] {
            let emb = Embedding::standard(p, r, 16);
            for chi in DirichletCharacter::all_mod(m)
                .into_iter()
                .filter(|c| c.is_primitive())
            {
                let v = l.evaluate(&chi, 0)?;
                if parity_sign(0, 0, &chi) != sign {
                    println!(
                        "sign {sign:+} mod {m} parity {}: vanishes {}",
                        chi.parity(),
                        v.vanishes()
                    );
                    continue;
                }
                let e = interpolation_factor(&ovc.alpha, 0, &chi, 0, Interpolation::Rational, 16)?;
                let expected = e.mul(&emb.cyclo(&classical_l_value(&f.phi, &chi, 0)?));
                let d = v.digits.min(expected.abs_prec());
                println!(
                    "sign {sign:+} mod {m} parity {}: agree to {d} digits: {}",
                    chi.parity(),
                    v.value.agrees_with(&expected, d)
                );
            }
        }
    }
    Ok(())
}
