//! The factorisation `L_p(f_F) = L_p(f) L_p(f ⊗ chi_F)` on the cyclotomic
//! line, for the base change of a rational newform to an imaginary
//! quadratic field in which `p` splits. The product side is a convolution of
//! the two Mellin transforms, and the ratio against the interpolated
//! base-change values must not depend on the character.

use serde::Serialize;

use super::{
    interpolation_factor, lift_newform, mellin, twist_classical, twist_ovc, Interpolation, PadicL,
};
use crate::arith::Q;
use crate::error::{Error, Result};
use crate::modsym::eigen::{classical_l_value, ClassicalSymbol};
use crate::modsym::Newform;
use crate::padic::{DirichletCharacter, Embedding, PadicScalar};

#[derive(Clone, Debug, Serialize)]
pub struct ArtinRow {
    pub modulus: u64,
    /// Index among the primitive characters of this modulus.
    pub index: usize,
    pub parity: i64,
    pub j: u32,
    /// `None` when the classical value vanishes or cannot be inverted to
    /// the working precision.
    pub ratio: Option<String>,
    pub digits: i64,
    /// Digits of agreement beyond the valuation of the predicted value.
    pub relative_digits: i64,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArtinReport {
    pub label: String,
    pub p: u64,
    pub disc: i64,
    /// `(-1)^k 2 / (d^{j+1} w)` at `j = 0`.
    pub expected: String,
    pub rows: Vec<ArtinRow>,
    pub pass: bool,
}

/// Units of the ring of integers of `Q(sqrt(disc))`, `disc < 0`.
pub fn unit_count(disc: i64) -> u64 {
    match disc {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

fn combined(label: &str, p: u64) -> Result<(Vec<Newform>, ClassicalSymbol)> {
    let bound = (p + 1).max(8);
    let forms = vec![
        Newform::find(label, 1, bound)?,
        Newform::find(label, -1, bound)?,
    ];
    let (a, b) = (&forms[0].phi, &forms[1].phi);
    let sum = ClassicalSymbol {
        manin: a.manin.clone(),
        k: a.k,
        sign: None,
        symbol: a.symbol.add(&b.symbol),
    };
    Ok((forms, sum))
}

/// Compare the convolution of `L_p(f)` and `L_p(f ⊗ chi_F)` with the
/// interpolated base-change values at every primitive character of the given
/// `p`-power moduli and every critical `j`.
pub fn artin_ratio_test(
    label: &str,
    disc: i64,
    p: u64,
    nmom: usize,
    moduli: &[u64],
) -> Result<ArtinReport> {
    if disc >= 0 {
        return Err(Error::Config(format!(
            "discriminant {disc} is not imaginary quadratic"
        )));
    }
    let psi = DirichletCharacter::kronecker(disc);
    if psi.exp(p as i64) != Some(0) {
        return Err(Error::Config(format!(
            "{p} does not split in Q(sqrt({disc}))"
        )));
    }
    let d = disc.unsigned_abs();
    let w = unit_count(disc);
    let (forms, phi) = combined(label, p)?;
    let phi_g = twist_classical(&phi, &psi)?;
    let k = phi.k;
    let mut depth = 1;
    for &m in moduli {
        let mut x = m;
        let mut r = 0;
        while x % p == 0 {
            x /= p;
            r += 1;
        }
        if x != 1 || r == 0 {
            return Err(Error::Config(format!(
                "modulus {m} is not a positive power of {p}"
            )));
        }
        depth = depth.max(r);
    }
    let count = 2 * k as usize + 4;
    let mut lf: Option<PadicL> = None;
    let mut lg: Option<PadicL> = None;
    let mut alpha = None;
    for f in &forms {
        let ovc = lift_newform(f, p, nmom)?;
        let a = mellin(&ovc, depth, count)?;
        let b = mellin(&twist_ovc(&ovc, &psi)?, depth, count)?;
        lf = Some(match lf {
            None => a,
            Some(x) => x.add(&a)?,
        });
        lg = Some(match lg {
            None => b,
            Some(x) => x.add(&b)?,
        });
        alpha = Some(ovc.alpha.clone());
    }
    let (lf, lg, alpha) = (lf.unwrap(), lg.unwrap(), alpha.unwrap());
    let product = lf.convolve(&lg)?;
    let prec = product.prec;
    let mut rows = Vec::new();
    for &m in moduli {
        let chars: Vec<DirichletCharacter> = DirichletCharacter::all_mod(m)
            .into_iter()
            .filter(|c| c.is_primitive())
            .collect();
        let r = depth.min((m as f64).log(p as f64).round() as u32);
        let emb = Embedding::standard(p, r, prec + 4);
        for (index, chi) in chars.iter().enumerate() {
            for j in 0..=k {
                let value = product.evaluate(chi, j)?;
                let bianchi = interpolation_factor(
                    &alpha,
                    k,
                    chi,
                    j,
                    Interpolation::Bianchi { d, w },
                    prec + 4,
                )?;
                let cf = emb.cyclo(&classical_l_value(&phi, chi, j)?);
                let cg = emb.cyclo(&classical_l_value(&phi_g, chi, j)?);
                let denom = bianchi.mul(&cf).mul(&cg);
                let sign: i64 = if k % 2 == 0 { 1 } else { -1 };
                let expected = PadicScalar::from_q(
                    p,
                    emb.ext(),
                    prec,
                    &Q::new((2 * sign).into(), (d.pow(j + 1) * w).into()),
                );
                // value = expected * denom, compared without inverting denom
                let predicted = expected.mul(&denom);
                let row = if denom.normalise().is_zero_to_precision() {
                    ArtinRow {
                        modulus: m,
                        index,
                        parity: chi.parity(),
                        j,
                        ratio: None,
                        digits: value.digits,
                        relative_digits: 0,
                        // both sides must vanish together
                        agrees: value.vanishes(),
                    }
                } else {
                    let digits = value.digits.min(predicted.abs_prec());
                    let vp = crate::arith::q_to_f64(predicted.valuation().value()).floor() as i64;
                    let ratio = denom
                        .inv()
                        .map(|i| super::truncate(&value.value, value.digits).mul(&i));
                    ArtinRow {
                        modulus: m,
                        index,
                        parity: chi.parity(),
                        j,
                        ratio: ratio.map(|r| r.to_string_short()),
                        digits,
                        relative_digits: digits - vp,
                        agrees: digits - vp >= 1 && value.value.agrees_with(&predicted, digits),
                    }
                };
                rows.push(row);
            }
        }
    }
    let pass = !rows.is_empty()
        && rows.iter().all(|r| r.agrees)
        && rows.iter().any(|r| r.relative_digits > 0);
    let sign: i64 = if k % 2 == 0 { 1 } else { -1 };
    let expected = Q::new((2 * sign).into(), (d * w).into());
    Ok(ArtinReport {
        label: label.to_string(),
        p,
        disc,
        expected: expected.to_string(),
        rows,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_a_over_gaussian_field_at_five() {
        let rep = artin_ratio_test("11a", -4, 5, 10, &[5, 25]).unwrap();
        for r in &rep.rows {
            assert!(r.agrees, "{r:?}");
        }
        assert!(rep.pass);
        assert_eq!(rep.expected, "1/8");
        assert!(
            rep.rows.iter().all(|r| r.relative_digits >= 3),
            "{:?}",
            rep.rows
        );
    }
}
