use super::*;
use crate::modsym::eigen::classical_l_value;
use crate::modsym::Newform;

fn primitive(m: u64) -> Vec<DirichletCharacter> {
    DirichletCharacter::all_mod(m)
        .into_iter()
        .filter(|c| c.is_primitive())
        .collect()
}

#[test]
fn dirac_at_one_is_the_unit() {
    let d = PadicL::dirac_one(5, 2, 12, 10);
    for m in [1u64, 5, 25] {
        // depth 2 covers conductors up to 25
        for chi in DirichletCharacter::all_mod(m) {
            let v = d.evaluate(&chi, 2).unwrap();
            let one = PadicScalar::one(5, v.value.ext, 12);
            assert!(v.value.agrees_with(&one, v.digits), "chi mod {m}");
            assert!(v.digits >= 8);
        }
    }
}

#[test]
fn local_coordinate_recovers_generator_powers() {
    // for x = omega(b) (1+p)^e on the ball of b: t + p^{s-1} lambda(x) = e
    let p = 5u64;
    let prec = 10;
    for s in [1u32, 2] {
        let ps = p.pow(s);
        for e in [1u64, 3, 12] {
            for a in 1..p {
                let x = teichmuller(p, prec + s, a)
                    .unwrap()
                    .mul(&Zp::new(p, prec + s, 1 + p as i128).pow(e));
                let b = x.value() % ps;
                let (t, lam) = local_coordinate_series(p, s, b, prec, 30);
                let z = x
                    .sub(&Zp::new(p, prec + s, b as i128))
                    .div_p_pow(s)
                    .reduce(prec);
                let mut acc = Zp::zero(p, prec);
                let mut zpow = Zp::one(p, prec);
                for c in &lam {
                    acc = acc.add(&c.mul(&zpow));
                    zpow = zpow.mul(&z);
                }
                let lhs = acc.mul_p_pow(s - 1).add(&Zp::new(p, prec, t as i128));
                assert!(
                    lhs.eq_mod(&Zp::new(p, prec, e as i128), prec - 2),
                    "s = {s}, a = {a}, e = {e}"
                );
            }
        }
    }
}

#[test]
fn convolution_is_commutative_with_the_dirac_as_unit() {
    let f = Newform::find("11a", 1, 8).unwrap();
    let l = mellin(&lift_newform(&f, 3, 12).unwrap(), 2, 8).unwrap();
    let d = PadicL::dirac_one(3, 2, l.prec, 8);
    let ld = l.convolve(&d).unwrap();
    for (x, y) in ld.branches.iter().zip(&l.branches) {
        assert_eq!(x.moments, y.moments);
    }
    let g = l.add(&d).unwrap();
    let lg = l.convolve(&g).unwrap();
    let gl = g.convolve(&l).unwrap();
    assert_eq!(lg, gl);
    // values multiply
    let chi = &primitive(9)[0];
    let (a, b, c) = (
        l.evaluate(chi, 0).unwrap(),
        g.evaluate(chi, 0).unwrap(),
        lg.evaluate(chi, 0).unwrap(),
    );
    let digits = a.digits.min(b.digits).min(c.digits);
    assert!(digits >= 3);
    assert!(a.value.mul(&b.value).agrees_with(&c.value, digits));
}

#[test]
fn interpolation_for_eleven_a_at_three() {
    let p = 3;
    for sign in [1i8, -1] {
        let f = Newform::find("11a", sign, 8).unwrap();
        let ovc = lift_newform(&f, p, 20).unwrap();
        let l = mellin(&ovc, 2, 8).unwrap();
        for m in [3u64, 9] {
            for chi in primitive(m) {
                let v = l.evaluate(&chi, 0).unwrap();
                assert!(v.digits >= 4, "only {} digits mod {m}", v.digits);
                if chi.parity() != sign as i64 {
                    assert!(v.vanishes(), "odd part survives mod {m}");
                    continue;
                }
                let r = if m == 3 { 1 } else { 2 };
                let emb = Embedding::standard(p, r, 24);
                let e = interpolation_factor(&ovc.alpha, 0, &chi, 0, Interpolation::Rational, 24)
                    .unwrap();
                let expected = e.mul(&emb.cyclo(&classical_l_value(&f.phi, &chi, 0).unwrap()));
                let digits = v.digits.min(expected.abs_prec());
                assert!(digits >= 16);
                assert!(
                    v.value.agrees_with(&expected, digits),
                    "sign {sign}, chi mod {m}"
                );
                assert!(!v.vanishes());
            }
        }
    }
}

#[test]
fn trivial_character_carries_two_euler_factors() {
    let p = 5;
    let f = Newform::find("11a", 1, 8).unwrap();
    let ovc = lift_newform(&f, p, 16).unwrap();
    let l = mellin(&ovc, 1, 8).unwrap();
    let chi = DirichletCharacter::trivial(1);
    let v = l.evaluate(&chi, 0).unwrap();
    let e = interpolation_factor(&ovc.alpha, 0, &chi, 0, Interpolation::Rational, 16).unwrap();
    let emb = Embedding::standard(p, 0, 16);
    let expected = e.mul(&emb.cyclo(&classical_l_value(&f.phi, &chi, 0).unwrap()));
    assert!(v.digits >= 8);
    assert!(v
        .value
        .agrees_with(&expected, v.digits.min(expected.abs_prec())));
}

#[test]
fn measures_have_flat_mahler_profile() {
    let f = Newform::find("11a", 1, 8).unwrap();
    let l = mellin(&lift_newform(&f, 3, 16).unwrap(), 3, 2).unwrap();
    let adm = admissibility_profile(&l).unwrap();
    assert!(adm.layers.len() >= 3);
    assert!(adm.h < 0.5, "h = {}", adm.h);
}

#[test]
fn quadratic_twist_of_eleven_a_is_a_symbol() {
    let f = Newform::find("11a", 1, 8).unwrap();
    let psi = DirichletCharacter::kronecker(-4);
    let g = twist_classical(&f.phi, &psi).unwrap();
    assert_eq!(g.level(), 176);
    assert_eq!(g.sign, Some(-1));
    assert!(!g.symbol.is_zero());
}

#[test]
fn interpolation_in_the_critical_strip() {
    // weight 4 at level 5, ordinary at 3; j runs over 0, 1, 2
    let p = 3;
    let f = Newform::find("5k2", 1, 8).unwrap();
    let g = Newform::find("5k2", -1, 8).unwrap();
    let mut checked = 0;
    for form in [&f, &g] {
        let sign = form.phi.sign.unwrap();
        let ovc = lift_newform(form, p, 16).unwrap();
        let l = mellin(&ovc, 2, 10).unwrap();
        for chi in primitive(9) {
            for j in 0..=2u32 {
                let v = l.evaluate(&chi, j).unwrap();
                if crate::modsym::eigen::parity_sign(2, j, &chi) != sign {
                    assert!(v.vanishes(), "j = {j}");
                    continue;
                }
                let e = interpolation_factor(&ovc.alpha, 2, &chi, j, Interpolation::Rational, 16)
                    .unwrap();
                let emb = Embedding::standard(p, 2, 16);
                let expected = e.mul(&emb.cyclo(&classical_l_value(&form.phi, &chi, j).unwrap()));
                let digits = v.digits.min(expected.abs_prec());
                assert!(digits >= 8, "only {digits} digits at j = {j}");
                assert!(
                    v.value.agrees_with(&expected, digits),
                    "sign {sign}, j = {j}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 6);
}
