//! End-to-end acceptance. Each criterion prints one `PASS`/`FAIL` line; the
//! tolerances are the constants below.

use std::sync::Arc;

use padic_lfun::arith::Ring;
use padic_lfun::evalpair::{injectivity_test, run_evalpair};
use padic_lfun::irregular::{planted_family, rational_family, run_lab};
use padic_lfun::lfun::{
    admissibility_profile, artin_ratio_test, interpolation_factor, lift_newform, mellin,
    Interpolation,
};
use padic_lfun::lift::family::centre_layer;
use padic_lfun::lift::{
    family_lift, lift_approximate, lift_symbol, plain_digits, stabilise_zp, symbol_digits,
    unit_root,
};
use padic_lfun::modsym::eigen::{
    classical_l_value, computed_old_up_matrix, hecke_polynomial, parity_sign,
};
use padic_lfun::modsym::{HeckeOp, Manin, Newform, Symbol};
use padic_lfun::padic::{DirichletCharacter, Embedding};

/// Interpolation rows must agree to this many digits.
const INTERPOLATION_DIGITS: i64 = 3;
const INTERPOLATION_ROWS: usize = 4;
/// Digits at the weight next to the centre of the family.
const FAMILY_DIGITS: u32 = 2;
const ARTIN_POINTS: usize = 6;
const ARTIN_DIGITS: i64 = 2;
/// Allowed distance between the measured slope and `v_p(alpha)`.
const ADMISSIBILITY_TOL: f64 = 0.2;

fn line(n: u32, name: &str, pass: bool, detail: String) -> bool {
    println!(
        "criterion {n} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn old_space_charpoly() -> bool {
    let pairs = [
        ("11a", 3u64),
        ("11a", 5),
        ("14a", 5),
        ("19a", 3),
        ("5k2", 3),
    ];
    let mut good = 0;
    for (label, p) in pairs {
        let f = Newform::find(label, 1, 12).unwrap();
        assert!(f.form.level * p <= 150);
        let m = computed_old_up_matrix(&f, p).unwrap();
        if m.charpoly() == hecke_polynomial(f.a(p).unwrap(), f.form.k, p).0 {
            good += 1;
        }
    }
    line(
        1,
        "old-space U_p",
        good >= 3 && good == pairs.len(),
        format!("{good}/{} pairs", pairs.len()),
    )
}

fn irregular_lab() -> bool {
    let rep = run_lab(5, 3).unwrap();
    let passed = rep.checks.iter().filter(|c| c.pass).count();
    line(
        2,
        "irregular lab",
        rep.checks.len() == 12 && passed == 12,
        format!("{passed}/12 at p = 5, k = 3"),
    )
}

fn control() -> bool {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [3u64, 5] {
        let m = 8usize;
        let f = Newform::find("11a", 1, 12).unwrap();
        let (alpha, beta) = unit_root(f.a(p).unwrap(), 0, p, m as u32).unwrap();
        let to = Arc::new(Manin::new(11 * p));
        let stab = stabilise_zp(&f.phi, &to, p, &alpha, &beta).unwrap();
        let a = lift_symbol(&stab, &to, p, 0, &alpha, m, None).unwrap();
        let b = lift_symbol(&stab, &to, p, 0, &alpha, m, Some(11)).unwrap();
        let good = a.ledger.remaining();
        let back = symbol_digits(&a.rho(0).unwrap(), &stab, good);
        let this = a.relations_hold()
            && a.is_eigen(HeckeOp::U(p), &alpha)
            && back >= good
            && a.agrees_with(&b.symbol);
        detail.push(format!("p = {p}: {back}/{good} digits"));
        ok &= this;
    }
    line(3, "control round trip", ok, detail.join(", "))
}

fn interpolation() -> bool {
    let p = 3;
    let (mut verified, mut vanish, mut parities) = (0, true, std::collections::BTreeSet::new());
    for sign in [1i8, -1] {
        let f = Newform::find("11a", sign, 12).unwrap();
        let ovc = lift_newform(&f, p, 12).unwrap();
        let l = mellin(&ovc, 2, 4).unwrap();
        for (m, r) in [(3u64, 1u32), (9, 2)] {
            let emb = Embedding::standard(p, r, 16);
            for chi in DirichletCharacter::all_mod(m)
                .into_iter()
                .filter(|c| c.is_primitive())
            {
                let v = l.evaluate(&chi, 0).unwrap();
                if parity_sign(0, 0, &chi) != sign {
                    vanish &= v.vanishes();
                    continue;
                }
                let e = interpolation_factor(&ovc.alpha, 0, &chi, 0, Interpolation::Rational, 16)
                    .unwrap();
                let expected = e.mul(&emb.cyclo(&classical_l_value(&f.phi, &chi, 0).unwrap()));
                let digits = v.digits.min(expected.abs_prec());
                if digits >= INTERPOLATION_DIGITS && v.value.agrees_with(&expected, digits) {
                    verified += 1;
                    parities.insert(chi.parity());
                }
            }
        }
    }
    line(
        4,
        "interpolation",
        verified >= INTERPOLATION_ROWS && parities.len() == 2 && vanish,
        format!("{verified} rows to {INTERPOLATION_DIGITS} digits, parities {parities:?}, mismatched vanish {vanish}"),
    )
}

fn family() -> bool {
    let f = Newform::find("11a", 1, 30).unwrap();
    let (p, nmom, n) = (7u64, 20usize, 3usize);
    let fam = family_lift(&f, p, nmom, n, Some(5)).unwrap();
    let good = fam.lift.ledger.remaining();
    let alpha0 = fam.alpha().constant_term();
    let single = lift_symbol(&fam.centre, &fam.lift.manin, p, 0, &alpha0, nmom, None).unwrap();
    let centre = symbol_digits(&centre_layer(&fam.lift.symbol), &single.symbol, nmom as u32);
    let kp = p as u32 - 1;
    let spec = fam.specialise(kp).unwrap();
    let classical = Symbol {
        values: spec
            .values
            .iter()
            .map(|v| v[..=kp as usize].to_vec())
            .collect(),
    };
    let indep = lift_approximate(
        &classical,
        &fam.lift.manin,
        p,
        kp,
        &fam.alpha_at(kp).unwrap(),
        nmom,
        nmom + 2,
    )
    .unwrap();
    let near = plain_digits(
        &spec,
        &indep.symbol,
        nmom - good as usize,
        fam.specialisation_digits(),
    );
    line(
        5,
        "family specialisation",
        good > 0 && centre >= good && near >= FAMILY_DIGITS && !fam.alpha().c[1].vanishes(),
        format!(
            "w^0 layer {centre}/{good} digits, weight {} {near} digits",
            kp + 2
        ),
    )
}

fn artin() -> bool {
    let rep = artin_ratio_test("11a", -4, 5, 10, &[5, 25]).unwrap();
    let rows: Vec<_> = rep.rows.iter().filter(|r| r.ratio.is_some()).collect();
    let worst = rows.iter().map(|r| r.relative_digits).min().unwrap_or(0);
    line(
        6,
        "artin ratio",
        rep.pass
            && rows.len() >= ARTIN_POINTS
            && worst >= ARTIN_DIGITS
            && rows.iter().all(|r| r.agrees),
        format!(
            "{} points, ratio {}, worst {worst} digits",
            rows.len(),
            rep.expected
        ),
    )
}

fn evaluation() -> bool {
    let rep = run_evalpair(3, 8).unwrap();
    let nonzero = rep.ev.iter().filter(|r| r.nonzero).count();
    let grid: Vec<_> = (0..3).map(|i| padic_lfun::arith::q(i)).collect();
    let rank2 = injectivity_test(
        &rational_family(2, &padic_lfun::arith::q(1)).unwrap(),
        &grid,
    )
    .unwrap();
    let planted =
        injectivity_test(&planted_family(2, &padic_lfun::arith::q(1)).unwrap(), &grid).unwrap();
    line(
        7,
        "evaluation pairing",
        nonzero >= 2
            && rep.stabilised.rows == 1
            && rep.stabilised.perfect
            && rep.irregular.perfect
            && rank2.injective
            && !planted.injective,
        format!(
            "Ev != 0 for {nonzero} forms, planted kernel {}",
            planted.kernel_dim
        ),
    )
}

fn admissibility() -> bool {
    let f = Newform::find("11a", 1, 12).unwrap();
    let ovc = lift_newform(&f, 3, 12).unwrap();
    let va = ovc.alpha.valuation().unwrap() as f64;
    let l = mellin(&ovc, 3, 2).unwrap();
    let single = admissibility_profile(&l).unwrap();
    let prod = admissibility_profile(&l.convolve(&l).unwrap()).unwrap();
    line(
        8,
        "admissibility",
        (single.h - va).abs() <= ADMISSIBILITY_TOL
            && (prod.h - 2.0 * va).abs() <= ADMISSIBILITY_TOL,
        format!(
            "h = {:.3} and {:.3} against {va} and {}",
            single.h,
            prod.h,
            2.0 * va
        ),
    )
}

#[test]
fn acceptance() {
    let results = [
        old_space_charpoly(),
        irregular_lab(),
        control(),
        interpolation(),
        family(),
        artin(),
        evaluation(),
        admissibility(),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/8");
    assert_eq!(passed, 8);
}
