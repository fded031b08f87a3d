use std::sync::Arc;

use serde_json::{json, Value};

use super::cache::HeckeCache;
use super::config::{parse_op, Defaults, Overrides, RunConfig};
use super::report::Report;
use crate::arith::{Ring, Q};
use crate::error::{Error, Result};
use crate::evalpair::run_evalpair;
use crate::irregular::run_lab;
use crate::lfun::{
    admissibility_profile, artin_ratio_test, interpolation_factor, lift_newform, mellin,
    Interpolation, LValue,
};
use crate::lift::family::centre_layer;
use crate::lift::{
    family_lift, lift_approximate, lift_symbol, plain_digits, stabilise_zp, symbol_digits,
    unit_root, OvcSymbol,
};
use crate::modsym::eigen::{
    classical_l_value, computed_old_up_matrix, hecke_polynomial, parity_sign,
    rational_eigensystems, KNOWN_FORMS,
};
use crate::modsym::space::is_prime;
use crate::modsym::{HeckeOp, Manin, Newform, Symbol, SymbolSpace};
use crate::padic::{DirichletCharacter, Embedding};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Space,
    Hecke,
    Stabilise,
    Lift,
    Lfun,
    Artin,
    Family,
    IrregularLab,
    Evalpair,
    Selftest { quick: bool },
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Space => "space",
            Command::Hecke => "hecke",
            Command::Stabilise => "stabilise",
            Command::Lift => "lift",
            Command::Lfun => "lfun",
            Command::Artin => "artin",
            Command::Family => "family",
            Command::IrregularLab => "irregular-lab",
            Command::Evalpair => "evalpair",
            Command::Selftest { .. } => "selftest",
        }
    }

    pub fn defaults(self) -> Defaults {
        match self {
            Command::Artin => Defaults {
                p: 5,
                k: 0,
                prec: 10,
            },
            Command::Family => Defaults {
                p: 7,
                k: 0,
                prec: 20,
            },
            Command::IrregularLab => Defaults {
                p: 5,
                k: 3,
                prec: 8,
            },
            _ => Defaults {
                p: 3,
                k: 0,
                prec: 8,
            },
        }
    }
}

/// Resolve the configuration, run the command on a pool of the configured
/// size, and fold any error into the report.
pub fn run(cmd: Command, overrides: Overrides) -> Report {
    let raw = serde_json::to_value(&overrides).unwrap_or(Value::Null);
    let cfg = match RunConfig::build(overrides, cmd.defaults()) {
        Ok(c) => c,
        Err(e) => return Report::from_error(cmd.name(), raw, &e),
    };
    let config = serde_json::to_value(&cfg).unwrap_or(Value::Null);
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            return Report::from_error(
                cmd.name(),
                config,
                &Error::Config(format!("thread pool: {e}")),
            )
        }
    };
    match pool.install(|| execute(cmd, &cfg)) {
        Ok(mut r) => {
            r.config = config;
            r.finish()
        }
        Err(e) => Report::from_error(cmd.name(), config, &e),
    }
}

pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::new(cmd.name(), Value::Null);
    match cmd {
        Command::Space => space(cfg, &mut r)?,
        Command::Hecke => hecke(cfg, &mut r)?,
        Command::Stabilise => stabilise(cfg, &mut r)?,
        Command::Lift => lift(cfg, &mut r)?,
        Command::Lfun => lfun(cfg, &mut r)?,
        Command::Artin => artin(cfg, &mut r)?,
        Command::Family => family(cfg, &mut r)?,
        Command::IrregularLab => irregular(cfg, &mut r)?,
        Command::Evalpair => evalpair(cfg, &mut r)?,
        Command::Selftest { quick } => super::selftest::selftest(cfg, quick, &mut r)?,
    }
    Ok(r)
}

fn q_str(x: &Q) -> String {
    x.to_string()
}

fn matrix_json(m: &crate::linalg::Matrix<Q>) -> Value {
    json!((0..m.rows)
        .map(|i| m.row(i).iter().map(q_str).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

/// The first few primes not dividing `n`.
fn good_primes(n: u64, count: usize) -> Vec<u64> {
    (2..)
        .filter(|&l| is_prime(l) && n % l != 0)
        .take(count)
        .collect()
}

/// `--label`, else the first known form of the given level and weight,
/// else `11a`.
fn form_label(cfg: &RunConfig, level: Option<u64>) -> Result<String> {
    if let Some(l) = &cfg.label {
        return Ok(l.clone());
    }
    match level {
        Some(m) => KNOWN_FORMS
            .iter()
            .find(|f| f.level == m && f.k == cfg.k)
            .map(|f| f.label.to_string())
            .ok_or_else(|| {
                Error::Config(format!(
                    "no known form of level {m} and k = {}; pass --label",
                    cfg.k
                ))
            }),
        None => Ok("11a".into()),
    }
}

fn find_form(label: &str, sign: i8, p: u64) -> Result<Newform> {
    Newform::find(label, sign, (p + 1).max(12))
}

fn space(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let n = cfg.space_level()?;
    let space = SymbolSpace::build(n, cfg.k, Some(cfg.sign));
    let cache = HeckeCache::new(&cfg.cache_dir);
    let ls = good_primes(n, 2);
    let ops: Vec<HeckeOp> = ls.iter().map(|&l| HeckeOp::T(l)).collect();
    let (a, _) = cache.hecke_matrix(&space, ops[0])?;
    let (b, _) = cache.hecke_matrix(&space, ops[1])?;
    r.check(
        "hecke_operators_commute",
        a.mul(&b) == b.mul(&a),
        format!("{} and {}", ops[0], ops[1]),
    );
    let systems = rational_eigensystems(&space, &ops)?;
    r.data = json!({
        "level": n,
        "k": cfg.k,
        "sign": cfg.sign,
        "dim": space.dim(),
        "full_dim": space.full_dim(),
        "rational_eigensystems": systems.iter().map(|(s, d)| json!({"eigenvalues": s.to_json(), "dim": d})).collect::<Vec<_>>(),
    });
    Ok(())
}

fn hecke(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let n = cfg.space_level()?;
    let space = SymbolSpace::build(n, cfg.k, Some(cfg.sign));
    let good = good_primes(n, 2);
    let op = match &cfg.op {
        Some(s) => parse_op(s)?,
        None => HeckeOp::T(good[0]),
    };
    let cache = HeckeCache::new(&cfg.cache_dir);
    let (m, source) = cache.hecke_matrix(&space, op)?;
    let other = HeckeOp::T(if op == HeckeOp::T(good[0]) {
        good[1]
    } else {
        good[0]
    });
    let (o, _) = cache.hecke_matrix(&space, other)?;
    r.check(
        format!("commutes_with_{other}"),
        m.mul(&o) == o.mul(&m),
        format!("{op} against {other}"),
    );
    let charpoly = if m.rows > 0 {
        m.charpoly().c.iter().map(q_str).collect()
    } else {
        vec!["1".to_string()]
    };
    r.data = json!({
        "level": n,
        "k": cfg.k,
        "sign": cfg.sign,
        "op": op.to_string(),
        "source": source,
        "matrix": matrix_json(&m),
        "charpoly": charpoly,
    });
    Ok(())
}

/// Pairs `(label, p)` checked by `stabilise` when no form is named; all of
/// level at most 150.
pub const STABILISE_PAIRS: &[(&str, u64)] =
    &[("11a", 3), ("11a", 5), ("14a", 5), ("19a", 3), ("5k2", 3)];

fn stabilise(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let pairs: Vec<(String, u64)> = match &cfg.label {
        Some(l) => vec![(l.clone(), cfg.p)],
        None => STABILISE_PAIRS
            .iter()
            .map(|&(l, p)| (l.to_string(), p))
            .collect(),
    };
    let mut rows = Vec::new();
    for (label, p) in pairs {
        let f = find_form(&label, cfg.sign, p)?;
        if f.form.level % p == 0 {
            return Err(Error::Config(format!(
                "p = {p} divides the level of {label}"
            )));
        }
        let a_p = f
            .a(p)
            .ok_or_else(|| Error::Config(format!("no a_{p} for {label}")))?
            .clone();
        let m = computed_old_up_matrix(&f, p)?;
        let (expected, irregular) = hecke_polynomial(&a_p, f.form.k, p);
        let got = m.charpoly();
        let ok = got == expected;
        r.check(
            format!("old_space_{label}_p{p}"),
            ok,
            format!(
                "level {}: charpoly of U_{p} is X^2 - a_p X + p^(k+1) with a_p = {a_p}: {ok}",
                f.form.level * p
            ),
        );
        rows.push(json!({
            "label": label,
            "p": p,
            "level": f.form.level * p,
            "a_p": q_str(&a_p),
            "irregular": irregular,
            "up_matrix": matrix_json(&m),
            "charpoly": got.c.iter().map(q_str).collect::<Vec<_>>(),
        }));
    }
    r.data = json!({ "pairs": rows });
    Ok(())
}

/// The ordinary stabilisation of `label` at `p`, lifted twice with
/// independent free moments.
pub fn control_round_trip(
    label: &str,
    sign: i8,
    p: u64,
    nmom: usize,
    seed: u64,
    r: &mut Report,
) -> Result<Value> {
    let f = find_form(label, sign, p)?;
    let k = f.form.k;
    let a_p = f
        .a(p)
        .ok_or_else(|| Error::Config(format!("no a_{p} for {label}")))?;
    let (alpha, beta) = unit_root(a_p, k, p, nmom as u32)?;
    let to = Arc::new(Manin::new(f.form.level * p));
    let stab = stabilise_zp(&f.phi, &to, p, &alpha, &beta)?;
    let one = lift_symbol(&stab, &to, p, k, &alpha, nmom, None)?;
    let two = lift_symbol(&stab, &to, p, k, &alpha, nmom, Some(seed))?;
    let good = one.ledger.remaining();
    if good == 0 {
        return Err(Error::Precision(format!(
            "the lift of {label} at {p} kept no digits"
        )));
    }
    if good < nmom as u32 {
        r.warnings.push(format!(
            "lift of {label} at {p} keeps {good} of {nmom} digits"
        ));
    }
    let tag = format!("{label}_p{p}");
    r.check(
        format!("relations_{tag}"),
        one.relations_hold() && two.relations_hold(),
        "both lifts satisfy the Manin relations",
    );
    r.check(
        format!("eigen_{tag}"),
        one.is_eigen(HeckeOp::U(p), &one.alpha),
        format!(
            "U_{p} eigen to {} digits",
            one.eigen_digits(HeckeOp::U(p), &one.alpha)
        ),
    );
    let rho = one.rho(k)?;
    let back = symbol_digits(&rho, &stab.map(|x| x.reduce(good)), good);
    r.check(
        format!("control_{tag}"),
        back >= good,
        format!("specialisation returns the stabilised symbol to {back} of {good} digits"),
    );
    r.check(
        format!("lifts_agree_{tag}"),
        one.agrees_with(&two.symbol),
        format!("seeds none and {seed}"),
    );
    Ok(json!({
        "label": label,
        "p": p,
        "nmom": nmom,
        "alpha": alpha.value().to_string(),
        "digits": good,
        "ledger": one.ledger,
    }))
}

fn lift(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let label = form_label(cfg, cfg.tame_level()?)?;
    let v = control_round_trip(&label, cfg.sign, cfg.p, cfg.prec as usize, cfg.seed, r)?;
    r.data = v;
    Ok(())
}

fn exponent(m: u64, p: u64) -> u32 {
    let (mut x, mut r) = (m, 0);
    while x % p == 0 {
        x /= p;
        r += 1;
    }
    r
}

/// Minimum digits for an interpolation row to count as verified.
pub const LFUN_MIN_DIGITS: i64 = 3;

/// Interpolation table for `label` at `p`: every primitive character of the
/// given moduli, every critical `j`, both signs.
pub fn interpolation_table(
    label: &str,
    p: u64,
    nmom: usize,
    moduli: &[u64],
    r: &mut Report,
) -> Result<Value> {
    let depth = moduli.iter().map(|&m| exponent(m, p)).max().unwrap_or(1);
    let mut rows = Vec::new();
    let (mut verified, mut vanish_ok, mut disagree, mut verifiable) =
        (0usize, true, 0usize, 0usize);
    let mut thin = 0usize;
    for sign in [1i8, -1] {
        let f = find_form(label, sign, p)?;
        let k = f.form.k;
        let ovc = lift_newform(&f, p, nmom)?;
        let l = mellin(&ovc, depth, 2 * k as usize + 4)?;
        let wprec = nmom as u32 + 4;
        for &m in moduli {
            let emb = Embedding::standard(p, exponent(m, p), wprec);
            let chars: Vec<DirichletCharacter> = DirichletCharacter::all_mod(m)
                .into_iter()
                .filter(|c| c.is_primitive())
                .collect();
            for (index, chi) in chars.iter().enumerate() {
                for j in 0..=k {
                    let v: LValue = l.evaluate(chi, j)?;
                    if parity_sign(k, j, chi) != sign {
                        let ok = v.vanishes();
                        vanish_ok &= ok;
                        rows.push(json!({
                            "sign": sign, "modulus": m, "index": index, "parity": chi.parity(), "j": j,
                            "value": v.to_json(), "kind": "vanishing", "verified": ok,
                        }));
                        continue;
                    }
                    let e = interpolation_factor(
                        &ovc.alpha,
                        k,
                        chi,
                        j,
                        Interpolation::Rational,
                        wprec,
                    )?;
                    let expected = e.mul(&emb.cyclo(&classical_l_value(&f.phi, chi, j)?));
                    let digits = v.digits.min(expected.abs_prec());
                    if digits >= LFUN_MIN_DIGITS {
                        verifiable += 1;
                    } else {
                        thin += 1;
                    }
                    let agrees = v.value.agrees_with(&expected, digits);
                    if !agrees {
                        disagree += 1;
                    }
                    let ok = agrees && digits >= LFUN_MIN_DIGITS;
                    verified += usize::from(ok);
                    rows.push(json!({
                        "sign": sign, "modulus": m, "index": index, "parity": chi.parity(), "j": j,
                        "value": v.to_json(), "expected": expected.to_string_short(),
                        "digits": digits, "kind": "interpolation", "verified": ok,
                    }));
                }
            }
        }
    }
    if thin > 0 {
        r.warnings.push(format!(
            "{thin} interpolation rows kept fewer than {LFUN_MIN_DIGITS} digits"
        ));
    }
    // too few digits to decide is not a failed check
    if disagree == 0 && verifiable < 4 {
        return Err(Error::Precision(format!(
            "only {verifiable} rows keep {LFUN_MIN_DIGITS} digits at {nmom} moments; raise --prec"
        )));
    }
    r.check(
        "verified_rows",
        verified >= 4,
        format!(
            "{verified} rows agree with the classical values to at least {LFUN_MIN_DIGITS} digits"
        ),
    );
    r.check(
        "no_disagreement",
        disagree == 0,
        format!("{disagree} rows disagree at their available digits"),
    );
    r.check(
        "mismatched_parity_vanishes",
        vanish_ok,
        "values at characters of the other parity vanish",
    );
    Ok(json!({ "label": label, "p": p, "depth": depth, "moduli": moduli, "rows": rows }))
}

fn lfun(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let label = form_label(cfg, cfg.tame_level()?)?;
    r.data = interpolation_table(&label, cfg.p, cfg.prec as usize, &cfg.moduli, r)?;
    Ok(())
}

/// Minimum relative digits for an Artin row.
pub const ARTIN_MIN_DIGITS: i64 = 2;

fn artin(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let label = cfg.label.clone().unwrap_or_else(|| "11a".into());
    let rep = artin_ratio_test(&label, cfg.disc, cfg.p, cfg.prec as usize, &cfg.moduli)?;
    let informative = rep.rows.iter().filter(|x| x.ratio.is_some()).count();
    r.check(
        "ratio_constant",
        rep.pass,
        format!(
            "every row matches {} times the interpolated values",
            rep.expected
        ),
    );
    r.check(
        "enough_points",
        informative >= 6,
        format!("{informative} characters and twists with a nonzero value"),
    );
    let worst = rep
        .rows
        .iter()
        .filter(|x| x.ratio.is_some())
        .map(|x| x.relative_digits)
        .min()
        .unwrap_or(0);
    r.check(
        "digits",
        worst >= ARTIN_MIN_DIGITS,
        format!("worst row agrees to {worst} relative digits"),
    );
    r.data = serde_json::to_value(&rep)?;
    Ok(())
}

/// `w^0` layer against the single-weight lift, and weight `p + 1` against an
/// independent lift of the specialised classical part.
pub fn family_checks(
    label: &str,
    p: u64,
    nmom: usize,
    n: usize,
    seed: u64,
    r: &mut Report,
) -> Result<Value> {
    let f = find_form(label, 1, p.max(29))?;
    let k = f.form.k;
    let fam = family_lift(&f, p, nmom, n, Some(seed))?;
    let good = fam.lift.ledger.remaining();
    if good == 0 {
        return Err(Error::Precision("the family lift kept no digits".into()));
    }
    r.check(
        "relations",
        fam.lift.relations_hold(),
        "family symbol satisfies the Manin relations",
    );
    r.check(
        "eigen",
        fam.lift.is_eigen(HeckeOp::U(p), fam.alpha()),
        format!("U_{p} eigen over the family"),
    );
    let alpha0 = fam.alpha().constant_term();
    let single = lift_symbol(&fam.centre, &fam.lift.manin, p, k, &alpha0, nmom, None)?;
    let centre: Symbol<_> = centre_layer(&fam.lift.symbol);
    let c = symbol_digits(&centre, &single.symbol, nmom as u32);
    r.check(
        "centre_layer",
        c >= good,
        format!("w^0 layer equals the single-weight lift to {c} of {good} digits"),
    );
    let kp = k + (p as u32 - 1);
    let digits = fam.specialisation_digits();
    let spec = fam.specialise(kp)?;
    let alpha = fam.alpha_at(kp)?;
    let classical = Symbol {
        values: spec
            .values
            .iter()
            .map(|v| v[..=kp as usize].to_vec())
            .collect(),
    };
    let indep: OvcSymbol<_> =
        lift_approximate(&classical, &fam.lift.manin, p, kp, &alpha, nmom, nmom + 2)?;
    let got = plain_digits(&spec, &indep.symbol, nmom - good as usize, digits);
    r.check(
        "neighbouring_weight",
        got >= 2,
        format!("weight {} agrees to {got} of {digits} digits", kp + 2),
    );
    r.check(
        "alpha_varies",
        !fam.alpha().c[1].vanishes(),
        "alpha(w) has a nonzero linear term",
    );
    Ok(json!({
        "label": label, "p": p, "nmom": nmom, "n": n, "digits": good,
        "specialisation_digits": digits, "neighbour_weight": kp + 2, "ledger": fam.lift.ledger,
    }))
}

fn family(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let label = cfg.label.clone().unwrap_or_else(|| "11a".into());
    r.data = family_checks(&label, cfg.p, cfg.prec as usize, cfg.n, cfg.seed, r)?;
    Ok(())
}

fn irregular(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let rep = run_lab(cfg.p, cfg.k)?;
    for c in &rep.checks {
        r.check(c.name.clone(), c.pass, c.detail.clone());
    }
    r.data = json!({ "p": rep.p, "k": rep.k, "alpha": rep.alpha });
    Ok(())
}

fn evalpair(cfg: &RunConfig, r: &mut Report) -> Result<()> {
    let rep = run_evalpair(cfg.p, cfg.prec as usize)?;
    let nonzero = rep.ev.iter().filter(|x| x.nonzero).count();
    r.check(
        "ev_nonzero",
        nonzero >= 2,
        format!("{nonzero} rank-zero forms with Ev != 0"),
    );
    r.check(
        "ev_vanishes_rank_one",
        rep.vanishing.iter().all(|x| !x.nonzero),
        "Ev of 37a is zero",
    );
    r.check(
        "stabilised_gram",
        rep.stabilised.perfect,
        format!("1x1 gram {}", rep.stabilised_ev),
    );
    r.check(
        "ev_matches_mellin",
        rep.mellin_consistent,
        "unit balls plus alpha^-1 Ev",
    );
    r.check(
        "irregular_gram",
        rep.irregular.perfect,
        format!(
            "{}x{} rank {}",
            rep.irregular.rows, rep.irregular.cols, rep.irregular.rank
        ),
    );
    r.check(
        "injective",
        rep.injective.injective,
        format!(
            "kernel {} on grid {:?}",
            rep.injective.kernel_dim, rep.injective.grid
        ),
    );
    r.check(
        "planted_detected",
        !rep.planted.injective,
        format!("kernel {}", rep.planted.kernel_dim),
    );
    r.check("adjunction", rep.adjunction, "<T1 T2, v> = <T1, T2 v>");
    r.data = serde_json::to_value(&rep)?;
    Ok(())
}

/// Admissibility slope of the single measure and of a convolution square.
pub fn admissibility(
    label: &str,
    p: u64,
    nmom: usize,
    depth: u32,
    r: &mut Report,
) -> Result<Value> {
    let f = find_form(label, 1, p)?;
    let ovc = lift_newform(&f, p, nmom)?;
    let va = ovc.alpha.valuation().unwrap_or(0) as f64;
    let l = mellin(&ovc, depth, 2)?;
    let single = admissibility_profile(&l)?;
    let prod = admissibility_profile(&l.convolve(&l)?)?;
    r.check(
        "single",
        (single.h - va).abs() <= 0.2,
        format!("h = {:.3} against v_p(alpha) = {va}", single.h),
    );
    r.check(
        "product",
        (prod.h - 2.0 * va).abs() <= 0.2,
        format!("h = {:.3} against 2 v_p(alpha) = {}", prod.h, 2.0 * va),
    );
    Ok(json!({ "single": single, "product": prod, "v_alpha": va }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::report::Status;

    #[test]
    fn irregular_lab_reports_twelve_passes() {
        let r = run(
            Command::IrregularLab,
            Overrides {
                p: Some(5),
                k: Some(3),
                ..Overrides::default()
            },
        );
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.checks.len(), 12);
    }

    #[test]
    fn lfun_at_level_thirty_three() {
        let r = run(
            Command::Lfun,
            Overrides {
                level: Some(33),
                p: Some(3),
                k: Some(0),
                prec: Some(8),
                ..Overrides::default()
            },
        );
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
    }

    #[test]
    fn bad_level_is_a_config_error() {
        let r = run(
            Command::Lfun,
            Overrides {
                level: Some(34),
                p: Some(3),
                ..Overrides::default()
            },
        );
        assert_eq!(r.status.exit_code(), 2);
        let r = run(
            Command::Lfun,
            Overrides {
                level: Some(33),
                p: Some(3),
                k: Some(1),
                ..Overrides::default()
            },
        );
        assert_eq!(r.status.exit_code(), 2);
    }

    #[test]
    fn reports_are_deterministic() {
        let o = Overrides {
            label: Some("11a".into()),
            p: Some(3),
            prec: Some(6),
            ..Overrides::default()
        };
        let a = serde_json::to_string(&run(Command::Lift, o.clone())).unwrap();
        let b = serde_json::to_string(&run(Command::Lift, o)).unwrap();
        assert_eq!(a, b);
    }
}
