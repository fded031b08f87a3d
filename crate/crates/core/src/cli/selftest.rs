//! The acceptance suite as one command. Each criterion runs its command
//! with pinned settings and contributes a single line.

use serde_json::{json, Value};

use super::commands::{
    admissibility, control_round_trip, family_checks, interpolation_table, ARTIN_MIN_DIGITS,
    STABILISE_PAIRS,
};
use super::config::RunConfig;
use super::report::Report;
use crate::error::Result;
use crate::evalpair::run_evalpair;
use crate::irregular::run_lab;
use crate::lfun::artin_ratio_test;
use crate::modsym::eigen::{computed_old_up_matrix, hecke_polynomial};
use crate::modsym::Newform;

fn inner() -> Report {
    Report::new("selftest", Value::Null)
}

/// Fold a sub-report into one line; errors count as failures.
fn fold(out: &mut Report, name: &str, res: Result<Report>) -> Value {
    match res {
        Ok(sub) => {
            let failed: Vec<&str> = sub
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect();
            let detail = if failed.is_empty() {
                format!("{} checks pass", sub.checks.len())
            } else {
                format!("failed: {}", failed.join(", "))
            };
            out.check(name, !sub.checks.is_empty() && failed.is_empty(), detail);
            out.warnings.extend(sub.warnings.iter().cloned());
            json!(sub.checks)
        }
        Err(e) => {
            out.check(name, false, e.to_string());
            Value::Null
        }
    }
}

pub fn old_space() -> Result<Report> {
    let mut r = inner();
    for &(label, p) in STABILISE_PAIRS {
        let f = Newform::find(label, 1, (p + 1).max(12))?;
        let a_p = f.a(p).cloned().unwrap_or_default();
        let ok = computed_old_up_matrix(&f, p)?.charpoly() == hecke_polynomial(&a_p, f.form.k, p).0;
        r.check(
            format!("{label}_p{p}"),
            ok,
            format!("level {}", f.form.level * p),
        );
    }
    Ok(r)
}

pub fn irregular_lab() -> Result<Report> {
    let mut r = inner();
    let lab = run_lab(5, 3)?;
    for c in lab.checks {
        r.check(c.name, c.pass, c.detail);
    }
    Ok(r)
}

pub fn control() -> Result<Report> {
    let mut r = inner();
    for p in [3u64, 5] {
        control_round_trip("11a", 1, p, 8, 7, &mut r)?;
    }
    Ok(r)
}

pub fn interpolation() -> Result<Report> {
    let mut r = inner();
    interpolation_table("11a", 3, 12, &[3, 9], &mut r)?;
    Ok(r)
}

pub fn family() -> Result<Report> {
    let mut r = inner();
    family_checks("11a", 7, 20, 3, 5, &mut r)?;
    Ok(r)
}

pub fn artin() -> Result<Report> {
    let mut r = inner();
    let rep = artin_ratio_test("11a", -4, 5, 10, &[5, 25])?;
    let rows: Vec<_> = rep.rows.iter().filter(|x| x.ratio.is_some()).collect();
    r.check("points", rows.len() >= 6, format!("{} points", rows.len()));
    r.check("constant", rep.pass, format!("ratio {}", rep.expected));
    let worst = rows.iter().map(|x| x.relative_digits).min().unwrap_or(0);
    r.check(
        "digits",
        worst >= ARTIN_MIN_DIGITS,
        format!("worst {worst}"),
    );
    Ok(r)
}

pub fn evaluation() -> Result<Report> {
    let mut r = inner();
    let rep = run_evalpair(3, 8)?;
    r.check(
        "ev_nonzero",
        rep.ev.iter().filter(|x| x.nonzero).count() >= 2,
        "",
    );
    r.check(
        "gram_1x1",
        rep.stabilised.perfect,
        rep.stabilised_ev.clone(),
    );
    r.check("gram_irregular", rep.irregular.perfect, "");
    r.check("injective", rep.injective.injective, "");
    r.check("planted", !rep.planted.injective, "");
    Ok(r)
}

pub fn admissible() -> Result<Report> {
    let mut r = inner();
    admissibility("11a", 3, 12, 3, &mut r)?;
    Ok(r)
}

/// `(name, quick tier, runner)` for every criterion.
pub fn criteria() -> Vec<(&'static str, bool, fn() -> Result<Report>)> {
    vec![
        ("old_space_charpoly", true, old_space),
        ("irregular_lab", true, irregular_lab),
        ("control_round_trip", true, control),
        ("interpolation", false, interpolation),
        ("family_specialisation", false, family),
        ("artin_ratio", false, artin),
        ("evaluation_pairing", true, evaluation),
        ("admissibility", false, admissible),
    ]
}

pub fn selftest(_cfg: &RunConfig, quick: bool, r: &mut Report) -> Result<()> {
    let mut detail = serde_json::Map::new();
    for (name, cheap, run) in criteria() {
        if quick && !cheap {
            continue;
        }
        let checks = fold(r, name, run());
        detail.insert(name.to_string(), checks);
    }
    r.data = json!({ "quick": quick, "criteria": detail });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_tier_passes() {
        let cfg = RunConfig::build(
            Default::default(),
            super::super::commands::Command::Selftest { quick: true }.defaults(),
        )
        .unwrap();
        let mut r = inner();
        selftest(&cfg, true, &mut r).unwrap();
        assert!(r.checks.iter().all(|c| c.pass), "{}", r.summary());
        assert_eq!(r.checks.len(), 4);
    }
}
