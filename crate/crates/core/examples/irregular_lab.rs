//! Exact checks at a p-irregular point: the double root of the Hecke
//! polynomial, the dual numbers, Gorenstein verdicts and the family.

use padic_lfun::irregular::run_lab;

fn main() -> padic_lfun::error::Result<()> {
    let rep = run_lab(5, 3)?;
    println!("p = {} k = {} alpha = {}", rep.p, rep.k, rep.alpha);
    for c in &rep.checks {
        println!(
            "[{}] {}: {}",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(())
}
