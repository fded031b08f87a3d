//! Base change of 11a to Q(i): the ratio of the 5-adic L-function of the base
//! change to the product of the two rational ones is constant.

use padic_lfun::lfun::artin_ratio_test;

fn main() -> padic_lfun::error::Result<()> {
    let rep = artin_ratio_test("11a", -4, 5, 10, &[5, 25])?;
    println!("expected ratio {}", rep.expected);
    for row in rep.rows.iter().filter(|r| r.ratio.is_some()) {
        println!(
            "mod {:>2} #{} j = {}: {} ({} digits)",
            row.modulus,
            row.index,
            row.j,
            row.ratio.as_deref().unwrap_or("-"),
            row.relative_digits
        );
    }
    println!("constant: {}", rep.pass);
    Ok(())
}
