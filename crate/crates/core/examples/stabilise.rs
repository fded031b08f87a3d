//! U_p on the p-old space of 11a: its characteristic polynomial is the Hecke
//! polynomial x^2 - a_p x + p.

use padic_lfun::modsym::eigen::{computed_old_up_matrix, hecke_polynomial};
use padic_lfun::modsym::Newform;

fn main() -> padic_lfun::error::Result<()> {
    let f = Newform::find("11a", 1, 12)?;
    for p in [3u64, 5, 7] {
        let a_p = f.a(p).cloned().unwrap_or_default();
        let up = computed_old_up_matrix(&f, p)?;
        let expected = hecke_polynomial(&a_p, f.form.k, p).0;
        println!(
            "p = {p}: a_p = {a_p}, charpoly matches: {}",
            up.charpoly() == expected
        );
    }
    Ok(())
}
