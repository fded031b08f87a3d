//! 11a over a truncated weight family at p = 7: U_p eigenvalue as a power
//! series in w and specialisation to a neighbouring weight.

use padic_lfun::lift::family::family_lift;
use padic_lfun::modsym::Newform;

fn main() -> padic_lfun::error::Result<()> {
    let f = Newform::find("11a", 1, 30)?;
    let fam = family_lift(&f, 7, 20, 3, Some(5))?;
    println!(
        "truncation order {}, killed with T{}",
        fam.order(),
        fam.kill.ell
    );
    for (i, c) in fam.alpha().c.iter().enumerate() {
        println!("alpha w^{i}: {:?}", c);
    }
    let kp = 6;
    println!(
        "alpha at weight {}: {:?} ({} digits)",
        kp + 2,
        fam.alpha_at(kp)?,
        fam.specialisation_digits()
    );
    Ok(())
}
