//! Lift the ordinary 3-stabilisation of 11a to an overconvergent eigensymbol
//! and read off the digits the lift kept.

use std::sync::Arc;

use padic_lfun::lift::{lift_symbol, stabilise_zp, symbol_digits, unit_root};
use padic_lfun::modsym::{HeckeOp, Manin, Newform};

fn main() -> padic_lfun::error::Result<()> {
    let (p, nmom) = (3u64, 10usize);
    let f = Newform::find("11a", 1, 12)?;
    let (alpha, beta) = unit_root(f.a(p).unwrap(), 0, p, nmom as u32)?;
    let to = Arc::new(Manin::new(11 * p));
    let stab = stabilise_zp(&f.phi, &to, p, &alpha, &beta)?;
    let lift = lift_symbol(&stab, &to, p, 0, &alpha, nmom, None)?;
    let good = lift.ledger.remaining();
    println!("moments {nmom}, digits kept {good}");
    println!("Manin relations hold: {}", lift.relations_hold());
    println!(
        "U_{p} eigen to {} digits",
        lift.eigen_digits(HeckeOp::U(p), &alpha)
    );
    println!(
        "specialisation recovers the stabilisation to {} digits",
        symbol_digits(&lift.rho(0)?, &stab, good)
    );
    Ok(())
}
