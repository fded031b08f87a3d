//! Evaluation at {0, oo}, the pairing it induces with the Hecke algebra and
//! the injectivity test on a rank two family and on a planted kernel.

use padic_lfun::arith::q;
use padic_lfun::evalpair::{injectivity_test, run_evalpair};
use padic_lfun::irregular::{planted_family, rational_family};

fn main() -> padic_lfun::error::Result<()> {
    let rep = run_evalpair(3, 8)?;
    for row in &rep.ev {
        println!("Ev({}) nonzero: {}", row.label, row.nonzero);
    }
    println!("stabilised Gram perfect: {}", rep.stabilised.perfect);
    println!(
        "irregular Gram {:?}, perfect: {}",
        rep.irregular.entries, rep.irregular.perfect
    );

    let grid = [q(0), q(1), q(2)];
    for fam in [rational_family(2, &q(1))?, planted_family(2, &q(1))?] {
        let v = injectivity_test(&fam, &grid)?;
        println!(
            "{}: kernel {} of {} unknowns, injective {}",
            v.family, v.kernel_dim, v.unknowns, v.injective
        );
    }
    Ok(())
}
