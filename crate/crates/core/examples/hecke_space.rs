//! Weight-two symbols at level 11 and 37: dimensions, Hecke matrices and the
//! rational eigensystems they split into.

use padic_lfun::modsym::eigen::rational_eigensystems;
use padic_lfun::modsym::{HeckeOp, SymbolSpace};

fn main() -> padic_lfun::error::Result<()> {
    for level in [11u64, 37] {
        let space = SymbolSpace::build(level, 0, Some(1));
        println!(
            "level {level}: dimension {} (plus quotient of {})",
            space.dim(),
            space.full_dim()
        );
        let t2 = space.hecke_matrix(HeckeOp::T(2))?;
        println!(
            "  T2 charpoly {:?}",
            t2.charpoly()
                .c
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
        );
        for (sys, dim) in rational_eigensystems(&space, &[HeckeOp::T(2), HeckeOp::T(3)])? {
            println!("  {} (multiplicity {dim})", sys.to_json());
        }
    }
    Ok(())
}
