//! p-adic L-functions of modular forms from overconvergent modular symbols,
//! with an exact laboratory for irregular Hecke eigensystems.

pub mod arith;
pub mod cli;
pub mod dist;
pub mod error;
pub mod evalpair;
pub mod irregular;
pub mod lfun;
pub mod lift;
pub mod linalg;
pub mod modsym;
pub mod padic;
