//! Classical modular symbols over `Q`: spaces, Hecke operators, eigen-symbols,
//! p-stabilisation and twisted period sums.

pub mod coeff;
pub mod eigen;
pub mod manin;
pub mod mat2;
pub mod space;

use serde::{Deserialize, Serialize};

pub use coeff::SymK;
pub use eigen::{ClassicalSymbol, EigenSystem, Newform};
pub use manin::{Action, Manin, Symbol};
pub use mat2::Mat2;
pub use space::SymbolSpace;

/// Hecke operator labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum HeckeOp {
    T(u64),
    U(u64),
    Iota,
}

impl std::fmt::Display for HeckeOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HeckeOp::T(l) => write!(f, "T{l}"),
            HeckeOp::U(l) => write!(f, "U{l}"),
            HeckeOp::Iota => write!(f, "iota"),
        }
    }
}
