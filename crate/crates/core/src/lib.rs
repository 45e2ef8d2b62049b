pub mod arith;
pub mod certify;
pub mod cli_io;
pub mod curves;
pub mod error;
pub mod frobenius;
pub mod local_invariants;
pub mod lseries;
pub mod tables;
pub mod torsion_galois;

pub use error::{Error, Result};
