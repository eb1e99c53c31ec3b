//! Exact computations with cellular sheaves on regular cell complexes.

pub mod cli;
pub mod complex;
pub mod enhanced;
pub mod error;
pub mod extension;
pub mod germ;
pub mod io;
pub mod linalg;
pub mod random;
pub mod sheaf;
pub mod suite;

pub use error::{Error, Result};
