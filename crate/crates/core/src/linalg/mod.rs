//! Exact linear algebra over Q and prime fields.

mod cochain;
mod elim;
mod field;
mod matrix;

pub use cochain::{ChainMap, CochainComplex, CohomologyBasis, GradedDims};
pub use elim::{column, kernel_basis, rank, rref, Rref, SpanBasis};
pub use field::{Field, Scalar};
pub use matrix::{Matrix, MatrixBuilder};
