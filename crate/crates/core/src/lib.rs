//! Arithmetic circuits, algebraic branching programs and determinant /
//! permanent projections, all checked against an exact sparse-polynomial
//! oracle.

pub mod abp;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod eval;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod projection;
pub mod random;
pub mod transforms;
pub mod det;
pub mod families;
pub mod perm;
pub mod pit;

pub use circuit::{Circuit, CircuitBuilder, GateId, Op};
pub use error::{Error, Result};
pub use field::{Field, FieldElement, FieldSpec};
pub use poly::SparsePolynomial;
