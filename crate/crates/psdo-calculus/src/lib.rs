//! Dense operator calculus on truncated mode lattices.
//!
//! Symbols a(phi, x, xi) sampled at integer xi are quantized into dense
//! block matrices acting on coefficient space.  The crate provides the
//! composition expansion with exact-by-subtraction remainders, Poisson
//! brackets, weighted symbol norms, structural predicates (real, even,
//! reversible), measured tame constants for majorants, and the 2x2
//! real-pair / complex-pair operator forms with their complexification.

mod block;
mod dense;
mod symbol;
mod tame;
mod two_by_two;

pub use block::{reflection, BlockOperator, OperatorEntry, StructurePredicate};
pub use dense::{
    frobenius, gemm_into, inverse, lu_factor, matmul, matmul3, max_abs, op_norm2, op_norm2_apply,
    CMat, LuFactors, SingularMatrix, C64,
};
pub use symbol::{r_h, MultiplierKind, Symbol};
pub use tame::majorant_tame_constant;
pub use two_by_two::{ComplexPairOp, Operator2x2};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PsdoError {
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
