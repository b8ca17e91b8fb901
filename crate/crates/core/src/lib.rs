//! Exact verification and symmetry analysis of a rank-18 Waring decomposition
//! of the symmetrized 3x3 matrix multiplication tensor. The `numsearch` module
//! adds a floating-point search for such decompositions at small `n`.

#![allow(clippy::needless_range_loop)]

pub mod affine;
pub mod decomposition;
pub mod error;
pub mod hesse;
pub mod matrix;
pub mod numsearch;
pub mod qfield;
pub mod symmetry;
pub mod symtensor;

pub use decomposition::{verify_waring, WaringDecomposition};
pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use qfield::{FieldElem, Rational, Tau};
pub use symmetry::{ProjectiveMatrix, SymOp};
pub use symtensor::{CubicForm, LinearMap, Monomial};
