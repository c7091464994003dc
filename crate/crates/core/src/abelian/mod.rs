//! Finitely generated abelian groups: Smith normal form, quotients, tensors.

mod group;
mod matrix;
mod snf;
mod tensor;

pub use group::{quotient, quotient_rows, FinAbGroup, GroupElement};
pub use matrix::IntMatrix;
pub use snf::{row_lattice_basis, snf, snf_with, Snf};
pub use tensor::{tensor, tensor_cyclic, TensorProduct};
