pub mod abelian;
pub use abelian as abelian_presentations;
pub mod arith;
pub mod cli;
pub mod elliptic;
pub mod error;
pub mod finite_field;
pub mod function_field;
pub mod literal;
pub mod milnor_k;
pub mod poly;
pub mod semiabelian;
pub mod somekawa;

pub use error::{Error, Result};
