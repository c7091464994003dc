//! Finite fields `F_{p^m}` presented directly over the prime field, with
//! embeddings, norms and a compatible tower per characteristic.

mod embed;
mod field;
mod tower;

pub use embed::{embed, lex_min, norm, trace, Embedding};

pub use field::{ArithOp, FFElement, FieldExtension, Operand, FIELD_ORDER_CAP};
pub use tower::Tower;

/// Parse-free constructor mirroring `GF(p^m; f)`.
pub fn make_extension(p: u64, f: &[u32]) -> crate::Result<FieldExtension> {
    FieldExtension::new(p, f)
}
