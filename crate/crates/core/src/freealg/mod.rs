//! The free algebra with involution: letters, words, matricial polynomials
//! and linear pencils.
//!
//! The algebra is kept free. `u_j` and `u_j*` are independent letters tied
//! together only by the involution; any relation between them and the `x`
//! letters lives in the generator sets built by [`crate::lift`].

mod pencil;
mod poly;
mod text;
mod word;

pub use pencil::{LinearPencil, PencilJson};
pub use poly::{MatPoly, NcPoly};
pub use word::{alphabet, words_up_to, Letter, Word};

pub(crate) use text::format_coefficient;
