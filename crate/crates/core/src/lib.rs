//! Positivity certificates for noncommutative rational expressions.
//!
//! The crate is organised bottom-up:
//!
//! * [`freealg`]: letters, words, matricial noncommutative polynomials with
//!   the involution that fixes every `x_i`, and linear matrix pencils.
//! * [`rexpr`]: syntax trees for rational expressions, a parser and a
//!   printer that round-trip, and the structural queries used by the lifts.
//! * [`evalnum`]: evaluation on tuples of Hermitian matrices, domain
//!   membership and sampling, randomized equivalence testing, and samples of
//!   the annihilated variety used by the pencil pipeline.
//! * [`lift`]: replacing inverses by fresh letters, the augmented
//!   Archimedean generator set, and the closure/relation sets.
//! * [`sdp`]: a dense primal-dual interior-point solver for the Gram
//!   feasibility problems.
//! * [`sos`]: Gram formulation, certificate extraction, the symbolic
//!   verifier, and the three certification pipelines.
//! * [`cli`]: the `ncert` command-line front end.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory.

pub mod cli;
pub mod error;
pub mod evalnum;
pub mod freealg;
pub mod lift;
pub mod linalg;
pub mod rexpr;
pub mod sdp;
pub mod sos;

pub use error::{Error, Result};
pub use linalg::C64;
