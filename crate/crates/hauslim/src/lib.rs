//! Desk-scale topology of Hausdorff limits of one-parameter families.
//!
//! Given a family of compact sets `X_l` (cut out of a box by a
//! quantifier-free sign condition on polynomials in `x1..xN` and a
//! parameter `l`), the library samples fibers as point clouds, builds
//! expanded diagonals of tuple clouds, estimates Betti numbers through
//! Vietoris–Rips homology over Z/2 with plateau-based scale selection,
//! and checks the limit inequality
//!
//! ```text
//! b_k(limit) <= sum over p+q=k of b_q(diagonal_p(delta))
//! ```
//!
//! against the sampled data. A companion simplicial toolkit realizes the
//! piecewise-linear retraction machinery behind the inequality exactly on
//! triangulated inputs, and a bounds module evaluates the effective
//! complexity-bound formulas in exact integer arithmetic.
//!
//! Start with the runnable examples (`cargo run --example ...`); the
//! `hauslim` binary exposes the same pipelines as subcommands.

pub mod bounds;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod geometry;
pub mod homology;
pub mod io;
pub mod pipeline;
pub mod simplicial;

pub use error::{Error, Result};
