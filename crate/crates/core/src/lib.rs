//! A desk-scale workbench for the finite combinatorics around the
//! Halpern–Läuchli partition property on the binary tree.
//!
//! The crate is organised bottom-up:
//!
//! * [`treecore`]: binary strings, pruned level trees, perfect-subtree
//!   embeddings and level sets.
//! * [`colorings`]: two-colorings of `2^{<D}`, the `H_c(p)` level set and the
//!   explicit coloring constructions (density, pairing, splitting, random).
//! * [`ideals`]: exact finite statistics for the density, summable, interval,
//!   column and antichain-weight ideals.
//! * [`search`]: monochromatic level-set certificates, an exhaustive oracle and
//!   a branch-and-bound solver.
//! * [`game`]: Laflamme's evasion game at a finite horizon.
//! * [`katetov`]: finite-scale checks of Katětov morphisms.
//! * [`text`]: the versioned plain-text file formats.
//!
//! Nothing here decides asymptotic statements; every routine computes a
//! finite statistic or verifies a finite certificate, with exact rational
//! arithmetic where weights are involved.

pub mod colorings;
pub mod error;
pub mod game;
pub mod ideals;
pub mod katetov;
pub mod rng;
pub mod search;
pub mod text;
pub mod treecore;

pub use error::{Error, Result};

/// Formats an exact rational as `p/q`, the wire representation used in all
/// JSON reports.
pub fn frac_string(r: &num_rational::BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
