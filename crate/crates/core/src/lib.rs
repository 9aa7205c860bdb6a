//! Exact computation and verification for extremal functions of forbidden
//! multidimensional 0-1 matrix patterns and (P, s)-formations.
//!
//! * [`matrix`]: patterns, dense hosts, containment and structural operations.
//! * [`formations`]: detection of (P, s)-formations and doubled (r, s)-formations.
//! * [`recurrences`]: the R/D recurrence tables, the Ackermann hierarchy and
//!   its inverses, and the binomial factor of the formation bound.
//! * [`search`]: branch-and-bound computation of `ex` and `lx_k`, with a
//!   persistent result cache.
//! * [`verify`]: sweeps of the exact inequalities over parameter grids.
//! * [`io`]: the line-oriented pattern and matrix file formats.

pub mod error;
pub mod formations;
pub mod io;
pub mod matrix;
pub mod recurrences;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{contains, find_occurrence, BitMatrix, Occurrence, Pattern, Shape};
