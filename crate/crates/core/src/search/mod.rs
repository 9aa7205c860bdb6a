//! Exact extremal values by branch and bound.
//!
//! `ex` is the maximum number of ones in a host of a given shape that avoids
//! every member of a forbidden family. `lx_k` is the maximum number of
//! distinct letters, each written `k` times inside a single 1-row, whose
//! shadow avoids the family. Since letters are just disjoint `k`-blocks inside
//! 1-rows and deleting ones preserves avoidance, `lx_k` equals the maximum over
//! avoiding shadows of the sum over 1-rows of `floor(ones in the 1-row / k)`;
//! the engine maximizes that objective directly.

mod cache;
mod engine;
mod family;
mod solver;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use cache::{decode_runs, encode_runs, CacheRecord, ProblemKey, ResultCache};
pub use engine::{ex_exact, lx_exact, solve, validate_witness};
pub use family::ForbiddenFamily;
pub use solver::{compute_g, Solver};

use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, Shape};

/// Bumped whenever a change could alter values or witnesses; part of every
/// cache key.
pub const ENGINE_VERSION: &str = "formex-search/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Maximize ones.
    Ex,
    /// Maximize letters of multiplicity `k`.
    Lx { k: usize },
}

impl Mode {
    pub fn lx(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfDomain("lx needs k >= 1".into()));
        }
        Ok(Mode::Lx { k })
    }

    pub fn k(&self) -> usize {
        match self {
            Mode::Ex => 1,
            Mode::Lx { k } => *k,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Ex => f.write_str("ex"),
            Mode::Lx { k } => write!(f, "lx{k}"),
        }
    }
}

/// Mandatory resource limits. Exhausting either one ends the search with a
/// lower bound instead of an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    max_nodes: u64,
    max_seconds: f64,
}

impl SearchBudget {
    pub fn new(max_nodes: u64, max_seconds: f64) -> Result<Self> {
        if max_nodes == 0 || max_seconds.is_nan() || max_seconds <= 0.0 {
            return Err(Error::OutOfDomain("search budgets must be positive".into()));
        }
        Ok(SearchBudget { max_nodes, max_seconds })
    }

    pub fn max_nodes(&self) -> u64 {
        self.max_nodes
    }

    pub fn max_seconds(&self) -> f64 {
        self.max_seconds
    }

    pub(crate) fn max_duration(&self) -> Duration {
        Duration::from_secs_f64(self.max_seconds)
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 200_000_000, max_seconds: 600.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// The pruned search space was exhausted.
    Exact,
    /// A budget ran out; the value is attained by the witness but may not be
    /// maximal.
    LowerBound,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "exact",
            Status::LowerBound => "lower_bound",
        })
    }
}

/// One letter: `k` occurrences inside a single 1-row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterBlock {
    pub letter: usize,
    /// Coordinates of the 1-row (every axis but the first), 1-based.
    pub row: Vec<usize>,
    /// First coordinates of the occurrences, increasing.
    pub times: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterAssignment {
    pub k: usize,
    pub blocks: Vec<LetterBlock>,
}

impl LetterAssignment {
    /// Splits every 1-row of `witness` into consecutive blocks of `k` ones.
    /// Leftover ones (fewer than `k` at the end of a 1-row) get no letter.
    pub fn from_witness(witness: &BitMatrix, k: usize) -> Self {
        let rest = witness.shape().drop_first();
        let mut coord = vec![0; rest.as_ref().map_or(0, Shape::dims)];
        let mut blocks = Vec::new();
        for (row_index, times) in witness.first_axis_lines().into_iter().enumerate() {
            if let Some(rest) = &rest {
                rest.unflatten(row_index, &mut coord);
            }
            for chunk in times.chunks_exact(k) {
                blocks.push(LetterBlock { letter: blocks.len() + 1, row: coord.clone(), times: chunk.to_vec() });
            }
        }
        LetterAssignment { k, blocks }
    }

    pub fn letters(&self) -> usize {
        self.blocks.len()
    }

    /// The 0-1 matrix with a one at every occurrence of every letter.
    pub fn shadow(&self, shape: &Shape) -> BitMatrix {
        let mut m = BitMatrix::zeros(shape.clone());
        let mut coord = vec![0; shape.dims()];
        for block in &self.blocks {
            coord[1..].copy_from_slice(&block.row);
            for &t in &block.times {
                coord[0] = t;
                m.set(&coord, true);
            }
        }
        m
    }

    /// Every letter has exactly `k` distinct occurrences and no cell is shared.
    pub fn is_consistent(&self, shape: &Shape) -> bool {
        let total: usize = self.blocks.iter().map(|b| b.times.len()).sum();
        self.blocks.iter().all(|b| b.times.len() == self.k && b.times.windows(2).all(|w| w[0] < w[1]))
            && self.shadow(shape).count_ones() == total
    }
}

/// Outcome of an exact search.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalResult {
    pub mode: Mode,
    pub value: u64,
    pub status: Status,
    pub witness: BitMatrix,
    /// Present for `lx` searches.
    pub letters: Option<LetterAssignment>,
    pub nodes_explored: u64,
    pub elapsed_seconds: f64,
}

impl ExtremalResult {
    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }
}
