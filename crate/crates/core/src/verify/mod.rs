//! Grid sweeps of the exact inequalities relating `ex`, `lx`, the binomial
//! bound and the recurrences.
//!
//! Every check pairs exact search values with closed-form evaluators and
//! compares the two sides as exact rationals. A side that depends on a search
//! which ran out of budget, or on a host larger than
//! [`VerifyConfig::max_axis`], makes the row inconclusive. Rows come out in
//! grid order regardless of the parallelism width, and reports carry no
//! timings, so repeated runs serialize identically.

mod checks;
mod report;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Shape;
use crate::search::{ForbiddenFamily, Mode, SearchBudget, Solver};

pub use checks::{affine_g, PartitionTuple};
pub use report::{parse_rational, BoundReport, Outcome, Param, ReportRow, Verdict};

/// Largest first-axis length the formation searches accept.
pub const MAX_AXIS_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub budget: SearchBudget,
    /// Hosts with any axis longer than this are reported inconclusive.
    pub max_axis: usize,
    /// Worker threads; zero picks the machine default.
    pub width: usize,
    pub seed: u64,
    /// Random stretched members per host in the light-pattern check.
    pub light_trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { budget: SearchBudget::default(), max_axis: 8, width: 0, seed: 0x5eed, light_trials: 64 }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_axis == 0 || self.max_axis > MAX_AXIS_LIMIT {
            return Err(Error::OutOfDomain(format!("max_axis must be in 1..={MAX_AXIS_LIMIT}")));
        }
        Ok(())
    }
}

/// Parameter ranges of a sweep. Each check reads the axes it needs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grid {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub k: Vec<usize>,
    pub s: Vec<usize>,
}

impl Grid {
    pub fn new() -> Self {
        Grid::default()
    }

    pub fn n(mut self, values: impl IntoIterator<Item = usize>) -> Self {
        self.n = values.into_iter().collect();
        self
    }

    pub fn m(mut self, values: impl IntoIterator<Item = usize>) -> Self {
        self.m = values.into_iter().collect();
        self
    }

    pub fn k(mut self, values: impl IntoIterator<Item = usize>) -> Self {
        self.k = values.into_iter().collect();
        self
    }

    pub fn s(mut self, values: impl IntoIterator<Item = usize>) -> Self {
        self.s = values.into_iter().collect();
        self
    }
}

/// Parses `"3"`, `"1..4"` (inclusive) or `"1,2,5"` into a sorted value list.
pub fn parse_values(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse { line: 0, msg: format!("not a value list: {text:?}") };
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let mut values = match text.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(bad());
            }
            (lo..=hi).collect()
        }
        None => text.split(',').map(num).collect::<Result<Vec<_>>>()?,
    };
    values.sort_unstable();
    values.dedup();
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundId {
    Relate,
    Lemma2,
    Binomial,
    Rec1,
    Rec2,
    Fp3,
    Light,
}

impl BoundId {
    pub const ALL: [BoundId; 7] =
        [BoundId::Relate, BoundId::Lemma2, BoundId::Binomial, BoundId::Rec1, BoundId::Rec2, BoundId::Fp3, BoundId::Light];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundId::Relate => "relate",
            BoundId::Lemma2 => "lemma2",
            BoundId::Binomial => "binomial",
            BoundId::Rec1 => "rec1",
            BoundId::Rec2 => "rec2",
            BoundId::Fp3 => "fp3",
            BoundId::Light => "light",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::OutOfDomain(format!("unknown bound id {s:?}")))
    }
}

/// Runs the checks against a shared [`Solver`].
pub struct Verifier {
    solver: Solver,
    config: VerifyConfig,
    pool: rayon::ThreadPool,
}

impl fmt::Debug for Verifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Verifier").field("config", &self.config).finish_non_exhaustive()
    }
}

impl Verifier {
    pub fn new(config: VerifyConfig) -> Result<Self> {
        let solver = Solver::new(config.budget);
        Verifier::with_solver(solver, config)
    }

    pub fn with_solver(solver: Solver, config: VerifyConfig) -> Result<Self> {
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.width)
            .build()
            .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
        Ok(Verifier { solver, config, pool })
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.config
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    /// Evaluates `row` on every item in parallel, keeping item order.
    fn rows<T, U, F>(&self, items: &[T], row: F) -> Result<Vec<U>>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> Result<U> + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&row).collect())
    }

    fn terms(&self) -> Terms<'_> {
        Terms { verifier: self, gaps: Vec::new() }
    }
}

/// Collects search terms for one row; a term that cannot be evaluated exactly
/// records a gap and contributes zero.
struct Terms<'a> {
    verifier: &'a Verifier,
    gaps: Vec<String>,
}

impl Terms<'_> {
    fn search(&mut self, shape: &Shape, family: &ForbiddenFamily, mode: Mode) -> Result<BigInt> {
        let max_axis = self.verifier.config.max_axis;
        if shape.lengths().iter().any(|&l| l > max_axis) {
            self.gaps.push(format!("{mode} on {shape}: axis exceeds max_axis {max_axis}"));
            return Ok(BigInt::from(0));
        }
        let result = self.verifier.solver.solve(shape, family, mode)?;
        if !result.is_exact() {
            self.gaps.push(format!("{mode} on {shape}: search budget exhausted"));
            return Ok(BigInt::from(0));
        }
        Ok(BigInt::from(result.value))
    }

    fn ex(&mut self, shape: &Shape, family: &ForbiddenFamily) -> Result<BigInt> {
        self.search(shape, family, Mode::Ex)
    }

    fn lx(&mut self, shape: &Shape, k: usize, family: &ForbiddenFamily) -> Result<BigInt> {
        self.search(shape, family, Mode::lx(k)?)
    }

    fn row(
        self,
        check: &str,
        params: Vec<Param>,
        lhs: BigInt,
        rhs: num_rational::BigRational,
        lhs_source: String,
        rhs_source: String,
    ) -> ReportRow {
        if self.gaps.is_empty() {
            ReportRow::compare(check, params, num_rational::BigRational::from_integer(lhs), rhs, lhs_source, rhs_source)
        } else {
            ReportRow::inconclusive(check, params, lhs_source, rhs_source, self.gaps.join("; "))
        }
    }
}
