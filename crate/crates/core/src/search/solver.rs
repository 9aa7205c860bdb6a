use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{solve, ExtremalResult, ForbiddenFamily, Mode, ProblemKey, ResultCache, SearchBudget};
use crate::error::{Error, Result};
use crate::matrix::{Pattern, Shape};

/// Search front end with an in-memory memo and an optional persistent cache.
/// Only exact results are written to the persistent cache, since budgets are
/// not part of the key.
#[derive(Debug)]
pub struct Solver {
    budget: SearchBudget,
    memo: Mutex<HashMap<ProblemKey, ExtremalResult>>,
    cache: Option<Mutex<ResultCache>>,
}

impl Solver {
    pub fn new(budget: SearchBudget) -> Self {
        Solver { budget, memo: Mutex::new(HashMap::new()), cache: None }
    }

    pub fn with_cache(mut self, cache: ResultCache) -> Self {
        self.cache = Some(Mutex::new(cache));
        self
    }

    pub fn budget(&self) -> &SearchBudget {
        &self.budget
    }

    pub fn solve(&self, shape: &Shape, family: &ForbiddenFamily, mode: Mode) -> Result<ExtremalResult> {
        let key = ProblemKey::new(shape, family, mode);
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(hit.clone());
        }
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.lock().expect("cache lock").get(&key) {
                self.memo.lock().expect("memo lock").insert(key, hit.clone());
                return Ok(hit);
            }
        }
        let result = solve(shape, family, mode, &self.budget)?;
        if result.is_exact() {
            if let Some(cache) = &self.cache {
                cache.lock().expect("cache lock").put(&key, &result)?;
            }
        }
        self.memo.lock().expect("memo lock").insert(key, result.clone());
        Ok(result)
    }

    pub fn ex(&self, shape: &Shape, family: &ForbiddenFamily) -> Result<ExtremalResult> {
        self.solve(shape, family, Mode::Ex)
    }

    pub fn lx(&self, shape: &Shape, k: usize, family: &ForbiddenFamily) -> Result<ExtremalResult> {
        self.solve(shape, family, Mode::lx(k)?)
    }
}

/// `G_{P,s}(n, m, d+1, k) = lx_k(n, m, F_{P,s}, d+1) / ex(n, P, d)` as an exact
/// rational. Both searches must finish exactly.
pub fn compute_g(solver: &Solver, n: usize, m: usize, k: usize, base: &Pattern, s: usize) -> Result<BigRational> {
    let d = base.dims();
    let ex = solver.ex(&Shape::cube(d, n)?, &ForbiddenFamily::of_pattern(base)?)?;
    if !ex.is_exact() {
        return Err(Error::Inconclusive(format!("ex(n={n}) hit the search budget")));
    }
    if ex.value == 0 {
        return Err(Error::ZeroDenominator(format!("ex(n={n}, P, {d}) = 0")));
    }
    let lx = solver.lx(&Shape::first_and_rest(d + 1, m, n)?, k, &ForbiddenFamily::of_formation(base, s)?)?;
    if !lx.is_exact() {
        return Err(Error::Inconclusive(format!("lx_{k}(n={n}, m={m}) hit the search budget")));
    }
    Ok(BigRational::new(BigInt::from(lx.value), BigInt::from(ex.value)))
}
