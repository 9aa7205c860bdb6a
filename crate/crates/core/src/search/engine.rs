//! Branch and bound over the cells of the host.
//!
//! Cells are split into independent components first: two cells interact when
//! some forbidden configuration could use both of them in the all-ones host,
//! and cells of one 1-row always share a component (the `lx` objective is per
//! 1-row). Every forbidden occurrence lies inside one component, so the optimum
//! is the sum of the component optima and components are solved one after
//! another.
//!
//! Inside a component, cells are visited in lexicographic order and the "one"
//! branch is tried before the "zero" branch. A placed one is checked only
//! against configurations in which it is the lexicographically last cell, since
//! every earlier cell is already decided. Branches whose optimistic bound does
//! not beat the incumbent are cut, and the incumbent is only replaced on strict
//! improvement, so the reported witness is the lexicographically greatest
//! optimal matrix.

use std::time::Instant;

use super::{ExtremalResult, ForbiddenFamily, LetterAssignment, Mode, SearchBudget, Status};
use crate::error::{Error, Result};
use crate::formations::{
    combinations, contains_doubled_formation, contains_formation, doubled_fits_masks, greedy_groups_masks,
    DoubledSpec,
};
use crate::matrix::{contains, BitMatrix, CompiledPattern, Matcher, Shape};

/// `ex` over hosts of `shape`.
pub fn ex_exact(shape: &Shape, family: &ForbiddenFamily, budget: &SearchBudget) -> Result<ExtremalResult> {
    solve(shape, family, Mode::Ex, budget)
}

/// `lx_k` over hosts of `shape`.
pub fn lx_exact(shape: &Shape, k: usize, family: &ForbiddenFamily, budget: &SearchBudget) -> Result<ExtremalResult> {
    solve(shape, family, Mode::lx(k)?, budget)
}

/// Does `host` avoid every member of `family`? Uses the standalone detectors,
/// not the search's incremental state.
pub fn validate_witness(host: &BitMatrix, family: &ForbiddenFamily) -> Result<bool> {
    for p in family.patterns() {
        if contains(host, p)? {
            return Ok(false);
        }
    }
    for f in family.formations() {
        if contains_formation(host, f)? {
            return Ok(false);
        }
    }
    for d in family.doubled() {
        if contains_doubled_formation(host, d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

struct FormationIndex {
    s: usize,
    /// Each occurrence of the base pattern in the full projected grid, as the
    /// list of 1-row indices it uses.
    occurrences: Vec<Vec<usize>>,
    /// Occurrence ids through each 1-row.
    by_row: Vec<Vec<usize>>,
}

struct Problem {
    shape: Shape,
    /// Number of 1-rows; a cell's 1-row is `flat % rows`, its first
    /// coordinate `flat / rows`.
    rows: usize,
    patterns: Vec<CompiledPattern>,
    formations: Vec<FormationIndex>,
    doubled: Vec<DoubledSpec>,
}

impl Problem {
    fn new(shape: &Shape, family: &ForbiddenFamily) -> Result<Self> {
        let m = shape.len(0);
        let rows = shape.volume() / m;
        let lengths = shape.lengths();
        let patterns = family
            .patterns()
            .map(CompiledPattern::new)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|p| p.fits(lengths))
            .collect();

        let mut formations = Vec::new();
        let rest = shape.drop_first();
        for spec in family.formations() {
            let rest = rest.as_ref().expect("formation hosts have at least two axes");
            if spec.s() > m {
                continue;
            }
            let compiled = CompiledPattern::new(spec.base())?;
            let grid = BitMatrix::ones(rest.clone());
            let mut occurrences: Vec<Vec<usize>> = Vec::new();
            let mut coord = vec![0; rest.dims()];
            Matcher::new(&compiled, &grid).for_each(|maps| {
                let ids: Vec<usize> = compiled
                    .ones
                    .iter()
                    .map(|one| {
                        for (a, c) in coord.iter_mut().enumerate() {
                            *c = maps[a][one[a]] + 1;
                        }
                        rest.flat_index(&coord)
                    })
                    .collect();
                occurrences.push(ids);
            });
            let mut by_row = vec![Vec::new(); rows];
            for (id, occ) in occurrences.iter().enumerate() {
                for &r in occ {
                    by_row[r].push(id);
                }
            }
            formations.push(FormationIndex { s: spec.s(), occurrences, by_row });
        }

        let doubled = family.doubled().copied().filter(|d| d.ones_per_column() <= m && d.r() <= rows).collect();
        Ok(Problem { shape: shape.clone(), rows, patterns, formations, doubled })
    }

    /// Cells grouped into independent components, each sorted, components
    /// ordered by their first cell.
    fn components(&self) -> Vec<Vec<usize>> {
        let volume = self.shape.volume();
        let mut uf = UnionFind::new(volume);
        for cell in 0..volume {
            uf.union(cell, cell % self.rows);
        }
        let coords: Vec<Vec<usize>> = (0..volume)
            .map(|i| {
                let mut c = vec![0; self.shape.dims()];
                self.shape.unflatten(i, &mut c);
                c.iter_mut().for_each(|x| *x -= 1);
                c
            })
            .collect();
        let lengths = self.shape.lengths();
        for pat in &self.patterns {
            for a in 0..volume {
                for b in a + 1..volume {
                    if uf.find(a) == uf.find(b) {
                        continue;
                    }
                    let linked = pat.ones.iter().enumerate().any(|(i, p)| {
                        pat.ones.iter().skip(i + 1).any(|q| {
                            co_placeable(p, q, &coords[a], &coords[b], &pat.lengths, lengths)
                                || co_placeable(p, q, &coords[b], &coords[a], &pat.lengths, lengths)
                        })
                    });
                    if linked {
                        uf.union(a, b);
                    }
                }
            }
        }
        for f in &self.formations {
            for occ in &f.occurrences {
                for w in occ.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        if self.doubled.iter().any(|d| d.r() >= 2) {
            for r in 1..self.rows {
                uf.union(0, r);
            }
        }
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); volume];
        for cell in 0..volume {
            by_root[uf.find(cell)].push(cell);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_iter().filter(|c| !c.is_empty()).collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }
}

/// Can pattern ones `p` and `q` be sent to host cells `a` and `b` by one
/// occurrence in the all-ones host? All coordinates 0-based.
fn co_placeable(p: &[usize], q: &[usize], a: &[usize], b: &[usize], pat_len: &[usize], host_len: &[usize]) -> bool {
    (0..p.len()).all(|i| {
        let (pi, qi, ai, bi) = (p[i], q[i], a[i], b[i]);
        let order_ok = match pi.cmp(&qi) {
            std::cmp::Ordering::Equal => ai == bi,
            std::cmp::Ordering::Less => ai < bi && bi - ai >= qi - pi,
            std::cmp::Ordering::Greater => ai > bi && ai - bi >= pi - qi,
        };
        order_ok && ai.min(bi) >= pi.min(qi) && host_len[i] - 1 - ai.max(bi) >= pat_len[i] - 1 - pi.max(qi)
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so roots are stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

struct Search<'a> {
    problem: &'a Problem,
    k: usize,
    lx: bool,
    host: BitMatrix,
    masks: Vec<u64>,
    counts: Vec<usize>,
    remaining: Vec<usize>,
    cells: Vec<usize>,
    coords: Vec<Vec<usize>>,
    placed: Vec<usize>,
    /// objective of the current partial assignment
    value: usize,
    /// optimistic completion of the current partial assignment
    bound: usize,
    best: Option<(usize, Vec<usize>)>,
    nodes: u64,
    max_nodes: u64,
    started: Instant,
    budget: SearchBudget,
    aborted: bool,
    scratch: Vec<u64>,
}

impl<'a> Search<'a> {
    fn violates(&mut self, idx: usize) -> bool {
        let flat = self.cells[idx];
        let problem = self.problem;
        let row = flat % problem.rows;
        let time = flat / problem.rows;
        for pat in &problem.patterns {
            if Matcher::new(pat, &self.host).exists_with_last_at(&self.coords[idx]) {
                return true;
            }
        }
        let bit = 1u64 << time;
        for f in &problem.formations {
            for &occ in &f.by_row[row] {
                self.scratch.clear();
                for &r in &f.occurrences[occ] {
                    self.scratch.push(if r == row { self.masks[r] | bit } else { self.masks[r] });
                }
                if greedy_groups_masks(&self.scratch, f.s) >= f.s {
                    return true;
                }
            }
        }
        for d in &problem.doubled {
            let own = self.masks[row] | bit;
            if (own.count_ones() as usize) < d.ones_per_column() {
                continue;
            }
            let others: Vec<usize> = (0..problem.rows)
                .filter(|&c| c != row && self.masks[c].count_ones() as usize >= d.ones_per_column())
                .collect();
            for subset in combinations(others.len(), d.r() - 1) {
                self.scratch.clear();
                self.scratch.push(own);
                self.scratch.extend(subset.iter().map(|&i| self.masks[others[i]]));
                if doubled_fits_masks(&self.scratch, d.s()) {
                    return true;
                }
            }
        }
        false
    }

    fn place(&mut self, idx: usize) {
        let flat = self.cells[idx];
        let row = flat % self.problem.rows;
        self.host.set_flat(flat, true);
        self.masks[row] |= 1u64 << (flat / self.problem.rows);
        self.placed.push(flat);
        let c = self.counts[row];
        self.counts[row] = c + 1;
        self.remaining[row] -= 1;
        if self.lx {
            self.value += (c + 1) / self.k - c / self.k;
        } else {
            self.value += 1;
        }
    }

    fn unplace(&mut self, idx: usize) {
        let flat = self.cells[idx];
        let row = flat % self.problem.rows;
        self.host.set_flat(flat, false);
        self.masks[row] &= !(1u64 << (flat / self.problem.rows));
        self.placed.pop();
        let c = self.counts[row];
        self.counts[row] = c - 1;
        self.remaining[row] += 1;
        if self.lx {
            self.value -= c / self.k - (c - 1) / self.k;
        } else {
            self.value -= 1;
        }
    }

    /// Marks cell `idx` as zero; returns the bound decrease for `restore_zero`.
    fn skip(&mut self, idx: usize) -> usize {
        let row = self.cells[idx] % self.problem.rows;
        let before = self.counts[row] + self.remaining[row];
        self.remaining[row] -= 1;
        let drop = if self.lx { before / self.k - (before - 1) / self.k } else { 1 };
        self.bound -= drop;
        drop
    }

    fn restore_skip(&mut self, idx: usize, drop: usize) {
        let row = self.cells[idx] % self.problem.rows;
        self.remaining[row] += 1;
        self.bound += drop;
    }

    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.nodes >= self.max_nodes
            || (self.nodes.is_multiple_of(1024) && self.started.elapsed() > self.budget.max_duration())
        {
            self.aborted = true;
        }
        self.aborted
    }

    fn dfs(&mut self, idx: usize) {
        if self.out_of_budget() {
            return;
        }
        self.nodes += 1;
        if let Some((best, _)) = &self.best {
            if self.bound <= *best {
                return;
            }
        }
        if idx == self.cells.len() {
            self.best = Some((self.value, self.placed.clone()));
            return;
        }
        if !self.violates(idx) {
            self.place(idx);
            self.dfs(idx + 1);
            self.unplace(idx);
        }
        let drop = self.skip(idx);
        self.dfs(idx + 1);
        self.restore_skip(idx, drop);
    }
}

/// Exact (or budget-limited) maximization of `mode` over avoiding hosts.
pub fn solve(shape: &Shape, family: &ForbiddenFamily, mode: Mode, budget: &SearchBudget) -> Result<ExtremalResult> {
    let started = Instant::now();
    if family.is_empty() {
        return Err(Error::InvalidFamily("empty family".into()));
    }
    let dims = family.host_dims().expect("nonempty family");
    if dims != shape.dims() {
        return Err(Error::DimensionMismatch { expected: dims, actual: shape.dims() });
    }
    let needs_masks = family.formations().next().is_some() || family.doubled().next().is_some();
    if needs_masks && shape.len(0) > 64 {
        return Err(Error::OutOfDomain("formation searches support first axis length <= 64".into()));
    }
    let k = mode.k();
    if k == 0 {
        return Err(Error::OutOfDomain("lx needs k >= 1".into()));
    }

    let problem = Problem::new(shape, family)?;
    let mut search = Search {
        problem: &problem,
        k,
        lx: matches!(mode, Mode::Lx { .. }),
        host: BitMatrix::zeros(shape.clone()),
        masks: vec![0; problem.rows],
        counts: vec![0; problem.rows],
        remaining: vec![0; problem.rows],
        cells: Vec::new(),
        coords: Vec::new(),
        placed: Vec::new(),
        value: 0,
        bound: 0,
        best: None,
        nodes: 0,
        max_nodes: budget.max_nodes(),
        started,
        budget: *budget,
        aborted: false,
        scratch: Vec::new(),
    };

    let mut total = 0u64;
    let mut witness = BitMatrix::zeros(shape.clone());
    for comp in problem.components() {
        let mut rows_in_comp: Vec<usize> = comp.iter().map(|&c| c % problem.rows).collect();
        rows_in_comp.sort_unstable();
        rows_in_comp.dedup();
        for &c in &comp {
            search.remaining[c % problem.rows] += 1;
        }
        search.coords = comp
            .iter()
            .map(|&flat| {
                let mut c = vec![0; shape.dims()];
                shape.unflatten(flat, &mut c);
                c.iter_mut().for_each(|x| *x -= 1);
                c
            })
            .collect();
        search.cells = comp;
        search.value = 0;
        search.bound = if search.lx {
            rows_in_comp.iter().map(|&r| search.remaining[r] / k).sum()
        } else {
            search.cells.len()
        };
        search.best = None;

        search.dfs(0);

        if let Some((value, cells)) = search.best.take() {
            total += value as u64;
            for flat in cells {
                witness.set_flat(flat, true);
            }
        }
        for &r in &rows_in_comp {
            search.remaining[r] = 0;
        }
        debug_assert!(search.placed.is_empty());
    }

    let status = if search.aborted { Status::LowerBound } else { Status::Exact };
    let letters = match mode {
        Mode::Ex => None,
        Mode::Lx { k } => {
            let letters = LetterAssignment::from_witness(&witness, k);
            witness = letters.shadow(shape);
            Some(letters)
        }
    };
    let attained = letters.as_ref().map_or(witness.count_ones(), LetterAssignment::letters) as u64;
    if attained != total || !validate_witness(&witness, family)? {
        return Err(Error::WitnessInvalid);
    }
    Ok(ExtremalResult {
        mode,
        value: total,
        status,
        witness,
        letters,
        nodes_explored: search.nodes,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Pattern;

    fn budget() -> SearchBudget {
        SearchBudget::new(50_000_000, 60.0).unwrap()
    }

    fn shape(s: &str) -> Shape {
        s.parse().unwrap()
    }

    #[test]
    fn one_dimensional_lines() {
        for r in 2..=4 {
            let f = ForbiddenFamily::of_pattern(&Pattern::all_ones_line(r).unwrap()).unwrap();
            let res = ex_exact(&shape("5"), &f, &budget()).unwrap();
            assert_eq!(res.value, r as u64 - 1);
            assert!(res.is_exact());
        }
    }

    #[test]
    fn single_one_forbids_everything() {
        let f = ForbiddenFamily::of_pattern(&Pattern::identity(1).unwrap()).unwrap();
        let res = ex_exact(&shape("4x4"), &f, &budget()).unwrap();
        assert_eq!(res.value, 0);
        assert_eq!(res.witness.count_ones(), 0);
    }

    #[test]
    fn identity_in_three_by_three() {
        let f = ForbiddenFamily::of_pattern(&Pattern::identity(2).unwrap()).unwrap();
        let res = ex_exact(&shape("3x3"), &f, &budget()).unwrap();
        assert_eq!(res.value, 5);
        // lexicographically greatest optimum in row-major order
        assert_eq!(res.witness, BitMatrix::from_rows(&["111", "100", "100"]).unwrap());
    }

    #[test]
    fn lx_with_k_one_is_ex() {
        let f = ForbiddenFamily::of_pattern(&Pattern::identity(2).unwrap()).unwrap();
        let ex = ex_exact(&shape("3x4"), &f, &budget()).unwrap();
        let lx = lx_exact(&shape("3x4"), 1, &f, &budget()).unwrap();
        assert_eq!(ex.value, lx.value);
        assert_eq!(ex.witness, lx.witness);
    }

    #[test]
    fn lx_zero_when_rows_too_short() {
        let f = ForbiddenFamily::of_pattern(&Pattern::identity(2).unwrap()).unwrap();
        let res = lx_exact(&shape("3x3"), 4, &f, &budget()).unwrap();
        assert_eq!(res.value, 0);
        assert!(res.is_exact());
    }

    #[test]
    fn budget_exhaustion_reports_lower_bound() {
        let f = ForbiddenFamily::of_pattern(&Pattern::identity(2).unwrap()).unwrap();
        let tiny = SearchBudget::new(5, 60.0).unwrap();
        let res = ex_exact(&shape("4x4"), &f, &tiny).unwrap();
        assert_eq!(res.status, Status::LowerBound);
        assert!(validate_witness(&res.witness, &f).unwrap());
        assert_eq!(res.witness.count_ones() as u64, res.value);
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let f = ForbiddenFamily::of_pattern(&Pattern::identity(2).unwrap()).unwrap();
        assert!(ex_exact(&shape("3x3x3"), &f, &budget()).is_err());
        assert!(ex_exact(&shape("3x3"), &ForbiddenFamily::new(), &budget()).is_err());
        assert!(lx_exact(&shape("3x3"), 0, &f, &budget()).is_err());
    }

    #[test]
    fn components_split_by_row_for_horizontal_pair() {
        let base = Pattern::from_ones(vec![vec![1, 1], vec![1, 2]]).unwrap();
        let f = ForbiddenFamily::of_formation(&base, 2).unwrap();
        let problem = Problem::new(&shape("3x3x3"), &f).unwrap();
        let comps = problem.components();
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.len() == 9));
    }

    #[test]
    fn formation_search_matches_detector() {
        let base = Pattern::all_ones_line(2).unwrap();
        let f = ForbiddenFamily::of_formation(&base, 2).unwrap();
        let res = ex_exact(&shape("4x3"), &f, &budget()).unwrap();
        assert!(res.is_exact());
        assert!(validate_witness(&res.witness, &f).unwrap());
        let mut plus_one = false;
        for cell in res.witness.shape().coords() {
            if !res.witness.get(&cell) {
                let mut m = res.witness.clone();
                m.set(&cell, true);
                plus_one |= validate_witness(&m, &f).unwrap();
            }
        }
        assert!(!plus_one, "witness is not maximal");
    }

    #[test]
    fn doubled_search() {
        let f = ForbiddenFamily::new().with_doubled(DoubledSpec::new(1, 3).unwrap()).unwrap();
        // a column may hold at most 3 ones before a 1/2/1 split appears
        let res = ex_exact(&shape("5x2"), &f, &budget()).unwrap();
        assert_eq!(res.value, 6);
    }
}
