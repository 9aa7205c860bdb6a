//! (P, s)-formations and doubled (r, s)-formations.
//!
//! A (P, s)-formation in a (d+1)-dimensional matrix is a set of `s * r` ones
//! split into `s` groups of `r` ones. Every group occupies the same `r` 1-rows
//! (lines along the first axis), the groups are ordered by disjoint ranges of
//! first coordinates, and the deduplicated projection of the ones onto the
//! remaining `d` axes is (order-isomorphic to) `P`.
//!
//! Detection fixes the 1-rows through an occurrence of `P` in the first-axis
//! OR-projection of the host, then counts groups greedily: each group takes, in
//! every selected 1-row, the earliest one after the previous group's last one.
//! Taking earliest ones never hurts later groups, so the greedy count is the
//! maximum for that set of 1-rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, CompiledPattern, Matcher, Pattern, Shape};

/// Names the family `F_{P,s}`. The base pattern is stored normalized.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormationSpec {
    base: Pattern,
    s: usize,
}

impl FormationSpec {
    pub fn new(base: &Pattern, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::OutOfDomain("formations need s >= 1".into()));
        }
        Ok(FormationSpec { base: base.normalize()?, s })
    }

    pub fn base(&self) -> &Pattern {
        &self.base
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Dimension of the hosts this family lives in.
    pub fn host_dims(&self) -> usize {
        self.base.dims() + 1
    }

    /// Ones per group.
    pub fn r(&self) -> usize {
        self.base.count_ones()
    }

    /// The smallest member: `P` placed once per group, group `g` entirely at
    /// first coordinate `g`.
    pub fn canonical_member(&self) -> BitMatrix {
        let mut lengths = vec![self.s];
        lengths.extend_from_slice(self.base.shape().lengths());
        let mut m = BitMatrix::zeros(Shape::new(lengths).expect("positive lengths"));
        let mut coord = vec![0; self.host_dims()];
        for g in 1..=self.s {
            for one in self.base.ones() {
                coord[0] = g;
                coord[1..].copy_from_slice(one);
                m.set(&coord, true);
            }
        }
        m
    }
}

/// Names the family `D_{r,s}` of doubled (r, s)-formations (2-dimensional).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DoubledSpec {
    r: usize,
    s: usize,
}

impl DoubledSpec {
    pub fn new(r: usize, s: usize) -> Result<Self> {
        if r < 1 || s < 2 {
            return Err(Error::OutOfDomain(format!("doubled formation needs r >= 1, s >= 2 (got r={r}, s={s})")));
        }
        Ok(DoubledSpec { r, s })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Ones in each chosen column of a member: `2s - 2`.
    pub fn ones_per_column(&self) -> usize {
        2 * self.s - 2
    }
}

/// Greedy group count over sorted lists of first coordinates.
pub(crate) fn greedy_groups(lines: &[&[usize]]) -> usize {
    let mut prev = 0;
    let mut groups = 0;
    loop {
        let mut group_max = 0;
        for line in lines {
            let pos = line.partition_point(|&t| t <= prev);
            match line.get(pos) {
                Some(&t) => group_max = group_max.max(t),
                None => return groups,
            }
        }
        groups += 1;
        prev = group_max;
    }
}

/// Greedy group count over bitmasks of 0-based first coordinates, stopping
/// once `cap` groups are found.
#[inline]
pub(crate) fn greedy_groups_masks(masks: &[u64], cap: usize) -> usize {
    // `floor` is the lowest admissible 0-based coordinate for the next group
    let mut floor: u32 = 0;
    let mut groups = 0;
    while groups < cap {
        if floor >= 64 {
            return groups;
        }
        let mut group_max = 0;
        for &mask in masks {
            let avail = mask & (!0u64 << floor);
            if avail == 0 {
                return groups;
            }
            group_max = group_max.max(avail.trailing_zeros());
        }
        groups += 1;
        floor = group_max + 1;
    }
    groups
}

fn check_formation_dims(host: &BitMatrix, base: &Pattern) -> Result<()> {
    if host.dims() != base.dims() + 1 {
        return Err(Error::DimensionMismatch { expected: base.dims() + 1, actual: host.dims() });
    }
    Ok(())
}

/// Largest `s` such that `host` contains a member of `F_{P,s}`; zero when
/// `host` does not even contain `P` in its projection.
pub fn max_formation_groups(host: &BitMatrix, base: &Pattern) -> Result<usize> {
    check_formation_dims(host, base)?;
    let compiled = CompiledPattern::new(base)?;
    let lines = host.first_axis_lines();
    let projection = host.project_first()?;
    let rest = projection.shape().clone();
    let mut best = 0;
    let mut coord = vec![0; rest.dims()];
    let mut selected: Vec<&[usize]> = Vec::with_capacity(compiled.ones.len());
    Matcher::new(&compiled, &projection).for_each(|maps| {
        selected.clear();
        for one in &compiled.ones {
            for (axis, c) in coord.iter_mut().enumerate() {
                *c = maps[axis][one[axis]] + 1;
            }
            selected.push(&lines[rest.flat_index(&coord)]);
        }
        best = best.max(greedy_groups(&selected));
    });
    Ok(best)
}

/// Does `host` contain a member of `F_{P,s}`?
pub fn contains_formation(host: &BitMatrix, spec: &FormationSpec) -> Result<bool> {
    Ok(max_formation_groups(host, spec.base())? >= spec.s())
}

/// Exhaustive check of the raw definition, for cross-validation.
///
/// Candidate subsets are `s * r` ones with exactly `s` ones in each of `r`
/// distinct 1-rows (any other subset cannot be split into `s` groups sharing
/// `r` 1-rows). For each candidate the groups are forced: group `i` holds the
/// `i`-th one of every 1-row. The candidate is a formation when the group
/// ranges are disjoint and ordered and the 1-rows are order-isomorphic to `P`.
///
/// Refuses with [`Error::CapExceeded`] when the number of candidates could
/// exceed `cap`.
pub fn brute_force_formation(host: &BitMatrix, spec: &FormationSpec, cap: u128) -> Result<bool> {
    check_formation_dims(host, spec.base())?;
    let s = spec.s();
    let r = spec.r();
    let rest_shape = host.shape().drop_first().expect("host has at least two axes");

    // group ones by their 1-row, straight from the coordinate list
    let mut rows: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for one in host.iter_ones() {
        let key = one[1..].to_vec();
        match rows.iter_mut().find(|(k, _)| *k == key) {
            Some((_, times)) => times.push(one[0]),
            None => rows.push((key, vec![one[0]])),
        }
    }
    rows.retain(|(_, times)| times.len() >= s);
    for (_, times) in &mut rows {
        times.sort_unstable();
    }
    if rows.len() < r {
        return Ok(false);
    }

    let max_choose = rows.iter().map(|(_, t)| binomial_u128(t.len() as u128, s as u128)).max().unwrap_or(0);
    let work = binomial_u128(rows.len() as u128, r as u128).saturating_mul(max_choose.saturating_pow(r as u32));
    if work > cap {
        return Err(Error::CapExceeded { work, cap });
    }

    for row_set in combinations(rows.len(), r) {
        let coords: Vec<Vec<usize>> = row_set.iter().map(|&i| rows[i].0.clone()).collect();
        let projected = Pattern::new(rest_shape.clone(), coords)?;
        if projected.normalize()? != *spec.base() {
            continue;
        }
        let choices: Vec<Vec<Vec<usize>>> = row_set
            .iter()
            .map(|&i| {
                let times = &rows[i].1;
                combinations(times.len(), s).map(|c| c.iter().map(|&k| times[k]).collect()).collect()
            })
            .collect();
        let mut pick = vec![0usize; r];
        loop {
            let chosen: Vec<&Vec<usize>> = (0..r).map(|j| &choices[j][pick[j]]).collect();
            let ordered = (0..s - 1).all(|g| {
                let hi = chosen.iter().map(|t| t[g]).max().unwrap();
                let lo = chosen.iter().map(|t| t[g + 1]).min().unwrap();
                hi < lo
            });
            if ordered {
                return Ok(true);
            }
            let mut j = 0;
            loop {
                if j == r {
                    break;
                }
                pick[j] += 1;
                if pick[j] < choices[j].len() {
                    break;
                }
                pick[j] = 0;
                j += 1;
            }
            if j == r {
                break;
            }
        }
    }
    Ok(false)
}

/// Do the given columns (sorted row lists) carry a doubled (r, s)-formation?
/// Intervals are taken greedily as the shortest prefixes that satisfy every
/// column.
pub(crate) fn doubled_fits(columns: &[&[usize]], s: usize) -> bool {
    let mut end = 0;
    for interval in 1..=s {
        let need = if interval == 1 || interval == s { 1 } else { 2 };
        let mut interval_end = 0;
        for col in columns {
            let pos = col.partition_point(|&t| t <= end);
            match col.get(pos + need - 1) {
                Some(&t) => interval_end = interval_end.max(t),
                None => return false,
            }
        }
        end = interval_end;
    }
    true
}

/// [`doubled_fits`] over bitmasks of 0-based row indices.
#[inline]
pub(crate) fn doubled_fits_masks(columns: &[u64], s: usize) -> bool {
    let mut floor: u32 = 0;
    for interval in 1..=s {
        if floor >= 64 {
            return false;
        }
        let need_two = interval != 1 && interval != s;
        let mut interval_end = 0;
        for &col in columns {
            let mut avail = col & (!0u64 << floor);
            if need_two {
                avail &= avail.wrapping_sub(1);
            }
            if avail == 0 {
                return false;
            }
            interval_end = interval_end.max(avail.trailing_zeros());
        }
        floor = interval_end + 1;
    }
    true
}

/// Does a 2-dimensional host contain a doubled (r, s)-formation?
pub fn contains_doubled_formation(host: &BitMatrix, spec: &DoubledSpec) -> Result<bool> {
    if host.dims() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: host.dims() });
    }
    let columns: Vec<Vec<usize>> = host
        .first_axis_lines()
        .into_iter()
        .filter(|c| c.len() >= spec.ones_per_column())
        .collect();
    if columns.len() < spec.r() {
        return Ok(false);
    }
    for subset in combinations(columns.len(), spec.r()) {
        let cols: Vec<&[usize]> = subset.iter().map(|&i| columns[i].as_slice()).collect();
        if doubled_fits(&cols, spec.s()) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Calls `visit` on every member of `F_{P,s}` that fits in `shape`, each as a
/// host of exactly that shape holding only the member's ones.
pub fn for_each_member<F>(shape: &Shape, spec: &FormationSpec, mut visit: F) -> Result<()>
where
    F: FnMut(&BitMatrix),
{
    if shape.dims() != spec.host_dims() {
        return Err(Error::DimensionMismatch { expected: spec.host_dims(), actual: shape.dims() });
    }
    let rest = shape.drop_first().expect("at least two axes");
    let m = shape.len(0);
    let compiled = CompiledPattern::new(spec.base())?;
    let grid = BitMatrix::ones(rest.clone());
    let mut row_sets: Vec<Vec<Vec<usize>>> = Vec::new();
    Matcher::new(&compiled, &grid).for_each(|maps| {
        row_sets.push(
            compiled
                .ones
                .iter()
                .map(|one| one.iter().enumerate().map(|(a, &c)| maps[a][c] + 1).collect())
                .collect(),
        );
    });

    fn place<F: FnMut(&BitMatrix)>(
        host: &mut BitMatrix,
        rows: &[Vec<usize>],
        s: usize,
        m: usize,
        state: (usize, usize, usize, usize),
        visit: &mut F,
    ) {
        // (group, row index within group, previous group's max, current group's max)
        let (group, row, prev_max, cur_max) = state;
        if group == s {
            visit(host);
            return;
        }
        if row == rows.len() {
            place(host, rows, s, m, (group + 1, 0, cur_max, 0), visit);
            return;
        }
        let mut coord = Vec::with_capacity(rows[row].len() + 1);
        for t in prev_max + 1..=m {
            coord.clear();
            coord.push(t);
            coord.extend_from_slice(&rows[row]);
            host.set(&coord, true);
            place(host, rows, s, m, (group, row + 1, prev_max, cur_max.max(t)), visit);
            host.set(&coord, false);
        }
    }

    let mut host = BitMatrix::zeros(shape.clone());
    for rows in &row_sets {
        place(&mut host, rows, spec.s(), m, (0, 0, 0, 0), &mut visit);
    }
    Ok(())
}

pub(crate) fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = {
            let c = current.as_mut().unwrap();
            let mut i = k;
            loop {
                if i == 0 {
                    break false;
                }
                i -= 1;
                if c[i] < n - k + i {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    break true;
                }
            }
        };
        if !next {
            current = None;
        }
        Some(out)
    })
}
