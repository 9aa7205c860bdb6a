//! Pattern containment in d-dimensional 0-1 matrices.
//!
//! A host `M` contains `P` when strictly increasing maps, one per axis, carry
//! every one of `P` onto a one of `M`. Patterns are matched in normalized form
//! (all-zero hyperplanes deleted), so only the relative order of the ones
//! matters.

use serde::{Deserialize, Serialize};

use super::{BitMatrix, Pattern};
use crate::error::{Error, Result};

/// Witness of containment: for each axis, the strictly increasing map from the
/// normalized pattern's indices to host indices (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occurrence {
    pub axis_maps: Vec<Vec<usize>>,
}

impl Occurrence {
    /// Image of a one of the normalized pattern.
    pub fn image(&self, one: &[usize]) -> Vec<usize> {
        one.iter().zip(&self.axis_maps).map(|(&c, map)| map[c - 1]).collect()
    }

    /// Checks the witness directly against `M` and `P`.
    pub fn validate(&self, host: &BitMatrix, pattern: &Pattern) -> Result<bool> {
        let norm = pattern.normalize()?;
        let shape = norm.shape();
        if self.axis_maps.len() != host.dims() || shape.dims() != host.dims() {
            return Ok(false);
        }
        for (axis, map) in self.axis_maps.iter().enumerate() {
            if map.len() != shape.len(axis) {
                return Ok(false);
            }
            if map.first().is_some_and(|&v| v == 0)
                || map.last().is_some_and(|&v| v > host.shape().len(axis))
                || map.windows(2).any(|w| w[0] >= w[1])
            {
                return Ok(false);
            }
        }
        let hit = norm.ones().all(|one| host.get(&self.image(one)));
        Ok(hit)
    }
}

/// Normalized pattern with 0-based ones, ready for repeated matching.
#[derive(Debug, Clone)]
pub(crate) struct CompiledPattern {
    pub(crate) lengths: Vec<usize>,
    /// 0-based, lexicographically sorted.
    pub(crate) ones: Vec<Vec<usize>>,
}

impl CompiledPattern {
    pub(crate) fn new(pattern: &Pattern) -> Result<Self> {
        let norm = pattern.normalize()?;
        Ok(CompiledPattern {
            lengths: norm.shape().lengths().to_vec(),
            ones: norm.ones().map(|o| o.iter().map(|c| c - 1).collect()).collect(),
        })
    }

    pub(crate) fn dims(&self) -> usize {
        self.lengths.len()
    }

    pub(crate) fn fits(&self, host_lengths: &[usize]) -> bool {
        self.lengths.iter().zip(host_lengths).all(|(p, h)| p <= h)
    }
}

/// Backtracking matcher assigning the pattern's ones in lexicographic order.
pub(crate) struct Matcher<'a> {
    pat: &'a CompiledPattern,
    host: &'a BitMatrix,
    host_lengths: &'a [usize],
    strides: Vec<usize>,
    /// maps[axis][pattern index] = host index (0-based)
    maps: Vec<Vec<Option<usize>>>,
}

impl<'a> Matcher<'a> {
    pub(crate) fn new(pat: &'a CompiledPattern, host: &'a BitMatrix) -> Self {
        let host_lengths = host.shape().lengths();
        let mut strides = vec![1; host_lengths.len()];
        for a in (0..host_lengths.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * host_lengths[a + 1];
        }
        Matcher {
            pat,
            host,
            host_lengths,
            strides,
            maps: pat.lengths.iter().map(|&l| vec![None; l]).collect(),
        }
    }

    fn range(&self, axis: usize, idx: usize) -> Option<(usize, usize)> {
        let map = &self.maps[axis];
        let pat_len = self.pat.lengths[axis];
        let host_len = self.host_lengths[axis];
        let lo = (0..idx)
            .rev()
            .find_map(|b| map[b].map(|img| img + (idx - b)))
            .unwrap_or(idx);
        let hi = match (idx + 1..pat_len).find_map(|a| map[a].map(|img| (a, img))) {
            Some((a, img)) => img.checked_sub(a - idx)?,
            None => host_len - (pat_len - idx),
        };
        (lo <= hi).then_some((lo, hi))
    }

    fn flat(&self, coord: &[usize]) -> usize {
        coord.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    fn assign(&mut self, one: usize, coord: &[usize]) -> Vec<usize> {
        let mut newly = Vec::new();
        for (axis, &c) in coord.iter().enumerate() {
            let idx = self.pat.ones[one][axis];
            if self.maps[axis][idx].is_none() {
                self.maps[axis][idx] = Some(c);
                newly.push(axis);
            }
        }
        newly
    }

    fn unassign(&mut self, one: usize, axes: &[usize]) {
        for &axis in axes {
            let idx = self.pat.ones[one][axis];
            self.maps[axis][idx] = None;
        }
    }

    /// Depth-first search over `order[depth..]`. `visit` is called on every
    /// complete assignment and returns `true` to stop the search.
    fn dfs<F>(&mut self, order: &[usize], depth: usize, visit: &mut F) -> bool
    where
        F: FnMut(&[Vec<Option<usize>>]) -> bool,
    {
        if depth == order.len() {
            return visit(&self.maps);
        }
        let one = order[depth];
        let d = self.pat.dims();
        let mut lo = vec![0; d];
        let mut hi = vec![0; d];
        for axis in 0..d {
            let idx = self.pat.ones[one][axis];
            match self.maps[axis][idx] {
                Some(img) => {
                    lo[axis] = img;
                    hi[axis] = img;
                }
                None => match self.range(axis, idx) {
                    Some((l, h)) => {
                        lo[axis] = l;
                        hi[axis] = h;
                    }
                    None => return false,
                },
            }
        }
        let mut coord = lo.clone();
        loop {
            if self.host.get_flat(self.flat(&coord)) {
                let newly = self.assign(one, &coord);
                let stop = self.dfs(order, depth + 1, visit);
                self.unassign(one, &newly);
                if stop {
                    return true;
                }
            }
            // odometer, last axis fastest
            let mut axis = d;
            loop {
                if axis == 0 {
                    return false;
                }
                axis -= 1;
                if coord[axis] < hi[axis] {
                    coord[axis] += 1;
                    coord[axis + 1..].copy_from_slice(&lo[axis + 1..]);
                    break;
                }
            }
        }
    }

    pub(crate) fn exists(&mut self) -> bool {
        if !self.pat.fits(self.host_lengths) {
            return false;
        }
        let order: Vec<usize> = (0..self.pat.ones.len()).collect();
        self.dfs(&order, 0, &mut |_| true)
    }

    /// Is there an occurrence sending the pattern's lexicographically last one
    /// to `anchor` (0-based host coordinate)? The anchor cell itself is not
    /// read from the host.
    pub(crate) fn exists_with_last_at(&mut self, anchor: &[usize]) -> bool {
        let Some(last) = self.pat.ones.len().checked_sub(1) else {
            return true;
        };
        if !self.pat.fits(self.host_lengths) {
            return false;
        }
        for (axis, &c) in anchor.iter().enumerate() {
            let idx = self.pat.ones[last][axis];
            let pat_len = self.pat.lengths[axis];
            if c < idx || c > self.host_lengths[axis] - (pat_len - idx) {
                return false;
            }
        }
        let newly = self.assign(last, anchor);
        let order: Vec<usize> = (0..last).collect();
        let found = self.dfs(&order, 0, &mut |_| true);
        self.unassign(last, &newly);
        found
    }

    /// Calls `visit` with the axis maps (0-based) of every occurrence.
    pub(crate) fn for_each<F>(&mut self, mut visit: F)
    where
        F: FnMut(&[Vec<usize>]),
    {
        if !self.pat.fits(self.host_lengths) {
            return;
        }
        let order: Vec<usize> = (0..self.pat.ones.len()).collect();
        self.dfs(&order, 0, &mut |maps| {
            let full: Vec<Vec<usize>> =
                maps.iter().map(|m| m.iter().map(|v| v.expect("normalized")).collect()).collect();
            visit(&full);
            false
        });
    }
}

fn check_dims(host: &BitMatrix, pattern: &Pattern) -> Result<()> {
    if host.dims() != pattern.dims() {
        return Err(Error::DimensionMismatch { expected: host.dims(), actual: pattern.dims() });
    }
    Ok(())
}

/// Does `host` contain `pattern`? An empty pattern is contained in everything.
pub fn contains(host: &BitMatrix, pattern: &Pattern) -> Result<bool> {
    check_dims(host, pattern)?;
    if pattern.is_empty() {
        return Ok(true);
    }
    let compiled = CompiledPattern::new(pattern)?;
    Ok(Matcher::new(&compiled, host).exists())
}

/// Every occurrence of `pattern` in `host`, in search order.
pub fn occurrences(host: &BitMatrix, pattern: &Pattern) -> Result<Vec<Occurrence>> {
    check_dims(host, pattern)?;
    let compiled = CompiledPattern::new(pattern)?;
    let mut out = Vec::new();
    Matcher::new(&compiled, host).for_each(|maps| {
        out.push(Occurrence {
            axis_maps: maps.iter().map(|m| m.iter().map(|v| v + 1).collect()).collect(),
        })
    });
    Ok(out)
}

/// The lexicographically least occurrence, comparing the concatenation of the
/// axis maps (axis 1 first).
pub fn find_occurrence(host: &BitMatrix, pattern: &Pattern) -> Result<Option<Occurrence>> {
    check_dims(host, pattern)?;
    if pattern.is_empty() {
        return Ok(Some(Occurrence { axis_maps: vec![Vec::new(); host.dims()] }));
    }
    let compiled = CompiledPattern::new(pattern)?;
    let host_lengths = host.shape().lengths();
    if !compiled.fits(host_lengths) {
        return Ok(None);
    }
    let d = compiled.dims();
    let last_axis = d - 1;
    let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); compiled.lengths[last_axis]];
    for (j, one) in compiled.ones.iter().enumerate() {
        by_last[one[last_axis]].push(j);
    }
    let vars: Vec<(usize, usize)> =
        (0..d).flat_map(|a| (0..compiled.lengths[a]).map(move |i| (a, i))).collect();
    let mut maps: Vec<Vec<usize>> = compiled.lengths.iter().map(|&l| vec![0; l]).collect();

    struct Ctx<'a> {
        compiled: &'a CompiledPattern,
        host: &'a BitMatrix,
        host_lengths: &'a [usize],
        vars: &'a [(usize, usize)],
        by_last: &'a [Vec<usize>],
    }

    fn go(ctx: &Ctx<'_>, maps: &mut Vec<Vec<usize>>, v: usize) -> bool {
        let Some(&(axis, idx)) = ctx.vars.get(v) else {
            return true;
        };
        let pat_len = ctx.compiled.lengths[axis];
        let lo = if idx == 0 { 0 } else { maps[axis][idx - 1] + 1 };
        let hi = ctx.host_lengths[axis] - (pat_len - idx);
        let last_axis = ctx.compiled.dims() - 1;
        let mut coord = vec![0; ctx.compiled.dims()];
        for value in lo..=hi {
            maps[axis][idx] = value;
            if axis == last_axis {
                let ok = ctx.by_last[idx].iter().all(|&j| {
                    for (a, c) in coord.iter_mut().enumerate() {
                        *c = maps[a][ctx.compiled.ones[j][a]] + 1;
                    }
                    ctx.host.get(&coord)
                });
                if !ok {
                    continue;
                }
            }
            if go(ctx, maps, v + 1) {
                return true;
            }
        }
        false
    }

    let ctx = Ctx { compiled: &compiled, host, host_lengths, vars: &vars, by_last: &by_last };
    if go(&ctx, &mut maps, 0) {
        Ok(Some(Occurrence {
            axis_maps: maps.into_iter().map(|m| m.into_iter().map(|v| v + 1).collect()).collect(),
        }))
    } else {
        Ok(None)
    }
}
