use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BitMatrix, Shape};
use crate::error::{Error, Result};

/// A sparse d-dimensional 0-1 matrix: a shape plus the 1-based coordinates of
/// its ones. Ones are kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern {
    shape: Shape,
    ones: BTreeSet<Vec<usize>>,
}

impl Pattern {
    pub fn new<I>(shape: Shape, ones: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut set = BTreeSet::new();
        for one in ones {
            shape.check_coord(&one)?;
            set.insert(one);
        }
        Ok(Pattern { shape, ones: set })
    }

    /// Pattern whose shape is the bounding box of the given ones.
    pub fn from_ones<I>(ones: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let ones: Vec<Vec<usize>> = ones.into_iter().collect();
        let dims = ones.first().map(Vec::len).ok_or(Error::EmptyPattern)?;
        let mut lengths = vec![1; dims];
        for one in &ones {
            if one.len() != dims {
                return Err(Error::DimensionMismatch { expected: dims, actual: one.len() });
            }
            for (l, &c) in lengths.iter_mut().zip(one) {
                *l = (*l).max(c);
            }
        }
        Pattern::new(Shape::new(lengths)?, ones)
    }

    /// The 1-dimensional all-ones pattern of length `r`.
    pub fn all_ones_line(r: usize) -> Result<Self> {
        Pattern::new(Shape::new(vec![r])?, (1..=r).map(|i| vec![i]))
    }

    /// The `k x k` identity permutation pattern.
    pub fn identity(k: usize) -> Result<Self> {
        Pattern::new(Shape::new(vec![k, k])?, (1..=k).map(|i| vec![i, i]))
    }

    /// `A_t`: the `2 x t` pattern with a one wherever `i + j` is even.
    pub fn alternating(t: usize) -> Result<Self> {
        if t < 1 {
            return Err(Error::OutOfDomain("A_t needs t >= 1".into()));
        }
        let ones = (1..=2)
            .flat_map(|i| (1..=t).map(move |j| (i, j)))
            .filter(|(i, j)| (i + j) % 2 == 0)
            .map(|(i, j)| vec![i, j]);
        Pattern::new(Shape::new(vec![2, t])?, ones)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> usize {
        self.shape.dims()
    }

    /// Ones in lexicographic order.
    pub fn ones(&self) -> impl ExactSizeIterator<Item = &Vec<usize>> + DoubleEndedIterator {
        self.ones.iter()
    }

    pub fn count_ones(&self) -> usize {
        self.ones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ones.is_empty()
    }

    pub fn contains_one(&self, coord: &[usize]) -> bool {
        self.ones.contains(coord)
    }

    /// For every axis except the last, no two ones share that coordinate.
    pub fn is_light(&self) -> bool {
        let d = self.dims();
        (0..d.saturating_sub(1)).all(|axis| {
            let mut seen = BTreeSet::new();
            self.ones.iter().all(|one| seen.insert(one[axis]))
        })
    }

    /// Deletes the first coordinate of every one, merging ones that collide.
    pub fn project_first(&self) -> Result<Pattern> {
        let shape = self
            .shape
            .drop_first()
            .ok_or_else(|| Error::OutOfDomain("cannot project a 1-dimensional pattern".into()))?;
        Pattern::new(shape, self.ones.iter().map(|one| one[1..].to_vec()))
    }

    /// Axis `i` of the result is axis `perm[i]` (1-based) of `self`.
    pub fn transpose_dims(&self, perm: &[usize]) -> Result<Pattern> {
        check_permutation(perm, self.dims())?;
        let shape = Shape::new(perm.iter().map(|&p| self.shape.len(p - 1)).collect())?;
        Pattern::new(shape, self.ones.iter().map(|one| permute(one, perm)))
    }

    /// Deletes every all-zero hyperplane.
    pub fn normalize(&self) -> Result<Pattern> {
        if self.ones.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let d = self.dims();
        // rank[axis][c] = 1-based position of coordinate c among used coordinates
        let mut used: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); d];
        for one in &self.ones {
            for (axis, &c) in one.iter().enumerate() {
                used[axis].insert(c);
            }
        }
        let ranks: Vec<Vec<usize>> = used
            .iter()
            .zip(self.shape.lengths())
            .map(|(set, &len)| {
                let mut rank = vec![0; len + 1];
                for (i, &c) in set.iter().enumerate() {
                    rank[c] = i + 1;
                }
                rank
            })
            .collect();
        let shape = Shape::new(used.iter().map(BTreeSet::len).collect())?;
        Pattern::new(
            shape,
            self.ones
                .iter()
                .map(|one| one.iter().enumerate().map(|(axis, &c)| ranks[axis][c]).collect()),
        )
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize().map(|n| &n == self).unwrap_or(false)
    }

    pub fn to_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.shape.clone());
        for one in &self.ones {
            m.set(one, true);
        }
        m
    }

    /// Compact single-line rendering, also used inside cache keys:
    /// `2x2:(1,1)(2,2)`.
    pub fn canonical_string(&self) -> String {
        let mut s = self.shape.to_string();
        s.push(':');
        for one in &self.ones {
            let parts: Vec<String> = one.iter().map(|c| c.to_string()).collect();
            s.push('(');
            s.push_str(&parts.join(","));
            s.push(')');
        }
        s
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

pub(crate) fn check_permutation(perm: &[usize], dims: usize) -> Result<()> {
    let mut seen = vec![false; dims];
    if perm.len() != dims {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p == 0 || p > dims || seen[p - 1] {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

pub(crate) fn permute(coord: &[usize], perm: &[usize]) -> Vec<usize> {
    perm.iter().map(|&p| coord[p - 1]).collect()
}
