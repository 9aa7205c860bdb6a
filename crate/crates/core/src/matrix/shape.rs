use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis lengths of a d-dimensional 0-1 matrix. Always at least one axis and
/// every length is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(lengths: Vec<usize>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidShape("shape needs at least one axis".into()));
        }
        if lengths.contains(&0) {
            return Err(Error::InvalidShape(format!("zero-length axis in {lengths:?}")));
        }
        Ok(Shape(lengths))
    }

    /// The host shape `m x n x ... x n` with `dims` axes: first axis `m`, the
    /// others `n`.
    pub fn first_and_rest(dims: usize, m: usize, n: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidShape("shape needs at least one axis".into()));
        }
        let mut lengths = vec![n; dims];
        lengths[0] = m;
        Shape::new(lengths)
    }

    /// `n x n x ... x n` with `dims` axes.
    pub fn cube(dims: usize, n: usize) -> Result<Self> {
        Shape::first_and_rest(dims, n, n)
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self, axis: usize) -> usize {
        self.0[axis]
    }

    /// Number of entries.
    pub fn volume(&self) -> usize {
        self.0.iter().product()
    }

    /// Checks a 1-based coordinate tuple.
    pub fn contains_coord(&self, coord: &[usize]) -> bool {
        coord.len() == self.dims() && coord.iter().zip(&self.0).all(|(&c, &l)| c >= 1 && c <= l)
    }

    pub(crate) fn check_coord(&self, coord: &[usize]) -> Result<()> {
        if self.contains_coord(coord) {
            Ok(())
        } else {
            Err(Error::CoordinateOutOfRange { coord: coord.to_vec(), shape: self.0.clone() })
        }
    }

    /// Shape with the first axis removed, if any axes remain.
    pub fn drop_first(&self) -> Option<Shape> {
        if self.dims() < 2 {
            None
        } else {
            Some(Shape(self.0[1..].to_vec()))
        }
    }

    /// Row-major flat index of a 1-based coordinate.
    pub(crate) fn flat_index(&self, coord: &[usize]) -> usize {
        coord.iter().zip(&self.0).fold(0, |acc, (&c, &l)| acc * l + (c - 1))
    }

    /// Inverse of [`Shape::flat_index`], writing a 1-based coordinate.
    pub(crate) fn unflatten(&self, mut index: usize, out: &mut [usize]) {
        for axis in (0..self.dims()).rev() {
            let l = self.0[axis];
            out[axis] = index % l + 1;
            index /= l;
        }
    }

    /// All 1-based coordinates in lexicographic order.
    pub fn coords(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.volume()).map(move |i| {
            let mut c = vec![0; self.dims()];
            self.unflatten(i, &mut c);
            c
        })
    }
}

impl TryFrom<Vec<usize>> for Shape {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Shape::new(v)
    }
}

impl From<Shape> for Vec<usize> {
    fn from(s: Shape) -> Vec<usize> {
        s.0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Parses `4x4x3` style shapes.
impl FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lengths = s
            .split(['x', 'X'])
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidShape(format!("bad axis length {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Shape::new(lengths)
    }
}
