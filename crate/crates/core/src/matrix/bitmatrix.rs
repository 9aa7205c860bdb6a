use std::fmt;

use super::pattern::{check_permutation, permute};
use super::{Pattern, Shape};
use crate::error::{Error, Result};

/// Dense d-dimensional 0-1 matrix. Each line along the last axis is packed
/// into `ceil(len_last / 64)` words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    shape: Shape,
    words_per_line: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(shape: Shape) -> Self {
        let last = shape.len(shape.dims() - 1);
        let words_per_line = last.div_ceil(64);
        let lines = shape.volume() / last;
        BitMatrix { shape, words_per_line, words: vec![0; lines * words_per_line] }
    }

    pub fn ones(shape: Shape) -> Self {
        let mut m = BitMatrix::zeros(shape);
        for i in 0..m.shape.volume() {
            m.set_flat(i, true);
        }
        m
    }

    pub fn from_ones<'a, I>(shape: Shape, ones: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Vec<usize>>,
    {
        let mut m = BitMatrix::zeros(shape);
        for one in ones {
            m.shape.check_coord(one)?;
            m.set(one, true);
        }
        Ok(m)
    }

    /// Builds a 2-dimensional matrix from rows of `0`/`1`.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.len());
        let shape = Shape::new(vec![rows.len(), width])?;
        let mut m = BitMatrix::zeros(shape);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidShape("ragged rows".into()));
            }
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '1' => m.set(&[i + 1, j + 1], true),
                    '0' => {}
                    other => return Err(Error::InvalidShape(format!("unexpected cell {other:?}"))),
                }
            }
        }
        Ok(m)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> usize {
        self.shape.dims()
    }

    #[inline]
    fn locate(&self, flat: usize) -> (usize, u64) {
        let last = self.shape.len(self.shape.dims() - 1);
        let line = flat / last;
        let bit = flat % last;
        (line * self.words_per_line + bit / 64, 1u64 << (bit % 64))
    }

    /// Entry at a 1-based coordinate. Panics if the coordinate is outside the shape.
    #[inline]
    pub fn get(&self, coord: &[usize]) -> bool {
        debug_assert!(self.shape.contains_coord(coord), "{coord:?} outside {}", self.shape);
        self.get_flat(self.shape.flat_index(coord))
    }

    #[inline]
    pub fn set(&mut self, coord: &[usize], value: bool) {
        debug_assert!(self.shape.contains_coord(coord), "{coord:?} outside {}", self.shape);
        let flat = self.shape.flat_index(coord);
        self.set_flat(flat, value);
    }

    /// Entry at a row-major flat index.
    #[inline]
    pub fn get_flat(&self, flat: usize) -> bool {
        let (w, mask) = self.locate(flat);
        self.words[w] & mask != 0
    }

    #[inline]
    pub fn set_flat(&mut self, flat: usize, value: bool) {
        let (w, mask) = self.locate(flat);
        if value {
            self.words[w] |= mask;
        } else {
            self.words[w] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 1-based coordinates of all ones, in lexicographic order.
    pub fn iter_ones(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.shape.volume()).filter(|&i| self.get_flat(i)).map(move |i| {
            let mut c = vec![0; self.dims()];
            self.shape.unflatten(i, &mut c);
            c
        })
    }

    /// Entrywise `self <= other`.
    pub fn is_submatrix_of(&self, other: &BitMatrix) -> bool {
        self.shape == other.shape && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// The matrix read as a pattern (same shape, same ones).
    pub fn to_pattern(&self) -> Pattern {
        Pattern::new(self.shape.clone(), self.iter_ones()).expect("ones lie inside the shape")
    }

    /// OR-projection along the first axis.
    pub fn project_first(&self) -> Result<BitMatrix> {
        let shape = self
            .shape
            .drop_first()
            .ok_or_else(|| Error::OutOfDomain("cannot project a 1-dimensional matrix".into()))?;
        let mut out = BitMatrix::zeros(shape);
        for one in self.iter_ones() {
            out.set(&one[1..], true);
        }
        Ok(out)
    }

    /// Axis `i` of the result is axis `perm[i]` (1-based) of `self`.
    pub fn transpose_dims(&self, perm: &[usize]) -> Result<BitMatrix> {
        check_permutation(perm, self.dims())?;
        let shape = Shape::new(perm.iter().map(|&p| self.shape.len(p - 1)).collect())?;
        let mut out = BitMatrix::zeros(shape);
        for one in self.iter_ones() {
            out.set(&permute(&one, perm), true);
        }
        Ok(out)
    }

    /// Inserts an all-zero hyperplane along `axis` (0-based) so that it becomes
    /// index `position` (1-based, `1..=len+1`) of the new axis.
    pub fn insert_zero_hyperplane(&self, axis: usize, position: usize) -> Result<BitMatrix> {
        if axis >= self.dims() || position == 0 || position > self.shape.len(axis) + 1 {
            return Err(Error::OutOfDomain(format!("hyperplane {position} on axis {axis}")));
        }
        let mut lengths = self.shape.lengths().to_vec();
        lengths[axis] += 1;
        let mut out = BitMatrix::zeros(Shape::new(lengths)?);
        for mut one in self.iter_ones() {
            if one[axis] >= position {
                one[axis] += 1;
            }
            out.set(&one, true);
        }
        Ok(out)
    }

    /// Lines along the first axis ("1-rows"): for every coordinate of the
    /// remaining axes, the sorted list of first coordinates holding a one.
    /// Indexed by the row-major flat index of the remaining coordinates.
    pub fn first_axis_lines(&self) -> Vec<Vec<usize>> {
        let m = self.shape.len(0);
        let rest = self.shape.volume() / m;
        let mut lines = vec![Vec::new(); rest];
        for t in 0..m {
            for (r, line) in lines.iter_mut().enumerate() {
                if self.get_flat(t * rest + r) {
                    line.push(t + 1);
                }
            }
        }
        lines
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}; ", self.shape)?;
        let ones: Vec<Vec<usize>> = self.iter_ones().collect();
        write!(f, "{ones:?})")
    }
}
