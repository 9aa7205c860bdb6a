//! Line-oriented text formats for patterns and matrices.
//!
//! ```text
//! pat v1            mat v1
//! dim 2             dim 2
//! shape 2 2         shape 3 3
//! ones              dense
//! 1 1               100
//! 2 2               001
//!                   010
//! ```
//!
//! Matrices may use either an `ones` body (one 1-based coordinate tuple per
//! line) or, in two dimensions, a `dense` body of `0`/`1` rows. Blank lines and
//! lines starting with `#` are ignored. Patterns keep their raw shape, empty
//! hyperplanes included; callers normalize where containment is concerned.

use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, Pattern, Shape};

const PATTERN_TAG: &str = "pat v1";
const MATRIX_TAG: &str = "mat v1";

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines { inner: it.peekable() }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.inner.next().ok_or_else(|| perr(0, format!("unexpected end of input, expected {what}")))
    }

    fn keyword(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (no, line) = self.next_line(key)?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(perr(no, format!("expected `{key}`, found {line:?}")));
        }
        Ok((no, parts.collect()))
    }
}

fn parse_numbers(no: usize, parts: &[&str]) -> Result<Vec<usize>> {
    parts.iter().map(|p| p.parse::<usize>().map_err(|_| perr(no, format!("not a number: {p:?}")))).collect()
}

fn parse_header(lines: &mut Lines<'_>, tag: &str) -> Result<Shape> {
    let (no, first) = lines.next_line("header")?;
    if first != tag {
        return Err(perr(no, format!("expected header `{tag}`, found {first:?}")));
    }
    let (no, dim) = lines.keyword("dim")?;
    let dim = parse_numbers(no, &dim)?;
    let [d] = dim[..] else {
        return Err(perr(no, "`dim` takes one number"));
    };
    let (no, lengths) = lines.keyword("shape")?;
    let lengths = parse_numbers(no, &lengths)?;
    if lengths.len() != d {
        return Err(perr(no, format!("shape has {} lengths, dim is {d}", lengths.len())));
    }
    Shape::new(lengths).map_err(|e| perr(no, e.to_string()))
}

fn parse_coords(lines: &mut Lines<'_>, shape: &Shape) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for (no, line) in lines.inner.by_ref() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let coord = parse_numbers(no, &parts)?;
        if !shape.contains_coord(&coord) {
            return Err(perr(no, format!("coordinate {coord:?} outside shape {shape}")));
        }
        out.push(coord);
    }
    Ok(out)
}

pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let mut lines = Lines::new(text);
    let shape = parse_header(&mut lines, PATTERN_TAG)?;
    lines.keyword("ones")?;
    let coords = parse_coords(&mut lines, &shape)?;
    Pattern::new(shape, coords)
}

pub fn parse_matrix(text: &str) -> Result<BitMatrix> {
    let mut lines = Lines::new(text);
    let shape = parse_header(&mut lines, MATRIX_TAG)?;
    let (no, body) = lines.next_line("`ones` or `dense`")?;
    match body {
        "ones" => {
            let coords = parse_coords(&mut lines, &shape)?;
            BitMatrix::from_ones(shape, &coords)
        }
        "dense" => {
            if shape.dims() != 2 {
                return Err(perr(no, "dense bodies are only defined for 2 dimensions"));
            }
            let mut m = BitMatrix::zeros(shape.clone());
            let mut rows = 0;
            for (no, line) in lines.inner.by_ref() {
                rows += 1;
                if rows > shape.len(0) {
                    return Err(perr(no, "too many rows"));
                }
                if line.chars().count() != shape.len(1) {
                    return Err(perr(no, format!("row has {} cells, expected {}", line.len(), shape.len(1))));
                }
                for (j, ch) in line.chars().enumerate() {
                    match ch {
                        '1' => m.set(&[rows, j + 1], true),
                        '0' => {}
                        other => return Err(perr(no, format!("unexpected cell {other:?}"))),
                    }
                }
            }
            if rows != shape.len(0) {
                return Err(perr(no, format!("dense body has {rows} rows, expected {}", shape.len(0))));
            }
            Ok(m)
        }
        other => Err(perr(no, format!("expected `ones` or `dense`, found {other:?}"))),
    }
}

fn header(tag: &str, shape: &Shape) -> String {
    let lengths: Vec<String> = shape.lengths().iter().map(|l| l.to_string()).collect();
    format!("{tag}\ndim {}\nshape {}\n", shape.dims(), lengths.join(" "))
}

fn coord_line(c: &[usize]) -> String {
    let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    parts.join(" ")
}

pub fn write_pattern(p: &Pattern) -> String {
    let mut out = header(PATTERN_TAG, p.shape());
    out.push_str("ones\n");
    for one in p.ones() {
        out.push_str(&coord_line(one));
        out.push('\n');
    }
    out
}

/// Canonical matrix text: `dense` for two dimensions, `ones` otherwise.
pub fn write_matrix(m: &BitMatrix) -> String {
    let mut out = header(MATRIX_TAG, m.shape());
    if m.dims() == 2 {
        out.push_str("dense\n");
        for i in 1..=m.shape().len(0) {
            for j in 1..=m.shape().len(1) {
                out.push(if m.get(&[i, j]) { '1' } else { '0' });
            }
            out.push('\n');
        }
    } else {
        out.push_str("ones\n");
        for one in m.iter_ones() {
            out.push_str(&coord_line(&one));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_round_trip() {
        let text = "pat v1\ndim 2\nshape 3 3\nones\n1 1\n3 3\n";
        let p = parse_pattern(text).unwrap();
        assert_eq!(p.shape().lengths(), &[3, 3]);
        assert_eq!(p.count_ones(), 2);
        assert_eq!(write_pattern(&p), text);
    }

    #[test]
    fn matrix_dense_and_sparse() {
        let dense = "mat v1\ndim 2\nshape 2 3\ndense\n100\n011\n";
        let m = parse_matrix(dense).unwrap();
        assert_eq!(write_matrix(&m), dense);
        let sparse = "mat v1\ndim 2\nshape 2 3\nones\n1 1\n2 2\n2 3\n";
        assert_eq!(parse_matrix(sparse).unwrap(), m);

        let three = "mat v1\ndim 3\nshape 2 2 2\nones\n1 2 1\n2 2 2\n";
        assert_eq!(write_matrix(&parse_matrix(three).unwrap()), three);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# identity\npat v1\n\ndim 2\nshape 2 2\nones\n1 1\n# second\n2 2\n";
        assert_eq!(parse_pattern(text).unwrap(), Pattern::identity(2).unwrap());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_pattern("pat v1\ndim 2\nshape 2 2\nones\n1 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err:?}");
        assert!(parse_pattern("mat v1\n").is_err());
        assert!(parse_pattern("pat v1\ndim 2\nshape 2\nones\n").is_err());
        assert!(parse_matrix("mat v1\ndim 2\nshape 2 2\ndense\n10\n").is_err());
        assert!(parse_matrix("mat v1\ndim 2\nshape 2 2\ndense\n10\n0x\n").is_err());
        assert!(parse_matrix("mat v1\ndim 3\nshape 1 1 1\ndense\n1\n").is_err());
    }
}
