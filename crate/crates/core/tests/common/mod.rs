//! Reference implementations used as oracles. They follow the definitions
//! directly and share no matching or search code with the library.
#![allow(dead_code)]

use formex::formations::{brute_force_formation, FormationSpec};
use formex::{BitMatrix, Pattern, Shape};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Brute-force formation checks are refused above this many candidates.
pub const BRUTE_CAP: u128 = 1_000_000_000;

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Replaces each coordinate by its rank among the values used on its axis,
/// which deletes empty hyperplanes. Output is sorted.
pub fn compress(points: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let dims = points.first().map_or(0, |p| p.len());
    let mut out: Vec<Vec<usize>> = points.to_vec();
    for axis in 0..dims {
        let mut used: Vec<usize> = points.iter().map(|p| p[axis]).collect();
        used.sort_unstable();
        used.dedup();
        for (o, p) in out.iter_mut().zip(points) {
            o[axis] = used.binary_search(&p[axis]).unwrap() + 1;
        }
    }
    out.sort();
    out
}

/// Containment by definition: some `|P|` ones of the host, after deleting
/// empty hyperplanes, are exactly the ones of `P` after the same deletion.
pub fn naive_contains(host: &BitMatrix, pattern: &Pattern) -> bool {
    let target = compress(&pattern.ones().cloned().collect::<Vec<_>>());
    if target.is_empty() {
        return true;
    }
    let ones: Vec<Vec<usize>> = host.iter_ones().collect();
    if ones.len() < target.len() {
        return false;
    }
    subsets(ones.len(), target.len()).into_iter().any(|idx| {
        let chosen: Vec<Vec<usize>> = idx.iter().map(|&i| ones[i].clone()).collect();
        compress(&chosen) == target
    })
}

/// Every 0-1 matrix of `shape`, as the bit pattern of its row-major cells.
pub fn all_matrices(shape: &Shape) -> impl Iterator<Item = BitMatrix> + '_ {
    let cells = shape.volume();
    assert!(cells <= 20, "enumeration oracle limited to 20 cells");
    let coords: Vec<Vec<usize>> = shape.coords().collect();
    (0u64..1 << cells).map(move |bits| {
        let mut m = BitMatrix::zeros(shape.clone());
        for (i, c) in coords.iter().enumerate() {
            if bits >> i & 1 == 1 {
                m.set(c, true);
            }
        }
        m
    })
}

/// The forbidden configurations an oracle understands.
#[derive(Clone, Debug)]
pub enum Forbidden {
    Pattern(Pattern),
    Formation(FormationSpec),
    Doubled { r: usize, s: usize },
}

pub fn avoids(host: &BitMatrix, family: &[Forbidden]) -> bool {
    family.iter().all(|f| match f {
        Forbidden::Pattern(p) => !naive_contains(host, p),
        Forbidden::Formation(spec) => !brute_force_formation(host, spec, BRUTE_CAP).expect("within cap"),
        Forbidden::Doubled { r, s } => !naive_doubled(host, *r, *s),
    })
}

/// Number of ones per 1-row (all coordinates but the first fixed).
pub fn first_axis_counts(host: &BitMatrix) -> Vec<usize> {
    let mut counts = std::collections::BTreeMap::new();
    for one in host.iter_ones() {
        *counts.entry(one[1..].to_vec()).or_insert(0usize) += 1;
    }
    counts.into_values().collect()
}

/// Maximum ones over all avoiding matrices of `shape`.
pub fn ex_oracle(shape: &Shape, family: &[Forbidden]) -> usize {
    all_matrices(shape).filter(|m| avoids(m, family)).map(|m| m.count_ones()).max().unwrap_or(0)
}

/// Maximum number of letters: every avoiding shadow holds
/// `sum over 1-rows of floor(ones / k)` letters of `k` occurrences each.
pub fn lx_oracle(shape: &Shape, k: usize, family: &[Forbidden]) -> usize {
    all_matrices(shape)
        .filter(|m| avoids(m, family))
        .map(|m| first_axis_counts(&m).iter().map(|c| c / k).sum::<usize>())
        .max()
        .unwrap_or(0)
}

/// Doubled formation by definition: `r` columns and an `s`-partition of the
/// rows into consecutive intervals such that each column has one one in the
/// first and last interval and two in every other interval.
pub fn naive_doubled(host: &BitMatrix, r: usize, s: usize) -> bool {
    let rows = host.shape().len(0);
    let cols = host.shape().len(1);
    if rows < s {
        return false;
    }
    // cut positions 1 <= c_1 < ... < c_{s-1} < rows; interval i is (c_{i-1}, c_i]
    for cuts in subsets(rows - 1, s - 1) {
        let mut bounds = vec![0];
        bounds.extend(cuts.iter().map(|c| c + 1));
        bounds.push(rows);
        let good_cols = (1..=cols)
            .filter(|&c| {
                (0..s).all(|i| {
                    let need = if i == 0 || i == s - 1 { 1 } else { 2 };
                    let have = (bounds[i] + 1..=bounds[i + 1]).filter(|&t| host.get(&[t, c])).count();
                    have >= need
                })
            })
            .count();
        if good_cols >= r {
            return true;
        }
    }
    false
}

/// A random pattern with `1..=max_ones` ones inside `box_len^dims`.
pub fn random_pattern(rng: &mut ChaCha8Rng, dims: usize, box_len: usize, max_ones: usize) -> Pattern {
    let count = rng.gen_range(1..=max_ones);
    let ones: Vec<Vec<usize>> = (0..count).map(|_| (0..dims).map(|_| rng.gen_range(1..=box_len)).collect()).collect();
    Pattern::from_ones(ones).expect("nonempty")
}

/// A random host of `shape` with each cell set with probability `density`.
pub fn random_host(rng: &mut ChaCha8Rng, shape: &Shape, density: f64) -> BitMatrix {
    let mut m = BitMatrix::zeros(shape.clone());
    for c in shape.coords() {
        if rng.gen_bool(density) {
            m.set(&c, true);
        }
    }
    m
}
