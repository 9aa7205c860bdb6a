//! Integer recurrences and the Ackermann hierarchy.
//!
//! `R_s(j)` and `D_s(j)` are the thresholds on the letter multiplicity `k`
//! above which the formation bounds apply. Both grow quickly in `s` and `j`,
//! so everything is arbitrary precision.
//!
//! The Ackermann hierarchy uses the Davenport-Schinzel convention
//! `a_1(n) = 2n`, `a_j(1) = 2`, `a_j(n) = a_{j-1}(a_j(n-1))`. Its inverses are
//! `alpha_j(n) = min { k >= 1 : a_j(k) >= n }` and
//! `alpha(n) = min { j >= 1 : alpha_j(n) <= 3 }`. Other conventions shift
//! `alpha` by a constant.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RecurrenceKind {
    R,
    D,
}

impl fmt::Display for RecurrenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecurrenceKind::R => "R",
            RecurrenceKind::D => "D",
        })
    }
}

impl FromStr for RecurrenceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(RecurrenceKind::R),
            "D" | "d" => Ok(RecurrenceKind::D),
            other => Err(Error::OutOfDomain(format!("unknown recurrence kind {other:?}"))),
        }
    }
}

fn check_domain(s: u32, j: u32) -> Result<()> {
    if s < 1 || j < 2 {
        return Err(Error::OutOfDomain(format!("recurrences need s >= 1 and j >= 2 (got s={s}, j={j})")));
    }
    Ok(())
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

/// Memoized values of one recurrence over `1..=s_max` x `2..=j_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceTable {
    kind: RecurrenceKind,
    values: BTreeMap<(u32, u32), BigUint>,
}

impl RecurrenceTable {
    pub fn build(kind: RecurrenceKind, s_max: u32, j_max: u32) -> Result<Self> {
        check_domain(s_max, j_max)?;
        let r = build_r(s_max, j_max);
        let values = match kind {
            RecurrenceKind::R => r,
            RecurrenceKind::D => build_d(&r, s_max, j_max),
        };
        Ok(RecurrenceTable { kind, values })
    }

    pub fn kind(&self) -> RecurrenceKind {
        self.kind
    }

    pub fn get(&self, s: u32, j: u32) -> Option<&BigUint> {
        self.values.get(&(s, j))
    }

    /// Entries in `(s, j)` order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &BigUint)> {
        self.values.iter().map(|(&(s, j), v)| (s, j, v))
    }

    /// Tab-separated export with header `kind s j value`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("kind\ts\tj\tvalue\n");
        for (s, j, v) in self.iter() {
            out.push_str(&format!("{}\t{s}\t{j}\t{v}\n", self.kind));
        }
        out
    }
}

fn to_unsigned(v: BigInt) -> BigUint {
    assert!(!v.is_negative(), "recurrence produced a negative value");
    v.to_biguint().expect("nonnegative")
}

fn build_r(s_max: u32, j_max: u32) -> BTreeMap<(u32, u32), BigUint> {
    let mut t: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    for j in 2..=j_max {
        for s in 1..=s_max {
            let v = match (s, j) {
                (1, _) => BigInt::from(2),
                (2, _) => BigInt::from(3),
                (_, 2) => pow2(s - 1) + 1,
                _ => {
                    let prev = &t[&(s, j - 1)];
                    let r2 = &t[&(s - 2, j)];
                    let r1 = &t[&(s - 1, j)];
                    prev * r2 + 2 * r1 - 3 * r2 - prev + 2
                }
            };
            t.insert((s, j), v);
        }
    }
    t.into_iter().map(|(k, v)| (k, to_unsigned(v))).collect()
}

fn build_d(r: &BTreeMap<(u32, u32), BigUint>, s_max: u32, j_max: u32) -> BTreeMap<(u32, u32), BigUint> {
    let mut t: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    for j in 2..=j_max {
        for s in 1..=s_max {
            let v = match (s, j) {
                (1, _) => BigInt::zero(),
                (2, _) => BigInt::from(2),
                (_, 2) => pow2(s - 1) + pow2(s - 2) - 1,
                _ => {
                    let r_prev = BigInt::from(r[&(s, j - 1)].clone());
                    2 * &t[&(s - 1, j)] + (&t[&(s - 2, j)] + 1) * (&r_prev - 3) + &t[&(s, j - 1)] - &r_prev + 1
                }
            };
            t.insert((s, j), v);
        }
    }
    t.into_iter().map(|(k, v)| (k, to_unsigned(v))).collect()
}

/// `R_s(j)` for `s >= 1`, `j >= 2`.
pub fn r_value(s: u32, j: u32) -> Result<BigUint> {
    check_domain(s, j)?;
    Ok(build_r(s, j).remove(&(s, j)).expect("entry built"))
}

/// `D_s(j)` for `s >= 1`, `j >= 2`.
pub fn d_value(s: u32, j: u32) -> Result<BigUint> {
    check_domain(s, j)?;
    let r = build_r(s, j);
    Ok(build_d(&r, s, j).remove(&(s, j)).expect("entry built"))
}

pub fn recurrence_value(kind: RecurrenceKind, s: u32, j: u32) -> Result<BigUint> {
    match kind {
        RecurrenceKind::R => r_value(s, j),
        RecurrenceKind::D => d_value(s, j),
    }
}

/// Default magnitude cap for [`ack`].
pub const ACK_GUARD: u128 = u64::MAX as u128;

/// `a_j(n)`, or [`Error::ExceedsGuard`] once any intermediate value passes
/// [`ACK_GUARD`].
pub fn ack(j: u32, n: u128) -> Result<u128> {
    ack_guarded(j, n, ACK_GUARD)
}

/// `a_j(n)` with an explicit magnitude cap.
pub fn ack_guarded(j: u32, n: u128, guard: u128) -> Result<u128> {
    if j < 1 || n < 1 {
        return Err(Error::OutOfDomain(format!("ack needs j, n >= 1 (got j={j}, n={n})")));
    }
    let exceeded = Error::ExceedsGuard { guard };
    if j == 1 {
        return n.checked_mul(2).filter(|&v| v <= guard).ok_or(exceeded);
    }
    let mut v: u128 = 2;
    if v > guard {
        return Err(exceeded);
    }
    for _ in 1..n {
        v = ack_guarded(j - 1, v, guard)?;
    }
    Ok(v)
}

/// `alpha_j(n) = min { k >= 1 : a_j(k) >= n }`.
pub fn alpha_j(j: u32, n: u128) -> Result<u128> {
    if j < 1 || n < 1 {
        return Err(Error::OutOfDomain(format!("alpha_j needs j, n >= 1 (got j={j}, n={n})")));
    }
    if j == 1 {
        return Ok(n.div_ceil(2).max(1));
    }
    let mut v: u128 = 2;
    let mut k: u128 = 1;
    while v < n {
        k += 1;
        v = match ack_guarded(j - 1, v, n) {
            Ok(next) => next,
            // past the guard means past n
            Err(Error::ExceedsGuard { .. }) => break,
            Err(e) => return Err(e),
        };
    }
    Ok(k)
}

/// `alpha(n) = min { j >= 1 : alpha_j(n) <= 3 }`.
pub fn alpha(n: u128) -> Result<u32> {
    if n < 1 {
        return Err(Error::OutOfDomain("alpha needs n >= 1".into()));
    }
    let mut j = 1;
    while alpha_j(j, n)? > 3 {
        j += 1;
    }
    Ok(j)
}

/// `C(a, b)` with `C(a, 0) = 1` and `C(a, b) = 0` for `b > a`.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc = acc * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    acc
}

/// The binomial factor `C(m - ceil(s/2), floor(s/2))` of the formation bound.
pub fn formation_binom_bound(m: u64, s: u64) -> Result<BigUint> {
    if s < 1 || m < 1 || s > m {
        return Err(Error::OutOfDomain(format!("formation bound needs 1 <= s <= m (got m={m}, s={s})")));
    }
    Ok(binomial(m - s.div_ceil(2), s / 2))
}
