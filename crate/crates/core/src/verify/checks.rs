use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BoundReport, Grid, Param, ReportRow, Verifier};
use crate::error::{Error, Result};
use crate::formations::{for_each_member, FormationSpec};
use crate::matrix::{contains, BitMatrix, Pattern, Shape};
use crate::recurrences::formation_binom_bound;
use crate::search::ForbiddenFamily;

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn power(n: usize, e: usize) -> BigInt {
    BigInt::from(n).pow(e as u32)
}

fn params(pairs: &[(&str, usize)]) -> Vec<Param> {
    pairs.iter().map(|&(name, v)| Param::new(name, v)).collect()
}

fn require_nonempty(name: &str, values: &[usize]) -> Result<()> {
    if values.is_empty() || values.contains(&0) {
        return Err(Error::OutOfDomain(format!("grid axis {name} needs positive values")));
    }
    Ok(())
}

/// `(k, k1, k2, k3)` for the partition recurrence; valid when
/// `k2*k3 + 2*k1 - 3*k2 - k3 + 2 == k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionTuple {
    pub k: usize,
    pub k1: usize,
    pub k2: usize,
    pub k3: usize,
}

impl PartitionTuple {
    pub fn new(k: usize, k1: usize, k2: usize, k3: usize) -> Result<Self> {
        let t = PartitionTuple { k, k1, k2, k3 };
        if !t.satisfies_identity() {
            return Err(Error::OutOfDomain(format!("({k},{k1},{k2},{k3}) violates k2*k3 + 2*k1 - 3*k2 - k3 + 2 = k")));
        }
        if [k, k1, k2, k3].contains(&0) {
            return Err(Error::OutOfDomain("partition tuple entries must be positive".into()));
        }
        Ok(t)
    }

    pub fn satisfies_identity(&self) -> bool {
        let [k, k1, k2, k3] = [self.k, self.k1, self.k2, self.k3].map(|v| v as i128);
        k2 * k3 + 2 * k1 - 3 * k2 - k3 + 2 == k
    }
}

/// `g(m) = slope * m + offset` at each `m`.
pub fn affine_g(slope: &BigRational, offset: &BigRational, ms: &[usize]) -> BTreeMap<usize, BigRational> {
    ms.iter().map(|&m| (m, slope * int(m as u64) + offset)).collect()
}

impl Verifier {
    /// `ex(F) <= k (lx_k(F) + n^(d-1))` on hosts `m x n x ... x n`.
    pub fn check_relate(&self, family: &ForbiddenFamily, d: usize, grid: &Grid) -> Result<BoundReport> {
        if family.host_dims() != Some(d) {
            return Err(Error::InvalidFamily(format!("family is not {d}-dimensional")));
        }
        for (name, axis) in [("n", &grid.n), ("m", &grid.m), ("k", &grid.k)] {
            require_nonempty(name, axis)?;
        }
        let mut items = Vec::new();
        for &n in &grid.n {
            for &m in &grid.m {
                for &k in &grid.k {
                    items.push((n, m, k));
                }
            }
        }
        let rows = self.rows(&items, |&(n, m, k)| {
            let shape = Shape::first_and_rest(d, m, n)?;
            let mut t = self.terms();
            let ex = t.ex(&shape, family)?;
            let lx = t.lx(&shape, k, family)?;
            let rhs = int(BigInt::from(k) * (lx + power(n, d - 1)));
            Ok(t.row(
                "main",
                params(&[("n", n), ("m", m), ("k", k)]),
                ex,
                rhs,
                format!("ex({shape})"),
                format!("{k}*(lx{k}({shape})+{n}^{})", d - 1),
            ))
        })?;
        let notes = vec![
            format!("family: {}", family.canonical_string()),
            format!("host: m x n^{} with d={d}", d - 1),
            "letters are confined to the n^(d-1) 1-rows of the host (bounded-column reading in two dimensions)".into(),
        ];
        Ok(BoundReport::new("relate", notes, rows))
    }

    /// Verifies `ex(m x n) <= g(m) + c n` on the grid, then
    /// `lx_k(m x n) <= g(m) / (k - c)` for every `k` in the grid.
    pub fn check_lemma2(
        &self,
        family: &ForbiddenFamily,
        c: &BigRational,
        g: &BTreeMap<usize, BigRational>,
        grid: &Grid,
    ) -> Result<BoundReport> {
        if family.host_dims() != Some(2) {
            return Err(Error::InvalidFamily("the lemma2 check takes two-dimensional families".into()));
        }
        for (name, axis) in [("n", &grid.n), ("m", &grid.m), ("k", &grid.k)] {
            require_nonempty(name, axis)?;
        }
        if let Some(&k) = grid.k.iter().find(|&&k| int(k as u64) <= *c) {
            return Err(Error::OutOfDomain(format!("k={k} must exceed c={c}")));
        }
        if let Some(&m) = grid.m.iter().find(|m| !g.contains_key(m)) {
            return Err(Error::OutOfDomain(format!("g has no value at m={m}")));
        }

        let mut hyp_items = Vec::new();
        for &n in &grid.n {
            for &m in &grid.m {
                hyp_items.push((n, m));
            }
        }
        let mut rows = self.rows(&hyp_items, |&(n, m)| {
            let shape = Shape::first_and_rest(2, m, n)?;
            let mut t = self.terms();
            let ex = t.ex(&shape, family)?;
            let rhs = &g[&m] + c * int(n as u64);
            Ok(t.row(
                "hypothesis",
                params(&[("n", n), ("m", m)]),
                ex,
                rhs,
                format!("ex({shape})"),
                format!("g({m})+c*{n}"),
            ))
        })?;

        let mut notes = vec![
            format!("family: {}", family.canonical_string()),
            format!("c = {c}"),
            format!(
                "g: {}",
                g.iter().filter(|(m, _)| grid.m.contains(m)).map(|(m, v)| format!("g({m})={v}")).collect::<Vec<_>>().join(", ")
            ),
            "lx is evaluated with at most n columns, which bounds the unrestricted value from below".into(),
        ];
        if rows.iter().any(|r| r.outcome == super::Outcome::Fail) {
            notes.push("hypothesis fails on the grid; conclusion rows skipped".into());
            return Ok(BoundReport::new("lemma2", notes, rows));
        }

        let mut items = Vec::new();
        for &n in &grid.n {
            for &m in &grid.m {
                for &k in &grid.k {
                    items.push((n, m, k));
                }
            }
        }
        rows.extend(self.rows(&items, |&(n, m, k)| {
            let shape = Shape::first_and_rest(2, m, n)?;
            let mut t = self.terms();
            let lx = t.lx(&shape, k, family)?;
            let rhs = &g[&m] / (int(k as u64) - c);
            Ok(t.row(
                "conclusion",
                params(&[("n", n), ("m", m), ("k", k)]),
                lx,
                rhs,
                format!("lx{k}({shape})"),
                format!("g({m})/({k}-c)"),
            ))
        })?);
        Ok(BoundReport::new("lemma2", notes, rows))
    }

    /// `lx_s(m x n^d; F_{P,s}) <= ex(n^d; P) * C(m - ceil(s/2), floor(s/2))`
    /// for grid points with `s <= m`.
    pub fn check_binomial(&self, base: &Pattern, grid: &Grid) -> Result<BoundReport> {
        for (name, axis) in [("n", &grid.n), ("m", &grid.m), ("s", &grid.s)] {
            require_nonempty(name, axis)?;
        }
        let d = base.dims();
        let pfam = ForbiddenFamily::of_pattern(base)?;
        let mut items = Vec::new();
        let mut skipped = 0;
        for &n in &grid.n {
            for &m in &grid.m {
                for &s in &grid.s {
                    if s <= m {
                        items.push((n, m, s));
                    } else {
                        skipped += 1;
                    }
                }
            }
        }
        let rows = self.rows(&items, |&(n, m, s)| {
            let host = Shape::first_and_rest(d + 1, m, n)?;
            let fam = ForbiddenFamily::of_formation(base, s)?;
            let mut t = self.terms();
            let lx = t.lx(&host, s, &fam)?;
            let ex = t.ex(&Shape::cube(d, n)?, &pfam)?;
            let binom = formation_binom_bound(m as u64, s as u64)?;
            let rhs = int(ex * BigInt::from(binom.clone()));
            Ok(t.row(
                "main",
                params(&[("n", n), ("m", m), ("s", s)]),
                lx,
                rhs,
                format!("lx{s}({host}; F(P,{s}))"),
                format!("ex({}; P)*{binom}", Shape::cube(d, n)?),
            ))
        })?;
        let mut notes = vec![format!("P = {}", base.canonical_string()), format!("d = {d}")];
        if items.iter().any(|&(_, _, s)| s == 1) {
            notes.push("at s = 1 several letters may share a 1-row, so lx_1 reaches m*ex(n,P,d) and exceeds the bound once m > 1".into());
        }
        if skipped > 0 {
            notes.push(format!("{skipped} grid points with s > m skipped"));
        }
        Ok(BoundReport::new("binomial", notes, rows))
    }

    /// `lx_{2k-1}(2m) <= 2 lx_{2k-1}(m) + 2 lx_k(2m)` against `F_{P,s}`.
    pub fn check_recurrence_doubling(&self, base: &Pattern, s: usize, grid: &Grid) -> Result<BoundReport> {
        if s < 2 {
            return Err(Error::OutOfDomain("the doubling recurrence needs s > 1".into()));
        }
        for (name, axis) in [("n", &grid.n), ("m", &grid.m), ("k", &grid.k)] {
            require_nonempty(name, axis)?;
        }
        let d = base.dims();
        let fam = ForbiddenFamily::of_formation(base, s)?;
        let mut items = Vec::new();
        for &n in &grid.n {
            for &m in &grid.m {
                for &k in &grid.k {
                    items.push((n, m, k));
                }
            }
        }
        let rows = self.rows(&items, |&(n, m, k)| {
            let wide = Shape::first_and_rest(d + 1, 2 * m, n)?;
            let half = Shape::first_and_rest(d + 1, m, n)?;
            let odd = 2 * k - 1;
            let mut t = self.terms();
            let lhs = t.lx(&wide, odd, &fam)?;
            let a = t.lx(&half, odd, &fam)?;
            let b = t.lx(&wide, k, &fam)?;
            let rhs = int(BigInt::from(2) * a + BigInt::from(2) * b);
            Ok(t.row(
                "main",
                params(&[("n", n), ("m", m), ("k", k)]),
                lhs,
                rhs,
                format!("lx{odd}({wide})"),
                format!("2*lx{odd}({half})+2*lx{k}({wide})"),
            ))
        })?;
        let notes = vec![
            format!("P = {}", base.canonical_string()),
            format!("s = {s}"),
            "checked multiplied through by ex(n,P,d)".into(),
        ];
        Ok(BoundReport::new("rec1", notes, rows))
    }

    /// Partition recurrence in multiplied-through form, for grid points with
    /// `t | m`:
    /// `lx_k(m; F_s) <= (1 + m/t)(lx_k(t; F_s) + 2 lx_k1(t; F_{s-1}) + lx_k2(t; F_{s-2})) + lx_k3(1 + m/t; F_s)`.
    pub fn check_recurrence_partition(
        &self,
        base: &Pattern,
        s: usize,
        tuple: PartitionTuple,
        t: usize,
        grid: &Grid,
    ) -> Result<BoundReport> {
        if s < 3 {
            return Err(Error::OutOfDomain("the partition recurrence needs s >= 3".into()));
        }
        if !tuple.satisfies_identity() {
            return Err(Error::OutOfDomain("partition tuple violates its identity".into()));
        }
        if t == 0 {
            return Err(Error::OutOfDomain("t must be positive".into()));
        }
        for (name, axis) in [("n", &grid.n), ("m", &grid.m)] {
            require_nonempty(name, axis)?;
        }
        let d = base.dims();
        let f0 = ForbiddenFamily::of_formation(base, s)?;
        let f1 = ForbiddenFamily::of_formation(base, s - 1)?;
        let f2 = ForbiddenFamily::of_formation(base, s - 2)?;
        let PartitionTuple { k, k1, k2, k3 } = tuple;
        let mut items = Vec::new();
        let mut skipped = 0;
        for &n in &grid.n {
            for &m in &grid.m {
                if m >= t && m % t == 0 {
                    items.push((n, m));
                } else {
                    skipped += 1;
                }
            }
        }
        let rows = self.rows(&items, |&(n, m)| {
            let full = Shape::first_and_rest(d + 1, m, n)?;
            let block = Shape::first_and_rest(d + 1, t, n)?;
            let coarse = Shape::first_and_rest(d + 1, 1 + m / t, n)?;
            let mut terms = self.terms();
            let lhs = terms.lx(&full, k, &f0)?;
            let a = terms.lx(&block, k, &f0)?;
            let b = terms.lx(&block, k1, &f1)?;
            let c = terms.lx(&block, k2, &f2)?;
            let e = terms.lx(&coarse, k3, &f0)?;
            let rhs = int(BigInt::from(1 + m / t) * (a + BigInt::from(2) * b + c) + e);
            Ok(terms.row(
                "main",
                params(&[("n", n), ("m", m)]),
                lhs,
                rhs,
                format!("lx{k}({full}; F(P,{s}))"),
                format!(
                    "{}*(lx{k}({block}; F(P,{s}))+2*lx{k1}({block}; F(P,{}))+lx{k2}({block}; F(P,{})))+lx{k3}({coarse}; F(P,{s}))",
                    1 + m / t,
                    s - 1,
                    s - 2
                ),
            ))
        })?;
        let mut notes = vec![
            format!("P = {}", base.canonical_string()),
            format!("s = {s}, t = {t}, (k,k1,k2,k3) = ({k},{k1},{k2},{k3})"),
            "checked multiplied through by ex(n,P,d)".into(),
        ];
        if skipped > 0 {
            notes.push(format!("{skipped} grid points where t does not divide m skipped"));
        }
        Ok(BoundReport::new("rec2", notes, rows))
    }

    /// `ex(n^(d+1); F_{P,3}) <= 3 (ex(n^d; P) n + n^d)`.
    pub fn check_fp3(&self, base: &Pattern, ns: &[usize]) -> Result<BoundReport> {
        require_nonempty("n", ns)?;
        let d = base.dims();
        let fam = ForbiddenFamily::of_formation(base, 3)?;
        let pfam = ForbiddenFamily::of_pattern(base)?;
        let rows = self.rows(ns, |&n| {
            let host = Shape::cube(d + 1, n)?;
            let small = Shape::cube(d, n)?;
            let mut t = self.terms();
            let lhs = t.ex(&host, &fam)?;
            let ex = t.ex(&small, &pfam)?;
            let rhs = int(BigInt::from(3) * (ex * BigInt::from(n) + power(n, d)));
            Ok(t.row(
                "main",
                params(&[("n", n)]),
                lhs,
                rhs,
                format!("ex({host}; F(P,3))"),
                format!("3*(ex({small}; P)*{n}+{n}^{d})"),
            ))
        })?;
        let notes = vec![format!("P = {}", base.canonical_string())];
        Ok(BoundReport::new("fp3", notes, rows))
    }

    /// Every member of `F_{P',s}` (with `P'` the first-axis projection of the
    /// light pattern `P` and `s` its number of ones) contains `P`. Each host
    /// shape gives an exhaustive row and a row of random stretched members;
    /// both count failures against zero.
    pub fn check_light_reduction(&self, pattern: &Pattern, hosts: &[Shape], trials: usize) -> Result<BoundReport> {
        if pattern.dims() < 2 {
            return Err(Error::OutOfDomain("the light check needs at least two dimensions".into()));
        }
        if pattern.is_empty() || !pattern.is_light() {
            return Err(Error::OutOfDomain(format!("pattern {} is not light", pattern.canonical_string())));
        }
        if let Some(h) = hosts.iter().find(|h| h.dims() != pattern.dims()) {
            return Err(Error::DimensionMismatch { expected: pattern.dims(), actual: h.dims() });
        }
        let s = pattern.count_ones();
        let spec = FormationSpec::new(&pattern.project_first()?, s)?;
        let seed = self.config.seed;
        let items: Vec<(usize, &Shape)> = hosts.iter().enumerate().collect();
        let groups: Vec<(ReportRow, ReportRow)> = self.rows(&items, |&(idx, host)| {
            let mut members = Vec::new();
            for_each_member(host, &spec, |m| members.push(m.clone()))?;
            let mut failures = 0usize;
            for member in &members {
                if !contains(member, pattern)? {
                    failures += 1;
                }
            }
            let mut p: Vec<Param> = host.lengths().iter().enumerate().map(|(a, &l)| Param::new(&format!("l{}", a + 1), l)).collect();
            let exhaustive = ReportRow::compare(
                "members",
                p.clone(),
                int(failures as u64),
                int(0u64),
                format!("members of F(P',{s}) in {host} not containing P"),
                "0".into(),
            )
            .with_note(format!("{} members", members.len()));

            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut stretched_failures = 0usize;
            let mut tried = 0usize;
            if !members.is_empty() {
                for _ in 0..trials {
                    let mut host = members[rng.gen_range(0..members.len())].clone();
                    for _ in 0..rng.gen_range(1..=3) {
                        host = stretch(&host, &mut rng)?;
                    }
                    tried += 1;
                    if !contains(&host, pattern)? {
                        stretched_failures += 1;
                    }
                }
            }
            p.push(Param::new("trials", trials));
            let random = ReportRow::compare(
                "stretched",
                p,
                int(stretched_failures as u64),
                int(0u64),
                format!("random stretched members from {host} not containing P"),
                "0".into(),
            )
            .with_note(format!("{tried} stretched members"));
            Ok((exhaustive, random))
        })?;
        let mut rows = Vec::new();
        for pair in groups {
            rows.push(pair.0);
            rows.push(pair.1);
        }
        let notes = vec![
            format!("P = {}", pattern.canonical_string()),
            format!("s = {s}, P' = {}", spec.base().canonical_string()),
            format!("seed = {seed}"),
        ];
        Ok(BoundReport::new("light", notes, rows))
    }
}

/// Inserts one empty hyperplane at a random axis and position.
fn stretch(host: &BitMatrix, rng: &mut ChaCha8Rng) -> Result<BitMatrix> {
    let axis = rng.gen_range(0..host.dims());
    let position = rng.gen_range(1..=host.shape().len(axis) + 1);
    host.insert_zero_hyperplane(axis, position)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{Outcome, Verdict, VerifyConfig};

    fn verifier() -> Verifier {
        Verifier::new(VerifyConfig::default()).unwrap()
    }

    fn pat(ones: &[&[usize]]) -> Pattern {
        Pattern::from_ones(ones.iter().map(|o| o.to_vec())).unwrap()
    }

    #[test]
    fn partition_identity() {
        assert!(PartitionTuple::new(2, 2, 2, 2).is_ok());
        assert!(PartitionTuple::new(3, 2, 2, 2).is_err());
        assert!(PartitionTuple { k: 3, k1: 2, k2: 2, k3: 2 }.satisfies_identity().eq(&false));
    }

    #[test]
    fn relate_in_one_dimension() {
        let q3 = Pattern::all_ones_line(3).unwrap();
        let fam = ForbiddenFamily::of_pattern(&q3).unwrap();
        let grid = Grid::new().n([1]).m(1..=5).k(1..=3);
        let report = verifier().check_relate(&fam, 1, &grid).unwrap();
        assert_eq!(report.verdict, Verdict::AllPass);
        assert_eq!(report.rows.len(), 15);
        assert!(report.is_consistent());
        assert!(verifier().check_relate(&fam, 2, &grid).is_err());
    }

    #[test]
    fn lemma2_identity() {
        let fam = ForbiddenFamily::of_pattern(&Pattern::identity(2).unwrap()).unwrap();
        let grid = Grid::new().n(1..=3).m(1..=3).k([2, 3]);
        let g: BTreeMap<usize, BigRational> = (1..=3).map(|m| (m, int(2 * m as u64))).collect();
        let c = int(1u64);
        let report = verifier().check_lemma2(&fam, &c, &g, &grid).unwrap();
        assert_eq!(report.verdict, Verdict::AllPass, "{}", report.to_tsv());
        assert_eq!(report.rows.iter().filter(|r| r.check == "conclusion").count(), 18);

        // k must exceed c
        let low = Grid::new().n([1]).m([1]).k([1]);
        assert!(verifier().check_lemma2(&fam, &c, &g, &low).is_err());

        // g = 0 with huge c: hypothesis holds, conclusion lx <= 0 fails
        let zero: BTreeMap<usize, BigRational> = (1..=2).map(|m| (m, int(0u64))).collect();
        let grid = Grid::new().n(1..=2).m(1..=2).k([101]);
        let report = verifier().check_lemma2(&fam, &int(100u64), &zero, &grid).unwrap();
        assert!(report.rows.iter().filter(|r| r.check == "hypothesis").all(|r| r.outcome == Outcome::Pass));
        assert_eq!(report.verdict, Verdict::AllPass, "lx_101 is zero on hosts this small");

        // failing hypothesis skips the conclusion
        let tight: BTreeMap<usize, BigRational> = (1..=3).map(|m| (m, int(0u64))).collect();
        let grid = Grid::new().n(2..=3).m(2..=3).k([2]);
        let report = verifier().check_lemma2(&fam, &int(0u64), &tight, &grid).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report.rows.iter().all(|r| r.check == "hypothesis"));
    }

    #[test]
    fn axis_limit_marks_rows_inconclusive() {
        let cfg = VerifyConfig { max_axis: 3, ..VerifyConfig::default() };
        let v = Verifier::new(cfg).unwrap();
        let base = pat(&[&[1, 1], &[1, 2]]);
        let report = v.check_recurrence_doubling(&base, 2, &Grid::new().n([2]).m([1, 2]).k([1])).unwrap();
        assert_eq!(report.rows[0].outcome, Outcome::Pass);
        assert_eq!(report.rows[1].outcome, Outcome::Inconclusive);
        assert!(report.rows[1].lhs.is_none());
        assert_eq!(report.verdict, Verdict::PassWithGaps);
        assert!(v.check_recurrence_doubling(&base, 1, &Grid::new().n([2]).m([1]).k([1])).is_err());
    }

    #[test]
    fn budget_exhaustion_is_never_a_pass() {
        let cfg = VerifyConfig { budget: crate::search::SearchBudget::new(3, 60.0).unwrap(), ..VerifyConfig::default() };
        let v = Verifier::new(cfg).unwrap();
        let report = v.check_fp3(&Pattern::all_ones_line(2).unwrap(), &[3]).unwrap();
        assert_eq!(report.rows[0].outcome, Outcome::Inconclusive);
        assert_eq!(report.verdict, Verdict::PassWithGaps);
    }

    #[test]
    fn light_inputs() {
        let v = verifier();
        let not_light = pat(&[&[1, 1], &[1, 2]]);
        assert!(v.check_light_reduction(&not_light, &["3x3".parse().unwrap()], 4).is_err());
        let line = Pattern::all_ones_line(2).unwrap();
        assert!(v.check_light_reduction(&line, &["3".parse().unwrap()], 4).is_err());

        let single = pat(&[&[1, 1]]);
        let report = v.check_light_reduction(&single, &["2x2".parse().unwrap()], 4).unwrap();
        assert_eq!(report.verdict, Verdict::AllPass);
        assert_eq!(report.rows[0].note.as_deref(), Some("4 members"));
    }

    #[test]
    fn partition_rejections() {
        let base = pat(&[&[1, 1], &[1, 2]]);
        let tuple = PartitionTuple::new(2, 2, 2, 2).unwrap();
        let grid = Grid::new().n([1]).m([2]);
        assert!(verifier().check_recurrence_partition(&base, 2, tuple, 2, &grid).is_err());
        let bad = PartitionTuple { k: 5, k1: 2, k2: 2, k3: 2 };
        assert!(verifier().check_recurrence_partition(&base, 3, bad, 2, &grid).is_err());
    }
}
