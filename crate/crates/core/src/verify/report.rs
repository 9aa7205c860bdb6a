use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One named grid coordinate of a report row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: u64,
}

impl Param {
    pub fn new(name: &str, value: impl TryInto<u64>) -> Self {
        let value = value.try_into().ok().expect("grid parameters fit in u64");
        Param { name: name.to_string(), value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AllPass,
    PassWithGaps,
    Fail,
}

impl Verdict {
    /// Fail dominates; otherwise any inconclusive row leaves a gap.
    pub fn aggregate<'a>(outcomes: impl IntoIterator<Item = &'a Outcome>) -> Verdict {
        let mut verdict = Verdict::AllPass;
        for o in outcomes {
            match o {
                Outcome::Fail => return Verdict::Fail,
                Outcome::Inconclusive => verdict = Verdict::PassWithGaps,
                Outcome::Pass => {}
            }
        }
        verdict
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AllPass => "all_pass",
            Verdict::PassWithGaps => "pass_with_gaps",
            Verdict::Fail => "fail",
        })
    }
}

mod rational_text {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(r) => ser.serialize_some(&r.to_string()),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Option<BigRational>, D::Error> {
        let text: Option<String> = Option::deserialize(de)?;
        text.map(|t| super::parse_rational(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Parses `"7"` or `"7/2"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse { line: 0, msg: format!("not a rational: {text:?}") };
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a, b),
        None => (text, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// One grid instance. `lhs` and `rhs` are absent exactly when the row is
/// inconclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub check: String,
    pub params: Vec<Param>,
    #[serde(with = "rational_text")]
    pub lhs: Option<BigRational>,
    #[serde(with = "rational_text")]
    pub rhs: Option<BigRational>,
    pub outcome: Outcome,
    pub lhs_source: String,
    pub rhs_source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReportRow {
    /// Row asserting `lhs <= rhs`.
    pub fn compare(
        check: &str,
        params: Vec<Param>,
        lhs: BigRational,
        rhs: BigRational,
        lhs_source: String,
        rhs_source: String,
    ) -> Self {
        let outcome = if lhs <= rhs { Outcome::Pass } else { Outcome::Fail };
        ReportRow { check: check.into(), params, lhs: Some(lhs), rhs: Some(rhs), outcome, lhs_source, rhs_source, note: None }
    }

    pub fn inconclusive(check: &str, params: Vec<Param>, lhs_source: String, rhs_source: String, reason: String) -> Self {
        ReportRow {
            check: check.into(),
            params,
            lhs: None,
            rhs: None,
            outcome: Outcome::Inconclusive,
            lhs_source,
            rhs_source,
            note: Some(reason),
        }
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }

    /// Recomputes the outcome from the stored values.
    pub fn recomputed_outcome(&self) -> Outcome {
        match (&self.lhs, &self.rhs) {
            (Some(l), Some(r)) if l <= r => Outcome::Pass,
            (Some(_), Some(_)) => Outcome::Fail,
            _ => Outcome::Inconclusive,
        }
    }

    fn params_text(&self) -> String {
        let parts: Vec<String> = self.params.iter().map(|p| format!("{}={}", p.name, p.value)).collect();
        parts.join(",")
    }
}

/// Result of sweeping one inequality over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub engine_version: String,
    pub metadata: Vec<String>,
    pub grid: Vec<Vec<Param>>,
    pub rows: Vec<ReportRow>,
    pub verdict: Verdict,
}

impl BoundReport {
    pub fn new(bound_id: &str, metadata: Vec<String>, rows: Vec<ReportRow>) -> Self {
        let grid = rows.iter().map(|r| r.params.clone()).collect();
        let verdict = Verdict::aggregate(rows.iter().map(|r| &r.outcome));
        BoundReport {
            bound_id: bound_id.into(),
            engine_version: crate::search::ENGINE_VERSION.into(),
            metadata,
            grid,
            rows,
            verdict,
        }
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.rows.iter().filter(|r| r.outcome == outcome).count()
    }

    /// True when the verdict and every row outcome follow from the row values.
    pub fn is_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.outcome == r.recomputed_outcome())
            && self.verdict == Verdict::aggregate(self.rows.iter().map(|r| &r.outcome))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# bound\t{}\n# engine\t{}\n", self.bound_id, self.engine_version);
        for note in &self.metadata {
            out.push_str(&format!("# note\t{note}\n"));
        }
        out.push_str(&format!("# verdict\t{}\n", self.verdict));
        out.push_str("check\tparams\tlhs\trhs\toutcome\tlhs_source\trhs_source\tnote\n");
        for row in &self.rows {
            let show = |v: &Option<BigRational>| v.as_ref().map_or_else(|| "-".to_string(), |r| r.to_string());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                row.check,
                row.params_text(),
                show(&row.lhs),
                show(&row.rhs),
                row.outcome,
                row.lhs_source,
                row.rhs_source,
                row.note.as_deref().unwrap_or("")
            ));
        }
        out
    }
}
