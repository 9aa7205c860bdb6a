use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formations::{DoubledSpec, FormationSpec};
use crate::matrix::Pattern;

/// A forbidden family: plain patterns, (P, s)-formation families and doubled
/// (r, s)-formation families, all living in hosts of one dimension.
///
/// Members are canonicalized on insertion (patterns normalized, everything
/// kept sorted and deduplicated), so two families built in different orders
/// compare equal and share cache keys.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ForbiddenFamily {
    patterns: BTreeSet<Pattern>,
    formations: BTreeSet<FormationSpec>,
    doubled: BTreeSet<DoubledSpec>,
}

impl ForbiddenFamily {
    pub fn new() -> Self {
        ForbiddenFamily::default()
    }

    pub fn of_pattern(pattern: &Pattern) -> Result<Self> {
        ForbiddenFamily::new().with_pattern(pattern)
    }

    pub fn of_formation(base: &Pattern, s: usize) -> Result<Self> {
        ForbiddenFamily::new().with_formation(FormationSpec::new(base, s)?)
    }

    pub fn with_pattern(mut self, pattern: &Pattern) -> Result<Self> {
        let norm = pattern.normalize()?;
        self.check_dims(norm.dims())?;
        self.patterns.insert(norm);
        Ok(self)
    }

    pub fn with_formation(mut self, spec: FormationSpec) -> Result<Self> {
        self.check_dims(spec.host_dims())?;
        self.formations.insert(spec);
        Ok(self)
    }

    pub fn with_doubled(mut self, spec: DoubledSpec) -> Result<Self> {
        self.check_dims(2)?;
        self.doubled.insert(spec);
        Ok(self)
    }

    fn check_dims(&self, dims: usize) -> Result<()> {
        match self.host_dims() {
            Some(d) if d != dims => Err(Error::InvalidFamily(format!(
                "member lives in {dims}-dimensional hosts, family in {d}-dimensional hosts"
            ))),
            _ => Ok(()),
        }
    }

    /// Dimension of the hosts, `None` for the empty family.
    pub fn host_dims(&self) -> Option<usize> {
        self.patterns
            .iter()
            .map(Pattern::dims)
            .chain(self.formations.iter().map(FormationSpec::host_dims))
            .chain((!self.doubled.is_empty()).then_some(2))
            .next()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty() && self.formations.is_empty() && self.doubled.is_empty()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.patterns.iter()
    }

    pub fn formations(&self) -> impl Iterator<Item = &FormationSpec> {
        self.formations.iter()
    }

    pub fn doubled(&self) -> impl Iterator<Item = &DoubledSpec> {
        self.doubled.iter()
    }

    /// Stable textual form used in cache keys and reports.
    pub fn canonical_string(&self) -> String {
        let pats: Vec<String> = self.patterns.iter().map(Pattern::canonical_string).collect();
        let forms: Vec<String> =
            self.formations.iter().map(|f| format!("{}|s={}", f.base().canonical_string(), f.s())).collect();
        let dbl: Vec<String> = self.doubled.iter().map(|d| format!("r={},s={}", d.r(), d.s())).collect();
        format!("pat=[{}];form=[{}];dbl=[{}]", pats.join(";"), forms.join(";"), dbl.join(";"))
    }
}
