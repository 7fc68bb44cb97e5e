//! Canonical record model shared by every pipeline stage.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::country::Alpha3;

/// Blocking key for author mentions: normalized surname plus first initial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NameKey {
    pub surname: String,
    pub first_initial: char,
}

impl fmt::Debug for NameKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.surname, self.first_initial)
    }
}

/// One author appearance on one publication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuthorMention {
    pub mention_id: String,
    pub pub_id: String,
    /// Normalized lowercase surname.
    pub surname: String,
    /// One or more initials extracted from the given name, lowercase.
    pub given_initials: String,
    /// Normalized given name when more than initials were present.
    pub full_given: Option<String>,
    pub email: Option<String>,
    /// Validated affiliation countries. Unknown strings are kept separately.
    pub countries: BTreeSet<Alpha3>,
    /// Raw country strings that did not resolve to an alpha-3 code.
    pub unknown_countries: Vec<String>,
    pub institutions: Vec<String>,
    /// Name keys of the other mentions on the same publication.
    pub coauthor_keys: BTreeSet<NameKey>,
}

impl AuthorMention {
    pub fn name_key(&self) -> NameKey {
        NameKey {
            surname: self.surname.clone(),
            first_initial: self.given_initials.chars().next().unwrap_or('?'),
        }
    }
}

/// One publication with its author mentions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub year: i32,
    pub venue_id: Option<String>,
    pub mentions: Vec<AuthorMention>,
    pub references: Vec<String>,
}

/// Ingestion tallies. `n_rejected` always equals the sum over reasons.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_records: u64,
    pub n_mentions: u64,
    pub n_rejected: u64,
    pub rejection_reasons: BTreeMap<String, u64>,
}

impl CorpusStats {
    pub fn reject(&mut self, reason: &str) {
        self.n_rejected += 1;
        *self.rejection_reasons.entry(reason.to_string()).or_insert(0) += 1;
    }

    /// Field-wise sum, used when sharded inputs are merged.
    pub fn merge(&mut self, other: &CorpusStats) {
        self.n_records += other.n_records;
        self.n_mentions += other.n_mentions;
        self.n_rejected += other.n_rejected;
        for (reason, n) in &other.rejection_reasons {
            *self.rejection_reasons.entry(reason.clone()).or_insert(0) += n;
        }
    }
}

/// A disambiguated cluster of mentions belonging to one person.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scholar {
    pub scholar_id: String,
    pub mention_ids: BTreeSet<String>,
    pub pubs_by_year: BTreeMap<i32, Vec<String>>,
}

/// Inclusive calendar-year range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearWindow {
    pub start: i32,
    pub end: i32,
}

impl YearWindow {
    pub fn new(start: i32, end: i32) -> anyhow::Result<YearWindow> {
        anyhow::ensure!(start <= end, "window start {start} after end {end}");
        Ok(YearWindow { start, end })
    }

    pub fn contains(&self, year: i32) -> bool {
        year >= self.start && year <= self.end
    }
}

impl std::str::FromStr for YearWindow {
    type Err = anyhow::Error;

    /// Parses `START:END`, e.g. `2008:2015`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| anyhow::anyhow!("expected START:END, got {s:?}"))?;
        YearWindow::new(a.trim().parse()?, b.trim().parse()?)
    }
}

impl fmt::Display for YearWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}
