//! Per-scholar affiliation-country timelines: observed years from the
//! publication record, origin from the first publication year, and blank
//! years filled by carrying the last affiliation forward.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::country::Alpha3;
use crate::model::{PublicationRecord, Scholar};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffiliationTimeline {
    pub scholar_id: String,
    pub first_year: i32,
    pub last_observed_year: i32,
    /// Years with at least one publication carrying at least one known
    /// country. Every stored set is non-empty.
    pub observed: BTreeMap<i32, BTreeSet<Alpha3>>,
    /// Dense over [first_year, horizon] once `impute_gaps` has run.
    pub imputed: BTreeMap<i32, BTreeSet<Alpha3>>,
    /// Countries of the first observed year.
    pub origin: BTreeSet<Alpha3>,
}

impl AffiliationTimeline {
    /// Build a timeline directly from an observed year→countries map, e.g.
    /// for scripted cohorts. Not yet imputed.
    pub fn from_observed(
        scholar_id: impl Into<String>,
        observed: BTreeMap<i32, BTreeSet<Alpha3>>,
    ) -> Result<AffiliationTimeline, TimelineError> {
        let scholar_id = scholar_id.into();
        if observed.is_empty() || observed.values().any(|s| s.is_empty()) {
            return Err(TimelineError::NoAffiliationSignal(scholar_id));
        }
        let first_year = *observed.keys().next().unwrap();
        let last_observed_year = *observed.keys().last().unwrap();
        let origin = observed[&first_year].clone();
        Ok(AffiliationTimeline {
            scholar_id,
            first_year,
            last_observed_year,
            imputed: observed.clone(),
            observed,
            origin,
        })
    }

    /// Union of all countries the scholar was ever affiliated with.
    pub fn countries_ever(&self) -> BTreeSet<Alpha3> {
        self.imputed.values().flatten().copied().collect()
    }

    pub fn horizon(&self) -> i32 {
        *self.imputed.keys().last().unwrap_or(&self.last_observed_year)
    }

    pub fn active_in(&self, year: i32) -> bool {
        self.imputed.contains_key(&year)
    }
}

/// How far carry-forward extends past the last observed year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImputeMode {
    /// Impute through the configured corpus window end.
    WindowEnd,
    /// Stop at the scholar's last publication year.
    LastObserved,
}

impl std::str::FromStr for ImputeMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "window-end" => Ok(ImputeMode::WindowEnd),
            "last-observed" => Ok(ImputeMode::LastObserved),
            other => anyhow::bail!("unknown impute mode {other:?} (window-end|last-observed)"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TimelineError {
    #[error("scholar {0} has no publication with a known country")]
    NoAffiliationSignal(String),
    #[error("horizon {horizon} precedes last observation {last_observed}")]
    HorizonBeforeLastObservation { horizon: i32, last_observed: i32 },
}

/// Build the observed part of a scholar's timeline. Years whose publications
/// carry only unknown countries are left blank.
pub fn build_timeline(
    scholar: &Scholar,
    by_pub_id: &HashMap<&str, &PublicationRecord>,
) -> Result<AffiliationTimeline, TimelineError> {
    let mention_set: BTreeSet<&str> = scholar.mention_ids.iter().map(|s| s.as_str()).collect();
    let mut observed: BTreeMap<i32, BTreeSet<Alpha3>> = BTreeMap::new();
    for (year, pubs) in &scholar.pubs_by_year {
        let mut countries = BTreeSet::new();
        for pub_id in pubs {
            if let Some(record) = by_pub_id.get(pub_id.as_str()) {
                for mention in &record.mentions {
                    if mention_set.contains(mention.mention_id.as_str()) {
                        countries.extend(mention.countries.iter().copied());
                    }
                }
            }
        }
        if !countries.is_empty() {
            observed.insert(*year, countries);
        }
    }
    let first_year = *observed
        .keys()
        .next()
        .ok_or_else(|| TimelineError::NoAffiliationSignal(scholar.scholar_id.clone()))?;
    let last_observed_year = *observed.keys().last().unwrap();
    let origin = observed[&first_year].clone();
    Ok(AffiliationTimeline {
        scholar_id: scholar.scholar_id.clone(),
        first_year,
        last_observed_year,
        imputed: observed.clone(),
        observed,
        origin,
    })
}

/// The countries of the scholar's first publication year.
pub fn origin_countries(t: &AffiliationTimeline) -> BTreeSet<Alpha3> {
    t.observed[&t.first_year].clone()
}

/// Fill every blank year in (first_year, horizon] with the previous year's
/// country set. Observed years are never changed. Idempotent.
pub fn impute_gaps(
    mut t: AffiliationTimeline,
    horizon: i32,
) -> Result<AffiliationTimeline, TimelineError> {
    if horizon < t.last_observed_year {
        return Err(TimelineError::HorizonBeforeLastObservation {
            horizon,
            last_observed: t.last_observed_year,
        });
    }
    let mut imputed = BTreeMap::new();
    let mut current = t.observed[&t.first_year].clone();
    for year in t.first_year..=horizon {
        if let Some(obs) = t.observed.get(&year) {
            current = obs.clone();
        }
        imputed.insert(year, current.clone());
    }
    t.imputed = imputed;
    Ok(t)
}

/// Timelines for every scholar, with rejects tallied separately.
pub fn timelines_for_corpus(
    scholars: &[Scholar],
    corpus: &[PublicationRecord],
    horizon_for: impl Fn(&AffiliationTimeline) -> i32 + Sync,
) -> (Vec<AffiliationTimeline>, u64) {
    let by_pub_id: HashMap<&str, &PublicationRecord> =
        corpus.iter().map(|r| (r.pub_id.as_str(), r)).collect();
    let results: Vec<Option<AffiliationTimeline>> = scholars
        .par_iter()
        .map(|scholar| {
            let t = build_timeline(scholar, &by_pub_id).ok()?;
            let horizon = horizon_for(&t).max(t.last_observed_year);
            impute_gaps(t, horizon).ok()
        })
        .collect();
    let mut timelines = Vec::with_capacity(results.len());
    let mut rejects = 0u64;
    for r in results {
        match r {
            Some(t) => timelines.push(t),
            None => rejects += 1,
        }
    }
    (timelines, rejects)
}
