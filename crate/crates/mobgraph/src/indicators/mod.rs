//! Country-level aggregation: mobility profiles, share reports, fractional
//! counts, cohort trend series, top-linked-country rankings and flow
//! matrices.

mod flows;

pub use flows::{flow_matrix, render_alluvial_svg, FlowDirection, FlowMatrix, FlowNode, Transition};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::country::Alpha3;
use crate::model::{Scholar, YearWindow};
use crate::taxonomy::{CountryRole, MobilityClassification, MobilityType};
use crate::timeline::AffiliationTimeline;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountryProfile {
    pub country: Alpha3,
    /// Scholars with this country anywhere in their affiliation history.
    pub total_scholars: u64,
    pub mobile: u64,
    pub emigrants: u64,
    pub immigrants: u64,
    pub outgoing_travelers: u64,
    pub incoming_travelers: u64,
    pub non_directionals: u64,
}

/// Shares over a country profile, as fractions of 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ShareReport {
    pub mobile_share: f64,
    pub migrant_share_of_mobile: f64,
    pub traveler_share_of_mobile: f64,
    pub nondirectional_share_of_mobile: f64,
    pub outgoing_share_of_mobile: f64,
    pub incoming_share_of_mobile: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum IndicatorError {
    #[error("empty_profile: {0} has no scholars")]
    EmptyProfile(Alpha3),
    #[error("no_mobile_scholars: {0} has no mobile scholars")]
    NoMobileScholars(Alpha3),
    #[error("top_linked requires a positive N")]
    NonPositiveN,
}

/// Percent rounded half-away-from-zero to one decimal, the presentation
/// convention for all reported shares.
pub fn percent_1dp(fraction: f64) -> f64 {
    (fraction * 1000.0).round() / 10.0
}

/// Tally one country's profile from the full classification list.
pub fn country_counts(
    classifications: &[MobilityClassification],
    country: Alpha3,
) -> CountryProfile {
    let mut p = CountryProfile {
        country,
        ..CountryProfile::default()
    };
    for c in classifications {
        if !c.countries_ever.contains(&country) {
            continue;
        }
        p.total_scholars += 1;
        match c.role_for(country) {
            CountryRole::Emigrant => p.emigrants += 1,
            CountryRole::Immigrant => p.immigrants += 1,
            CountryRole::OutgoingTraveler => p.outgoing_travelers += 1,
            CountryRole::IncomingTraveler => p.incoming_travelers += 1,
            CountryRole::None => {
                if c.global_type == MobilityType::NonDirectional {
                    p.non_directionals += 1;
                }
            }
        }
    }
    p.mobile = p.emigrants
        + p.immigrants
        + p.outgoing_travelers
        + p.incoming_travelers
        + p.non_directionals;
    p
}

/// Share of mobile scholars among all scholars linked to the country.
pub fn mobility_shares(p: &CountryProfile) -> Result<f64, IndicatorError> {
    if p.total_scholars == 0 {
        return Err(IndicatorError::EmptyProfile(p.country));
    }
    Ok(p.mobile as f64 / p.total_scholars as f64)
}

/// (migrant, traveler, non-directional) shares of the mobile population.
pub fn type_shares(p: &CountryProfile) -> Result<(f64, f64, f64), IndicatorError> {
    if p.mobile == 0 {
        return Err(IndicatorError::NoMobileScholars(p.country));
    }
    let mobile = p.mobile as f64;
    Ok((
        (p.emigrants + p.immigrants) as f64 / mobile,
        (p.outgoing_travelers + p.incoming_travelers) as f64 / mobile,
        p.non_directionals as f64 / mobile,
    ))
}

/// (outgoing, incoming) shares of the mobile population. The denominator
/// includes non-directionals, so the two shares do not sum to one.
pub fn directional_shares(p: &CountryProfile) -> Result<(f64, f64), IndicatorError> {
    if p.mobile == 0 {
        return Err(IndicatorError::NoMobileScholars(p.country));
    }
    let mobile = p.mobile as f64;
    Ok((
        (p.emigrants + p.outgoing_travelers) as f64 / mobile,
        (p.immigrants + p.incoming_travelers) as f64 / mobile,
    ))
}

/// All shares for one profile. Shares with a zero denominator come back as
/// zero so that report assembly never fails on empty countries.
pub fn share_report(p: &CountryProfile) -> ShareReport {
    let mobile_share = mobility_shares(p).unwrap_or(0.0);
    let (migrant, traveler, nondir) = type_shares(p).unwrap_or((0.0, 0.0, 0.0));
    let (outgoing, incoming) = directional_shares(p).unwrap_or((0.0, 0.0));
    ShareReport {
        mobile_share,
        migrant_share_of_mobile: migrant,
        traveler_share_of_mobile: traveler,
        nondirectional_share_of_mobile: nondir,
        outgoing_share_of_mobile: outgoing,
        incoming_share_of_mobile: incoming,
    }
}

/// One (profile, shares) pair per requested country, in request order.
pub fn profile_report(
    classifications: &[MobilityClassification],
    countries: &[Alpha3],
) -> Vec<(CountryProfile, ShareReport)> {
    countries
        .iter()
        .map(|&c| {
            let p = country_counts(classifications, c);
            let s = share_report(&p);
            (p, s)
        })
        .collect()
}

/// Fractional affiliation counts for one year: each scholar active in the
/// year contributes 1/|countries| to each of its countries. Total mass
/// equals the number of active scholars.
pub fn fractional_counts(
    timelines: &[AffiliationTimeline],
    year: i32,
) -> BTreeMap<Alpha3, f64> {
    let mut counts = BTreeMap::new();
    for t in timelines {
        if let Some(set) = t.imputed.get(&year) {
            let share = 1.0 / set.len() as f64;
            for &c in set {
                *counts.entry(c).or_insert(0.0) += share;
            }
        }
    }
    counts
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrendSeries {
    pub first_year: i32,
    pub min_pubs: u32,
    pub window: YearWindow,
    pub cohort_size: u64,
    /// country -> year -> whole scholar count (co-affiliations count in
    /// every country)
    pub series: BTreeMap<Alpha3, BTreeMap<i32, u64>>,
}

/// Publications per scholar inside a window, the productivity filter input.
pub fn pub_counts_in_window(scholars: &[Scholar], window: YearWindow) -> HashMap<String, u32> {
    scholars
        .iter()
        .map(|s| {
            let n = s
                .pubs_by_year
                .iter()
                .filter(|(y, _)| window.contains(**y))
                .map(|(_, pubs)| pubs.len() as u32)
                .sum();
            (s.scholar_id.clone(), n)
        })
        .collect()
}

/// Per-country affiliation counts over a window for the cohort of scholars
/// starting in `first_year` with at least `min_pubs` publications in the
/// window.
pub fn affiliation_trend(
    timelines: &[AffiliationTimeline],
    pub_counts: &HashMap<String, u32>,
    first_year: i32,
    min_pubs: u32,
    window: YearWindow,
) -> TrendSeries {
    let mut series: BTreeMap<Alpha3, BTreeMap<i32, u64>> = BTreeMap::new();
    let mut cohort_size = 0u64;
    for t in timelines {
        if t.first_year != first_year {
            continue;
        }
        if pub_counts.get(&t.scholar_id).copied().unwrap_or(0) < min_pubs {
            continue;
        }
        cohort_size += 1;
        for (&year, set) in &t.imputed {
            if !window.contains(year) {
                continue;
            }
            for &c in set {
                *series.entry(c).or_default().entry(year).or_insert(0) += 1;
            }
        }
    }
    TrendSeries {
        first_year,
        min_pubs,
        window,
        cohort_size,
        series,
    }
}

/// Counterpart countries of one scholar for a focal-country role: origin
/// countries for incoming roles, the non-origin countries visited for
/// outgoing roles.
fn counterparts(c: &MobilityClassification, role: CountryRole) -> Vec<Alpha3> {
    match role {
        CountryRole::Emigrant | CountryRole::OutgoingTraveler => c
            .countries_ever
            .iter()
            .filter(|x| !c.origin.contains(x))
            .copied()
            .collect(),
        CountryRole::Immigrant | CountryRole::IncomingTraveler => {
            c.origin.iter().copied().collect()
        }
        CountryRole::None => Vec::new(),
    }
}

/// Top-N counterpart countries for scholars holding `role_filter` with
/// respect to `focal`. Ties break toward the ascending alpha-3 code.
pub fn top_linked(
    classifications: &[MobilityClassification],
    focal: Alpha3,
    role_filter: CountryRole,
    n: usize,
) -> Result<Vec<(Alpha3, u64)>, IndicatorError> {
    if n == 0 {
        return Err(IndicatorError::NonPositiveN);
    }
    let mut tally: BTreeMap<Alpha3, u64> = BTreeMap::new();
    for c in classifications {
        if c.role_for(focal) != role_filter {
            continue;
        }
        for counterpart in counterparts(c, role_filter) {
            *tally.entry(counterpart).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(Alpha3, u64)> = tally.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(n);
    Ok(ranked)
}
