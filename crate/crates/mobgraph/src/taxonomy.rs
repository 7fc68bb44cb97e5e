//! Mobility classification: the four global mobility types and the
//! directional roles a scholar holds with respect to each country.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::country::Alpha3;
use crate::timeline::AffiliationTimeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MobilityType {
    NotMobile,
    Migrant,
    Traveler,
    NonDirectional,
}

/// The role a scholar plays for one focal country. Travelers retain an
/// origin-country affiliation every year; migrants drop it in at least one
/// year. "Trained" and "recruited" travelers in published tables correspond
/// to Outgoing and Incoming here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountryRole {
    Emigrant,
    Immigrant,
    OutgoingTraveler,
    IncomingTraveler,
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MobilityClassification {
    pub scholar_id: String,
    pub first_year: i32,
    pub global_type: MobilityType,
    pub origin: BTreeSet<Alpha3>,
    pub countries_ever: BTreeSet<Alpha3>,
    /// Non-None roles only; countries outside `countries_ever` are implicitly
    /// None.
    pub country_roles: BTreeMap<Alpha3, CountryRole>,
}

/// Classify one imputed timeline.
///
/// Precedence: a single country ever seen means NotMobile; a multi-country
/// origin whose set never changes means NonDirectional; a year without any
/// origin country means Migrant; anything else is Traveler.
pub fn classify(t: &AffiliationTimeline) -> MobilityType {
    let countries_ever = t.countries_ever();
    if countries_ever.len() == 1 {
        return MobilityType::NotMobile;
    }
    if t.origin.len() > 1 && t.imputed.values().all(|s| *s == t.origin) {
        return MobilityType::NonDirectional;
    }
    let dropped_origin = t
        .imputed
        .values()
        .any(|s| s.intersection(&t.origin).next().is_none());
    if dropped_origin {
        MobilityType::Migrant
    } else {
        MobilityType::Traveler
    }
}

/// Role of one scholar with respect to focal country `a`.
pub fn roles_for_country(
    global_type: MobilityType,
    origin: &BTreeSet<Alpha3>,
    countries_ever: &BTreeSet<Alpha3>,
    a: Alpha3,
) -> CountryRole {
    if !countries_ever.contains(&a) {
        return CountryRole::None;
    }
    match global_type {
        MobilityType::NotMobile | MobilityType::NonDirectional => CountryRole::None,
        MobilityType::Migrant => {
            if origin.contains(&a) {
                CountryRole::Emigrant
            } else {
                CountryRole::Immigrant
            }
        }
        MobilityType::Traveler => {
            if origin.contains(&a) {
                CountryRole::OutgoingTraveler
            } else {
                CountryRole::IncomingTraveler
            }
        }
    }
}

/// Classify a timeline and materialize its per-country roles.
pub fn classify_timeline(t: &AffiliationTimeline) -> MobilityClassification {
    let global_type = classify(t);
    let countries_ever = t.countries_ever();
    let country_roles: BTreeMap<Alpha3, CountryRole> = countries_ever
        .iter()
        .map(|&c| (c, roles_for_country(global_type, &t.origin, &countries_ever, c)))
        .filter(|(_, role)| *role != CountryRole::None)
        .collect();
    MobilityClassification {
        scholar_id: t.scholar_id.clone(),
        first_year: t.first_year,
        global_type,
        origin: t.origin.clone(),
        countries_ever,
        country_roles,
    }
}

pub fn classify_all(timelines: &[AffiliationTimeline]) -> Vec<MobilityClassification> {
    timelines.par_iter().map(classify_timeline).collect()
}

impl MobilityClassification {
    pub fn role_for(&self, country: Alpha3) -> CountryRole {
        *self.country_roles.get(&country).unwrap_or(&CountryRole::None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeline::impute_gaps;

    fn set(codes: &[&str]) -> BTreeSet<Alpha3> {
        codes.iter().map(|c| c.parse().unwrap()).collect()
    }

    fn imputed_timeline(years: &[(i32, &[&str])]) -> AffiliationTimeline {
        let observed: BTreeMap<i32, BTreeSet<Alpha3>> =
            years.iter().map(|(y, cs)| (*y, set(cs))).collect();
        let first_year = *observed.keys().next().unwrap();
        let last = *observed.keys().last().unwrap();
        let origin = observed[&first_year].clone();
        let t = AffiliationTimeline {
            scholar_id: "t".into(),
            first_year,
            last_observed_year: last,
            imputed: observed.clone(),
            observed,
            origin,
        };
        impute_gaps(t, last).unwrap()
    }

    #[test]
    fn canonical_four_types() {
        assert_eq!(
            classify(&imputed_timeline(&[(2008, &["ESP"]), (2009, &["ESP"])])),
            MobilityType::NotMobile
        );
        assert_eq!(
            classify(&imputed_timeline(&[(2008, &["ESP"]), (2009, &["GBR"])])),
            MobilityType::Migrant
        );
        assert_eq!(
            classify(&imputed_timeline(&[
                (2008, &["ESP"]),
                (2009, &["ESP", "GBR"]),
                (2010, &["ESP"])
            ])),
            MobilityType::Traveler
        );
        assert_eq!(
            classify(&imputed_timeline(&[
                (2008, &["ESP", "NLD"]),
                (2009, &["ESP", "NLD"])
            ])),
            MobilityType::NonDirectional
        );
    }

    #[test]
    fn multi_origin_that_changes_is_not_nondirectional() {
        // keeps one origin country every year -> Traveler
        assert_eq!(
            classify(&imputed_timeline(&[(2008, &["ESP", "NLD"]), (2009, &["ESP"])])),
            MobilityType::Traveler
        );
        // some year holds no origin country -> Migrant
        assert_eq!(
            classify(&imputed_timeline(&[(2008, &["ESP", "NLD"]), (2009, &["GBR"])])),
            MobilityType::Migrant
        );
    }

    #[test]
    fn migrant_roles() {
        let c = classify_timeline(&imputed_timeline(&[(2008, &["ESP"]), (2009, &["GBR"])]));
        assert_eq!(c.global_type, MobilityType::Migrant);
        assert_eq!(c.role_for("ESP".parse().unwrap()), CountryRole::Emigrant);
        assert_eq!(c.role_for("GBR".parse().unwrap()), CountryRole::Immigrant);
        assert_eq!(c.role_for("FRA".parse().unwrap()), CountryRole::None);
    }

    #[test]
    fn traveler_roles() {
        let c = classify_timeline(&imputed_timeline(&[
            (2008, &["ESP"]),
            (2009, &["ESP", "GBR"]),
        ]));
        assert_eq!(c.global_type, MobilityType::Traveler);
        assert_eq!(c.role_for("ESP".parse().unwrap()), CountryRole::OutgoingTraveler);
        assert_eq!(c.role_for("GBR".parse().unwrap()), CountryRole::IncomingTraveler);
    }

    #[test]
    fn not_mobile_and_nondirectional_have_no_roles() {
        let c = classify_timeline(&imputed_timeline(&[(2008, &["USA"])]));
        assert_eq!(c.role_for("USA".parse().unwrap()), CountryRole::None);
        assert!(c.country_roles.is_empty());
        let c = classify_timeline(&imputed_timeline(&[(2008, &["ESP", "NLD"])]));
        assert_eq!(c.global_type, MobilityType::NonDirectional);
        assert!(c.country_roles.is_empty());
    }

    #[test]
    fn classify_all_preserves_order_and_length() {
        let timelines = vec![
            imputed_timeline(&[(2008, &["ESP"])]),
            imputed_timeline(&[(2008, &["ESP"]), (2009, &["GBR"])]),
        ];
        let out = classify_all(&timelines);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].global_type, MobilityType::NotMobile);
        assert_eq!(out[1].global_type, MobilityType::Migrant);
        assert!(classify_all(&[]).is_empty());
    }
}
