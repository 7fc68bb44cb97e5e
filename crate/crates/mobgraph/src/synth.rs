//! Synthetic corpora with ground-truth identities, plus the independent
//! brute-force classification oracle used for differential testing.
//!
//! The oracle below is a second, separate transcription of the mobility-type
//! definitions. It must never call into [`crate::taxonomy`]; when the two
//! disagree, the oracle text is re-read, not patched to match.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::country::Alpha3;
use crate::ingest::{LineAffiliation, LineAuthor, LineRecord};
use crate::taxonomy::{CountryRole, MobilityType};
use crate::timeline::AffiliationTimeline;

/// One scripted scholar: identity features plus a year-by-year country plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScholarScript {
    pub truth_id: String,
    pub surname: String,
    pub given: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub email: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    /// Coauthor (surname, given) pairs attached to every publication.
    #[serde(default)]
    pub coauthors: Vec<(String, String)>,
    /// Countries on the publications of each active year.
    pub countries_by_year: BTreeMap<i32, BTreeSet<Alpha3>>,
    /// Publications per active year; defaults to 1 for scripted years.
    #[serde(default)]
    pub pubs_per_year: BTreeMap<i32, u32>,
    /// Emit references from each publication to the scholar's earlier ones.
    #[serde(default)]
    pub self_cite: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpectedMobility {
    pub mobility_type: MobilityType,
    pub origin: BTreeSet<Alpha3>,
    pub roles: BTreeMap<Alpha3, CountryRole>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GroundTruth {
    pub mention_to_truth: BTreeMap<String, String>,
    pub expected: BTreeMap<String, ExpectedMobility>,
}

/// Classify a dense list of yearly country sets straight from the
/// mobility-type definitions:
/// not mobile scholars hold affiliations in a single country across all
/// publications; migrants fail to list an origin-country affiliation for at
/// least one year; travelers keep at least one origin affiliation in every
/// year; non-directionals start with more than one country of origin and
/// always show linkages between the same countries.
pub fn oracle_classify(yearly_sets: &[BTreeSet<Alpha3>]) -> MobilityType {
    assert!(!yearly_sets.is_empty() && yearly_sets.iter().all(|s| !s.is_empty()));
    let origin = &yearly_sets[0];

    let mut distinct: BTreeSet<Alpha3> = BTreeSet::new();
    for set in yearly_sets {
        distinct.extend(set.iter().copied());
    }
    if distinct.len() == 1 {
        return MobilityType::NotMobile;
    }

    let multiple_origins = origin.len() > 1;
    let same_linkages_always = yearly_sets.iter().all(|set| set == origin);
    if multiple_origins && same_linkages_always {
        return MobilityType::NonDirectional;
    }

    for set in yearly_sets {
        let lists_origin_affiliation = origin.iter().any(|c| set.contains(c));
        if !lists_origin_affiliation {
            return MobilityType::Migrant;
        }
    }
    MobilityType::Traveler
}

/// Per-country roles, transcribed from the directional definitions: an
/// emigrant of A has A as origin and ceases to be affiliated to it; an
/// immigrant of A originates elsewhere and is affiliated to A at some point;
/// outgoing/incoming travelers are the analogous cases that retain the
/// origin affiliation.
pub fn oracle_roles(yearly_sets: &[BTreeSet<Alpha3>]) -> BTreeMap<Alpha3, CountryRole> {
    let mobility = oracle_classify(yearly_sets);
    let origin = &yearly_sets[0];
    let mut visited: BTreeSet<Alpha3> = BTreeSet::new();
    for set in yearly_sets {
        visited.extend(set.iter().copied());
    }
    let mut roles = BTreeMap::new();
    for &country in &visited {
        let is_origin = origin.contains(&country);
        let role = match mobility {
            MobilityType::NotMobile | MobilityType::NonDirectional => CountryRole::None,
            MobilityType::Migrant if is_origin => CountryRole::Emigrant,
            MobilityType::Migrant => CountryRole::Immigrant,
            MobilityType::Traveler if is_origin => CountryRole::OutgoingTraveler,
            MobilityType::Traveler => CountryRole::IncomingTraveler,
        };
        if role != CountryRole::None {
            roles.insert(country, role);
        }
    }
    roles
}

/// Exhaustively enumerate every sequence of `len` non-empty subsets of the
/// first `k` countries: (2^k - 1)^len sequences, duplicate-free.
pub fn enumerate_small_timelines(k: usize, len: usize) -> Vec<Vec<BTreeSet<Alpha3>>> {
    assert!(k >= 1 && k <= 3, "enumeration is desk-scale: k <= 3");
    assert!(len >= 1 && len <= 4, "enumeration is desk-scale: len <= 4");
    let countries: Vec<Alpha3> = ["AAA", "BBB", "CCC"][..k]
        .iter()
        .map(|c| c.parse().unwrap())
        .collect();
    let subsets: Vec<BTreeSet<Alpha3>> = (1u32..(1 << k))
        .map(|mask| {
            countries
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| *c)
                .collect()
        })
        .collect();
    let mut sequences: Vec<Vec<BTreeSet<Alpha3>>> = vec![Vec::new()];
    for _ in 0..len {
        sequences = sequences
            .into_iter()
            .flat_map(|seq| {
                subsets.iter().map(move |s| {
                    let mut next = seq.clone();
                    next.push(s.clone());
                    next
                })
            })
            .collect();
    }
    sequences
}

/// Generate a corpus realizing the scripts, together with its ground truth.
/// Records come out in a seed-determined shuffled order; the same scripts
/// and seed always produce the identical corpus.
pub fn generate(scripts: &[ScholarScript], seed: u64) -> (Vec<LineRecord>, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut truth = GroundTruth::default();

    for script in scripts {
        let yearly_sets: Vec<BTreeSet<Alpha3>> =
            dense_yearly_sets(&script.countries_by_year).collect();
        truth.expected.insert(
            script.truth_id.clone(),
            ExpectedMobility {
                mobility_type: oracle_classify(&yearly_sets),
                origin: yearly_sets[0].clone(),
                roles: oracle_roles(&yearly_sets),
            },
        );

        let mut own_pub_ids: Vec<String> = Vec::new();
        for (&year, countries) in &script.countries_by_year {
            let n_pubs = script.pubs_per_year.get(&year).copied().unwrap_or(1).max(1);
            for k in 0..n_pubs {
                let pub_id = format!("{}-{}-{}", script.truth_id, year, k);
                let mut authors = vec![LineAuthor {
                    surname: script.surname.clone(),
                    given: script.given.clone(),
                    email: script.email.clone(),
                    affiliations: countries
                        .iter()
                        .map(|c| LineAffiliation {
                            institution: script.institution.clone(),
                            country: Some(c.to_string()),
                        })
                        .collect(),
                }];
                for (surname, given) in &script.coauthors {
                    authors.push(LineAuthor {
                        surname: surname.clone(),
                        given: given.clone(),
                        email: None,
                        affiliations: vec![],
                    });
                }
                let references = if script.self_cite {
                    own_pub_ids.clone()
                } else {
                    Vec::new()
                };
                records.push(LineRecord {
                    pub_id: pub_id.clone(),
                    year,
                    venue_id: script.venue.clone(),
                    references,
                    authors,
                });
                // the scripted author is always author 0
                truth
                    .mention_to_truth
                    .insert(format!("{pub_id}#0"), script.truth_id.clone());
                own_pub_ids.push(pub_id);
            }
        }
    }
    records.shuffle(&mut rng);
    (records, truth)
}

/// Dense yearly sets with scripted gaps carried forward, so the oracle sees
/// the same dense view the pipeline produces after imputation.
fn dense_yearly_sets(
    by_year: &BTreeMap<i32, BTreeSet<Alpha3>>,
) -> impl Iterator<Item = BTreeSet<Alpha3>> + '_ {
    let first = *by_year.keys().next().expect("script has active years");
    let last = *by_year.keys().last().unwrap();
    let mut current: BTreeSet<Alpha3> = BTreeSet::new();
    (first..=last).map(move |year| {
        if let Some(set) = by_year.get(&year) {
            current = set.clone();
        }
        current.clone()
    })
}

/// Seeded random unimputed timelines for property-style checks: up to
/// `max_countries` countries, up to `max_years` active years with random
/// gaps, starting at `base_year`.
pub fn random_timelines(
    seed: u64,
    count: usize,
    max_countries: usize,
    max_years: usize,
    base_year: i32,
) -> Vec<AffiliationTimeline> {
    let countries: Vec<Alpha3> = ["AAA", "BBB", "CCC", "DDD", "EEE"][..max_countries]
        .iter()
        .map(|c| c.parse().unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n_active = rng.gen_range(1..=max_years);
            let mut years: Vec<i32> = (0..max_years as i32 * 2).map(|d| base_year + d).collect();
            years.shuffle(&mut rng);
            let mut active: Vec<i32> = years.into_iter().take(n_active).collect();
            active.sort_unstable();
            let observed: BTreeMap<i32, BTreeSet<Alpha3>> = active
                .into_iter()
                .map(|year| {
                    let size = rng.gen_range(1..=countries.len());
                    let mut pick = countries.clone();
                    pick.shuffle(&mut rng);
                    (year, pick.into_iter().take(size).collect())
                })
                .collect();
            AffiliationTimeline::from_observed(format!("rnd{i}"), observed).unwrap()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(codes: &[&str]) -> BTreeSet<Alpha3> {
        codes.iter().map(|c| c.parse().unwrap()).collect()
    }

    #[test]
    fn oracle_canonical_cases() {
        assert_eq!(oracle_classify(&[set(&["AAA"])]), MobilityType::NotMobile);
        assert_eq!(
            oracle_classify(&[set(&["AAA"]), set(&["BBB"]), set(&["AAA"])]),
            MobilityType::Migrant
        );
        assert_eq!(
            oracle_classify(&[set(&["AAA", "BBB"]), set(&["AAA", "BBB"])]),
            MobilityType::NonDirectional
        );
        assert_eq!(
            oracle_classify(&[set(&["AAA"]), set(&["AAA", "BBB"])]),
            MobilityType::Traveler
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_small_timelines(1, 1).len(), 1);
        assert_eq!(enumerate_small_timelines(2, 2).len(), 9);
        assert_eq!(enumerate_small_timelines(3, 2).len(), 49);
        let seqs = enumerate_small_timelines(3, 4);
        assert_eq!(seqs.len(), 2401);
        let unique: BTreeSet<_> = seqs.iter().collect();
        assert_eq!(unique.len(), 2401);
    }

    #[test]
    fn generate_single_script() {
        let script = ScholarScript {
            truth_id: "t1".into(),
            surname: "Garcia".into(),
            given: "Nicolas".into(),
            email: Some("ng@example.org".into()),
            venue: None,
            institution: None,
            coauthors: vec![],
            countries_by_year: [(2008, set(&["ESP"]))].into_iter().collect(),
            pubs_per_year: BTreeMap::new(),
            self_cite: false,
        };
        let (records, truth) = generate(&[script], 42);
        assert_eq!(records.len(), 1);
        assert_eq!(truth.expected["t1"].mobility_type, MobilityType::NotMobile);
        assert_eq!(truth.mention_to_truth["t1-2008-0#0"], "t1");
    }

    #[test]
    fn generate_is_seed_deterministic() {
        let scripts: Vec<ScholarScript> = (0..10)
            .map(|i| ScholarScript {
                truth_id: format!("t{i}"),
                surname: "Name".into(),
                given: format!("G{i}"),
                email: Some(format!("e{i}@x")),
                venue: None,
                institution: None,
                coauthors: vec![],
                countries_by_year: [(2008 + i % 3, set(&["ESP"]))].into_iter().collect(),
                pubs_per_year: BTreeMap::new(),
                self_cite: false,
            })
            .collect();
        let (a, _) = generate(&scripts, 7);
        let (b, _) = generate(&scripts, 7);
        let ja: Vec<String> = a.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
        let jb: Vec<String> = b.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
        assert_eq!(ja, jb);
    }

    #[test]
    fn shared_name_key_disjoint_features_are_distinct_truths() {
        let mk = |id: &str, email: &str| ScholarScript {
            truth_id: id.into(),
            surname: "Garcia".into(),
            given: "N.".into(),
            email: Some(email.into()),
            venue: None,
            institution: None,
            coauthors: vec![],
            countries_by_year: [(2008, set(&["ESP"]))].into_iter().collect(),
            pubs_per_year: BTreeMap::new(),
            self_cite: false,
        };
        let (_, truth) = generate(&[mk("t1", "a@x"), mk("t2", "b@x")], 1);
        let truths: BTreeSet<&String> = truth.mention_to_truth.values().collect();
        assert_eq!(truths.len(), 2);
    }

    #[test]
    fn random_timelines_are_seeded() {
        let a = random_timelines(5, 20, 3, 6, 2008);
        let b = random_timelines(5, 20, 3, 6, 2008);
        assert_eq!(a.len(), 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.observed, y.observed);
        }
    }
}
