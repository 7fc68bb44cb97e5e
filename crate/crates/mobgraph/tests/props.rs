//! Property-based invariants over randomly generated timelines and corpora.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use mobgraph::country::Alpha3;
use mobgraph::indicators::fractional_counts;
use mobgraph::synth::oracle_classify;
use mobgraph::taxonomy::{classify, classify_timeline, CountryRole, MobilityType};
use mobgraph::timeline::{impute_gaps, AffiliationTimeline};

fn arb_country() -> impl Strategy<Value = Alpha3> {
    prop_oneof![Just("AAA"), Just("BBB"), Just("CCC"), Just("DDD")]
        .prop_map(|c| c.parse().unwrap())
}

fn arb_year_set() -> impl Strategy<Value = BTreeSet<Alpha3>> {
    proptest::collection::btree_set(arb_country(), 1..=3)
}

fn arb_observed() -> impl Strategy<Value = BTreeMap<i32, BTreeSet<Alpha3>>> {
    proptest::collection::btree_map(2008i32..2020, arb_year_set(), 1..=6)
}

fn timeline(observed: BTreeMap<i32, BTreeSet<Alpha3>>) -> AffiliationTimeline {
    AffiliationTimeline::from_observed("p", observed).unwrap()
}

proptest! {
    /// The four mobility types partition all timelines; classification
    /// agrees with the independently written oracle on the dense view.
    #[test]
    fn classification_matches_oracle(observed in arb_observed()) {
        let t = impute_gaps(timeline(observed), 2020).unwrap();
        let dense: Vec<BTreeSet<Alpha3>> = t.imputed.values().cloned().collect();
        prop_assert_eq!(classify(&t), oracle_classify(&dense));
    }

    /// Imputation is idempotent and never invents countries.
    #[test]
    fn imputation_idempotent_and_conservative(observed in arb_observed()) {
        let base = timeline(observed);
        let union: BTreeSet<Alpha3> = base.observed.values().flatten().copied().collect();
        let once = impute_gaps(base, 2021).unwrap();
        let twice = impute_gaps(once.clone(), 2021).unwrap();
        prop_assert_eq!(&once.imputed, &twice.imputed);
        for (year, set) in &once.imputed {
            prop_assert!(!set.is_empty(), "empty set in {year}");
            prop_assert!(set.is_subset(&union));
        }
        // dense coverage of [first_year, horizon]
        prop_assert_eq!(once.imputed.len() as i32, 2021 - once.first_year + 1);
    }

    /// Directional roles exist exactly for migrants and travelers, and the
    /// role direction matches origin membership.
    #[test]
    fn roles_consistent_with_type(observed in arb_observed()) {
        let t = impute_gaps(timeline(observed), 2020).unwrap();
        let c = classify_timeline(&t);
        match c.global_type {
            MobilityType::NotMobile | MobilityType::NonDirectional => {
                prop_assert!(c.country_roles.values().all(|r| *r == CountryRole::None));
            }
            MobilityType::Migrant => {
                for (country, role) in &c.country_roles {
                    let expected = if c.origin.contains(country) {
                        CountryRole::Emigrant
                    } else {
                        CountryRole::Immigrant
                    };
                    prop_assert_eq!(*role, expected);
                }
            }
            MobilityType::Traveler => {
                for (country, role) in &c.country_roles {
                    let expected = if c.origin.contains(country) {
                        CountryRole::OutgoingTraveler
                    } else {
                        CountryRole::IncomingTraveler
                    };
                    prop_assert_eq!(*role, expected);
                }
            }
        }
    }

    /// Fractional counts conserve mass year by year.
    #[test]
    fn fractional_mass_is_conserved(
        all_observed in proptest::collection::vec(arb_observed(), 1..20)
    ) {
        let timelines: Vec<AffiliationTimeline> = all_observed
            .into_iter()
            .map(|o| impute_gaps(timeline(o), 2020).unwrap())
            .collect();
        for year in 2008..=2020 {
            let active = timelines.iter().filter(|t| t.active_in(year)).count() as f64;
            let mass: f64 = fractional_counts(&timelines, year).values().sum();
            prop_assert!((mass - active).abs() < 1e-9);
        }
    }
}
