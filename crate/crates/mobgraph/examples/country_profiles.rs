//! Country mobility profiles and shares from a classified population.
//!
//! Run with: cargo run --example country_profiles

use std::collections::{BTreeMap, BTreeSet};

use mobgraph::country::Alpha3;
use mobgraph::indicators::{percent_1dp, profile_report, top_linked};
use mobgraph::taxonomy::{classify_all, CountryRole};
use mobgraph::timeline::{impute_gaps, AffiliationTimeline};

fn timeline(id: String, years: &[(i32, &[&str])]) -> AffiliationTimeline {
    let observed: BTreeMap<i32, BTreeSet<Alpha3>> = years
        .iter()
        .map(|(y, cs)| (*y, cs.iter().map(|c| c.parse().unwrap()).collect()))
        .collect();
    impute_gaps(AffiliationTimeline::from_observed(id, observed).unwrap(), 2015).unwrap()
}

fn main() -> anyhow::Result<()> {
    let mut timelines = Vec::new();
    for i in 0..60 {
        timelines.push(timeline(format!("home{i}"), &[(2008, &["ZAF"]), (2015, &["ZAF"])]));
    }
    for (i, dest) in ["GBR", "GBR", "USA", "AUS"].iter().enumerate() {
        timelines.push(timeline(format!("out{i}"), &[(2008, &["ZAF"]), (2011, &[dest])]));
    }
    for (i, from) in ["NGA", "GBR", "IND"].iter().enumerate() {
        timelines.push(timeline(format!("in{i}"), &[(2008, &[from]), (2012, &["ZAF"])]));
    }
    timelines.push(timeline("visiting".into(), &[(2008, &["ZAF"]), (2013, &["ZAF", "DEU"])]));

    let classifications = classify_all(&timelines);
    let focal: Alpha3 = "ZAF".parse()?;
    let report = profile_report(&classifications, &[focal]);
    for (p, s) in &report {
        println!(
            "{}: {} scholars, {} mobile ({}% of all)",
            p.country,
            p.total_scholars,
            p.mobile,
            percent_1dp(s.mobile_share)
        );
        println!(
            "  emigrants {}, immigrants {}, outgoing travelers {}, incoming travelers {}, non-directional {}",
            p.emigrants, p.immigrants, p.outgoing_travelers, p.incoming_travelers, p.non_directionals
        );
        println!(
            "  of mobile: {}% migrants, {}% travelers, {}% non-directional",
            percent_1dp(s.migrant_share_of_mobile),
            percent_1dp(s.traveler_share_of_mobile),
            percent_1dp(s.nondirectional_share_of_mobile)
        );
    }
    println!("top destinations of emigrants:");
    for (country, n) in top_linked(&classifications, focal, CountryRole::Emigrant, 3)? {
        println!("  {country}: {n}");
    }
    Ok(())
}
