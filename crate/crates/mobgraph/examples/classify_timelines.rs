//! Build affiliation timelines by hand, impute the gaps, and classify them.
//!
//! Run with: cargo run --example classify_timelines

use std::collections::{BTreeMap, BTreeSet};

use mobgraph::country::Alpha3;
use mobgraph::taxonomy::classify_timeline;
use mobgraph::timeline::{impute_gaps, AffiliationTimeline};

fn observed(years: &[(i32, &[&str])]) -> BTreeMap<i32, BTreeSet<Alpha3>> {
    years
        .iter()
        .map(|(y, cs)| (*y, cs.iter().map(|c| c.parse().unwrap()).collect()))
        .collect()
}

fn main() -> anyhow::Result<()> {
    let cases: Vec<(&str, Vec<(i32, &[&str])>)> = vec![
        ("stayer", vec![(2008, &["ESP"]), (2013, &["ESP"])]),
        ("migrant", vec![(2008, &["ESP"]), (2011, &["GBR"])]),
        ("traveler", vec![(2008, &["ESP"]), (2010, &["ESP", "USA"])]),
        ("nondirectional", vec![(2008, &["ESP", "FRA"]), (2012, &["ESP", "FRA"])]),
    ];
    for (name, years) in cases {
        let t = AffiliationTimeline::from_observed(name, observed(&years))?;
        let t = impute_gaps(t, 2015)?;
        let c = classify_timeline(&t);
        println!("{name}: {:?}", c.global_type);
        for (year, countries) in &t.imputed {
            let tag = if t.observed.contains_key(year) { "observed" } else { "imputed" };
            println!("  {year} {countries:?} ({tag})");
        }
        for (country, role) in &c.country_roles {
            println!("  {country}: {role:?}");
        }
    }
    Ok(())
}
