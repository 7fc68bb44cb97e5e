//! Cohort flow matrix and alluvial SVG for an outgoing cohort.
//!
//! Run with: cargo run --example flows_alluvial
//! Writes flows.svg into the current directory.

use std::collections::{BTreeMap, BTreeSet};

use mobgraph::country::Alpha3;
use mobgraph::indicators::{flow_matrix, render_alluvial_svg, FlowDirection};
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
    for i in 0..30 {
        timelines.push(timeline(format!("stay{i}"), &[(2008, &["CAN"]), (2015, &["CAN"])]));
    }
    for i in 0..8 {
        timelines.push(timeline(
            format!("us{i}"),
            &[(2008, &["CAN"]), (2010, &["USA"]), (2015, &["USA"])],
        ));
    }
    for i in 0..5 {
        // returnees: abroad mid-window, back home before the horizon
        timelines.push(timeline(
            format!("ret{i}"),
            &[(2008, &["CAN"]), (2010, &["GBR"]), (2014, &["CAN"])],
        ));
    }
    for i in 0..4 {
        timelines.push(timeline(
            format!("co{i}"),
            &[(2008, &["CAN"]), (2012, &["CAN", "FRA"])],
        ));
    }

    let focal: Alpha3 = "CAN".parse()?;
    let matrix = flow_matrix(&timelines, 2008, FlowDirection::Outgoing, focal, 2015, 5);
    println!(
        "cohort {} scholars, {} transitions",
        matrix.cohort_size,
        matrix.transitions.len()
    );
    for (year, masses) in &matrix.per_year_mass {
        let row: Vec<String> = masses.iter().map(|(n, m)| format!("{n}={m:.1}")).collect();
        println!("  {year}: {}", row.join(" "));
    }

    std::fs::write("flows.svg", render_alluvial_svg(&matrix))?;
    println!("wrote flows.svg");
    Ok(())
}
