//! Full pipeline on a small synthetic corpus: generate, ingest,
//! disambiguate, build timelines, classify, and print country profiles.
//!
//! Run with: cargo run --example end_to_end

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use mobgraph::country::Alpha3;
use mobgraph::formats;
use mobgraph::ingest::LineRecord;
use mobgraph::model::YearWindow;
use mobgraph::pipeline::{run_pipeline, RunConfig};
use mobgraph::synth::{generate, ScholarScript};
use mobgraph::timeline::ImputeMode;

fn set(codes: &[&str]) -> BTreeSet<Alpha3> {
    codes.iter().map(|c| c.parse().unwrap()).collect()
}

fn main() -> anyhow::Result<()> {
    // a handful of scripted careers covering every mobility type
    let plans: Vec<(&str, Vec<(i32, Vec<&str>)>)> = vec![
        ("home", vec![(2008, vec!["NLD"]), (2015, vec!["NLD"])]),
        ("migrant", vec![(2008, vec!["NLD"]), (2011, vec!["USA"])]),
        ("traveler", vec![(2008, vec!["NLD"]), (2012, vec!["NLD", "GBR"])]),
        ("nondir", vec![(2008, vec!["NLD", "BEL"]), (2014, vec!["NLD", "BEL"])]),
        ("returnee", vec![(2008, vec!["NLD"]), (2010, vec!["ZAF"]), (2014, vec!["NLD"])]),
    ];
    let scripts: Vec<ScholarScript> = plans
        .into_iter()
        .enumerate()
        .map(|(i, (id, years))| ScholarScript {
            truth_id: id.to_string(),
            surname: format!("Scholar{i}"),
            given: "Jo".into(),
            email: Some(format!("{id}@example.org")),
            venue: None,
            institution: None,
            coauthors: vec![],
            countries_by_year: years.into_iter().map(|(y, cs)| (y, set(&cs))).collect(),
            pubs_per_year: BTreeMap::new(),
            self_cite: false,
        })
        .collect();
    let (lines, _truth) = generate(&scripts, 42);

    let dir = tempfile::tempdir()?;
    let input = dir.path().join("corpus.jsonl");
    formats::write_jsonl::<LineRecord>(&input, &lines)?;

    let config = RunConfig {
        input,
        out_dir: dir.path().join("out"),
        window: YearWindow::new(2008, 2015)?,
        horizon: None,
        impute_mode: ImputeMode::WindowEnd,
        weights_path: None,
        threshold: None,
        precluster: None,
        country_table: None,
        countries: vec!["NLD".parse()?, "USA".parse()?, "GBR".parse()?],
        flows: None,
        trend: None,
    };
    let manifest = run_pipeline(&config)?;
    for stage in &manifest.stages {
        println!("{:<12} {:>4} rows", stage.stage, stage.rows_out);
    }
    println!();
    print!("{}", std::fs::read_to_string(config.out_dir.join("profiles.csv"))?);
    Ok(())
}
