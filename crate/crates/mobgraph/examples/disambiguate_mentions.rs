//! Author-name disambiguation on a corpus with two homonymous scholars:
//! same surname and first initial, told apart by given names, emails and
//! coauthors.
//!
//! Run with: cargo run --example disambiguate_mentions

use mobgraph::country::CountryTable;
use mobgraph::disambig::{disambiguate, DisambigConfig};
use mobgraph::ingest::{parse_publications, IngestConfig};
use mobgraph::model::YearWindow;

fn main() -> anyhow::Result<()> {
    let corpus = r#"
{"pub_id":"p1","year":2009,"venue_id":"scientometrics","authors":[{"surname":"Garcia","given":"Nadia","email":"nadia@uni-a.example","affiliations":[{"institution":"Uni A","country":"ES"}]},{"surname":"Kim","given":"H."}]}
{"pub_id":"p2","year":2010,"venue_id":"scientometrics","references":["p1"],"authors":[{"surname":"Garcia","given":"N.","email":"nadia@uni-a.example","affiliations":[{"country":"Spain"}]},{"surname":"Kim","given":"H."}]}
{"pub_id":"p3","year":2011,"venue_id":"jasist","authors":[{"surname":"Garcia","given":"Nicolas","email":"nico@uni-b.example","affiliations":[{"institution":"Uni B","country":"NLD"}]},{"surname":"Okafor","given":"C."}]}
{"pub_id":"p4","year":2012,"venue_id":"jasist","references":["p3"],"authors":[{"surname":"Garcia","given":"Nicolas","affiliations":[{"institution":"Uni B"}]},{"surname":"Okafor","given":"C."}]}
"#;
    let cfg = IngestConfig {
        window: YearWindow::new(2008, 2015)?,
    };
    let (records, stats) =
        parse_publications(corpus.trim().as_bytes(), &cfg, CountryTable::bundled())?;
    println!("{} records, {} mentions", stats.n_records, stats.n_mentions);

    let scholars = disambiguate(&records, &DisambigConfig::default());
    println!("{} scholars found:", scholars.len());
    for s in &scholars {
        let mentions: Vec<&str> = s.mention_ids.iter().map(|m| m.as_str()).collect();
        println!("  {} <- {}", s.scholar_id, mentions.join(", "));
    }
    Ok(())
}
