//! Parse, validate, and normalize line-delimited bibliographic input into the
//! canonical record model.
//!
//! Input is UTF-8, one JSON publication per line:
//!
//! ```json
//! {"pub_id":"p1","year":2008,"venue_id":"v1","references":[],
//!  "authors":[{"surname":"Garcia","given":"N.","email":null,
//!              "affiliations":[{"institution":"Univ X","country":"ESP"}]}]}
//! ```
//!
//! Malformed lines are rejected with a reason, never fatal. Unknown country
//! strings are kept on the mention but excluded from the validated country
//! set so that dirty affiliation data cannot fabricate mobility.

use std::collections::{BTreeSet, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::country::{CountryTable, Normalized};
use crate::model::{AuthorMention, CorpusStats, PublicationRecord, YearWindow};

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub window: YearWindow,
}

/// Wire format of one input line.
#[derive(Debug, Serialize, Deserialize)]
pub struct LineRecord {
    pub pub_id: String,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue_id: Option<String>,
    #[serde(default)]
    pub references: Vec<String>,
    pub authors: Vec<LineAuthor>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LineAuthor {
    pub surname: String,
    pub given: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub email: Option<String>,
    #[serde(default)]
    pub affiliations: Vec<LineAffiliation>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LineAffiliation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
}

/// Extract lowercase initials from a given-name string. `"Nicolas J."`
/// yields `"nj"`.
pub fn initials_of(given: &str) -> String {
    given
        .split(|c: char| c.is_whitespace() || c == '.' || c == '-')
        .filter_map(|tok| tok.chars().next())
        .filter(|c| c.is_alphabetic())
        .flat_map(|c| c.to_lowercase())
        .collect()
}

/// Normalized given name, kept only when at least one token is longer than
/// an initial.
fn full_given_of(given: &str) -> Option<String> {
    let norm = given
        .split(|c: char| c.is_whitespace() || c == '.')
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ");
    let has_long_token = norm.split(' ').any(|t| t.chars().count() >= 2);
    has_long_token.then_some(norm)
}

fn mention_from_author(
    author: &LineAuthor,
    pub_id: &str,
    idx: usize,
    table: &CountryTable,
) -> AuthorMention {
    let mut countries = BTreeSet::new();
    let mut unknown = Vec::new();
    let mut institutions = Vec::new();
    for aff in &author.affiliations {
        if let Some(inst) = &aff.institution {
            let inst = inst.trim().to_lowercase();
            if !inst.is_empty() && !institutions.contains(&inst) {
                institutions.push(inst);
            }
        }
        if let Some(raw) = &aff.country {
            match table.normalize(raw) {
                Normalized::Code(code) => {
                    countries.insert(code);
                }
                Normalized::Unknown => {
                    let raw = raw.trim().to_string();
                    if !raw.is_empty() {
                        unknown.push(raw);
                    }
                }
            }
        }
    }
    AuthorMention {
        mention_id: format!("{pub_id}#{idx}"),
        pub_id: pub_id.to_string(),
        surname: author.surname.trim().to_lowercase(),
        given_initials: initials_of(&author.given),
        full_given: full_given_of(&author.given),
        email: author
            .email
            .as_deref()
            .map(|e| e.trim().to_lowercase())
            .filter(|e| !e.is_empty()),
        countries,
        unknown_countries: unknown,
        institutions,
        coauthor_keys: BTreeSet::new(),
    }
}

/// Convert one parsed line into a canonical record. Country strings are
/// normalized; names are lowercased; coauthor keys are derived.
pub fn record_from_line(line: &LineRecord, table: &CountryTable) -> PublicationRecord {
    let mentions = line
        .authors
        .iter()
        .enumerate()
        .map(|(i, a)| mention_from_author(a, &line.pub_id, i, table))
        .collect();
    let mut record = PublicationRecord {
        pub_id: line.pub_id.clone(),
        year: line.year,
        venue_id: line
            .venue_id
            .as_deref()
            .map(|v| v.trim().to_lowercase())
            .filter(|v| !v.is_empty()),
        mentions,
        references: line.references.clone(),
    };
    derive_coauthor_keys(&mut record);
    record
}

/// Check the record invariants against a corpus window. Empty result means
/// the record is acceptable.
pub fn validate_record(record: &PublicationRecord, window: YearWindow) -> Vec<String> {
    let mut violations = Vec::new();
    if record.pub_id.trim().is_empty() {
        violations.push("pub_id_empty".to_string());
    }
    if record.mentions.is_empty() {
        violations.push("mentions_empty".to_string());
    }
    if !window.contains(record.year) {
        violations.push("year_out_of_window".to_string());
    }
    for m in &record.mentions {
        if m.surname.is_empty() || m.given_initials.is_empty() {
            violations.push("name_empty".to_string());
            break;
        }
    }
    violations
}

/// Fill each mention's coauthor key set with the keys of its siblings.
/// A mention never contains its own key; duplicate sibling keys collapse.
pub fn derive_coauthor_keys(record: &mut PublicationRecord) {
    let keys: Vec<_> = record.mentions.iter().map(|m| m.name_key()).collect();
    for (i, mention) in record.mentions.iter_mut().enumerate() {
        mention.coauthor_keys = keys
            .iter()
            .enumerate()
            .filter(|(j, k)| *j != i && **k != keys[i])
            .map(|(_, k)| k.clone())
            .collect();
    }
}

/// Parse a line-delimited stream into canonical records plus tallies.
/// Output order follows input order; every input line is counted either as
/// a record or as a rejection.
pub fn parse_publications<R: BufRead>(
    input: R,
    config: &IngestConfig,
    table: &CountryTable,
) -> anyhow::Result<(Vec<PublicationRecord>, CorpusStats)> {
    let mut records = Vec::new();
    let mut stats = CorpusStats::default();
    let mut seen_ids: HashSet<String> = HashSet::new();
    for line in input.lines() {
        let line = line?;
        let parsed: LineRecord = match serde_json::from_str(&line) {
            Ok(p) => p,
            Err(_) => {
                stats.reject("malformed");
                continue;
            }
        };
        let record = record_from_line(&parsed, table);
        let violations = validate_record(&record, config.window);
        if let Some(first) = violations.first() {
            stats.reject(first);
            continue;
        }
        if !seen_ids.insert(record.pub_id.clone()) {
            stats.reject("duplicate_id");
            continue;
        }
        stats.n_records += 1;
        stats.n_mentions += record.mentions.len() as u64;
        records.push(record);
    }
    Ok((records, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::YearWindow;

    fn config() -> IngestConfig {
        IngestConfig {
            window: YearWindow::new(2008, 2015).unwrap(),
        }
    }

    fn parse(text: &str) -> (Vec<PublicationRecord>, CorpusStats) {
        parse_publications(text.as_bytes(), &config(), CountryTable::bundled()).unwrap()
    }

    #[test]
    fn empty_stream() {
        let (records, stats) = parse("");
        assert!(records.is_empty());
        assert_eq!(stats.n_records, 0);
        assert_eq!(stats.n_rejected, 0);
    }

    #[test]
    fn well_formed_line_round_trips() {
        let line = r#"{"pub_id":"p1","year":2008,"venue_id":"V1","references":["p0"],"authors":[{"surname":"Garcia","given":"Nicolas","affiliations":[{"institution":"Univ","country":"Spain"}]},{"surname":"Smith","given":"J.","affiliations":[{"country":"GB"}]}]}"#;
        let (records, stats) = parse(line);
        assert_eq!(stats.n_records, 1);
        assert_eq!(stats.n_mentions, 2);
        let r = &records[0];
        assert_eq!(r.pub_id, "p1");
        assert_eq!(r.year, 2008);
        assert_eq!(r.venue_id.as_deref(), Some("v1"));
        assert_eq!(r.mentions[0].surname, "garcia");
        assert_eq!(r.mentions[0].full_given.as_deref(), Some("nicolas"));
        assert_eq!(r.mentions[0].countries.iter().next().unwrap().as_str(), "ESP");
        assert_eq!(r.mentions[1].countries.iter().next().unwrap().as_str(), "GBR");
        assert_eq!(r.mentions[1].full_given, None);
    }

    #[test]
    fn non_numeric_year_is_malformed() {
        let (records, stats) = parse(r#"{"pub_id":"p1","year":"20O8","authors":[]}"#);
        assert!(records.is_empty());
        assert_eq!(stats.rejection_reasons["malformed"], 1);
    }

    #[test]
    fn year_outside_window_rejected() {
        let line = r#"{"pub_id":"p1","year":2016,"authors":[{"surname":"A","given":"B"}]}"#;
        let (_, stats) = parse(line);
        assert_eq!(stats.rejection_reasons["year_out_of_window"], 1);
    }

    #[test]
    fn duplicate_pub_id_rejected() {
        let line = r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"A","given":"B"}]}"#;
        let both = format!("{line}\n{line}");
        let (records, stats) = parse(&both);
        assert_eq!(records.len(), 1);
        assert_eq!(stats.rejection_reasons["duplicate_id"], 1);
        assert_eq!(stats.n_records + stats.n_rejected, 2);
    }

    #[test]
    fn validate_flags_empty_mentions() {
        let record = PublicationRecord {
            pub_id: "p".into(),
            year: 2010,
            venue_id: None,
            mentions: vec![],
            references: vec![],
        };
        let v = validate_record(&record, YearWindow::new(2008, 2015).unwrap());
        assert_eq!(v, vec!["mentions_empty"]);
    }

    #[test]
    fn unknown_country_flagged_not_kept() {
        let line = r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"A","given":"B","affiliations":[{"country":"Atlantis"},{"country":"ESP"}]}]}"#;
        let (records, _) = parse(line);
        let m = &records[0].mentions[0];
        assert_eq!(m.countries.len(), 1);
        assert_eq!(m.unknown_countries, vec!["Atlantis"]);
    }

    #[test]
    fn coauthor_keys_exclude_self_and_dedup() {
        let line = r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"Garcia","given":"N."},{"surname":"Garcia","given":"Nuria"},{"surname":"Smith","given":"J."}]}"#;
        let (records, _) = parse(line);
        let r = &records[0];
        // the two garcia,n mentions share a key: each sees only smith
        assert_eq!(r.mentions[0].coauthor_keys.len(), 1);
        assert_eq!(r.mentions[2].coauthor_keys.len(), 1);
        let single = r#"{"pub_id":"p2","year":2010,"authors":[{"surname":"Solo","given":"H."}]}"#;
        let (records, _) = parse(single);
        assert!(records[0].mentions[0].coauthor_keys.is_empty());
    }

    #[test]
    fn initials_extraction() {
        assert_eq!(initials_of("Nicolas J."), "nj");
        assert_eq!(initials_of("n."), "n");
        assert_eq!(initials_of("Jean-Pierre"), "jp");
    }
}
