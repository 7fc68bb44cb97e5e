//! Inter-stage file I/O. Every stage communicates through line-delimited
//! JSON (records, scholars, timelines, classifications) or single JSON
//! documents (stats, flow matrices, trend series). Inputs ending in `.gz`
//! are transparently decompressed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::Context;
use flate2::read::GzDecoder;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ingest::{LineAffiliation, LineAuthor, LineRecord};
use crate::model::PublicationRecord;

/// Open a file for buffered reading, decompressing when the name ends in
/// `.gz`.
pub fn open_reader(path: &Path) -> anyhow::Result<Box<dyn BufRead>> {
    let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(BufReader::new(GzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

pub fn create_writer(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = File::create(path).with_context(|| format!("create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Write items as one JSON document per line.
pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> anyhow::Result<()> {
    let mut w = create_writer(path)?;
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let reader = open_reader(path)?;
    let mut items = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .with_context(|| format!("{} line {}", path.display(), i + 1))?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = create_writer(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let mut reader = open_reader(path)?;
    let mut buf = String::new();
    reader.read_to_string(&mut buf)?;
    serde_json::from_str(&buf).with_context(|| format!("parse {}", path.display()))
}

/// SHA-256 digest of a file, hex-encoded, for run manifests.
pub fn file_digest(path: &Path) -> anyhow::Result<String> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Canonical wire form of a normalized record, re-ingestable through the
/// same parser.
pub fn line_from_record(record: &PublicationRecord) -> LineRecord {
    LineRecord {
        pub_id: record.pub_id.clone(),
        year: record.year,
        venue_id: record.venue_id.clone(),
        references: record.references.clone(),
        authors: record
            .mentions
            .iter()
            .map(|m| {
                let given = match &m.full_given {
                    Some(full) => full.clone(),
                    None => m
                        .given_initials
                        .chars()
                        .map(|c| format!("{c}."))
                        .collect::<Vec<_>>()
                        .join(" "),
                };
                let mut affiliations: Vec<LineAffiliation> = m
                    .institutions
                    .iter()
                    .map(|inst| LineAffiliation {
                        institution: Some(inst.clone()),
                        country: None,
                    })
                    .collect();
                affiliations.extend(m.countries.iter().map(|c| LineAffiliation {
                    institution: None,
                    country: Some(c.to_string()),
                }));
                affiliations.extend(m.unknown_countries.iter().map(|raw| LineAffiliation {
                    institution: None,
                    country: Some(raw.clone()),
                }));
                LineAuthor {
                    surname: m.surname.clone(),
                    given,
                    email: m.email.clone(),
                    affiliations,
                }
            })
            .collect(),
    }
}

/// Write records in the canonical input format.
pub fn write_records(path: &Path, records: &[PublicationRecord]) -> anyhow::Result<()> {
    let lines: Vec<LineRecord> = records.iter().map(line_from_record).collect();
    write_jsonl(path, &lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::country::CountryTable;
    use crate::ingest::{parse_publications, IngestConfig};
    use crate::model::YearWindow;
    use std::io::Write as _;

    #[test]
    fn canonical_records_reingest_identically() {
        let input = r#"{"pub_id":"p1","year":2010,"venue_id":"V","references":["p0"],"authors":[{"surname":"Garcia","given":"Nicolas J.","email":"N@X.Y","affiliations":[{"institution":"Univ A","country":"Spain"},{"country":"Atlantis"}]}]}"#;
        let cfg = IngestConfig {
            window: YearWindow::new(2008, 2015).unwrap(),
        };
        let table = CountryTable::bundled();
        let (records, _) = parse_publications(input.as_bytes(), &cfg, table).unwrap();
        let line = line_from_record(&records[0]);
        let json = serde_json::to_string(&line).unwrap();
        let (again, _) = parse_publications(json.as_bytes(), &cfg, table).unwrap();
        let a = serde_json::to_string(&records[0]).unwrap();
        let b = serde_json::to_string(&again[0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gzip_input_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("in.jsonl.gz");
        let file = File::create(&path).unwrap();
        let mut gz = flate2::write::GzEncoder::new(file, flate2::Compression::default());
        writeln!(gz, r#"{{"pub_id":"p1","year":2010,"authors":[{{"surname":"A","given":"B"}}]}}"#)
            .unwrap();
        gz.finish().unwrap();
        let reader = open_reader(&path).unwrap();
        let cfg = IngestConfig {
            window: YearWindow::new(2008, 2015).unwrap(),
        };
        let (records, _) = parse_publications(reader, &cfg, CountryTable::bundled()).unwrap();
        assert_eq!(records.len(), 1);
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jsonl");
        let items = vec![serde_json::json!({"a": 1}), serde_json::json!({"b": 2})];
        write_jsonl(&path, &items).unwrap();
        let back: Vec<serde_json::Value> = read_jsonl(&path).unwrap();
        assert_eq!(items, back);
    }
}
