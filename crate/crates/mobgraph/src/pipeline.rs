//! Pipeline orchestration: ingest → disambiguate → timelines → classify →
//! profiles, communicating only through declared files, with a run manifest
//! recording configuration, input digests, row counts and timings.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::country::{Alpha3, CountryTable};
use crate::disambig::{self, DisambigConfig, ScoringWeights};
use crate::formats;
use crate::indicators::{self, percent_1dp, FlowDirection};
use crate::ingest::{self, IngestConfig};
use crate::model::{CorpusStats, PublicationRecord, Scholar, YearWindow};
use crate::synth::GroundTruth;
use crate::taxonomy::{self, CountryRole, MobilityClassification, MobilityType};
use crate::timeline::{AffiliationTimeline, ImputeMode};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// An optional flow-matrix request carried in the run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowRequest {
    pub first_year: i32,
    pub direction: FlowDirection,
    pub focal: Alpha3,
    pub top_n: usize,
}

/// An optional trend request carried in the run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrendRequest {
    pub first_year: i32,
    pub min_pubs: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub window: YearWindow,
    /// Defaults to the window end.
    #[serde(default)]
    pub horizon: Option<i32>,
    #[serde(default = "default_impute_mode")]
    pub impute_mode: ImputeMode,
    #[serde(default)]
    pub weights_path: Option<PathBuf>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub precluster: Option<PathBuf>,
    #[serde(default)]
    pub country_table: Option<PathBuf>,
    /// Countries for the profile report.
    #[serde(default)]
    pub countries: Vec<Alpha3>,
    #[serde(default)]
    pub flows: Option<FlowRequest>,
    #[serde(default)]
    pub trend: Option<TrendRequest>,
}

fn default_impute_mode() -> ImputeMode {
    ImputeMode::WindowEnd
}

impl RunConfig {
    pub fn horizon(&self) -> i32 {
        self.horizon.unwrap_or(self.window.end)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(
            self.horizon() >= self.window.start,
            "horizon {} precedes window start {}",
            self.horizon(),
            self.window.start
        );
        if let Some(t) = self.threshold {
            anyhow::ensure!(t.is_finite() && t >= 0.0, "threshold must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub rows_out: u64,
    pub skipped: bool,
    pub millis: u128,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: serde_json::Value,
    pub input_digests: BTreeMap<String, String>,
    pub stages: Vec<StageReport>,
    pub completed: bool,
}

/// Load scoring weights, applying an optional threshold override.
pub fn load_weights(
    weights_path: Option<&Path>,
    threshold: Option<f64>,
) -> anyhow::Result<ScoringWeights> {
    let mut w: ScoringWeights = match weights_path {
        Some(p) => formats::read_json(p)?,
        None => ScoringWeights::default(),
    };
    if let Some(t) = threshold {
        w.threshold = t;
    }
    Ok(w)
}

pub fn load_country_table(path: Option<&Path>) -> anyhow::Result<&'static CountryTable> {
    match path {
        None => Ok(CountryTable::bundled()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let table = CountryTable::parse(&text)?;
            // tables are loaded once per process
            Ok(Box::leak(Box::new(table)))
        }
    }
}

/// Read a mention→label mapping for the disambiguation bypass. Accepts
/// either a plain JSON object or a ground-truth document.
pub fn read_precluster(path: &Path) -> anyhow::Result<HashMap<String, String>> {
    if let Ok(truth) = formats::read_json::<GroundTruth>(path) {
        if !truth.mention_to_truth.is_empty() {
            return Ok(truth.mention_to_truth.into_iter().collect());
        }
    }
    let map: HashMap<String, String> = formats::read_json(path)?;
    Ok(map)
}

/// Horizon selector for one timeline under the configured imputation mode.
pub fn horizon_for_mode(mode: ImputeMode, window_horizon: i32) -> impl Fn(&AffiliationTimeline) -> i32 {
    move |t| match mode {
        ImputeMode::WindowEnd => window_horizon,
        ImputeMode::LastObserved => t.last_observed_year,
    }
}

/// Write the profile table: count columns then share columns in percent to
/// one decimal.
pub fn write_profile_csv(
    path: &Path,
    report: &[(indicators::CountryProfile, indicators::ShareReport)],
) -> anyhow::Result<()> {
    use std::io::Write;
    let mut w = formats::create_writer(path)?;
    writeln!(
        w,
        "country,total,mobile,emigrants,immigrants,outgoing_travelers,incoming_travelers,non_directionals,mobile_pct,migrant_pct,traveler_pct,nondirectional_pct,outgoing_pct,incoming_pct"
    )?;
    for (p, s) in report {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{:.1},{:.1},{:.1},{:.1},{:.1},{:.1}",
            p.country,
            p.total_scholars,
            p.mobile,
            p.emigrants,
            p.immigrants,
            p.outgoing_travelers,
            p.incoming_travelers,
            p.non_directionals,
            percent_1dp(s.mobile_share),
            percent_1dp(s.migrant_share_of_mobile),
            percent_1dp(s.traveler_share_of_mobile),
            percent_1dp(s.nondirectional_share_of_mobile),
            percent_1dp(s.outgoing_share_of_mobile),
            percent_1dp(s.incoming_share_of_mobile),
        )?;
    }
    w.flush()?;
    Ok(())
}

struct StageTimer {
    start: Instant,
}

impl StageTimer {
    fn start() -> Self {
        StageTimer { start: Instant::now() }
    }

    fn report(self, stage: &str, rows_out: u64) -> StageReport {
        StageReport {
            stage: stage.to_string(),
            rows_out,
            skipped: false,
            millis: self.start.elapsed().as_millis(),
            notes: BTreeMap::new(),
        }
    }
}

/// Execute the full pipeline. Outputs land in `out_dir`:
/// `records.jsonl`, `stats.json`, `scholars.jsonl`, `timelines.jsonl`,
/// `classifications.jsonl`, `profiles.csv`, plus optional `flows.json` /
/// `trend.json`, and `manifest.json`.
pub fn run_pipeline(config: &RunConfig) -> anyhow::Result<RunManifest> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)?;
    let mut manifest = RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        config: serde_json::to_value(config)?,
        input_digests: BTreeMap::new(),
        stages: Vec::new(),
        completed: false,
    };
    manifest.input_digests.insert(
        config.input.display().to_string(),
        formats::file_digest(&config.input)?,
    );

    // a failed stage still leaves a partial manifest behind
    let result = run_stages(config, &mut manifest);
    manifest.completed = result.is_ok();
    formats::write_json(&config.out_dir.join("manifest.json"), &manifest)?;
    result?;
    Ok(manifest)
}

fn run_stages(config: &RunConfig, manifest: &mut RunManifest) -> anyhow::Result<()> {
    let table = load_country_table(config.country_table.as_deref())?;

    // ingest
    let timer = StageTimer::start();
    let reader = formats::open_reader(&config.input)?;
    let ingest_cfg = IngestConfig { window: config.window };
    let (records, stats) = ingest::parse_publications(reader, &ingest_cfg, table)?;
    formats::write_records(&config.out_dir.join("records.jsonl"), &records)?;
    formats::write_json(&config.out_dir.join("stats.json"), &stats)?;
    let mut report = timer.report("ingest", stats.n_records);
    report.notes.insert("rejected".into(), stats.n_rejected);
    manifest.stages.push(report);

    // disambiguate (or precluster bypass)
    let timer = StageTimer::start();
    let (scholars, skipped) = match &config.precluster {
        Some(path) => {
            let mapping = read_precluster(path)?;
            (disambig::scholars_from_precluster(&records, &mapping)?, true)
        }
        None => {
            let weights = load_weights(config.weights_path.as_deref(), config.threshold)?;
            let cfg = DisambigConfig {
                weights,
                ..DisambigConfig::default()
            };
            (disambig::disambiguate(&records, &cfg), false)
        }
    };
    formats::write_jsonl(&config.out_dir.join("scholars.jsonl"), &scholars)?;
    let mut report = timer.report("disambiguate", scholars.len() as u64);
    report.skipped = skipped;
    manifest.stages.push(report);

    // timelines
    let timer = StageTimer::start();
    let horizon = config.horizon();
    let (timelines, rejects) = crate::timeline::timelines_for_corpus(
        &scholars,
        &records,
        horizon_for_mode(config.impute_mode, horizon),
    );
    formats::write_jsonl(&config.out_dir.join("timelines.jsonl"), &timelines)?;
    let mut report = timer.report("timelines", timelines.len() as u64);
    report.notes.insert("no_affiliation_signal".into(), rejects);
    manifest.stages.push(report);

    // classify
    let timer = StageTimer::start();
    let classifications = taxonomy::classify_all(&timelines);
    formats::write_jsonl(
        &config.out_dir.join("classifications.jsonl"),
        &classifications,
    )?;
    manifest
        .stages
        .push(timer.report("classify", classifications.len() as u64));

    // profiles
    let timer = StageTimer::start();
    let countries: Vec<Alpha3> = if config.countries.is_empty() {
        let mut seen: std::collections::BTreeSet<Alpha3> = Default::default();
        for c in &classifications {
            seen.extend(c.countries_ever.iter().copied());
        }
        seen.into_iter().collect()
    } else {
        config.countries.clone()
    };
    let report_rows = indicators::profile_report(&classifications, &countries);
    write_profile_csv(&config.out_dir.join("profiles.csv"), &report_rows)?;
    manifest
        .stages
        .push(timer.report("profile", report_rows.len() as u64));

    if let Some(flow) = &config.flows {
        let timer = StageTimer::start();
        let matrix = indicators::flow_matrix(
            &timelines,
            flow.first_year,
            flow.direction,
            flow.focal,
            horizon,
            flow.top_n,
        );
        formats::write_json(&config.out_dir.join("flows.json"), &matrix)?;
        manifest
            .stages
            .push(timer.report("flows", matrix.cohort_size));
    }
    if let Some(trend) = &config.trend {
        let timer = StageTimer::start();
        let pub_counts = indicators::pub_counts_in_window(&scholars, config.window);
        let series = indicators::affiliation_trend(
            &timelines,
            &pub_counts,
            trend.first_year,
            trend.min_pubs,
            config.window,
        );
        formats::write_json(&config.out_dir.join("trend.json"), &series)?;
        manifest
            .stages
            .push(timer.report("trend", series.cohort_size));
    }

    Ok(())
}

#[derive(Debug, thiserror::Error)]
#[error("unknown scholar {0}")]
pub struct UnknownScholar(pub String);

/// Human-readable trace of one scholar's timeline and classification.
pub fn explain(
    scholar_id: &str,
    timelines: &[AffiliationTimeline],
    classifications: &[MobilityClassification],
) -> Result<String, UnknownScholar> {
    let t = timelines
        .iter()
        .find(|t| t.scholar_id == scholar_id)
        .ok_or_else(|| UnknownScholar(scholar_id.to_string()))?;
    let c = classifications
        .iter()
        .find(|c| c.scholar_id == scholar_id)
        .ok_or_else(|| UnknownScholar(scholar_id.to_string()))?;

    let fmt_set = |s: &std::collections::BTreeSet<Alpha3>| {
        s.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    };
    let mut out = String::new();
    out.push_str(&format!("scholar {scholar_id}\n"));
    out.push_str(&format!(
        "  first year {} origin {{{}}}\n",
        t.first_year,
        fmt_set(&t.origin)
    ));
    for (year, set) in &t.imputed {
        let tag = if t.observed.contains_key(year) { "observed" } else { "imputed" };
        out.push_str(&format!("  {year} {{{}}} ({tag})\n", fmt_set(set)));
    }
    let rule = match c.global_type {
        MobilityType::NotMobile => "single country across all years".to_string(),
        MobilityType::NonDirectional => {
            "multiple origin countries, country set never changes".to_string()
        }
        MobilityType::Migrant => {
            let year = t
                .imputed
                .iter()
                .find(|(_, s)| s.intersection(&t.origin).next().is_none())
                .map(|(y, _)| *y)
                .unwrap_or(t.first_year);
            format!("first year without any origin country: {year}")
        }
        MobilityType::Traveler => {
            "origin affiliation retained every year, additional countries gained".to_string()
        }
    };
    out.push_str(&format!("  type {:?} ({rule})\n", c.global_type));
    for (country, role) in &c.country_roles {
        if *role != CountryRole::None {
            out.push_str(&format!("  role {country}: {role:?}\n"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaEntry {
    /// Stable identifier, e.g. `records.v1`.
    pub id: String,
    pub file: String,
    pub format: String,
    pub fields: Vec<String>,
}

/// Machine-readable description of every inter-stage file format.
pub fn version_and_schema() -> Vec<SchemaEntry> {
    let entry = |id: &str, file: &str, format: &str, fields: &[&str]| SchemaEntry {
        id: id.to_string(),
        file: file.to_string(),
        format: format.to_string(),
        fields: fields.iter().map(|s| s.to_string()).collect(),
    };
    vec![
        entry(
            "records.v1",
            "records.jsonl",
            "jsonl",
            &["pub_id", "year", "venue_id", "references", "authors"],
        ),
        entry(
            "stats.v1",
            "stats.json",
            "json",
            &["n_records", "n_mentions", "n_rejected", "rejection_reasons"],
        ),
        entry(
            "scholars.v1",
            "scholars.jsonl",
            "jsonl",
            &["scholar_id", "mention_ids", "pubs_by_year"],
        ),
        entry(
            "timelines.v1",
            "timelines.jsonl",
            "jsonl",
            &["scholar_id", "first_year", "last_observed_year", "observed", "imputed", "origin"],
        ),
        entry(
            "classifications.v1",
            "classifications.jsonl",
            "jsonl",
            &["scholar_id", "first_year", "global_type", "origin", "countries_ever", "country_roles"],
        ),
        entry(
            "profiles.v1",
            "profiles.csv",
            "csv",
            &[
                "country", "total", "mobile", "emigrants", "immigrants", "outgoing_travelers",
                "incoming_travelers", "non_directionals", "mobile_pct", "migrant_pct",
                "traveler_pct", "nondirectional_pct", "outgoing_pct", "incoming_pct",
            ],
        ),
        entry(
            "flows.v1",
            "flows.json",
            "json",
            &["first_year", "horizon", "direction", "focal", "top_n", "cohort_size", "per_year_mass", "transitions"],
        ),
        entry(
            "trend.v1",
            "trend.json",
            "json",
            &["first_year", "min_pubs", "window", "cohort_size", "series"],
        ),
        entry(
            "manifest.v1",
            "manifest.json",
            "json",
            &["tool_version", "config", "input_digests", "stages", "completed"],
        ),
    ]
}

/// Re-export used by stats consumers.
pub fn read_stats(path: &Path) -> anyhow::Result<CorpusStats> {
    formats::read_json(path)
}

pub fn read_records(path: &Path, window: YearWindow) -> anyhow::Result<Vec<PublicationRecord>> {
    let reader = formats::open_reader(path)?;
    let cfg = IngestConfig { window };
    let (records, _) = ingest::parse_publications(reader, &cfg, CountryTable::bundled())?;
    Ok(records)
}

pub fn read_scholars(path: &Path) -> anyhow::Result<Vec<Scholar>> {
    formats::read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_has_all_stage_formats() {
        let schemas = version_and_schema();
        assert!(schemas.len() >= 5);
        let ids: Vec<&str> = schemas.iter().map(|s| s.id.as_str()).collect();
        for expected in ["records.v1", "scholars.v1", "timelines.v1", "classifications.v1", "profiles.v1"] {
            assert!(ids.contains(&expected), "missing {expected}");
        }
        // stable across calls
        let again = version_and_schema();
        assert_eq!(
            serde_json::to_string(&schemas).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn explain_unknown_scholar_errors() {
        assert!(explain("nope", &[], &[]).is_err());
    }
}
