//! Command-line entry point wiring the pipeline stages together.
//!
//! Exit codes: 0 success, 1 usage error, 2 missing input, 3 invalid
//! configuration, 4 stage failure, 5 unknown scholar.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::country::Alpha3;
use crate::disambig::{self, DisambigConfig};
use crate::formats;
use crate::indicators::{self, FlowDirection};
use crate::ingest::{self, IngestConfig};
use crate::model::YearWindow;
use crate::pipeline::{self, RunConfig};
use crate::synth::{self, ScholarScript};
use crate::taxonomy::{self, MobilityClassification};
use crate::timeline::{AffiliationTimeline, ImputeMode};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_MISSING_INPUT: u8 = 2;
pub const EXIT_INVALID_CONFIG: u8 = 3;
pub const EXIT_STAGE_FAILURE: u8 = 4;
pub const EXIT_UNKNOWN_SCHOLAR: u8 = 5;

/// Window wide enough to accept every record of an already-filtered
/// intermediate file.
const ANY_WINDOW: YearWindow = YearWindow { start: 1000, end: 3000 };

#[derive(Parser)]
#[command(name = "mobgraph", version, about = "Scientific mobility profiles from bibliographic records")]
struct Cli {
    /// Run configuration file (JSON); used by `run`, flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (falls back to MOBGRAPH_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and normalize raw publication lines into canonical records.
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "2008:2015")]
        window: YearWindow,
        #[arg(long)]
        country_table: Option<PathBuf>,
    },
    /// Cluster author mentions into scholars.
    Disambiguate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        threshold: Option<f64>,
        /// Mention→scholar mapping file; skips scoring entirely.
        #[arg(long)]
        precluster: Option<PathBuf>,
    },
    /// Build imputed affiliation timelines per scholar.
    Timelines {
        #[arg(long)]
        scholars: PathBuf,
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2015)]
        horizon: i32,
        #[arg(long = "impute-through", default_value = "window-end")]
        impute_through: ImputeMode,
    },
    /// Classify timelines into mobility types and country roles.
    Classify {
        #[arg(long)]
        timelines: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Country profile table with share columns.
    Profile {
        #[arg(long = "class")]
        classifications: PathBuf,
        /// Comma-separated alpha-3 codes, e.g. CAN,ESP,NLD,USA,ZAF.
        #[arg(long, value_delimiter = ',')]
        countries: Vec<Alpha3>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cohort flow matrix for alluvial plotting.
    Flows {
        #[arg(long)]
        timelines: PathBuf,
        #[arg(long)]
        first_year: i32,
        #[arg(long)]
        direction: FlowDirection,
        #[arg(long)]
        focal: Alpha3,
        #[arg(long, default_value_t = 2015)]
        horizon: i32,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        out: PathBuf,
        /// Optional static alluvial rendering.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Per-country affiliation counts for a productivity-filtered cohort.
    Trend {
        #[arg(long)]
        timelines: PathBuf,
        #[arg(long)]
        scholars: PathBuf,
        #[arg(long)]
        first_year: i32,
        #[arg(long)]
        min_pubs: u32,
        #[arg(long, default_value = "2008:2015")]
        window: YearWindow,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus with ground truth from scripts.
    Synth {
        #[arg(long)]
        scripts: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out_corpus: PathBuf,
        #[arg(long)]
        out_truth: PathBuf,
    },
    /// Differential self-test of the classifier against the brute-force
    /// oracle.
    Selftest {
        #[arg(long, default_value_t = 3)]
        max_countries: usize,
        #[arg(long, default_value_t = 4)]
        max_years: usize,
    },
    /// Trace one scholar's timeline and classification.
    Explain {
        #[arg(long)]
        scholar: String,
        #[arg(long)]
        timelines: PathBuf,
        #[arg(long = "class")]
        classifications: PathBuf,
    },
    /// Run the whole pipeline: ingest, disambiguate, timelines, classify,
    /// profile.
    Run {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        window: Option<YearWindow>,
        #[arg(long)]
        horizon: Option<i32>,
        #[arg(long = "impute-through")]
        impute_through: Option<ImputeMode>,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        threshold: Option<f64>,
        #[arg(long)]
        precluster: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        countries: Vec<Alpha3>,
    },
    /// Print the schema of every inter-stage file format.
    Schema,
}

macro_rules! str_value_parser {
    ($ty:ty, $parser:ident) => {
        #[derive(Clone)]
        #[doc(hidden)]
        pub struct $parser;

        impl clap::builder::TypedValueParser for $parser {
            type Value = $ty;

            fn parse_ref(
                &self,
                _cmd: &clap::Command,
                _arg: Option<&clap::Arg>,
                value: &std::ffi::OsStr,
            ) -> Result<Self::Value, clap::Error> {
                value.to_string_lossy().parse().map_err(|e| {
                    clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{e}\n"))
                })
            }
        }

        impl clap::builder::ValueParserFactory for $ty {
            type Parser = $parser;

            fn value_parser() -> Self::Parser {
                $parser
            }
        }
    };
}

str_value_parser!(YearWindow, YearWindowParser);
str_value_parser!(Alpha3, Alpha3Parser);
str_value_parser!(ImputeMode, ImputeModeParser);
str_value_parser!(FlowDirection, FlowDirectionParser);

fn require_input(path: &Path) -> Result<(), u8> {
    if path.exists() {
        Ok(())
    } else {
        eprintln!("error: input not found: {}", path.display());
        Err(EXIT_MISSING_INPUT)
    }
}

fn stage_err(err: anyhow::Error) -> u8 {
    eprintln!("error: {err:#}");
    EXIT_STAGE_FAILURE
}

fn config_err(err: anyhow::Error) -> u8 {
    eprintln!("error: {err:#}");
    EXIT_INVALID_CONFIG
}

fn read_timelines(path: &Path) -> Result<Vec<AffiliationTimeline>, u8> {
    require_input(path)?;
    formats::read_jsonl(path).map_err(stage_err)
}

fn read_classifications(path: &Path) -> Result<Vec<MobilityClassification>, u8> {
    require_input(path)?;
    formats::read_jsonl(path).map_err(stage_err)
}

fn init_threads(threads: Option<usize>) {
    let n = threads.or_else(|| {
        std::env::var("MOBGRAPH_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    init_threads(cli.threads);
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn dispatch(cli: Cli) -> Result<(), u8> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Ingest { input, out, window, country_table } => {
            require_input(&input)?;
            let table = pipeline::load_country_table(country_table.as_deref()).map_err(config_err)?;
            let reader = formats::open_reader(&input).map_err(stage_err)?;
            let (records, stats) =
                ingest::parse_publications(reader, &IngestConfig { window }, table)
                    .map_err(stage_err)?;
            formats::write_records(&out, &records).map_err(stage_err)?;
            let stats_path = out.with_extension("stats.json");
            formats::write_json(&stats_path, &stats).map_err(stage_err)?;
            if !quiet {
                println!(
                    "ingested {} records, {} mentions, {} rejected",
                    stats.n_records, stats.n_mentions, stats.n_rejected
                );
            }
            Ok(())
        }
        Command::Disambiguate { input, out, weights, threshold, precluster } => {
            require_input(&input)?;
            let records = pipeline::read_records(&input, ANY_WINDOW).map_err(stage_err)?;
            let scholars = match precluster {
                Some(path) => {
                    require_input(&path)?;
                    let mapping = pipeline::read_precluster(&path).map_err(config_err)?;
                    disambig::scholars_from_precluster(&records, &mapping).map_err(stage_err)?
                }
                None => {
                    let weights = pipeline::load_weights(weights.as_deref(), threshold)
                        .map_err(config_err)?;
                    let cfg = DisambigConfig { weights, ..DisambigConfig::default() };
                    disambig::disambiguate(&records, &cfg)
                }
            };
            formats::write_jsonl(&out, &scholars).map_err(stage_err)?;
            if !quiet {
                println!("{} scholars", scholars.len());
            }
            Ok(())
        }
        Command::Timelines { scholars, records, out, horizon, impute_through } => {
            require_input(&scholars)?;
            require_input(&records)?;
            let scholars = pipeline::read_scholars(&scholars).map_err(stage_err)?;
            let records = pipeline::read_records(&records, ANY_WINDOW).map_err(stage_err)?;
            let (timelines, rejects) = crate::timeline::timelines_for_corpus(
                &scholars,
                &records,
                pipeline::horizon_for_mode(impute_through, horizon),
            );
            formats::write_jsonl(&out, &timelines).map_err(stage_err)?;
            if !quiet {
                println!("{} timelines, {} without affiliation signal", timelines.len(), rejects);
            }
            Ok(())
        }
        Command::Classify { timelines, out } => {
            let timelines = read_timelines(&timelines)?;
            let classifications = taxonomy::classify_all(&timelines);
            formats::write_jsonl(&out, &classifications).map_err(stage_err)?;
            if !quiet {
                println!("{} classifications", classifications.len());
            }
            Ok(())
        }
        Command::Profile { classifications, countries, out } => {
            let classifications = read_classifications(&classifications)?;
            let report = indicators::profile_report(&classifications, &countries);
            pipeline::write_profile_csv(&out, &report).map_err(stage_err)?;
            Ok(())
        }
        Command::Flows { timelines, first_year, direction, focal, horizon, top, out, svg } => {
            let timelines = read_timelines(&timelines)?;
            let matrix =
                indicators::flow_matrix(&timelines, first_year, direction, focal, horizon, top);
            if matrix.is_empty() && !quiet {
                eprintln!("warning: empty cohort for {focal} {first_year}");
            }
            formats::write_json(&out, &matrix).map_err(stage_err)?;
            if let Some(svg_path) = svg {
                let svg_doc = indicators::render_alluvial_svg(&matrix);
                std::fs::write(&svg_path, svg_doc).map_err(|e| stage_err(e.into()))?;
            }
            Ok(())
        }
        Command::Trend { timelines, scholars, first_year, min_pubs, window, out } => {
            let timelines = read_timelines(&timelines)?;
            require_input(&scholars)?;
            let scholars = pipeline::read_scholars(&scholars).map_err(stage_err)?;
            let pub_counts = indicators::pub_counts_in_window(&scholars, window);
            let series =
                indicators::affiliation_trend(&timelines, &pub_counts, first_year, min_pubs, window);
            formats::write_json(&out, &series).map_err(stage_err)?;
            Ok(())
        }
        Command::Synth { scripts, seed, out_corpus, out_truth } => {
            require_input(&scripts)?;
            let scripts: Vec<ScholarScript> = formats::read_json(&scripts).map_err(config_err)?;
            let (records, truth) = synth::generate(&scripts, seed);
            formats::write_jsonl(&out_corpus, &records).map_err(stage_err)?;
            formats::write_json(&out_truth, &truth).map_err(stage_err)?;
            if !quiet {
                println!("{} publications, {} scholars", records.len(), truth.expected.len());
            }
            Ok(())
        }
        Command::Selftest { max_countries, max_years } => {
            let mut checked = 0u64;
            for len in 1..=max_years {
                for seq in synth::enumerate_small_timelines(max_countries, len) {
                    let observed: std::collections::BTreeMap<_, _> = seq
                        .iter()
                        .cloned()
                        .enumerate()
                        .map(|(i, s)| (2008 + i as i32, s))
                        .collect();
                    let t = AffiliationTimeline::from_observed("selftest", observed)
                        .expect("non-empty sequence");
                    let expected = synth::oracle_classify(&seq);
                    let got = taxonomy::classify(&t);
                    if got != expected {
                        eprintln!("selftest FAIL on {seq:?}: classify={got:?} oracle={expected:?}");
                        return Err(EXIT_STAGE_FAILURE);
                    }
                    checked += 1;
                }
            }
            if !quiet {
                println!("selftest OK: {checked} sequences agree with the oracle");
            }
            Ok(())
        }
        Command::Explain { scholar, timelines, classifications } => {
            let timelines = read_timelines(&timelines)?;
            let classifications = read_classifications(&classifications)?;
            match pipeline::explain(&scholar, &timelines, &classifications) {
                Ok(trace) => {
                    print!("{trace}");
                    Ok(())
                }
                Err(err) => {
                    eprintln!("error: {err}");
                    Err(EXIT_UNKNOWN_SCHOLAR)
                }
            }
        }
        Command::Run {
            input,
            out_dir,
            window,
            horizon,
            impute_through,
            weights,
            threshold,
            precluster,
            countries,
        } => {
            let mut config: RunConfig = match &cli.config {
                Some(path) => {
                    require_input(path)?;
                    formats::read_json(path).map_err(config_err)?
                }
                None => RunConfig {
                    input: PathBuf::new(),
                    out_dir: PathBuf::new(),
                    window: YearWindow { start: 2008, end: 2015 },
                    horizon: None,
                    impute_mode: ImputeMode::WindowEnd,
                    weights_path: None,
                    threshold: None,
                    precluster: None,
                    country_table: None,
                    countries: Vec::new(),
                    flows: None,
                    trend: None,
                },
            };
            if let Some(v) = input {
                config.input = v;
            }
            if let Some(v) = out_dir {
                config.out_dir = v;
            }
            if let Some(v) = window {
                config.window = v;
            }
            if let Some(v) = horizon {
                config.horizon = Some(v);
            }
            if let Some(v) = impute_through {
                config.impute_mode = v;
            }
            if let Some(v) = weights {
                config.weights_path = Some(v);
            }
            if let Some(v) = threshold {
                config.threshold = Some(v);
            }
            if let Some(v) = precluster {
                config.precluster = Some(v);
            }
            if !countries.is_empty() {
                config.countries = countries;
            }
            if config.input.as_os_str().is_empty() || config.out_dir.as_os_str().is_empty() {
                eprintln!("error: run requires --in and --out-dir (or a --config providing them)");
                return Err(EXIT_INVALID_CONFIG);
            }
            require_input(&config.input)?;
            config.validate().map_err(config_err)?;
            let manifest = pipeline::run_pipeline(&config).map_err(stage_err)?;
            if !quiet {
                for stage in &manifest.stages {
                    let mark = if stage.skipped { "skipped" } else { "done" };
                    println!("{:<12} {:>9} rows  {:>6} ms  {}", stage.stage, stage.rows_out, stage.millis, mark);
                }
            }
            Ok(())
        }
        Command::Schema => {
            let doc = serde_json::json!({
                "tool_version": pipeline::TOOL_VERSION,
                "schemas": pipeline::version_and_schema(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(())
        }
    }
}
