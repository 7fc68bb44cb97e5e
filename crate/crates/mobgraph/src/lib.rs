//! mobgraph — international scientific-mobility profiles from bibliographic
//! records.
//!
//! The library is organized as a pipeline of stages that communicate through
//! plain data types (and, at the CLI level, through line-delimited JSON
//! files):
//!
//! 1. [`ingest`] parses raw publication lines into canonical
//!    [`model::PublicationRecord`]s with normalized author names and
//!    ISO 3166-1 alpha-3 affiliation countries.
//! 2. [`disambig`] clusters author mentions into [`model::Scholar`]s with a
//!    rule-based pairwise scorer inside (surname, first-initial) blocks.
//! 3. [`timeline`] builds per-scholar affiliation-country timelines and
//!    fills publication gaps by carrying the last observed affiliation
//!    forward.
//! 4. [`taxonomy`] classifies each timeline into a mobility type
//!    (not mobile, migrant, traveler, non-directional) and assigns
//!    per-country roles.
//! 5. [`indicators`] aggregates classifications into country profiles,
//!    shares, trend series and cohort flow matrices.
//! 6. [`synth`] generates scripted synthetic corpora with ground truth and
//!    hosts the brute-force classification oracle used for self-testing.
//!
//! [`pipeline`] wires the stages together end to end; [`cli`] exposes them
//! as subcommands. Every stage is deterministic: identical inputs and
//! configuration produce byte-identical outputs regardless of thread count.
//!
//! See the `examples/` directory for a runnable walkthrough of each
//! capability.

pub mod cli;
pub mod country;
pub mod disambig;
pub mod formats;
pub mod indicators;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod synth;
pub mod taxonomy;
pub mod timeline;

pub use country::Alpha3;
pub use model::{AuthorMention, CorpusStats, PublicationRecord, Scholar, YearWindow};
pub use taxonomy::{CountryRole, MobilityClassification, MobilityType};
pub use timeline::{AffiliationTimeline, ImputeMode};
