//! Pro Kabaddi League data toolkit: typed domain model, fixture ingestion,
//! the scoring-law engine, derived statistics, read queries and
//! deterministic renderers.
//!
//! The usual flow is [`ingest::build_store`] over a data directory, then the
//! `query` functions for tables, `rules`/`stats` for validation and derived
//! numbers, and `viz` for SVG and CSV output.

pub mod ingest;
pub mod model;
pub mod query;
pub mod rules;
pub mod stats;
pub mod synth;
pub mod viz;

pub use ingest::{build_store, load_fixture, DataStore, FixtureKind, Manifest};
pub use model::{classify_event, parse_clock, winning_margin, Event, MatchDetail, MatchSummary};
pub use query::QueryError;
pub use rules::{
    check_event, reconstruct_score, validate_match, RuleConfig, ValidationReport, Violation,
};
