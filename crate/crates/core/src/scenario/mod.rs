//! Scenario configuration, the closed-loop runner, recorded-data ingestion and
//! trace files.

pub mod config;
pub mod ingest;
pub mod presets;
pub mod runner;
pub mod trace_io;

pub use config::{
    ColumnMap, FeedForward, IngestSource, LoopTuning, LossPolicy, OutputPaths, PllInit, ScenarioConfig, SignalSource,
    SyntheticSignal, DEFAULT_DT, DEFAULT_GAP_FACTOR,
};
pub use ingest::{ingest_csv, ingest_reader, IngestedSignal};
pub use presets::{preset, PRESET_NAMES};
pub use runner::{run_ingested, run_samples, run_scenario, RunOutput};
pub use trace_io::{metrics_json, read_trace_csv, write_trace_csv, TRACE_HEADER};
